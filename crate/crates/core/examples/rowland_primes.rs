//! Rowland's sequence and its prime differences.
//!
//!     cargo run --example rowland_primes -- 2000

use rowland::engine::{Generator, GeneratorSpec, StepKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_max: u64 = std::env::args().nth(1).map_or(Ok(1000), |s| s.parse())?;
    let spec = GeneratorSpec::rowland().validate()?;

    print!("a(1..=20): {}", spec.c1);
    for e in Generator::new(&spec).take(19) {
        print!(" {}", e?.value);
    }
    println!();

    let mut primes = Vec::new();
    for e in Generator::new(&spec).take(n_max as usize - 1) {
        let e = e?;
        if e.kind == StepKind::Reset {
            primes.push((e.n, e.diff));
        }
    }
    println!("{} nontrivial differences for n <= {n_max}:", primes.len());
    for (n, p) in primes {
        println!("  n = {n:>6}  a(n) - a(n-1) = {p}");
    }
    Ok(())
}
