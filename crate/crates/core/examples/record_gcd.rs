//! Resets only on a new gcd record: differences 2^k + 1 at n = 2^(k+1) + 2.

use rowland::engine::GeneratorSpec;
use rowland::verify::{check_theorem7, Budget};

fn main() -> Result<(), rowland::Error> {
    let budget = Budget::Resets { count: 14, max_n: 1 << 16 };
    for spec in [GeneratorSpec::th7(), GeneratorSpec::th7_c7(), GeneratorSpec::th7_c5_slope3()] {
        let spec = spec.validate()?;
        let report = check_theorem7(&spec, budget, 0)?;
        println!("{}", report.subject);
        for s in &report.leading_resets {
            println!("  n = {:>6}  diff = {}", s.n, s.diff);
        }
        println!("  {}", report.verdict);
    }
    Ok(())
}
