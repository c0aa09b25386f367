//! The three accelerated streams, by iteration and by recursion, run until
//! the counter leaves 63 bits.

use rowland::accel::{accel_by_recursion, accel_iterate, AccelStream, Algorithm};

fn main() -> Result<(), rowland::Error> {
    for alg in [Algorithm::A1, Algorithm::A2 { n1: 4 }, Algorithm::A3 { n1: 5 }] {
        let mut stream = AccelStream::new(alg)?;
        let head: Vec<String> = stream
            .by_ref()
            .take(8)
            .map(|p| p.to_string())
            .collect();
        println!("{alg}: {} ... (N_8 = {})", head.join(", "), stream.state().counter);

        let it = accel_iterate(alg, usize::MAX)?;
        let rec = accel_by_recursion(alg, it.primes.len() + 1)?;
        println!(
            "  {} primes before overflow, largest {}, recursion agrees: {}",
            it.primes.len(),
            it.primes.iter().max().unwrap(),
            rec.primes == it.primes && rec.termination == it.termination
        );
    }
    Ok(())
}
