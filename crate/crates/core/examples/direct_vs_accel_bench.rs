//! Wall time of stepping every index against jumping straight to resets.
//!
//!     cargo run --release --example direct_vs_accel_bench -- 10000000

use std::time::Instant;

use rowland::accel::{AccelStream, Algorithm};
use rowland::engine::Generator;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let horizon: u64 = std::env::args().nth(1).map_or(Ok(2_000_000), |s| s.parse())?;
    rowland::numtheory::sieve();
    println!("{:<10} {:>8} {:>12} {:>12} {:>8}", "algorithm", "resets", "direct s", "accel s", "agree");
    for alg in [Algorithm::A1, Algorithm::A2 { n1: 10 }, Algorithm::A3 { n1: 10 }] {
        let spec = alg.engine_spec().validate()?;
        let t = Instant::now();
        let mut direct = Vec::new();
        for e in Generator::new(&spec).take((horizon - spec.n1) as usize) {
            let e = e?;
            if e.diff != 1 {
                direct.push(e.diff as u64);
            }
        }
        let direct_s = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let accel: Vec<u64> = AccelStream::new(alg)?.take(direct.len()).collect();
        let accel_s = t.elapsed().as_secs_f64();
        println!(
            "{:<10} {:>8} {direct_s:>12.4} {accel_s:>12.6} {:>8}",
            alg.to_string(),
            direct.len(),
            accel == direct
        );
    }
    Ok(())
}
