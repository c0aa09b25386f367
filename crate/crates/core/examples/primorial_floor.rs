//! Resets gated on coprimality with a primorial, and where the floor
//! claim breaks.

use rowland::engine::{generate, GeneratorSpec};
use rowland::verify::{check_prime_floor, prime_floor_grid, run_grid};

fn main() -> Result<(), rowland::Error> {
    let instance = GeneratorSpec::th5(7, 14, 17).validate()?;
    let terms: Vec<u64> = generate(&instance, 26)?.iter().map(|t| t.value).collect();
    let report = check_prime_floor(&instance, 100_000)?;
    println!("m = 7, nu = 14, n1 = 17: {terms:?}");
    println!("  enlarged increments {:?}", report.leading_normalized());
    println!("  {report}");

    let grid = prime_floor_grid();
    let reports = run_grid(&grid, |s| check_prime_floor(s, 20_000).expect("primorial-gated"));
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed()).collect();
    println!("{} of {} grid configurations fail by n = 20000", failed.len(), reports.len());
    for r in failed.iter().take(5) {
        println!("  {r}");
    }
    Ok(())
}
