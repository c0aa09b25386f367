//! Every checker over its default grid, one summary line per suite.
//!
//!     cargo run --release --example verify_suite -- 100000

use rowland::accel::Algorithm;
use rowland::engine::GeneratorSpec;
use rowland::verify::{self, Budget, ClaimReport};

fn summarize(name: &str, reports: &[ClaimReport]) {
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{name:<16} {:>4} runs, {failed:>4} not passing", reports.len());
    if let Some(r) = reports.iter().find(|r| !r.passed()) {
        println!("{:<16} first: {r}", "");
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let horizon: u64 = std::env::args().nth(1).map_or(Ok(20_000), |s| s.parse())?;

    let claim = verify::run_grid(&verify::prime_claim_grid(), |s| verify::check_prime_claim(s, horizon));
    summarize("prime-claim", &claim);

    let floor = verify::run_grid(&verify::prime_floor_grid(), |s| verify::check_prime_floor(s, horizon).unwrap());
    summarize("prime-floor", &floor);

    let accel: Vec<ClaimReport> = [Algorithm::A1, Algorithm::A2 { n1: 7 }, Algorithm::A3 { n1: 9 }]
        .into_iter()
        .map(|a| verify::check_accel_vs_engine(a, Budget::Horizon(horizon)))
        .collect::<Result<_, _>>()?;
    summarize("accel-vs-engine", &accel);

    let eq = [(1, 7, 3), (3, 6, 2), (1, 7, 2)]
        .into_iter()
        .map(|(n1, c1, slope)| verify::check_equivalence_gcd_piecewise(n1, c1, slope, horizon))
        .collect::<Result<Vec<_>, _>>()?;
    summarize("equivalence", &eq);

    let t7 = verify::check_theorem7(&GeneratorSpec::th7().validate()?, Budget::Horizon(horizon), 0)?;
    summarize("theorem7", &[t7]);

    let scan = verify::scan_lemma1(horizon.min(2000))?;
    summarize("lemma1", std::slice::from_ref(&scan.report));
    println!(
        "{:<16} {} pairs exceed n/2, {} off the (n-1) | (j+1) pattern",
        "",
        scan.bound_violations.len(),
        scan.unexplained_violations().count()
    );
    Ok(())
}
