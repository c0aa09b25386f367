//! Offset sequences whose resets need a minimum gap since the last reset.
//!
//! The reference `nu = 4, n1 = 6` listing only comes out when the first
//! reset is left ungated; the other readings of the gap rule diverge early.

use rowland::engine::{generate, GeneratorSpec, Th3Threshold};
use rowland::verify::check_prime_claim;

fn main() -> Result<(), rowland::Error> {
    for (label, threshold) in [
        ("(nu-2)/2 from n1", Th3Threshold::Stated),
        ("nu+1 from n1", Th3Threshold::NuPlusOne),
        ("nu+1, first reset free", Th3Threshold::PaperExample),
    ] {
        let spec = GeneratorSpec::th3(4, 6, threshold).validate()?;
        let terms: Vec<u64> = generate(&spec, 14)?.iter().map(|t| t.value).collect();
        let report = check_prime_claim(&spec, 100_000);
        println!("gap {label:<24} {terms:?}");
        println!("    {report}");
    }

    let th4 = GeneratorSpec::th4(5, 15).validate()?;
    let report = check_prime_claim(&th4, 100_000);
    println!("slope 2, nu = 5, n1 = 15: diminished increments {:?}", &report.leading_normalized()[..6]);
    println!("    {report}");
    Ok(())
}
