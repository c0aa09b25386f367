//! Claim checkers.
//!
//! Every checker runs a finite horizon and returns a [`ClaimReport`].
//! Primality is always re-established through [`numtheory`](crate::numtheory)
//! on the normalized difference, and steps are classified by their raw
//! difference rather than by the engine's [`StepKind`], so a checker never
//! takes the engine's word for anything it is checking.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::accel::{AccelStream, Algorithm};
use crate::engine::{
    Gate, GeneratorSpec, Generator, Preset, StepKind, StepRule, Th3Threshold, ValidSpec,
};
use crate::error::{Error, Result};
use crate::numtheory::{gcd, is_prime, nth_prime, primorial, Nat};

/// Counterexamples kept verbatim per report; the total is in [`ReportStats`].
pub const MAX_COUNTEREXAMPLES: usize = 32;
/// Leading resets recorded per report.
pub const MAX_SAMPLES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
    /// Stopped early by 63-bit overflow with no counterexample in the verified prefix.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub n: Nat,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReportStats {
    pub trivial: u64,
    pub resets: u64,
    pub max_prime: Option<Nat>,
    pub counterexample_total: u64,
}

/// One nontrivial step, as recorded in a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResetSample {
    pub n: Nat,
    pub diff: i64,
    pub normalized: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub claim_id: String,
    /// What was checked, e.g. `th3(nu=4, n1=6, gap>=1 from n1)`.
    pub subject: String,
    /// Requested horizon (an index, or a reset count for count budgets).
    pub horizon: Nat,
    /// Last index actually verified.
    pub reached: Nat,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    pub first_divergence: Option<Nat>,
    pub stats: ReportStats,
    pub leading_resets: Vec<ResetSample>,
}

impl ClaimReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Normalized values of the recorded leading resets.
    pub fn leading_normalized(&self) -> Vec<i64> {
        self.leading_resets.iter().map(|s| s.normalized).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}] horizon={} reached={} resets={} counterexamples={}",
            self.verdict,
            self.claim_id,
            self.subject,
            self.horizon,
            self.reached,
            self.stats.resets,
            self.stats.counterexample_total
        )?;
        if let Some(c) = self.counterexamples.first() {
            write!(f, " first: n={} {}", c.n, c.detail)?;
        }
        Ok(())
    }
}

struct ReportBuilder {
    claim_id: &'static str,
    subject: String,
    horizon: Nat,
    reached: Nat,
    counterexamples: Vec<Counterexample>,
    first_divergence: Option<Nat>,
    stats: ReportStats,
    samples: Vec<ResetSample>,
    overflowed: bool,
}

impl ReportBuilder {
    fn new(claim_id: &'static str, subject: impl Into<String>, horizon: Nat, start: Nat) -> Self {
        ReportBuilder {
            claim_id,
            subject: subject.into(),
            horizon,
            reached: start,
            counterexamples: Vec::new(),
            first_divergence: None,
            stats: ReportStats::default(),
            samples: Vec::new(),
            overflowed: false,
        }
    }

    fn counterexample(&mut self, n: Nat, detail: impl FnOnce() -> String) {
        self.stats.counterexample_total += 1;
        if self.counterexamples.len() < MAX_COUNTEREXAMPLES {
            self.counterexamples.push(Counterexample { n, detail: detail() });
        }
    }

    fn trivial(&mut self) {
        self.stats.trivial += 1;
    }

    fn reset(&mut self, n: Nat, diff: i64, normalized: i64) {
        self.stats.resets += 1;
        if normalized > 0 && is_prime(normalized as Nat) {
            self.stats.max_prime = self.stats.max_prime.max(Some(normalized as Nat));
        }
        if self.samples.len() < MAX_SAMPLES {
            self.samples.push(ResetSample { n, diff, normalized });
        }
    }

    fn finish(self) -> ClaimReport {
        let verdict = if !self.counterexamples.is_empty() {
            Verdict::Fail
        } else if self.overflowed {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        };
        ClaimReport {
            claim_id: self.claim_id.to_string(),
            subject: self.subject,
            horizon: self.horizon,
            reached: self.reached,
            verdict,
            counterexamples: self.counterexamples,
            first_divergence: self.first_divergence,
            stats: self.stats,
            leading_resets: self.samples,
        }
    }
}

/// Human-readable summary of a spec for report subjects.
pub fn describe(spec: &GeneratorSpec) -> String {
    let name = spec.preset.map_or("free-form", Preset::name);
    let rule = match spec.rule {
        StepRule::GcdAdditive => "gcd-additive".to_string(),
        StepRule::PiecewiseReset => format!("{}n{:+}", spec.slope, spec.offset),
    };
    let gate = match spec.gate {
        Gate::Always => String::new(),
        Gate::GapAtLeast { threshold, origin } => format!(
            ", gap>={threshold} from {}",
            match origin {
                crate::engine::GapOrigin::InitialIndex => "n1",
                crate::engine::GapOrigin::PreviousReset => "previous reset",
            }
        ),
        Gate::CoprimePrimorial { m } => format!(", coprime to primorial({m})"),
        Gate::RecordGcd => ", record gcd".to_string(),
    };
    format!("{name}({rule}, c({})={}{gate})", spec.n1, spec.c1)
}

/// Every difference is 1 or, after normalization, prime.
///
/// Steps with raw difference 1 must normalize to `1 + normalize_offset`;
/// every other step's normalized value must be prime.
pub fn check_prime_claim(spec: &ValidSpec, n_max: Nat) -> ClaimReport {
    let mut report = ReportBuilder::new("prime-claim", describe(spec), n_max, spec.n1);
    let trivial_value = 1 + spec.normalize_offset;
    for event in Generator::new(spec).take(n_max.saturating_sub(spec.n1) as usize) {
        let e = match event {
            Ok(e) => e,
            Err(_) => {
                report.overflowed = true;
                break;
            }
        };
        report.reached = e.n;
        if e.diff == 1 {
            report.trivial();
            if e.normalized != trivial_value {
                report.counterexample(e.n, || {
                    format!("trivial step normalized to {} (expected {trivial_value})", e.normalized)
                });
            }
        } else {
            report.reset(e.n, e.diff, e.normalized);
            if e.normalized < 2 || !is_prime(e.normalized as Nat) {
                report.counterexample(e.n, || {
                    format!("diff {} normalizes to {}, not prime", e.diff, e.normalized)
                });
            }
        }
    }
    report.finish()
}

/// Gcd-additive and ungated piecewise-reset streams from the same start
/// agree term by term.
pub fn check_equivalence_gcd_piecewise(n1: Nat, c1: Nat, slope: Nat, n_max: Nat) -> Result<ClaimReport> {
    let additive = GeneratorSpec::free_form(StepRule::GcdAdditive, slope, 0, Gate::Always, n1, c1).validate()?;
    let piecewise = GeneratorSpec::free_form(StepRule::PiecewiseReset, slope, 0, Gate::Always, n1, c1).validate()?;
    let subject = format!("c({n1})={c1}, slope {slope}");
    let mut report = ReportBuilder::new("equivalence", subject, n_max, n1);
    let steps = n_max.saturating_sub(n1) as usize;
    for (a, b) in Generator::new(&additive).zip(Generator::new(&piecewise)).take(steps) {
        let (a, b) = match (a, b) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                report.overflowed = true;
                break;
            }
        };
        if a.value != b.value {
            report.first_divergence = Some(a.n);
            report.counterexample(a.n, || {
                format!("gcd-additive gives {}, piecewise gives {}", a.value, b.value)
            });
            break;
        }
        report.reached = a.n;
        if a.diff > 1 {
            report.reset(a.n, a.diff, a.normalized);
        } else {
            report.trivial();
        }
    }
    Ok(report.finish())
}

/// How far an engine-driven check runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Budget {
    /// Every index up to and including this one.
    Horizon(Nat),
    /// This many resets, giving up (inconclusively) past `max_n`.
    Resets { count: usize, max_n: Nat },
}

impl Budget {
    fn horizon_label(self) -> Nat {
        match self {
            Budget::Horizon(n) => n,
            Budget::Resets { count, .. } => count as Nat,
        }
    }
}

/// Collects the nontrivial events of `spec` under `budget`. The flag is
/// true when the run ended early (overflow or `max_n`).
fn collect_resets(spec: &ValidSpec, budget: Budget, report: &mut ReportBuilder) -> (Vec<(Nat, i64)>, bool) {
    let mut resets = Vec::new();
    let (limit, count) = match budget {
        Budget::Horizon(n) => (n, usize::MAX),
        Budget::Resets { count, max_n } => (max_n, count),
    };
    if count == 0 {
        return (resets, false);
    }
    for event in Generator::new(spec) {
        let e = match event {
            Ok(e) => e,
            Err(_) => return (resets, true),
        };
        if e.n > limit {
            return (resets, matches!(budget, Budget::Resets { .. }));
        }
        report.reached = e.n;
        if e.diff != 1 {
            report.reset(e.n, e.diff, e.normalized);
            resets.push((e.n, e.diff));
            if resets.len() == count {
                break;
            }
        } else {
            report.trivial();
        }
    }
    (resets, false)
}

/// The accelerated stream equals the engine's nontrivial differences.
pub fn check_accel_vs_engine(algorithm: Algorithm, budget: Budget) -> Result<ClaimReport> {
    let spec = algorithm.engine_spec().validate()?;
    let subject = format!("{algorithm} vs {}", describe(&spec));
    let mut report = ReportBuilder::new("accel-vs-engine", subject, budget.horizon_label(), spec.n1);
    let (resets, truncated) = collect_resets(&spec, budget, &mut report);
    let mut stream = AccelStream::new(algorithm)?;
    for (i, (n, diff)) in resets.iter().enumerate() {
        let Some(p) = stream.next() else {
            report.overflowed = true;
            break;
        };
        if p as i64 != *diff {
            report.first_divergence.get_or_insert(*n);
            report.counterexample(*n, || format!("reset #{}: engine diff {diff}, accel {p}", i + 1));
        }
    }
    report.overflowed |= truncated;
    Ok(report.finish())
}

/// Nontrivial normalized values are primes above `p_m`, and every reset
/// index is coprime to `primorial(m)`.
pub fn check_prime_floor(spec: &ValidSpec, n_max: Nat) -> Result<ClaimReport> {
    let Gate::CoprimePrimorial { m } = spec.gate else {
        return Err(Error::Domain("prime-floor check needs a primorial-gated spec".into()));
    };
    let floor = nth_prime(m)?;
    let modulus = primorial(m)?;
    let trivial_value = 1 + spec.normalize_offset;
    let mut report = ReportBuilder::new("prime-floor", describe(spec), n_max, spec.n1);
    for event in Generator::new(spec).take(n_max.saturating_sub(spec.n1) as usize) {
        let e = match event {
            Ok(e) => e,
            Err(_) => {
                report.overflowed = true;
                break;
            }
        };
        report.reached = e.n;
        if e.diff == 1 {
            report.trivial();
            if e.normalized != trivial_value {
                report.counterexample(e.n, || {
                    format!("trivial step normalized to {} (expected {trivial_value})", e.normalized)
                });
            }
            continue;
        }
        report.reset(e.n, e.diff, e.normalized);
        let v = e.normalized;
        if v < 2 || !is_prime(v as Nat) {
            report.counterexample(e.n, || format!("diff {} enlarges to {v}, not prime", e.diff));
        } else if v as Nat <= floor {
            report.counterexample(e.n, || format!("prime {v} does not exceed p_{m} = {floor}"));
        }
        if gcd(e.n, modulus) != 1 {
            report.counterexample(e.n, || format!("reset index shares a factor with primorial({m})"));
        }
    }
    Ok(report.finish())
}

/// Expected `j`-th (0-based) reset difference for the record-gcd presets.
///
/// `first_exponent` is 0 to compare the leading difference 2 as `2^0 + 1`,
/// or 1 to start the comparison at `2^1 + 1` (the leading reset is then
/// skipped). Variants double `d - 1` from their own first difference.
pub fn theorem7_expected(spec: &GeneratorSpec, j: u32, first_exponent: u32, first_diff: i64) -> Option<i128> {
    let scale: i128 = match spec.preset {
        Some(Preset::Th7) => return 1i128.checked_shl(j + first_exponent).map(|v| v + 1),
        Some(Preset::Th7C7) => 3,
        Some(Preset::Th7C5S3) => 5,
        _ => first_diff as i128 - 1,
    };
    scale.checked_mul(1i128.checked_shl(j)?).map(|v| v + 1)
}

/// Reset differences follow `2^k + 1` (or the variant's doubling pattern).
pub fn check_theorem7(spec: &ValidSpec, budget: Budget, first_exponent: u32) -> Result<ClaimReport> {
    if spec.gate != Gate::RecordGcd {
        return Err(Error::Domain("theorem-7 check needs a record-gcd spec".into()));
    }
    if first_exponent > 1 {
        return Err(Error::Domain("first exponent must be 0 or 1".into()));
    }
    let budget = match budget {
        Budget::Resets { count, max_n } if first_exponent == 1 && spec.preset == Some(Preset::Th7) => {
            Budget::Resets { count: count + 1, max_n }
        }
        b => b,
    };
    let mut report = ReportBuilder::new("theorem7", describe(spec), budget.horizon_label(), spec.n1);
    let (resets, truncated) = collect_resets(spec, budget, &mut report);
    let skip = if spec.preset == Some(Preset::Th7) { first_exponent as usize } else { 0 };
    let first_diff = resets.first().map_or(0, |r| r.1);
    for (j, (n, diff)) in resets.iter().skip(skip).enumerate() {
        let expected = theorem7_expected(spec, j as u32, first_exponent, first_diff);
        if expected != Some(*diff as i128) {
            report.first_divergence.get_or_insert(*n);
            report.counterexample(*n, || format!("reset #{}: diff {diff}, expected {expected:?}", j + 1));
        }
    }
    report.overflowed |= truncated;
    Ok(report.finish())
}

/// One `(n, j)` pair of the gcd lemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Pair {
    pub n: Nat,
    pub j: Nat,
    /// `gcd(n + j, 2n + j - 1)`.
    pub gcd: Nat,
    /// `gcd(j + 1, n - 1)`.
    pub reduced: Nat,
}

impl Lemma1Pair {
    pub fn evaluate(n: Nat, j: Nat) -> Lemma1Pair {
        Lemma1Pair {
            n,
            j,
            gcd: gcd(n + j, 2 * n + j - 1),
            reduced: gcd(j + 1, n - 1),
        }
    }

    /// `gcd > n / 2`.
    pub fn exceeds_half(&self) -> bool {
        2 * self.gcd > self.n
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Scan {
    /// Verdict on the identity `gcd(n+j, 2n+j-1) = gcd(j+1, n-1)`.
    pub report: ClaimReport,
    /// Every pair with `gcd(n+j, 2n+j-1) > n/2`.
    pub bound_violations: Vec<Lemma1Pair>,
}

impl Lemma1Scan {
    /// Bound violations where `n - 1` does not divide `j + 1`.
    pub fn unexplained_violations(&self) -> impl Iterator<Item = &Lemma1Pair> {
        self.bound_violations.iter().filter(|p| (p.j + 1) % (p.n - 1) != 0)
    }
}

/// All `3 <= n <= n_max`, `1 <= j <= n - 1`.
pub fn scan_lemma1(n_max: Nat) -> Result<Lemma1Scan> {
    if n_max < 3 {
        return Err(Error::Domain("lemma scan needs n_max >= 3".into()));
    }
    let mut report = ReportBuilder::new("lemma1-identity", format!("3 <= n <= {n_max}"), n_max, 3);
    let mut bound_violations = Vec::new();
    for n in 3..=n_max {
        for j in 1..n {
            let pair = Lemma1Pair::evaluate(n, j);
            if pair.gcd != pair.reduced {
                report.counterexample(n, || format!("j={j}: {} != {}", pair.gcd, pair.reduced));
            }
            if pair.exceeds_half() {
                bound_violations.push(pair);
            }
        }
        report.reached = n;
    }
    Ok(Lemma1Scan {
        report: report.finish(),
        bound_violations,
    })
}

/// Runs `check` over `specs` in parallel, keeping the input order.
pub fn run_grid<F>(specs: &[ValidSpec], check: F) -> Vec<ClaimReport>
where
    F: Fn(&ValidSpec) -> ClaimReport + Sync + Send,
{
    specs.par_iter().map(check).collect()
}

/// Th1b/Th2b for `n1 <= 50`, Th3 for `nu in {2,4,6,8}` and `n1 in 2..=30`
/// under each threshold choice, Th4 for `nu in {1,3,5,7}` and `n1 in 2..=30`.
pub fn prime_claim_grid() -> Vec<ValidSpec> {
    let mut specs = Vec::new();
    specs.extend((2..=50).map(GeneratorSpec::th1b));
    specs.extend((3..=50).map(GeneratorSpec::th2b));
    for nu in [2, 4, 6, 8] {
        for threshold in [Th3Threshold::Stated, Th3Threshold::NuPlusOne, Th3Threshold::PaperExample] {
            specs.extend((2..=30).map(|n1| GeneratorSpec::th3(nu, n1, threshold)));
        }
    }
    for nu in [1, 3, 5, 7] {
        specs.extend((2..=30).map(|n1| GeneratorSpec::th4(nu, n1)));
    }
    specs.into_iter().map(|s| s.validate().expect("grid specs are valid")).collect()
}

/// Th5 for `m in 3..=7`, even `nu <= p_m - 3`, `n1 in nu+3..=nu+20`; Th6 for
/// `m in 2..=7`, even `nu <= p_m - 2`, `n1 in 2nu+4..=2nu+20`.
pub fn prime_floor_grid() -> Vec<ValidSpec> {
    let mut specs = Vec::new();
    for m in 3..=7 {
        let p_m = nth_prime(m).expect("small prime");
        for nu in (0..=p_m - 3).step_by(2) {
            specs.extend((nu + 3..=nu + 20).map(|n1| GeneratorSpec::th5(m, nu, n1)));
        }
    }
    for m in 2..=7 {
        let p_m = nth_prime(m).expect("small prime");
        for nu in (0..=p_m - 2).step_by(2) {
            specs.extend((2 * nu + 4..=2 * nu + 20).map(|n1| GeneratorSpec::th6(m, nu, n1)));
        }
    }
    specs.into_iter().map(|s| s.validate().expect("grid specs are valid")).collect()
}

/// Checks `c(n) <= slope*n + offset`, with equality exactly at resets (and
/// at `n1` when the start lies on the line). Returns the first offending
/// index.
pub fn check_slope_bound(spec: &ValidSpec, n_max: Nat) -> Result<Option<Nat>> {
    if spec.rule != StepRule::PiecewiseReset {
        return Err(Error::Domain("slope bound applies to piecewise-reset specs".into()));
    }
    if spec.c1 as i128 > spec.reset_line(spec.n1) {
        return Ok(Some(spec.n1));
    }
    for event in Generator::new(spec).take(n_max.saturating_sub(spec.n1) as usize) {
        let e = event?;
        let line = spec.reset_line(e.n);
        let on_line = e.value as i128 == line;
        if e.value as i128 > line || on_line != (e.kind == StepKind::Reset) {
            return Ok(Some(e.n));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn valid(spec: GeneratorSpec) -> ValidSpec {
        spec.validate().unwrap()
    }

    #[test]
    fn prime_claim_examples() {
        let r = check_prime_claim(&valid(GeneratorSpec::rowland()), 100_000);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.reached, 100_000);

        let r = check_prime_claim(&valid(GeneratorSpec::th3(4, 6, Th3Threshold::Stated)), 100_000);
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        assert!(r.leading_normalized().iter().all(|v| *v == 3));

        let adversarial = GeneratorSpec::free_form(StepRule::PiecewiseReset, 3, 0, Gate::Always, 4, 13);
        let r = check_prime_claim(&valid(adversarial), 1000);
        assert_eq!(r.verdict == Verdict::Fail, !r.counterexamples.is_empty());
    }

    #[test]
    fn overflow_makes_a_run_inconclusive() {
        let near_top = GeneratorSpec::free_form(
            StepRule::GcdAdditive,
            3,
            0,
            Gate::Always,
            1,
            crate::numtheory::NAT_MAX - 10,
        );
        let r = check_prime_claim(&valid(near_top), 1000);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.reached < 1000);
    }

    #[test]
    fn equivalence_examples() {
        let r = check_equivalence_gcd_piecewise(1, 7, 3, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_equivalence_gcd_piecewise(3, 6, 2, 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_equivalence_gcd_piecewise(1, 7, 2, 100).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.first_divergence, Some(5));
    }

    #[test]
    fn accel_vs_engine_examples() {
        let cases = [
            (Algorithm::A1, 5, vec![5, 3, 11, 3, 23]),
            (Algorithm::A2 { n1: 4 }, 4, vec![7, 13, 5, 29]),
            (Algorithm::A3 { n1: 5 }, 4, vec![2, 5, 3, 11]),
        ];
        for (alg, count, expected) in cases {
            let r = check_accel_vs_engine(alg, Budget::Resets { count, max_n: 1 << 20 }).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r}");
            let diffs: Vec<i64> = r.leading_resets.iter().map(|s| s.diff).collect();
            assert_eq!(diffs, expected);
        }
    }

    #[test]
    fn prime_floor_examples() {
        let r = check_prime_floor(&valid(GeneratorSpec::th5(7, 14, 17)), 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        assert_eq!(r.leading_normalized().iter().min(), Some(&19));
        assert_eq!(r.leading_normalized()[..2], [19, 23]);

        let r = check_prime_floor(&valid(GeneratorSpec::th6(2, 0, 4)), 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let r = check_prime_floor(&valid(GeneratorSpec::th5(3, 0, 4)), 10_000).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.leading_normalized().iter().all(|v| *v > 5));

        assert!(check_prime_floor(&valid(GeneratorSpec::rowland()), 10).is_err());
    }

    #[test]
    fn prime_floor_counterexample() {
        // c(6) = 18 resets at 11 (c = 33), then gcd(n, 21) first clears the
        // primorial gate at n = 49: diff 147 - 70 = 77 = 7 * 11.
        let r = check_prime_floor(&valid(GeneratorSpec::th5(3, 0, 6)), 100).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.counterexamples[0].n, 49);
        assert_eq!(r.leading_resets[1].diff, 77);
    }

    #[test]
    fn theorem7_examples() {
        let r = check_theorem7(&valid(GeneratorSpec::th7()), Budget::Resets { count: 5, max_n: 1 << 20 }, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        let got: Vec<(Nat, i64)> = r.leading_resets.iter().map(|s| (s.n, s.diff)).collect();
        assert_eq!(got, [(4, 2), (6, 3), (10, 5), (18, 9), (34, 17)]);

        let r = check_theorem7(&valid(GeneratorSpec::th7()), Budget::Resets { count: 5, max_n: 1 << 20 }, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r}");
        assert_eq!(r.stats.resets, 6);

        let r = check_theorem7(&valid(GeneratorSpec::th7_c7()), Budget::Resets { count: 4, max_n: 1 << 20 }, 0).unwrap();
        assert_eq!(r.leading_resets.iter().map(|s| s.diff).collect::<Vec<_>>(), [4, 7, 13, 25]);
        assert!(r.passed());

        let r = check_theorem7(&valid(GeneratorSpec::th7_c5_slope3()), Budget::Resets { count: 4, max_n: 1 << 20 }, 0)
            .unwrap();
        assert_eq!(r.leading_resets.iter().map(|s| s.diff).collect::<Vec<_>>(), [6, 11, 21, 41]);
        assert!(r.passed());

        let r = check_theorem7(&valid(GeneratorSpec::th7()), Budget::Resets { count: 20, max_n: 100 }, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn lemma1_examples() {
        let scan = scan_lemma1(100).unwrap();
        assert_eq!(scan.report.verdict, Verdict::Pass);
        let p = Lemma1Pair::evaluate(4, 2);
        assert_eq!((p.gcd, p.exceeds_half()), (3, true));
        assert!(scan.bound_violations.contains(&p));
        let q = Lemma1Pair::evaluate(10, 3);
        assert_eq!((q.gcd, q.exceeds_half()), (1, false));
        assert_eq!(scan.unexplained_violations().count(), 0);
        assert!(scan_lemma1(2).is_err());
    }

    #[test]
    fn slope_bound_holds_for_presets() {
        for spec in [GeneratorSpec::th1b(7), GeneratorSpec::th7(), GeneratorSpec::th7_c7(), GeneratorSpec::th5(7, 14, 17)] {
            assert_eq!(check_slope_bound(&valid(spec), 5000).unwrap(), None);
        }
        assert_eq!(check_slope_bound(&valid(GeneratorSpec::rowland_piecewise()), 100).unwrap(), Some(1));
    }

    #[test]
    fn reports_are_deterministic_and_serialize() {
        let spec = valid(GeneratorSpec::th4(3, 9));
        let a = check_prime_claim(&spec, 5000);
        assert_eq!(a, check_prime_claim(&spec, 5000));
        let json = a.to_json();
        assert!(json.starts_with("{\"claim_id\":\"prime-claim\""));
    }
}
