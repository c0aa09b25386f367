//! The recurrence engine.
//!
//! A [`GeneratorSpec`] describes one recurrence completely. Two step rules
//! are supported:
//!
//! * [`StepRule::GcdAdditive`]: `c(n) = c(n-1) + gcd(n, c(n-1))`.
//! * [`StepRule::PiecewiseReset`]: `c(n) = slope*n + offset` when
//!   `gcd(n, c(n-1)) > 1` and the spec's [`Gate`] allows it, otherwise
//!   `c(n) = c(n-1) + 1`.
//!
//! Specs are checked by [`GeneratorSpec::validate`] against the constraints
//! of their [`Preset`]; the resulting [`ValidSpec`] drives [`EngineState::step`]
//! and the [`Generator`] iterator.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::numtheory::{checked_add, gcd, nth_prime, primorial, to_nat, Nat, NAT_MAX};

/// Largest `m` whose primorial fits in 63 bits.
pub const MAX_PRIMORIAL_INDEX: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepRule {
    GcdAdditive,
    PiecewiseReset,
}

/// Where the gap `rho(n) = n - last_reset` is measured from before the
/// first reset has happened.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapOrigin {
    /// `rho(n) = n - n1` until the first reset.
    InitialIndex,
    /// Only the distance between consecutive resets is constrained; the
    /// first reset is not gap-gated.
    PreviousReset,
}

/// Extra condition ANDed with `gcd(n, c(n-1)) > 1` before a reset fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gate {
    Always,
    GapAtLeast { threshold: Nat, origin: GapOrigin },
    CoprimePrimorial { m: usize },
    /// Fires only when the gcd strictly exceeds every gcd seen before.
    RecordGcd,
}

/// Named parameterizations with known claims attached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Gcd-additive from `a(1) = 7`.
    Th1,
    /// Piecewise slope-3 form from `a(1) = 7`.
    Th1a,
    /// Gcd-additive from `b(3) = 6`.
    Th2,
    /// Piecewise slope-2 form from `b(3) = 6`.
    Th2a,
    /// Slope 3 from `a(n1) = 3*n1`.
    Th1b,
    /// Slope 2 from `b(n1) = 2*n1`.
    Th2b,
    /// Slope 3, offset `+nu`, gap gate.
    Th3,
    /// Slope 2, offset `+nu`, gap gate `nu + 1`.
    Th4,
    /// Slope 3, offset `-nu`, primorial gate.
    Th5,
    /// Slope 2, offset `-nu`, primorial gate.
    Th6,
    /// Record-gcd gate from `c(3) = 6`.
    Th7,
    /// Record-gcd gate from `c(7) = 12`.
    Th7C7,
    /// Record-gcd gate, slope 3, from `c(5) = 12`.
    Th7C5S3,
}

impl Preset {
    pub const ALL: [Preset; 13] = [
        Preset::Th1,
        Preset::Th1a,
        Preset::Th2,
        Preset::Th2a,
        Preset::Th1b,
        Preset::Th2b,
        Preset::Th3,
        Preset::Th4,
        Preset::Th5,
        Preset::Th6,
        Preset::Th7,
        Preset::Th7C7,
        Preset::Th7C5S3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Th1 => "th1",
            Preset::Th1a => "th1a",
            Preset::Th2 => "th2",
            Preset::Th2a => "th2a",
            Preset::Th1b => "th1b",
            Preset::Th2b => "th2b",
            Preset::Th3 => "th3",
            Preset::Th4 => "th4",
            Preset::Th5 => "th5",
            Preset::Th6 => "th6",
            Preset::Th7 => "th7",
            Preset::Th7C7 => "th7-c7",
            Preset::Th7C5S3 => "th7-c5s3",
        }
    }

    /// Presets whose initial term is fixed rather than derived from `n1`.
    pub fn has_fixed_start(self) -> bool {
        matches!(
            self,
            Preset::Th1
                | Preset::Th1a
                | Preset::Th2
                | Preset::Th2a
                | Preset::Th7
                | Preset::Th7C7
                | Preset::Th7C5S3
        )
    }

    /// Builds the spec for this preset. Missing parameters fall back to the
    /// worked examples (`th3`: nu=4, n1=6; `th4`: nu=5, n1=15; `th5`: m=7,
    /// nu=14, n1=17; `th6`: m=2, nu=0, n1=4; `th1b`/`th2b`: n1=3).
    pub fn spec(self, params: &PresetParams) -> GeneratorSpec {
        let n1 = |default| params.n1.unwrap_or(default);
        let nu = |default| params.nu.unwrap_or(default);
        let m = |default| params.m.unwrap_or(default);
        let mut spec = match self {
            Preset::Th1 => GeneratorSpec::rowland(),
            Preset::Th1a => GeneratorSpec::rowland_piecewise(),
            Preset::Th2 => GeneratorSpec::th2(),
            Preset::Th2a => GeneratorSpec::th2_piecewise(),
            Preset::Th1b => GeneratorSpec::th1b(n1(3)),
            Preset::Th2b => GeneratorSpec::th2b(n1(3)),
            Preset::Th3 => GeneratorSpec::th3(nu(4), n1(6), params.gap),
            Preset::Th4 => GeneratorSpec::th4(nu(5), n1(15)),
            Preset::Th5 => GeneratorSpec::th5(m(7), nu(14), n1(17)),
            Preset::Th6 => GeneratorSpec::th6(m(2), nu(0), n1(4)),
            Preset::Th7 => GeneratorSpec::th7(),
            Preset::Th7C7 => GeneratorSpec::th7_c7(),
            Preset::Th7C5S3 => GeneratorSpec::th7_c5_slope3(),
        };
        if self.has_fixed_start() {
            let fixed = (spec.n1, spec.c1);
            spec.n1 = params.n1.unwrap_or(spec.n1);
            spec.c1 = params.c1.unwrap_or(spec.c1);
            if (spec.n1, spec.c1) != fixed {
                spec.preset = None;
            }
        } else if let Some(c1) = params.c1 {
            spec.c1 = c1;
        }
        spec
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Preset::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

/// Which gap threshold a `th3` spec uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Th3Threshold {
    /// `(nu - 2) / 2`, measured from `n1`.
    #[default]
    Stated,
    /// `nu + 1`, first reset ungated. Reproduces the reference
    /// `nu = 4, n1 = 6` listing `22, 23, 24, 31, 32, 33, 34, 35, 46`.
    PaperExample,
    /// `nu + 1`, measured from `n1`.
    NuPlusOne,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PresetParams {
    pub nu: Option<Nat>,
    pub n1: Option<Nat>,
    pub m: Option<usize>,
    pub c1: Option<Nat>,
    pub gap: Th3Threshold,
}

/// Full parameterization of one recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub preset: Option<Preset>,
    pub rule: StepRule,
    /// 2 or 3; ignored by [`StepRule::GcdAdditive`].
    pub slope: Nat,
    /// Added to `slope * n` on reset: `+nu`, `-nu` or 0.
    pub offset: i64,
    pub gate: Gate,
    pub n1: Nat,
    pub c1: Nat,
    /// Added to each raw difference before claim checking.
    pub normalize_offset: i64,
}

impl GeneratorSpec {
    fn piecewise(preset: Option<Preset>, slope: Nat, offset: i64, gate: Gate, n1: Nat, c1: Nat) -> Self {
        GeneratorSpec {
            preset,
            rule: StepRule::PiecewiseReset,
            slope,
            offset,
            gate,
            n1,
            c1,
            normalize_offset: 0,
        }
    }

    /// `a(1) = 7`, `a(n) = a(n-1) + gcd(n, a(n-1))`.
    pub fn rowland() -> Self {
        GeneratorSpec {
            preset: Some(Preset::Th1),
            rule: StepRule::GcdAdditive,
            slope: 3,
            offset: 0,
            gate: Gate::Always,
            n1: 1,
            c1: 7,
            normalize_offset: 0,
        }
    }

    pub fn rowland_piecewise() -> Self {
        Self::piecewise(Some(Preset::Th1a), 3, 0, Gate::Always, 1, 7)
    }

    pub fn th2() -> Self {
        GeneratorSpec {
            preset: Some(Preset::Th2),
            slope: 2,
            n1: 3,
            c1: 6,
            ..Self::rowland()
        }
    }

    pub fn th2_piecewise() -> Self {
        Self::piecewise(Some(Preset::Th2a), 2, 0, Gate::Always, 3, 6)
    }

    pub fn th1b(n1: Nat) -> Self {
        Self::piecewise(Some(Preset::Th1b), 3, 0, Gate::Always, n1, n1.saturating_mul(3))
    }

    pub fn th2b(n1: Nat) -> Self {
        Self::piecewise(Some(Preset::Th2b), 2, 0, Gate::Always, n1, n1.saturating_mul(2))
    }

    pub fn th3(nu: Nat, n1: Nat, threshold: Th3Threshold) -> Self {
        let gate = match threshold {
            Th3Threshold::Stated => Gate::GapAtLeast {
                threshold: nu.saturating_sub(2) / 2,
                origin: GapOrigin::InitialIndex,
            },
            Th3Threshold::PaperExample => Gate::GapAtLeast {
                threshold: nu + 1,
                origin: GapOrigin::PreviousReset,
            },
            Th3Threshold::NuPlusOne => Gate::GapAtLeast {
                threshold: nu + 1,
                origin: GapOrigin::InitialIndex,
            },
        };
        let c1 = n1.saturating_mul(3).saturating_add(nu);
        GeneratorSpec {
            normalize_offset: -(nu as i64),
            ..Self::piecewise(Some(Preset::Th3), 3, nu as i64, gate, n1, c1)
        }
    }

    pub fn th4(nu: Nat, n1: Nat) -> Self {
        let gate = Gate::GapAtLeast {
            threshold: nu + 1,
            origin: GapOrigin::InitialIndex,
        };
        let c1 = n1.saturating_mul(2).saturating_add(nu);
        GeneratorSpec {
            normalize_offset: -(nu as i64),
            ..Self::piecewise(Some(Preset::Th4), 2, nu as i64, gate, n1, c1)
        }
    }

    pub fn th5(m: usize, nu: Nat, n1: Nat) -> Self {
        let c1 = n1.saturating_mul(3).saturating_sub(nu);
        GeneratorSpec {
            normalize_offset: nu as i64,
            ..Self::piecewise(Some(Preset::Th5), 3, -(nu as i64), Gate::CoprimePrimorial { m }, n1, c1)
        }
    }

    pub fn th6(m: usize, nu: Nat, n1: Nat) -> Self {
        let c1 = n1.saturating_mul(2).saturating_sub(nu);
        GeneratorSpec {
            normalize_offset: nu as i64,
            ..Self::piecewise(Some(Preset::Th6), 2, -(nu as i64), Gate::CoprimePrimorial { m }, n1, c1)
        }
    }

    pub fn th7() -> Self {
        Self::piecewise(Some(Preset::Th7), 2, 0, Gate::RecordGcd, 3, 6)
    }

    pub fn th7_c7() -> Self {
        Self::piecewise(Some(Preset::Th7C7), 2, 0, Gate::RecordGcd, 7, 12)
    }

    pub fn th7_c5_slope3() -> Self {
        Self::piecewise(Some(Preset::Th7C5S3), 3, 0, Gate::RecordGcd, 5, 12)
    }

    /// A spec outside the preset families; validation flags it with
    /// [`SpecWarning::FreeForm`].
    pub fn free_form(rule: StepRule, slope: Nat, offset: i64, gate: Gate, n1: Nat, c1: Nat) -> Self {
        GeneratorSpec {
            preset: None,
            rule,
            slope,
            offset,
            gate,
            n1,
            c1,
            normalize_offset: 0,
        }
    }

    /// `|offset|`, the `nu` of the offset presets.
    pub fn nu(&self) -> Nat {
        self.offset.unsigned_abs()
    }

    /// `slope * n + offset` as a wide integer.
    pub fn reset_line(&self, n: Nat) -> i128 {
        self.slope as i128 * n as i128 + self.offset as i128
    }

    pub fn validate(self) -> std::result::Result<ValidSpec, ValidationError> {
        validate_spec(self)
    }
}

/// One distinct error per violated bound.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ValidationError {
    #[error("{preset} requires the {expected:?} step rule")]
    RuleMismatch { preset: Preset, expected: StepRule },
    #[error("{preset} requires slope {expected}, found {found}")]
    SlopeMismatch { preset: Preset, expected: Nat, found: Nat },
    #[error("slope must be 2 or 3, found {0}")]
    UnsupportedSlope(Nat),
    #[error("{preset} requires offset {expected}, found {found}")]
    OffsetMismatch { preset: Preset, expected: i64, found: i64 },
    #[error("{preset} requires gate {expected}")]
    GateMismatch { preset: Preset, expected: &'static str },
    #[error("{preset}: gap threshold {found} is neither (ν-2)/2 = {stated} nor ν+1 = {nu_plus_one}")]
    GapThresholdMismatch { preset: Preset, found: Nat, stated: Nat, nu_plus_one: Nat },
    #[error("n1 must be at least 1")]
    ZeroInitialIndex,
    #[error("{preset}: n1 ≥ {min} required, found {found}")]
    N1TooSmall { preset: Preset, min: Nat, found: Nat },
    #[error("n1 > ν+2 required (ν = {nu}, n1 = {n1})")]
    N1NotAboveNuPlusTwo { nu: Nat, n1: Nat },
    #[error("n1 ≥ 2ν+4 required (ν = {nu}, n1 = {n1})")]
    N1BelowTwoNuPlusFour { nu: Nat, n1: Nat },
    #[error("{preset} requires n1 = {expected}, found {found}")]
    InitialIndexMismatch { preset: Preset, expected: Nat, found: Nat },
    #[error("{preset} requires c1 = {expected}, found {found}")]
    InitialValueMismatch { preset: Preset, expected: i128, found: Nat },
    #[error("initial value {0} exceeds 63 bits")]
    InitialValueTooLarge(Nat),
    #[error("ν must be even, found {nu}")]
    NuNotEven { nu: Nat },
    #[error("ν must be positive")]
    NuNotPositive,
    #[error("ν must be nonnegative (offset must be -ν ≤ 0), found offset {offset}")]
    NuNegative { offset: i64 },
    #[error("ν ≤ {max} required (p_m bound), found {nu}")]
    NuTooLarge { nu: Nat, max: Nat },
    #[error("m ≥ {min} required, found {m}")]
    PrimorialIndexTooSmall { m: usize, min: usize },
    #[error("m ≤ {max} required so the primorial fits 63 bits, found {m}", max = MAX_PRIMORIAL_INDEX)]
    PrimorialIndexTooLarge { m: usize },
    #[error("{preset} requires normalize_offset {expected}, found {found}")]
    NormalizeOffsetMismatch { preset: Preset, expected: i64, found: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecWarning {
    /// Not a preset: the theorem claims are not guaranteed.
    FreeForm,
}

/// A spec that passed [`validate_spec`], with its gate modulus precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidSpec {
    spec: GeneratorSpec,
    warning: Option<SpecWarning>,
    primorial: Nat,
}

impl ValidSpec {
    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn warning(&self) -> Option<SpecWarning> {
        self.warning
    }

    /// `primorial(m)` for [`Gate::CoprimePrimorial`], 1 otherwise.
    pub fn gate_modulus(&self) -> Nat {
        self.primorial
    }

    /// `p_m` for primorial-gated specs.
    pub fn prime_floor(&self) -> Option<Nat> {
        match self.spec.gate {
            Gate::CoprimePrimorial { m } => nth_prime(m).ok(),
            _ => None,
        }
    }
}

impl std::ops::Deref for ValidSpec {
    type Target = GeneratorSpec;

    fn deref(&self) -> &GeneratorSpec {
        &self.spec
    }
}

pub fn validate_spec(spec: GeneratorSpec) -> std::result::Result<ValidSpec, ValidationError> {
    use ValidationError as V;

    if spec.n1 == 0 {
        return Err(V::ZeroInitialIndex);
    }
    if spec.c1 > NAT_MAX {
        return Err(V::InitialValueTooLarge(spec.c1));
    }
    if spec.rule == StepRule::PiecewiseReset && !matches!(spec.slope, 2 | 3) {
        return Err(V::UnsupportedSlope(spec.slope));
    }
    let primorial = match spec.gate {
        Gate::CoprimePrimorial { m } => {
            if m == 0 {
                return Err(V::PrimorialIndexTooSmall { m, min: 1 });
            }
            if m > MAX_PRIMORIAL_INDEX {
                return Err(V::PrimorialIndexTooLarge { m });
            }
            primorial(m).expect("m <= 15 fits")
        }
        _ => 1,
    };
    let warning = match spec.preset {
        Some(preset) => {
            check_preset(preset, &spec)?;
            None
        }
        None => Some(SpecWarning::FreeForm),
    };
    Ok(ValidSpec {
        spec,
        warning,
        primorial,
    })
}

fn check_preset(preset: Preset, spec: &GeneratorSpec) -> std::result::Result<(), ValidationError> {
    use ValidationError as V;

    let expect_rule = |rule| {
        if spec.rule == rule {
            Ok(())
        } else {
            Err(V::RuleMismatch {
                preset,
                expected: rule,
            })
        }
    };
    let expect_slope = |slope| {
        if spec.slope == slope {
            Ok(())
        } else {
            Err(V::SlopeMismatch {
                preset,
                expected: slope,
                found: spec.slope,
            })
        }
    };
    let expect_offset = |offset| {
        if spec.offset == offset {
            Ok(())
        } else {
            Err(V::OffsetMismatch {
                preset,
                expected: offset,
                found: spec.offset,
            })
        }
    };
    let expect_normalize = |normalize| {
        if spec.normalize_offset == normalize {
            Ok(())
        } else {
            Err(V::NormalizeOffsetMismatch {
                preset,
                expected: normalize,
                found: spec.normalize_offset,
            })
        }
    };
    let expect_gate = |ok: bool, expected| if ok { Ok(()) } else { Err(V::GateMismatch { preset, expected }) };
    let expect_start = |n1: Nat, c1: i128| {
        if spec.n1 != n1 {
            return Err(V::InitialIndexMismatch {
                preset,
                expected: n1,
                found: spec.n1,
            });
        }
        if spec.c1 as i128 != c1 {
            return Err(V::InitialValueMismatch {
                preset,
                expected: c1,
                found: spec.c1,
            });
        }
        Ok(())
    };
    let expect_on_line = || {
        let line = spec.reset_line(spec.n1);
        if spec.c1 as i128 == line {
            Ok(())
        } else {
            Err(V::InitialValueMismatch {
                preset,
                expected: line,
                found: spec.c1,
            })
        }
    };
    let n1_at_least = |min| {
        if spec.n1 >= min {
            Ok(())
        } else {
            Err(V::N1TooSmall {
                preset,
                min,
                found: spec.n1,
            })
        }
    };
    let prime_floor_m = |min: usize| match spec.gate {
        Gate::CoprimePrimorial { m } if m >= min => Ok(nth_prime(m).expect("m <= 15")),
        Gate::CoprimePrimorial { m } => Err(V::PrimorialIndexTooSmall { m, min }),
        _ => Err(V::GateMismatch {
            preset,
            expected: "coprime-primorial",
        }),
    };

    match preset {
        Preset::Th1 | Preset::Th2 => {
            expect_rule(StepRule::GcdAdditive)?;
            if preset == Preset::Th1 {
                expect_start(1, 7)
            } else {
                expect_start(3, 6)
            }
        }
        Preset::Th1a | Preset::Th2a => {
            expect_rule(StepRule::PiecewiseReset)?;
            expect_gate(spec.gate == Gate::Always, "always")?;
            expect_offset(0)?;
            if preset == Preset::Th1a {
                expect_slope(3)?;
                expect_start(1, 7)
            } else {
                expect_slope(2)?;
                expect_start(3, 6)
            }
        }
        Preset::Th1b | Preset::Th2b => {
            expect_rule(StepRule::PiecewiseReset)?;
            expect_gate(spec.gate == Gate::Always, "always")?;
            expect_offset(0)?;
            expect_normalize(0)?;
            if preset == Preset::Th1b {
                expect_slope(3)?;
                n1_at_least(2)?;
            } else {
                expect_slope(2)?;
                n1_at_least(3)?;
            }
            expect_on_line()
        }
        Preset::Th3 | Preset::Th4 => {
            expect_rule(StepRule::PiecewiseReset)?;
            expect_slope(if preset == Preset::Th3 { 3 } else { 2 })?;
            if spec.offset <= 0 {
                return Err(V::NuNotPositive);
            }
            let nu = spec.nu();
            if preset == Preset::Th3 && nu % 2 != 0 {
                return Err(V::NuNotEven { nu });
            }
            expect_normalize(-spec.offset)?;
            let Gate::GapAtLeast { threshold, .. } = spec.gate else {
                return Err(V::GateMismatch {
                    preset,
                    expected: "gap-at-least",
                });
            };
            let stated = nu.saturating_sub(2) / 2;
            let allowed = if preset == Preset::Th3 {
                threshold == stated || threshold == nu + 1
            } else {
                threshold == nu + 1
            };
            if !allowed {
                return Err(V::GapThresholdMismatch {
                    preset,
                    found: threshold,
                    stated: if preset == Preset::Th3 { stated } else { nu + 1 },
                    nu_plus_one: nu + 1,
                });
            }
            n1_at_least(2)?;
            expect_on_line()
        }
        Preset::Th5 | Preset::Th6 => {
            expect_rule(StepRule::PiecewiseReset)?;
            expect_slope(if preset == Preset::Th5 { 3 } else { 2 })?;
            if spec.offset > 0 {
                return Err(V::NuNegative {
                    offset: spec.offset,
                });
            }
            let nu = spec.nu();
            if nu % 2 != 0 {
                return Err(V::NuNotEven { nu });
            }
            expect_normalize(-spec.offset)?;
            let (min_m, slack) = if preset == Preset::Th5 { (3, 3) } else { (2, 2) };
            let p_m = prime_floor_m(min_m)?;
            if nu + slack > p_m {
                return Err(V::NuTooLarge {
                    nu,
                    max: p_m - slack,
                });
            }
            if preset == Preset::Th5 && spec.n1 <= nu + 2 {
                return Err(V::N1NotAboveNuPlusTwo { nu, n1: spec.n1 });
            }
            if preset == Preset::Th6 && spec.n1 < 2 * nu + 4 {
                return Err(V::N1BelowTwoNuPlusFour { nu, n1: spec.n1 });
            }
            expect_on_line()
        }
        Preset::Th7 | Preset::Th7C7 | Preset::Th7C5S3 => {
            expect_rule(StepRule::PiecewiseReset)?;
            expect_gate(spec.gate == Gate::RecordGcd, "record-gcd")?;
            expect_offset(0)?;
            expect_normalize(0)?;
            match preset {
                Preset::Th7 => {
                    expect_slope(2)?;
                    expect_start(3, 6)
                }
                Preset::Th7C7 => {
                    expect_slope(2)?;
                    expect_start(7, 12)
                }
                _ => {
                    expect_slope(3)?;
                    expect_start(5, 12)
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Trivial,
    Reset,
}

/// One step `c(n-1) -> c(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IncrementEvent {
    pub n: Nat,
    /// `c(n)`.
    pub value: Nat,
    /// `c(n) - c(n-1)`.
    pub diff: i64,
    /// `diff + normalize_offset`.
    pub normalized: i64,
    /// `gcd(n, c(n-1))`.
    pub gcd_seen: Nat,
    pub kind: StepKind,
    /// Last reset index before this step (`n1` initially).
    pub prev_reset: Nat,
}

/// Where a recurrence currently stands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineState {
    pub n: Nat,
    /// `c(n)`.
    pub c: Nat,
    /// Most recent reset index, `n1` before the first reset.
    pub last_reset: Nat,
    /// Largest `gcd(m, c(m-1))` seen so far, starting at 1.
    pub record_gcd: Nat,
    /// Resets performed so far.
    pub resets: u64,
}

impl EngineState {
    pub fn init(spec: &ValidSpec) -> EngineState {
        EngineState {
            n: spec.n1,
            c: spec.c1,
            last_reset: spec.n1,
            record_gcd: 1,
            resets: 0,
        }
    }

    /// Advances one index.
    pub fn step(&self, spec: &ValidSpec) -> Result<(EngineState, IncrementEvent)> {
        let n = checked_add(self.n, 1)?;
        let g = gcd(n, self.c);
        let fire = match spec.rule {
            StepRule::GcdAdditive => g > 1,
            StepRule::PiecewiseReset => {
                g > 1
                    && match spec.gate {
                        Gate::Always => true,
                        Gate::GapAtLeast { threshold, origin } => {
                            (origin == GapOrigin::PreviousReset && self.resets == 0)
                                || n - self.last_reset >= threshold
                        }
                        Gate::CoprimePrimorial { .. } => gcd(n, spec.gate_modulus()) == 1,
                        Gate::RecordGcd => g > self.record_gcd,
                    }
            }
        };
        let c = match (spec.rule, fire) {
            (StepRule::GcdAdditive, _) => checked_add(self.c, g)?,
            (StepRule::PiecewiseReset, true) => to_nat(spec.reset_line(n))?,
            (StepRule::PiecewiseReset, false) => checked_add(self.c, 1)?,
        };
        let diff = c as i64 - self.c as i64;
        let next = EngineState {
            n,
            c,
            last_reset: if fire { n } else { self.last_reset },
            record_gcd: self.record_gcd.max(g),
            resets: self.resets + fire as u64,
        };
        let event = IncrementEvent {
            n,
            value: c,
            diff,
            normalized: diff + spec.normalize_offset,
            gcd_seen: g,
            kind: if fire { StepKind::Reset } else { StepKind::Trivial },
            prev_reset: self.last_reset,
        };
        Ok((next, event))
    }
}

/// Endless stream of [`IncrementEvent`]s; stops after the first error.
#[derive(Clone, Debug)]
pub struct Generator {
    spec: ValidSpec,
    state: EngineState,
    failed: bool,
}

impl Generator {
    pub fn new(spec: &ValidSpec) -> Generator {
        Generator {
            spec: *spec,
            state: EngineState::init(spec),
            failed: false,
        }
    }

    pub fn state(&self) -> &EngineState {
        &self.state
    }

    pub fn spec(&self) -> &ValidSpec {
        &self.spec
    }
}

impl Iterator for Generator {
    type Item = Result<IncrementEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        match self.state.step(&self.spec) {
            Ok((state, event)) => {
                self.state = state;
                Some(Ok(event))
            }
            Err(e) => {
                self.failed = true;
                Some(Err(e))
            }
        }
    }
}

impl std::iter::FusedIterator for Generator {}

/// One term `(n, c(n))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub n: Nat,
    pub value: Nat,
}

fn check_horizon(spec: &ValidSpec, n_max: Nat) -> Result<()> {
    if n_max < spec.n1 {
        return Err(Error::Domain(format!(
            "horizon {n_max} lies before the initial index {}",
            spec.n1
        )));
    }
    Ok(())
}

/// Terms `c(n1), ..., c(n_max)`.
pub fn generate(spec: &ValidSpec, n_max: Nat) -> Result<Vec<Term>> {
    check_horizon(spec, n_max)?;
    let mut terms = vec![Term {
        n: spec.n1,
        value: spec.c1,
    }];
    for event in Generator::new(spec).take((n_max - spec.n1) as usize) {
        let event = event?;
        terms.push(Term {
            n: event.n,
            value: event.value,
        });
    }
    Ok(terms)
}

/// Events for `n1 < n <= n_max`, optionally only the resets.
pub fn increments(spec: &ValidSpec, n_max: Nat, nontrivial_only: bool) -> Result<Vec<IncrementEvent>> {
    check_horizon(spec, n_max)?;
    let mut events = Vec::new();
    for event in Generator::new(spec).take((n_max - spec.n1) as usize) {
        let event = event?;
        if !nontrivial_only || event.kind == StepKind::Reset {
            events.push(event);
        }
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn valid(spec: GeneratorSpec) -> ValidSpec {
        spec.validate().unwrap()
    }

    fn values(spec: GeneratorSpec, n_max: Nat) -> Vec<Nat> {
        generate(&valid(spec), n_max).unwrap().iter().map(|t| t.value).collect()
    }

    fn reset_diffs(spec: GeneratorSpec, n_max: Nat) -> Vec<i64> {
        increments(&valid(spec), n_max, true).unwrap().iter().map(|e| e.diff).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(GeneratorSpec::th5(7, 14, 17).validate().is_ok());
        assert_eq!(
            GeneratorSpec::th5(7, 15, 17).validate(),
            Err(ValidationError::NuNotEven { nu: 15 })
        );
        assert_eq!(
            GeneratorSpec::th6(7, 4, 11).validate(),
            Err(ValidationError::N1BelowTwoNuPlusFour { nu: 4, n1: 11 })
        );
        assert!(GeneratorSpec::th6(7, 4, 12).validate().is_ok());
    }

    #[test]
    fn validate_rejects_each_bound() {
        use ValidationError as V;
        assert!(matches!(
            GeneratorSpec::th1b(1).validate(),
            Err(V::N1TooSmall { min: 2, .. })
        ));
        assert!(matches!(
            GeneratorSpec::th2b(2).validate(),
            Err(V::N1TooSmall { min: 3, .. })
        ));
        assert_eq!(
            GeneratorSpec::th3(3, 6, Th3Threshold::Stated).validate(),
            Err(V::NuNotEven { nu: 3 })
        );
        assert_eq!(
            GeneratorSpec::th3(0, 6, Th3Threshold::Stated).validate(),
            Err(V::NuNotPositive)
        );
        assert!(GeneratorSpec::th4(3, 2).validate().is_ok());
        assert_eq!(
            GeneratorSpec::th5(7, 16, 20).validate(),
            Err(V::NuTooLarge { nu: 16, max: 14 })
        );
        assert_eq!(
            GeneratorSpec::th5(7, 14, 16).validate(),
            Err(V::N1NotAboveNuPlusTwo { nu: 14, n1: 16 })
        );
        assert_eq!(
            GeneratorSpec::th5(2, 0, 4).validate(),
            Err(V::PrimorialIndexTooSmall { m: 2, min: 3 })
        );
        assert_eq!(
            GeneratorSpec::th6(1, 0, 4).validate(),
            Err(V::PrimorialIndexTooSmall { m: 1, min: 2 })
        );
        assert_eq!(
            GeneratorSpec::th6(16, 0, 4).validate(),
            Err(V::PrimorialIndexTooLarge { m: 16 })
        );
        assert_eq!(
            GeneratorSpec::th6(3, 4, 12).validate(),
            Err(V::NuTooLarge { nu: 4, max: 3 })
        );

        let mut wrong_c1 = GeneratorSpec::th1b(4);
        wrong_c1.c1 = 13;
        assert!(matches!(wrong_c1.validate(), Err(V::InitialValueMismatch { .. })));

        let mut wrong_gap = GeneratorSpec::th4(5, 15);
        wrong_gap.gate = Gate::GapAtLeast {
            threshold: 2,
            origin: GapOrigin::InitialIndex,
        };
        assert!(matches!(wrong_gap.validate(), Err(V::GapThresholdMismatch { .. })));

        let mut wrong_slope = GeneratorSpec::th7();
        wrong_slope.slope = 3;
        assert!(matches!(wrong_slope.validate(), Err(V::SlopeMismatch { .. })));

        let mut wrong_norm = GeneratorSpec::th3(4, 6, Th3Threshold::Stated);
        wrong_norm.normalize_offset = 4;
        assert!(matches!(wrong_norm.validate(), Err(V::NormalizeOffsetMismatch { .. })));

        let free = GeneratorSpec::free_form(StepRule::PiecewiseReset, 5, 0, Gate::Always, 1, 1);
        assert_eq!(free.validate(), Err(V::UnsupportedSlope(5)));
    }

    #[test]
    fn free_form_specs_carry_a_warning() {
        let spec = GeneratorSpec::free_form(StepRule::PiecewiseReset, 3, 0, Gate::Always, 4, 13);
        assert_eq!(spec.validate().unwrap().warning(), Some(SpecWarning::FreeForm));
        assert_eq!(valid(GeneratorSpec::th1b(4)).warning(), None);
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>(), Ok(p));
            assert!(p.spec(&PresetParams::default()).validate().is_ok(), "{p}");
        }
        assert!("th8".parse::<Preset>().is_err());
    }

    #[test]
    fn overriding_a_fixed_start_drops_the_preset() {
        let params = PresetParams {
            c1: Some(8),
            ..Default::default()
        };
        let spec = Preset::Th1.spec(&params);
        assert_eq!(spec.preset, None);
        assert_eq!(spec.c1, 8);
        let same = PresetParams {
            c1: Some(7),
            ..Default::default()
        };
        assert_eq!(Preset::Th1.spec(&same).preset, Some(Preset::Th1));
    }

    #[test]
    fn step_gap_gate_reset() {
        let spec = valid(GeneratorSpec::th3(4, 6, Th3Threshold::Stated));
        let state = EngineState {
            n: 8,
            c: 24,
            last_reset: 6,
            record_gcd: 1,
            resets: 0,
        };
        let (next, event) = state.step(&spec).unwrap();
        assert_eq!((next.n, next.c, next.last_reset), (9, 31, 9));
        assert_eq!((event.diff, event.normalized, event.kind), (7, 3, StepKind::Reset));
    }

    #[test]
    fn step_gcd_additive() {
        let spec = valid(GeneratorSpec::rowland());
        let state = EngineState {
            n: 4,
            c: 10,
            last_reset: 1,
            record_gcd: 1,
            resets: 0,
        };
        let (next, event) = state.step(&spec).unwrap();
        assert_eq!((next.n, next.c, event.diff), (5, 15, 5));
    }

    #[test]
    fn step_record_gcd() {
        let spec = valid(GeneratorSpec::th7());
        let state = EngineState {
            n: 5,
            c: 9,
            last_reset: 4,
            record_gcd: 2,
            resets: 1,
        };
        let (next, event) = state.step(&spec).unwrap();
        assert_eq!((next.n, next.c, next.record_gcd), (6, 12, 3));
        assert_eq!((event.diff, event.kind), (3, StepKind::Reset));

        // gcd 2 does not beat the record 3: plain +1
        let (after, event) = next.step(&spec).unwrap();
        assert_eq!((after.c, event.gcd_seen, event.kind), (13, 1, StepKind::Trivial));
    }

    #[test]
    fn step_overflow_is_an_error() {
        let spec = valid(GeneratorSpec::rowland());
        let state = EngineState {
            n: 10,
            c: NAT_MAX,
            last_reset: 1,
            record_gcd: 1,
            resets: 0,
        };
        assert!(matches!(state.step(&spec), Err(Error::Overflow(_))));
        let mut gen = Generator::new(&spec);
        gen.state = state;
        assert!(gen.next().unwrap().is_err());
        assert!(gen.next().is_none());
    }

    #[test]
    fn generate_examples() {
        assert_eq!(
            values(GeneratorSpec::th3(4, 6, Th3Threshold::PaperExample), 14),
            [22, 23, 24, 31, 32, 33, 34, 35, 46]
        );
        assert_eq!(
            values(GeneratorSpec::th5(7, 14, 17), 26),
            [37, 38, 43, 44, 45, 46, 55, 56, 57, 58]
        );
        assert_eq!(values(GeneratorSpec::th4(5, 15), 19), [35, 36, 37, 38, 39]);
        assert_eq!(values(GeneratorSpec::th2b(9), 9), [18]);
        assert!(generate(&valid(GeneratorSpec::th2b(9)), 8).is_err());
    }

    #[test]
    fn increments_examples() {
        let rowland = reset_diffs(GeneratorSpec::rowland(), 200);
        assert_eq!(rowland[..5], [5, 3, 11, 3, 23]);

        let floor = increments(&valid(GeneratorSpec::th5(7, 14, 17)), 100, true).unwrap();
        let enlarged: Vec<i64> = floor.iter().map(|e| e.normalized).collect();
        assert_eq!(enlarged[..2], [19, 23]);

        assert_eq!(reset_diffs(GeneratorSpec::th7(), 34), [2, 3, 5, 9, 17]);
        assert_eq!(reset_diffs(GeneratorSpec::th7_c7(), 50), [4, 7, 13, 25]);
        assert_eq!(reset_diffs(GeneratorSpec::th7_c5_slope3(), 41), [6, 11, 21, 41]);
    }

    #[test]
    fn gap_origin_decides_the_first_reset() {
        // rho(9) = 3 from n1 = 6 blocks a threshold of 5 ...
        let from_n1 = values(GeneratorSpec::th3(4, 6, Th3Threshold::NuPlusOne), 14);
        assert_eq!(from_n1[3], 25);
        // ... and rho(19) = 4 from n1 = 15 blocks a threshold of 6.
        let th4 = values(GeneratorSpec::th4(5, 15), 19);
        assert_eq!(th4[4], 39);
    }

    #[test]
    fn piecewise_forms_match_gcd_additive() {
        let a = values(GeneratorSpec::rowland(), 10_000);
        let b = values(GeneratorSpec::rowland_piecewise(), 10_000);
        assert_eq!(a[..7], [7, 8, 9, 10, 15, 18, 19]);
        assert_eq!(a, b);
        assert_eq!(values(GeneratorSpec::th2(), 10_000), values(GeneratorSpec::th2_piecewise(), 10_000));
    }

    fn check_step_invariants(spec: GeneratorSpec, n_max: Nat) -> std::result::Result<(), TestCaseError> {
        let spec = valid(spec);
        let slope = spec.slope as i128;
        let mut last_reset = spec.n1;
        for event in Generator::new(&spec).take((n_max - spec.n1) as usize) {
            let e = event.unwrap();
            let line = spec.reset_line(e.n);
            prop_assert!((e.value as i128) <= line);
            prop_assert_eq!(e.value as i128 == line, e.kind == StepKind::Reset);
            prop_assert_eq!(e.prev_reset, last_reset);
            match e.kind {
                StepKind::Trivial => prop_assert_eq!(e.diff, 1),
                StepKind::Reset => {
                    prop_assert!(e.gcd_seen > 1);
                    prop_assert_eq!(e.diff as i128, (slope - 1) * (e.n - last_reset) as i128 + 1);
                    last_reset = e.n;
                }
            }
            prop_assert_eq!(e.normalized, e.diff + spec.normalize_offset);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn reset_arithmetic_and_slope_bound(
            n1 in 3u64..200,
            nu in 1u64..12,
            m in 3usize..8,
            which in 0usize..6,
        ) {
            let spec = match which {
                0 => GeneratorSpec::th1b(n1),
                1 => GeneratorSpec::th2b(n1),
                2 => GeneratorSpec::th3(2 * nu, n1, Th3Threshold::Stated),
                3 => GeneratorSpec::th4(nu, n1),
                4 => {
                    let nu = (2 * nu).min(nth_prime(m).unwrap() - 3) & !1;
                    GeneratorSpec::th5(m, nu, n1 + nu)
                }
                _ => {
                    let nu = (2 * nu).min(nth_prime(m).unwrap() - 2) & !1;
                    GeneratorSpec::th6(m, nu, n1 + 2 * nu + 1)
                }
            };
            let n_max = spec.n1 + 3000;
            check_step_invariants(spec, n_max)?;
        }

        #[test]
        fn generation_is_deterministic(n1 in 2u64..500, n_span in 0u64..500) {
            let spec = valid(GeneratorSpec::th1b(n1));
            prop_assert_eq!(generate(&spec, n1 + n_span).unwrap(), generate(&spec, n1 + n_span).unwrap());
        }
    }
}
