//! Nontrivial increments without walking the trivial `+1` steps.
//!
//! Each algorithm keeps a counter `N_i` and emits `p_i = lpf(N_i + 1)`,
//! advancing by `N_{i+1} = N_i + p_i - 1`:
//!
//! | algorithm | sequence               | `N_1`         |
//! |-----------|------------------------|---------------|
//! | A1        | gcd-additive `a(1)=7`  | 4 (`p_1 = 5`) |
//! | A2(n1)    | slope 3, `a(n1)=3*n1`  | `2(n1 - 1)`   |
//! | A3(n1)    | slope 2, `b(n1)=2*n1`  | `n1 - 2`      |
//!
//! The same streams follow from running-sum recursions
//! `p_n = lpf(K - n + sum_{i<n} p_i)` with `K = 6`, `2*n1` and `n1`
//! respectively. [`AccelStream`] implements the iteration and
//! [`accel_by_recursion`] the recursion; neither is written in terms of the
//! other so they can check each other.
//!
//! `N` roughly doubles whenever `N + 1` is prime, so streams reach the 63-bit
//! ceiling after a few hundred terms. Both forms stop cleanly at the first
//! argument of `lpf` that no longer fits and report
//! [`Termination::Overflow`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::engine::{GeneratorSpec, Preset};
use crate::error::{Error, Result};
use crate::numtheory::{least_prime_factor, Nat, NAT_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum Algorithm {
    /// Rowland's sequence from `a(1) = 7`.
    A1,
    /// Slope-3 reset sequence from `a(n1) = 3*n1`, `n1 >= 2`.
    A2 { n1: Nat },
    /// Slope-2 reset sequence from `b(n1) = 2*n1`, `n1 >= 3`.
    A3 { n1: Nat },
}

impl Algorithm {
    /// Parses `1`, `2` or `3` together with the initial index the latter two need.
    pub fn from_number(number: u8, n1: Option<Nat>) -> Result<Algorithm> {
        let n1_for = |default| n1.unwrap_or(default);
        let alg = match number {
            1 => Algorithm::A1,
            2 => Algorithm::A2 { n1: n1_for(4) },
            3 => Algorithm::A3 { n1: n1_for(5) },
            _ => return Err(Error::Domain(format!("unknown algorithm {number}"))),
        };
        alg.check()?;
        Ok(alg)
    }

    fn check(self) -> Result<()> {
        match self {
            Algorithm::A2 { n1 } if n1 < 2 => Err(Error::Domain(format!("A2 needs n1 >= 2, got {n1}"))),
            Algorithm::A3 { n1 } if n1 < 3 => Err(Error::Domain(format!("A3 needs n1 >= 3, got {n1}"))),
            _ => Ok(()),
        }
    }

    /// `N_1`.
    pub fn first_counter(self) -> Nat {
        match self {
            Algorithm::A1 => 4,
            Algorithm::A2 { n1 } => 2 * (n1 - 1),
            Algorithm::A3 { n1 } => n1 - 2,
        }
    }

    /// `K` in `p_n = lpf(K - n + sum_{i<n} p_i)`.
    pub fn recursion_constant(self) -> Nat {
        match self {
            Algorithm::A1 => 6,
            Algorithm::A2 { n1 } => 2 * n1,
            Algorithm::A3 { n1 } => n1,
        }
    }

    /// The engine spec whose nontrivial increments this algorithm reproduces.
    pub fn engine_spec(self) -> GeneratorSpec {
        match self {
            Algorithm::A1 => GeneratorSpec::rowland(),
            Algorithm::A2 { n1 } => GeneratorSpec::th1b(n1),
            Algorithm::A3 { n1 } => GeneratorSpec::th2b(n1),
        }
    }

    /// The algorithm reproducing `spec`'s nontrivial increments, if any.
    /// `th2`/`th2a` coincide with `A3(n1=3)`.
    pub fn for_spec(spec: &GeneratorSpec) -> Option<Algorithm> {
        match spec.preset? {
            Preset::Th1 | Preset::Th1a => Some(Algorithm::A1),
            Preset::Th2 | Preset::Th2a => Some(Algorithm::A3 { n1: 3 }),
            Preset::Th1b => Some(Algorithm::A2 { n1: spec.n1 }),
            Preset::Th2b => Some(Algorithm::A3 { n1: spec.n1 }),
            _ => None,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::A1 => write!(f, "A1"),
            Algorithm::A2 { n1 } => write!(f, "A2(n1={n1})"),
            Algorithm::A3 { n1 } => write!(f, "A3(n1={n1})"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    /// `1`, `2:<n1>` or `3:<n1>`.
    fn from_str(s: &str) -> Result<Self> {
        let (num, n1) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b.parse().map_err(|_| Error::Domain(format!("bad n1 in `{s}`")))?)),
            None => (s, None),
        };
        let number = num.trim_start_matches('A').parse().map_err(|_| Error::Domain(format!("bad algorithm `{s}`")))?;
        Algorithm::from_number(number, n1)
    }
}

/// Iteration state after `i` emissions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AccelState {
    pub algorithm: Algorithm,
    /// Emissions so far.
    pub i: u64,
    /// `N_i`, the counter that produced the last emission (`N_1` before any).
    pub counter: Nat,
    /// `p_i`, 0 before the first emission.
    pub p: Nat,
    /// `p_1 + ... + p_i`.
    pub sum: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    /// The requested number of terms was produced.
    Complete,
    /// The next `lpf` argument would exceed 63 bits.
    Overflow,
}

pub fn accel_init(algorithm: Algorithm) -> Result<AccelState> {
    algorithm.check()?;
    Ok(AccelState {
        algorithm,
        i: 0,
        counter: algorithm.first_counter(),
        p: 0,
        sum: 0,
    })
}

/// Emits the next prime. Fails only with [`Error::Overflow`].
pub fn accel_next(state: &AccelState) -> Result<(AccelState, Nat)> {
    let counter = if state.i == 0 {
        state.counter
    } else {
        // N_{i+1} = N_i + p_i - 1
        state
            .counter
            .checked_add(state.p - 1)
            .filter(|v| *v <= NAT_MAX)
            .ok_or(Error::Overflow("accel counter exceeds 63 bits"))?
    };
    let argument = counter
        .checked_add(1)
        .filter(|v| *v <= NAT_MAX)
        .ok_or(Error::Overflow("accel counter exceeds 63 bits"))?;
    let p = least_prime_factor(argument)?;
    let next = AccelState {
        algorithm: state.algorithm,
        i: state.i + 1,
        counter,
        p,
        sum: state.sum + p as u128,
    };
    Ok((next, p))
}

/// Iterator over an algorithm's primes; ends at the 63-bit ceiling.
#[derive(Clone, Debug)]
pub struct AccelStream {
    state: AccelState,
    overflowed: bool,
}

impl AccelStream {
    pub fn new(algorithm: Algorithm) -> Result<AccelStream> {
        Ok(AccelStream {
            state: accel_init(algorithm)?,
            overflowed: false,
        })
    }

    pub fn state(&self) -> &AccelState {
        &self.state
    }

    /// True once the stream stopped because the counter left 63 bits.
    pub fn overflowed(&self) -> bool {
        self.overflowed
    }
}

impl Iterator for AccelStream {
    type Item = Nat;

    fn next(&mut self) -> Option<Nat> {
        if self.overflowed {
            return None;
        }
        match accel_next(&self.state) {
            Ok((state, p)) => {
                self.state = state;
                Some(p)
            }
            Err(_) => {
                self.overflowed = true;
                None
            }
        }
    }
}

impl std::iter::FusedIterator for AccelStream {}

/// A finished run of either form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AccelRun {
    pub algorithm: Algorithm,
    pub primes: Vec<Nat>,
    pub termination: Termination,
}

/// Up to `count` primes by iterating `N_{i+1} = N_i + p_i - 1`.
pub fn accel_iterate(algorithm: Algorithm, count: usize) -> Result<AccelRun> {
    let mut stream = AccelStream::new(algorithm)?;
    let primes: Vec<Nat> = stream.by_ref().take(count).collect();
    Ok(AccelRun {
        algorithm,
        termination: if stream.overflowed() {
            Termination::Overflow
        } else {
            Termination::Complete
        },
        primes,
    })
}

/// Up to `count` primes from `p_n = lpf(K - n + sum_{i<n} p_i)`.
pub fn accel_by_recursion(algorithm: Algorithm, count: usize) -> Result<AccelRun> {
    algorithm.check()?;
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let k = algorithm.recursion_constant() as i128;
    let mut sum: i128 = 0;
    let mut primes = Vec::with_capacity(count.min(4096));
    for n in 1..=count as i128 {
        let argument = k - n + sum;
        if argument > NAT_MAX as i128 {
            return Ok(AccelRun {
                algorithm,
                primes,
                termination: Termination::Overflow,
            });
        }
        let p = least_prime_factor(argument as Nat)?;
        primes.push(p);
        sum += p as i128;
    }
    Ok(AccelRun {
        algorithm,
        primes,
        termination: Termination::Complete,
    })
}
