//! Exact integer primitives: gcd, least prime factor, primality, `nth_prime`
//! and primorials.
//!
//! Every value lives in [`Nat`], an unsigned integer capped at 63 bits
//! ([`NAT_MAX`]). Operations that would leave that range return
//! [`Error::Overflow`] instead of wrapping.
//!
//! Least prime factors and primality below the sieve bound (default 10^7)
//! are table lookups. Above it, small primes are trial-divided first, then a
//! deterministic Miller-Rabin test (exact for every 64-bit input) decides
//! primality and Brent's variant of Pollard's rho splits composites whose
//! factors are all large.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type Nat = u64;

/// Largest value any sequence may hold: `2^63 - 1`.
pub const NAT_MAX: Nat = i64::MAX as u64;

pub const DEFAULT_SIEVE_BOUND: Nat = 10_000_000;

/// Primes below this are trial-divided before Miller-Rabin/rho kick in.
const TRIAL_LIMIT: u32 = 1 << 10;

const SEGMENT: u64 = 1 << 18;

static SIEVE: OnceLock<Sieve> = OnceLock::new();

pub fn checked_add(a: Nat, b: Nat) -> Result<Nat> {
    a.checked_add(b)
        .filter(|v| *v <= NAT_MAX)
        .ok_or(Error::Overflow("addition exceeds 63 bits"))
}

pub fn checked_mul(a: Nat, b: Nat) -> Result<Nat> {
    a.checked_mul(b)
        .filter(|v| *v <= NAT_MAX)
        .ok_or(Error::Overflow("multiplication exceeds 63 bits"))
}

/// Narrows a wide intermediate back into [`Nat`].
pub fn to_nat(v: i128) -> Result<Nat> {
    if (0..=NAT_MAX as i128).contains(&v) {
        Ok(v as Nat)
    } else {
        Err(Error::Overflow("value outside 0..2^63"))
    }
}

/// Binary gcd. `gcd(0, 0) == 0`.
pub fn gcd(a: Nat, b: Nat) -> Nat {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    let mut a = a >> a.trailing_zeros();
    let mut b = b;
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Smallest-prime-factor table over the odd numbers up to `bound`.
///
/// A composite `n <= bound < 2^32` has a least prime factor below `2^16`,
/// so each odd slot is a `u16`; zero marks a prime.
pub struct Sieve {
    bound: Nat,
    spf_odd: Vec<u16>,
    primes: Vec<u32>,
}

impl Sieve {
    pub fn new(bound: Nat) -> Sieve {
        assert!(
            (2..u32::MAX as u64).contains(&bound),
            "sieve bound must lie in 2..2^32"
        );
        let len = (bound / 2 + 1) as usize;
        let mut spf_odd = vec![0u16; len];
        let mut p = 3u64;
        while p * p <= bound {
            if spf_odd[(p / 2) as usize] == 0 {
                let mut m = p * p;
                while m <= bound {
                    let slot = &mut spf_odd[(m / 2) as usize];
                    if *slot == 0 {
                        *slot = p as u16;
                    }
                    m += 2 * p;
                }
            }
            p += 2;
        }
        let mut primes = vec![2u32];
        primes.extend(
            spf_odd
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(i, s)| **s == 0 && (2 * *i as u64 + 1) <= bound)
                .map(|(i, _)| (2 * i + 1) as u32),
        );
        Sieve {
            bound,
            spf_odd,
            primes,
        }
    }

    pub fn bound(&self) -> Nat {
        self.bound
    }

    /// All primes `<= bound`, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// The least prime divisor of `n` (written `n^*` in the literature).
    pub fn least_prime_factor(&self, n: Nat) -> Result<Nat> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "least prime factor is undefined for {n}"
            )));
        }
        if n > NAT_MAX {
            return Err(Error::Overflow("argument exceeds 63 bits"));
        }
        if n % 2 == 0 {
            return Ok(2);
        }
        if n <= self.bound {
            let s = self.spf_odd[(n / 2) as usize];
            return Ok(if s == 0 { n } else { s as Nat });
        }
        if let Some(p) = self.trial_divide(n) {
            return Ok(p);
        }
        if miller_rabin(n) {
            return Ok(n);
        }
        Ok(smallest_factor_rho(n))
    }

    pub fn is_prime(&self, n: Nat) -> bool {
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        if n <= self.bound {
            return self.spf_odd[(n / 2) as usize] == 0;
        }
        match self.trial_divide(n) {
            Some(p) => p == n,
            None => miller_rabin(n),
        }
    }

    /// `m`-th prime with `p_1 = 2`; extends past the table with a segmented
    /// sieve whose reach is `bound^2`.
    pub fn nth_prime(&self, m: usize) -> Result<Nat> {
        if m == 0 {
            return Err(Error::Domain("primes are indexed from 1".into()));
        }
        if let Some(p) = self.primes.get(m - 1) {
            return Ok(*p as Nat);
        }
        let reach = (self.bound as u128 * self.bound as u128).min(NAT_MAX as u128) as u64;
        let mut remaining = m - self.primes.len();
        let mut lo = self.bound + 1;
        let mut marks = vec![false; SEGMENT as usize];
        while lo <= reach {
            let hi = (lo + SEGMENT - 1).min(reach);
            marks.iter_mut().for_each(|m| *m = false);
            for &p in self.primes.iter() {
                let p = p as u64;
                if p * p > hi {
                    break;
                }
                let mut start = lo.div_ceil(p) * p;
                if start < p * p {
                    start = p * p;
                }
                let mut k = start;
                while k <= hi {
                    marks[(k - lo) as usize] = true;
                    k += p;
                }
            }
            for (off, marked) in marks[..(hi - lo + 1) as usize].iter().enumerate() {
                if !marked {
                    remaining -= 1;
                    if remaining == 0 {
                        return Ok(lo + off as u64);
                    }
                }
            }
            lo = hi + 1;
        }
        Err(Error::Overflow("nth_prime beyond the segmented sieve's reach"))
    }

    fn trial_divide(&self, n: Nat) -> Option<Nat> {
        for &p in self.primes.iter().skip(1).take_while(|p| **p < TRIAL_LIMIT) {
            let p = p as u64;
            if p * p > n {
                return Some(n);
            }
            if n % p == 0 {
                return Some(p);
            }
        }
        None
    }
}

/// Installs a sieve with a custom bound. Returns `false` if the shared sieve
/// was already built (by this call or by first use).
pub fn init_sieve(bound: Nat) -> bool {
    SIEVE.set(Sieve::new(bound)).is_ok()
}

/// The process-wide sieve, built on first use with [`DEFAULT_SIEVE_BOUND`].
pub fn sieve() -> &'static Sieve {
    SIEVE.get_or_init(|| Sieve::new(DEFAULT_SIEVE_BOUND))
}

pub fn least_prime_factor(n: Nat) -> Result<Nat> {
    sieve().least_prime_factor(n)
}

pub fn is_prime(n: Nat) -> bool {
    sieve().is_prime(n)
}

pub fn nth_prime(m: usize) -> Result<Nat> {
    sieve().nth_prime(m)
}

/// Product of the first `m` primes. Fits 63 bits up to `m = 15`.
pub fn primorial(m: usize) -> Result<Nat> {
    if m == 0 {
        return Err(Error::Domain("primorial is defined for m >= 1".into()));
    }
    let mut acc: Nat = 1;
    for i in 1..=m {
        acc = checked_mul(acc, nth_prime(i)?)
            .map_err(|_| Error::Overflow("primorial exceeds 63 bits"))?;
    }
    Ok(acc)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic for all 64-bit odd `n > 3` (Sinclair's seven bases).
fn miller_rabin(n: u64) -> bool {
    const BASES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in BASES.iter() {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime factor of an odd composite with no factor below
/// `TRIAL_LIMIT`, by fully splitting it.
fn smallest_factor_rho(n: u64) -> u64 {
    let mut stack = vec![n];
    let mut best = u64::MAX;
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if miller_rabin(m) {
            best = best.min(m);
            continue;
        }
        let d = brent_split(m);
        stack.push(d);
        stack.push(m / d);
    }
    best
}

/// Returns a nontrivial divisor of the odd composite `n`.
fn brent_split(n: u64) -> u64 {
    const BATCH: u64 = 128;
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (0u64, 2u64, 0u64);
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}
