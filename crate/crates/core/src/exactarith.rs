//! Exact integer helpers shared by the counters.
//!
//! Coordinates, fiber parameters and surface parameters live in `i64`;
//! anything quadratic or worse in them (heights squared, quadratic-form
//! values, the series weights) is carried in `i128` with checked
//! multiplication where the magnitude is not bounded by construction.

use num_integer::{Integer, Roots};

use crate::error::{Error, Result};

/// `floor(sqrt(n))` for `n >= 0`.
pub fn isqrt(n: i128) -> Result<i128> {
    if n < 0 {
        return Err(Error::domain(format!("isqrt of negative value {n}")));
    }
    Ok(n.sqrt())
}

/// Unchecked variant for call sites that have already established `n >= 0`.
#[inline]
pub(crate) fn isqrt_nonneg(n: i128) -> i128 {
    debug_assert!(n >= 0);
    n.sqrt()
}

#[inline]
pub fn floor_div(n: i128, d: i128) -> i128 {
    Integer::div_floor(&n, &d)
}

#[inline]
pub fn ceil_div(n: i128, d: i128) -> i128 {
    -Integer::div_floor(&-n, &d)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

/// Distinct prime factors of `n >= 1`, ascending, by trial division.
pub fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The Möbius function, by trial division.
pub fn moebius(n: i64) -> Result<i8> {
    if n <= 0 {
        return Err(Error::domain(format!("moebius requires n >= 1, got {n}")));
    }
    let mut n = n as u64;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return Ok(0);
            }
            sign = -sign;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    Ok(sign)
}

pub fn is_squarefree(a: i64) -> Result<bool> {
    if a == 0 {
        return Err(Error::domain("is_squarefree is undefined at 0"));
    }
    Ok(moebius(a.unsigned_abs() as i64)? != 0)
}

/// Split of `a` and `mu` along their common divisor: `mu = mu1 * d`, `a = a1 * d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GcdSplit {
    pub d: i64,
    pub mu1: i64,
    pub a1: i64,
}

pub fn gcd_decompose(a: i64, mu: i64) -> Result<GcdSplit> {
    if a == 0 || mu == 0 {
        return Err(Error::domain(format!(
            "gcd_decompose needs nonzero inputs, got a={a}, mu={mu}"
        )));
    }
    let d = gcd(a, mu);
    Ok(GcdSplit {
        d,
        mu1: mu / d,
        a1: a / d,
    })
}

/// A point `(mu : lambda)` of the projective line in canonical form:
/// coprime, and either `mu >= 1` or the pair is `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimitivePair {
    pub mu: i64,
    pub lambda: i64,
}

impl PrimitivePair {
    /// Validates that `(mu, lambda)` is already the canonical representative.
    pub fn new(mu: i64, lambda: i64) -> Result<Self> {
        let canonical = (mu >= 1 || (mu == 0 && lambda == 1)) && gcd(mu, lambda) == 1;
        if !canonical {
            return Err(Error::domain(format!(
                "({mu}, {lambda}) is not a canonical primitive pair"
            )));
        }
        Ok(PrimitivePair { mu, lambda })
    }

    /// The canonical representative of the line through `(x, y) != (0, 0)`.
    pub fn from_direction(x: i64, y: i64) -> Result<Self> {
        if x == 0 && y == 0 {
            return Err(Error::domain("(0, 0) does not define a point of P^1"));
        }
        let g = gcd(x, y);
        let (mut mu, mut lambda) = (x / g, y / g);
        if mu < 0 || (mu == 0 && lambda < 0) {
            mu = -mu;
            lambda = -lambda;
        }
        Ok(PrimitivePair { mu, lambda })
    }

    /// `mu^2 + lambda^2`.
    #[inline]
    pub fn norm_sq(&self) -> i128 {
        let (m, l) = (self.mu as i128, self.lambda as i128);
        m * m + l * l
    }
}

/// Canonical pairs with `mu^2 + lambda^2 <= radius_sq` in row `mu`, ascending in `lambda`.
pub fn primitive_pairs_in_row(mu: i64, radius_sq: i128) -> impl Iterator<Item = PrimitivePair> {
    let rest = radius_sq - (mu as i128) * (mu as i128);
    let (lo, hi): (i64, i64) = if mu < 0 || rest < 0 {
        (1, 0)
    } else if mu == 0 {
        // only (0, 1) is canonical in the mu = 0 row
        if rest >= 1 {
            (1, 1)
        } else {
            (1, 0)
        }
    } else {
        let m = isqrt_nonneg(rest) as i64;
        (-m, m)
    };
    (lo..=hi)
        .filter(move |&lambda| gcd(mu, lambda) == 1)
        .map(move |lambda| PrimitivePair { mu, lambda })
}

/// Every canonical pair inside the closed disk of squared radius `radius_sq`,
/// ordered by `mu` then `lambda`.
pub fn primitive_pairs(radius_sq: i128) -> impl Iterator<Item = PrimitivePair> {
    let max_mu = if radius_sq < 0 { -1 } else { isqrt_nonneg(radius_sq) as i64 };
    (0..=max_mu).flat_map(move |mu| primitive_pairs_in_row(mu, radius_sq))
}

/// Number of integers in `[lo, hi]` coprime to `g >= 1`, by inclusion-exclusion
/// over the squarefree divisors of `g`.
pub fn coprime_count(lo: i128, hi: i128, g: u64) -> i128 {
    if hi < lo {
        return 0;
    }
    if g == 1 {
        return hi - lo + 1;
    }
    let primes = distinct_primes(g);
    let mut total = 0i128;
    for mask in 0u32..(1u32 << primes.len()) {
        let mut d = 1i128;
        for (i, &p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d *= p as i128;
            }
        }
        let multiples = floor_div(hi, d) - floor_div(lo - 1, d);
        if mask.count_ones() % 2 == 0 {
            total += multiples;
        } else {
            total -= multiples;
        }
    }
    total
}

/// Primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && distinct_primes(n) == [n]
}
