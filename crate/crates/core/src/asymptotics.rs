//! Leading constants of the counting functions.
//!
//! ```text
//!   Cayley surface:  N(V, B) ~ (pi B^2 / (4 zeta(2))) (4 + S_a),
//!                    S_a = sum_{(mu, lambda) primitive, mu != 0} gcd(a, mu) / sqrt(f_a(mu, lambda)),
//!                    f_a = (lambda^2 + mu^2)(lambda^2 mu^2 + (mu^2 + a lambda^2)^2)
//!
//!   Threefold:       N(V, B) ~ (pi B^3 / (3 zeta(3))) S,
//!                    S   = sum_{(mu, lambda) primitive} 1 / sqrt(f(mu, lambda)),
//!                    f   = (lambda^2 + mu^2)(lambda^2 mu^2 + mu^4 + lambda^4)
//! ```
//!
//! The series are truncated to the disk `mu^2 + lambda^2 <= R^2` and summed
//! over canonical pairs, each standing for the two primitive vectors `+-(mu, lambda)`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactarith::{gcd, is_squarefree, isqrt_nonneg, primitive_pairs_in_row};
use crate::fibration;
use crate::forms::{SurfaceKind, SurfaceSpec};
use crate::numeric::CompensatedSum;
use crate::oracle::{self, HeightBound};

/// `f(mu, lambda)` of the Cayley family with parameter `a`.
pub fn f_cayley(a: i64, mu: i64, lambda: i64) -> Result<i128> {
    if mu == 0 {
        return Err(Error::domain("f_cayley is only used for mu != 0"));
    }
    let (a, m, l) = (a as i128, mu as i128, lambda as i128);
    let overflow = || Error::Overflow("f_cayley");
    let m2 = m * m;
    let l2 = l * l;
    let q = a.checked_mul(l2).and_then(|x| x.checked_add(m2)).ok_or_else(overflow)?;
    let inner = q
        .checked_mul(q)
        .and_then(|x| x.checked_add(m2.checked_mul(l2)?))
        .ok_or_else(overflow)?;
    (m2 + l2).checked_mul(inner).ok_or_else(overflow)
}

/// `f(mu, lambda)` of the threefold.
pub fn f_threefold(mu: i64, lambda: i64) -> Result<i128> {
    let (m2, l2) = ((mu as i128).pow(2), (lambda as i128).pow(2));
    let inner = m2
        .checked_mul(l2)
        .and_then(|x| x.checked_add(m2.checked_mul(m2)?))
        .and_then(|x| x.checked_add(l2.checked_mul(l2)?))
        .ok_or(Error::Overflow("f_threefold"))?;
    (m2 + l2).checked_mul(inner).ok_or(Error::Overflow("f_threefold"))
}

/// A partial sum of one of the constant series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTruncation {
    /// Pairs with `mu^2 + lambda^2 <= radius_sq` are included.
    pub radius_sq: i128,
    pub partial_sum: f64,
    /// Upper bound for the sum of the omitted terms.
    pub tail_bound: f64,
    /// Number of primitive vectors summed (twice the canonical pairs).
    pub terms_used: u64,
}

impl SeriesTruncation {
    pub fn radius(&self) -> f64 {
        (self.radius_sq as f64).sqrt()
    }
}

/// Upper bound for `sum |v|^-3` over nonzero `v` in `Z^2` with `|v| > r`:
/// the integral `2 pi / r` with a factor 2 for the lattice-to-integral comparison.
fn inverse_cube_tail(r: f64) -> f64 {
    2.0 * 2.0 * PI / r
}

/// Minimum of `lambda^2 mu^2 + (mu^2 + a lambda^2)^2` on the unit circle.
///
/// With `t = lambda^2` it is the quadratic `1 + (2a - 1) t + (a^2 - 2a) t^2`
/// on `[0, 1]`: equal to 1 for `a > 0` and to `(4|a| - 1) / (4|a| (|a| + 2))`
/// for `a < 0`, where the directions with `mu^2 ~ |a| lambda^2` make the
/// quartic small.
pub fn cayley_quartic_min(a: i64) -> f64 {
    let a = a as f64;
    let h = |t: f64| 1.0 + (2.0 * a - 1.0) * t + (a * a - 2.0 * a) * t * t;
    let mut m = h(0.0).min(h(1.0));
    let curvature = a * a - 2.0 * a;
    if curvature > 0.0 {
        let t = -(2.0 * a - 1.0) / (2.0 * curvature);
        if (0.0..=1.0).contains(&t) {
            m = m.min(h(t));
        }
    }
    m
}

/// Tail bound of the Cayley series beyond radius `r`:
/// each term is at most `|a| / (sqrt(m_a) |v|^3)` with `m_a` from
/// [`cayley_quartic_min`], so the tail is at most `4 pi |a| / (sqrt(m_a) r)`.
pub fn cayley_tail_bound(a: i64, r: f64) -> f64 {
    (a.unsigned_abs() as f64) / cayley_quartic_min(a).sqrt() * inverse_cube_tail(r)
}

/// Tail bound of the threefold series beyond radius `r`: since
/// `mu^4 + lambda^4 >= (mu^2 + lambda^2)^2 / 2`, each term is at most
/// `sqrt(2) / |v|^3`, giving `4 pi sqrt(2) / r`.
pub fn threefold_tail_bound(r: f64) -> f64 {
    std::f64::consts::SQRT_2 * inverse_cube_tail(r)
}

/// Sums `weight(mu, lambda)` over canonical pairs in the disk, row by row in
/// parallel; rows are merged in ascending `mu` so the result is independent
/// of the thread count.
fn disk_sum<W>(radius_sq: i128, include_vertical: bool, weight: W) -> Result<(f64, u64)>
where
    W: Fn(i64, i64) -> Result<f64> + Sync,
{
    let max_mu = isqrt_nonneg(radius_sq.max(0)) as i64;
    let start = if include_vertical { 0 } else { 1 };
    let rows: Vec<Result<(CompensatedSum, u64)>> = (start..=max_mu)
        .into_par_iter()
        .map(|mu| {
            let mut s = CompensatedSum::new();
            let mut n = 0u64;
            for y in primitive_pairs_in_row(mu, radius_sq) {
                s.add(weight(y.mu, y.lambda)?);
                n += 1;
            }
            Ok((s, n))
        })
        .collect();
    let mut total = CompensatedSum::new();
    let mut count = 0u64;
    for row in rows {
        let (s, n) = row?;
        total.merge(&s);
        count += n;
    }
    Ok((2.0 * total.value(), 2 * count))
}

fn check_cayley(a: i64) -> Result<()> {
    if a == 0 || !is_squarefree(a)? {
        return Err(Error::domain(format!("a must be nonzero and squarefree, got {a}")));
    }
    Ok(())
}

fn check_radius_sq(radius_sq: i128) -> Result<()> {
    if radius_sq < 1 {
        return Err(Error::domain("series radius must be >= 1"));
    }
    Ok(())
}

/// Cayley series over the disk `mu^2 + lambda^2 <= radius_sq`, `mu != 0`.
pub fn series_cayley_sq(a: i64, radius_sq: i128) -> Result<SeriesTruncation> {
    check_cayley(a)?;
    check_radius_sq(radius_sq)?;
    let (partial_sum, terms_used) = disk_sum(radius_sq, false, |mu, lambda| {
        let w = gcd(a, mu) as f64;
        Ok(w / (f_cayley(a, mu, lambda)? as f64).sqrt())
    })?;
    Ok(SeriesTruncation {
        radius_sq,
        partial_sum,
        tail_bound: cayley_tail_bound(a, (radius_sq as f64).sqrt()),
        terms_used,
    })
}

pub fn series_cayley(a: i64, radius: i64) -> Result<SeriesTruncation> {
    series_cayley_sq(a, (radius as i128) * (radius as i128))
}

/// Threefold series over the disk `mu^2 + lambda^2 <= radius_sq`.
pub fn series_threefold_sq(radius_sq: i128) -> Result<SeriesTruncation> {
    check_radius_sq(radius_sq)?;
    let (partial_sum, terms_used) = disk_sum(radius_sq, true, |mu, lambda| {
        Ok(1.0 / (f_threefold(mu, lambda)? as f64).sqrt())
    })?;
    Ok(SeriesTruncation {
        radius_sq,
        partial_sum,
        tail_bound: threefold_tail_bound((radius_sq as f64).sqrt()),
        terms_used,
    })
}

pub fn series_threefold(radius: i64) -> Result<SeriesTruncation> {
    series_threefold_sq((radius as i128) * (radius as i128))
}

/// A leading constant with the uncertainty inherited from the series tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingConstant {
    pub value: f64,
    pub uncertainty: f64,
    pub series: SeriesTruncation,
}

/// `pi / (4 zeta(2)) = 3 / (2 pi)`.
pub fn cayley_prefactor() -> f64 {
    3.0 / (2.0 * PI)
}

/// `pi / (3 zeta(3))`.
pub fn threefold_prefactor() -> f64 {
    PI / (3.0 * zeta3())
}

pub fn leading_constant_cayley_sq(a: i64, radius_sq: i128) -> Result<LeadingConstant> {
    let series = series_cayley_sq(a, radius_sq)?;
    Ok(LeadingConstant {
        value: cayley_prefactor() * (4.0 + series.partial_sum),
        uncertainty: cayley_prefactor() * series.tail_bound,
        series,
    })
}

pub fn leading_constant_cayley(a: i64, radius: i64) -> Result<LeadingConstant> {
    leading_constant_cayley_sq(a, (radius as i128) * (radius as i128))
}

pub fn leading_constant_threefold_sq(radius_sq: i128) -> Result<LeadingConstant> {
    let series = series_threefold_sq(radius_sq)?;
    Ok(LeadingConstant {
        value: threefold_prefactor() * series.partial_sum,
        uncertainty: threefold_prefactor() * series.tail_bound,
        series,
    })
}

pub fn leading_constant_threefold(radius: i64) -> Result<LeadingConstant> {
    leading_constant_threefold_sq((radius as i128) * (radius as i128))
}

/// Leading constant and exponent `k` of `N(V, B) ~ C B^k` for a counted family.
pub fn leading_constant(spec: &SurfaceSpec, radius: i64) -> Result<(LeadingConstant, i32)> {
    match spec.kind() {
        SurfaceKind::Cayley { a } => Ok((leading_constant_cayley(*a, radius)?, 2)),
        SurfaceKind::Threefold => Ok((leading_constant_threefold(radius)?, 3)),
        SurfaceKind::CatalogOnly { tag, .. } => {
            Err(Error::domain(format!("no asymptotic formula for {tag:?}")))
        }
    }
}

const ZETA3_CUTOFF: u32 = 1000;

/// Euler-Maclaurin evaluation of `zeta(3)` with cutoff `n`:
/// `sum_{k < n} k^-3 + n^-2/2 + n^-3/2 + n^-4/4 - n^-6/12 + n^-8/12`.
pub fn zeta3_euler_maclaurin(n: u32) -> f64 {
    let x = n as f64;
    let mut s: CompensatedSum = (1..n).rev().map(|k| (k as f64).powi(-3)).collect();
    for corr in [
        0.5 * x.powi(-2),
        0.5 * x.powi(-3),
        0.25 * x.powi(-4),
        -x.powi(-6) / 12.0,
        x.powi(-8) / 12.0,
    ] {
        s.add(corr);
    }
    s.value()
}

/// `zeta(3)`, accurate to double precision.
pub fn zeta3() -> f64 {
    static VALUE: OnceLock<f64> = OnceLock::new();
    *VALUE.get_or_init(|| zeta3_euler_maclaurin(ZETA3_CUTOFF))
}

/// `(value at the working cutoff, value at twice the cutoff)`; the two agree
/// to rounding when the truncated correction terms are negligible.
pub fn zeta3_self_check() -> (f64, f64) {
    (zeta3(), zeta3_euler_maclaurin(2 * ZETA3_CUTOFF))
}

/// `zeta(2) = pi^2 / 6`.
pub fn zeta2() -> f64 {
    PI * PI / 6.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountMethod {
    Fiber,
    Brute,
}

impl CountMethod {
    pub fn label(&self) -> &'static str {
        match self {
            CountMethod::Fiber => "fiber",
            CountMethod::Brute => "brute",
        }
    }
}

/// An exact count next to its asymptotic prediction.
#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub surface: SurfaceSpec,
    pub b: i64,
    pub exact_count: u64,
    pub predicted: f64,
    /// `|exact - predicted| / predicted`
    pub rel_error: f64,
    pub method: CountMethod,
}

pub fn exact_count(spec: &SurfaceSpec, bound: HeightBound, method: CountMethod) -> Result<u64> {
    match method {
        CountMethod::Fiber => fibration::total_count(spec, bound),
        CountMethod::Brute => oracle::count(spec, bound),
    }
}

/// Reports for several bounds against one leading constant.
pub fn compare_many(
    spec: &SurfaceSpec,
    bounds: &[i64],
    radius: i64,
    method: CountMethod,
) -> Result<Vec<CountReport>> {
    let (constant, k) = leading_constant(spec, radius)?;
    bounds
        .iter()
        .map(|&b| {
            let bound = HeightBound::new(b)?;
            let exact = exact_count(spec, bound, method)?;
            let predicted = constant.value * (b as f64).powi(k);
            Ok(CountReport {
                surface: spec.clone(),
                b,
                exact_count: exact,
                predicted,
                rel_error: (exact as f64 - predicted).abs() / predicted,
                method,
            })
        })
        .collect()
}

/// Exact fiber count at `B` against `C B^k` with the constant truncated at `radius`.
pub fn compare(spec: &SurfaceSpec, b: i64, radius: i64) -> Result<CountReport> {
    Ok(compare_many(spec, &[b], radius, CountMethod::Fiber)?.remove(0))
}
