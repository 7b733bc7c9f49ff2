//! Counting by fibration over `P^1`.
//!
//! Every point of `V` lies on exactly one linear fiber over `y = (t0 : t1)`.
//! On each fiber the primitive points are parameterized by primitive integer
//! vectors `tau` with `tau0 >= 1`, and the height becomes a positive-definite
//! quadratic form in `tau`:
//!
//! * Cayley surface, `mu != 0`: `(mu^2 + lambda^2) tau0^2 + g tau3^2` with
//!   `g = (mu1 lambda)^2 + (mu1^2 d + a1 lambda^2)^2`, `d = gcd(a, mu)`,
//!   `mu = mu1 d`, `a = a1 d`.
//! * Cayley surface, `y = (0 : 1)`: `tau0^2 + tau3^2`.
//! * Threefold: `(mu^2 + lambda^2)(tau0^2 + tau2^2 + tau3^2) + 2 mu lambda tau2 tau3`.
//!
//! Fiber counts are lattice-point counts in these ellipsoids restricted to
//! primitive vectors. The innermost coordinate is never enumerated: its range
//! is an interval with exact integer endpoints and primitivity is handled by
//! inclusion-exclusion over the primes of the gcd of the outer coordinates.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactarith::{
    ceil_div, coprime_count, floor_div, gcd, gcd_decompose, isqrt_nonneg, moebius,
    primitive_pairs_in_row, PrimitivePair,
};
use crate::forms::{SurfaceKind, SurfaceSpec};
use crate::oracle::HeightBound;

/// Derived constants of one fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FiberData {
    /// Cayley surface, `mu != 0`.
    Cayley {
        y: PrimitivePair,
        a: i64,
        d: i64,
        mu1: i64,
        a1: i64,
        /// `mu^2 + lambda^2`
        base: i128,
        /// `mu1^2 d + a1 lambda^2`, the (negated) `t2` multiplier
        t2_factor: i128,
        /// `mu1 lambda`, the `t3` multiplier
        t3_factor: i128,
        /// `t2_factor^2 + t3_factor^2`
        g: i128,
    },
    /// Cayley surface, `y = (0 : 1)`: points `(0, tau0, tau3, 0)`.
    CayleyVertical { y: PrimitivePair },
    Threefold {
        y: PrimitivePair,
        /// `mu^2 + lambda^2`
        base: i128,
        /// `2 mu lambda`
        cross: i128,
    },
}

impl FiberData {
    pub fn y(&self) -> PrimitivePair {
        match *self {
            FiberData::Cayley { y, .. }
            | FiberData::CayleyVertical { y }
            | FiberData::Threefold { y, .. } => y,
        }
    }

    /// Number of parameters `tau`: 2 on the surface, 3 on the threefold.
    pub fn tau_len(&self) -> usize {
        match self {
            FiberData::Threefold { .. } => 3,
            _ => 2,
        }
    }

    /// Smallest height squared on the fiber, attained at `tau = (1, 0, ..)`.
    pub fn min_height_sq(&self) -> i128 {
        match *self {
            FiberData::Cayley { base, .. } | FiberData::Threefold { base, .. } => base,
            FiberData::CayleyVertical { .. } => 1,
        }
    }

    /// The height squared of the image of `tau`.
    pub fn form_value(&self, tau: &[i64]) -> i128 {
        let sq = |x: i64| (x as i128) * (x as i128);
        match *self {
            FiberData::Cayley { base, g, .. } => base * sq(tau[0]) + g * sq(tau[1]),
            FiberData::CayleyVertical { .. } => sq(tau[0]) + sq(tau[1]),
            FiberData::Threefold { base, cross, .. } => {
                base * (sq(tau[0]) + sq(tau[1]) + sq(tau[2]))
                    + cross * (tau[1] as i128) * (tau[2] as i128)
            }
        }
    }

    /// The ambient point parameterized by `tau`.
    pub fn param(&self, tau: &[i64]) -> Result<Vec<i64>> {
        if tau.len() != self.tau_len() {
            return Err(Error::domain(format!(
                "fiber parameter has {} entries, expected {}",
                tau.len(),
                self.tau_len()
            )));
        }
        let narrow = |x: i128| i64::try_from(x).map_err(|_| Error::Overflow("fiber point"));
        let (mu, la) = (self.y().mu as i128, self.y().lambda as i128);
        Ok(match *self {
            FiberData::Cayley {
                t2_factor,
                t3_factor,
                ..
            } => {
                let (t0, t3) = (tau[0] as i128, tau[1] as i128);
                vec![
                    narrow(mu * t0)?,
                    narrow(la * t0)?,
                    narrow(-t2_factor * t3)?,
                    narrow(t3_factor * t3)?,
                ]
            }
            FiberData::CayleyVertical { .. } => vec![0, tau[0], tau[1], 0],
            FiberData::Threefold { .. } => {
                let (t0, t2, t3) = (tau[0] as i128, tau[1] as i128, tau[2] as i128);
                vec![
                    narrow(mu * t0)?,
                    narrow(la * t0)?,
                    narrow(la * t2)?,
                    narrow(mu * t3)?,
                    narrow(-mu * t2 - la * t3)?,
                ]
            }
        })
    }
}

fn checked_sq(x: i128, what: &'static str) -> Result<i128> {
    x.checked_mul(x).ok_or(Error::Overflow(what))
}

pub fn fiber_data(spec: &SurfaceSpec, y: PrimitivePair) -> Result<FiberData> {
    let (mu, la) = (y.mu as i128, y.lambda as i128);
    match *spec.kind() {
        SurfaceKind::Cayley { a } => {
            if y.mu == 0 {
                return Ok(FiberData::CayleyVertical { y });
            }
            let split = gcd_decompose(a, y.mu)?;
            let (d, mu1, a1) = (split.d as i128, split.mu1 as i128, split.a1 as i128);
            let t2_factor = mu1
                .checked_mul(mu1)
                .and_then(|x| x.checked_mul(d))
                .and_then(|x| x.checked_add(a1.checked_mul(la * la)?))
                .ok_or(Error::Overflow("Cayley fiber t2 factor"))?;
            let t3_factor = mu1 * la;
            let g = checked_sq(t2_factor, "Cayley fiber g")?
                .checked_add(checked_sq(t3_factor, "Cayley fiber g")?)
                .ok_or(Error::Overflow("Cayley fiber g"))?;
            Ok(FiberData::Cayley {
                y,
                a,
                d: split.d,
                mu1: split.mu1,
                a1: split.a1,
                base: mu * mu + la * la,
                t2_factor,
                t3_factor,
                g,
            })
        }
        SurfaceKind::Threefold => Ok(FiberData::Threefold {
            y,
            base: mu * mu + la * la,
            cross: 2 * mu * la,
        }),
        SurfaceKind::CatalogOnly { ref tag, .. } => Err(Error::domain(format!(
            "no fibration for catalog entry {tag:?}"
        ))),
    }
}

/// The point of `V` on fiber `y` parameterized by `tau`
/// (`(tau0, tau3)` on the surface, `(tau0, tau2, tau3)` on the threefold).
pub fn fiber_param(spec: &SurfaceSpec, y: PrimitivePair, tau: &[i64]) -> Result<Vec<i64>> {
    fiber_data(spec, y)?.param(tau)
}

/// Exact number of points of height `<= B` on one fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiberCount {
    pub y: PrimitivePair,
    pub count: u64,
    pub min_height_sq: i128,
}

/// Counts `tau` with `tau0 >= 1`, `form(tau) <= bound_sq`, and (when
/// `primitive`) `gcd(tau) = 1`.
fn count_tau(data: &FiberData, bound_sq: i128, primitive: bool) -> i128 {
    let min = data.min_height_sq();
    if bound_sq < min {
        return 0;
    }
    let max_tau0 = isqrt_nonneg(bound_sq / min) as i64;
    let mut total = 0i128;
    match *data {
        FiberData::Cayley { .. } | FiberData::CayleyVertical { .. } => {
            let (base, g) = match *data {
                FiberData::Cayley { base, g, .. } => (base, g),
                _ => (1, 1),
            };
            for t0 in 1..=max_tau0 {
                let rest = bound_sq - base * (t0 as i128) * (t0 as i128);
                let m = isqrt_nonneg(rest / g);
                total += if primitive {
                    coprime_count(-m, m, t0 as u64)
                } else {
                    2 * m + 1
                };
            }
        }
        FiberData::Threefold { y, base, .. } => {
            let ml = (y.mu as i128) * (y.lambda as i128);
            // base^2 - (mu lambda)^2 >= 1 for every primitive pair
            let disc_scale = base * base - ml * ml;
            for t0 in 1..=max_tau0 {
                let rest = bound_sq - base * (t0 as i128) * (t0 as i128);
                let max_t3 = isqrt_nonneg(base * rest / disc_scale) as i64;
                for t3 in -max_t3..=max_t3 {
                    // base t2^2 + 2 c t2 + (base t3^2 - rest) <= 0 with c = mu lambda t3,
                    // i.e. |base t2 + c| <= sqrt(disc)
                    let c = ml * t3 as i128;
                    let disc = base * rest - disc_scale * (t3 as i128) * (t3 as i128);
                    let s = isqrt_nonneg(disc);
                    let lo = ceil_div(-s - c, base);
                    let hi = floor_div(s - c, base);
                    total += if primitive {
                        coprime_count(lo, hi, gcd(t0, t3) as u64)
                    } else {
                        (hi - lo + 1).max(0)
                    };
                }
            }
        }
    }
    total
}

pub fn fiber_count(spec: &SurfaceSpec, y: PrimitivePair, bound: HeightBound) -> Result<FiberCount> {
    let data = fiber_data(spec, y)?;
    Ok(FiberCount {
        y,
        count: count_tau(&data, bound.b_sq(), true) as u64,
        min_height_sq: data.min_height_sq(),
    })
}

/// Fiber count by Möbius inversion over all (not necessarily primitive)
/// `tau`: `sum_k moebius(k) N*(B^2 / k^2)`. The quadratic forms are
/// integral, so the real bound `B / k` is the integer bound `floor(B^2 / k^2)`.
pub fn fiber_count_mobius(spec: &SurfaceSpec, y: PrimitivePair, bound: HeightBound) -> Result<u64> {
    let data = fiber_data(spec, y)?;
    let b_sq = bound.b_sq();
    let min = data.min_height_sq();
    let mut total = 0i128;
    let mut k = 1i64;
    while (k as i128) * (k as i128) * min <= b_sq {
        let mob = moebius(k)?;
        if mob != 0 {
            let kk = (k as i128) * (k as i128);
            total += mob as i128 * count_tau(&data, b_sq / kk, false);
        }
        k += 1;
    }
    Ok(total as u64)
}

/// The points of one fiber with height `<= B`, by enumerating every `tau`
/// individually and filtering on `gcd(tau) = 1`. Slow; used for set-level
/// cross-checks.
pub fn fiber_points(spec: &SurfaceSpec, y: PrimitivePair, bound: HeightBound) -> Result<Vec<Vec<i64>>> {
    let data = fiber_data(spec, y)?;
    let b_sq = bound.b_sq();
    let mut out = Vec::new();
    if b_sq < data.min_height_sq() {
        return Ok(out);
    }
    // the form dominates tau0^2 + ... on every fiber, so |tau_i| <= B
    let b = bound.b();
    let mut tau = vec![0i64; data.tau_len()];
    let mut visit = |tau: &[i64]| -> Result<()> {
        if data.form_value(tau) <= b_sq && tau.iter().fold(0, |g, &x| gcd(g, x)) == 1 {
            out.push(data.param(tau)?);
        }
        Ok(())
    };
    for t0 in 1..=b {
        tau[0] = t0;
        for t1 in -b..=b {
            tau[1] = t1;
            if tau.len() == 3 {
                for t2 in -b..=b {
                    tau[2] = t2;
                    visit(&tau)?;
                }
            } else {
                visit(&tau)?;
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// `N(V, B)` as the sum of fiber counts over canonical `y` with
/// `mu^2 + lambda^2 <= B^2`. Fibers are counted in parallel by `mu` row and
/// summed as integers, so the result does not depend on scheduling.
pub fn total_count(spec: &SurfaceSpec, bound: HeightBound) -> Result<u64> {
    if let SurfaceKind::CatalogOnly { tag, .. } = spec.kind() {
        return Err(Error::domain(format!("no fibration for catalog entry {tag:?}")));
    }
    let b_sq = bound.b_sq();
    let rows: Vec<Result<u64>> = (0..=bound.b())
        .into_par_iter()
        .map(|mu| {
            let mut row = 0u64;
            for y in primitive_pairs_in_row(mu, b_sq) {
                row += fiber_count(spec, y, bound)?.count;
            }
            Ok(row)
        })
        .collect();
    rows.into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactarith::primitive_pairs;
    use crate::forms::surface_form;
    use crate::oracle;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn pair(mu: i64, lambda: i64) -> PrimitivePair {
        PrimitivePair::new(mu, lambda).unwrap()
    }

    fn hb(b: i64) -> HeightBound {
        HeightBound::new(b).unwrap()
    }

    fn cayley(a: i64) -> SurfaceSpec {
        SurfaceSpec::cayley(a).unwrap()
    }

    #[test]
    fn fiber_data_examples() {
        match fiber_data(&cayley(2), pair(1, 1)).unwrap() {
            FiberData::Cayley { d, mu1, a1, g, .. } => assert_eq!((d, mu1, a1, g), (1, 1, 2, 10)),
            other => panic!("{other:?}"),
        }
        match fiber_data(&cayley(6), pair(4, 1)).unwrap() {
            FiberData::Cayley { d, mu1, a1, g, .. } => assert_eq!((d, mu1, a1, g), (2, 2, 3, 125)),
            other => panic!("{other:?}"),
        }
        match fiber_data(&SurfaceSpec::threefold(), pair(2, 1)).unwrap() {
            FiberData::Threefold { base, cross, .. } => assert_eq!((base, cross), (5, 4)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            fiber_data(&cayley(2), pair(0, 1)).unwrap(),
            FiberData::CayleyVertical { .. }
        ));
        let cat = SurfaceSpec::catalog("t0^2t2+t1^2t3", &[]).unwrap();
        assert!(fiber_data(&cat, pair(1, 0)).is_err());
    }

    #[test]
    fn fiber_param_examples() {
        let three = SurfaceSpec::threefold();
        assert_eq!(fiber_param(&three, pair(1, 0), &[1, 2, 3]).unwrap(), vec![1, 0, 0, 3, -2]);
        assert_eq!(fiber_param(&cayley(2), pair(1, 1), &[1, 1]).unwrap(), vec![1, 1, -3, 1]);
        assert_eq!(fiber_param(&cayley(2), pair(0, 1), &[2, 5]).unwrap(), vec![0, 2, 5, 0]);
        assert!(fiber_param(&cayley(2), pair(1, 1), &[1, 1, 1]).is_err());
        assert!(fiber_param(&three, pair(1, 1), &[1, 1]).is_err());
    }

    #[test]
    fn fiber_count_examples() {
        assert_eq!(fiber_count(&cayley(2), pair(0, 1), hb(5)).unwrap().count, 23);
        assert_eq!(fiber_count(&SurfaceSpec::threefold(), pair(2, 1), hb(3)).unwrap().count, 1);
        assert_eq!(fiber_count(&SurfaceSpec::threefold(), pair(1, 1), hb(1)).unwrap().count, 0);
    }

    #[test]
    fn total_count_small_bounds() {
        assert_eq!(total_count(&SurfaceSpec::threefold(), hb(1)).unwrap(), 2);
        assert_eq!(total_count(&cayley(2), hb(1)).unwrap(), 2);
    }

    #[test]
    fn total_count_matches_oracle_on_a_small_grid() {
        for spec in [cayley(1), cayley(-1), cayley(2), cayley(-30)] {
            let table = oracle::counts_up_to(&spec, hb(15)).unwrap();
            for b in 1..=15 {
                assert_eq!(total_count(&spec, hb(b)).unwrap(), table[b as usize - 1], "{spec} B={b}");
            }
        }
        let spec = SurfaceSpec::threefold();
        let table = oracle::counts_up_to(&spec, hb(8)).unwrap();
        for b in 1..=8 {
            assert_eq!(total_count(&spec, hb(b)).unwrap(), table[b as usize - 1], "B={b}");
        }
    }

    #[test]
    fn three_counting_routes_agree_per_fiber() {
        for spec in [cayley(-5), cayley(6), SurfaceSpec::threefold()] {
            for b in [3, 7, 12] {
                for y in primitive_pairs((b * b) as i128) {
                    let fast = fiber_count(&spec, y, hb(b)).unwrap().count;
                    let mob = fiber_count_mobius(&spec, y, hb(b)).unwrap();
                    let slow = fiber_points(&spec, y, hb(b)).unwrap().len() as u64;
                    assert_eq!((fast, mob), (slow, slow), "{spec} y={y:?} B={b}");
                }
            }
        }
    }

    #[test]
    fn fiber_points_lie_on_the_surface() {
        for spec in [cayley(-2), cayley(10), SurfaceSpec::threefold()] {
            let f = surface_form(&spec).unwrap();
            for y in primitive_pairs(40) {
                for p in fiber_points(&spec, y, hb(9)).unwrap() {
                    assert!(f.evaluate(&p).unwrap().is_zero(), "{spec} {p:?}");
                    let proj = oracle::ProjPoint::from_coords(&p).unwrap();
                    assert_eq!(proj.coords(), p.as_slice(), "image is already canonical");
                    assert_eq!(oracle::fiber_of(&proj, &spec).unwrap(), y);
                }
            }
        }
    }

    #[test]
    fn cayley_g_identity() {
        for a in [1i64, -1, 2, -2, 3, 5, -5, 6, 10, -30] {
            let spec = cayley(a);
            let a = a as i128;
            for y in primitive_pairs(40_000).filter(|y| y.mu != 0) {
                let FiberData::Cayley { d, g, .. } = fiber_data(&spec, y).unwrap() else {
                    panic!()
                };
                let (mu, la) = (y.mu as i128, y.lambda as i128);
                let q = mu * mu + a * la * la;
                assert_eq!((d as i128).pow(2) * g, la * la * mu * mu + q * q);
                assert!(g >= 1);
            }
        }
    }

    #[test]
    fn vertical_fiber_ignores_a() {
        for b in 1..=20 {
            let c1 = fiber_count(&cayley(1), pair(0, 1), hb(b)).unwrap().count;
            let c2 = fiber_count(&cayley(-30), pair(0, 1), hb(b)).unwrap().count;
            assert_eq!(c1, c2);
        }
    }

    proptest! {
        #[test]
        fn threefold_form_dominates_euclidean_norm(
            mu in 0i64..200, lambda in -200i64..200,
            t0 in -1000i64..1000, t2 in -1000i64..1000, t3 in -1000i64..1000,
        ) {
            prop_assume!(gcd(mu, lambda) == 1 && (mu > 0 || lambda == 1));
            let data = fiber_data(&SurfaceSpec::threefold(), pair(mu, lambda)).unwrap();
            let tau = [t0, t2, t3];
            let norm: i128 = tau.iter().map(|&x| (x as i128).pow(2)).sum();
            prop_assert!(data.form_value(&tau) >= norm);
            let p = data.param(&tau).unwrap();
            let h: i128 = p.iter().map(|&x| (x as i128).pow(2)).sum();
            prop_assert_eq!(h, data.form_value(&tau));
        }
    }

    #[test]
    fn count_is_thread_count_independent() {
        let spec = SurfaceSpec::threefold();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| total_count(&spec, hb(60)).unwrap());
        let b = four.install(|| total_count(&spec, hb(60)).unwrap());
        assert_eq!(a, b);
        assert!(!a.is_zero());
    }
}
