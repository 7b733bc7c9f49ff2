//! Local densities and Tamagawa numbers of the threefold's fibers.
//!
//! Each fiber over `y = (mu : lambda)` is a plane embedded by
//! `(x0 : x1 : x2) -> (mu x0 : lambda x0 : lambda x1 : -mu x1 - lambda x2 : mu x2)`,
//! so its archimedean density is
//!
//! ```text
//!   omega_inf = int_{R^2} dx dy / (A (1 + x^2 + y^2) + 2 mu lambda x y)^{3/2}
//!             = 2 pi / sqrt(A (lambda^4 + lambda^2 mu^2 + mu^4)),   A = lambda^2 + mu^2,
//! ```
//!
//! the `p`-adic densities are `#P^2(F_p) / p^2`, and with the convergence
//! factors `1 - 1/p` the finite places multiply to `1 / zeta(3)`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::asymptotics::{f_threefold, threefold_prefactor, zeta3};
use crate::error::{Error, Result};
use crate::exactarith::{gcd, is_prime, primes_up_to, primitive_pairs, PrimitivePair};
use crate::numeric::integrate_adaptive;

/// `alpha_L` of each fiber (and of `V`).
pub const ALPHA_L: u32 = 3;
/// `beta_L = rank Pic(P^2)`.
pub const BETA_L: u32 = 1;
/// `delta_L = #H^1(Gal, Pic(P^2))`.
pub const DELTA_L: u32 = 1;

/// `gamma_L = int_0^inf e^{-alpha y} dy = 1 / alpha_L`.
pub fn gamma_l() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(ALPHA_L))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalDensity {
    pub p: u64,
    /// `(p^2 + p + 1) / p^2`
    pub value: BigRational,
}

pub fn omega_p(p: u64) -> Result<LocalDensity> {
    if !is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    let p2 = BigInt::from(p) * BigInt::from(p);
    Ok(LocalDensity {
        p,
        value: BigRational::new(&p2 + BigInt::from(p) + 1, p2),
    })
}

/// `prod_{p <= limit} (1 - p^-3)`.
pub fn euler_product(limit: u64) -> Result<f64> {
    if limit < 2 {
        return Err(Error::domain("Euler product needs a prime limit >= 2"));
    }
    let limit = usize::try_from(limit).map_err(|_| Error::Overflow("prime limit"))?;
    // accumulate the logarithm to keep the product's rounding additive
    let log: f64 = primes_up_to(limit)
        .into_iter()
        .map(|p| (-(p as f64).powi(-3)).ln_1p())
        .sum();
    Ok(log.exp())
}

fn check_pair(mu: i64, lambda: i64) -> Result<()> {
    if mu == 0 && lambda == 0 {
        return Err(Error::domain("(0, 0) is not a point of P^1"));
    }
    if gcd(mu, lambda) != 1 {
        return Err(Error::domain(format!("({mu}, {lambda}) is not primitive")));
    }
    Ok(())
}

/// `(lambda^2 + mu^2)(lambda^4 + lambda^2 mu^2 + mu^4)`.
fn omega_radicand(mu: i64, lambda: i64) -> BigInt {
    let m2 = BigInt::from(mu) * mu;
    let l2 = BigInt::from(lambda) * lambda;
    (&l2 + &m2) * (&l2 * &l2 + &l2 * &m2 + &m2 * &m2)
}

pub fn omega_infinity_closed(mu: i64, lambda: i64) -> Result<f64> {
    check_pair(mu, lambda)?;
    let r: f64 = omega_radicand(mu, lambda)
        .to_string()
        .parse()
        .expect("integer parses as f64");
    Ok(2.0 * PI / r.sqrt())
}

/// `omega_inf` by integrating the density numerically.
///
/// In polar coordinates the integrand's radial part integrates in closed
/// form, `int_0^inf r dr / (A + C r^2)^{3/2} = 1 / (C sqrt(A))` with
/// `C = A + mu lambda sin(2 phi)`, leaving a smooth periodic integral over
/// `phi in [0, 2 pi]` for adaptive quadrature.
pub fn omega_infinity_quadrature(mu: i64, lambda: i64, tol: f64) -> Result<f64> {
    check_pair(mu, lambda)?;
    let a = (mu as f64).powi(2) + (lambda as f64).powi(2);
    let ml = mu as f64 * lambda as f64;
    let sqrt_a = a.sqrt();
    let q = integrate_adaptive(
        |phi: f64| 1.0 / (sqrt_a * (a + ml * (2.0 * phi).sin())),
        0.0,
        2.0 * PI,
        tol,
        10_000,
    )?;
    Ok(q.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiberTamagawa {
    pub y: PrimitivePair,
    pub omega_inf: f64,
    /// `omega_inf / zeta(3)`
    pub tau: f64,
    pub f_value: i128,
}

pub fn tamagawa_fiber(mu: i64, lambda: i64) -> Result<FiberTamagawa> {
    check_pair(mu, lambda)?;
    let omega_inf = omega_infinity_closed(mu, lambda)?;
    Ok(FiberTamagawa {
        y: PrimitivePair::from_direction(mu, lambda)?,
        omega_inf,
        tau: omega_inf / zeta3(),
        f_value: f_threefold(mu, lambda)?,
    })
}

/// A quantity `coefficient * (pi / zeta(3)) / sqrt(radicand)`, kept symbolic
/// so that two such quantities can be compared exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiOverZeta3Surd {
    pub coefficient: BigRational,
    pub radicand: BigInt,
}

impl PiOverZeta3Surd {
    /// `coefficient^2 / radicand`, the exact square of the value in units of `pi / zeta(3)`.
    pub fn square(&self) -> BigRational {
        &self.coefficient * &self.coefficient / BigRational::from_integer(self.radicand.clone())
    }

    pub fn value(&self) -> f64 {
        let c: f64 = rational_to_f64(&self.coefficient);
        let r: f64 = self.radicand.to_string().parse().expect("integer parses as f64");
        c * PI / zeta3() / r.sqrt()
    }

    /// Exact equality; both coefficients are positive here, so equal squares suffice.
    pub fn exactly_equals(&self, other: &Self) -> bool {
        self.square() == other.square()
    }
}

fn rational_to_f64(q: &BigRational) -> f64 {
    let n: f64 = q.numer().to_string().parse().expect("numerator");
    let d: f64 = q.denom().to_string().parse().expect("denominator");
    n / d
}

/// `gamma_L * tau_L(V cap V_y)` for one fiber, from the local densities.
pub fn weighted_fiber_tamagawa(mu: i64, lambda: i64) -> Result<PiOverZeta3Surd> {
    check_pair(mu, lambda)?;
    // tau_L = 2 pi / (zeta(3) sqrt(radicand))
    Ok(PiOverZeta3Surd {
        coefficient: gamma_l() * BigRational::from_integer(2.into()),
        radicand: omega_radicand(mu, lambda),
    })
}

/// The contribution of fiber `y` to the threefold's leading constant:
/// `(pi / (3 zeta(3))) * 2 / sqrt(f(mu, lambda))`, one term for each of
/// the primitive vectors `+-(mu, lambda)`.
pub fn constant_fiber_contribution(mu: i64, lambda: i64) -> Result<PiOverZeta3Surd> {
    check_pair(mu, lambda)?;
    Ok(PiOverZeta3Surd {
        coefficient: BigRational::new(BigInt::from(2), BigInt::from(3)),
        radicand: BigInt::from(f_threefold(mu, lambda)?),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeyreFailure {
    pub y: PrimitivePair,
    pub tamagawa_side: PiOverZeta3Surd,
    pub constant_side: PiOverZeta3Surd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeyreReport {
    pub radius_sq: i128,
    pub fibers_checked: u64,
    pub failures: Vec<PeyreFailure>,
    /// Largest `|lhs - rhs| / rhs` of the floating-point values, for information.
    pub max_float_discrepancy: f64,
}

impl PeyreReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks fiber by fiber that `gamma_L * tau_L(V cap V_y)` equals the
/// fiber's share of the threefold leading constant, for every canonical `y`
/// with `mu^2 + lambda^2 <= radius^2`.
pub fn peyre_consistency(radius: i64) -> Result<PeyreReport> {
    if radius < 1 {
        return Err(Error::domain("radius must be >= 1"));
    }
    let radius_sq = (radius as i128) * (radius as i128);
    let mut report = PeyreReport {
        radius_sq,
        fibers_checked: 0,
        failures: Vec::new(),
        max_float_discrepancy: 0.0,
    };
    for y in primitive_pairs(radius_sq) {
        let lhs = weighted_fiber_tamagawa(y.mu, y.lambda)?;
        let rhs = constant_fiber_contribution(y.mu, y.lambda)?;
        let float_rhs = threefold_prefactor() * 2.0 / (f_threefold(y.mu, y.lambda)? as f64).sqrt();
        let float_lhs = rational_to_f64(&gamma_l()) * tamagawa_fiber(y.mu, y.lambda)?.tau;
        report.max_float_discrepancy = report
            .max_float_discrepancy
            .max((float_lhs - float_rhs).abs() / float_rhs);
        if !lhs.exactly_equals(&rhs) {
            report.failures.push(PeyreFailure {
                y,
                tamagawa_side: lhs,
                constant_side: rhs,
            });
        }
        report.fibers_checked += 1;
    }
    Ok(report)
}

/// `omega_p (1 - 1/p)`, which should equal `1 - p^-3`.
pub fn convergence_factor_product(d: &LocalDensity) -> BigRational {
    let p = BigRational::from_integer(d.p.into());
    &d.value * (BigRational::one() - p.recip())
}

/// `1 - p^-3` as an exact rational.
pub fn one_minus_inverse_cube(p: u64) -> BigRational {
    let p = BigRational::from_integer(p.into());
    BigRational::one() - (&p * &p * &p).recip()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use num_traits::Zero;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn omega_p_examples() {
        assert_eq!(omega_p(2).unwrap().value, q(7, 4));
        assert_eq!(omega_p(3).unwrap().value, q(13, 9));
        assert_eq!(omega_p(5).unwrap().value, q(31, 25));
        assert!(omega_p(4).is_err());
        assert!(omega_p(1).is_err());
    }

    #[test]
    fn convergence_factors_telescope() {
        for p in primes_up_to(10_000) {
            let d = omega_p(p).unwrap();
            assert!(d.value > BigRational::one());
            assert_eq!(convergence_factor_product(&d), one_minus_inverse_cube(p));
        }
    }

    #[test]
    fn euler_product_examples() {
        assert!((euler_product(2).unwrap() - 0.875).abs() < 1e-15);
        assert!((euler_product(3).unwrap() - 7.0 / 8.0 * 26.0 / 27.0).abs() < 1e-15);
        assert!((euler_product(10_000).unwrap() - 1.0 / zeta3()).abs() < 1e-7);
        assert!(euler_product(1).is_err());
    }

    #[test]
    fn omega_infinity_examples() {
        assert!((omega_infinity_closed(1, 0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!((omega_infinity_closed(1, 1).unwrap() - 2.0 * PI / 6f64.sqrt()).abs() < 1e-15);
        assert!((omega_infinity_closed(2, 3).unwrap() - 2.0 * PI / 1729f64.sqrt()).abs() < 1e-15);
        assert!(omega_infinity_closed(0, 0).is_err());
        assert!(omega_infinity_closed(2, 4).is_err());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for (mu, la) in [(1, 0), (2, 3), (1, 1), (0, 1), (1, -1), (5, -7)] {
            let quad = omega_infinity_quadrature(mu, la, 1e-10).unwrap();
            let closed = omega_infinity_closed(mu, la).unwrap();
            assert!((quad - closed).abs() < 1e-10, "({mu},{la}): {quad} vs {closed}");
        }
    }

    #[test]
    fn quadrature_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = 0;
        while seen < 20 {
            let (mu, la) = (rng.gen_range(-100i64..=100), rng.gen_range(-100i64..=100));
            if (mu, la) == (0, 0) || gcd(mu, la) != 1 || mu * mu + la * la > 10_000 {
                continue;
            }
            let quad = omega_infinity_quadrature(mu, la, 1e-10).unwrap();
            assert!((quad - omega_infinity_closed(mu, la).unwrap()).abs() < 1e-9);
            seen += 1;
        }
    }

    #[test]
    fn polar_reduction_agrees_with_planar_integral() {
        // independent check of the radial reduction: crude 2-D midpoint rule
        // on a large square for (mu, lambda) = (1, 1), where the tail beyond
        // |x|, |y| <= L contributes O(1/L)
        let (a, c) = (2.0f64, 2.0f64);
        let l = 400.0;
        let n = 4000;
        let h = 2.0 * l / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = -l + (i as f64 + 0.5) * h;
            for j in 0..n {
                let y = -l + (j as f64 + 0.5) * h;
                s += (a * (1.0 + x * x + y * y) + c * x * y).powf(-1.5);
            }
        }
        s *= h * h;
        let closed = omega_infinity_closed(1, 1).unwrap();
        assert!((s - closed).abs() / closed < 5e-3, "{s} vs {closed}");
    }

    #[test]
    fn tamagawa_fiber_examples() {
        let t = tamagawa_fiber(1, 0).unwrap();
        assert!((t.tau - 2.0 * PI / zeta3()).abs() < 1e-14);
        assert!((t.tau - 5.227_028).abs() < 1e-6);
        let t = tamagawa_fiber(1, 1).unwrap();
        assert!((t.tau - 2.0 * PI / (zeta3() * 6f64.sqrt())).abs() < 1e-14);
        assert_eq!(t.f_value, 6);
        let t = tamagawa_fiber(0, 1).unwrap();
        assert!((t.tau - 2.0 * PI / zeta3()).abs() < 1e-14);
        assert_eq!(t.y, PrimitivePair::new(0, 1).unwrap());
    }

    #[test]
    fn gamma_is_one_third() {
        assert_eq!(gamma_l(), q(1, 3));
        // int_0^inf e^{-3y} dy, truncated where the integrand is below 1e-20
        let quad = integrate_adaptive(|y: f64| (-3.0 * y).exp(), 0.0, 16.0, 1e-13, 1000).unwrap();
        assert!((quad.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn peyre_small_cases() {
        let lhs = weighted_fiber_tamagawa(1, 0).unwrap();
        let rhs = constant_fiber_contribution(1, 0).unwrap();
        assert!(lhs.exactly_equals(&rhs));
        assert!((lhs.value() - 2.0 * PI / (3.0 * zeta3())).abs() < 1e-14);
        let lhs = weighted_fiber_tamagawa(1, 1).unwrap();
        assert!((lhs.value() - 2.0 * PI / (3.0 * zeta3() * 6f64.sqrt())).abs() < 1e-14);
        let report = peyre_consistency(20).unwrap();
        assert!(report.passed());
        assert!(report.max_float_discrepancy < 1e-13);
        assert_eq!(report.fibers_checked, primitive_pairs(400).count() as u64);
    }

    #[test]
    fn a_factor_of_two_would_be_caught() {
        let lhs = weighted_fiber_tamagawa(2, 3).unwrap();
        let mut rhs = constant_fiber_contribution(2, 3).unwrap();
        rhs.coefficient = &rhs.coefficient * BigRational::from_integer(2.into());
        assert!(!lhs.exactly_equals(&rhs));
        assert!(!BigRational::zero().eq(&lhs.square()));
    }
}
