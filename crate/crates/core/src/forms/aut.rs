//! Explicit linear automorphisms of `t0^2 t2 + t0 t1 t3 + t1^2 t4`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

use super::LinearChange;

/// Parameters of one of the two printed families of automorphisms.
///
/// In case 1 the action on `(t0, t1)` is `t0 -> alpha t0 + t1`,
/// `t1 -> gamma t0 + delta t1`; in case 2 it is `t0 -> t0`,
/// `t1 -> gamma t0 + delta t1`. The remaining parameters scale and shear
/// `t2, t3, t4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutParams {
    Case1 {
        alpha: BigRational,
        gamma: BigRational,
        delta: BigRational,
        u4: BigRational,
        a31: BigRational,
        a41: BigRational,
    },
    Case2 {
        gamma: BigRational,
        delta: BigRational,
        w4: BigRational,
        a30: BigRational,
        a40: BigRational,
    },
}

impl AutParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            AutParams::Case1 {
                alpha,
                gamma,
                delta,
                u4,
                ..
            } => {
                if (alpha * delta - gamma).is_zero() {
                    return Err(Error::domain("case 1 needs alpha*delta - gamma != 0"));
                }
                if u4.is_zero() {
                    return Err(Error::domain("case 1 needs u4 != 0"));
                }
            }
            AutParams::Case2 { delta, w4, .. } => {
                if delta.is_zero() {
                    return Err(Error::domain("case 2 needs delta != 0"));
                }
                if w4.is_zero() {
                    return Err(Error::domain("case 2 needs w4 != 0"));
                }
            }
        }
        Ok(())
    }
}

/// The 5x5 substitution matrix; row `i` holds the coefficients of `A(t_i)`.
pub fn aut_matrix(params: &AutParams) -> Result<LinearChange> {
    params.validate()?;
    let zero = BigRational::zero;
    let rows = match params {
        AutParams::Case1 {
            alpha: a,
            gamma: c,
            delta: d,
            u4,
            a31,
            a41,
        } => {
            let two = BigRational::from_integer(2.into());
            let ad = a * d;
            vec![
                vec![a.clone(), BigRational::one(), zero(), zero(), zero()],
                vec![c.clone(), d.clone(), zero(), zero(), zero()],
                vec![
                    -(c * a31 + c * d * a41),
                    -(d * a31 + d * d * a41),
                    u4 * d * d,
                    -(u4 * c * d),
                    u4 * c * c,
                ],
                vec![
                    a * a31 + (&ad - c) * a41,
                    a31.clone(),
                    -(u4 * &two * d),
                    u4 * (&ad + c),
                    -(u4 * &two * a * c),
                ],
                vec![a * a41, a41.clone(), u4.clone(), -(u4 * a), u4 * a * a],
            ]
        }
        AutParams::Case2 {
            gamma: c,
            delta: d,
            w4,
            a30,
            a40,
        } => {
            let two = BigRational::from_integer(2.into());
            vec![
                vec![BigRational::one(), zero(), zero(), zero(), zero()],
                vec![c.clone(), d.clone(), zero(), zero(), zero()],
                vec![
                    -(c * a30 + c * c * a40),
                    -(d * a30 + c * d * a40),
                    w4 * d * d,
                    -(w4 * c * d),
                    w4 * c * c,
                ],
                vec![a30.clone(), -(d * a40), zero(), w4 * d, -(w4 * &two * c)],
                vec![a40.clone(), zero(), zero(), zero(), w4.clone()],
            ]
        }
    };
    LinearChange::new(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{is_proportional, threefold_normal_form};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn case1(alpha: i64, gamma: i64, delta: i64, u4: i64, a31: i64, a41: i64) -> AutParams {
        AutParams::Case1 {
            alpha: q(alpha),
            gamma: q(gamma),
            delta: q(delta),
            u4: q(u4),
            a31: q(a31),
            a41: q(a41),
        }
    }

    fn case2(gamma: i64, delta: i64, w4: i64, a30: i64, a40: i64) -> AutParams {
        AutParams::Case2 {
            gamma: q(gamma),
            delta: q(delta),
            w4: q(w4),
            a30: q(a30),
            a40: q(a40),
        }
    }

    fn scalar(p: &AutParams) -> Option<BigRational> {
        let f = threefold_normal_form();
        let g = f.substitute(&aut_matrix(p).unwrap()).unwrap();
        is_proportional(&g, &f).unwrap()
    }

    #[test]
    fn unipotent_case1_matrix_and_scalar() {
        let p = case1(1, 0, 1, 1, 0, 0);
        let m = LinearChange::from_integers(&[
            vec![1, 1, 0, 0, 0],
            vec![0, 1, 0, 0, 0],
            vec![0, 0, 1, 0, 0],
            vec![0, 0, -2, 1, 0],
            vec![0, 0, 1, -1, 1],
        ])
        .unwrap();
        assert_eq!(aut_matrix(&p).unwrap(), m);
        assert_eq!(scalar(&p), Some(q(1)));
    }

    #[test]
    fn scaled_case1_scalar() {
        assert_eq!(scalar(&case1(2, 0, 1, 1, 0, 0)), Some(q(4)));
    }

    #[test]
    fn diagonal_case2() {
        let p = case2(0, 2, 1, 0, 0);
        let m = LinearChange::from_integers(&[
            vec![1, 0, 0, 0, 0],
            vec![0, 2, 0, 0, 0],
            vec![0, 0, 4, 0, 0],
            vec![0, 0, 0, 2, 0],
            vec![0, 0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(aut_matrix(&p).unwrap(), m);
        assert_eq!(scalar(&p), Some(q(4)));
    }

    #[test]
    fn shears_are_absorbed() {
        assert!(scalar(&case1(3, -2, 5, 7, 11, -13)).is_some());
        assert!(scalar(&case2(-4, 3, 2, 9, -6)).is_some());
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(aut_matrix(&case1(2, 2, 1, 1, 0, 0)).is_err());
        assert!(aut_matrix(&case1(1, 0, 1, 0, 0, 0)).is_err());
        assert!(aut_matrix(&case2(1, 0, 1, 0, 0)).is_err());
        assert!(aut_matrix(&case2(1, 1, 0, 0, 0)).is_err());
    }
}
