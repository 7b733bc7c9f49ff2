//! The Segre scroll `P^1 x P^2` in `P^5` and its projection onto the threefold.
//!
//! A scroll point is a rank-one 2x3 matrix with rows `a x` and `a' x`, laid
//! out in `P^5` as
//!
//! ```text
//!   ( t0  t5  -t4      )
//!   ( t1  t2  t3 + t5  )
//! ```
//!
//! Projecting from `(0:0:0:0:0:1)` drops `t5` and lands on
//! `t0^2 t2 + t0 t1 t3 + t1^2 t4 = 0`.

use crate::error::{Error, Result};

/// Image in `{t5 = 0}` of the scroll point with rows `(a x, a' x)`:
/// `(a x0, a' x0, a' x1, a' x2 - a x1, -a x2)`.
pub fn scroll_project(row_ratio: (i64, i64), plane_point: (i64, i64, i64)) -> Result<[i64; 5]> {
    let (a, a2) = row_ratio;
    let (x0, x1, x2) = plane_point;
    if a == 0 && a2 == 0 {
        return Err(Error::domain("row ratio (0, 0) is not a point of P^1"));
    }
    if x0 == 0 && x1 == 0 && x2 == 0 {
        return Err(Error::domain("(0, 0, 0) is not a point of P^2"));
    }
    Ok([a * x0, a2 * x0, a2 * x1, a2 * x2 - a * x1, -a * x2])
}

/// The scroll point itself, i.e. the projection with `t5 = a x1` restored.
pub fn scroll_lift(row_ratio: (i64, i64), plane_point: (i64, i64, i64)) -> Result<[i64; 6]> {
    let [t0, t1, t2, t3, t4] = scroll_project(row_ratio, plane_point)?;
    Ok([t0, t1, t2, t3, t4, row_ratio.0 * plane_point.1])
}

/// Whether every 2x2 minor of the scroll matrix vanishes.
pub fn scroll_rank_check(p: &[i64; 6]) -> bool {
    let [t0, t1, t2, t3, t4, t5] = p.map(|x| x as i128);
    let top = [t0, t5, -t4];
    let bottom = [t1, t2, t3 + t5];
    (0..3).all(|i| ((i + 1)..3).all(|j| top[i] * bottom[j] - top[j] * bottom[i] == 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::threefold_normal_form;
    use num_rational::BigRational;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn projection_examples() {
        assert_eq!(scroll_project((1, 0), (1, 0, 0)).unwrap(), [1, 0, 0, 0, 0]);
        assert_eq!(scroll_project((1, 1), (1, 1, 1)).unwrap(), [1, 1, 1, 0, -1]);
        assert_eq!(scroll_project((2, 3), (1, 1, 2)).unwrap(), [2, 3, 3, 4, -4]);
        let f = threefold_normal_form();
        for p in [[1, 0, 0, 0, 0], [1, 1, 1, 0, -1], [2, 3, 3, 4, -4]] {
            assert!(f.evaluate(&p).unwrap().is_zero());
        }
    }

    #[test]
    fn projection_rejects_zero_inputs() {
        assert!(scroll_project((0, 0), (1, 2, 3)).is_err());
        assert!(scroll_project((1, 2), (0, 0, 0)).is_err());
    }

    #[test]
    fn rank_examples() {
        assert!(scroll_rank_check(&[1, 0, 0, 0, 0, 0]));
        assert!(!scroll_rank_check(&[1, 0, 0, 0, 0, 1]));
        assert!(scroll_rank_check(&scroll_lift((2, -3), (5, 1, -7)).unwrap()));
    }

    proptest! {
        #[test]
        fn scroll_images_lie_on_the_threefold(
            a in -50i64..=50, a2 in -50i64..=50,
            x0 in -50i64..=50, x1 in -50i64..=50, x2 in -50i64..=50,
        ) {
            prop_assume!((a, a2) != (0, 0) && (x0, x1, x2) != (0, 0, 0));
            let p = scroll_project((a, a2), (x0, x1, x2)).unwrap();
            prop_assert_eq!(
                threefold_normal_form().evaluate(&p).unwrap(),
                BigRational::zero()
            );
            prop_assert!(scroll_rank_check(&scroll_lift((a, a2), (x0, x1, x2)).unwrap()));
            // image on the non-normal line exactly when x0 = 0
            prop_assert_eq!(p[0] == 0 && p[1] == 0, x0 == 0);
        }
    }
}
