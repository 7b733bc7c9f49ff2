//! Sparse homogeneous cubic forms with exact rational coefficients.
//!
//! A form in `n` variables `t0 .. t(n-1)` is a map from exponent vectors of
//! total degree three to nonzero coefficients. Linear changes of coordinates
//! act by substitution: row `i` of a [`LinearChange`] is the image of `t_i`.

mod aut;
mod catalog;
mod scroll;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use aut::{aut_matrix, AutParams};
pub use catalog::{
    normal_form_catalog, surface_form, threefold_normal_form, CatalogEntry, SurfaceKind,
    SurfaceSpec,
};
pub use scroll::{scroll_lift, scroll_project, scroll_rank_check};

/// Largest supported number of variables (`P^5`).
pub const MAX_VARS: usize = 6;

type Monomials = BTreeMap<Vec<u8>, BigRational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    num_vars: usize,
    terms: Monomials,
}

fn check_num_vars(n: usize) -> Result<()> {
    if n == 0 || n > MAX_VARS {
        return Err(Error::domain(format!(
            "forms support 1..={MAX_VARS} variables, got {n}"
        )));
    }
    Ok(())
}

fn accumulate(terms: &mut Monomials, exps: Vec<u8>, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(exps) {
        Entry::Vacant(slot) => {
            slot.insert(c);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

impl CubicForm {
    pub fn zero(num_vars: usize) -> Result<Self> {
        check_num_vars(num_vars)?;
        Ok(CubicForm {
            num_vars,
            terms: Monomials::new(),
        })
    }

    /// Builds a form from `(coefficient, [i, j, k])` products `c * t_i * t_j * t_k`.
    /// Repeated products are summed.
    pub fn from_products(num_vars: usize, products: &[(i64, [usize; 3])]) -> Result<Self> {
        let mut f = CubicForm::zero(num_vars)?;
        for &(c, vars) in products {
            if let Some(&v) = vars.iter().find(|&&v| v >= num_vars) {
                return Err(Error::domain(format!(
                    "variable t{v} out of range for {num_vars} variables"
                )));
            }
            let mut exps = vec![0u8; num_vars];
            for v in vars {
                exps[v] += 1;
            }
            accumulate(&mut f.terms, exps, BigRational::from_integer(c.into()));
        }
        Ok(f)
    }

    /// Builds a form from explicit exponent vectors. Every vector must have
    /// length `num_vars` and total degree 3.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, BigRational)>,
    {
        let mut f = CubicForm::zero(num_vars)?;
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(Error::domain(format!(
                    "exponent vector of length {} in a form of {num_vars} variables",
                    exps.len()
                )));
            }
            let deg: u32 = exps.iter().map(|&e| e as u32).sum();
            if deg != 3 {
                return Err(Error::domain(format!("monomial of degree {deg}, expected 3")));
            }
            accumulate(&mut f.terms, exps, c);
        }
        Ok(f)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &BigRational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn coefficient(&self, exps: &[u8]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, s: &BigRational) -> CubicForm {
        if s.is_zero() {
            return CubicForm {
                num_vars: self.num_vars,
                terms: Monomials::new(),
            };
        }
        CubicForm {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    pub fn add(&self, other: &CubicForm) -> Result<CubicForm> {
        same_vars(self, other)?;
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            accumulate(&mut terms, k.clone(), v.clone());
        }
        Ok(CubicForm {
            num_vars: self.num_vars,
            terms,
        })
    }

    /// Exact value at an integer point.
    pub fn evaluate(&self, point: &[i64]) -> Result<BigRational> {
        if point.len() != self.num_vars {
            return Err(Error::domain(format!(
                "point has {} coordinates, form has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = BigRational::zero();
        for (exps, c) in &self.terms {
            let mut m = BigInt::one();
            for (&e, &x) in exps.iter().zip(point) {
                for _ in 0..e {
                    m *= x;
                }
            }
            acc += c * BigRational::from_integer(m);
        }
        Ok(acc)
    }

    /// The composite `f(L t)`.
    pub fn substitute(&self, change: &LinearChange) -> Result<CubicForm> {
        if change.dim() != self.num_vars {
            return Err(Error::domain(format!(
                "{}x{} change applied to a form in {} variables",
                change.dim(),
                change.dim(),
                self.num_vars
            )));
        }
        let n = self.num_vars;
        let mut out = Monomials::new();
        for (exps, c) in &self.terms {
            // expand c * prod_i (row_i . t)^{e_i}
            let mut partial = Monomials::new();
            partial.insert(vec![0u8; n], c.clone());
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    partial = mul_linear(&partial, &change.rows[i]);
                }
            }
            for (k, v) in partial {
                accumulate(&mut out, k, v);
            }
        }
        Ok(CubicForm {
            num_vars: n,
            terms: out,
        })
    }

    /// Integer view for fast evaluation in hot loops. Fails if any
    /// coefficient is not an integer fitting in `i128`.
    pub fn to_integer_terms(&self) -> Result<IntegerCubic> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (exps, c) in &self.terms {
            if !c.is_integer() {
                return Err(Error::domain(format!("non-integer coefficient {c}")));
            }
            let c = c
                .to_integer()
                .to_i128()
                .ok_or(Error::Overflow("integer coefficient"))?;
            let mut vars = [0usize; 3];
            let mut k = 0;
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    vars[k] = i;
                    k += 1;
                }
            }
            terms.push((c, vars));
        }
        Ok(IntegerCubic {
            num_vars: self.num_vars,
            terms,
        })
    }
}

fn same_vars(f: &CubicForm, g: &CubicForm) -> Result<()> {
    if f.num_vars != g.num_vars {
        return Err(Error::domain(format!(
            "forms in {} and {} variables",
            f.num_vars, g.num_vars
        )));
    }
    Ok(())
}

fn mul_linear(poly: &Monomials, row: &[BigRational]) -> Monomials {
    let mut out = Monomials::new();
    for (exps, c) in poly {
        for (j, l) in row.iter().enumerate() {
            if l.is_zero() {
                continue;
            }
            let mut e = exps.clone();
            e[j] += 1;
            accumulate(&mut out, e, c * l);
        }
    }
    out
}

/// Returns `s` with `f = s * g`, or `None` if the forms are not proportional.
///
/// Two zero forms are proportional with scalar 1. A zero form and a nonzero
/// form are never proportional.
pub fn is_proportional(f: &CubicForm, g: &CubicForm) -> Result<Option<BigRational>> {
    same_vars(f, g)?;
    match (f.is_zero(), g.is_zero()) {
        (true, true) => return Ok(Some(BigRational::one())),
        (true, false) | (false, true) => return Ok(None),
        _ => {}
    }
    if f.terms.len() != g.terms.len() {
        return Ok(None);
    }
    let mut scalar: Option<BigRational> = None;
    for (k, gv) in &g.terms {
        let Some(fv) = f.terms.get(k) else {
            return Ok(None);
        };
        let ratio = fv / gv;
        match &scalar {
            None => scalar = Some(ratio),
            Some(s) if *s == ratio => {}
            Some(_) => return Ok(None),
        }
    }
    Ok(scalar)
}

impl fmt::Display for CubicForm {
    /// Monomials in descending lexicographic order of exponents
    /// (so `t0` powers lead), e.g. `t0^2*t3 + t0*t1*t2 - 2*t1^2*t3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (exps, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            match (idx, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !abs.is_one() {
                write!(f, "{abs}*")?;
            }
            let mut first = true;
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first {
                    write!(f, "*")?;
                }
                first = false;
                if e == 1 {
                    write!(f, "t{i}")?;
                } else {
                    write!(f, "t{i}^{e}")?;
                }
            }
        }
        Ok(())
    }
}

/// Integer-coefficient cubic evaluated with plain `i128` arithmetic.
#[derive(Clone, Debug)]
pub struct IntegerCubic {
    num_vars: usize,
    terms: Vec<(i128, [usize; 3])>,
}

impl IntegerCubic {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Coordinates must be small enough that `|c| * |t|^3` fits in `i128`,
    /// which holds for every height bound this crate enumerates.
    #[inline]
    pub fn eval(&self, t: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|&(c, [i, j, k])| c * (t[i] as i128) * (t[j] as i128) * (t[k] as i128))
            .sum()
    }
}

/// A nonsingular square matrix acting by `t_i -> sum_j m[i][j] t_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearChange {
    rows: Vec<Vec<BigRational>>,
}

impl LinearChange {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        check_num_vars(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("linear change must be a square matrix"));
        }
        let m = LinearChange { rows };
        if m.determinant().is_zero() {
            return Err(Error::domain("linear change is singular"));
        }
        Ok(m)
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        LinearChange::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Result<Self> {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        LinearChange::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.rows
    }

    /// Matrix product `self * other`, so that
    /// `f.substitute(a).substitute(b) == f.substitute(a.compose(b))`.
    pub fn compose(&self, other: &LinearChange) -> Result<LinearChange> {
        if self.dim() != other.dim() {
            return Err(Error::domain("composing linear changes of different sizes"));
        }
        let n = self.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n).fold(BigRational::zero(), |acc, k| {
                            acc + &self.rows[i][k] * &other.rows[k][j]
                        })
                    })
                    .collect()
            })
            .collect();
        LinearChange::new(rows)
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn determinant(&self) -> BigRational {
        let n = self.rows.len();
        let mut m = self.rows.clone();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det *= &p;
            for r in (col + 1)..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] / &p;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn cayley_coordinate_change_gives_split_form() {
        // t0 t1 t2 + t3 (t0^2 + t1^2)
        let f = CubicForm::from_products(
            4,
            &[(1, [0, 1, 2]), (1, [0, 0, 3]), (1, [1, 1, 3])],
        )
        .unwrap();
        let l = LinearChange::from_integers(&[
            vec![1, 1, 0, 0],
            vec![1, -1, 0, 0],
            vec![0, 0, -2, 2],
            vec![0, 0, 1, 1],
        ])
        .unwrap();
        let expected = CubicForm::from_products(4, &[(4, [0, 0, 3]), (4, [1, 1, 2])]).unwrap();
        assert_eq!(f.substitute(&l).unwrap(), expected);
    }

    #[test]
    fn identity_substitution_is_noop() {
        let f = CubicForm::from_products(
            5,
            &[(1, [0, 0, 2]), (-3, [1, 1, 3]), (7, [0, 1, 4]), (2, [4, 4, 4])],
        )
        .unwrap();
        let id = LinearChange::identity(5).unwrap();
        assert_eq!(f.substitute(&id).unwrap(), f);
    }

    #[test]
    fn scaling_a_cube() {
        let f = CubicForm::from_products(2, &[(1, [0, 0, 0])]).unwrap();
        let l = LinearChange::from_integers(&[vec![2, 0], vec![0, 1]]).unwrap();
        let expected = CubicForm::from_products(2, &[(8, [0, 0, 0])]).unwrap();
        assert_eq!(f.substitute(&l).unwrap(), expected);
    }

    #[test]
    fn substitution_dimension_mismatch() {
        let f = CubicForm::from_products(3, &[(1, [0, 1, 2])]).unwrap();
        let l = LinearChange::identity(4).unwrap();
        assert!(f.substitute(&l).is_err());
    }

    #[test]
    fn singular_change_rejected() {
        assert!(LinearChange::from_integers(&[vec![1, 2], vec![2, 4]]).is_err());
        assert!(LinearChange::from_integers(&[vec![1, 2, 3], vec![0, 1]]).is_err());
    }

    #[test]
    fn proportionality_examples() {
        let f = CubicForm::from_products(3, &[(1, [0, 0, 2]), (-1, [1, 1, 2])]).unwrap();
        let two_f = f.scale(&q(2));
        assert_eq!(is_proportional(&two_f, &f).unwrap(), Some(q(2)));

        let cube = CubicForm::from_products(3, &[(1, [0, 0, 0])]).unwrap();
        let g = f.add(&cube).unwrap();
        assert_eq!(is_proportional(&f, &g).unwrap(), None);

        let zero = CubicForm::zero(3).unwrap();
        assert_eq!(is_proportional(&zero, &f).unwrap(), None);
        assert_eq!(is_proportional(&f, &zero).unwrap(), None);
        assert_eq!(is_proportional(&zero, &zero).unwrap(), Some(q(1)));

        let other = CubicForm::zero(4).unwrap();
        assert!(is_proportional(&zero, &other).is_err());
    }

    #[test]
    fn same_support_different_ratios_is_not_proportional() {
        let f = CubicForm::from_products(2, &[(1, [0, 0, 0]), (2, [1, 1, 1])]).unwrap();
        let g = CubicForm::from_products(2, &[(1, [0, 0, 0]), (3, [1, 1, 1])]).unwrap();
        assert_eq!(is_proportional(&f, &g).unwrap(), None);
    }

    #[test]
    fn evaluate_checks_length() {
        let f = CubicForm::from_products(3, &[(1, [0, 1, 2])]).unwrap();
        assert!(f.evaluate(&[1, 2]).is_err());
        assert_eq!(f.evaluate(&[2, 3, 5]).unwrap(), q(30));
        assert_eq!(f.evaluate(&[0, 0, 0]).unwrap(), q(0));
    }

    #[test]
    fn degree_and_length_invariants_enforced() {
        assert!(CubicForm::from_terms(3, [(vec![1, 1, 0], q(1))]).is_err());
        assert!(CubicForm::from_terms(3, [(vec![1, 1, 1, 0], q(1))]).is_err());
        assert!(CubicForm::from_products(3, &[(1, [0, 1, 3])]).is_err());
        assert!(CubicForm::zero(7).is_err());
        // cancellation leaves no zero coefficients behind
        let f = CubicForm::from_products(2, &[(1, [0, 0, 1]), (-1, [0, 1, 0])]).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn display_orders_monomials() {
        let f = CubicForm::from_products(
            4,
            &[(1, [0, 1, 2]), (1, [0, 0, 3]), (-2, [1, 1, 3])],
        )
        .unwrap();
        assert_eq!(f.to_string(), "t0^2*t3 + t0*t1*t2 - 2*t1^2*t3");
        assert_eq!(CubicForm::zero(2).unwrap().to_string(), "0");
    }

    #[test]
    fn integer_view_matches_exact_evaluation() {
        let f = CubicForm::from_products(
            5,
            &[(1, [0, 0, 2]), (-3, [1, 1, 3]), (7, [0, 1, 4])],
        )
        .unwrap();
        let fast = f.to_integer_terms().unwrap();
        for p in [[1, 2, 3, 4, 5], [-7, 0, 3, 11, -2], [0, 0, 0, 0, 0]] {
            assert_eq!(
                BigRational::from_integer(fast.eval(&p).into()),
                f.evaluate(&p).unwrap()
            );
        }
        let half = f.scale(&BigRational::new(1.into(), 2.into()));
        assert!(half.to_integer_terms().is_err());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(proptest::collection::vec(-3i64..=3, n), n)
    }

    proptest! {
        #[test]
        fn substitution_is_functorial(
            coeffs in proptest::collection::vec(-4i64..=4, 6),
            m1 in small_matrix(4),
            m2 in small_matrix(4),
        ) {
            let (Ok(l1), Ok(l2)) = (LinearChange::from_integers(&m1), LinearChange::from_integers(&m2)) else {
                return Ok(());
            };
            let products: Vec<(i64, [usize; 3])> = coeffs
                .iter()
                .zip([[0, 1, 2], [0, 0, 3], [1, 1, 3], [2, 2, 2], [0, 3, 3], [1, 2, 3]])
                .map(|(&c, v)| (c, v))
                .collect();
            let f = CubicForm::from_products(4, &products).unwrap();
            let stepwise = f.substitute(&l1).unwrap().substitute(&l2).unwrap();
            let composed = f.substitute(&l1.compose(&l2).unwrap()).unwrap();
            prop_assert_eq!(stepwise, composed);
        }
    }
}
