//! Brute-force enumeration of points of bounded height on
//! `V = W \ {t0 = t1 = 0}`.
//!
//! Every canonical primitive tuple inside the height ball is tested against
//! the defining cubic. This is slow (the ball has `O(B^{n+1})` lattice
//! points) and exists to validate the fiber counter.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactarith::{gcd, isqrt_nonneg, PrimitivePair};
use crate::forms::{surface_form, IntegerCubic, SurfaceKind, SurfaceSpec};

/// A rational projective point as its canonical primitive integer vector:
/// coprime coordinates, first nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    coords: Vec<i64>,
}

impl ProjPoint {
    /// Canonical representative of the point with homogeneous coordinates `coords`.
    pub fn from_coords(coords: &[i64]) -> Result<Self> {
        let g = coords.iter().fold(0i64, |g, &x| gcd(g, x));
        if g == 0 {
            return Err(Error::domain("the zero vector is not a projective point"));
        }
        let first = coords.iter().copied().find(|&x| x != 0).unwrap_or(1);
        let sign = if first < 0 { -1 } else { 1 };
        Ok(ProjPoint {
            coords: coords.iter().map(|&x| sign * x / g).collect(),
        })
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    /// `H(t)^2 = sum t_i^2`.
    pub fn height_sq(&self) -> i128 {
        self.coords.iter().map(|&x| (x as i128) * (x as i128)).sum()
    }
}

/// A height bound `B`, compared exactly through `B^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HeightBound {
    b: i64,
    b_sq: i128,
}

impl HeightBound {
    /// Largest accepted bound; keeps every quadratic-form and discriminant
    /// computation in the counters comfortably inside `i128`.
    pub const MAX: i64 = 1_000_000;

    pub fn new(b: i64) -> Result<Self> {
        if !(1..=Self::MAX).contains(&b) {
            return Err(Error::domain(format!(
                "height bound must be in 1..={}, got {b}",
                Self::MAX
            )));
        }
        Ok(HeightBound {
            b,
            b_sq: (b as i128) * (b as i128),
        })
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn b_sq(&self) -> i128 {
        self.b_sq
    }
}

fn countable_form(spec: &SurfaceSpec) -> Result<IntegerCubic> {
    if let SurfaceKind::CatalogOnly { tag, .. } = spec.kind() {
        return Err(Error::domain(format!(
            "catalog entry {tag:?} is not one of the counted families"
        )));
    }
    surface_form(spec)?.to_integer_terms()
}

/// Recursively fills `t[idx..]` over the ball `sum t_i^2 <= budget` and
/// keeps primitive zeros of the cubic.
fn walk(form: &IntegerCubic, t: &mut [i64], idx: usize, budget: i128, out: &mut Vec<ProjPoint>) {
    if idx == t.len() {
        if form.eval(t) == 0 && t.iter().fold(0i64, |g, &x| gcd(g, x)) == 1 {
            out.push(ProjPoint { coords: t.to_vec() });
        }
        return;
    }
    let m = isqrt_nonneg(budget) as i64;
    for x in -m..=m {
        t[idx] = x;
        walk(form, t, idx + 1, budget - (x as i128) * (x as i128), out);
    }
}

fn points_with_leading(form: &IntegerCubic, t0: i64, b_sq: i128) -> Vec<ProjPoint> {
    let n = form.num_vars();
    let mut out = Vec::new();
    let rest = b_sq - (t0 as i128) * (t0 as i128);
    if rest < 0 {
        return out;
    }
    let m = isqrt_nonneg(rest) as i64;
    // canonical and off the line t0 = t1 = 0: t0 > 0, or t0 = 0 and t1 > 0
    let t1_lo = if t0 == 0 { 1 } else { -m };
    let mut t = vec![0i64; n];
    t[0] = t0;
    for t1 in t1_lo..=m {
        t[1] = t1;
        walk(form, &mut t, 2, rest - (t1 as i128) * (t1 as i128), &mut out);
    }
    out
}

/// All points of `V` with `H <= B`, sorted lexicographically.
pub fn enumerate_points(spec: &SurfaceSpec, bound: HeightBound) -> Result<Vec<ProjPoint>> {
    let form = countable_form(spec)?;
    let b_sq = bound.b_sq();
    let chunks: Vec<Vec<ProjPoint>> = (0..=bound.b())
        .into_par_iter()
        .map(|t0| points_with_leading(&form, t0, b_sq))
        .collect();
    let mut points: Vec<ProjPoint> = chunks.into_iter().flatten().collect();
    points.sort_unstable();
    Ok(points)
}

pub fn count(spec: &SurfaceSpec, bound: HeightBound) -> Result<u64> {
    Ok(enumerate_points(spec, bound)?.len() as u64)
}

/// `counts[k] = N(V, k + 1)` for every bound up to `b_max`, from a single
/// enumeration at `b_max`.
pub fn counts_up_to(spec: &SurfaceSpec, b_max: HeightBound) -> Result<Vec<u64>> {
    let points = enumerate_points(spec, b_max)?;
    let b_max = b_max.b() as usize;
    let mut first_bound = vec![0u64; b_max + 1];
    for p in &points {
        // smallest integer B with B^2 >= H^2
        let h2 = p.height_sq();
        let mut b = isqrt_nonneg(h2);
        if b * b < h2 {
            b += 1;
        }
        first_bound[b as usize] += 1;
    }
    let mut acc = 0u64;
    Ok((1..=b_max)
        .map(|b| {
            acc += first_bound[b];
            acc
        })
        .collect())
}

/// The fiber `y = (t0 : t1)` containing `p`.
pub fn fiber_of(p: &ProjPoint, spec: &SurfaceSpec) -> Result<PrimitivePair> {
    if p.coords.len() != spec.num_vars() {
        return Err(Error::domain(format!(
            "point has {} coordinates, {} expects {}",
            p.coords.len(),
            spec,
            spec.num_vars()
        )));
    }
    if p.coords[0] == 0 && p.coords[1] == 0 {
        return Err(Error::domain("point lies on the non-normal line t0 = t1 = 0"));
    }
    PrimitivePair::from_direction(p.coords[0], p.coords[1])
}
