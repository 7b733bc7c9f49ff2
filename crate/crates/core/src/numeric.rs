//! Floating-point helpers: compensated summation and adaptive quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, keeping both error terms.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.carry);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

// 15-point Kronrod nodes on [-1, 1] (non-negative half, descending) with the
// embedded 7-point Gauss rule on the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Gauss-Kronrod 7/15 on `[a, b]`: (Kronrod estimate, |Kronrod - Gauss|).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Result of [`integrate_adaptive`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Globally adaptive Gauss-Kronrod quadrature: the panel with the largest
/// error estimate is halved until the summed estimate is `<= tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::domain(format!(
            "integration needs finite a < b and tol > 0 (a={a}, b={b}, tol={tol})"
        )));
    }
    let mut heap = BinaryHeap::new();
    let (value, error) = gk15(&f, a, b);
    heap.push(Panel { a, b, value, error });
    loop {
        let total_err: f64 = heap.iter().map(|p| p.error).sum();
        let n = heap.len();
        if total_err <= tol {
            let value = heap.iter().map(|p| p.value).collect::<CompensatedSum>().value();
            return Ok(Quadrature {
                value,
                error_estimate: total_err,
                intervals: n,
            });
        }
        if n >= max_intervals {
            let value = heap.iter().map(|p| p.value).collect::<CompensatedSum>().value();
            return Err(Error::Quadrature {
                estimate: value,
                error: total_err,
                intervals: n,
                tol,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = gk15(&f, lo, hi);
            heap.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}
