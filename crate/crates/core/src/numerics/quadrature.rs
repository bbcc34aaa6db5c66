#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, require_positive, Error, Result};

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half) and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
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
// Gauss weights for the odd-indexed Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Absolute error target for the whole interval.
    pub tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_intervals: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties broken by position for determinism.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<Segment> {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (i, (&x, &w)) in XGK.iter().zip(&WGK).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(invalid("f", format!("non-finite value on [{lo}, {hi}]")));
    }
    Ok(Segment {
        lo,
        hi,
        value,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[lo, hi]` by global adaptive bisection with an
/// embedded 7-point Gauss / 15-point Kronrod pair.
pub fn adaptive_quadrature_with<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    options: &QuadratureOptions,
) -> Result<QuadratureEstimate> {
    require_positive("tol", options.tol)?;
    if !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("bounds", "must be finite"));
    }
    if lo == hi {
        return Ok(QuadratureEstimate {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    if lo > hi {
        let flipped = adaptive_quadrature_with(f, hi, lo, options)?;
        return Ok(QuadratureEstimate {
            value: -flipped.value,
            ..flipped
        });
    }

    let mut heap = BinaryHeap::new();
    let first = kronrod15(&f, lo, hi)?;
    let mut total_error = first.error;
    heap.push(first);
    while total_error > options.tol && heap.len() < options.max_intervals {
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // Interval cannot be split further in f64.
            heap.push(worst);
            break;
        }
        let left = kronrod15(&f, worst.lo, mid)?;
        let right = kronrod15(&f, mid, worst.hi)?;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in position order so the result does not depend on heap layout.
    let mut segments = heap.into_vec();
    segments.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let value = segments.iter().map(|s| s.value).sum();
    let error: f64 = segments.iter().map(|s| s.error).sum();
    if error > options.tol {
        return Err(Error::ToleranceNotMet {
            tol: options.tol,
            estimate: error,
            intervals: segments.len(),
        });
    }
    Ok(QuadratureEstimate {
        value,
        error,
        intervals: segments.len(),
    })
}

pub fn adaptive_quadrature<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let options = QuadratureOptions {
        tol,
        ..QuadratureOptions::default()
    };
    adaptive_quadrature_with(f, lo, hi, &options).map(|e| e.value)
}

/// `Σ_{m=-(M-1)/2}^{(M-1)/2} f(m ε) ε`, the midpoint-rule image of
/// `∫_{-Mε/2}^{Mε/2} f`.
pub fn riemann_midpoint_sum<F: Fn(f64) -> f64>(f: F, step: f64, count: usize) -> Result<f64> {
    require_positive("step", step)?;
    if count % 2 == 0 {
        return Err(Error::NonOddCount(count));
    }
    let half = ((count - 1) / 2) as i64;
    Ok((-half..=half).map(|m| f(m as f64 * step)).sum::<f64>() * step)
}
