use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectOptions {
    /// Absolute bracket-width target.
    pub abs_tol: f64,
    /// Relative bracket-width target, scaled by the current midpoint.
    pub rel_tol: f64,
    /// Residual target `|g(root)|`; infinite means width alone decides.
    pub residual_tol: f64,
    pub max_iter: usize,
}

impl Default for BisectOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 0.0,
            residual_tol: f64::INFINITY,
            max_iter: 200,
        }
    }
}

/// Root of `g` in `[lo, hi]` by bisection. `g(lo)` and `g(hi)` must have
/// opposite signs (or one of them be zero).
pub fn bisect<G: FnMut(f64) -> f64>(
    mut g: G,
    lo: f64,
    hi: f64,
    options: &BisectOptions,
) -> Result<f64> {
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(invalid("bracket", format!("need finite lo < hi, got [{lo}, {hi}]")));
    }
    let (mut lo, mut hi) = (lo, hi);
    let g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo == 0.0 {
        return Ok(lo);
    }
    if g_hi == 0.0 {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() || g_lo.is_nan() || g_hi.is_nan() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let lo_negative = g_lo < 0.0;
    for _ in 0..options.max_iter {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Ok(mid);
        }
        let width = hi - lo;
        let width_tol = options.abs_tol.max(options.rel_tol * mid.abs());
        if width <= width_tol && g_mid.abs() <= options.residual_tol {
            return Ok(mid);
        }
        if mid <= lo || mid >= hi {
            // Bracket collapsed to adjacent floats.
            return Ok(mid);
        }
        if (g_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::IterationCap(options.max_iter))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let root = bisect(|r| r - 1.0, 0.0, 2.0, &BisectOptions::default()).unwrap();
        assert_eq!(root, 1.0);
    }

    #[test]
    fn sqrt_two_either_orientation() {
        let opts = BisectOptions { abs_tol: 1e-14, ..Default::default() };
        let up = bisect(|x| x * x - 2.0, 0.0, 3.0, &opts).unwrap();
        let down = bisect(|x| 2.0 - x * x, 0.0, 3.0, &opts).unwrap();
        assert!((up - std::f64::consts::SQRT_2).abs() < 1e-13);
        assert!((down - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn no_sign_change() {
        assert_eq!(
            bisect(|x| x * x + 1.0, -1.0, 2.0, &BisectOptions::default()),
            Err(Error::NoSignChange { lo: -1.0, hi: 2.0 })
        );
    }

    #[test]
    fn iteration_cap() {
        let opts = BisectOptions { abs_tol: 1e-15, max_iter: 5, ..Default::default() };
        assert_eq!(bisect(|x| x - 0.3, 0.0, 1.0, &opts), Err(Error::IterationCap(5)));
    }

    #[test]
    fn residual_target_drives_refinement() {
        // Steep function: width 1e-3 alone would leave a large residual.
        let opts = BisectOptions { abs_tol: 1e-3, residual_tol: 1e-9, ..Default::default() };
        let root = bisect(|x| 1e6 * (x - 0.123_456_789), 0.0, 1.0, &opts).unwrap();
        assert!((1e6 * (root - 0.123_456_789)).abs() <= 1e-9);
    }
}
