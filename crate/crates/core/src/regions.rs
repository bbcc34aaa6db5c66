//! Near-field region boundaries.
//!
//! * Phase-based (DDRayl): the smallest range beyond which the planar-wave
//!   phase error stays below π/8 for every antenna.
//! * Power-based (UPD): the smallest range beyond which the weakest-to-
//!   strongest channel power ratio stays above a threshold.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{ArcArrayGeometry, UserLocation};
use crate::numerics::{bisect, BisectOptions};

pub const PHASE_ERROR_LIMIT: f64 = PI / 8.0;
/// Ranges searched never exceed this many metres.
pub const MAX_SEARCH_RANGE: f64 = 1e6;
const MONOTONICITY_SAMPLES: usize = 64;

/// Largest planar-approximation phase error over all antennas, in radians.
///
/// The excess path `r_m - (r - w_m·û)` is evaluated as
/// `(w_m × û)² / (r_m + r - w_m·û)`, which is non-negative and free of
/// cancellation at large range.
pub fn max_phase_error(geom: &ArcArrayGeometry, user: &UserLocation) -> f64 {
    let (s, c) = user.theta().sin_cos();
    let coords = geom.user_arc_coords(user);
    let r = user.r();
    let k = 2.0 * PI / geom.wavelength();
    geom.indices()
        .map(|m| {
            let w = geom.position_unchecked(m);
            let along = w.x * c + w.y * s;
            let cross = w.x * s - w.y * c;
            let rm = geom.distance_from_coords(&coords, m);
            let denom = rm + r - along;
            if denom > 0.0 {
                k * cross * cross / denom
            } else {
                k * (rm - (r - along))
            }
        })
        .fold(0.0, f64::max)
}

/// Small-aperture approximation `max_m 8[(r0-L) sin θ - r0 sin(θ - α_m)]² / λ`.
pub fn ddrayl_approx(geom: &ArcArrayGeometry, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let (r0, offset) = (geom.radius(), geom.radius() - geom.support());
    let step = geom.angular_step();
    Ok(geom
        .indices()
        .map(|m| {
            let lever = offset * theta.sin() - r0 * (theta - m as f64 * step).sin();
            8.0 * lever * lever / geom.wavelength()
        })
        .fold(0.0, f64::max))
}

/// Linear-array Rayleigh distance `2 D² cos² θ / λ`.
pub fn ddrayl_ula(aperture: f64, theta: f64, wavelength: f64) -> Result<f64> {
    require_positive("aperture", aperture)?;
    require_positive("wavelength", wavelength)?;
    check_theta(theta)?;
    // cos(±π/2) rounds to ~6e-17; the boundary there is exactly zero.
    let c = if theta.abs() == PI / 2.0 { 0.0 } else { theta.cos() };
    Ok(2.0 * aperture * aperture * c * c / wavelength)
}

/// Exact phase-based boundary along direction `theta`.
///
/// `bracket` overrides the default search interval
/// `[max(λ, exit range), 2·approx]`, whose upper end grows by doubling.
pub fn ddrayl_exact(
    geom: &ArcArrayGeometry,
    theta: f64,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    check_theta(theta)?;
    let criterion = |r: f64| -> Result<f64> {
        let user = UserLocation::new(r, theta)?;
        Ok(PHASE_ERROR_LIMIT - max_phase_error(geom, &user))
    };
    let default_hi = 2.0 * ddrayl_approx(geom, theta)?.max(geom.aperture());
    let options = BisectOptions {
        abs_tol: 1e-6,
        rel_tol: 1e-9,
        residual_tol: 1e-6 * PHASE_ERROR_LIMIT,
        ..BisectOptions::default()
    };
    boundary_search(geom, theta, bracket, default_hi, criterion, &options)
}

/// Which denominator the power ratio uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerRatioMode {
    /// `r² + r0² sin²(α/2) + 2 r r0 |sin θ| sin(α/2)`: the squared distance
    /// to the farther chord end.
    #[default]
    ChordEnd,
    /// The largest squared antenna-user distance.
    ExactExtremes,
}

/// `r² + r0² + (r0-L)² - 2 r r0 cos(θ - α_m) - 2 (r0-L)(r0 cos α_m - r cos θ)`,
/// algebraically equal to the squared distance from antenna `m`.
pub fn squared_distance_polynomial(geom: &ArcArrayGeometry, user: &UserLocation, m: i64) -> Result<f64> {
    if m.abs() > geom.half_count() {
        return Err(Error::IndexOutOfRange {
            index: m,
            half: geom.half_count(),
        });
    }
    let (r, theta) = (user.r(), user.theta());
    let (r0, offset) = (geom.radius(), geom.radius() - geom.support());
    let am = m as f64 * geom.angular_step();
    Ok(r * r + r0 * r0 + offset * offset
        - 2.0 * r * r0 * (theta - am).cos()
        - 2.0 * offset * (r0 * am.cos() - r * theta.cos()))
}

/// Weakest-to-strongest channel power ratio, in `(0, 1]`.
pub fn power_ratio(geom: &ArcArrayGeometry, user: &UserLocation, mode: PowerRatioMode) -> f64 {
    let squared: Vec<f64> = geom.distances(user).iter().map(|d| d * d).collect();
    let nearest = squared.iter().copied().fold(f64::INFINITY, f64::min);
    let farthest = match mode {
        PowerRatioMode::ChordEnd => {
            let half_chord = geom.radius() * (geom.central_angle() / 2.0).sin();
            let r = user.r();
            r * r + half_chord * half_chord + 2.0 * r * half_chord * user.theta().sin().abs()
        }
        PowerRatioMode::ExactExtremes => squared.iter().copied().fold(0.0, f64::max),
    };
    nearest / farthest
}

/// Power ratio of a linear array occupying the continuous segment
/// `x = 0, |y| ≤ D/2`.
pub fn power_ratio_ula(aperture: f64, user: &UserLocation) -> Result<f64> {
    require_positive("aperture", aperture)?;
    let (s, c) = user.theta().sin_cos();
    let (x, y) = (user.r() * c, user.r() * s);
    let half = aperture / 2.0;
    let lateral = (y.abs() - half).max(0.0);
    let nearest = x * x + lateral * lateral;
    let far_y = y.abs() + half;
    Ok(nearest / (x * x + far_y * far_y))
}

/// Power-based boundary of the arc array along direction `theta`.
pub fn upd_numeric(
    geom: &ArcArrayGeometry,
    theta: f64,
    threshold: f64,
    mode: PowerRatioMode,
    bracket: Option<(f64, f64)>,
) -> Result<f64> {
    check_theta(theta)?;
    check_threshold(threshold)?;
    let criterion = |r: f64| -> Result<f64> {
        let user = UserLocation::new(r, theta)?;
        Ok(power_ratio(geom, &user, mode) - threshold)
    };
    let default_hi = 4.0 * geom.aperture() / (1.0 - threshold);
    boundary_search(geom, theta, bracket, default_hi, criterion, &ratio_options())
}

/// Power-based boundary of the linear array of aperture `aperture`.
pub fn upd_ula(aperture: f64, theta: f64, threshold: f64, wavelength: f64) -> Result<f64> {
    require_positive("aperture", aperture)?;
    require_positive("wavelength", wavelength)?;
    check_theta(theta)?;
    check_threshold(threshold)?;
    let criterion = |r: f64| -> Result<f64> {
        Ok(power_ratio_ula(aperture, &UserLocation::new(r, theta)?)? - threshold)
    };
    let hi = 4.0 * aperture / (1.0 - threshold);
    search_from(wavelength, hi, None, criterion, &ratio_options())
}

fn ratio_options() -> BisectOptions {
    BisectOptions {
        abs_tol: 1e-6,
        rel_tol: 1e-9,
        residual_tol: 1e-9,
        ..BisectOptions::default()
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() <= PI / 2.0 {
        Ok(())
    } else {
        Err(invalid("theta", format!("must lie in [-pi/2, pi/2], got {theta}")))
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(invalid("threshold", format!("must lie in (0, 1), got {threshold}")))
    }
}

/// Shared driver for arc-array boundaries: the search starts where the
/// user first leaves the arc circle.
fn boundary_search<C: Fn(f64) -> Result<f64>>(
    geom: &ArcArrayGeometry,
    theta: f64,
    bracket: Option<(f64, f64)>,
    default_hi: f64,
    criterion: C,
    options: &BisectOptions,
) -> Result<f64> {
    let floor = geom.wavelength().max(geom.exit_range(theta) * (1.0 + 1e-12));
    search_from(floor, default_hi, bracket, criterion, options)
}

/// Finds the smallest `r` with `criterion(r) ≥ 0`, for a criterion that is
/// non-decreasing in `r`. Returns the lower end if it already qualifies.
fn search_from<C: Fn(f64) -> Result<f64>>(
    floor: f64,
    default_hi: f64,
    bracket: Option<(f64, f64)>,
    criterion: C,
    options: &BisectOptions,
) -> Result<f64> {
    let (lo, mut hi, fixed) = match bracket {
        Some((lo, hi)) => {
            if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
                return Err(Error::BracketFailure(format!("invalid bracket [{lo}, {hi}]")));
            }
            (lo, hi, true)
        }
        None => (floor, default_hi.max(2.0 * floor), false),
    };
    if criterion(lo)? >= 0.0 {
        return Ok(lo);
    }
    while criterion(hi)? < 0.0 {
        if fixed || hi >= MAX_SEARCH_RANGE {
            return Err(Error::BracketFailure(format!(
                "criterion not met anywhere in [{lo}, {hi}]"
            )));
        }
        hi = (2.0 * hi).min(MAX_SEARCH_RANGE);
    }
    check_monotone(lo, hi, &criterion)?;
    let mut failure = None;
    let root = bisect(
        |r| match criterion(r) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        options,
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(root),
    }
}

fn check_monotone<C: Fn(f64) -> Result<f64>>(lo: f64, hi: f64, criterion: &C) -> Result<()> {
    let ratio = (hi / lo).ln() / (MONOTONICITY_SAMPLES - 1) as f64;
    let mut previous = f64::NEG_INFINITY;
    for i in 0..MONOTONICITY_SAMPLES {
        let r = lo * (ratio * i as f64).exp();
        let value = criterion(r)?;
        if value < previous - 1e-12 * previous.abs().max(1.0) {
            return Err(Error::BracketFailure(format!(
                "criterion decreases near r = {r}, bisection unsafe"
            )));
        }
        previous = value;
    }
    Ok(())
}

/// Boundaries at one angle. A `None` entry means the search failed there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionRow {
    pub theta: f64,
    pub uaa_ddrayl_exact: Option<f64>,
    pub uaa_ddrayl_approx: Option<f64>,
    pub uaa_upd: Option<f64>,
    pub ula_ddrayl: Option<f64>,
    pub ula_upd: Option<f64>,
}

/// Region boundaries of the arc array and its aperture-matched linear
/// array over a list of angles, in input order.
pub fn region_profile(
    geom: &ArcArrayGeometry,
    thetas: &[f64],
    threshold: f64,
) -> Result<Vec<RegionRow>> {
    check_threshold(threshold)?;
    for &theta in thetas {
        check_theta(theta)?;
    }
    let (aperture, wavelength) = (geom.aperture(), geom.wavelength());
    Ok(thetas
        .par_iter()
        .map(|&theta| RegionRow {
            theta,
            uaa_ddrayl_exact: ddrayl_exact(geom, theta, None).ok(),
            uaa_ddrayl_approx: ddrayl_approx(geom, theta).ok(),
            uaa_upd: upd_numeric(geom, theta, threshold, PowerRatioMode::ChordEnd, None).ok(),
            ula_ddrayl: ddrayl_ula(aperture, theta, wavelength).ok(),
            ula_upd: upd_ula(aperture, theta, threshold, wavelength).ok(),
        })
        .collect())
}
