//! Closed-form MRC SNR of the arc array, its linear-array and
//! many-antenna limits, and convergence tables for both limits.
//!
//! The closed form replaces `Σ_m 1/r_m²` by `(1/ε) ∫ dx / (a + b cos x + c sin x)`
//! over `[-Mε/2, Mε/2]` with `a = g² + r0²`, `b = -2 g r0 cos φ`,
//! `c = -2 g r0 sin φ`, then evaluates the integral as a pair of arctangents.

use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;

use crate::channel::LinkBudget;
use crate::error::{invalid, require_positive, Error, Result};
use crate::geometry::{ArcArrayGeometry, UserLocation};
use crate::numerics::TrigRationalIntegrand;
use crate::units::to_db;

/// `g² - r0²` below this fraction of `g²` marks the closed form as poorly
/// conditioned.
pub const CONDITIONING_THRESHOLD: f64 = 1e-6;

/// Everything the closed form needs, assembled from geometry, user and link.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormInputs {
    pub g: f64,
    pub radius: f64,
    pub phi: f64,
    pub support: f64,
    pub central_angle: f64,
    pub count: usize,
    pub gamma0_bar: f64,
    // g cos φ, g sin φ and g² - r0² in cancellation-free form.
    along: f64,
    across: f64,
    radial_gap: f64,
}

impl ClosedFormInputs {
    pub fn new(geom: &ArcArrayGeometry, user: &UserLocation, link: &LinkBudget) -> Result<Self> {
        if geom.count() < 3 {
            return Err(Error::SingleAntenna);
        }
        let alpha = geom.central_angle();
        if !(alpha > 0.0 && alpha <= PI) {
            return Err(Error::AlphaExceedsPi(alpha));
        }
        let coords = geom.user_arc_coords(user);
        let radius = geom.radius();
        if coords.g <= radius {
            return Err(Error::UserInsideArc {
                g: coords.g,
                radius,
            });
        }
        let (r, support) = (user.r(), geom.support());
        let r_cos = r * user.theta().cos();
        let radial_gap = r * r + support * support - 2.0 * support * r_cos
            + 2.0 * radius * (r_cos - support);
        if radial_gap <= 0.0 {
            return Err(Error::UserInsideArc {
                g: coords.g,
                radius,
            });
        }
        Ok(Self {
            g: coords.g,
            radius,
            phi: coords.phi,
            support,
            central_angle: alpha,
            count: geom.count(),
            gamma0_bar: link.gamma0_bar(),
            along: coords.along,
            across: coords.across,
            radial_gap,
        })
    }

    /// ε = α / (M - 1).
    pub fn angular_step(&self) -> f64 {
        self.central_angle / (self.count - 1) as f64
    }

    /// Half-width Mε/2 of the integration interval.
    pub fn half_width(&self) -> f64 {
        self.count as f64 * self.angular_step() / 2.0
    }

    /// `g² - r0²`.
    pub fn radial_gap(&self) -> f64 {
        self.radial_gap
    }

    pub fn ill_conditioned(&self) -> bool {
        self.radial_gap < CONDITIONING_THRESHOLD * self.g * self.g
    }

    /// Integrand coefficients. Fails if `a² ≤ b² + c²`, which cannot happen
    /// for `g > r0` since the margin equals `(g² - r0²)²`.
    pub fn coefficients(&self) -> Result<TrigRationalIntegrand> {
        let cross = 2.0 * self.radius;
        TrigRationalIntegrand::new(
            self.g * self.g + self.radius * self.radius,
            -cross * self.along,
            -cross * self.across,
        )
    }

    /// `γ̄₀ · 2(M-1) / (α (g² - r0²)) · [atan((K t - S)/Q) + atan((K t + S)/Q)]`
    /// for a given quarter-angle tangent `t`.
    fn evaluate(&self, quarter_tan: f64) -> f64 {
        if self.ill_conditioned() {
            warn!(
                "closed-form SNR poorly conditioned: g^2 - r0^2 = {:e} with g = {}",
                self.radial_gap, self.g
            );
        }
        let k = self.g * self.g + self.radius * self.radius + 2.0 * self.radius * self.along;
        let s = 2.0 * self.radius * self.across;
        let q = self.radial_gap;
        let pair = ((k * quarter_tan - s) / q).atan() + ((k * quarter_tan + s) / q).atan();
        2.0 * self.gamma0_bar * (self.count - 1) as f64 / (self.central_angle * q) * pair
    }
}

/// The bracketed arctangent pair of the closed form,
/// `U(x, y) = atan((k t - 2xy sin φ)/(x² - y²)) + atan((k t + 2xy sin φ)/(x² - y²))`
/// with `k = x² + y² + 2xy cos φ` and `t = √(L / (2y - L))`.
pub fn arctan_pair_u(x: f64, y: f64, phi: f64, support: f64) -> Result<f64> {
    if !(y > 0.0 && x > y) {
        return Err(Error::DegenerateRadii { x, y });
    }
    if !(support > 0.0 && support < 2.0 * y) {
        return Err(Error::SupportOutOfRange { support, radius: y });
    }
    let t = (support / (2.0 * y - support)).sqrt();
    let k = x * x + y * y + 2.0 * x * y * phi.cos();
    let s = 2.0 * x * y * phi.sin();
    let q = x * x - y * y;
    Ok(((k * t - s) / q).atan() + ((k * t + s) / q).atan())
}

/// Closed-form MRC SNR with the antiderivative evaluated at `±Mε/2`, i.e.
/// quarter-angle tangent `tan(Mε/4)`.
pub fn mrc_snr_closed_form(
    geom: &ArcArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<f64> {
    let inputs = ClosedFormInputs::new(geom, user, link)?;
    Ok(inputs.evaluate((inputs.half_width() / 2.0).tan()))
}

/// Closed form with the quarter-angle tangent written through the support,
/// `√(L / (2 r0 - L)) = tan(α/4)`, i.e. evaluated at `±α/2`.
pub fn mrc_snr_closed_form_sagitta(
    geom: &ArcArrayGeometry,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<f64> {
    let inputs = ClosedFormInputs::new(geom, user, link)?;
    let u = arctan_pair_u(inputs.g, inputs.radius, inputs.phi, inputs.support)?;
    Ok(2.0 * inputs.gamma0_bar * (inputs.count - 1) as f64
        / (inputs.central_angle * inputs.radial_gap)
        * u)
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.abs() < PI / 2.0 {
        Ok(())
    } else {
        Err(Error::GrazingAngle(theta))
    }
}

/// Linear-array closed form
/// `γ̄₀/(d r cos θ) · [atan(Md/(2r cos θ) - tan θ) + atan(Md/(2r cos θ) + tan θ)]`.
pub fn ula_snr_closed_form(
    count: usize,
    spacing: f64,
    user: &UserLocation,
    link: &LinkBudget,
) -> Result<f64> {
    require_positive("spacing", spacing)?;
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    check_angle(user.theta())?;
    let projection = user.r() * user.theta().cos();
    let reach = count as f64 * spacing / (2.0 * projection);
    let tilt = user.theta().tan();
    Ok(link.gamma0_bar() / (spacing * projection)
        * ((reach - tilt).atan() + (reach + tilt).atan()))
}

/// Many-antenna limit `γ̄₀ π / (d (r cos θ - L))`; `support = 0` gives the
/// linear-array limit.
pub fn asymptotic_snr(
    user: &UserLocation,
    support: f64,
    spacing: f64,
    link: &LinkBudget,
) -> Result<f64> {
    require_positive("spacing", spacing)?;
    if support.is_nan() || support < 0.0 {
        return Err(invalid("support", "must be non-negative"));
    }
    check_angle(user.theta())?;
    let projection = user.r() * user.theta().cos();
    if projection <= support {
        return Err(Error::UserBehindArcMiddle {
            projection,
            support,
        });
    }
    Ok(link.gamma0_bar() * PI / (spacing * (projection - support)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSupportRow {
    pub support: f64,
    pub arc_snr: f64,
    pub ula_snr: f64,
    /// |γ_arc / γ_ula - 1|.
    pub relative_gap: f64,
}

/// Arc closed form against the linear-array closed form (same M and d) as
/// the support shrinks at fixed aperture.
pub fn small_support_convergence(
    aperture: f64,
    user: &UserLocation,
    link: &LinkBudget,
    supports: &[f64],
) -> Result<Vec<SmallSupportRow>> {
    require_positive("aperture", aperture)?;
    if supports.is_empty() {
        return Err(invalid("supports", "must not be empty"));
    }
    if supports.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("supports", "must be strictly decreasing"));
    }
    if supports[0] > aperture / 2.0 || supports[supports.len() - 1] <= 0.0 {
        return Err(invalid("supports", "must lie in (0, aperture/2]"));
    }
    supports
        .par_iter()
        .map(|&support| {
            let geom = ArcArrayGeometry::from_aperture_support(aperture, support, link.wavelength())?;
            let arc_snr = mrc_snr_closed_form(&geom, user, link)?;
            let ula_snr = ula_snr_closed_form(geom.count(), geom.spacing(), user, link)?;
            Ok(SmallSupportRow {
                support,
                arc_snr,
                ula_snr,
                relative_gap: (arc_snr / ula_snr - 1.0).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeApertureRow {
    pub aperture: f64,
    pub closed_form: f64,
    pub asymptote: f64,
    /// Asymptote minus closed form, in dB.
    pub gap_db: f64,
}

/// Closed form against the many-antenna limit as the aperture grows at
/// fixed support.
pub fn large_aperture_convergence(
    support: f64,
    user: &UserLocation,
    link: &LinkBudget,
    apertures: &[f64],
) -> Result<Vec<LargeApertureRow>> {
    require_positive("support", support)?;
    if apertures.is_empty() {
        return Err(invalid("apertures", "must not be empty"));
    }
    if apertures.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("apertures", "must be strictly increasing"));
    }
    if apertures[0] < 2.0 * support {
        return Err(invalid("apertures", "must all be at least twice the support"));
    }
    let spacing = link.wavelength() / 2.0;
    let asymptote = asymptotic_snr(user, support, spacing, link)?;
    apertures
        .par_iter()
        .map(|&aperture| {
            let geom = ArcArrayGeometry::from_aperture_support(aperture, support, link.wavelength())?;
            let closed_form = mrc_snr_closed_form(&geom, user, link)?;
            Ok(LargeApertureRow {
                aperture,
                closed_form,
                asymptote,
                gap_db: to_db(asymptote) - to_db(closed_form),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mrc_snr_direct, mrc_snr_direct_ula};
    use crate::geometry::UlaArrayGeometry;
    use crate::numerics::definite_integral;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const LAMBDA: f64 = 0.01;

    fn link() -> LinkBudget {
        LinkBudget::from_reference_snr(1e5, LAMBDA).unwrap()
    }

    fn user(r: f64, deg: f64) -> UserLocation {
        UserLocation::from_degrees(r, deg).unwrap()
    }

    #[test]
    fn u_broadside_and_small_support() {
        let (x, y, l) = (30.0f64, 20.0f64, 3.0f64);
        let t = (l / (2.0 * y - l)).sqrt();
        let expect = 2.0 * ((x + y) * (x + y) * t / (x * x - y * y)).atan();
        assert_relative_eq!(arctan_pair_u(x, y, 0.0, l).unwrap(), expect, max_relative = 1e-15);
        let tiny = arctan_pair_u(x, y, 0.0, 1e-14).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-6);
    }

    #[test]
    fn u_reference_value() {
        // Extended-precision evaluation: 2.3775180304596673.
        let phi = (8.0f64 / 90.336).asin();
        let u = arctan_pair_u(90.336, 80.125, phi, 4.0).unwrap();
        assert_relative_eq!(u, 2.377_518_030_459_667, max_relative = 1e-13);
        assert_relative_eq!(u, arctan_pair_u(90.336, 80.125, -phi, 4.0).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn u_errors() {
        assert_eq!(
            arctan_pair_u(10.0, 10.0, 0.1, 1.0),
            Err(Error::DegenerateRadii { x: 10.0, y: 10.0 })
        );
        assert_eq!(
            arctan_pair_u(30.0, 10.0, 0.1, 20.0),
            Err(Error::SupportOutOfRange { support: 20.0, radius: 10.0 })
        );
    }

    #[test]
    fn closed_form_matches_antiderivative_exactly() {
        let geom = ArcArrayGeometry::from_aperture_support(50.0, 4.0, LAMBDA).unwrap();
        let u = user(16.0, 30.0);
        let inputs = ClosedFormInputs::new(&geom, &u, &link()).unwrap();
        let coeffs = inputs.coefficients().unwrap();
        let w = inputs.half_width();
        let via_f = link().gamma0_bar() / inputs.angular_step() * definite_integral(&coeffs, -w, w).unwrap();
        let closed = mrc_snr_closed_form(&geom, &u, &link()).unwrap();
        assert_relative_eq!(via_f, closed, max_relative = 1e-12);
        let margin = coeffs.margin();
        assert_relative_eq!(margin, inputs.radial_gap().powi(2), max_relative = 1e-10);
    }

    #[test]
    fn closed_form_large_aperture_reference() {
        let geom = ArcArrayGeometry::from_aperture_support(200.0, 4.0, LAMBDA).unwrap();
        let u = user(16.0, 30.0);
        let closed = mrc_snr_closed_form(&geom, &u, &link()).unwrap();
        let direct = mrc_snr_direct(&geom, &u, &link()).unwrap();
        assert!((closed / direct - 1.0).abs() < 1e-6);
        assert_relative_eq!(closed, 5.935_863e6, max_relative = 1e-6);
        assert!((to_db(closed) - 67.735).abs() < 0.01);
        let sagitta = mrc_snr_closed_form_sagitta(&geom, &u, &link()).unwrap();
        assert!((sagitta / direct - 1.0).abs() < 1e-5);
    }

    #[test]
    fn closed_form_even_in_angle() {
        let geom = ArcArrayGeometry::from_aperture_support(30.0, 4.0, LAMBDA).unwrap();
        for deg in [3.0, 17.0, 45.0, 71.0] {
            let a = mrc_snr_closed_form(&geom, &user(20.0, deg), &link()).unwrap();
            let b = mrc_snr_closed_form(&geom, &user(20.0, -deg), &link()).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn closed_form_errors() {
        let single = ArcArrayGeometry::single_element(10.0, 1.0, LAMBDA).unwrap();
        assert_eq!(
            mrc_snr_closed_form(&single, &user(20.0, 0.0), &link()),
            Err(Error::SingleAntenna)
        );
        let semi = ArcArrayGeometry::from_aperture_support(8.0, 4.0, LAMBDA).unwrap();
        assert!(matches!(
            mrc_snr_closed_form(&semi, &user(2.0, 0.0), &link()),
            Err(Error::UserInsideArc { .. })
        ));
    }

    #[test]
    fn ula_closed_form_cases() {
        let lb = link();
        let u = user(16.0, 0.0);
        let broadside = 2.0 * 1e5 / (0.005 * 16.0) * (101.0f64 * 0.005 / 32.0).atan();
        let value = ula_snr_closed_form(101, 0.005, &u, &lb).unwrap();
        assert_relative_eq!(value, broadside, max_relative = 1e-15);
        // Direct summation oracle for the same array.
        let ula = UlaArrayGeometry::from_count(101, 0.005, LAMBDA).unwrap();
        let direct = mrc_snr_direct_ula(&ula, &u, &lb).unwrap();
        assert!((value / direct - 1.0).abs() < 1e-6);
        assert_relative_eq!(value, 39_449.850_250_654_75, max_relative = 1e-13);

        let huge = ula_snr_closed_form(100_000_001, 0.005, &user(16.0, 20.0), &lb).unwrap();
        let limit = 1e5 * PI / (0.005 * 16.0 * 20f64.to_radians().cos());
        assert!((huge / limit - 1.0).abs() < 1e-4);

        let a = ula_snr_closed_form(1001, 0.005, &user(16.0, 40.0), &lb).unwrap();
        let b = ula_snr_closed_form(1001, 0.005, &user(16.0, -40.0), &lb).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-14);
        assert!(matches!(
            ula_snr_closed_form(11, 0.005, &UserLocation::new(5.0, PI / 2.0).unwrap(), &lb),
            Err(Error::GrazingAngle(_))
        ));
    }

    #[test]
    fn ula_closed_form_tracks_summation_off_broadside() {
        let lb = link();
        let ula = UlaArrayGeometry::from_count(1001, 0.005, LAMBDA).unwrap();
        let u = user(16.0, 30.0);
        let closed = ula_snr_closed_form(ula.count(), ula.spacing(), &u, &lb).unwrap();
        let direct = mrc_snr_direct_ula(&ula, &u, &lb).unwrap();
        assert!((closed / direct - 1.0).abs() < 1e-3);
    }

    #[test]
    fn asymptote_reference_value() {
        let lb = link();
        let value = asymptotic_snr(&user(16.0, 30.0), 4.0, 0.005, &lb).unwrap();
        assert_relative_eq!(value, 6_374_722.199_543_227, max_relative = 1e-13);
        assert!((to_db(value) - 68.05).abs() < 0.01);
        let ula = asymptotic_snr(&user(16.0, 30.0), 0.0, 0.005, &lb).unwrap();
        assert_relative_eq!(ula, 1e5 * PI / (0.005 * 16.0 * (PI / 6.0).cos()), max_relative = 1e-15);
        let edge = UserLocation::new(8.0, 0.0).unwrap();
        assert!(matches!(
            asymptotic_snr(&edge, 8.0, 0.005, &lb),
            Err(Error::UserBehindArcMiddle { .. })
        ));
        let lo = asymptotic_snr(&user(16.0, 30.0), 1.0, 0.005, &lb).unwrap();
        let hi = asymptotic_snr(&user(16.0, 30.0), 2.0, 0.005, &lb).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn small_support_table() {
        let u = user(16.0, 30.0);
        let supports = [2.5, 1.0, 0.1, 1e-3, 5e-6];
        let rows = small_support_convergence(5.0, &u, &link(), &supports).unwrap();
        assert_eq!(rows.len(), supports.len());
        assert!(rows.windows(2).all(|w| w[1].relative_gap < w[0].relative_gap));
        assert!(rows.last().unwrap().relative_gap < 1e-3);
        let max = rows.iter().map(|r| r.relative_gap).fold(0.0, f64::max);
        assert_eq!(max, rows[0].relative_gap);
        let one = small_support_convergence(5.0, &u, &link(), &[1.0]).unwrap();
        assert_eq!(one.len(), 1);
        assert!(small_support_convergence(5.0, &u, &link(), &[1.0, 2.0]).is_err());
        assert!(small_support_convergence(5.0, &u, &link(), &[3.0]).is_err());
    }

    #[test]
    fn large_aperture_table() {
        let u = user(16.0, 30.0);
        let apertures = [8.0, 20.0, 50.0, 100.0, 200.0, 500.0];
        let rows = large_aperture_convergence(4.0, &u, &link(), &apertures).unwrap();
        assert_eq!(rows[0].aperture, 8.0);
        assert!(rows.windows(2).all(|w| w[1].gap_db < w[0].gap_db));
        assert!(rows.last().unwrap().gap_db < 0.15);
        assert!(rows.last().unwrap().gap_db > 0.0);
        assert!(large_aperture_convergence(4.0, &u, &link(), &[6.0, 10.0]).is_err());
    }

    #[test]
    fn closed_form_tracks_summation_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lb = link();
        let mut checked = 0;
        while checked < 60 {
            let aperture = rng.random_range(1.5..60.0);
            let support = aperture * rng.random_range(0.01..0.5);
            let Ok(geom) = ArcArrayGeometry::from_aperture_support(aperture, support, LAMBDA) else {
                continue;
            };
            let u = user(rng.random_range(0.5..100.0) * aperture, rng.random_range(-85.0..85.0));
            let g = geom.user_arc_coords(&u).g;
            if geom.count() < 201 || g <= 1.05 * geom.radius() {
                continue;
            }
            let direct = mrc_snr_direct(&geom, &u, &lb).unwrap();
            let closed = mrc_snr_closed_form(&geom, &u, &lb).unwrap();
            let sagitta = mrc_snr_closed_form_sagitta(&geom, &u, &lb).unwrap();
            let tol = if geom.count() >= 2001 { 1e-3 } else { 1e-2 };
            assert!((closed / direct - 1.0).abs() < tol, "M={} closed {closed} direct {direct}", geom.count());
            assert!((sagitta / direct - 1.0).abs() < tol);
            checked += 1;
        }
    }
}
