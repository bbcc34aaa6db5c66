//! Arc and linear array geometry.
//!
//! The arc lies in the x-y plane with its chord DE on the y-axis and the
//! origin O at the chord midpoint. The arc midpoint C sits at (L, 0) and the
//! arc centre A at (-(r0 - L), 0). Antennas are indexed symmetrically,
//! `m = -(M-1)/2 ..= (M-1)/2`, at angle `m * epsilon` seen from A.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::RangeInclusive;

use crate::error::{invalid, require_positive, Error, Result};

/// Tolerated relative deviation of the realized chord spacing from λ/2.
pub const SPACING_TOLERANCE: f64 = 0.005;

/// Slack applied to α/ε before flooring, so rounding cannot drop an antenna
/// pair when the ratio is an integer in exact arithmetic.
const COUNT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
}

impl CartesianPoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &CartesianPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Largest odd antenna count `M` with `(M - 1) <= ratio`, never below 1.
fn odd_count_below(ratio: f64) -> usize {
    let n = (ratio + COUNT_SLACK).floor().max(0.0) as usize;
    (n - n % 2) + 1
}

/// Complete description of a uniform arc array.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcArrayGeometry {
    count: usize,
    spacing: f64,
    wavelength: f64,
    radius: f64,
    central_angle: f64,
    angular_step: f64,
    support: f64,
    aperture: f64,
    actual_spacing: f64,
}

impl ArcArrayGeometry {
    /// Builds an arc of `count` half-wavelength-spaced antennas on a circle of
    /// radius `radius`.
    pub fn from_radius_count(radius: f64, count: usize, wavelength: f64) -> Result<Self> {
        require_positive("radius", radius)?;
        require_positive("wavelength", wavelength)?;
        if count % 2 == 0 {
            return Err(Error::NonOddCount(count));
        }
        if count < 3 {
            return Err(Error::TooFewAntennas { count, min: 3 });
        }
        let spacing = wavelength / 2.0;
        let half_chord = spacing / (2.0 * radius);
        if half_chord > 1.0 {
            return Err(Error::RadiusTooSmall { radius, spacing });
        }
        let angular_step = 2.0 * half_chord.asin();
        let central_angle = (count - 1) as f64 * angular_step;
        if central_angle > PI {
            return Err(Error::AlphaExceedsPi(central_angle));
        }
        let quarter = (central_angle / 4.0).sin();
        Ok(Self {
            count,
            spacing,
            wavelength,
            radius,
            central_angle,
            angular_step,
            support: 2.0 * radius * quarter * quarter,
            aperture: 2.0 * radius * (central_angle / 2.0).sin(),
            actual_spacing: 2.0 * radius * (angular_step / 2.0).sin(),
        })
    }

    /// Builds the arc through the chord endpoints `(0, ±aperture/2)` and the
    /// midpoint `(support, 0)`, packing as many half-wavelength-spaced
    /// antennas as fit.
    pub fn from_aperture_support(aperture: f64, support: f64, wavelength: f64) -> Result<Self> {
        require_positive("aperture", aperture)?;
        require_positive("wavelength", wavelength)?;
        if !support.is_finite() || support <= 0.0 {
            return Err(Error::DegenerateSupport(support));
        }
        if support > aperture / 2.0 {
            return Err(Error::SupportExceedsSemicircle { support, aperture });
        }
        let half = aperture / 2.0;
        let radius = (4.0 * support * support + aperture * aperture) / (8.0 * support);
        // tan(α/2) = (D/2) / (r0 - L); well conditioned up to the semicircle.
        let central_angle = 2.0 * half.atan2(radius - support);
        let spacing = wavelength / 2.0;
        let half_chord = spacing / (2.0 * radius);
        if half_chord > 1.0 {
            return Err(Error::RadiusTooSmall { radius, spacing });
        }
        let nominal_step = 2.0 * half_chord.asin();
        let count = odd_count_below(central_angle / nominal_step);
        if count < 3 {
            return Err(Error::TooFewAntennas { count, min: 3 });
        }
        let angular_step = central_angle / (count - 1) as f64;
        let actual_spacing = 2.0 * radius * (angular_step / 2.0).sin();
        if ((actual_spacing - spacing) / spacing).abs() > SPACING_TOLERANCE {
            return Err(Error::SpacingOutOfTolerance {
                actual: actual_spacing,
                nominal: spacing,
            });
        }
        Ok(Self {
            count,
            spacing,
            wavelength,
            radius,
            central_angle,
            angular_step,
            support,
            aperture,
            actual_spacing,
        })
    }

    /// Degenerate one-antenna geometry: a notional arc of the given radius
    /// and support with its only antenna at the arc midpoint.
    pub fn single_element(radius: f64, support: f64, wavelength: f64) -> Result<Self> {
        require_positive("radius", radius)?;
        require_positive("wavelength", wavelength)?;
        if !support.is_finite() || support <= 0.0 {
            return Err(Error::DegenerateSupport(support));
        }
        if support > radius {
            return Err(invalid("support", "must not exceed the radius"));
        }
        let central_angle = 4.0 * (support / (2.0 * radius)).sqrt().asin();
        Ok(Self {
            count: 1,
            spacing: wavelength / 2.0,
            wavelength,
            radius,
            central_angle,
            angular_step: 0.0,
            support,
            aperture: 2.0 * radius * (central_angle / 2.0).sin(),
            actual_spacing: 0.0,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Nominal spacing d = λ/2.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Central angle α subtended at the arc centre.
    pub fn central_angle(&self) -> f64 {
        self.central_angle
    }

    /// Inter-antenna angle ε = α/(M-1); zero for a single antenna.
    pub fn angular_step(&self) -> f64 {
        self.angular_step
    }

    /// Sagitta L, the distance from the origin to the arc midpoint.
    pub fn support(&self) -> f64 {
        self.support
    }

    /// Chord length D between the two edge antennas.
    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    /// Realized chord spacing 2 r0 sin(ε/2).
    pub fn actual_spacing(&self) -> f64 {
        self.actual_spacing
    }

    pub fn half_count(&self) -> i64 {
        ((self.count - 1) / 2) as i64
    }

    pub fn indices(&self) -> RangeInclusive<i64> {
        let half = self.half_count();
        -half..=half
    }

    /// Arc centre A.
    pub fn center(&self) -> CartesianPoint {
        CartesianPoint::new(-(self.radius - self.support), 0.0)
    }

    fn check_index(&self, m: i64) -> Result<()> {
        let half = self.half_count();
        if m.abs() > half {
            Err(Error::IndexOutOfRange { index: m, half })
        } else {
            Ok(())
        }
    }

    /// Position of antenna `m`, `w_m = [r0 cos(mε) - (r0 - L), r0 sin(mε)]`.
    pub fn antenna_position(&self, m: i64) -> Result<CartesianPoint> {
        self.check_index(m)?;
        Ok(self.position_unchecked(m))
    }

    pub(crate) fn position_unchecked(&self, m: i64) -> CartesianPoint {
        let angle = m as f64 * self.angular_step;
        let s = (angle / 2.0).sin();
        // r0 cos a - r0 + L without cancelling two large terms.
        CartesianPoint::new(self.support - 2.0 * self.radius * s * s, self.radius * angle.sin())
    }

    pub fn positions(&self) -> Vec<CartesianPoint> {
        self.indices().map(|m| self.position_unchecked(m)).collect()
    }

    /// User coordinates in the arc-centre frame.
    pub fn user_arc_coords(&self, user: &UserLocation) -> ArcFrameCoords {
        let offset = self.radius - self.support;
        let along = user.r * user.theta.cos() + offset;
        let across = user.r * user.theta.sin();
        ArcFrameCoords {
            g: along.hypot(across),
            phi: across.atan2(along),
            along,
            across,
        }
    }

    /// Distance from antenna `m` to the user through the arc-centre form
    /// `sqrt(g² + r0² - 2 r0 g cos(φ - mε))`.
    pub fn antenna_user_distance(&self, user: &UserLocation, m: i64) -> Result<f64> {
        self.check_index(m)?;
        let coords = self.user_arc_coords(user);
        Ok(self.distance_from_coords(&coords, m))
    }

    pub(crate) fn distance_from_coords(&self, coords: &ArcFrameCoords, m: i64) -> f64 {
        let half_diff = ((coords.phi - m as f64 * self.angular_step) / 2.0).sin();
        let radial = coords.g - self.radius;
        (radial * radial + 4.0 * coords.g * self.radius * half_diff * half_diff).sqrt()
    }

    /// Same distance computed as the Euclidean norm `‖w_m - q‖`.
    pub fn antenna_user_distance_cartesian(&self, user: &UserLocation, m: i64) -> Result<f64> {
        Ok(self.antenna_position(m)?.distance_to(&user.position()))
    }

    /// All antenna-user distances in index order.
    pub fn distances(&self, user: &UserLocation) -> Vec<f64> {
        let coords = self.user_arc_coords(user);
        self.indices()
            .map(|m| self.distance_from_coords(&coords, m))
            .collect()
    }

    /// True iff the user is strictly farther from the arc centre than r0.
    pub fn user_outside_arc(&self, user: &UserLocation) -> bool {
        self.user_arc_coords(user).g > self.radius
    }

    /// Smallest range at direction `theta` for which the user leaves the
    /// arc circle.
    pub fn exit_range(&self, theta: f64) -> f64 {
        let offset = self.radius - self.support;
        let (s, c) = theta.sin_cos();
        let disc = self.radius * self.radius - offset * offset * s * s;
        -offset * c + disc.max(0.0).sqrt()
    }
}

/// Polar user position relative to the origin O.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UserLocation {
    r: f64,
    theta: f64,
}

impl UserLocation {
    /// `theta` is measured from the x-axis and must lie in [-π/2, π/2].
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        require_positive("r", r)?;
        if !theta.is_finite() || theta.abs() > FRAC_PI_2 {
            return Err(invalid("theta", format!("must lie in [-pi/2, pi/2], got {theta}")));
        }
        Ok(Self { r, theta })
    }

    pub fn from_degrees(r: f64, theta_deg: f64) -> Result<Self> {
        Self::new(r, theta_deg.to_radians())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn position(&self) -> CartesianPoint {
        let (s, c) = self.theta.sin_cos();
        CartesianPoint::new(self.r * c, self.r * s)
    }

    /// The same range mirrored across the x-axis.
    pub fn mirrored(&self) -> Self {
        Self {
            r: self.r,
            theta: -self.theta,
        }
    }
}

/// User position seen from the arc centre A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcFrameCoords {
    /// Distance from the user to A.
    pub g: f64,
    /// Signed angle between AP and AC.
    pub phi: f64,
    /// g cos φ = r cos θ + r0 - L.
    pub(crate) along: f64,
    /// g sin φ = r sin θ.
    pub(crate) across: f64,
}

/// Aperture-matched uniform linear array on the y-axis, centred at O.
#[derive(Debug, Clone, PartialEq)]
pub struct UlaArrayGeometry {
    count: usize,
    spacing: f64,
    aperture: f64,
    wavelength: f64,
}

impl UlaArrayGeometry {
    /// Half-wavelength ULA with the largest odd count that fits in `aperture`.
    pub fn from_aperture(aperture: f64, wavelength: f64) -> Result<Self> {
        require_positive("aperture", aperture)?;
        require_positive("wavelength", wavelength)?;
        let spacing = wavelength / 2.0;
        let count = odd_count_below(aperture / spacing);
        Ok(Self::from_count_unchecked(count, spacing, wavelength))
    }

    pub fn from_count(count: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        require_positive("spacing", spacing)?;
        require_positive("wavelength", wavelength)?;
        if count % 2 == 0 {
            return Err(Error::NonOddCount(count));
        }
        Ok(Self::from_count_unchecked(count, spacing, wavelength))
    }

    fn from_count_unchecked(count: usize, spacing: f64, wavelength: f64) -> Self {
        Self {
            count,
            spacing,
            aperture: (count - 1) as f64 * spacing,
            wavelength,
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// (M - 1) d.
    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn half_count(&self) -> i64 {
        ((self.count - 1) / 2) as i64
    }

    pub fn indices(&self) -> RangeInclusive<i64> {
        let half = self.half_count();
        -half..=half
    }

    fn check_index(&self, m: i64) -> Result<()> {
        let half = self.half_count();
        if m.abs() > half {
            Err(Error::IndexOutOfRange { index: m, half })
        } else {
            Ok(())
        }
    }

    pub fn antenna_position(&self, m: i64) -> Result<CartesianPoint> {
        self.check_index(m)?;
        Ok(CartesianPoint::new(0.0, m as f64 * self.spacing))
    }

    pub fn positions(&self) -> Vec<CartesianPoint> {
        self.indices()
            .map(|m| CartesianPoint::new(0.0, m as f64 * self.spacing))
            .collect()
    }

    /// `sqrt(r² + (md)² - 2 r m d sin θ)`, evaluated as a Cartesian norm.
    pub fn antenna_user_distance(&self, user: &UserLocation, m: i64) -> Result<f64> {
        self.check_index(m)?;
        Ok(self.distance_unchecked(user, m))
    }

    fn distance_unchecked(&self, user: &UserLocation, m: i64) -> f64 {
        let (s, c) = user.theta.sin_cos();
        (user.r * c).hypot(user.r * s - m as f64 * self.spacing)
    }

    pub fn distances(&self, user: &UserLocation) -> Vec<f64> {
        self.indices()
            .map(|m| self.distance_unchecked(user, m))
            .collect()
    }
}
