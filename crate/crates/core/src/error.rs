use thiserror::Error;

/// Errors raised by the geometry, channel, analysis and sweep layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("antenna count {0} must be odd")]
    NonOddCount(usize),
    #[error("antenna count {count} is below the minimum of {min}")]
    TooFewAntennas { count: usize, min: usize },
    #[error("central angle {0} rad exceeds pi (arc would wrap past a semicircle)")]
    AlphaExceedsPi(f64),
    #[error("arc radius {radius} m is too small for spacing {spacing} m")]
    RadiusTooSmall { radius: f64, spacing: f64 },
    #[error("arc support {support} m exceeds half the aperture {aperture} m")]
    SupportExceedsSemicircle { support: f64, aperture: f64 },
    #[error("arc support {0} m must be strictly positive (use a linear array instead)")]
    DegenerateSupport(f64),
    #[error("realized chord spacing {actual} m deviates from {nominal} m by more than 0.5%")]
    SpacingOutOfTolerance { actual: f64, nominal: f64 },
    #[error("antenna index {index} outside [-{half}, {half}]")]
    IndexOutOfRange { index: i64, half: i64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("user is not outside the arc circle (g = {g} m, r0 = {radius} m)")]
    UserInsideArc { g: f64, radius: f64 },
    #[error("channel vector is identically zero")]
    ZeroChannel,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degenerate radii: need x > y > 0, got x = {x}, y = {y}")]
    DegenerateRadii { x: f64, y: f64 },
    #[error("support {support} m outside (0, 2y) for y = {radius} m")]
    SupportOutOfRange { support: f64, radius: f64 },
    #[error("closed-form SNR needs at least three antennas")]
    SingleAntenna,
    #[error("user angle {0} rad is at or beyond grazing incidence")]
    GrazingAngle(f64),
    #[error("user projection r cos(theta) = {projection} m does not exceed the support {support} m")]
    UserBehindArcMiddle { projection: f64, support: f64 },
    #[error("bracket failure: {0}")]
    BracketFailure(String),
    #[error("antiderivative validity violated: a^2 - b^2 - c^2 = {0} <= 0")]
    ValidityViolation(f64),
    #[error("|x| = {0} leaves the principal branch (-pi, pi)")]
    BranchOverflow(f64),
    #[error("quadrature tolerance {tol} not met (estimated error {estimate}) after {intervals} subintervals")]
    ToleranceNotMet {
        tol: f64,
        estimate: f64,
        intervals: usize,
    },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("iteration cap {0} reached before convergence")]
    IterationCap(usize),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable tag used as the status of infeasible sweep points.
    pub fn reason_code(&self) -> &'static str {
        match self {
            Error::NonOddCount(_) => "non_odd_count",
            Error::TooFewAntennas { .. } => "too_few_antennas",
            Error::AlphaExceedsPi(_) => "alpha_exceeds_pi",
            Error::RadiusTooSmall { .. } => "radius_too_small",
            Error::SupportExceedsSemicircle { .. } => "support_exceeds_semicircle",
            Error::DegenerateSupport(_) => "degenerate_support",
            Error::SpacingOutOfTolerance { .. } => "spacing_out_of_tolerance",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::UserInsideArc { .. } => "user_inside_arc",
            Error::ZeroChannel => "zero_channel",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegenerateRadii { .. } => "degenerate_radii",
            Error::SupportOutOfRange { .. } => "support_out_of_range",
            Error::SingleAntenna => "single_antenna",
            Error::GrazingAngle(_) => "grazing_angle",
            Error::UserBehindArcMiddle { .. } => "user_behind_arc_middle",
            Error::BracketFailure(_) => "bracket_failure",
            Error::ValidityViolation(_) => "validity_violation",
            Error::BranchOverflow(_) => "branch_overflow",
            Error::ToleranceNotMet { .. } => "tolerance_not_met",
            Error::NoSignChange { .. } => "no_sign_change",
            Error::IterationCap(_) => "iteration_cap",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}


pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}
