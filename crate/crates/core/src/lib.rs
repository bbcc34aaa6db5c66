//! Near-field channel modelling and performance analysis for extremely
//! large-scale uniform arc arrays (XL-UAA) under the non-uniform spherical
//! wavefront model, with the aperture-matched uniform linear array as
//! baseline.

pub mod channel;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod numerics;
pub mod output;
pub mod regions;
pub mod scenario;
pub mod snr;
pub mod sweep;
pub mod units;
pub mod validate;

pub use channel::{
    channel_vector, mrc_beamformer, ula_channel_vector, mrc_snr_direct, mrc_snr_direct_ula, snr_with_beamformer,
    BeamformingVector, ChannelVector, LinkBudget,
};
pub use error::{Error, Result};
pub use geometry::{ArcArrayGeometry, ArcFrameCoords, CartesianPoint, UlaArrayGeometry, UserLocation};
pub use snr::{
    asymptotic_snr, small_support_convergence, large_aperture_convergence, mrc_snr_closed_form,
    mrc_snr_closed_form_sagitta, arctan_pair_u, ula_snr_closed_form, ClosedFormInputs, SmallSupportRow,
    LargeApertureRow,
};
pub use regions::{
    ddrayl_approx, ddrayl_exact, ddrayl_ula, max_phase_error, power_ratio, power_ratio_ula,
    region_profile, upd_numeric, upd_ula, PowerRatioMode, RegionRow,
};
pub use output::{emit_plot_script, parse_csv, render_csv, write_csv};
pub use scenario::{ScenarioKind, SweepScenario};
pub use sweep::{run_scenario, run_scenario_with_jobs, ArrayKind, Metric, SweepResult, SweepRow};
pub use validate::{validate_all, validate_with, ValidationReport};
