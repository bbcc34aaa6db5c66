//! The four figure-reproduction scenarios: 30 GHz carrier, 50 dB reference SNR.

use crate::scenario::{ArcSpec, GridSpacing, GridSpec, ScenarioKind, SweepScenario, UserSpec};

const FREQ_GHZ: f64 = 30.0;
const GAMMA0_DB: f64 = 50.0;

fn base(kind: ScenarioKind, output: &str, arc: ArcSpec, grid: GridSpec) -> SweepScenario {
    SweepScenario {
        kind,
        carrier_frequency_ghz: FREQ_GHZ,
        gamma0_bar_db: GAMMA0_DB,
        output: output.to_string(),
        include_ula: true,
        upsilon_th: 0.9,
        user: Some(UserSpec { r: 16.0, theta_deg: 30.0 }),
        arc,
        grid,
    }
}

/// Region boundaries of a 0.635 m aperture, 0.3 m support arc against the
/// matching linear array, θ from -90° to 90° in 1° steps.
pub fn fig2() -> SweepScenario {
    let mut s = base(
        ScenarioKind::RegionProfile,
        "fig2",
        ArcSpec { aperture: Some(0.635), support: Some(0.3), support_in_d: None },
        GridSpec { start: -90.0, stop: 90.0, step: Some(1.0), points: None, spacing: GridSpacing::Linear },
    );
    s.user = None;
    s
}

/// SNR versus aperture, 8 m to 200 m, support 800 d = 4 m.
pub fn fig3a() -> SweepScenario {
    base(
        ScenarioKind::ApertureSweep,
        "fig3a",
        ArcSpec { aperture: None, support: None, support_in_d: Some(800.0) },
        GridSpec { start: 8.0, stop: 200.0, step: None, points: Some(40), spacing: GridSpacing::Linear },
    )
}

/// SNR versus support at a 5 m aperture, log-spaced from 1e-6 D to D/2.
pub fn fig3b() -> SweepScenario {
    base(
        ScenarioKind::SupportSweep,
        "fig3b",
        ArcSpec { aperture: Some(5.0), support: None, support_in_d: None },
        GridSpec { start: 5e-6, stop: 2.5, step: None, points: Some(40), spacing: GridSpacing::Log },
    )
}

/// SNR versus user angle, 0° to 80°, for a 50 m aperture with 4 m support.
pub fn fig3c() -> SweepScenario {
    base(
        ScenarioKind::AngleSweep,
        "fig3c",
        ArcSpec { aperture: Some(50.0), support: Some(4.0), support_in_d: None },
        GridSpec { start: 0.0, stop: 80.0, step: Some(1.0), points: None, spacing: GridSpacing::Linear },
    )
}

pub fn all() -> Vec<SweepScenario> {
    vec![fig2(), fig3a(), fig3b(), fig3c()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_validate() {
        for s in all() {
            s.validate().unwrap();
        }
        assert_eq!(fig3a().resolved_support(), Some(4.0));
        assert_eq!(fig2().grid_values().unwrap().len(), 181);
    }
}
