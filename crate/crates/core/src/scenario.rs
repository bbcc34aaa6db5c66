//! Declarative sweep descriptions, read from TOML.
//!
//! Lengths are metres unless the key says otherwise (`_in_d`, `_deg`,
//! `_ghz`, `_db`). A support given in units of `d` is resolved against the
//! half-wavelength spacing of the scenario's carrier.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::LinkBudget;
use crate::error::{Error, Result};
use crate::units::wavelength_from_ghz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Region boundaries versus user angle (degrees).
    RegionProfile,
    /// SNR versus aperture (m) at fixed support.
    ApertureSweep,
    /// SNR versus support (m) at fixed aperture.
    SupportSweep,
    /// SNR versus user angle (degrees) at fixed geometry.
    AngleSweep,
    /// Closed form against its limit: versus support when the aperture is
    /// fixed, versus aperture when the support is fixed.
    Convergence,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::RegionProfile => "region_profile",
            ScenarioKind::ApertureSweep => "aperture_sweep",
            ScenarioKind::SupportSweep => "support_sweep",
            ScenarioKind::AngleSweep => "angle_sweep",
            ScenarioKind::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridSpacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSpec {
    pub r: f64,
    #[serde(default)]
    pub theta_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aperture: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_in_d: Option<f64>,
}

/// Either `step` or `points` must be given, not both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: GridSpacing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepScenario {
    pub kind: ScenarioKind,
    pub carrier_frequency_ghz: f64,
    pub gamma0_bar_db: f64,
    /// File stem for the CSV and plot script.
    pub output: String,
    #[serde(default)]
    pub include_ula: bool,
    #[serde(default = "default_upsilon")]
    pub upsilon_th: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user: Option<UserSpec>,
    pub arc: ArcSpec,
    pub grid: GridSpec,
}

fn default_upsilon() -> f64 {
    0.9
}

fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(config(format!("`{name}` must be finite and positive, got {v}")))
    }
}

impl SweepScenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let scenario: Self = toml::from_str(text).map_err(|e| config(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config(e.to_string()))
    }

    pub fn wavelength(&self) -> f64 {
        wavelength_from_ghz(self.carrier_frequency_ghz)
    }

    /// Nominal element spacing `d = λ/2`.
    pub fn spacing(&self) -> f64 {
        self.wavelength() / 2.0
    }

    pub fn link(&self) -> Result<LinkBudget> {
        LinkBudget::from_reference_snr_db(self.gamma0_bar_db, self.wavelength())
    }

    /// Support in metres, whichever way it was written.
    pub fn resolved_support(&self) -> Option<f64> {
        self.arc
            .support
            .or(self.arc.support_in_d.map(|n| n * self.spacing()))
    }

    /// Name of the swept variable, with its unit.
    pub fn swept_variable(&self) -> &'static str {
        match self.kind {
            ScenarioKind::RegionProfile | ScenarioKind::AngleSweep => "theta_deg",
            ScenarioKind::ApertureSweep => "aperture_m",
            ScenarioKind::SupportSweep => "support_m",
            ScenarioKind::Convergence => {
                if self.arc.aperture.is_some() {
                    "support_m"
                } else {
                    "aperture_m"
                }
            }
        }
    }

    pub fn grid_values(&self) -> Result<Vec<f64>> {
        let g = &self.grid;
        if !(g.start.is_finite() && g.stop.is_finite()) {
            return Err(config("grid bounds must be finite"));
        }
        let values: Vec<f64> = match (g.step, g.points) {
            (Some(_), Some(_)) => return Err(config("grid: give `step` or `points`, not both")),
            (None, None) => return Err(config("grid: one of `step` or `points` is required")),
            (Some(step), None) => {
                if g.spacing == GridSpacing::Log {
                    return Err(config("grid: `step` is only meaningful with linear spacing"));
                }
                if !(step.is_finite() && step > 0.0) {
                    return Err(config("grid: `step` must be positive"));
                }
                let span = g.stop - g.start;
                if span < 0.0 {
                    Vec::new()
                } else {
                    let n = (span / step + 1e-9).floor() as usize + 1;
                    (0..n).map(|i| g.start + i as f64 * step).collect()
                }
            }
            (None, Some(n)) => match n {
                0 => Vec::new(),
                1 => vec![g.start],
                _ if g.stop <= g.start => Vec::new(),
                _ => {
                    let last = (n - 1) as f64;
                    match g.spacing {
                        GridSpacing::Linear => (0..n)
                            .map(|i| g.start + (g.stop - g.start) * i as f64 / last)
                            .collect(),
                        GridSpacing::Log => {
                            if g.start <= 0.0 {
                                return Err(config("grid: log spacing needs a positive start"));
                            }
                            let ratio = (g.stop / g.start).ln();
                            let mut v: Vec<f64> = (0..n)
                                .map(|i| g.start * (ratio * i as f64 / last).exp())
                                .collect();
                            v[n - 1] = g.stop;
                            v
                        }
                    }
                }
            },
        };
        if values.is_empty() {
            return Err(config("grid is empty"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(config("grid must be strictly increasing"));
        }
        Ok(values)
    }

    /// Structural and physical checks; all failures are config errors.
    pub fn validate(&self) -> Result<()> {
        positive("carrier_frequency_ghz", self.carrier_frequency_ghz)?;
        if !self.gamma0_bar_db.is_finite() {
            return Err(config("`gamma0_bar_db` must be finite"));
        }
        if !(self.upsilon_th > 0.0 && self.upsilon_th < 1.0) {
            return Err(config(format!("`upsilon_th` must lie in (0, 1), got {}", self.upsilon_th)));
        }
        if self.output.trim().is_empty() || self.output.contains(['/', '\\']) {
            return Err(config("`output` must be a plain file stem"));
        }
        if self.arc.support.is_some() && self.arc.support_in_d.is_some() {
            return Err(config("arc: give `support` or `support_in_d`, not both"));
        }
        if let Some(a) = self.arc.aperture {
            positive("arc.aperture", a)?;
        }
        if let Some(l) = self.resolved_support() {
            positive("arc.support", l)?;
        }
        let grid = self.grid_values()?;
        let (first, last) = (grid[0], grid[grid.len() - 1]);
        let has_aperture = self.arc.aperture.is_some();
        let has_support = self.resolved_support().is_some();

        let needs_user = self.kind != ScenarioKind::RegionProfile;
        match (&self.user, needs_user) {
            (None, true) => return Err(config("`user` table is required for this kind")),
            (Some(u), _) => {
                positive("user.r", u.r)?;
                if u.theta_deg.is_nan() || u.theta_deg.abs() > 90.0 {
                    return Err(config("`user.theta_deg` must lie in [-90, 90]"));
                }
            }
            _ => {}
        }

        match self.kind {
            ScenarioKind::RegionProfile | ScenarioKind::AngleSweep => {
                if !(has_aperture && has_support) {
                    return Err(config("arc aperture and support are both required"));
                }
                if first < -90.0 || last > 90.0 {
                    return Err(config("angle grid must lie in [-90, 90] degrees"));
                }
            }
            ScenarioKind::ApertureSweep => {
                if has_aperture || !has_support {
                    return Err(config("aperture sweep: set the support and leave the aperture unset"));
                }
                let support = self.resolved_support().unwrap_or_default();
                if first < 2.0 * support {
                    return Err(config(format!(
                        "aperture sweep must start at or above twice the support ({} m)",
                        2.0 * support
                    )));
                }
            }
            ScenarioKind::SupportSweep => {
                if !has_aperture || has_support {
                    return Err(config("support sweep: set the aperture and leave the support unset"));
                }
                let aperture = self.arc.aperture.unwrap_or_default();
                if first <= 0.0 || last > aperture / 2.0 {
                    return Err(config("support grid must lie in (0, aperture/2]"));
                }
            }
            ScenarioKind::Convergence => match (has_aperture, has_support) {
                (true, false) => {
                    let aperture = self.arc.aperture.unwrap_or_default();
                    if first <= 0.0 || last > aperture / 2.0 {
                        return Err(config("support grid must lie in (0, aperture/2]"));
                    }
                }
                (false, true) => {
                    let support = self.resolved_support().unwrap_or_default();
                    if first < 2.0 * support {
                        return Err(config("aperture grid must start at or above twice the support"));
                    }
                }
                _ => return Err(config("convergence: fix exactly one of aperture or support")),
            },
        }
        Ok(())
    }
}
