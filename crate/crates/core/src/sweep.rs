//! Scenario execution. Grid points are evaluated independently (optionally
//! on a worker pool) and assembled strictly in grid order, so results do not
//! depend on the number of workers.

use rayon::prelude::*;

use crate::channel::{mrc_snr_direct, mrc_snr_direct_ula, LinkBudget};
use crate::error::{Error, Result};
use crate::geometry::{ArcArrayGeometry, UlaArrayGeometry, UserLocation};
use crate::regions::{ddrayl_exact, ddrayl_ula, upd_numeric, upd_ula, PowerRatioMode};
use crate::scenario::{ScenarioKind, SweepScenario};
use crate::snr::{asymptotic_snr, mrc_snr_closed_form, ula_snr_closed_form, ClosedFormInputs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    SnrDirect,
    SnrClosedForm,
    SnrAsymptote,
    Ddrayl,
    Upd,
    ClosedForm,
    Limit,
    Gap,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::SnrDirect => "snr_direct",
            Metric::SnrClosedForm => "snr_closed_form",
            Metric::SnrAsymptote => "snr_asymptote",
            Metric::Ddrayl => "ddrayl",
            Metric::Upd => "upd",
            Metric::ClosedForm => "closed_form",
            Metric::Limit => "limit",
            Metric::Gap => "gap",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == name)
    }

    pub const ALL: [Metric; 8] = [
        Metric::SnrDirect,
        Metric::SnrClosedForm,
        Metric::SnrAsymptote,
        Metric::Ddrayl,
        Metric::Upd,
        Metric::ClosedForm,
        Metric::Limit,
        Metric::Gap,
    ];

    /// Plot grouping: metrics in one family share an image.
    pub fn family(self) -> &'static str {
        match self {
            Metric::SnrDirect | Metric::SnrClosedForm | Metric::SnrAsymptote => "snr",
            Metric::Ddrayl => "ddrayl",
            Metric::Upd => "upd",
            Metric::ClosedForm | Metric::Limit => "convergence",
            Metric::Gap => "gap",
        }
    }

    /// Metrics emitted for a scenario kind, in row order.
    pub fn registry(kind: ScenarioKind) -> &'static [Metric] {
        match kind {
            ScenarioKind::RegionProfile => &[Metric::Ddrayl, Metric::Upd],
            ScenarioKind::ApertureSweep | ScenarioKind::SupportSweep | ScenarioKind::AngleSweep => {
                &[Metric::SnrDirect, Metric::SnrClosedForm, Metric::SnrAsymptote]
            }
            ScenarioKind::Convergence => &[Metric::ClosedForm, Metric::Limit, Metric::Gap],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrayKind {
    Uaa,
    Ula,
}

impl ArrayKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrayKind::Uaa => "UAA",
            ArrayKind::Ula => "ULA",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "UAA" => Some(ArrayKind::Uaa),
            "ULA" => Some(ArrayKind::Ula),
            _ => None,
        }
    }
}

/// Arc geometry as resolved at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedGeometry {
    pub count: usize,
    pub radius: f64,
    pub central_angle: f64,
    pub support: f64,
    pub aperture: f64,
    pub actual_spacing: f64,
}

impl From<&ArcArrayGeometry> for ResolvedGeometry {
    fn from(g: &ArcArrayGeometry) -> Self {
        Self {
            count: g.count(),
            radius: g.radius(),
            central_angle: g.central_angle(),
            support: g.support(),
            aperture: g.aperture(),
            actual_spacing: g.actual_spacing(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub index: usize,
    pub swept: f64,
    pub geometry: Option<ResolvedGeometry>,
    /// `ok`, or `;`-joined `<array>.<metric>:<reason>` entries.
    pub status: String,
    /// The arc closed form was replaced by direct summation because it was
    /// poorly conditioned at this point.
    pub closed_form_fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub swept: f64,
    pub metric: Metric,
    pub array: ArrayKind,
    /// NaN when the point was infeasible for this metric.
    pub linear: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub metadata: Vec<(String, String)>,
    pub points: Vec<PointRecord>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Values of one series in grid order.
    pub fn series(&self, metric: Metric, array: ArrayKind) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.metric == metric && r.array == array)
            .map(|r| (r.swept, r.linear))
            .collect()
    }

    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Runs a scenario on the ambient rayon pool.
pub fn run_scenario(scenario: &SweepScenario) -> Result<SweepResult> {
    scenario.validate()?;
    let grid = scenario.grid_values()?;
    let context = Context::new(scenario)?;
    let evaluated: Vec<(PointRecord, Vec<SweepRow>)> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &x)| context.evaluate(i, x))
        .collect();
    let mut points = Vec::with_capacity(evaluated.len());
    let mut rows = Vec::new();
    for (point, point_rows) in evaluated {
        points.push(point);
        rows.extend(point_rows);
    }
    Ok(SweepResult {
        metadata: metadata(scenario, grid.len()),
        points,
        rows,
    })
}

/// Runs a scenario on a dedicated pool of `jobs` workers.
pub fn run_scenario_with_jobs(scenario: &SweepScenario, jobs: usize) -> Result<SweepResult> {
    if jobs == 0 {
        return Err(Error::Config("job count must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_scenario(scenario))
}

fn metadata(s: &SweepScenario, points: usize) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = vec![
        ("kind".into(), s.kind.as_str().into()),
        ("swept".into(), s.swept_variable().into()),
        ("carrier_frequency_ghz".into(), s.carrier_frequency_ghz.to_string()),
        ("wavelength_m".into(), s.wavelength().to_string()),
        ("spacing_m".into(), s.spacing().to_string()),
        ("gamma0_bar_db".into(), s.gamma0_bar_db.to_string()),
    ];
    if let Some(u) = &s.user {
        m.push(("user_r_m".into(), u.r.to_string()));
        m.push(("user_theta_deg".into(), u.theta_deg.to_string()));
    }
    if let Some(a) = s.arc.aperture {
        m.push(("aperture_m".into(), a.to_string()));
    }
    if let Some(l) = s.resolved_support() {
        m.push(("support_m".into(), l.to_string()));
    }
    if let Some(n) = s.arc.support_in_d {
        m.push(("support_in_d".into(), n.to_string()));
    }
    let spacing = match s.grid.spacing {
        crate::scenario::GridSpacing::Linear => "linear",
        crate::scenario::GridSpacing::Log => "log",
    };
    m.extend([
        ("grid_start".into(), s.grid.start.to_string()),
        ("grid_stop".into(), s.grid.stop.to_string()),
        ("grid_points".into(), points.to_string()),
        ("grid_spacing".into(), spacing.into()),
        ("include_ula".into(), s.include_ula.to_string()),
        ("upsilon_th".into(), s.upsilon_th.to_string()),
        ("output".into(), s.output.clone()),
    ]);
    m
}

/// Scenario data shared by all grid points.
struct Context<'a> {
    scenario: &'a SweepScenario,
    link: LinkBudget,
    arrays: Vec<ArrayKind>,
}

struct Outcome {
    values: Vec<f64>,
    failures: Vec<String>,
    fallback: bool,
}

impl Outcome {
    fn new() -> Self {
        Self { values: Vec::new(), failures: Vec::new(), fallback: false }
    }

    fn push(&mut self, array: ArrayKind, metric: Metric, value: Result<f64>) {
        match value {
            Ok(v) => self.values.push(v),
            Err(e) => {
                self.failures
                    .push(format!("{}.{}:{}", array.as_str(), metric.as_str(), e.reason_code()));
                self.values.push(f64::NAN);
            }
        }
    }
}

impl<'a> Context<'a> {
    fn new(scenario: &'a SweepScenario) -> Result<Self> {
        let arrays = if scenario.include_ula && scenario.kind != ScenarioKind::Convergence {
            vec![ArrayKind::Uaa, ArrayKind::Ula]
        } else {
            vec![ArrayKind::Uaa]
        };
        Ok(Self { scenario, link: scenario.link()?, arrays })
    }

    /// (aperture, support, user) at swept value `x`.
    fn resolve(&self, x: f64) -> Result<(f64, f64, Option<UserLocation>)> {
        let s = self.scenario;
        let user_at = |deg: f64| -> Result<Option<UserLocation>> {
            match &s.user {
                Some(u) => Ok(Some(UserLocation::from_degrees(u.r, deg)?)),
                None => Ok(None),
            }
        };
        let fixed_theta = s.user.as_ref().map_or(0.0, |u| u.theta_deg);
        let aperture = s.arc.aperture;
        let support = s.resolved_support();
        Ok(match s.kind {
            ScenarioKind::RegionProfile | ScenarioKind::AngleSweep => (
                aperture.unwrap_or_default(),
                support.unwrap_or_default(),
                user_at(x)?,
            ),
            ScenarioKind::ApertureSweep => (x, support.unwrap_or_default(), user_at(fixed_theta)?),
            ScenarioKind::SupportSweep => (aperture.unwrap_or_default(), x, user_at(fixed_theta)?),
            ScenarioKind::Convergence => match aperture {
                Some(d) => (d, x, user_at(fixed_theta)?),
                None => (x, support.unwrap_or_default(), user_at(fixed_theta)?),
            },
        })
    }

    fn evaluate(&self, index: usize, x: f64) -> (PointRecord, Vec<SweepRow>) {
        let metrics = Metric::registry(self.scenario.kind);
        let mut outcome = Outcome::new();
        let mut geometry = None;
        match self.resolve(x).and_then(|(d, l, u)| {
            let geom = ArcArrayGeometry::from_aperture_support(d, l, self.link.wavelength())?;
            Ok((geom, u))
        }) {
            Ok((geom, user)) => {
                geometry = Some(ResolvedGeometry::from(&geom));
                let theta = x.to_radians();
                for &array in &self.arrays {
                    for &metric in metrics {
                        let value = self.metric(&geom, user.as_ref(), theta, array, metric, &mut outcome);
                        outcome.push(array, metric, value);
                    }
                }
            }
            Err(e) => {
                for &array in &self.arrays {
                    for &metric in metrics {
                        outcome.push(array, metric, Err(e.clone()));
                    }
                }
                outcome.failures = vec![format!("geometry:{}", e.reason_code())];
            }
        }
        let mut values = outcome.values.into_iter();
        let rows = self
            .arrays
            .iter()
            .flat_map(|&array| metrics.iter().map(move |&metric| (array, metric)))
            .map(|(array, metric)| SweepRow {
                swept: x,
                metric,
                array,
                linear: values.next().unwrap_or(f64::NAN),
            })
            .collect();
        let status = if outcome.failures.is_empty() {
            "ok".to_string()
        } else {
            outcome.failures.join(";")
        };
        let point = PointRecord {
            index,
            swept: x,
            geometry,
            status,
            closed_form_fallback: outcome.fallback,
        };
        (point, rows)
    }

    fn metric(
        &self,
        geom: &ArcArrayGeometry,
        user: Option<&UserLocation>,
        theta: f64,
        array: ArrayKind,
        metric: Metric,
        outcome: &mut Outcome,
    ) -> Result<f64> {
        let lb = &self.link;
        let d = self.scenario.spacing();
        let need_user = || user.ok_or_else(|| Error::Config("scenario has no user".into()));
        match (array, metric) {
            (ArrayKind::Uaa, Metric::Ddrayl) => ddrayl_exact(geom, theta, None),
            (ArrayKind::Uaa, Metric::Upd) => {
                upd_numeric(geom, theta, self.scenario.upsilon_th, PowerRatioMode::ChordEnd, None)
            }
            (ArrayKind::Ula, Metric::Ddrayl) => ddrayl_ula(geom.aperture(), theta, lb.wavelength()),
            (ArrayKind::Ula, Metric::Upd) => {
                upd_ula(geom.aperture(), theta, self.scenario.upsilon_th, lb.wavelength())
            }
            (ArrayKind::Uaa, Metric::SnrDirect) => mrc_snr_direct(geom, need_user()?, lb),
            (ArrayKind::Uaa, Metric::SnrClosedForm) | (ArrayKind::Uaa, Metric::ClosedForm) => {
                let u = need_user()?;
                if ClosedFormInputs::new(geom, u, lb)?.ill_conditioned() {
                    outcome.fallback = true;
                    mrc_snr_direct(geom, u, lb)
                } else {
                    mrc_snr_closed_form(geom, u, lb)
                }
            }
            (ArrayKind::Uaa, Metric::SnrAsymptote) => asymptotic_snr(need_user()?, geom.support(), d, lb),
            (ArrayKind::Ula, Metric::SnrDirect) => {
                let ula = UlaArrayGeometry::from_aperture(geom.aperture(), lb.wavelength())?;
                mrc_snr_direct_ula(&ula, need_user()?, lb)
            }
            (ArrayKind::Ula, Metric::SnrClosedForm) => {
                let ula = UlaArrayGeometry::from_aperture(geom.aperture(), lb.wavelength())?;
                ula_snr_closed_form(ula.count(), ula.spacing(), need_user()?, lb)
            }
            (ArrayKind::Ula, Metric::SnrAsymptote) => asymptotic_snr(need_user()?, 0.0, d, lb),
            (ArrayKind::Uaa, Metric::Limit) => self.limit(geom, need_user()?),
            (ArrayKind::Uaa, Metric::Gap) => {
                let u = need_user()?;
                let closed = mrc_snr_closed_form(geom, u, lb)?;
                Ok((closed / self.limit(geom, u)? - 1.0).abs())
            }
            (ArrayKind::Ula, Metric::ClosedForm | Metric::Limit | Metric::Gap) => {
                Err(Error::Config("convergence rows are arc-only".into()))
            }
        }
    }

    /// Linear-array closed form with the arc's M and d when the aperture is
    /// fixed; the many-antenna asymptote when the support is fixed.
    fn limit(&self, geom: &ArcArrayGeometry, user: &UserLocation) -> Result<f64> {
        if self.scenario.arc.aperture.is_some() {
            ula_snr_closed_form(geom.count(), geom.spacing(), user, &self.link)
        } else {
            asymptotic_snr(user, geom.support(), self.scenario.spacing(), &self.link)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scenario::{GridSpacing, GridSpec};

    #[test]
    fn row_count_invariant() {
        let mut s = fixtures::fig3c();
        s.grid = GridSpec { start: 0.0, stop: 80.0, step: Some(40.0), points: None, spacing: GridSpacing::Linear };
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.points.len(), 3);
        assert_eq!(r.rows.len(), 3 * 3 * 2);
        assert_eq!(r.rows[0].array, ArrayKind::Uaa);
        assert_eq!(r.rows[0].metric, Metric::SnrDirect);
        assert_eq!(r.rows[3].array, ArrayKind::Ula);
        assert_eq!(r.points[1].status, "ok");
        // r cos 80° < L: the many-antenna limit does not exist there.
        assert_eq!(r.points[2].status, "UAA.snr_asymptote:user_behind_arc_middle");
    }

    #[test]
    fn fig2_has_four_series() {
        let mut s = fixtures::fig2();
        s.grid = GridSpec { start: -90.0, stop: 90.0, step: Some(45.0), points: None, spacing: GridSpacing::Linear };
        let r = run_scenario(&s).unwrap();
        let mut series: Vec<(Metric, ArrayKind)> = r.rows.iter().map(|r| (r.metric, r.array)).collect();
        series.sort();
        series.dedup();
        assert_eq!(series.len(), 4);
    }

    #[test]
    fn infeasible_points_are_recorded() {
        let mut s = fixtures::fig3c();
        s.grid = GridSpec { start: 70.0, stop: 90.0, step: Some(20.0), points: None, spacing: GridSpacing::Linear };
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.points[0].status, "ok");
        assert!(r.points[1].status.contains("ULA.snr_closed_form:grazing_angle"));
        let ula_closed = r.series(Metric::SnrClosedForm, ArrayKind::Ula);
        assert!(ula_closed[1].1.is_nan());
        // At 90° the user is inside the arc circle; the linear array is fine.
        assert!(r.points[1].status.contains("UAA.snr_direct:user_inside_arc"));
        let ula_direct = r.series(Metric::SnrDirect, ArrayKind::Ula);
        assert!(ula_direct[1].1.is_finite());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let mut s = fixtures::fig3b();
        s.grid.points = Some(6);
        let a = run_scenario_with_jobs(&s, 1).unwrap();
        let b = run_scenario_with_jobs(&s, 4).unwrap();
        assert_eq!(a, b);
        assert!(run_scenario_with_jobs(&s, 0).is_err());
    }

    #[test]
    fn convergence_modes() {
        let text = r#"
kind = "convergence"
carrier_frequency_ghz = 30.0
gamma0_bar_db = 50.0
output = "conv"
[user]
r = 16.0
theta_deg = 30.0
[arc]
aperture = 5.0
[grid]
start = 5e-6
stop = 2.5
points = 5
spacing = "log"
"#;
        let s = SweepScenario::from_toml_str(text).unwrap();
        let r = run_scenario(&s).unwrap();
        let gaps = r.series(Metric::Gap, ArrayKind::Uaa);
        assert!(gaps[0].1 < 1e-3);
        assert!(gaps.windows(2).all(|w| w[1].1 > w[0].1));
        assert_eq!(r.rows.len(), 5 * 3);
    }
}
