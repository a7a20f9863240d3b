//! Experiment configuration: a single versioned TOML file, validated before
//! anything runs. Exponent gates are checked here so invalid sweeps fail as
//! configuration errors naming the violated inequality.

use crate::error::{LabError, Result};
use crate::frequency::exponents;
use crate::solver::Scheme;
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Trace,
    Vanish,
    Double,
    Moments,
    Exponents,
    Selftest,
}

impl ExperimentKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Trace => "trace",
            ExperimentKind::Vanish => "vanish",
            ExperimentKind::Double => "double",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Exponents => "exponents",
            ExperimentKind::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub points: usize,
    /// Ensemble runs enlarge the grid to points_per_mode * k (next power of
    /// two) when the data mode k demands it.
    #[serde(default = "default_points_per_mode")]
    pub points_per_mode: usize,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_points_per_mode() -> usize {
    8
}

fn default_max_points() -> usize {
    16384
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
}

fn default_steps() -> usize {
    400
}

fn default_scheme() -> Scheme {
    Scheme::Strang
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            steps: default_steps(),
            scheme: default_scheme(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientFamily {
    Zero,
    Constant,
    #[default]
    RandomTrig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSection {
    #[serde(default)]
    pub family: CoefficientFamily,
    #[serde(default)]
    pub constant_v: f64,
    #[serde(default = "default_mode_cap")]
    pub mode_cap: usize,
    #[serde(default = "default_rotation_rate")]
    pub rotation_rate: f64,
}

fn default_mode_cap() -> usize {
    8
}

fn default_rotation_rate() -> f64 {
    1.0
}

impl Default for CoefficientSection {
    fn default() -> Self {
        CoefficientSection {
            family: CoefficientFamily::default(),
            constant_v: 0.0,
            mode_cap: default_mode_cap(),
            rotation_rate: default_rotation_rate(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialFamily {
    /// cos(2 pi k x_1) + bed + seeded perturbation with k = max(1, round(kappa M)).
    #[default]
    ModeScaled,
    /// cos(2 pi k x_1) with fixed k.
    Mode,
    RandomTrig,
    /// Periodic localized bump e^{kappa (cos 2 pi (x - c) - 1)}.
    Bump,
    Constant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub family: InitialFamily,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_bed")]
    pub bed_amplitude: f64,
    #[serde(default = "default_perturbation")]
    pub perturbation: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
}

fn default_k() -> usize {
    1
}

fn default_kappa() -> f64 {
    0.5
}

fn default_bed() -> f64 {
    1e-3
}

fn default_perturbation() -> f64 {
    3e-4
}

fn default_amplitude() -> f64 {
    1.0
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            family: InitialFamily::default(),
            k: default_k(),
            kappa: default_kappa(),
            bed_amplitude: default_bed(),
            perturbation: default_perturbation(),
            amplitude: default_amplitude(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub m0: Vec<f64>,
    pub m1: Vec<f64>,
    /// Joint (p, q) spatial exponent pairs.
    pub pq: Vec<[f64; 2]>,
    /// Optional joint (p2, q2) temporal exponent pairs.
    #[serde(default)]
    pub p2q2: Vec<[f64; 2]>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
}

fn default_seeds() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSection {
    #[serde(default = "default_tau_span")]
    pub tau_span: f64,
    #[serde(default = "default_trace_samples")]
    pub samples: usize,
    #[serde(default = "default_spread_max")]
    pub spread_max: f64,
}

fn default_tau_span() -> f64 {
    2.0
}

fn default_trace_samples() -> usize {
    49
}

fn default_spread_max() -> f64 {
    10.0
}

impl Default for TraceSection {
    fn default() -> Self {
        TraceSection {
            tau_span: default_tau_span(),
            samples: default_trace_samples(),
            spread_max: default_spread_max(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum VanishFamily {
    #[default]
    Caloric,
    Solve,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VanishSection {
    #[serde(default)]
    pub family: VanishFamily,
    #[serde(default = "default_m_list")]
    pub m_list: Vec<usize>,
    /// Recovery tolerance for caloric oracles.
    #[serde(default = "default_recovery_tol")]
    pub recovery_tol: f64,
    /// Pairwise estimator agreement tolerance.
    #[serde(default = "default_agreement_tol")]
    pub agreement_tol: f64,
}

fn default_m_list() -> Vec<usize> {
    vec![0, 1, 2, 3, 4]
}

fn default_recovery_tol() -> f64 {
    0.05
}

fn default_agreement_tol() -> f64 {
    0.1
}

impl Default for VanishSection {
    fn default() -> Self {
        VanishSection {
            family: VanishFamily::default(),
            m_list: default_m_list(),
            recovery_tol: default_recovery_tol(),
            agreement_tol: default_agreement_tol(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleSection {
    pub delta0: Vec<f64>,
    #[serde(default = "default_times_per_run")]
    pub times_per_run: usize,
}

fn default_times_per_run() -> usize {
    5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentsSection {
    pub mu: Vec<Vec<usize>>,
    #[serde(default = "default_l_list")]
    pub l: Vec<u32>,
    pub t: Vec<f64>,
    /// Ball radius; omit for the full moment over R^n.
    #[serde(default)]
    pub radius: Option<f64>,
}

fn default_l_list() -> Vec<u32> {
    vec![0]
}

/// The whole experiment file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: Option<u64>,
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub coefficients: CoefficientSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub trace: TraceSection,
    #[serde(default)]
    pub vanish: VanishSection,
    #[serde(default)]
    pub double: Option<DoubleSection>,
    #[serde(default)]
    pub moments: Option<MomentsSection>,
}

impl ExperimentConfig {
    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)
            .map_err(|e| LabError::Config(format!("parse failure: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(LabError::Config(format!(
                "field 'version': expected {CONFIG_VERSION}, got {}",
                self.version
            )));
        }
        if !(1..=3).contains(&self.grid.n) {
            return Err(LabError::Config(format!(
                "field 'grid.n': must be 1, 2, or 3 (got {})",
                self.grid.n
            )));
        }
        if self.grid.points < 16 || !self.grid.points.is_power_of_two() {
            return Err(LabError::Config(format!(
                "field 'grid.points': power of two >= 16 required (got {})",
                self.grid.points
            )));
        }
        if self.solver.steps == 0 {
            return Err(LabError::Config("field 'solver.steps': must be positive".into()));
        }
        let needs_seed = matches!(self.coefficients.family, CoefficientFamily::RandomTrig)
            || matches!(
                self.initial.family,
                InitialFamily::RandomTrig | InitialFamily::ModeScaled
            );
        let needs_sweep = matches!(
            self.kind,
            ExperimentKind::Trace
                | ExperimentKind::Double
                | ExperimentKind::Exponents
                | ExperimentKind::Vanish
        );
        if needs_sweep {
            let sweep = self.sweep.as_ref().ok_or_else(|| {
                LabError::Config("field 'sweep': required for this experiment kind".into())
            })?;
            if sweep.m0.is_empty() || sweep.m1.is_empty() || sweep.pq.is_empty() {
                return Err(LabError::Config(
                    "field 'sweep': m0, m1, and pq must be nonempty".into(),
                ));
            }
            if sweep.seeds == 0 {
                return Err(LabError::Config("field 'sweep.seeds': must be positive".into()));
            }
            // gate every sweep point now
            for &m0 in &sweep.m0 {
                for &m1 in &sweep.m1 {
                    for pq in &sweep.pq {
                        if sweep.p2q2.is_empty() {
                            exponents(self.grid.n, pq[0], pq[1], m0, m1, None, None)?;
                        } else {
                            for p2q2 in &sweep.p2q2 {
                                exponents(
                                    self.grid.n,
                                    pq[0],
                                    pq[1],
                                    m0,
                                    m1,
                                    Some(p2q2[0]),
                                    Some(p2q2[1]),
                                )?;
                            }
                        }
                    }
                }
            }
        }
        if needs_seed
            && self.seed.is_none()
            && matches!(
                self.kind,
                ExperimentKind::Trace | ExperimentKind::Double | ExperimentKind::Vanish
            )
        {
            return Err(LabError::Config(
                "field 'seed': mandatory for random coefficient or data families".into(),
            ));
        }
        match self.kind {
            ExperimentKind::Double => {
                let d = self.double.as_ref().ok_or_else(|| {
                    LabError::Config("field 'double': required for kind = double".into())
                })?;
                if d.delta0.is_empty() {
                    return Err(LabError::Config("field 'double.delta0': nonempty list".into()));
                }
                for &d0 in &d.delta0 {
                    if !(d0 > 0.0 && d0 <= 0.5) {
                        return Err(LabError::Config(format!(
                            "field 'double.delta0': entries must lie in (0, 1/2] (got {d0})"
                        )));
                    }
                }
                if d.times_per_run == 0 {
                    return Err(LabError::Config(
                        "field 'double.times_per_run': must be positive".into(),
                    ));
                }
            }
            ExperimentKind::Moments => {
                let m = self.moments.as_ref().ok_or_else(|| {
                    LabError::Config("field 'moments': required for kind = moments".into())
                })?;
                if m.mu.is_empty() || m.t.is_empty() || m.l.is_empty() {
                    return Err(LabError::Config(
                        "field 'moments': mu, l, and t must be nonempty".into(),
                    ));
                }
                for t in &m.t {
                    if !(*t < 0.0) {
                        return Err(LabError::Config(format!(
                            "field 'moments.t': times must be negative (got {t})"
                        )));
                    }
                }
                for mu in &m.mu {
                    if mu.len() != self.grid.n {
                        return Err(LabError::Config(format!(
                            "field 'moments.mu': entry {mu:?} has length {} but grid.n = {}",
                            mu.len(),
                            self.grid.n
                        )));
                    }
                }
            }
            ExperimentKind::Vanish => {
                if self.vanish.m_list.is_empty() {
                    return Err(LabError::Config("field 'vanish.m_list': nonempty list".into()));
                }
                if self.vanish.m_list.iter().any(|&m| m > 6) {
                    return Err(LabError::Config(
                        "field 'vanish.m_list': caloric degrees are limited to 0..=6".into(),
                    ));
                }
            }
            ExperimentKind::Trace => {
                if self.trace.samples < 2 {
                    return Err(LabError::Config("field 'trace.samples': need >= 2".into()));
                }
                if !(self.trace.tau_span >= 2.0) {
                    return Err(LabError::Config(
                        "field 'trace.tau_span': limit extraction needs >= 2".into(),
                    ));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The seed with any CLI override applied; defaults to 0 for kinds that
    /// never draw randomness.
    pub fn effective_seed(&self, cli: Option<u64>) -> u64 {
        cli.or(self.seed).unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_TRACE: &str = r#"
version = 1
kind = "trace"
seed = 7

[grid]
n = 1
points = 64

[sweep]
m0 = [1.0]
m1 = [1.0]
pq = [[inf, inf]]
"#;

    #[test]
    fn parses_minimal_trace_config() {
        let cfg = ExperimentConfig::from_str(MINIMAL_TRACE).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Trace);
        assert_eq!(cfg.sweep.unwrap().pq[0][0], f64::INFINITY);
        assert_eq!(cfg.trace.samples, 49);
    }

    #[test]
    fn rejects_bad_version() {
        let bad = MINIMAL_TRACE.replace("version = 1", "version = 3");
        let err = ExperimentConfig::from_str(&bad).unwrap_err();
        assert!(err.to_string().contains("version"), "{err}");
    }

    #[test]
    fn rejects_gate_violation_in_sweep() {
        let bad = MINIMAL_TRACE.replace("pq = [[inf, inf]]", "pq = [[inf, 1.5]]");
        let err = ExperimentConfig::from_str(&bad).unwrap_err();
        assert!(err.to_string().contains("q > 2n"), "{err}");
    }

    #[test]
    fn rejects_missing_seed_for_random_families() {
        let bad = MINIMAL_TRACE.replace("seed = 7\n", "");
        let err = ExperimentConfig::from_str(&bad).unwrap_err();
        assert!(err.to_string().contains("seed"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields() {
        let bad = format!("{MINIMAL_TRACE}\nbogus = 1\n");
        assert!(ExperimentConfig::from_str(&bad).is_err());
    }

    #[test]
    fn moments_config_checks_dimensions() {
        let text = r#"
version = 1
kind = "moments"

[grid]
n = 1
points = 64

[moments]
mu = [[0], [2], [1, 1]]
t = [-1.0]
"#;
        let err = ExperimentConfig::from_str(text).unwrap_err();
        assert!(err.to_string().contains("moments.mu"), "{err}");
    }
}
