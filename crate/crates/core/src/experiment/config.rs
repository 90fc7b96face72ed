use super::ExperimentError;
use crate::background::{BackgroundField, BackgroundTerm, WaveVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SpectralCheck,
    NormalformCheck,
    ConstraintCheck,
    Evolve,
    AbscissaSweep,
    ScalingStudy,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SpectralCheck => "spectral-check",
            Self::NormalformCheck => "normalform-check",
            Self::ConstraintCheck => "constraint-check",
            Self::Evolve => "evolve",
            Self::AbscissaSweep => "abscissa-sweep",
            Self::ScalingStudy => "scaling-study",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    #[default]
    Random,
    Zero,
}

/// Every threshold used by a check. Missing keys take these defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eigenvalue_rel: f64,
    pub eigenvector_l2: f64,
    pub structure: f64,
    pub taylor_formula: f64,
    pub resonance: f64,
    pub commutator: f64,
    pub constraint: f64,
    pub invariance: f64,
    pub semigroup: f64,
    pub decay_rate_rel: f64,
    pub grid_divergence: f64,
    pub oracle: f64,
    pub decomposition: f64,
    pub trend_slack: f64,
    pub c2_slope_min: f64,
    pub d3_slope_min: f64,
    pub d3_slope_max: f64,
    pub gap_ratio: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigenvalue_rel: 1e-8,
            eigenvector_l2: 1e-6,
            structure: 1e-12,
            taylor_formula: 1e-10,
            resonance: 1e-8,
            commutator: 1e-8,
            constraint: 1e-7,
            invariance: 1e-8,
            semigroup: 1e-10,
            decay_rate_rel: 1e-6,
            grid_divergence: 1e-6,
            oracle: 1e-11,
            decomposition: 1e-12,
            trend_slack: 0.1,
            c2_slope_min: 0.7,
            d3_slope_min: 1.0,
            d3_slope_max: 1.7,
            gap_ratio: 5.0,
        }
    }
}

fn default_background() -> Vec<BackgroundTerm> {
    vec![
        BackgroundTerm::cos(1, 1, 1.0),
        BackgroundTerm::sin(2, 1, 1.0),
    ]
}
fn default_truncation() -> usize {
    64
}
fn default_band() -> usize {
    8
}
fn default_modes() -> Vec<[i64; 2]> {
    vec![[1, 0]]
}
fn default_samples() -> usize {
    50
}
fn default_true() -> bool {
    true
}
fn default_output_dir() -> String {
    "out".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default = "default_background")]
    pub background: Vec<BackgroundTerm>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_band")]
    pub band: usize,
    /// Size `K` of the eigenbasis; defaults to the band size.
    #[serde(default)]
    pub basis_size: Option<usize>,
    #[serde(default = "default_modes")]
    pub modes: Vec<[i64; 2]>,
    /// Whether evolve runs add `−ξ` with conjugate data for each mode.
    #[serde(default = "default_true")]
    pub conjugate_pairs: bool,
    #[serde(default)]
    pub eps_sweep: Vec<f64>,
    /// Band sizes for the band-projector scalings of scaling-study.
    #[serde(default)]
    pub band_sweep: Vec<usize>,
    /// Band sizes for the high-mode gap of scaling-study.
    #[serde(default)]
    pub gap_sweep: Vec<usize>,
    /// Also sweep with the geostrophic correction removed (abscissa-sweep).
    #[serde(default)]
    pub geostrophic_demo: bool,
    #[serde(default)]
    pub t_final: Option<f64>,
    #[serde(default)]
    pub output_step: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_output_dir")]
    pub output_dir: String,
}

fn config_error(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.truncation < 4 * self.band + 8 {
            return Err(config_error(format!(
                "truncation M = {} must satisfy M >= 4N + 8 = {}",
                self.truncation,
                4 * self.band + 8
            )));
        }
        for (name, sweep) in [
            ("band_sweep", &self.band_sweep),
            ("gap_sweep", &self.gap_sweep),
        ] {
            if let Some(&nmax) = sweep.iter().max() {
                if self.truncation < 4 * nmax + 8 {
                    return Err(config_error(format!(
                        "{name} reaches N = {nmax}; needs M >= {}",
                        4 * nmax + 8
                    )));
                }
            }
            if sweep.contains(&0) {
                return Err(config_error(format!("{name} entries must be positive")));
            }
        }
        if let Some(k) = self.basis_size {
            if k < self.band || 4 * k > self.truncation {
                return Err(config_error(format!(
                    "basis_size K = {k} must satisfy N <= K <= M/4"
                )));
            }
        }
        if self.modes.iter().any(|m| m[0] == 0 && m[1] == 0) {
            return Err(config_error("modes must be nonzero wavevectors"));
        }
        if let Some(t) = self.t_final {
            if !(t > 0.0 && t.is_finite()) {
                return Err(config_error("t_final must be positive"));
            }
        }
        if let Some(h) = self.output_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(config_error("output_step must be positive"));
            }
        }
        for &eps in &self.eps_sweep {
            eps_mode(eps)?;
        }
        self.background_field()?;
        match self.kind {
            ExperimentKind::Evolve if self.t_final.is_none() => {
                Err(config_error("evolve needs t_final"))
            }
            ExperimentKind::ScalingStudy
                if self.eps_sweep.len() < 2
                    && self.band_sweep.len() < 2
                    && self.gap_sweep.len() < 2 =>
            {
                Err(config_error(
                    "scaling-study needs a sweep with at least two values",
                ))
            }
            ExperimentKind::AbscissaSweep if self.modes.len() < 3 => {
                Err(config_error("abscissa-sweep needs at least three modes"))
            }
            _ => Ok(()),
        }
    }

    pub fn background_field(&self) -> Result<BackgroundField, ExperimentError> {
        BackgroundField::new(&self.background).map_err(|e| config_error(e.to_string()))
    }

    pub fn waves(&self) -> Vec<WaveVector> {
        self.modes.iter().map(|m| WaveVector(m[0], m[1])).collect()
    }

    pub fn basis_size(&self) -> usize {
        self.basis_size.unwrap_or(self.band)
    }

    pub fn time_grid(&self) -> (usize, f64) {
        let t = self.t_final.unwrap_or(0.0);
        let h = self.output_step.unwrap_or(t / 10.0);
        let steps = (t / h).round().max(1.0) as usize;
        (steps, t / steps as f64)
    }
}

/// `ξ = (1/ε, 0)`, which must lie on the lattice `2πZ`.
pub fn eps_mode(eps: f64) -> Result<WaveVector, ExperimentError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(config_error(format!("eps = {eps} must be positive")));
    }
    let m = 1.0 / (2.0 * PI * eps);
    let r = m.round();
    if r < 1.0 || (m - r).abs() > 1e-6 * r {
        return Err(config_error(format!(
            "eps = {eps} is not 1/(2πm) for an integer m >= 1"
        )));
    }
    Ok(WaveVector(r as i64, 0))
}
