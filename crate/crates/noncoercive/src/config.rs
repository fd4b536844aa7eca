//! Run configuration.
//!
//! The file format is TOML restricted to flat `key = value` pairs grouped in
//! the sections `problem`, `mesh`, `basis`, `time`, `checks`, `output`,
//! `sharpness` and `convergence`; both `[section]` tables and dotted keys
//! (`time.steps = 200`) are accepted. Every key is optional.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::presets::PRESETS;
use crate::ConfigError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub mesh: MeshConfig,
    pub basis: BasisConfig,
    pub time: TimeConfig,
    pub checks: ChecksConfig,
    pub output: OutputConfig,
    pub sharpness: SharpnessConfig,
    pub convergence: ConvergenceConfig,
}

/// Problem data. Apart from `preset` and `final_time`, keys only apply to the
/// `custom` preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemConfig {
    pub preset: String,
    pub final_time: Option<f64>,
    /// `interval(a,b)`, `rectangle(ax,bx,ay,by)` or `disk(segments)`.
    pub domain: String,
    /// `identity`, `degenerate_disk` or `diag(d1,d2)`.
    pub principal: String,
    /// `none`, `all`, or a comma list of `left`, `right`, `bottom`, `top`.
    pub dirichlet: String,
    /// Constant `ãₗ` as `[re, im]` pairs.
    pub first_order: Vec<[f64; 2]>,
    pub a0: [f64; 2],
    pub b0: [f64; 2],
    pub b1: f64,
    /// `zero`, `const(re,im)` or `csv:PATH` (columns `x[,y],re,im`).
    pub initial: String,
    /// Stationary source, same syntax as `initial`.
    pub source: String,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            preset: "heat".into(),
            final_time: None,
            domain: "interval(0,1)".into(),
            principal: "identity".into(),
            dirichlet: "all".into(),
            first_order: Vec::new(),
            a0: [0.0, 0.0],
            b0: [0.0, 0.0],
            b1: 1.0,
            initial: "zero".into(),
            source: "zero".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    /// Cells per unit length (rings on the disk); each preset has its own default.
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisConfig {
    /// Number of eigenvectors; `0` takes every free degree of freedom.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    pub steps: usize,
    pub theta: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { steps: 100, theta: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksConfig {
    pub bounds: bool,
    pub uniqueness: bool,
    pub energy_identity: bool,
    pub continuity: bool,
    /// Random vectors drawn by `check`.
    pub random_vectors: usize,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        Self {
            bounds: true,
            uniqueness: true,
            energy_identity: true,
            continuity: true,
            random_vectors: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub solution: bool,
    pub eigenvectors: bool,
    pub mesh: bool,
    pub matrices: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: "out".into(),
            solution: true,
            eigenvectors: false,
            mesh: false,
            matrices: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SharpnessConfig {
    /// With only `epsilon` given, `A(ε)` alone is reported; with neither,
    /// `s` is [`DEFAULT_S`].
    pub s: Option<f64>,
    /// Defaults to the witness `(2s - 1)/2`.
    pub epsilon: Option<f64>,
    pub terms: usize,
    /// Modes in the discrete cross-validation; `0` skips it.
    pub cross_terms: usize,
    pub cross_segments: usize,
    pub cross_rings: usize,
}

/// Smoothness index used when neither `s` nor `epsilon` is configured.
pub const DEFAULT_S: f64 = 0.75;

impl SharpnessConfig {
    /// `s` after applying [`DEFAULT_S`].
    pub fn effective_s(&self) -> Option<f64> {
        match (self.s, self.epsilon) {
            (None, None) => Some(DEFAULT_S),
            (s, _) => s,
        }
    }
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            s: None,
            epsilon: None,
            terms: 1_000_000,
            cross_terms: 8,
            cross_segments: 128,
            cross_rings: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// `space_time` (solution error at `T`) or `eigen` (first eigenvalues).
    pub study: String,
    pub levels: Vec<usize>,
    /// `Δt = dt_ratio · h`.
    pub dt_ratio: f64,
    pub eigen_count: usize,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            study: "space_time".into(),
            levels: vec![25, 50, 100, 200],
            dt_ratio: 0.1,
            eigen_count: 3,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Default configuration with the given preset.
    pub fn preset(name: &str) -> Self {
        let mut cfg = Self::default();
        cfg.problem.preset = name.into();
        cfg
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.into()));
        if !PRESETS.contains(&self.problem.preset.as_str()) {
            return Err(ConfigError::UnknownPreset(self.problem.preset.clone()));
        }
        if let Some(t) = self.problem.final_time {
            if !(t > 0.0 && t.is_finite()) {
                return bad("problem.final_time must be positive");
            }
        }
        if self.mesh.resolution.is_some_and(|n| n < 2) {
            return bad("mesh.resolution must be at least 2");
        }
        if self.time.steps == 0 {
            return bad("time.steps must be positive");
        }
        if !(0.0..=1.0).contains(&self.time.theta) {
            return bad("time.theta must lie in [0, 1]");
        }
        if self.sharpness.terms == 0 {
            return bad("sharpness.terms must be positive");
        }
        if let Some(e) = self.sharpness.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return bad("sharpness.epsilon must be positive");
            }
        }
        if self.sharpness.cross_terms > 0 && (self.sharpness.cross_segments < 3 || self.sharpness.cross_rings < 2) {
            return bad("sharpness.cross_segments must be at least 3 and cross_rings at least 2");
        }
        if !matches!(self.convergence.study.as_str(), "space_time" | "eigen") {
            return bad("convergence.study must be space_time or eigen");
        }
        if self.convergence.levels.len() < 2 || self.convergence.levels.iter().any(|&n| n < 2) {
            return bad("convergence.levels needs at least two resolutions of at least 2");
        }
        if !(self.convergence.dt_ratio > 0.0) {
            return bad("convergence.dt_ratio must be positive");
        }
        if self.convergence.eigen_count == 0 {
            return bad("convergence.eigen_count must be positive");
        }
        Ok(())
    }
}
