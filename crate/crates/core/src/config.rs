//! Run configuration files.
//!
//! TOML by default, JSON when the path ends in `.json`; both encode the same
//! schema. Every section is optional. Example:
//!
//! ```toml
//! schema_version = "thinfilm/1"
//!
//! [params]
//! n = 2.0
//! epsilon = 1e-3
//! theta = 1.0
//!
//! [grid]
//! n = 1024          # cells; the graded grid adds cells near the contact point
//! length = 4.0
//! resolve_slip = true   # grade to spacing ε/4 at ξ = 0 when the uniform grid is coarser
//!
//! [time]
//! t_end = 1.0
//! dt0 = 1e-4
//!
//! [far_field]
//! kind = "wedge-match"
//! gamma = 1.0
//!
//! [initial]
//! kind = "wedge"
//! slope = 1.0
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::SweepOptions;
use crate::model::SlipParameters;
use crate::pde::{FaceAverage, FarField, Frame, GridSpec, InitialProfile, SolverConfig};
use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: String,
    #[serde(default)]
    pub params: ParamsSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub time: TimeSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default = "default_far_field")]
    pub far_field: FarField,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

fn default_far_field() -> FarField {
    FarField::ZeroCurvature
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsSection {
    pub n: f64,
    pub epsilon: f64,
    pub theta: f64,
}

impl Default for ParamsSection {
    fn default() -> Self {
        Self { n: 2.0, epsilon: 1e-3, theta: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub length: f64,
    /// Explicit smallest spacing at `ξ = 0`; overrides `resolve_slip`.
    pub d_min: Option<f64>,
    pub ratio: f64,
    pub resolve_slip: bool,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 1024, length: 4.0, d_min: None, ratio: 1.05, resolve_slip: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSection {
    pub t_end: f64,
    pub dt0: f64,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self { t_end: 1.0, dt0: d.dt0, dt_min: d.dt_min, dt_max: d.dt_max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub frame: Frame,
    pub mobility_face_average: FaceAverage,
    pub contact_threshold: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::default();
        Self {
            newton_tol: d.newton_tol,
            newton_max_iter: d.newton_max_iter,
            frame: d.frame,
            mobility_face_average: d.mobility_face_average,
            contact_threshold: d.contact_threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    #[serde(flatten)]
    pub profile: InitialProfile,
    #[serde(default)]
    pub precursor: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { profile: InitialProfile::Wedge { slope: 1.0 }, precursor: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub record_every: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { record_every: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub t_end: f64,
    pub gamma: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        let d = SweepOptions::default();
        Self { t_end: d.t_end, gamma: d.gamma }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            params: ParamsSection::default(),
            grid: GridSection::default(),
            time: TimeSection::default(),
            solver: SolverSection::default(),
            far_field: default_far_field(),
            initial: InitialSection::default(),
            output: OutputSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| parse_error(e.message(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| parse_error(&e.to_string(), e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path`, as JSON if it ends in `.json`, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn solver_config(&self) -> SolverConfig {
        let p = SlipParameters { n: self.params.n, epsilon: self.params.epsilon, theta: self.params.theta };
        let g = &self.grid;
        let grid = match g.d_min {
            Some(d) => GridSpec { n: g.n, length: g.length, d_min: Some(d), ratio: g.ratio },
            None if g.resolve_slip => GridSpec { ratio: g.ratio, ..GridSpec::resolving(g.n, g.length, p.epsilon) },
            None => GridSpec { ratio: g.ratio, ..GridSpec::uniform(g.n, g.length) },
        };
        SolverConfig {
            p,
            grid,
            dt0: self.time.dt0,
            dt_min: self.time.dt_min,
            dt_max: self.time.dt_max,
            newton_tol: self.solver.newton_tol,
            newton_max_iter: self.solver.newton_max_iter,
            far_field: self.far_field,
            frame: self.solver.frame,
            mobility_face_average: self.solver.mobility_face_average,
            initial_profile: self.initial.profile,
            precursor: self.initial.precursor,
            contact_threshold: self.solver.contact_threshold,
            record_every: self.output.record_every,
        }
    }

    pub fn sweep_options(&self) -> SweepOptions {
        SweepOptions { t_end: self.sweep.t_end, gamma: self.sweep.gamma }
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config(
                "schema_version",
                format!("unsupported `{}`, expected `{SCHEMA_VERSION}`", self.schema_version),
            ));
        }
        if !(self.time.t_end >= 0.0 && self.time.t_end.is_finite()) {
            return Err(Error::config("time.t_end", format!("must be finite and >= 0, got {}", self.time.t_end)));
        }
        if !(self.sweep.t_end > 0.0) {
            return Err(Error::config("sweep.t_end", "must be positive"));
        }
        if !(self.sweep.gamma > 0.0) {
            return Err(Error::config("sweep.gamma", "must be positive"));
        }
        self.solver_config().validate()
    }
}

/// Serde reports unknown keys and type errors in prose; recover the key when it names one.
fn parse_error(msg: &str, full: String) -> Error {
    let key = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.starts_with("unknown field") || msg.starts_with("missing field"))
        .unwrap_or("<file>");
    Error::config(key, full.trim().to_string())
}
