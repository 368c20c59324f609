//! Implicit finite-difference solvers for `h_t + (m(h) h_xxx)_x = 0`.
//!
//! The moving frame `ξ = x − s(t)` pins the contact point at `ξ = 0` and
//! solves for `ṡ` together with the profile. The fixed frame keeps `x` and
//! locates the contact point as a level set; it is the positivity and
//! conservation cross-check.

mod grid;
mod io;
mod measure;
mod scheme;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SlipParameters;

pub use grid::{Grid, GridKind};
pub(crate) use io::{fmt as io_fmt, schema_line as io_schema_line};
pub use io::{read_diagnostics, read_profiles, write_diagnostics, write_profiles, ProfileBlock};
pub use measure::{
    default_outer_window, extract_contact_speed, fit_line, measure_outer_slope, quasi_steady_window, LineFit,
};
pub use scheme::{dissipation, energy, mass};
pub use solver::{check_energy_balance, simulate, EnergyBalance, Solver, Step};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum FarField {
    /// `h_ξξ(L) = h_ξξξ(L) = 0`.
    ZeroCurvature,
    /// `h_ξ(L) = γ`, `h_ξξ(L) = 0`.
    WedgeMatch { gamma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    Moving,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaceAverage {
    Arithmetic,
    Geometric,
}

/// Named initial-data generators. Values are clamped to `h ≥ 0`; in the
/// moving frame `h(0)` is set to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InitialProfile {
    /// `slope · ξ`.
    Wedge { slope: f64 },
    /// `slope · ξ + amplitude · ξ² exp(−((ξ − center)/width)²)`.
    WedgeBump { slope: f64, amplitude: f64, center: f64, width: f64 },
    /// `ξ (γ³ + 3ṡ ln(1 + 1/ξ))^{1/3}`: the type-(b) profile near 0, a wedge of slope `γ` far out.
    TypeB { sdot: f64, gamma: f64 },
    /// Parabolic cap with contact at `contact`, slope `slope` there and zero
    /// slope at `L`, times `1 + bump · sin(π u/(L − contact))` with `u = x − contact`.
    Cap {
        slope: f64,
        contact: f64,
        #[serde(default)]
        bump: f64,
    },
    /// `mean + amplitude · cos(modes · π x / L)`; fixed frame only.
    Cosine { mean: f64, amplitude: f64, modes: f64 },
}

impl InitialProfile {
    pub fn eval(&self, x: f64, length: f64) -> f64 {
        match *self {
            InitialProfile::Wedge { slope } => slope * x,
            InitialProfile::WedgeBump { slope, amplitude, center, width } => {
                slope * x + amplitude * x * x * (-((x - center) / width).powi(2)).exp()
            }
            InitialProfile::TypeB { sdot, gamma } => {
                if x <= 0.0 {
                    0.0
                } else {
                    x * (gamma.powi(3) + 3.0 * sdot * (1.0 + 1.0 / x).ln()).cbrt()
                }
            }
            InitialProfile::Cap { slope, contact, bump } => {
                let u = x - contact;
                let w = length - contact;
                if u <= 0.0 {
                    0.0
                } else {
                    slope * u * (1.0 - u / (2.0 * w)) * (1.0 + bump * (std::f64::consts::PI * u / w).sin())
                }
            }
            InitialProfile::Cosine { mean, amplitude, modes } => {
                mean + amplitude * (modes * std::f64::consts::PI * x / length).cos()
            }
        }
    }
}

/// Grid recipe; `d_min = None` gives a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
    #[serde(default)]
    pub d_min: Option<f64>,
    #[serde(default = "default_ratio")]
    pub ratio: f64,
}

fn default_ratio() -> f64 {
    1.05
}

impl GridSpec {
    pub fn uniform(n: usize, length: f64) -> Self {
        Self { n, length, d_min: None, ratio: default_ratio() }
    }

    /// Uniform when that already resolves `ε/4`, graded otherwise.
    pub fn resolving(n: usize, length: f64, epsilon: f64) -> Self {
        let d_min = if epsilon > 0.0 && length / n as f64 > epsilon / 4.0 { Some(epsilon / 4.0) } else { None };
        Self { n, length, d_min, ratio: default_ratio() }
    }

    pub fn build(&self) -> Result<Grid> {
        match self.d_min {
            None => Grid::uniform(self.n, self.length),
            Some(d) => Grid::graded(self.n, self.length, d, self.ratio),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub p: SlipParameters,
    pub grid: GridSpec,
    pub dt0: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub far_field: FarField,
    pub frame: Frame,
    pub mobility_face_average: FaceAverage,
    pub initial_profile: InitialProfile,
    /// Fixed frame: floor added under the initial profile.
    pub precursor: f64,
    /// Fixed frame: height whose leftmost crossing defines the contact point.
    pub contact_threshold: f64,
    /// Keep every k-th accepted state (the last one is always kept).
    pub record_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            p: SlipParameters { n: 2.0, epsilon: 1e-3, theta: 1.0 },
            grid: GridSpec::uniform(1024, 4.0),
            dt0: 1e-4,
            dt_min: 1e-12,
            dt_max: 1e-2,
            newton_tol: 1e-10,
            newton_max_iter: 25,
            far_field: FarField::ZeroCurvature,
            frame: Frame::Moving,
            mobility_face_average: FaceAverage::Arithmetic,
            initial_profile: InitialProfile::Wedge { slope: 1.0 },
            precursor: 0.0,
            contact_threshold: 1e-8,
            record_every: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.p.validate().map_err(|e| match e {
            Error::Config { key, msg } => Error::Config { key: format!("params.{key}"), msg },
            e => e,
        })?;
        self.grid.build()?;
        let pos = |key: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be positive, got {v}")))
            }
        };
        pos("time.dt0", self.dt0)?;
        pos("time.dt_min", self.dt_min)?;
        pos("time.dt_max", self.dt_max)?;
        pos("solver.newton_tol", self.newton_tol)?;
        if self.dt_min > self.dt_max {
            return Err(Error::config(
                "time.dt_min",
                format!("dt_min = {} exceeds dt_max = {}", self.dt_min, self.dt_max),
            ));
        }
        if !(self.dt_min <= self.dt0 && self.dt0 <= self.dt_max) {
            return Err(Error::config("time.dt0", format!("must lie in [dt_min, dt_max], got {}", self.dt0)));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::config("solver.newton_max_iter", "must be at least 1"));
        }
        if self.record_every == 0 {
            return Err(Error::config("output.record_every", "must be at least 1"));
        }
        if !(self.precursor >= 0.0) {
            return Err(Error::config("initial.precursor", "must be >= 0"));
        }
        pos("solver.contact_threshold", self.contact_threshold)?;
        if let FarField::WedgeMatch { gamma } = self.far_field {
            pos("far_field.gamma", gamma)?;
        }
        if self.frame == Frame::Moving {
            if self.mobility_face_average == FaceAverage::Geometric {
                return Err(Error::config(
                    "solver.mobility_face_average",
                    "geometric face mobility vanishes at the contact face; use it with the fixed frame only",
                ));
            }
            if matches!(self.initial_profile, InitialProfile::Cosine { .. }) {
                return Err(Error::config("initial.kind", "cosine data has no contact point; use the fixed frame"));
            }
        }
        Ok(())
    }
}

/// Solver state. `h` holds nodes `0..=N`; `ghosts` the values at `ξ_{−1}` and `ξ_{N+1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub t: f64,
    pub s: f64,
    pub sdot: f64,
    pub h: Vec<f64>,
    pub ghosts: [f64; 2],
}

impl State {
    /// Samples `f` at the nodes and at the mirrored ghost positions.
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Grid, f: F) -> Self {
        let x = grid.extended();
        let n = grid.n();
        Self {
            t: 0.0,
            s: 0.0,
            sdot: 0.0,
            h: grid.nodes.iter().map(|&v| f(v)).collect(),
            ghosts: [f(x[0]), f(x[n + 2])],
        }
    }

    /// Values at `ξ_{−1} ..= ξ_{N+1}`.
    pub fn extended(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.h.len() + 2);
        v.push(self.ghosts[0]);
        v.extend_from_slice(&self.h);
        v.push(self.ghosts[1]);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub s: f64,
    pub sdot: f64,
    pub energy: f64,
    pub dissipation: f64,
    pub mass: f64,
    /// `ΔF/Δt + D` minus the discrete boundary terms; zero state-to-state up to `O(Δt)`.
    pub energy_residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub grid: Grid,
    pub states: Vec<State>,
    pub diagnostics: Vec<Diagnostics>,
    pub rejected_steps: usize,
    /// Set when the run ended early on a hard failure.
    pub failure: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &State {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn into_result(self) -> Result<Self> {
        match &self.failure {
            Some(msg) => Err(Error::Solver { t: self.last().t, msg: msg.clone() }),
            None => Ok(self),
        }
    }
}
