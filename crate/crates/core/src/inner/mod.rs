//! Inner-layer (slip-region) problems: correction integrals, shooting for
//! the singular third-order ODEs, local expansions and asymptotic bases.

mod basis;
mod integrals;
mod local;
mod partial;
mod shoot;
mod wave;

pub use basis::{asymptotic_basis, AsymptoticBasis, BasisEntry, BasisRegime, LogMonomial, LogPoly};
pub use integrals::{h1_correction, h1_terms, q_gamma};
pub use local::local_phi;
pub use partial::integrate_inner_partial;
pub use shoot::{complete_wetting_shoot, far_field_ratio, ShootOptions, BETA1, BETA2, BETA3, SEED_A, SEED_B};
pub use wave::{travelling_wave, WaveSolution};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Separatrix,
    Touchdown,
    QuadraticGrowth,
    /// Integrated over the full span without touching down (partial-wetting runs).
    Regular,
}

/// Solution of an inner ODE on a grid that excludes the singular origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerSolution {
    pub y_nodes: Vec<f64>,
    pub h: Vec<f64>,
    /// First derivative.
    pub h1: Vec<f64>,
    /// Second derivative.
    pub h2: Vec<f64>,
    pub sdot: f64,
    pub shoot_param: f64,
    pub classification: Classification,
}

impl InnerSolution {
    fn from_ode(sol: crate::ode::OdeSolution, sdot: f64, shoot_param: f64, classification: Classification) -> Self {
        let mut out = Self {
            y_nodes: sol.t,
            h: Vec::with_capacity(sol.y.len()),
            h1: Vec::with_capacity(sol.y.len()),
            h2: Vec::with_capacity(sol.y.len()),
            sdot,
            shoot_param,
            classification,
        };
        for y in sol.y {
            out.h.push(y[0]);
            out.h1.push(y[1]);
            out.h2.push(y[2]);
        }
        out
    }

    /// Linear interpolation of `H` at `y` inside the node range.
    pub fn h_at(&self, y: f64) -> Option<f64> {
        let k = self.y_nodes.partition_point(|&v| v < y);
        if k == 0 || k >= self.y_nodes.len() {
            return (self.y_nodes.last() == Some(&y)).then(|| *self.h.last().unwrap());
        }
        let (a, b) = (self.y_nodes[k - 1], self.y_nodes[k]);
        let w = (y - a) / (b - a);
        Some(self.h[k - 1] + w * (self.h[k] - self.h[k - 1]))
    }

    pub fn last_y(&self) -> f64 {
        *self.y_nodes.last().unwrap()
    }
}
