use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SlipParameters;
use crate::ode::{dopri5, OdeOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveOutcome {
    Completed,
    Touchdown,
    Blowup,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WaveSolution {
    pub xi: Vec<f64>,
    pub h: Vec<f64>,
    pub hx: Vec<f64>,
    pub hxx: Vec<f64>,
    pub outcome: WaveOutcome,
    /// Largest `|m(h) h_ξξξ − (±ξ)|` over accepted steps.
    pub flux_residual: f64,
}

const BLOWUP: f64 = 1e12;

/// Integrates `m(h) h_ξξξ = ±ξ` (the zero-flux first integral of the
/// travelling-wave equation) over `xi_span` from seeds `[h, h_ξ, h_ξξ]`.
/// `sign = +1` is a shrinking droplet, `−1` an expanding one.
pub fn travelling_wave(p: &SlipParameters, sign: f64, xi_span: (f64, f64), seeds: [f64; 3]) -> Result<WaveSolution> {
    if sign != 1.0 && sign != -1.0 {
        return Err(Error::Domain(format!("sign must be +1 or -1, got {sign}")));
    }
    if !(seeds[0] > 0.0) || seeds.iter().any(|v| !v.is_finite()) {
        return Err(Error::Seed(format!("seeds must be finite with h > 0, got {seeds:?}")));
    }
    let (a, b) = xi_span;
    if !(a >= 0.0 && b.is_finite() && a != b) {
        return Err(Error::Domain(format!("invalid span ({a}, {b})")));
    }
    let rhs = |xi: f64, u: &[f64; 3]| [u[1], u[2], sign * xi / p.m(u[0].max(1e-300))];
    let opts = OdeOptions { rtol: 1e-10, atol: 1e-14, soft_fail: true, ..OdeOptions::default() };
    let sol = dopri5(rhs, a, seeds, b, opts, |_, u| u[0] <= 0.0 || u[0].abs() > BLOWUP)?;
    let (_, last) = sol.last();
    // an underflowing step close to h = 0 is a touchdown the integrator cannot resolve
    let outcome = if !sol.halted && !sol.failed {
        WaveOutcome::Completed
    } else if last[0] <= 1e-3 * seeds[0] {
        WaveOutcome::Touchdown
    } else {
        WaveOutcome::Blowup
    };
    let mut out =
        WaveSolution { xi: sol.t, h: Vec::new(), hx: Vec::new(), hxx: Vec::new(), outcome, flux_residual: 0.0 };
    for (xi, u) in out.xi.iter().zip(&sol.y) {
        if u[0] > 0.0 {
            let r = (p.m(u[0]) * rhs(*xi, u)[2] - sign * xi).abs();
            out.flux_residual = out.flux_residual.max(r);
        }
        out.h.push(u[0]);
        out.hx.push(u[1]);
        out.hxx.push(u[2]);
    }
    Ok(out)
}
