use serde::{Deserialize, Serialize};

use super::{Diagnostics, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::Domain(format!("length mismatch {n} vs {}", y.len())));
    }
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if !(sxx > 1e-14 * x.iter().map(|v| v * v).sum::<f64>()) {
        return Err(Error::Degenerate("abscissae are (numerically) constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let slope_stderr = if n > 2 { (sse / (nf - 2.0) / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { (1.0 - sse / syy).clamp(0.0, 1.0) } else { 1.0 };
    Ok(LineFit { slope, intercept, slope_stderr, r_squared, n_points: n })
}

/// The final 80% of the run: the first 20% is profile relaxation.
pub fn quasi_steady_window(traj: &Trajectory) -> (f64, f64) {
    let t0 = traj.diagnostics.first().map_or(0.0, |d| d.t);
    let t1 = traj.diagnostics.last().map_or(0.0, |d| d.t);
    (t0 + 0.2 * (t1 - t0), t1)
}

/// Least-squares `ṡ` from the recorded contact positions in `window`; returns `(ṡ, stderr)`.
pub fn extract_contact_speed(diagnostics: &[Diagnostics], window: (f64, f64)) -> Result<(f64, f64)> {
    let (t, s): (Vec<f64>, Vec<f64>) =
        diagnostics.iter().filter(|d| d.t >= window.0 && d.t <= window.1).map(|d| (d.t, d.s)).unzip();
    if t.len() < 8 {
        return Err(Error::TooFewSamples { need: 8, got: t.len() });
    }
    let fit = fit_line(&t, &s)?;
    Ok((fit.slope, fit.slope_stderr))
}

/// `[10√ε·max(1, θ), min(L/10, 1)]`, pulled in to `[b/2, b]` when that is empty.
pub fn default_outer_window(epsilon: f64, theta: f64, length: f64) -> (f64, f64) {
    let b = (0.1 * length).min(1.0);
    let a = 10.0 * epsilon.sqrt() * theta.max(1.0);
    (a.min(0.5 * b), b)
}

/// Least-squares slope through the origin of `h(ξ)` over `ξ ∈ [a, b]`.
pub fn measure_outer_slope(xi: &[f64], h: &[f64], window: (f64, f64)) -> Result<f64> {
    let (a, b) = window;
    let (lo, hi) = (xi.first().copied().unwrap_or(0.0), xi.last().copied().unwrap_or(0.0));
    if !(a < b && a >= lo && b <= hi) {
        return Err(Error::Window(format!("[{a}, {b}] is not inside the grid [{lo}, {hi}]")));
    }
    let (mut sxh, mut sxx, mut count) = (0.0, 0.0, 0);
    for (x, v) in xi.iter().zip(h) {
        if *x >= a && *x <= b {
            sxh += x * v;
            sxx += x * x;
            count += 1;
        }
    }
    if count < 2 {
        return Err(Error::Window(format!("[{a}, {b}] holds {count} grid nodes, need 2")));
    }
    Ok(sxh / sxx)
}
