use super::{Classification, InnerSolution};
use crate::error::{Error, Result};
use crate::ode::{dopri5, OdeOptions, OdeSolution};
use crate::par;

/// Leading coefficient `√(8/3)` of `H ≈ a η^{3/2}`.
pub const SEED_A: f64 = 1.632_993_161_855_452;
/// Particular-solution coefficient of the `η³` term.
pub const SEED_B: f64 = 8.0 / 45.0;
/// Roots of `β³ − 3β² + 2β − 3/8 = 0`; `β₁` is the free mode used for shooting.
pub const BETA1: f64 = 1.25 + 0.901_387_818_865_997_4;
pub const BETA2: f64 = 1.25 - 0.901_387_818_865_997_4;
pub const BETA3: f64 = 0.5;

const TOUCHDOWN: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub eta0: f64,
    pub eta_max: f64,
    /// Absolute bracket width at which bisection stops.
    pub tol: f64,
    pub rtol: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { eta0: 1e-6, eta_max: 1e4, tol: 1e-12, rtol: 1e-11 }
    }
}

fn seed(eta: f64, k: f64) -> [f64; 3] {
    let s = eta.sqrt();
    let kb = k * eta.powf(BETA1 - 2.0);
    [
        SEED_A * eta * s + SEED_B * eta.powi(3) + kb * eta * eta,
        1.5 * SEED_A * s + 3.0 * SEED_B * eta * eta + BETA1 * kb * eta,
        0.75 * SEED_A / s + 6.0 * SEED_B * eta + BETA1 * (BETA1 - 1.0) * kb,
    ]
}

/// Relative residual `|1 + (H² + H) H'''|` of the three-term seed.
fn seed_residual(eta: f64, k: f64) -> f64 {
    let h = seed(eta, k)[0];
    let h3 = -0.375 * SEED_A * eta.powf(-1.5)
        + 6.0 * SEED_B
        + k * BETA1 * (BETA1 - 1.0) * (BETA1 - 2.0) * eta.powf(BETA1 - 3.0);
    (1.0 + (h * h + h) * h3).abs()
}

fn run(k: f64, o: &ShootOptions) -> Result<(OdeSolution, Classification)> {
    let rhs = |_: f64, u: &[f64; 3]| {
        let h = u[0].max(TOUCHDOWN);
        [u[1], u[2], -1.0 / (h * h + h)]
    };
    let opts = OdeOptions { rtol: o.rtol, atol: 1e-300, ..OdeOptions::default() };
    // H''' < 0 everywhere, so H'' ≤ 0 at any point commits the trajectory to touchdown
    let sol = dopri5(rhs, o.eta0, seed(o.eta0, k), o.eta_max, opts, |_, u| u[0] < TOUCHDOWN || u[2] <= 0.0)?;
    let class = if sol.halted { Classification::Touchdown } else { Classification::QuadraticGrowth };
    Ok((sol, class))
}

/// Finds the separatrix of `1 + (H² + H) H''' = 0` by bisection on the
/// coefficient `K` of the `η^{β₁}` mode.
///
/// The returned solution carries `K₀` in `shoot_param`; its profile is the
/// upper end of the final bracket so it always reaches `eta_max`.
pub fn complete_wetting_shoot(eta0: f64, eta_max: f64, tol: f64) -> Result<InnerSolution> {
    shoot_with(ShootOptions { eta0, eta_max, tol, ..ShootOptions::default() })
}

pub(crate) fn shoot_with(o: ShootOptions) -> Result<InnerSolution> {
    if !(o.eta0 > 0.0 && o.eta0 < 1.0 && o.eta_max > 1.0 && o.tol > 0.0) {
        return Err(Error::Domain(format!(
            "shooting needs 0 < eta0 < 1 < eta_max and tol > 0, got ({}, {}, {})",
            o.eta0, o.eta_max, o.tol
        )));
    }
    let r = seed_residual(o.eta0, 0.0);
    if r > 0.01 {
        return Err(Error::Seed(format!("eta0 = {} leaves a seed residual of {r:.3e}", o.eta0)));
    }

    let mut trial: Vec<f64> = (-6..=2).rev().map(|j| -(10f64.powi(j))).collect();
    trial.extend((-6..=2).map(|j| 10f64.powi(j)));
    trial.retain(|&k| seed_residual(o.eta0, k) <= 0.01);
    let classes = par::map(&trial, |&k| run(k, &o).map(|r| r.1));
    let mut bracket = None;
    for i in 1..trial.len() {
        let (a, b) = (&classes[i - 1], &classes[i]);
        if let (Ok(Classification::Touchdown), Ok(Classification::QuadraticGrowth)) = (a, b) {
            bracket = Some((trial[i - 1], trial[i]));
            break;
        }
    }
    let (mut lo, mut hi) = match bracket {
        Some(b) => b,
        None => {
            let first = classes.iter().find_map(|c| c.as_ref().ok()).copied();
            return Err(Error::NoSeparatrix(format!("{first:?}")));
        }
    };
    while hi - lo > o.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match run(mid, &o)?.1 {
            Classification::Touchdown => lo = mid,
            _ => hi = mid,
        }
    }
    let k0 = 0.5 * (lo + hi);
    let (sol, _) = run(hi, &o)?;
    Ok(InnerSolution::from_ode(sol, -1.0, k0, Classification::Separatrix))
}

/// `H / (η (ln η)^{1/3})` at the last node; tends to `3^{1/3}` on the separatrix.
pub fn far_field_ratio(sol: &InnerSolution) -> f64 {
    let eta = sol.last_y();
    sol.h.last().unwrap() / (eta * eta.ln().cbrt())
}
