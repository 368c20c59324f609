use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{typeb_profile, typeb_profile_derivatives, SlipParameters};
use crate::pde::{simulate, FaceAverage, FarField, Frame, GridSpec, InitialProfile, SolverConfig, Trajectory};
use crate::quad::{integrate_log, QuadOptions};

/// Radius of the smooth cutoff `exp(1 − 1/(1 − (ξ/R)²))` on the analytic profile.
pub const CUTOFF: f64 = 0.5;

/// Largest relative deviation of `h` from `typeb_profile(ξ, ṡ)` over
/// `ξ ∈ [10Δ_ε, 0.1]`, `Δ_ε = ε (ln 1/ε)^{−1/3}`.
pub fn typeb_profile_deviation(xi: &[f64], h: &[f64], sdot: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let lo = 10.0 * epsilon * (1.0 / epsilon).ln().powf(-1.0 / 3.0);
    let hi = 0.1;
    let mut dev: f64 = 0.0;
    let mut count = 0;
    for (&x, &v) in xi.iter().zip(h) {
        if x >= lo && x <= hi {
            let p = typeb_profile(x, sdot)?;
            dev = dev.max(((v - p) / p).abs());
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::Window(format!("no grid nodes in [{lo:.3e}, {hi}]")));
    }
    Ok(dev)
}

/// [`typeb_profile_deviation`] on the final state of a moving-frame run.
pub fn typeb_profile_check(traj: &Trajectory, sdot: f64) -> Result<f64> {
    if traj.config.frame != Frame::Moving {
        return Err(Error::InvalidRegime("type-(b) profile check needs a moving-frame run".into()));
    }
    typeb_profile_deviation(&traj.grid.nodes, &traj.last().h, sdot, traj.config.p.epsilon)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancellationRow {
    pub delta: f64,
    /// `(ṡ/2) h_ξ(δ)²`.
    pub term1: f64,
    /// `∫_δ^R h³ h_ξξξ²`.
    pub term2: f64,
    pub difference: f64,
    /// `(1/6)(3ṡ)^{5/3} |ln δ|^{2/3}`.
    pub leading: f64,
}

/// `[φ, φ', φ'', φ''']` of the cutoff.
fn cutoff_derivatives(xi: f64) -> [f64; 4] {
    if xi >= CUTOFF {
        return [0.0; 4];
    }
    let r2 = CUTOFF * CUTOFF;
    let v = 1.0 - xi * xi / r2;
    let v1 = -2.0 * xi / r2;
    let v2 = -2.0 / r2;
    let phi = (1.0 - 1.0 / v).exp();
    if phi == 0.0 {
        return [0.0; 4];
    }
    let g1 = v1 / (v * v);
    let g2 = v2 / (v * v) - 2.0 * v1 * v1 / (v * v * v);
    let g3 = -6.0 * v1 * v2 / v.powi(3) + 6.0 * v1.powi(3) / v.powi(4);
    [phi, phi * g1, phi * (g2 + g1 * g1), phi * (g3 + 3.0 * g1 * g2 + g1.powi(3))]
}

/// Derivatives of the cut-off type-(b) profile `h = typeb_profile · φ`.
fn cut_profile(xi: f64, sdot: f64) -> Result<[f64; 4]> {
    let f = typeb_profile_derivatives(xi, sdot)?;
    let p = cutoff_derivatives(xi);
    Ok([
        f[0] * p[0],
        f[1] * p[0] + f[0] * p[1],
        f[2] * p[0] + 2.0 * f[1] * p[1] + f[0] * p[2],
        f[3] * p[0] + 3.0 * f[2] * p[1] + 3.0 * f[1] * p[2] + f[0] * p[3],
    ])
}

/// The two leading terms of the moving-frame energy balance on the analytic
/// type-(b) profile: slope advection at `δ` against the dissipation beyond `δ`.
pub fn energy_cancellation_check(sdot: f64, deltas: &[f64]) -> Result<Vec<CancellationRow>> {
    if !(sdot >= 0.0 && sdot.is_finite()) {
        return Err(Error::Domain(format!("sdot must be finite and >= 0, got {sdot}")));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 0.1)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain(format!("deltas must be decreasing inside (0, 0.1), got {deltas:?}")));
    }
    deltas
        .iter()
        .map(|&delta| {
            let leading = (3.0 * sdot).powf(5.0 / 3.0) * (-delta.ln()).powf(2.0 / 3.0) / 6.0;
            if sdot == 0.0 {
                return Ok(CancellationRow { delta, term1: 0.0, term2: 0.0, difference: 0.0, leading });
            }
            let term1 = 0.5 * sdot * cut_profile(delta, sdot)?[1].powi(2);
            let mut err = None;
            let est = integrate_log(
                |x| match cut_profile(x, sdot) {
                    Ok(d) => d[0].powi(3) * d[3] * d[3],
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                delta,
                CUTOFF,
                QuadOptions::tol(0.0, 1e-11),
            )?;
            if let Some(e) = err {
                return Err(e);
            }
            let term2 = est.value;
            Ok(CancellationRow { delta, term1, term2, difference: term1 - term2, leading })
        })
        .collect()
}

/// `∫_δ^{1/2} dξ / (ξ (ln 1/ξ)^{1/3})` by quadrature, and its closed form
/// `(3/2)[(ln 1/δ)^{2/3} − (ln 2)^{2/3}]`.
pub fn log_integral_identity(delta: f64) -> Result<(f64, f64)> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Domain(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    let closed = 1.5 * ((1.0 / delta).ln().powf(2.0 / 3.0) - 2f64.ln().powf(2.0 / 3.0));
    if delta == 0.5 {
        return Ok((0.0, closed));
    }
    let est = integrate_log(|x| 1.0 / (x * (-x.ln()).cbrt()), delta, 0.5, QuadOptions::tol(0.0, 1e-13))?;
    Ok((est.value, closed))
}

/// Largest `|s(t) − s(0)|` over the recorded diagnostics.
pub fn contact_drift(traj: &Trajectory) -> f64 {
    let s0 = traj.diagnostics.first().map_or(0.0, |d| d.s);
    traj.diagnostics.iter().fold(0.0, |m, d| m.max((d.s - s0).abs()))
}

/// No-slip droplet in the fixed frame: `n = 3`, `ε = 0`, a parabolic cap with
/// contact slope `gamma` at `x = 1` on `[0, 4]` (perturbed off equilibrium),
/// geometric face mobility.
pub fn nomove_config(gamma: f64, n_cells: usize) -> SolverConfig {
    SolverConfig {
        p: SlipParameters { n: 3.0, epsilon: 0.0, theta: gamma },
        grid: GridSpec::uniform(n_cells, 4.0),
        frame: Frame::Fixed,
        mobility_face_average: FaceAverage::Geometric,
        initial_profile: InitialProfile::Cap { slope: gamma, contact: 1.0, bump: 0.3 },
        ..SolverConfig::default()
    }
}

/// Slip contrast: `n = 2`, `ε = 1e−3`, `θ = 2γ`, moving frame with outer slope `gamma`.
pub fn nomove_contrast_config(gamma: f64, n_cells: usize) -> SolverConfig {
    let eps = 1e-3;
    SolverConfig {
        p: SlipParameters { n: 2.0, epsilon: eps, theta: 2.0 * gamma },
        grid: GridSpec::resolving(n_cells, 4.0, eps),
        far_field: FarField::WedgeMatch { gamma },
        initial_profile: InitialProfile::Wedge { slope: gamma },
        ..SolverConfig::default()
    }
}

/// Runs `cfg` to `t_end` and returns `(drift, dxi)`.
pub fn nomove_check(cfg: &SolverConfig, t_end: f64) -> Result<(f64, f64)> {
    let traj = simulate(cfg, t_end)?.into_result()?;
    Ok((contact_drift(&traj), traj.grid.max_spacing()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_integral_closed_form() {
        let (num, closed) = log_integral_identity((-8f64).exp()).unwrap();
        assert!((num - closed).abs() < 1e-10 * closed);
        assert!((closed - 1.5 * (4.0 - 2f64.ln().powf(2.0 / 3.0))).abs() < 1e-14);
        assert!((closed - 4.8251).abs() < 1e-4);
        assert_eq!(log_integral_identity(0.5).unwrap(), (0.0, 0.0));
        assert!(log_integral_identity(0.7).is_err());
    }

    #[test]
    fn log_integral_ratio_increases_to_one() {
        let r: Vec<f64> = [1e-2, 1e-4, 1e-8, 1e-16, 1e-32]
            .iter()
            .map(|&d| {
                let (num, _) = log_integral_identity(d).unwrap();
                num / (1.5 * (-d.ln()).powf(2.0 / 3.0))
            })
            .collect();
        assert!(r.windows(2).all(|w| w[1] > w[0]) && r[4] < 1.0 && r[4] > 0.9, "{r:?}");
    }

    #[test]
    fn cutoff_derivatives_match_differences() {
        for &x in &[0.1, 0.3, 0.45] {
            let d = cutoff_derivatives(x);
            let e = 1e-5;
            for k in 0..3 {
                let fd = (cutoff_derivatives(x + e)[k] - cutoff_derivatives(x - e)[k]) / (2.0 * e);
                assert!((fd - d[k + 1]).abs() < 1e-6 * (1.0 + d[k + 1].abs()), "x={x} k={k}: {fd} vs {}", d[k + 1]);
            }
        }
        assert_eq!(cutoff_derivatives(0.5), [0.0; 4]);
    }

    #[test]
    fn cancellation_terms_share_leading_coefficient() {
        let rows = energy_cancellation_check(1.0 / 3.0, &[1e-4, 1e-6, 1e-8]).unwrap();
        let r6 = rows[1];
        assert!((r6.term1 / r6.leading - 1.0).abs() < 0.05, "{r6:?}");
        // term2 carries an O(1) offset from the cutoff region; its growth in
        // |ln δ| follows the same coefficient as term1
        let dl = rows[2].leading - rows[0].leading;
        for (a, b) in [(rows[0].term1, rows[2].term1), (rows[0].term2, rows[2].term2)] {
            assert!(((b - a) / dl - 1.0).abs() < 0.05, "{} vs {dl}", b - a);
        }
        let (a, b) = (rows[0].difference, rows[2].difference);
        assert!((a - b).abs() < 0.2 * (0.5 * (a + b)).abs(), "{a} vs {b}");
    }

    #[test]
    fn static_profile_has_no_dissipation() {
        let rows = energy_cancellation_check(0.0, &[1e-3]).unwrap();
        assert_eq!(rows[0].term2, 0.0);
    }

    #[test]
    fn deviation_of_exact_and_wedge_profiles() {
        let eps = 1e-4;
        let xi: Vec<f64> = (0..=4000).map(|k| 10f64.powf(-5.0 + 4.0 * k as f64 / 4000.0)).collect();
        let exact: Vec<f64> = xi.iter().map(|&x| typeb_profile(x, 1.0 / 3.0).unwrap()).collect();
        assert_eq!(typeb_profile_deviation(&xi, &exact, 1.0 / 3.0, eps).unwrap(), 0.0);
        let wedge: Vec<f64> = xi.iter().map(|&x| 1.5 * x).collect();
        assert!(typeb_profile_deviation(&xi, &wedge, 1.0 / 3.0, eps).unwrap() > 0.05);
        assert!(matches!(typeb_profile_deviation(&[0.5, 1.0], &[1.0, 1.0], 0.3, eps), Err(Error::Window(_))));
    }
}
