//! Families of runs and quadrature checks: ε-sweeps against the contact-line
//! laws, log-law fits, profile comparison and energy cancellation.

mod checks;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cox_voinov_speed, tanner_speed, typeb_speed};
use crate::par;
use crate::pde::{
    default_outer_window, extract_contact_speed, measure_outer_slope, quasi_steady_window, simulate, FarField,
    GridSpec, SolverConfig,
};

pub use checks::{
    contact_drift, energy_cancellation_check, log_integral_identity, nomove_check, nomove_config,
    nomove_contrast_config, typeb_profile_check, typeb_profile_deviation, CancellationRow, CUTOFF,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    CoxVoinov,
    Tanner,
    Typeb,
}

impl Law {
    pub const ALL: [Law; 3] = [Law::CoxVoinov, Law::Tanner, Law::Typeb];

    pub fn name(&self) -> &'static str {
        match self {
            Law::CoxVoinov => "cox_voinov",
            Law::Tanner => "tanner",
            Law::Typeb => "typeb",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Law {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::UnknownRegime(format!("{s} (valid laws: cox_voinov, tanner, typeb)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "message")]
pub enum RecordStatus {
    Ok,
    Failed(String),
}

/// One member run of a sweep. Predictions are computed on demand from
/// [`crate::model`], never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub law: Law,
    pub epsilon: f64,
    pub theta: f64,
    pub gamma_fit: f64,
    /// Outer slope the run was set up with (`θ_ε = γ (ln 1/ε)^{1/3}` for type (b)).
    pub gamma_nominal: f64,
    pub sdot_measured: f64,
    pub status: RecordStatus,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.status == RecordStatus::Ok
    }

    /// Law value: Cox–Voinov and Tanner use `γ_fit`; type (b) uses `γ³/3`
    /// with the nominal `γ`, which is what `θ_ε` encodes.
    pub fn sdot_predicted(&self) -> f64 {
        let v = match self.law {
            Law::CoxVoinov => cox_voinov_speed(self.theta, self.gamma_fit, self.epsilon),
            Law::Tanner => tanner_speed(self.gamma_fit, self.epsilon),
            Law::Typeb => typeb_speed(self.gamma_nominal),
        };
        v.unwrap_or(f64::NAN)
    }

    /// Pre-limit type-(b) value `θ_ε³ / (3 ln 1/ε)`; equals `γ³/3` exactly when `θ_ε` is set by the rule.
    pub fn sdot_prelimit(&self) -> f64 {
        self.theta.powi(3) / (3.0 * (1.0 / self.epsilon).ln())
    }

    pub fn relative_error(&self) -> f64 {
        let p = self.sdot_predicted();
        if p != 0.0 {
            (self.sdot_measured - p).abs() / p.abs()
        } else {
            self.sdot_measured.abs()
        }
    }

    /// `ṡ_measured / ṡ_predicted`.
    pub fn ratio(&self) -> f64 {
        self.sdot_measured / self.sdot_predicted()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// End time of every member run; `ṡ` is fitted over its final 80%.
    pub t_end: f64,
    /// Outer slope for the type-(b) angle rule and the wedge-match far field.
    pub gamma: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { t_end: 4.0, gamma: 1.0 }
    }
}

/// Member-run configuration for `law` at slip `epsilon`.
pub fn sweep_member_config(law: Law, base: &SolverConfig, epsilon: f64, opts: &SweepOptions) -> SolverConfig {
    let mut cfg = *base;
    cfg.p.epsilon = epsilon;
    cfg.p.theta = match law {
        Law::CoxVoinov => base.p.theta,
        Law::Tanner => 0.0,
        Law::Typeb => opts.gamma * (1.0 / epsilon).ln().cbrt(),
    };
    cfg.grid = GridSpec::resolving(base.grid.n, base.grid.length, epsilon);
    cfg
}

fn run_member(law: Law, cfg: &SolverConfig, opts: &SweepOptions) -> SweepRecord {
    let gamma_nominal = match cfg.far_field {
        FarField::WedgeMatch { gamma } if law != Law::Typeb => gamma,
        _ => opts.gamma,
    };
    let mut rec = SweepRecord {
        law,
        epsilon: cfg.p.epsilon,
        theta: cfg.p.theta,
        gamma_fit: f64::NAN,
        gamma_nominal,
        sdot_measured: f64::NAN,
        status: RecordStatus::Ok,
    };
    let result = (|| -> Result<(f64, f64)> {
        let traj = simulate(cfg, opts.t_end)?.into_result()?;
        let (sdot, _) = extract_contact_speed(&traj.diagnostics, quasi_steady_window(&traj))?;
        let window = default_outer_window(cfg.p.epsilon, cfg.p.theta, traj.grid.length());
        let gamma = measure_outer_slope(&traj.grid.nodes, &traj.last().h, window)?;
        Ok((sdot, gamma))
    })();
    match result {
        Ok((sdot, gamma)) => {
            rec.sdot_measured = sdot;
            rec.gamma_fit = gamma;
        }
        Err(e) => rec.status = RecordStatus::Failed(e.to_string()),
    }
    rec
}

/// Runs `law` at every `ε` in `eps_list` (strictly decreasing, inside `(0, 0.1)`).
///
/// Member runs execute through [`par::map`]; a failed run is flagged in its
/// record and the sweep continues. Records come back in the order of `eps_list`.
pub fn sweep_epsilon(law: Law, base: &SolverConfig, eps_list: &[f64], opts: &SweepOptions) -> Result<Vec<SweepRecord>> {
    if eps_list.is_empty() {
        return Err(Error::config("sweep.eps", "empty ε list"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e < 0.1)) {
        return Err(Error::config("sweep.eps", format!("every ε must lie in (0, 0.1), got {eps_list:?}")));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config("sweep.eps", format!("ε list must be strictly decreasing, got {eps_list:?}")));
    }
    if !(opts.t_end > 0.0) {
        return Err(Error::config("sweep.t_end", "must be positive"));
    }
    let cfgs: Vec<SolverConfig> = eps_list.iter().map(|&e| sweep_member_config(law, base, e, opts)).collect();
    for c in &cfgs {
        c.validate()?;
    }
    let mut recs = par::map(&cfgs, |c| run_member(law, c, opts));
    recs.sort_by(|a, b| b.epsilon.total_cmp(&a.epsilon));
    Ok(recs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Set when the slope is indistinguishable from zero: no `ε`-dependence in the data.
    pub flat: bool,
}

/// Least squares of `ṡ_measured` against `1/ln(1/ε)` over the valid records.
pub fn fit_log_law(records: &[SweepRecord]) -> Result<FitResult> {
    let ok: Vec<&SweepRecord> = records.iter().filter(|r| r.is_ok() && r.sdot_measured.is_finite()).collect();
    if ok.len() < 3 {
        return Err(Error::TooFewSamples { need: 3, got: ok.len() });
    }
    let x: Vec<f64> = ok.iter().map(|r| 1.0 / (1.0 / r.epsilon).ln()).collect();
    let y: Vec<f64> = ok.iter().map(|r| r.sdot_measured).collect();
    let fit = crate::pde::fit_line(&x, &y)?;
    let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xspan = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    let flat =
        (fit.slope * xspan).abs() <= 1e-9 * ymax.max(f64::MIN_POSITIVE) || fit.slope.abs() <= 2.0 * fit.slope_stderr;
    Ok(FitResult { slope: fit.slope, intercept: fit.intercept, r_squared: fit.r_squared, n_points: fit.n_points, flat })
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `law,epsilon,theta,gamma_fit,sdot_measured,sdot_predicted,relative_error,status,sdot_prelimit`.
pub fn write_sweep_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> Result<()> {
    use crate::pde::io_fmt as fmt;
    writeln!(w, "{}", crate::pde::io_schema_line("sweep"))?;
    writeln!(w, "law,epsilon,theta,gamma_fit,sdot_measured,sdot_predicted,relative_error,status,sdot_prelimit")?;
    for r in records {
        let status = match &r.status {
            RecordStatus::Ok => "ok".to_string(),
            RecordStatus::Failed(m) => csv_escape(&format!("failed: {m}")),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.law,
            fmt(r.epsilon),
            fmt(r.theta),
            fmt(r.gamma_fit),
            fmt(r.sdot_measured),
            fmt(r.sdot_predicted()),
            fmt(r.relative_error()),
            status,
            fmt(r.sdot_prelimit())
        )?;
    }
    Ok(())
}

/// `{schema, law, slope, intercept, r_squared, n_points, eps_range}`.
pub fn fit_json(law: Law, fit: &FitResult, records: &[SweepRecord]) -> serde_json::Value {
    let eps: Vec<f64> = records.iter().filter(|r| r.is_ok()).map(|r| r.epsilon).collect();
    let lo = eps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = eps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    serde_json::json!({
        "schema": crate::SCHEMA_VERSION,
        "law": law.name(),
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r_squared": fit.r_squared,
        "n_points": fit.n_points,
        "flat": fit.flat,
        "eps_range": [lo, hi],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(law: Law, eps: f64, theta: f64, gamma: f64, sdot: f64) -> SweepRecord {
        SweepRecord {
            law,
            epsilon: eps,
            theta,
            gamma_fit: gamma,
            gamma_nominal: gamma,
            sdot_measured: sdot,
            status: RecordStatus::Ok,
        }
    }

    const EPS: [f64; 5] = [1e-2, 3e-3, 1e-3, 1e-4, 1e-5];

    #[test]
    fn exact_law_recovered() {
        let recs: Vec<_> = EPS.iter().map(|&e| rec(Law::CoxVoinov, e, 2.0, 1.3, 4.0 * 0.7 / (1.0 / e).ln())).collect();
        let f = fit_log_law(&recs).unwrap();
        assert!((f.slope - 2.8).abs() < 1e-12 && f.intercept.abs() < 1e-12 && !f.flat);
        assert!(recs.iter().all(|r| r.relative_error() < 1e-12));
    }

    #[test]
    fn noisy_law_within_five_percent() {
        let noise = [0.01, -0.01, 0.007, -0.004, 0.0];
        let recs: Vec<_> = EPS
            .iter()
            .zip(noise)
            .map(|(&e, z)| rec(Law::Tanner, e, 0.0, 1.0, -(1.0 + z) / (3.0 * (1.0 / e).ln())))
            .collect();
        let f = fit_log_law(&recs).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 0.05 / 3.0, "{}", f.slope);
    }

    #[test]
    fn constant_speed_is_flagged() {
        let recs: Vec<_> = EPS.iter().map(|&e| rec(Law::Tanner, e, 0.0, 1.0, -0.05)).collect();
        let f = fit_log_law(&recs).unwrap();
        assert!(f.slope.abs() < 1e-12 && f.flat);
    }

    #[test]
    fn fit_needs_three_valid_records() {
        let mut recs: Vec<_> = EPS[..3].iter().map(|&e| rec(Law::Tanner, e, 0.0, 1.0, -0.05)).collect();
        recs[1].status = RecordStatus::Failed("x".into());
        assert!(matches!(fit_log_law(&recs), Err(Error::TooFewSamples { need: 3, got: 2 })));
    }

    #[test]
    fn law_names_round_trip() {
        for l in Law::ALL {
            assert_eq!(l.name().parse::<Law>().unwrap(), l);
        }
        let e = "darcy".parse::<Law>().unwrap_err().to_string();
        assert!(e.contains("cox_voinov") && e.contains("typeb"));
    }

    #[test]
    fn prediction_tracks_model() {
        let r = rec(Law::Typeb, 1e-4, (1e4f64).ln().cbrt(), 1.0, 0.3);
        assert!((r.sdot_predicted() - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.sdot_prelimit() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn sweep_rejects_bad_ladders() {
        let base = SolverConfig::default();
        let o = SweepOptions::default();
        assert!(sweep_epsilon(Law::Tanner, &base, &[], &o).is_err());
        assert!(sweep_epsilon(Law::Tanner, &base, &[1e-3, 1e-2], &o).is_err());
        assert!(sweep_epsilon(Law::Tanner, &base, &[0.5], &o).is_err());
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let mut recs = vec![rec(Law::Tanner, 1e-2, 0.0, 1.0, -0.07), rec(Law::Tanner, 1e-3, 0.0, 1.0, -0.05)];
        recs[1].status = RecordStatus::Failed("Newton, twice".into());
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[3].contains("\"failed: Newton, twice\""));
    }
}
