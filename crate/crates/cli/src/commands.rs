use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use serde_json::json;
use thinfilm::config::RunConfig;
use thinfilm::harness::{
    energy_cancellation_check, fit_json, fit_log_law, log_integral_identity, nomove_check, nomove_config,
    sweep_epsilon, sweep_member_config, typeb_profile_check, typeb_profile_deviation, Law,
};
use thinfilm::inner::{
    asymptotic_basis, complete_wetting_shoot, far_field_ratio, integrate_inner_partial, local_phi, q_gamma,
    travelling_wave, BasisRegime, BETA1, BETA2, BETA3, SEED_A, SEED_B,
};
use thinfilm::pde::{
    check_energy_balance, extract_contact_speed, quasi_steady_window, read_diagnostics, read_profiles, simulate,
    write_diagnostics, write_profiles, Frame, Solver,
};
use thinfilm::{Error, Result, SCHEMA_VERSION};

use crate::output::OutDir;
use crate::{CheckCommand, OdeCommand, Say, EXIT_CHECK, EXIT_SOLVER};

fn load(config: Option<&Path>) -> Result<RunConfig> {
    match config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

pub fn run(config: Option<&Path>, out: &mut OutDir, say: Say) -> Result<u8> {
    let rc = load(config)?;
    let solver = Solver::new(rc.solver_config())?;
    let traj = solver.simulate(rc.time.t_end);
    let mut buf = Vec::new();
    write_profiles(&mut buf, &traj)?;
    out.write("profile.csv", &buf)?;
    buf.clear();
    write_diagnostics(&mut buf, &traj.diagnostics)?;
    out.write("diagnostics.csv", &buf)?;
    let last = traj.last();
    say.line(format!(
        "t = {:.6}  s = {:.6e}  sdot = {:.6e}  accepted steps = {}  rejected = {}",
        last.t,
        last.s,
        last.sdot,
        traj.diagnostics.len() - 1,
        traj.rejected_steps
    ));
    say.line(format!("wrote {}", out.dir().display()));
    match &traj.failure {
        Some(msg) => {
            eprintln!("error: solver failure at t = {}: {msg} (partial output kept)", last.t);
            Ok(EXIT_SOLVER)
        }
        None => Ok(0),
    }
}

pub fn sweep(config: Option<&Path>, law: &str, eps: &[f64], out: &mut OutDir, say: Say) -> Result<u8> {
    let law: Law = law.parse()?;
    let rc = load(config)?;
    let recs = sweep_epsilon(law, &rc.solver_config(), eps, &rc.sweep_options())?;
    let mut buf = Vec::new();
    thinfilm::harness::write_sweep_csv(&mut buf, &recs)?;
    out.write("sweep.csv", &buf)?;
    let fit = match fit_log_law(&recs) {
        Ok(f) => fit_json(law, &f, &recs),
        Err(e) => json!({ "schema": SCHEMA_VERSION, "law": law.name(), "error": e.to_string() }),
    };
    out.write_json("fit.json", &fit)?;
    say.line(format!(
        "{:>10} {:>10} {:>12} {:>12} {:>8}  status",
        "epsilon", "gamma_fit", "measured", "predicted", "ratio"
    ));
    for r in &recs {
        let status = if r.is_ok() { "ok".to_string() } else { format!("{:?}", r.status) };
        say.line(format!(
            "{:>10.3e} {:>10.4} {:>12.5e} {:>12.5e} {:>8.4}  {status}",
            r.epsilon,
            r.gamma_fit,
            r.sdot_measured,
            r.sdot_predicted(),
            r.ratio()
        ));
    }
    if let Some(s) = fit.get("slope") {
        say.line(format!("fit: sdot = {s} / ln(1/eps) + {}", fit["intercept"]));
    }
    Ok(if recs.iter().all(|r| !r.is_ok()) { EXIT_SOLVER } else { 0 })
}

pub fn ode_name(c: &OdeCommand) -> &'static str {
    match c {
        OdeCommand::Shoot { .. } => "shoot",
        OdeCommand::Inner { .. } => "inner",
        OdeCommand::Phi { .. } => "phi",
        OdeCommand::Basis { .. } => "basis",
        OdeCommand::Qgamma { .. } => "qgamma",
        OdeCommand::Wave { .. } => "wave",
    }
}

pub fn ode(c: &OdeCommand, out: &mut OutDir, say: Say) -> Result<u8> {
    let file = format!("{}.json", ode_name(c));
    let value = match c {
        OdeCommand::Shoot { eta0, eta_max, tol } => {
            let sol = complete_wetting_shoot(*eta0, *eta_max, *tol)?;
            let ratio = far_field_ratio(&sol);
            say.line(format!("K0 = {:.12}", sol.shoot_param));
            say.line(format!("far-field ratio H/(eta (ln eta)^(1/3)) / 3^(1/3) = {:.6}", ratio / 3f64.cbrt()));
            json!({
                "schema": SCHEMA_VERSION,
                "k0": sol.shoot_param,
                "classification": sol.classification,
                "far_field_ratio": ratio,
                "far_field_ratio_over_cbrt3": ratio / 3f64.cbrt(),
                "beta1": BETA1, "beta2": BETA2, "beta3": BETA3,
                "seed_a": SEED_A, "seed_b": SEED_B,
                "eta0": eta0, "eta_max": eta_max,
                "solution": sol,
            })
        }
        OdeCommand::Inner { p, sdot, y0, y_max } => {
            let sol = integrate_inner_partial(&p.params()?, *sdot, (*y0, *y_max))?;
            say.line(format!(
                "H_yy(y0) = {:.10e}  H_y(y_max) = {:.10}  classification {:?}",
                sol.shoot_param,
                sol.h1.last().copied().unwrap_or(f64::NAN),
                sol.classification
            ));
            json!({ "schema": SCHEMA_VERSION, "solution": sol })
        }
        OdeCommand::Phi { n, gamma, sdot, xi, phi2 } => {
            let v = local_phi(*n, *gamma, *sdot, *xi, *phi2)?;
            say.line(format!("{v:.16e}"));
            json!({ "schema": SCHEMA_VERSION, "n": n, "gamma": gamma, "sdot": sdot, "xi": xi, "phi": v })
        }
        OdeCommand::Basis { regime } => {
            let b = asymptotic_basis(regime.parse::<BasisRegime>()?)?;
            for e in &b.entries {
                say.line(format!("{:<16} {} x^{} (ln x)^{}", e.label, e.term.coef, e.term.p, e.term.q));
            }
            json!({ "schema": SCHEMA_VERSION, "basis": b })
        }
        OdeCommand::Qgamma { y, gamma, n } => {
            let v = q_gamma(*y, *gamma, *n)?;
            say.line(format!("{v:.15}"));
            json!({ "schema": SCHEMA_VERSION, "y": y, "gamma": gamma, "n": n, "q_gamma": v })
        }
        OdeCommand::Wave { p, sign, xi0, xi1, seed } => {
            if seed.len() != 3 {
                return Err(Error::config("--seed", format!("expected h,h_xi,h_xixi, got {} values", seed.len())));
            }
            let sol = travelling_wave(&p.params()?, *sign, (*xi0, *xi1), [seed[0], seed[1], seed[2]])?;
            say.line(format!(
                "outcome {:?}, flux residual {:.3e}, {} points",
                sol.outcome,
                sol.flux_residual,
                sol.xi.len()
            ));
            json!({ "schema": SCHEMA_VERSION, "solution": sol })
        }
    };
    out.write_json(&file, &value)?;
    Ok(0)
}

pub fn check_name(c: &CheckCommand) -> &'static str {
    match c {
        CheckCommand::Energy { .. } => "energy",
        CheckCommand::LogIntegral { .. } => "log-integral",
        CheckCommand::Cancellation { .. } => "cancellation",
        CheckCommand::Nomove { .. } => "nomove",
        CheckCommand::TypebProfile { .. } => "typeb-profile",
    }
}

struct Row {
    quantity: String,
    measured: f64,
    threshold: f64,
    pass: bool,
}

fn below(quantity: &str, measured: f64, threshold: f64) -> Row {
    Row { quantity: quantity.to_string(), measured, threshold, pass: measured < threshold }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

fn open(p: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?))
}

pub fn check(config: Option<&Path>, c: &CheckCommand, out: &mut OutDir, say: Say) -> Result<u8> {
    let rows = match c {
        CheckCommand::Energy { traj, tol } => {
            positive("--tol", *tol)?;
            let diags = read_diagnostics(open(traj)?)?;
            let b = check_energy_balance(&diags);
            vec![below("max |energy residual|", b.max_abs, *tol)]
        }
        CheckCommand::LogIntegral { delta, rtol } => {
            positive("--rtol", *rtol)?;
            let (num, closed) = log_integral_identity(*delta)?;
            say.line(format!("quadrature {num:.12}  closed form {closed:.12}"));
            let err = if closed != 0.0 { ((num - closed) / closed).abs() } else { num.abs() };
            vec![below("relative error", err, *rtol)]
        }
        CheckCommand::Cancellation { sdot, deltas, rtol, spread } => {
            positive("--rtol", *rtol)?;
            positive("--spread", *spread)?;
            if deltas.len() < 2 {
                return Err(Error::config("--deltas", "need at least two values"));
            }
            let rs = energy_cancellation_check(*sdot, deltas)?;
            for r in &rs {
                say.line(format!(
                    "delta {:.1e}: term1 {:.6}  term2 {:.6}  difference {:.6}  leading {:.6}",
                    r.delta, r.term1, r.term2, r.difference, r.leading
                ));
            }
            let mid = &rs[rs.len() / 2];
            let (d0, d1) = (rs[0].difference, rs[rs.len() - 1].difference);
            vec![
                below(
                    &format!("|term1/leading - 1| at {:.0e}", mid.delta),
                    (mid.term1 / mid.leading - 1.0).abs(),
                    *rtol,
                ),
                below(
                    &format!("|term2/leading - 1| at {:.0e}", mid.delta),
                    (mid.term2 / mid.leading - 1.0).abs(),
                    *rtol,
                ),
                below("difference spread", (d0 - d1).abs() / (0.5 * (d0 + d1)).abs(), *spread),
            ]
        }
        CheckCommand::Nomove { gamma, cells, t_end } => {
            positive("--gamma", *gamma)?;
            positive("--t-end", *t_end)?;
            let (drift, dx) = nomove_check(&nomove_config(*gamma, *cells), *t_end)?;
            vec![below("contact drift / cell", drift / dx, 1.0)]
        }
        CheckCommand::TypebProfile { traj, sdot, eps, tol } => {
            positive("--tol", *tol)?;
            let dev = match (traj, sdot) {
                (Some(path), Some(sdot)) => {
                    let (frame, blocks) = read_profiles(open(path)?)?;
                    if frame != Frame::Moving {
                        return Err(Error::Parse(format!("{}: need a moving-frame profile", path.display())));
                    }
                    let b = blocks.last().ok_or_else(|| Error::Parse(format!("{}: no snapshots", path.display())))?;
                    typeb_profile_deviation(&b.x, &b.h, *sdot, *eps)?
                }
                _ => {
                    let rc = load(config)?;
                    let opts = rc.sweep_options();
                    let cfg = sweep_member_config(Law::Typeb, &rc.solver_config(), *eps, &opts);
                    let t = simulate(&cfg, opts.t_end)?.into_result()?;
                    let (v, _) = extract_contact_speed(&t.diagnostics, quasi_steady_window(&t))?;
                    say.line(format!("theta_eps = {:.4}, measured sdot = {v:.5}", cfg.p.theta));
                    typeb_profile_check(&t, v)?
                }
            };
            vec![below("max relative profile deviation", dev, *tol)]
        }
    };
    let pass = rows.iter().all(|r| r.pass);
    say.line(format!("{:<36} {:>14} {:>12}  result", "quantity", "measured", "threshold"));
    for r in &rows {
        say.line(format!(
            "{:<36} {:>14.6e} {:>12.3e}  {}",
            r.quantity,
            r.measured,
            r.threshold,
            if r.pass { "pass" } else { "FAIL" }
        ));
    }
    let report = json!({
        "schema": SCHEMA_VERSION,
        "check": check_name(c),
        "pass": pass,
        "rows": rows.iter().map(|r| json!({
            "quantity": r.quantity, "measured": r.measured, "threshold": r.threshold, "pass": r.pass,
        })).collect::<Vec<_>>(),
    });
    out.write_json("check.json", &report)?;
    Ok(if pass { 0 } else { EXIT_CHECK })
}
