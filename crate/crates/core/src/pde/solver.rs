use serde::{Deserialize, Serialize};

use super::scheme::Scheme;
use super::{Diagnostics, FarField, Frame, Grid, SolverConfig, State, Trajectory};
use crate::banded::{solve_bordered, Banded};
use crate::error::Result;

/// Outcome of one backward-Euler step.
#[derive(Debug, Clone)]
pub enum Step {
    Accepted(State, Diagnostics),
    /// Newton failed or the converged profile went negative; retry with a smaller `dt`.
    Rejected(String),
}

/// One solver instance: validated config plus precomputed stencils.
#[derive(Debug, Clone)]
pub struct Solver {
    cfg: SolverConfig,
    grid: Grid,
    scheme: Scheme,
}

struct Moving {
    a: Banded,
    f: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: f64,
    g: f64,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid.build()?;
        let scheme = Scheme::new(&grid, cfg.p, cfg.mobility_face_average);
        Ok(Self { cfg, grid, scheme })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn initial_state(&self) -> State {
        let len = self.grid.length();
        let prof = self.cfg.initial_profile;
        let n = self.grid.n();
        match self.cfg.frame {
            Frame::Moving => {
                let mut st = State::from_fn(&self.grid, |x| prof.eval(x, len).max(0.0));
                st.h[0] = 0.0;
                let d0 = self.grid.nodes[1];
                st.ghosts[0] = st.h[1] - 2.0 * d0 * self.cfg.p.theta;
                let dn = self.grid.nodes[n] - self.grid.nodes[n - 1];
                st.ghosts[1] = match self.cfg.far_field {
                    FarField::ZeroCurvature => 2.0 * st.h[n] - st.h[n - 1],
                    FarField::WedgeMatch { gamma } => st.h[n - 1] + 2.0 * dn * gamma,
                };
                st
            }
            Frame::Fixed => {
                let b = self.cfg.precursor;
                let mut st = State::from_fn(&self.grid, |x| prof.eval(x, len).max(0.0) + b);
                st.ghosts = [st.h[1], st.h[n - 1]];
                st.s = self.contact_position(&st.h);
                st
            }
        }
    }

    /// Leftmost crossing of `contact_threshold` (fixed frame), by linear interpolation.
    pub fn contact_position(&self, h: &[f64]) -> f64 {
        let thr = self.cfg.contact_threshold;
        let x = &self.grid.nodes;
        if h[0] >= thr {
            return x[0];
        }
        for i in 0..h.len() - 1 {
            if h[i + 1] >= thr {
                let f = (thr - h[i]) / (h[i + 1] - h[i]);
                return x[i] + f * (x[i + 1] - x[i]);
            }
        }
        *x.last().unwrap()
    }

    pub fn diagnostics(&self, st: &State, residual: f64) -> Diagnostics {
        let he = st.extended();
        Diagnostics {
            t: st.t,
            s: st.s,
            sdot: st.sdot,
            energy: self.scheme.energy(&st.h),
            dissipation: self.scheme.dissipation(&he),
            mass: self.scheme.mass(&st.h),
            energy_residual: residual,
        }
    }

    pub fn step(&self, st: &State, dt: f64) -> Result<Step> {
        match self.cfg.frame {
            Frame::Moving => self.step_moving(st, dt),
            Frame::Fixed => self.step_fixed(st, dt),
        }
    }

    fn assemble_moving(&self, he: &[f64], sigma: f64, old: &[f64], dt: f64) -> Moving {
        let s = &self.scheme;
        let n = s.n;
        let nb = n + 2;
        let kappa = s.curvature(he);
        let q = s.fluxes(he, &kappa);
        let mut a = Banded::zeros(nb, 2, 2);
        let mut f = vec![0.0; nb];
        let mut b = vec![0.0; nb];
        let mut c = vec![0.0; nb];
        // node i ↦ column; h_0 = 0 is eliminated
        let col = |node: isize| -> Option<usize> {
            match node {
                -1 => Some(0),
                0 => None,
                k => Some(k as usize),
            }
        };
        let h = |node: isize| he[(node + 1) as usize];

        let d0 = 2.0 * self.grid.nodes[1];
        f[0] = (h(1) - h(-1)) / d0 - self.cfg.p.theta;
        a.add(0, 1, 1.0 / d0);
        a.add(0, 0, -1.0 / d0);

        for i in 1..n {
            let ii = i as isize;
            f[i] = s.w[i] * (h(ii) - old[i]) / dt - sigma * 0.5 * (h(ii + 1) - h(ii - 1)) + q[i].q - q[i - 1].q;
            b[i] = -0.5 * (h(ii + 1) - h(ii - 1));
            if let Some(j) = col(ii) {
                a.add(i, j, s.w[i] / dt);
            }
            if let Some(j) = col(ii + 1) {
                a.add(i, j, -0.5 * sigma);
            }
            if let Some(j) = col(ii - 1) {
                a.add(i, j, 0.5 * sigma);
            }
            for (k, v) in q[i].dq.iter().enumerate() {
                if let Some(j) = col(ii - 1 + k as isize) {
                    a.add(i, j, *v);
                }
            }
            for (k, v) in q[i - 1].dq.iter().enumerate() {
                if let Some(j) = col(ii - 2 + k as isize) {
                    a.add(i, j, -*v);
                }
            }
        }

        let nn = n as isize;
        let mut curv_row = |row: usize, node: isize, f: &mut Vec<f64>| {
            let i = node as usize;
            f[row] = kappa[i];
            a.add(row, col(node - 1).unwrap(), s.ka[i]);
            a.add(row, col(node).unwrap(), s.kb[i]);
            a.add(row, col(node + 1).unwrap(), s.kc[i]);
        };
        match self.cfg.far_field {
            FarField::ZeroCurvature => {
                curv_row(n, nn - 1, &mut f);
                curv_row(n + 1, nn, &mut f);
            }
            FarField::WedgeMatch { gamma } => {
                curv_row(n, nn, &mut f);
                let dn = 2.0 * (self.grid.nodes[n] - self.grid.nodes[n - 1]);
                f[n + 1] = (h(nn + 1) - h(nn - 1)) / dn - gamma;
                a.add(n + 1, n + 1, 1.0 / dn);
                a.add(n + 1, n - 1, -1.0 / dn);
            }
        }

        // zero mass flux through the contact face closes ṡ
        let g = q[0].q - sigma * 0.5 * (h(0) + h(1));
        for (k, v) in q[0].dq.iter().enumerate() {
            if let Some(j) = col(k as isize - 1) {
                c[j] += *v;
            }
        }
        c[1] -= 0.5 * sigma;
        let d = -0.5 * (h(0) + h(1));
        Moving { a, f, b, c, d, g }
    }

    fn newton_converged(&self, dx: &[f64], x: &[f64]) -> bool {
        let scale = x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        dx.iter().all(|v| v.abs() <= self.cfg.newton_tol * scale)
    }

    fn step_moving(&self, st: &State, dt: f64) -> Result<Step> {
        let n = self.scheme.n;
        let mut he = st.extended();
        he[1] = 0.0;
        let mut sigma = st.sdot;
        let mut converged = false;
        for _ in 0..self.cfg.newton_max_iter {
            let sys = self.assemble_moving(&he, sigma, &st.h, dt);
            let rhs: Vec<f64> = sys.f.iter().map(|v| -v).collect();
            let (dx, ds) = match solve_bordered(sys.a, &sys.b, &sys.c, sys.d, &rhs, -sys.g) {
                Ok(v) => v,
                Err(e) => return Ok(Step::Rejected(e.to_string())),
            };
            he[0] += dx[0];
            for k in 1..=n + 1 {
                he[k + 1] += dx[k];
            }
            sigma += ds;
            if !he.iter().all(|v| v.is_finite()) || !sigma.is_finite() {
                return Ok(Step::Rejected("Newton iterate is not finite".into()));
            }
            let ok_h = self.newton_converged(&dx, &he);
            let ok_s = ds.abs() <= self.cfg.newton_tol * sigma.abs().max(1.0);
            if ok_h && ok_s {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(Step::Rejected(format!("Newton did not converge in {} iterations", self.cfg.newton_max_iter)));
        }
        if let Some(i) = (1..=n).find(|&i| he[i + 1] < 0.0) {
            return Ok(Step::Rejected(format!("negative height {:.3e} at node {i}", he[i + 1])));
        }
        let new = State {
            t: st.t + dt,
            s: st.s + dt * sigma,
            sdot: sigma,
            h: he[1..=n + 1].to_vec(),
            ghosts: [he[0], he[n + 2]],
        };
        let residual = self.residual_moving(st, &new, dt);
        let diag = self.diagnostics(&new, residual);
        Ok(Step::Accepted(new, diag))
    }

    /// `ΔE/dt + D` minus the discrete boundary terms: advection of slope at both
    /// ends, curvature times flux at both ends, and far-end inflow.
    fn residual_moving(&self, old: &State, new: &State, dt: f64) -> f64 {
        let s = &self.scheme;
        let n = s.n;
        let he = new.extended();
        let kappa = s.curvature(&he);
        let q0 = s.flux(&he, &kappa, 0).q;
        let qn = s.flux(&he, &kappa, n - 1).q;
        let advect: f64 = (1..n).map(|i| kappa[i] * 0.5 * (new.h[i + 1] - new.h[i - 1])).sum::<f64>() * new.sdot;
        let slope_n = (new.h[n] - new.h[n - 1]) / s.df[n - 1];
        let boundary = -advect - kappa[0] * q0 + kappa[n] * qn + slope_n * (new.h[n] - old.h[n]) / dt;
        (s.energy(&new.h) - s.energy(&old.h)) / dt + s.dissipation(&he) - boundary
    }

    fn step_fixed(&self, st: &State, dt: f64) -> Result<Step> {
        let s = &self.scheme;
        let n = s.n;
        let nb = n + 1;
        let col = |node: isize| -> usize {
            if node < 0 {
                (-node) as usize
            } else if node as usize > n {
                2 * n - node as usize
            } else {
                node as usize
            }
        };
        let mut h = st.h.clone();
        let mut converged = false;
        for _ in 0..self.cfg.newton_max_iter {
            let mut he = Vec::with_capacity(n + 3);
            he.push(h[1]);
            he.extend_from_slice(&h);
            he.push(h[n - 1]);
            let kappa = s.curvature(&he);
            let q = s.fluxes(&he, &kappa);
            let mut a = Banded::zeros(nb, 2, 2);
            let mut f = vec![0.0; nb];
            for i in 0..=n {
                let ii = i as isize;
                f[i] = s.w[i] * (h[i] - st.h[i]) / dt;
                a.add(i, i, s.w[i] / dt);
                if i < n {
                    f[i] += q[i].q;
                    for (k, v) in q[i].dq.iter().enumerate() {
                        a.add(i, col(ii - 1 + k as isize), *v);
                    }
                }
                if i > 0 {
                    f[i] -= q[i - 1].q;
                    for (k, v) in q[i - 1].dq.iter().enumerate() {
                        a.add(i, col(ii - 2 + k as isize), -*v);
                    }
                }
            }
            // A dry node cut off by zero face mobilities has the exact update 0.
            // Dropping its column elsewhere keeps pivoting from leaking roundoff into it.
            for i in 0..=n {
                let lo = i.saturating_sub(2);
                let hi = (i + 2).min(n);
                if f[i] == 0.0 && (lo..=hi).all(|j| j == i || a.get(i, j) == 0.0) {
                    for r in lo..=hi {
                        if r != i {
                            let v = a.get(r, i);
                            a.add(r, i, -v);
                        }
                    }
                }
            }
            let lu = match a.factor() {
                Ok(lu) => lu,
                Err(e) => return Ok(Step::Rejected(e.to_string())),
            };
            let mut dx: Vec<f64> = f.iter().map(|v| -v).collect();
            lu.solve(&mut dx);
            for (hi, d) in h.iter_mut().zip(&dx) {
                *hi += d;
            }
            if !h.iter().all(|v| v.is_finite()) {
                return Ok(Step::Rejected("Newton iterate is not finite".into()));
            }
            if self.newton_converged(&dx, &h) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Ok(Step::Rejected(format!("Newton did not converge in {} iterations", self.cfg.newton_max_iter)));
        }
        if let Some(i) = (0..=n).find(|&i| h[i] < 0.0) {
            return Ok(Step::Rejected(format!("negative height {:.3e} at node {i}", h[i])));
        }
        let s_new = self.contact_position(&h);
        let new = State { t: st.t + dt, s: s_new, sdot: (s_new - st.s) / dt, ghosts: [h[1], h[n - 1]], h };
        let residual = (s.energy(&new.h) - s.energy(&st.h)) / dt + s.dissipation(&new.extended());
        let diag = self.diagnostics(&new, residual);
        Ok(Step::Accepted(new, diag))
    }

    /// Adaptive driver: halve `dt` on rejection, grow by 1.2 after five accepts.
    pub fn simulate(&self, t_end: f64) -> Trajectory {
        let init = self.initial_state();
        let mut traj = Trajectory {
            config: self.cfg,
            grid: self.grid.clone(),
            diagnostics: vec![self.diagnostics(&init, 0.0)],
            states: vec![init.clone()],
            rejected_steps: 0,
            failure: None,
        };
        let mut st = init;
        let mut dt = self.cfg.dt0;
        let mut streak = 0;
        let mut accepted = 0usize;
        let t_tol = 1e-12 * t_end.abs().max(1.0);
        while st.t < t_end - t_tol {
            let h = dt.min(t_end - st.t);
            let outcome = match self.step(&st, h) {
                Ok(o) => o,
                Err(e) => Step::Rejected(e.to_string()),
            };
            match outcome {
                Step::Accepted(new, diag) => {
                    st = new;
                    traj.diagnostics.push(diag);
                    accepted += 1;
                    if accepted.is_multiple_of(self.cfg.record_every) {
                        traj.states.push(st.clone());
                    }
                    streak += 1;
                    if streak >= 5 {
                        dt = (dt * 1.2).min(self.cfg.dt_max);
                        streak = 0;
                    }
                }
                Step::Rejected(msg) => {
                    traj.rejected_steps += 1;
                    streak = 0;
                    dt *= 0.5;
                    if dt < self.cfg.dt_min {
                        traj.failure = Some(format!("time step underflow below {:.3e}: {msg}", self.cfg.dt_min));
                        break;
                    }
                }
            }
        }
        if traj.last().t != st.t {
            traj.states.push(st);
        }
        traj
    }
}

/// Runs `cfg` from its initial data to `t_end`. Configuration errors are
/// returned; a hard solver failure is recorded in [`Trajectory::failure`]
/// with the states reached so far.
pub fn simulate(cfg: &SolverConfig, t_end: f64) -> Result<Trajectory> {
    Ok(Solver::new(*cfg)?.simulate(t_end))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyBalance {
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub mean_abs: f64,
}

/// Per-step energy-identity residuals recorded by the solver.
pub fn check_energy_balance(diagnostics: &[Diagnostics]) -> EnergyBalance {
    let residuals: Vec<f64> = diagnostics.iter().skip(1).map(|d| d.energy_residual).collect();
    let max_abs = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let mean_abs = if residuals.is_empty() {
        0.0
    } else {
        residuals.iter().map(|r| r.abs()).sum::<f64>() / residuals.len() as f64
    };
    EnergyBalance { residuals, max_abs, mean_abs }
}
