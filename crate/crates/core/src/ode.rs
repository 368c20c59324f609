//! Dormand–Prince 5(4) for the three-component first-order systems that the
//! inner-layer problems reduce to (`[H, H', H'']`).

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; 0 picks `1e-3 · |t_end − t0|` capped by the local scale `|t0|`.
    pub h0: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Return the trajectory so far (with `failed` set) instead of an error
    /// on step-size underflow or budget exhaustion.
    pub soft_fail: bool,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h0: 0.0, h_min: 1e-300, max_steps: 2_000_000, soft_fail: false }
    }
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub t: Vec<f64>,
    pub y: Vec<Vec3>,
    /// True when the stop predicate fired before `t_end`.
    pub halted: bool,
    pub rejected: usize,
    pub failed: bool,
}

impl OdeSolution {
    pub fn last(&self) -> (f64, Vec3) {
        (*self.t.last().unwrap(), *self.y.last().unwrap())
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn comb(y: &Vec3, h: f64, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn finite(v: &Vec3) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (forward or backward).
///
/// `stop(t, y)` is checked after every accepted step; returning `true` ends
/// the integration with `halted = true`. Non-finite right-hand sides are
/// treated as step rejections.
pub fn dopri5<F, S>(mut f: F, t0: f64, y0: Vec3, t_end: f64, opts: OdeOptions, mut stop: S) -> Result<OdeSolution>
where
    F: FnMut(f64, &Vec3) -> Vec3,
    S: FnMut(f64, &Vec3) -> bool,
{
    let span = t_end - t0;
    let dir = span.signum();
    let mut sol = OdeSolution { t: vec![t0], y: vec![y0], halted: false, rejected: 0, failed: false };
    if span == 0.0 {
        return Ok(sol);
    }
    let mut h = if opts.h0 > 0.0 {
        opts.h0
    } else {
        let scale = if t0 != 0.0 { t0.abs() } else { span.abs() };
        (1e-3 * span.abs()).min(1e-2 * scale)
    };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if !finite(&k1) {
        return Err(Error::Integration(format!("non-finite derivative at t = {t0}")));
    }

    for _ in 0..opts.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok(sol);
        }
        let mut last = false;
        if (t + dir * h - t_end) * dir >= 0.0 {
            h = (t_end - t).abs();
            last = true;
        }
        let hs = dir * h;
        let k2 = f(t + C2 * hs, &comb(&y, hs, &[(A21, &k1)]));
        let k3 = f(t + C3 * hs, &comb(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * hs, &comb(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(t + C5 * hs, &comb(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = f(t + hs, &comb(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let ynew = comb(&y, hs, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + hs, &ynew);

        let mut err = 0.0;
        let ok = [&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| finite(k)) && finite(&ynew);
        if ok {
            for i in 0..3 {
                let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
                err += (e / sc).powi(2);
            }
            err = (err / 3.0).sqrt();
        } else {
            err = f64::INFINITY;
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = ynew;
            k1 = k7;
            sol.t.push(t);
            sol.y.push(y);
            if stop(t, &y) {
                sol.halted = true;
                return Ok(sol);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            sol.rejected += 1;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
            if h < opts.h_min || h <= t.abs() * f64::EPSILON {
                if opts.soft_fail {
                    sol.failed = true;
                    return Ok(sol);
                }
                return Err(Error::Integration(format!("step size underflow at t = {t:.6e}")));
            }
        }
    }
    if opts.soft_fail {
        sol.failed = true;
        return Ok(sol);
    }
    Err(Error::Integration(format!("step budget of {} exhausted at t = {t:.6e}", opts.max_steps)))
}
