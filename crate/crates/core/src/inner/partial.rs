use super::{h1_terms, Classification, InnerSolution};
use crate::error::{Error, Result};
use crate::model::SlipParameters;
use crate::ode::{dopri5, OdeOptions};

const TOUCHDOWN: f64 = 1e-12;

/// Integrates the partial-wetting inner problem `H_yyy = ṡ/(H² + H^{n−1})`
/// over `y_span`.
///
/// `H(y0)` and `H_y(y0)` come from the wedge `θy` plus the linear correction
/// `−ṡ J2(y)`; the free datum `H_yy(y0)` is shot so that `H_yy(ymax) = 0`,
/// the far-field condition of the inner problem.
pub fn integrate_inner_partial(p: &SlipParameters, sdot: f64, y_span: (f64, f64)) -> Result<InnerSolution> {
    let theta = p.theta;
    let n = p.n;
    if !(theta > 0.0) {
        return Err(Error::InvalidRegime("partial-wetting inner problem needs theta > 0".into()));
    }
    let (y0, ymax) = y_span;
    if !(y0 > 0.0 && ymax > y0) {
        return Err(Error::Domain(format!("inner span needs 0 < y0 < ymax, got ({y0}, {ymax})")));
    }
    if !sdot.is_finite() {
        return Err(Error::Domain("sdot must be finite".into()));
    }
    if !(n > 1.0 && n < 3.0) {
        return Err(Error::Divergent(format!("inner problem needs 1 < n < 3, got {n}")));
    }
    let opts = OdeOptions { rtol: 1e-11, atol: 1e-14, soft_fail: true, ..OdeOptions::default() };
    let run = |c: f64, seed: [f64; 3]| {
        let rhs = |_: f64, u: &[f64; 3]| {
            let h = u[0].max(TOUCHDOWN);
            [u[1], u[2], sdot / (h * h + h.powf(n - 1.0))]
        };
        dopri5(rhs, y0, [seed[0], seed[1], c], ymax, opts, |_, u| u[0] < TOUCHDOWN)
    };
    if sdot == 0.0 {
        let sol = run(0.0, [theta * y0, theta, 0.0])?;
        return Ok(InnerSolution::from_ode(sol, sdot, 0.0, Classification::Regular));
    }
    let j = h1_terms(y0, theta, n)?;
    let seed = [theta * y0 - sdot * j[0], theta - sdot * j[1], -sdot * j[2]];

    // H_yy(ymax) is increasing in the datum c; touchdown counts as "too low"
    let miss = |c: f64| -> Result<f64> {
        let sol = run(c, seed)?;
        if sol.halted || sol.failed {
            Ok(f64::NEG_INFINITY)
        } else {
            Ok(sol.last().1[2])
        }
    };
    let c_lin = seed[2];
    let mut step = c_lin.abs().max(1e-6);
    let (mut lo, mut hi) = (c_lin, c_lin);
    let m0 = miss(c_lin)?;
    if m0 < 0.0 {
        loop {
            hi += step;
            step *= 2.0;
            if miss(hi)? >= 0.0 {
                break;
            }
            if step > 1e12 {
                return Err(Error::Integration("could not bracket the far-field condition".into()));
            }
        }
    } else {
        loop {
            lo -= step;
            step *= 2.0;
            if miss(lo)? < 0.0 {
                break;
            }
            if step > 1e12 {
                return Err(Error::Integration("could not bracket the far-field condition".into()));
            }
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if miss(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let sol = run(hi, seed)?;
    let class = if sol.halted || sol.failed { Classification::Touchdown } else { Classification::Regular };
    Ok(InnerSolution::from_ode(sol, sdot, hi, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::h1_correction;

    fn params(theta: f64) -> SlipParameters {
        SlipParameters::new(2.0, 1e-3, theta).unwrap()
    }

    #[test]
    fn static_case_is_exact_wedge() {
        let sol = integrate_inner_partial(&params(1.3), 0.0, (1e-3, 1e3)).unwrap();
        assert_eq!(sol.classification, Classification::Regular);
        for (y, h) in sol.y_nodes.iter().zip(&sol.h) {
            assert!((h - 1.3 * y).abs() <= 1e-12 * y.max(1.0));
        }
    }

    #[test]
    fn advancing_tracks_linear_correction() {
        let sdot = -0.01;
        let sol = integrate_inner_partial(&params(1.0), sdot, (1e-3, 1e5)).unwrap();
        for &y in &[1.0, 10.0, 50.0, 100.0] {
            let h = sol.h_at(y).unwrap();
            let lin = h1_correction(y, 1.0, 0.01, 2.0).unwrap();
            assert!(((h - y) - lin).abs() < 0.05 * lin, "y={y}: {} vs {lin}", h - y);
        }
    }

    #[test]
    fn outer_slope_follows_log_law() {
        let slope = |sdot: f64, ymax: f64| {
            *integrate_inner_partial(&params(1.0), sdot, (1e-3, ymax)).unwrap().h1.last().unwrap()
        };
        // linearised ratio: close to one while |ṡ| ln y is small
        for &ymax in &[1e2, 1e4, 1e6] {
            let r = (slope(-1e-3, ymax) - 1.0) / (1e-3 * ymax.ln());
            assert!((r - 1.0).abs() < 0.02, "ymax={ymax}: {r}");
        }
        // the cubic form θ_app³ = θ³ + 3|ṡ| ln y holds beyond the linear range
        let hp = slope(-1e-2, 1e6);
        let r = (hp.powi(3) - 1.0) / (3e-2 * 1e6f64.ln());
        assert!((r - 1.0).abs() < 2e-3, "{r}");
    }

    #[test]
    fn far_field_curvature_vanishes() {
        for sdot in [-0.05, 0.02] {
            let sol = integrate_inner_partial(&params(1.0), sdot, (1e-3, 1e3)).unwrap();
            assert_eq!(sol.classification, Classification::Regular);
            assert!(sol.h2.last().unwrap().abs() < 1e-9, "sdot={sdot}: {}", sol.h2.last().unwrap());
            // sign of the curvature correction follows -sdot
            assert!(sol.h[sol.h.len() / 2] * sdot.signum() < sol.y_nodes[sol.h.len() / 2] * sdot.signum());
        }
    }

    #[test]
    fn complete_wetting_rejected() {
        assert!(matches!(integrate_inner_partial(&params(0.0), -0.1, (1e-3, 1.0)), Err(Error::InvalidRegime(_))));
    }
}
