//! Parameters, non-dimensionalization and closed-form contact-line laws.
//!
//! Everything here is a pure function over validated inputs. Out-of-domain
//! arguments return an error instead of NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wetting {
    Complete,
    Partial,
}

/// Mobility exponent `n`, slip ratio `ε` and microscopic contact angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipParameters {
    pub n: f64,
    pub epsilon: f64,
    pub theta: f64,
}

impl SlipParameters {
    /// `ε = 0` selects the no-slip model `m(h) = h³`.
    pub fn new(n: f64, epsilon: f64, theta: f64) -> Result<Self> {
        let p = Self { n, epsilon, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n > 0.0 && self.n <= 3.0) {
            return Err(Error::config("n", format!("must satisfy 0 < n <= 3, got {}", self.n)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon", format!("must be finite and >= 0, got {}", self.epsilon)));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::config("theta", format!("must be finite and >= 0, got {}", self.theta)));
        }
        Ok(())
    }

    pub fn wetting(&self) -> Wetting {
        if self.theta == 0.0 {
            Wetting::Complete
        } else {
            Wetting::Partial
        }
    }

    /// `ε^{3−n}`, or 0 in the no-slip limit (so `n = 3, ε = 0` does not double `h³`).
    #[inline]
    pub fn slip_coefficient(&self) -> f64 {
        if self.epsilon == 0.0 {
            0.0
        } else {
            self.epsilon.powf(3.0 - self.n)
        }
    }

    /// Mobility without domain checks, for inner solver loops. Requires `h ≥ 0`.
    #[inline]
    pub fn m(&self, h: f64) -> f64 {
        let c = self.slip_coefficient();
        let mut v = h * h * h;
        if c != 0.0 {
            v += c * h.powf(self.n);
        }
        v
    }

    /// `m'(h)` without domain checks. Requires `h > 0` or `n ≥ 1`.
    #[inline]
    pub fn dm(&self, h: f64) -> f64 {
        let c = self.slip_coefficient();
        let mut v = 3.0 * h * h;
        if c != 0.0 {
            v += c * self.n * h.powf(self.n - 1.0);
        }
        v
    }
}

/// `h³ + ε^{3−n} hⁿ`.
pub fn mobility(h: f64, p: &SlipParameters) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("mobility needs h >= 0, got {h}")));
    }
    Ok(p.m(h))
}

/// `3h² + n ε^{3−n} h^{n−1}`.
pub fn mobility_derivative(h: f64, p: &SlipParameters) -> Result<f64> {
    if !(h >= 0.0) {
        return Err(Error::Domain(format!("mobility derivative needs h >= 0, got {h}")));
    }
    if h == 0.0 && p.n < 1.0 && p.slip_coefficient() != 0.0 {
        return Err(Error::SingularDerivative(p.n));
    }
    Ok(p.dm(h))
}

/// Surface tensions, viscosity and the two length scales of a droplet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalScales {
    pub gamma_lg: f64,
    pub gamma_sl: f64,
    pub gamma_sg: f64,
    pub mu: f64,
    pub sy: f64,
    pub sx: f64,
}

impl PhysicalScales {
    pub fn new(gamma_lg: f64, gamma_sl: f64, gamma_sg: f64, mu: f64, sy: f64, sx: f64) -> Result<Self> {
        if !(gamma_lg > 0.0 && mu > 0.0 && sy > 0.0 && sx > 0.0) {
            return Err(Error::Domain("gamma_lg, mu, sy and sx must be positive".into()));
        }
        if sy > sx {
            return Err(Error::Domain(format!("lubrication scaling needs sy <= sx, got sy={sy}, sx={sx}")));
        }
        Ok(Self { gamma_lg, gamma_sl, gamma_sg, mu, sy, sx })
    }

    pub fn delta(&self) -> f64 {
        self.sy / self.sx
    }

    pub fn sp(&self) -> f64 {
        self.gamma_lg * self.delta()
    }

    pub fn st(&self) -> f64 {
        self.gamma_lg * self.delta() / self.mu
    }
}

/// Young's angle `arccos((γ_SG − γ_SL)/γ_LG)` in `(0, π)`.
pub fn young_angle(s: &PhysicalScales) -> Result<f64> {
    let c = (s.gamma_sg - s.gamma_sl) / s.gamma_lg;
    if !(c > -1.0 && c < 1.0) {
        return Err(Error::NoPartialWetting(c));
    }
    Ok(c.acos())
}

/// Returns `(δ, s_p, s_t)`.
pub fn lubrication_scales(gamma_lg: f64, mu: f64, sy: f64, sx: f64) -> Result<(f64, f64, f64)> {
    if !(gamma_lg > 0.0 && mu > 0.0 && sy > 0.0 && sx > 0.0) {
        return Err(Error::Domain(format!(
            "lubrication scales need positive inputs, got ({gamma_lg}, {mu}, {sy}, {sx})"
        )));
    }
    let delta = sy / sx;
    let sp = gamma_lg * delta;
    Ok((delta, sp, sp / mu))
}

fn log_inv_eps(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidRegime(format!("speed laws need 0 < epsilon < 1, got {epsilon}")));
    }
    Ok(-epsilon.ln())
}

/// Partial wetting: `ṡ = θ²(θ − γ)/ln(1/ε)`. Positive means receding.
pub fn cox_voinov_speed(theta: f64, gamma_outer: f64, epsilon: f64) -> Result<f64> {
    let l = log_inv_eps(epsilon)?;
    if !(theta > 0.0) {
        return Err(Error::Domain(format!("Cox-Voinov law needs theta > 0, got {theta}")));
    }
    if !gamma_outer.is_finite() {
        return Err(Error::Domain("outer slope must be finite".into()));
    }
    Ok(theta * theta * (theta - gamma_outer) / l)
}

/// Complete wetting: `ṡ = −γ³/(3 ln(1/ε))`.
pub fn tanner_speed(gamma_outer: f64, epsilon: f64) -> Result<f64> {
    let l = log_inv_eps(epsilon)?;
    if !(gamma_outer >= 0.0 && gamma_outer.is_finite()) {
        return Err(Error::Domain(format!("Tanner law needs gamma >= 0, got {gamma_outer}")));
    }
    Ok(-gamma_outer.powi(3) / (3.0 * l))
}

/// Shrinking-support speed `γ³/3`.
pub fn typeb_speed(gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("type-b speed needs gamma > 0, got {gamma}")));
    }
    Ok(gamma.powi(3) / 3.0)
}

fn typeb_args(xi: f64, sdot: f64) -> Result<(f64, f64)> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("type-b profile is defined for 0 < xi < 1, got {xi}")));
    }
    if !(sdot > 0.0 && sdot.is_finite()) {
        return Err(Error::Domain(format!("type-b profile needs sdot > 0, got {sdot}")));
    }
    Ok(((3.0 * sdot).cbrt(), -xi.ln()))
}

/// `(3ṡ)^{1/3} ξ (ln 1/ξ)^{1/3}` on `0 < ξ < 1`.
pub fn typeb_profile(xi: f64, sdot: f64) -> Result<f64> {
    let (a, l) = typeb_args(xi, sdot)?;
    Ok(a * xi * l.cbrt())
}

/// `[h, h_ξ, h_ξξ, h_ξξξ]` of [`typeb_profile`], differentiated in closed form.
pub fn typeb_profile_derivatives(xi: f64, sdot: f64) -> Result<[f64; 4]> {
    let (a, l) = typeb_args(xi, sdot)?;
    let l13 = l.cbrt();
    let lm23 = 1.0 / (l13 * l13);
    let lm53 = lm23 / l;
    let lm83 = lm53 / l;
    Ok([
        a * xi * l13,
        a * (l13 - lm23 / 3.0),
        -a / xi * (lm23 / 3.0 + 2.0 * lm53 / 9.0),
        a / (xi * xi) * (lm23 / 3.0 - 10.0 * lm83 / 27.0),
    ])
}

/// Boundary mass `m(τ) = ∫_{s(0)}^{s(τ)} h0` along a nondecreasing contact path.
pub fn typec_mass<F: Fn(f64) -> f64>(h0: F, s_path: &[f64]) -> Result<Vec<f64>> {
    if s_path.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("contact path must be nondecreasing".into()));
    }
    let mut out = Vec::with_capacity(s_path.len());
    let mut m = 0.0;
    for (i, &s) in s_path.iter().enumerate() {
        if i > 0 {
            m += quad::integrate(&h0, s_path[i - 1], s, QuadOptions::tol(1e-13, 1e-11))?.value;
        }
        out.push(m);
    }
    Ok(out)
}

/// Accumulated boundary mass for a frozen, piecewise-linear initial profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCState {
    pub m: f64,
    pub s: f64,
    pub x: Vec<f64>,
    pub h0: Vec<f64>,
}

impl TypeCState {
    pub fn new(s0: f64, x: Vec<f64>, h0: Vec<f64>) -> Result<Self> {
        if x.len() != h0.len() || x.len() < 2 {
            return Err(Error::Domain("profile samples need matching lengths >= 2".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("profile abscissae must be strictly increasing".into()));
        }
        if h0.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Domain("initial profile must be nonnegative".into()));
        }
        if s0 < x[0] || s0 > x[x.len() - 1] {
            return Err(Error::Domain(format!("s0 = {s0} outside the sampled profile")));
        }
        Ok(Self { m: 0.0, s: s0, x, h0 })
    }

    /// Linear interpolant of the frozen profile.
    pub fn profile(&self, s: f64) -> f64 {
        let k = self.x.partition_point(|&v| v <= s).clamp(1, self.x.len() - 1);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let w = ((s - x0) / (x1 - x0)).clamp(0.0, 1.0);
        self.h0[k - 1] + w * (self.h0[k] - self.h0[k - 1])
    }

    /// Moves the contact point forward to `s_new` and returns the updated mass.
    pub fn advance(&mut self, s_new: f64) -> Result<f64> {
        if s_new < self.s {
            return Err(Error::Domain(format!("contact point cannot move back from {} to {s_new}", self.s)));
        }
        if s_new > self.x[self.x.len() - 1] {
            return Err(Error::Domain(format!("s = {s_new} beyond the sampled profile")));
        }
        // exact integral of the piecewise-linear interpolant, breakpoint by breakpoint
        let mut a = self.s;
        let mut acc = 0.0;
        for &xb in self.x.iter().filter(|&&v| v > self.s && v < s_new).chain(std::iter::once(&s_new)) {
            acc += 0.5 * (xb - a) * (self.profile(a) + self.profile(xb));
            a = xb;
        }
        self.m += acc;
        self.s = s_new;
        Ok(self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{E, PI};

    fn p(n: f64, eps: f64) -> SlipParameters {
        SlipParameters::new(n, eps, 1.0).unwrap()
    }

    #[test]
    fn mobility_examples() {
        assert_eq!(mobility(0.0, &p(2.0, 0.3)).unwrap(), 0.0);
        assert_eq!(mobility(1.0, &p(2.0, 0.0)).unwrap(), 1.0);
        assert_relative_eq!(mobility(2.0, &p(2.0, 0.5)).unwrap(), 10.0, max_relative = 1e-15);
        assert!(matches!(mobility(-1e-3, &p(2.0, 0.1)), Err(Error::Domain(_))));
    }

    #[test]
    fn no_slip_n3_is_plain_cube() {
        assert_eq!(mobility(1.5, &p(3.0, 0.0)).unwrap(), 1.5f64.powi(3));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(mobility_derivative(1.0, &p(2.0, 0.0)).unwrap(), 3.0);
        assert_eq!(mobility_derivative(1.0, &p(2.0, 1.0)).unwrap(), 5.0);
        assert!(matches!(mobility_derivative(0.0, &p(0.5, 0.1)), Err(Error::SingularDerivative(_))));
    }

    #[test]
    fn derivative_matches_central_difference() {
        for &(n, eps) in &[(2.0, 1e-3), (2.5, 0.1), (1.0, 0.5), (0.7, 0.2), (3.0, 0.0)] {
            let q = p(n, eps);
            for &h in &[0.1, 1.0, 10.0] {
                let dh = 1e-5 * h;
                let fd = (q.m(h + dh) - q.m(h - dh)) / (2.0 * dh);
                let exact = mobility_derivative(h, &q).unwrap();
                assert!(((fd - exact) / exact).abs() < 1e-8, "n={n} eps={eps} h={h}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(SlipParameters::new(3.5, 1e-3, 1.0).is_err());
        assert!(SlipParameters::new(0.0, 1e-3, 1.0).is_err());
        assert!(SlipParameters::new(2.0, -1e-3, 1.0).is_err());
        assert!(SlipParameters::new(2.0, 1e-3, -1.0).is_err());
        assert_eq!(SlipParameters::new(2.0, 1e-3, 0.0).unwrap().wetting(), Wetting::Complete);
        assert_eq!(SlipParameters::new(2.0, 1e-3, 0.1).unwrap().wetting(), Wetting::Partial);
    }

    fn scales(diff: f64) -> PhysicalScales {
        PhysicalScales::new(1.0, 0.2, 0.2 + diff, 1.0, 0.01, 0.1).unwrap()
    }

    #[test]
    fn young_examples() {
        assert_relative_eq!(young_angle(&scales(0.5)).unwrap(), PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(young_angle(&scales(0.0)).unwrap(), PI / 2.0, max_relative = 1e-14);
        let near = young_angle(&scales(1.0 - 1e-12)).unwrap();
        assert!(near > 0.0 && near < 2e-6);
        assert!(matches!(young_angle(&scales(1.0)), Err(Error::NoPartialWetting(_))));
        assert!(matches!(young_angle(&scales(-1.5)), Err(Error::NoPartialWetting(_))));
    }

    #[test]
    fn lubrication_examples() {
        let (d, sp, st) = lubrication_scales(1.0, 1.0, 0.01, 0.1).unwrap();
        assert_relative_eq!(d, 0.1, max_relative = 1e-15);
        assert_relative_eq!(sp, 0.1, max_relative = 1e-15);
        assert_relative_eq!(st, 0.1, max_relative = 1e-15);
        let (d, sp, st) = lubrication_scales(2.0, 4.0, 0.01, 0.1).unwrap();
        assert_relative_eq!(d, 0.1, max_relative = 1e-15);
        assert_relative_eq!(sp, 0.2, max_relative = 1e-15);
        assert_relative_eq!(st, 0.05, max_relative = 1e-15);
        assert_eq!(lubrication_scales(1.0, 1.0, 0.3, 0.3).unwrap().0, 1.0);
        assert!(lubrication_scales(0.0, 1.0, 0.1, 0.1).is_err());
        let s = scales(0.1);
        assert_relative_eq!(s.st(), lubrication_scales(1.0, 1.0, 0.01, 0.1).unwrap().2);
    }

    #[test]
    fn speed_law_examples() {
        assert_eq!(cox_voinov_speed(1.0, 1.0, 1e-3).unwrap(), 0.0);
        assert_relative_eq!(cox_voinov_speed(1.0, 0.0, (-10f64).exp()).unwrap(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(cox_voinov_speed(2.0, 1.0, (-20f64).exp()).unwrap(), 0.2, max_relative = 1e-14);
        assert!(matches!(cox_voinov_speed(1.0, 0.5, 1.0), Err(Error::InvalidRegime(_))));

        assert_relative_eq!(tanner_speed(1.0, (-3f64).exp()).unwrap(), -1.0 / 9.0, max_relative = 1e-14);
        assert_eq!(tanner_speed(0.0, 1e-3).unwrap(), 0.0);
        assert_relative_eq!(tanner_speed(3.0, (-27f64).exp()).unwrap(), -1.0 / 3.0, max_relative = 1e-14);
        assert!(matches!(tanner_speed(1.0, 2.0), Err(Error::InvalidRegime(_))));

        assert_relative_eq!(typeb_speed(1.0).unwrap(), 1.0 / 3.0);
        assert_relative_eq!(typeb_speed(3f64.cbrt()).unwrap(), 1.0, max_relative = 1e-14);
        assert!(typeb_speed(0.0).is_err());
    }

    #[test]
    fn typeb_profile_examples() {
        let xi = (-8f64).exp();
        assert_relative_eq!(typeb_profile(xi, 1.0 / 3.0).unwrap(), 2.0 * xi, max_relative = 1e-14);
        assert_relative_eq!(typeb_profile(xi, 1.0 / 3.0).unwrap(), 6.7093e-4, max_relative = 1e-4);
        assert!(typeb_profile(1.0, 1.0).is_err());
        assert!(typeb_profile(0.0, 1.0).is_err());
        assert!(typeb_profile(0.5, 0.0).is_err());
        // h/ξ grows without bound towards the contact point
        let r1 = typeb_profile(1e-4, 1.0).unwrap() / 1e-4;
        let r2 = typeb_profile(1e-12, 1.0).unwrap() / 1e-12;
        assert!(r2 > r1);
    }

    #[test]
    fn typeb_derivatives_match_finite_differences() {
        for &xi in &[(-8f64).exp(), 0.01, 0.3] {
            let d = typeb_profile_derivatives(xi, 0.7).unwrap();
            let f = |x: f64| typeb_profile(x, 0.7).unwrap();
            let dd = |x: f64| typeb_profile_derivatives(x, 0.7).unwrap();
            let hstep = 1e-4 * xi;
            let fd1 = (f(xi + hstep) - f(xi - hstep)) / (2.0 * hstep);
            let fd2 = (dd(xi + hstep)[1] - dd(xi - hstep)[1]) / (2.0 * hstep);
            let fd3 = (dd(xi + hstep)[2] - dd(xi - hstep)[2]) / (2.0 * hstep);
            assert_relative_eq!(d[0], f(xi), max_relative = 1e-14);
            assert_relative_eq!(d[1], fd1, max_relative = 1e-7);
            assert_relative_eq!(d[2], fd2, max_relative = 1e-7);
            assert_relative_eq!(d[3], fd3, max_relative = 1e-7);
        }
    }

    #[test]
    fn typeb_third_derivative_leading_term() {
        let xi = (-8f64).exp();
        let d3 = typeb_profile_derivatives(xi, 1.0 / 3.0).unwrap()[3];
        // leading term e^16/12; the next term is smaller by 10/(9 L^2) with L = 8
        let lead = E.powi(16) / 12.0;
        assert_relative_eq!(d3, lead * (1.0 - 10.0 / (9.0 * 64.0)), max_relative = 1e-12);
        assert!(((d3 - lead) / lead).abs() < 0.02);
    }

    #[test]
    fn typec_mass_examples() {
        assert_eq!(typec_mass(|_| 1.0, &[0.3, 0.3, 0.3]).unwrap(), vec![0.0; 3]);
        let tau: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let m = typec_mass(|_| 1.0, &tau).unwrap();
        for (a, b) in m.iter().zip(&tau) {
            assert_relative_eq!(*a, *b, epsilon = 1e-14);
        }
        let m = typec_mass(|x| x, &tau).unwrap();
        assert!((m[10] - 0.5).abs() < 1e-6);
        assert!(typec_mass(|x| x, &[0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn typec_state_tracks_trapezoid() {
        let x: Vec<f64> = (0..=100).map(|i| i as f64 * 0.02).collect();
        let h0: Vec<f64> = x.to_vec();
        let mut st = TypeCState::new(0.0, x, h0).unwrap();
        st.advance(0.5).unwrap();
        let m = st.advance(1.0).unwrap();
        assert_relative_eq!(m, 0.5, max_relative = 1e-12);
        assert!(st.advance(0.9).is_err());
    }

    proptest! {
        #[test]
        fn mobility_nonnegative_and_increasing(
            n in 0.05f64..=3.0, eps in 0.0f64..1.0, h in 1e-6f64..1e3, dh in 1e-6f64..1.0
        ) {
            let q = SlipParameters::new(n, eps, 1.0).unwrap();
            let a = mobility(h, &q).unwrap();
            let b = mobility(h + dh, &q).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b > a);
        }

        #[test]
        fn no_slip_is_cube(n in 0.05f64..=3.0, h in 0.0f64..1e3) {
            let q = SlipParameters::new(n, 0.0, 1.0).unwrap();
            prop_assert_eq!(mobility(h, &q).unwrap(), h * h * h);
        }

        #[test]
        fn cox_voinov_zero_at_equal_angles(theta in 1e-3f64..10.0, eps in 1e-12f64..0.99) {
            prop_assert_eq!(cox_voinov_speed(theta, theta, eps).unwrap(), 0.0);
        }

        #[test]
        fn law_signs(gamma in 1e-3f64..10.0, eps in 1e-12f64..0.99) {
            prop_assert!(tanner_speed(gamma, eps).unwrap() < 0.0);
            prop_assert!(typeb_speed(gamma).unwrap() > 0.0);
        }

        #[test]
        fn young_inverts_cosine(angle in 1e-6f64..(PI - 1e-6)) {
            let s = PhysicalScales::new(1.0, 0.0, angle.cos(), 1.0, 0.1, 1.0).unwrap();
            prop_assert!((young_angle(&s).unwrap() - angle).abs() < 1e-12 / angle.sin().max(1e-3));
        }

        #[test]
        fn typec_mass_monotone_and_additive(
            steps in proptest::collection::vec(0.0f64..0.3, 2..12)
        ) {
            let mut path = vec![0.0];
            for d in &steps {
                let last = *path.last().unwrap();
                path.push(last + d);
            }
            let h0 = |x: f64| 1.0 + x * x;
            let m = typec_mass(h0, &path).unwrap();
            prop_assert!(m.windows(2).all(|w| w[1] >= w[0]));
            let k = path.len() / 2;
            let first = typec_mass(h0, &path[..=k]).unwrap();
            let second = typec_mass(h0, &path[k..]).unwrap();
            let total = first.last().unwrap() + second.last().unwrap();
            prop_assert!((total - m.last().unwrap()).abs() < 1e-12);
        }
    }
}
