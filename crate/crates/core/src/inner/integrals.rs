use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

fn opts() -> QuadOptions {
    QuadOptions::tol(1e-12, 1e-12)
}

/// `Q_γ(y) = ∫_y^∞ dz / (z² + γ^{n−3} z^{n−1})`.
///
/// The range is cut at `Z = max(1e6, 1e4·y)`; the remainder is mapped onto
/// `(0, 1]` by `z = Z/u` and integrated as well, so no tail model is needed.
pub fn q_gamma(y: f64, gamma: f64, n: f64) -> Result<f64> {
    if !(y > 0.0 && y.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("q_gamma needs y > 0 and gamma > 0, got y={y}, gamma={gamma}")));
    }
    if n > 3.0 {
        return Err(Error::Divergent(format!("Q_gamma with n = {n} > 3")));
    }
    if !(n > 0.0) {
        return Err(Error::Domain(format!("q_gamma needs n > 0, got {n}")));
    }
    if n == 3.0 {
        return Ok(0.5 / y);
    }
    let c = gamma.powf(n - 3.0);
    let big_z = 1e6f64.max(1e4 * y);
    let main = quad::integrate_log(|z| 1.0 / (z * z + c * z.powf(n - 1.0)), y, big_z, opts())?.value;
    let zn1 = c * big_z.powf(n - 1.0);
    let tail = quad::integrate(|u| big_z / (big_z * big_z + zn1 * u.powf(3.0 - n)), 0.0, 1.0, opts())?.value;
    Ok(main + tail)
}

/// `[J2, J1, J0]` with `J0 = ∫_y^∞ F`, `J1 = ∫_0^y J0`, `J2 = ∫_0^y J1` and
/// `F(z) = 1/(θ²z² + θ^{n−1}z^{n−1})`. The nested integrals are collapsed by
/// exchanging the order of integration.
pub fn h1_terms(y: f64, theta: f64, n: f64) -> Result<[f64; 3]> {
    if !(n > 1.0 && n < 3.0) {
        return Err(Error::Divergent(format!("correction integral needs 1 < n < 3, got {n}")));
    }
    if !(y > 0.0 && y.is_finite()) || !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("correction integral needs y > 0, theta > 0, got y={y}, theta={theta}")));
    }
    let j0 = q_gamma(y, theta, n)? / (theta * theta);
    let t2 = theta * theta;
    let tn1 = theta.powf(n - 1.0);
    let f = |z: f64| 1.0 / (t2 * z * z + tn1 * z.powf(n - 1.0));

    // below z0 the integrands are z·F ≈ θ^{1−n} z^{2−n}; integrate that piece exactly
    let z0 = 1e-12 * y.min(1.0);
    let head = theta.powf(1.0 - n) * z0.powf(3.0 - n) / (3.0 - n);
    let m1 = quad::integrate_log(|z| z * f(z), z0, y, opts())?.value + head;
    let m2 = quad::integrate_log(|z| (y * z - 0.5 * z * z) * f(z), z0, y, opts())?.value + y * head;
    Ok([m2 + 0.5 * y * y * j0, m1 + y * j0, j0])
}

/// `H₁(y) = |ṡ| ∫_0^y ∫_0^{y₁} ∫_{y₂}^∞ dy₃ / (θ²y₃² + θ^{n−1}y₃^{n−1})`.
pub fn h1_correction(y: f64, theta: f64, sdot: f64, n: f64) -> Result<f64> {
    if !sdot.is_finite() {
        return Err(Error::Domain("sdot must be finite".into()));
    }
    let j = h1_terms(y, theta, n)?;
    Ok(sdot.abs() * j[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn q_gamma_closed_forms() {
        assert_relative_eq!(q_gamma(1.0, 1.0, 2.0).unwrap(), 2f64.ln(), max_relative = 1e-10);
        for &y in &[0.01, 1.0, 37.0] {
            assert_relative_eq!(q_gamma(y, 0.7, 3.0).unwrap(), 0.5 / y, max_relative = 1e-15);
            // n = 2: ∫ dz/(z² + z/γ) = γ ln((γy+1)/(γy))
            let g = 0.7;
            assert_relative_eq!(q_gamma(y, g, 2.0).unwrap(), g * ((g * y + 1.0) / (g * y)).ln(), max_relative = 1e-10);
        }
        assert!(matches!(q_gamma(1.0, 1.0, 3.5), Err(Error::Divergent(_))));
        assert!(q_gamma(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn q_gamma_large_y_against_closed_form() {
        // at n = 2 the gap to 1/y is ~ 1/(2y²), not o(1/y²)
        let q = q_gamma(100.0, 1.0, 2.0).unwrap();
        let exact = (101.0f64 / 100.0).ln();
        assert!((q - exact).abs() < 1e-14);
        let scaled = 1e4 * (q - 0.01).abs();
        assert!((scaled - 0.5).abs() < 0.01, "y²|Q-1/y| = {scaled}");
        // for n < 2 the gap does decay faster than 1/y²
        let g = |y: f64| y * y * (q_gamma(y, 1.0, 1.5).unwrap() - 1.0 / y).abs();
        assert!(g(1e4) < 0.05);
    }

    fn h1_closed_form_n2(y: f64) -> f64 {
        // ∫_0^y G(u) du with G(u) = (u+1)ln(u+1) − u ln u
        let w = y + 1.0;
        let part1 = 0.5 * w * w * w.ln() - 0.25 * w * w + 0.25;
        let part2 = 0.5 * y * y * y.ln() - 0.25 * y * y;
        part1 - part2
    }

    #[test]
    fn h1_matches_closed_form() {
        assert_relative_eq!(h1_closed_form_n2(1.0), 2.0 * 2f64.ln() - 0.5, max_relative = 1e-15);
        for &y in &[1e-3, 1.0, 7.5, 300.0] {
            let h = h1_correction(y, 1.0, 1.0, 2.0).unwrap();
            assert!((h - h1_closed_form_n2(y)).abs() < 1e-8 * h1_closed_form_n2(y).max(1.0), "y={y}");
        }
        assert_eq!(h1_correction(3.0, 1.0, 0.0, 2.0).unwrap(), 0.0);
        assert!(matches!(h1_correction(1.0, 1.0, 1.0, 3.0), Err(Error::Divergent(_))));
        assert!(matches!(h1_correction(1.0, 1.0, 1.0, 1.0), Err(Error::Divergent(_))));
    }

    #[test]
    fn h1_log_asymptote() {
        let y = 1e3;
        let r = h1_correction(y, 1.0, 1.0, 2.0).unwrap() / (y * y.ln());
        assert!((0.9..=1.1).contains(&r), "ratio {r}");
    }

    #[test]
    fn h1_derivative_terms_are_consistent() {
        for &(n, th) in &[(2.0, 1.0), (2.5, 0.6), (1.5, 2.0)] {
            let y = 2.0;
            let d = 1e-4;
            let p = h1_terms(y + d, th, n).unwrap();
            let m = h1_terms(y - d, th, n).unwrap();
            let c = h1_terms(y, th, n).unwrap();
            assert_relative_eq!((p[0] - m[0]) / (2.0 * d), c[1], max_relative = 1e-7);
            assert_relative_eq!((p[1] - m[1]) / (2.0 * d), c[2], max_relative = 1e-7);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn q_gamma_monotone_and_below_one_over_y(y in 0.01f64..100.0, g in 0.2f64..5.0, n in 1.05f64..2.95) {
            let a = q_gamma(y, g, n).unwrap();
            let b = q_gamma(y * 1.1, g, n).unwrap();
            prop_assert!(b < a);
            prop_assert!(a > 0.0 && a < 1.0 / y);
        }

        #[test]
        fn q_gamma_gap_decreasing_for_n_below_two(y in 10.0f64..1e3, n in 1.1f64..1.9) {
            let gap = |y: f64| y * y * (1.0 / y - q_gamma(y, 1.0, n).unwrap());
            prop_assert!(gap(2.0 * y) < gap(y));
        }

        #[test]
        fn h1_homothetic_in_sdot(y in 0.1f64..50.0, s in 1e-3f64..10.0, k in 0.1f64..10.0) {
            let a = h1_correction(y, 1.3, s, 2.2).unwrap();
            let b = h1_correction(y, 1.3, k * s, 2.2).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!((b - k * a).abs() <= 1e-9 * b.abs().max(1e-12));
        }

        #[test]
        fn h1_convex_for_large_y(y in 10.0f64..500.0) {
            let f = |v: f64| h1_correction(v, 1.0, 1.0, 2.0).unwrap();
            let d = 0.5;
            prop_assert!(f(y + d) - 2.0 * f(y) + f(y - d) > 0.0);
        }
    }
}
