use crate::error::{Error, Result};

/// Leading local correction `φ(ξ)` near the contact point.
///
/// * `2 < n < 3`: `γ^{1−n} ṡ ξ^{4−n} / ((4−n)(3−n)(2−n))`
/// * `n = 2`: `½ γ^{−1} ṡ ξ² ln ξ`
/// * `n < 2`: `½ φ₂ ξ²`, with `φ₂` supplied by the caller
pub fn local_phi(n: f64, gamma: f64, sdot: f64, xi: f64, phi2_seed: Option<f64>) -> Result<f64> {
    if !(n > 0.0) {
        return Err(Error::Domain(format!("local expansion needs n > 0, got {n}")));
    }
    if n >= 3.0 {
        return Err(Error::InvalidRegime(format!("local expansion covers n < 3, got {n}")));
    }
    if !(xi > 0.0) {
        return Err(Error::Domain(format!("local expansion needs xi > 0, got {xi}")));
    }
    if n == 2.0 {
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(0.5 * sdot * xi * xi * xi.ln() / gamma)
    } else if n > 2.0 {
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(gamma.powf(1.0 - n) * sdot * xi.powf(4.0 - n) / ((4.0 - n) * (3.0 - n) * (2.0 - n)))
    } else {
        let phi2 = phi2_seed.ok_or_else(|| Error::Domain(format!("n = {n} < 2 needs a phi2 seed")))?;
        Ok(0.5 * phi2 * xi * xi)
    }
}
