use super::{FaceAverage, Grid, State};
use crate::model::SlipParameters;

/// Geometry and stencil coefficients shared by both frames.
///
/// Extended vectors are indexed `k = i + 1` for node `i ∈ −1 ..= N+1`.
/// Curvature at node `i` is `κ_i = a_i h_{i−1} + b_i h_i + c_i h_{i+1}`; the
/// face flux is `Q_{i+½} = m_{i+½} (κ_{i+1} − κ_i)/d_{i+½}`.
#[derive(Debug, Clone)]
pub(crate) struct Scheme {
    pub n: usize,
    pub p: SlipParameters,
    pub face: FaceAverage,
    pub ka: Vec<f64>,
    pub kb: Vec<f64>,
    pub kc: Vec<f64>,
    /// Face widths `d_{i+½}`, `i = 0..N`.
    pub df: Vec<f64>,
    /// Control-volume widths, half cells at the ends.
    pub w: Vec<f64>,
}

/// Flux through one face and its derivatives with respect to `h_{i−1}, h_i, h_{i+1}, h_{i+2}`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FaceFlux {
    pub q: f64,
    pub dq: [f64; 4],
}

/// Mobility with the even extension `m(|h|)`, used for transient negative Newton iterates.
#[inline]
fn mob(p: &SlipParameters, h: f64) -> (f64, f64) {
    let a = h.abs();
    let dm = p.dm(a);
    (p.m(a), if dm.is_finite() { dm * h.signum() } else { 0.0 })
}

impl Scheme {
    pub fn new(grid: &Grid, p: SlipParameters, face: FaceAverage) -> Self {
        let n = grid.n();
        let x = grid.extended();
        let mut ka = Vec::with_capacity(n + 1);
        let mut kb = Vec::with_capacity(n + 1);
        let mut kc = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let dm = x[i + 1] - x[i];
            let dp = x[i + 2] - x[i + 1];
            let a = 2.0 / (dm * (dm + dp));
            let c = 2.0 / (dp * (dm + dp));
            ka.push(a);
            kb.push(-(a + c));
            kc.push(c);
        }
        let df = grid.nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Self { n, p, face, ka, kb, kc, df, w: grid.weights() }
    }

    /// `κ_0 ..= κ_N` from the extended profile.
    pub fn curvature(&self, he: &[f64]) -> Vec<f64> {
        (0..=self.n).map(|i| self.ka[i] * he[i] + self.kb[i] * he[i + 1] + self.kc[i] * he[i + 2]).collect()
    }

    pub fn face_mobility(&self, hl: f64, hr: f64) -> (f64, f64, f64) {
        let (ml, dl) = mob(&self.p, hl);
        let (mr, dr) = mob(&self.p, hr);
        match self.face {
            FaceAverage::Arithmetic => (0.5 * (ml + mr), 0.5 * dl, 0.5 * dr),
            FaceAverage::Geometric => {
                let mf = (ml * mr).sqrt();
                let gl = if ml > 0.0 { 0.5 * mf * dl / ml } else { 0.0 };
                let gr = if mr > 0.0 { 0.5 * mf * dr / mr } else { 0.0 };
                (mf, gl, gr)
            }
        }
    }

    /// Flux through face `i + ½`.
    pub fn flux(&self, he: &[f64], kappa: &[f64], i: usize) -> FaceFlux {
        let d = self.df[i];
        let (mf, gl, gr) = self.face_mobility(he[i + 1], he[i + 2]);
        let g = (kappa[i + 1] - kappa[i]) / d;
        let dq = [
            -mf * self.ka[i] / d,
            mf * (self.ka[i + 1] - self.kb[i]) / d + gl * g,
            mf * (self.kb[i + 1] - self.kc[i]) / d + gr * g,
            mf * self.kc[i + 1] / d,
        ];
        FaceFlux { q: mf * g, dq }
    }

    pub fn fluxes(&self, he: &[f64], kappa: &[f64]) -> Vec<FaceFlux> {
        (0..self.n).map(|i| self.flux(he, kappa, i)).collect()
    }

    /// `Σ m_{i+½} (Δκ)² / d_{i+½}`.
    pub fn dissipation(&self, he: &[f64]) -> f64 {
        let k = self.curvature(he);
        (0..self.n)
            .map(|i| {
                let (mf, _, _) = self.face_mobility(he[i + 1], he[i + 2]);
                mf * (k[i + 1] - k[i]).powi(2) / self.df[i]
            })
            .sum()
    }

    /// `½ Σ (Δh)²/d + ½ θ² |supp h|`.
    pub fn energy(&self, h: &[f64]) -> f64 {
        let mut grad = 0.0;
        let mut support = 0.0;
        for i in 0..self.n {
            let d = self.df[i];
            grad += (h[i + 1] - h[i]).powi(2) / d;
            if h[i] > 0.0 || h[i + 1] > 0.0 {
                support += d;
            }
        }
        0.5 * grad + 0.5 * self.p.theta.powi(2) * support
    }

    pub fn mass(&self, h: &[f64]) -> f64 {
        h.iter().zip(&self.w).map(|(a, b)| a * b).sum()
    }
}

/// Discrete energy of `state`; see [`Scheme`] for the stencils.
pub fn energy(state: &State, grid: &Grid, p: &SlipParameters) -> f64 {
    Scheme::new(grid, *p, FaceAverage::Arithmetic).energy(&state.h)
}

/// Discrete dissipation using the scheme's face fluxes (ghost values from `state`).
pub fn dissipation(state: &State, grid: &Grid, p: &SlipParameters, face: FaceAverage) -> f64 {
    Scheme::new(grid, *p, face).dissipation(&state.extended())
}

/// Trapezoidal mass with half cells at the ends.
pub fn mass(state: &State, grid: &Grid) -> f64 {
    state.h.iter().zip(grid.weights()).map(|(a, b)| a * b).sum()
}
