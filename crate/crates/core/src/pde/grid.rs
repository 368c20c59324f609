use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GridKind {
    Uniform,
    /// Spacing `d_min` at the origin, growing geometrically by `ratio` until it
    /// reaches the uniform spacing `L/N`.
    Graded {
        d_min: f64,
        ratio: f64,
    },
}

/// Nodes `ξ_0 = 0 < ξ_1 < … < ξ_N = L`. Ghost nodes mirror the first and last cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub kind: GridKind,
}

impl Grid {
    pub fn uniform(n: usize, length: f64) -> Result<Self> {
        if n < 16 {
            return Err(Error::config("grid.n", format!("need at least 16 cells, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::config("grid.length", format!("must be positive, got {length}")));
        }
        let d = length / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * d).collect();
        nodes[n] = length;
        Ok(Self { nodes, kind: GridKind::Uniform })
    }

    /// Graded grid; `n` sets the coarse spacing `L/n` reached away from the origin.
    pub fn graded(n: usize, length: f64, d_min: f64, ratio: f64) -> Result<Self> {
        let base = Self::uniform(n, length)?;
        let d_max = length / n as f64;
        if !(ratio > 1.0 && ratio <= 1.05) {
            return Err(Error::config("grid.ratio", format!("must lie in (1, 1.05], got {ratio}")));
        }
        if !(d_min > 0.0) {
            return Err(Error::config("grid.d_min", format!("must be positive, got {d_min}")));
        }
        if d_min >= d_max {
            return Ok(base);
        }
        let mut nodes = vec![0.0];
        let mut d = d_min;
        let mut x = 0.0;
        while x + d < length {
            x += d;
            nodes.push(x);
            d = (d * ratio).min(d_max);
        }
        // merge the short remainder into the last cell
        let last = nodes.len() - 1;
        if length - nodes[last] < 0.5 * d && last > 0 {
            nodes[last] = length;
        } else {
            nodes.push(length);
        }
        Ok(Self { nodes, kind: GridKind::Graded { d_min, ratio } })
    }

    /// Number of cells `N`.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn length(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Smallest spacing (the first cell).
    pub fn dxi(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Nodes including the two mirrored ghosts, indexed `0 ..= N+2` for `ξ_{−1} ..= ξ_{N+1}`.
    pub fn extended(&self) -> Vec<f64> {
        let n = self.n();
        let mut x = Vec::with_capacity(n + 3);
        x.push(2.0 * self.nodes[0] - self.nodes[1]);
        x.extend_from_slice(&self.nodes);
        x.push(2.0 * self.nodes[n] - self.nodes[n - 1]);
        x
    }

    /// Control-volume widths, half cells at both ends.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.n();
        (0..=n)
            .map(|i| {
                let l = if i > 0 { self.nodes[i] - self.nodes[i - 1] } else { 0.0 };
                let r = if i < n { self.nodes[i + 1] - self.nodes[i] } else { 0.0 };
                0.5 * (l + r)
            })
            .collect()
    }
}
