use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `coef · x^p · (−ln x)^q` on `0 < x < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogMonomial {
    pub coef: f64,
    pub p: f64,
    pub q: f64,
}

/// Finite sum of [`LogMonomial`]s, closed under exact differentiation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogPoly(pub Vec<LogMonomial>);

impl LogPoly {
    pub fn monomial(coef: f64, p: f64, q: f64) -> Self {
        Self(vec![LogMonomial { coef, p, q }]).normalized()
    }

    fn normalized(mut self) -> Self {
        let mut out: Vec<LogMonomial> = Vec::with_capacity(self.0.len());
        self.0.sort_by(|a, b| a.p.total_cmp(&b.p).then(b.q.total_cmp(&a.q)));
        for m in self.0 {
            match out.last_mut() {
                Some(last) if last.p == m.p && last.q == m.q => last.coef += m.coef,
                _ => out.push(m),
            }
        }
        out.retain(|m| m.coef != 0.0);
        Self(out)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let l = -x.ln();
        self.0.iter().map(|m| m.coef * x.powf(m.p) * l.powf(m.q)).sum()
    }

    /// Sum of absolute term values at `x`; the scale against which cancellation is judged.
    pub fn magnitude(&self, x: f64) -> f64 {
        let l = -x.ln();
        self.0.iter().map(|m| (m.coef * x.powf(m.p) * l.powf(m.q)).abs()).sum()
    }

    /// `k`-th derivative in `x`, using `(−ln x)' = −1/x`.
    pub fn derivative(&self, k: usize) -> Self {
        let mut cur = self.clone();
        for _ in 0..k {
            let mut terms = Vec::with_capacity(2 * cur.0.len());
            for m in &cur.0 {
                terms.push(LogMonomial { coef: m.coef * m.p, p: m.p - 1.0, q: m.q });
                terms.push(LogMonomial { coef: -m.coef * m.q, p: m.p - 1.0, q: m.q - 1.0 });
            }
            cur = Self(terms).normalized();
        }
        cur
    }

    pub fn mul_monomial(&self, coef: f64, p: f64, q: f64) -> Self {
        Self(self.0.iter().map(|m| LogMonomial { coef: m.coef * coef, p: m.p + p, q: m.q + q }).collect()).normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(&other.0).copied().collect()).normalized()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BasisRegime {
    /// Fixed support, frozen operator `(x³ u_xxx)_x`.
    TypeALaplace,
    /// Shrinking support, `(ξ³(−ln ξ) u_ξξξ + (2/3) u)_ξ`.
    TypeBLinearized,
    /// Local operator `(ξⁿ φ_ξξξ)_ξ` of the slip expansion.
    LocalPhi { n: f64 },
}

impl std::str::FromStr for BasisRegime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "type-a" | "type-a-laplace" => Ok(Self::TypeALaplace),
            "type-b" | "type-b-linearized" => Ok(Self::TypeBLinearized),
            _ => {
                if let Some(rest) = s.strip_prefix("local-phi") {
                    let n = rest.trim_start_matches([':', '=']).parse::<f64>().unwrap_or(2.0);
                    Ok(Self::LocalPhi { n })
                } else {
                    Err(Error::UnknownRegime(s.to_string()))
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub label: String,
    #[serde(flatten)]
    pub term: LogMonomial,
}

impl BasisEntry {
    fn new(label: &str, coef: f64, p: f64, q: f64) -> Self {
        Self { label: label.to_string(), term: LogMonomial { coef, p, q } }
    }

    pub fn poly(&self) -> LogPoly {
        LogPoly::monomial(self.term.coef, self.term.p, self.term.q)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticBasis {
    pub regime: BasisRegime,
    pub entries: Vec<BasisEntry>,
}

impl AsymptoticBasis {
    /// The regime's frozen-coefficient operator applied to `u`.
    pub fn apply(&self, u: &LogPoly) -> LogPoly {
        match self.regime {
            BasisRegime::TypeALaplace => u.derivative(3).mul_monomial(1.0, 3.0, 0.0).derivative(1),
            BasisRegime::TypeBLinearized => {
                u.derivative(3).mul_monomial(1.0, 3.0, 1.0).add(&u.mul_monomial(2.0 / 3.0, 0.0, 0.0)).derivative(1)
            }
            BasisRegime::LocalPhi { n } => u.derivative(3).mul_monomial(1.0, n, 0.0).derivative(1),
        }
    }

    /// `|L[u](x)| / Σ|terms of L[u](x) before cancellation|`.
    ///
    /// Zero means exact annihilation; for the type-b catalogue it decays like
    /// `1/(−ln x)` as `x → 0`.
    pub fn relative_residual(&self, idx: usize, x: f64) -> f64 {
        let u = self.entries[idx].poly();
        let r = self.apply(&u);
        if r.is_zero() {
            return 0.0;
        }
        let parts = match self.regime {
            BasisRegime::TypeBLinearized => {
                let a = u.derivative(3).mul_monomial(1.0, 3.0, 1.0).derivative(1);
                let b = u.mul_monomial(2.0 / 3.0, 0.0, 0.0).derivative(1);
                a.magnitude(x) + b.magnitude(x)
            }
            _ => u.derivative(3).mul_monomial(1.0, 3.0, 0.0).derivative(1).magnitude(x).max(u.magnitude(x)),
        };
        r.eval(x).abs() / parts
    }
}

/// Catalogue of the four leading behaviours near the contact point.
pub fn asymptotic_basis(regime: BasisRegime) -> Result<AsymptoticBasis> {
    let entries = match regime {
        BasisRegime::TypeALaplace => vec![
            BasisEntry::new("ln x", -1.0, 0.0, 1.0),
            BasisEntry::new("1", 1.0, 0.0, 0.0),
            BasisEntry::new("x", 1.0, 1.0, 0.0),
            BasisEntry::new("x^2", 1.0, 2.0, 0.0),
        ],
        BasisRegime::TypeBLinearized => vec![
            BasisEntry::new("(-ln xi)^(1/3)", 1.0, 0.0, 1.0 / 3.0),
            BasisEntry::new("1", 1.0, 0.0, 0.0),
            BasisEntry::new("xi (-ln xi)^(-2/3)", 1.0, 1.0, -2.0 / 3.0),
            BasisEntry::new("xi^2 (-ln xi)^(1/3)", 1.0, 2.0, 1.0 / 3.0),
        ],
        BasisRegime::LocalPhi { n } => {
            if !(n > 0.0 && n < 3.0) {
                return Err(Error::InvalidRegime(format!("local basis needs 0 < n < 3, got {n}")));
            }
            let last = if n == 2.0 {
                BasisEntry::new("xi ln xi", -1.0, 1.0, 1.0)
            } else if n == 1.0 {
                BasisEntry::new("xi^2 ln xi", -1.0, 2.0, 1.0)
            } else {
                BasisEntry::new("xi^(3-n)", 1.0, 3.0 - n, 0.0)
            };
            vec![
                BasisEntry::new("1", 1.0, 0.0, 0.0),
                BasisEntry::new("xi", 1.0, 1.0, 0.0),
                BasisEntry::new("xi^2", 1.0, 2.0, 0.0),
                last,
            ]
        }
    };
    Ok(AsymptoticBasis { regime, entries })
}
