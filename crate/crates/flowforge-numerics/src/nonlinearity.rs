//! Closed-form scalar functions with derivatives of every order, and the
//! nonlinearity b, d, g, h of the equation built from them.

use std::fmt;

use serde::Serialize;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Func {
    Const(f64),
    Cos,
    Sin,
    Tanh,
    Exp,
    /// c0 + c1 x + c2 x² + …
    Poly(Vec<f64>),
}

impl Func {
    pub fn zero() -> Self {
        Func::Const(0.0)
    }

    /// Parse a registry name: `cos`, `sin`, `tanh`, `exp`, `zero`, a number,
    /// `const[c]` or `poly[c0,c1,...]`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || {
            Error::Parse(format!(
                "unknown function {t:?}; expected cos, sin, tanh, exp, zero, a number, const[c] or poly[c0,c1,...]"
            ))
        };
        let list = |inner: &str| -> Result<Vec<f64>> {
            inner.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect()
        };
        Ok(match t {
            "cos" => Func::Cos,
            "sin" => Func::Sin,
            "tanh" => Func::Tanh,
            "exp" => Func::Exp,
            "zero" | "0" => Func::Const(0.0),
            _ => {
                if let Some(inner) = t.strip_prefix("poly[").and_then(|r| r.strip_suffix(']')) {
                    Func::Poly(list(inner)?)
                } else if let Some(inner) = t.strip_prefix("const[").and_then(|r| r.strip_suffix(']')) {
                    Func::Const(inner.trim().parse().map_err(|_| bad())?)
                } else if let Ok(v) = t.parse::<f64>() {
                    Func::Const(v)
                } else if let Some((p, q)) = t.split_once('/') {
                    let p: f64 = p.trim().parse().map_err(|_| bad())?;
                    let q: f64 = q.trim().parse().map_err(|_| bad())?;
                    Func::Const(p / q)
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Func::Const(c) => *c == 0.0,
            Func::Poly(c) => c.iter().all(|x| *x == 0.0),
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.deriv(0, x)
    }

    /// k-th derivative at x.
    pub fn deriv(&self, k: u32, x: f64) -> f64 {
        match self {
            Func::Const(c) => {
                if k == 0 {
                    *c
                } else {
                    0.0
                }
            }
            Func::Cos => match k % 4 {
                0 => x.cos(),
                1 => -x.sin(),
                2 => -x.cos(),
                _ => x.sin(),
            },
            Func::Sin => match k % 4 {
                0 => x.sin(),
                1 => x.cos(),
                2 => -x.sin(),
                _ => -x.cos(),
            },
            Func::Exp => x.exp(),
            Func::Tanh => {
                // d/dx P(T) = P′(T)(1 − T²) with T = tanh x
                let mut p = vec![0.0, 1.0];
                for _ in 0..k {
                    let mut q = vec![0.0; p.len() + 1];
                    for (i, c) in p.iter().enumerate().skip(1) {
                        let d = i as f64 * c;
                        q[i - 1] += d;
                        q[i + 1] -= d;
                    }
                    p = q;
                }
                horner(&p, x.tanh())
            }
            Func::Poly(c) => {
                let k = k as usize;
                if k >= c.len() {
                    return 0.0;
                }
                let d: Vec<f64> = c[k..]
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| ci * ((i + 1)..=(i + k)).map(|m| m as f64).product::<f64>())
                    .collect();
                horner(&d, x)
            }
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * x + ci)
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Func::Const(c) => write!(f, "{c}"),
            Func::Cos => write!(f, "cos"),
            Func::Sin => write!(f, "sin"),
            Func::Tanh => write!(f, "tanh"),
            Func::Exp => write!(f, "exp"),
            Func::Poly(c) => {
                let s: Vec<String> = c.iter().map(|x| x.to_string()).collect();
                write!(f, "poly[{}]", s.join(","))
            }
        }
    }
}

impl Serialize for Func {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// b(ψ) + Σ dᵢ(ψ)∂ᵢψ + Σ g_ij(ψ)∂ᵢψ∂ⱼψ + h(ψ)ξ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlinearitySpec {
    pub n: u32,
    pub b: Func,
    pub h: Func,
    pub d: Vec<Func>,
    pub g: Vec<Vec<Func>>,
}

impl NonlinearitySpec {
    pub fn zero(n: u32) -> Self {
        let n_ = n as usize;
        NonlinearitySpec {
            n,
            b: Func::zero(),
            h: Func::zero(),
            d: vec![Func::zero(); n_],
            g: vec![vec![Func::zero(); n_]; n_],
        }
    }

    /// g = f·Id.
    pub fn with_isotropic_g(mut self, f: Func) -> Self {
        for i in 0..self.n as usize {
            self.g[i][i] = f.clone();
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n as usize;
        if self.d.len() != n || self.g.len() != n || self.g.iter().any(|r| r.len() != n) {
            return Err(Error::Domain(format!("d must have {n} entries and g must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..i {
                if self.g[i][j] != self.g[j][i] {
                    return Err(Error::Domain("g must be symmetric".into()));
                }
            }
        }
        Ok(())
    }

    /// Whether ∂ψ enters the equation (KPZ-type rather than gPAM-type).
    pub fn uses_gradient(&self) -> bool {
        self.d.iter().any(|f| !f.is_zero()) || self.g.iter().flatten().any(|f| !f.is_zero())
    }

    /// All registry functions carry derivatives of every order.
    pub fn derivative_order(&self) -> u32 {
        u32::MAX
    }

    /// tr g at ψ.
    pub fn trace_g(&self, x: f64) -> f64 {
        (0..self.n as usize).map(|i| self.g[i][i].eval(x)).sum()
    }
}
