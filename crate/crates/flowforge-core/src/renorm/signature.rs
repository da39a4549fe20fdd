//! Derivative-order signature of the local functional ∂^𝔩 Υᵃ[ψ].

use std::fmt::Write;

use super::SpaceTimeIndex;
use crate::multiindex::{Label, PreMultiIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    B,
    D,
    G,
    H,
}

impl Func {
    fn name(self) -> char {
        match self {
            Func::B => 'b',
            Func::D => 'd',
            Func::G => 'g',
            Func::H => 'h',
        }
    }
}

/// One vertex factor f^{(deriv)}(ψ)·(∂ψ)^grad. `residual` counts derivatives
/// that could not be absorbed into (ψ, ∂ψ) and so need ∂²ψ or ∂ₜψ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub func: Func,
    pub deriv: u32,
    pub grad: u32,
    pub residual: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionalSignature {
    pub factors: Vec<Factor>,
    /// Number of open ℋ slots (one per d vertex), contracted with the constant.
    pub open_slots: u32,
}

fn base_factor(l: Label, i: usize) -> Factor {
    let (func, grad) = match l {
        Label::B => (Func::B, 0),
        Label::C => (Func::D, 1),
        Label::D => (Func::D, 0),
        Label::E => (Func::G, 2),
        Label::F => (Func::G, 1),
        Label::G => (Func::G, 0),
        Label::H => (Func::H, 0),
    };
    Factor { func, deriv: i as u32, grad, residual: 0 }
}

fn primes(k: u32) -> String {
    match k {
        0 => String::new(),
        1 => "′".into(),
        2 => "″".into(),
        3 => "‴".into(),
        k => format!("^({k})"),
    }
}

fn superscript(k: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap() as usize]).collect()
}

impl FunctionalSignature {
    /// Signature of ∂^{𝔩ᵃ}Υᵃ evaluated on the diagonal. A single spatial
    /// derivative on a vertex without gradient factor turns f^{(i)}(ψ) into
    /// f^{(i+1)}(ψ)∂ψ; anything else is kept as a residual.
    pub fn of(a: &PreMultiIndex, decorations: &[SpaceTimeIndex]) -> Self {
        let mut factors = Vec::new();
        for (k, &(l, i)) in a.vertices().iter().enumerate() {
            let mut f = base_factor(l, i);
            if let Some(dec) = decorations.get(k) {
                if dec.l0 == 0 && dec.spatial_size() == 1 && f.grad == 0 {
                    f.deriv += 1;
                    f.grad = 1;
                } else {
                    f.residual = dec.size();
                }
            }
            factors.push(f);
        }
        factors.sort();
        FunctionalSignature { factors, open_slots: a.label_size(Label::D) as u32 }
    }

    /// Depends on ψ and ∂ψ only.
    pub fn is_local(&self) -> bool {
        self.factors.iter().all(|f| f.residual == 0)
    }

    pub fn gradient_count(&self) -> u32 {
        self.factors.iter().map(|f| f.grad).sum()
    }

    /// Factors merged by (function, derivative, residual): (factor with summed
    /// gradient count, power).
    fn grouped(&self) -> Vec<(Factor, u32)> {
        let mut out: Vec<(Factor, u32)> = Vec::new();
        for f in &self.factors {
            match out.last_mut() {
                Some((g, n)) if (g.func, g.deriv, g.residual) == (f.func, f.deriv, f.residual) => {
                    *n += 1;
                    g.grad += f.grad;
                }
                _ => out.push((*f, 1)),
            }
        }
        out
    }

    /// Short form such as "h·h′" listing only the function factors.
    pub fn compact(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for f in &self.factors {
            parts.push(format!("{}{}", f.func.name(), primes(f.deriv)));
        }
        let mut s = parts.join("·");
        let g = self.gradient_count();
        if g > 0 {
            write!(s, "·(∂ψ){}", if g > 1 { superscript(g) } else { String::new() }).unwrap();
        }
        s
    }

    /// Human readable form, e.g. "g′(ψ)·(∂ψ)²·h(ψ)".
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (f, pow) in self.grouped() {
            let mut s = format!("{}{}(ψ)", f.func.name(), primes(f.deriv));
            if pow > 1 {
                s = format!("{s}{}", superscript(pow));
            }
            if f.grad > 0 {
                s.push_str("·(∂ψ)");
                if f.grad > 1 {
                    s.push_str(&superscript(f.grad));
                }
            }
            if f.residual > 0 {
                s = format!("∂^{}[{s}]", f.residual);
            }
            parts.push(s);
        }
        parts.join("·")
    }
}
