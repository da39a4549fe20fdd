//! Derivators, insertion arithmetic and the flow hierarchy.

mod hierarchy;

pub use hierarchy::{
    build_hierarchy, build_hierarchy_with, hierarchy_node_count, Block, CompactTerm, FlowHierarchy, HierarchyNode,
    HierarchyOptions,
};

use std::cmp::Ordering;
use std::fmt;

use serde::ser::SerializeTuple;
use serde::{Serialize, Serializer};

use crate::multiindex::{Label, PreMultiIndex};
use crate::params::{ModelParams, Rational};

/// An insertion move (k0_label, k1_label, k0, k1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Derivator {
    pub k0_label: Label,
    pub k1_label: Label,
    pub k0: usize,
    pub k1: usize,
}

impl Derivator {
    pub fn raise(l: Label, k: usize) -> Self {
        Derivator { k0_label: l, k1_label: l, k0: k, k1: k + 1 }
    }

    pub fn relabel(from: Label, to: Label, k: usize) -> Self {
        Derivator { k0_label: from, k1_label: to, k0: k, k1: k }
    }

    pub fn is_valid(&self) -> bool {
        let relabel = matches!(
            (self.k0_label, self.k1_label),
            (Label::C, Label::D) | (Label::E, Label::F) | (Label::F, Label::G)
        );
        (self.k0_label == self.k1_label && self.k1 == self.k0 + 1) || (relabel && self.k1 == self.k0)
    }

    /// Power of the spatial derivative falling on Ġ_μ.
    pub fn deriv_count(&self) -> u32 {
        (self.k0 + 1 - self.k1) as u32
    }

    fn key(&self) -> (usize, Label, Label, usize) {
        (self.k0, self.k0_label, self.k1_label, self.k1)
    }
}

impl Ord for Derivator {
    fn cmp(&self, o: &Self) -> Ordering {
        self.key().cmp(&o.key())
    }
}

impl PartialOrd for Derivator {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Derivator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.k0_label, self.k1_label, self.k0, self.k1)
    }
}

impl Serialize for Derivator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        t.serialize_element(&self.k0_label.as_char().to_string())?;
        t.serialize_element(&self.k1_label.as_char().to_string())?;
        t.serialize_element(&self.k0)?;
        t.serialize_element(&self.k1)?;
        t.end()
    }
}

/// Every derivator with k0 ≤ kmax, canonically ordered.
pub fn derivator_slice(kmax: usize) -> Vec<Derivator> {
    let mut v = Vec::new();
    for k in 0..=kmax {
        for l in Label::ALL {
            v.push(Derivator::raise(l, k));
        }
        v.push(Derivator::relabel(Label::C, Label::D, k));
        v.push(Derivator::relabel(Label::E, Label::F, k));
        v.push(Derivator::relabel(Label::F, Label::G, k));
    }
    v.sort();
    v
}

/// b + d(𝐝), or `None` when b has no (k0_label, k0) vertex to consume.
pub fn apply_derivator(b: &PreMultiIndex, d: &Derivator) -> Option<PreMultiIndex> {
    b.shifted(d.k0_label, d.k0, -1)?.shifted(d.k1_label, d.k1, 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InsertionTerm {
    pub b: PreMultiIndex,
    pub c: PreMultiIndex,
    pub d: Derivator,
    /// Number of σ in 𝔖ᵃ giving this term, equal to a!.
    #[serde(rename = "mult", serialize_with = "ser_u128")]
    pub multiplicity: u128,
    /// b^{k0}_{k0}·(1 + [(k0,k1) = (e,f)]), the 1/a! already cancelled.
    #[serde(serialize_with = "ser_rational")]
    pub prefactor: Rational,
    #[serde(rename = "dx")]
    pub deriv_count: u32,
}

pub(crate) fn ser_rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&crate::params::fmt_rational(r))
}

pub(crate) fn ser_u128<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(*v) {
        Ok(x) => s.serialize_u64(x),
        Err(_) => s.serialize_str(&v.to_string()),
    }
}

/// Candidate derivators whose k1 vertex is present in `a`.
fn derivators_into(a: &PreMultiIndex) -> Vec<Derivator> {
    let mut v = Vec::new();
    for (l, i, _) in a.types() {
        if i >= 1 {
            v.push(Derivator::raise(l, i - 1));
        }
        match l {
            Label::D => v.push(Derivator::relabel(Label::C, Label::D, i)),
            Label::F => v.push(Derivator::relabel(Label::E, Label::F, i)),
            Label::G => v.push(Derivator::relabel(Label::F, Label::G, i)),
            _ => {}
        }
    }
    v
}

/// Every split a = b + c + d(𝐝) with b, c populated of order ≤ max_order and
/// a nonzero prefactor, in canonical order.
pub fn insertion_terms(a: &PreMultiIndex, max_order: u64) -> Vec<InsertionTerm> {
    if !a.is_populated() || a.order() == 0 {
        return Vec::new();
    }
    let mult = a.multifactorial();
    let mut out = Vec::new();
    for d in derivators_into(a) {
        // r = a − d(𝐝) = b + c
        let r = match a.shifted(d.k1_label, d.k1, -1).and_then(|x| x.shifted(d.k0_label, d.k0, 1)) {
            Some(r) => r,
            None => continue,
        };
        let kinds: Vec<(Label, usize, u32)> = r.types().collect();
        let mut take = vec![0u32; kinds.len()];
        loop {
            let b = PreMultiIndex::from_counts(kinds.iter().zip(&take).map(|(&(l, i, _), &c)| (l, i, c)));
            let bk0 = b.get(d.k0_label, d.k0);
            if bk0 >= 1 && b.is_populated() && b.order() <= max_order {
                let c = r.sub(&b).expect("b ≤ r");
                if !c.is_zero() && c.is_populated() && c.order() <= max_order {
                    let ef = d.k0_label == Label::E && d.k1_label == Label::F;
                    out.push(InsertionTerm {
                        prefactor: Rational::from_integer(bk0 as i64 * if ef { 2 } else { 1 }),
                        multiplicity: mult,
                        deriv_count: d.deriv_count(),
                        b,
                        c,
                        d,
                    });
                }
            }
            let mut j = 0;
            loop {
                if j == take.len() {
                    break;
                }
                if take[j] < kinds[j].2 {
                    take[j] += 1;
                    break;
                }
                take[j] = 0;
                j += 1;
            }
            if j == take.len() {
                break;
            }
        }
    }
    out.sort_by(|x, y| (&x.b, &x.c, &x.d).cmp(&(&y.b, &y.c, &y.d)));
    out
}

/// The index set Ind(a) with b, c ∈ 𝓜 (order ≤ Γ).
pub fn insertion_index_set(a: &PreMultiIndex, p: &ModelParams) -> Vec<InsertionTerm> {
    insertion_terms(a, p.gamma as u64)
}

/// Admissible offset window [−2μ²𝔬(a), 0] for argument times relative to x₀.
pub fn support_window(a: &PreMultiIndex, mu: Rational) -> (Rational, Rational) {
    let lo = -Rational::from_integer(2 * a.order() as i64) * mu * mu;
    (lo, Rational::from_integer(0))
}
