//! Sequences, pre-multi-indices and their characteristics.

mod enumerate;
mod tree;

pub use enumerate::{count_populated_by_order, enumerate, enumerate_brute_force, for_each_populated, WeightBudget};
pub use tree::{check_population_equivalence, tree_count, EquivalenceReport, TreeCounter};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::params::{factorial, ModelParams, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Label {
    pub const ALL: [Label; 7] = [Label::B, Label::C, Label::D, Label::E, Label::F, Label::G, Label::H];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        Label::ALL[i]
    }

    pub fn as_char(self) -> char {
        (b'b' + self as u8) as char
    }

    pub fn from_char(c: char) -> Option<Label> {
        match c {
            'b'..='h' => Some(Label::ALL[(c as u8 - b'b') as usize]),
            _ => None,
        }
    }

    /// Children beyond the index: a vertex (k, i) has i + extra(k) children.
    pub fn extra_children(self) -> u32 {
        match self {
            Label::D | Label::F => 1,
            Label::G => 2,
            _ => 0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Finitely supported sequence of counts, stored densely with trailing zeros stripped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence(Vec<u32>);

impl Sequence {
    pub fn new(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Sequence(v)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of i·q_i.
    pub fn order(&self) -> u64 {
        self.0.iter().enumerate().map(|(i, &q)| i as u64 * q as u64).sum()
    }

    /// Sum of q_i.
    pub fn size(&self) -> u64 {
        self.0.iter().map(|&q| q as u64).sum()
    }

    /// Largest index in the support, 0 for the zero sequence.
    pub fn length(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// Add `delta` at index `i`; `None` if the entry would go negative.
    pub fn shifted(&self, i: usize, delta: i64) -> Option<Sequence> {
        let cur = self.get(i) as i64 + delta;
        if cur < 0 {
            return None;
        }
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = cur as u32;
        Some(Sequence::new(v))
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct PreMultiIndex {
    seqs: [Sequence; 7],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Characteristics {
    pub order: u64,
    pub size: u64,
    pub length: usize,
    #[serde(serialize_with = "ser_rational")]
    pub scaling: Rational,
}

fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&crate::params::fmt_rational(r))
}

impl PreMultiIndex {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(label: Label, i: usize) -> Self {
        let mut a = Self::zero();
        a.seqs[label.index()] = Sequence::default().shifted(i, 1).unwrap();
        a
    }

    /// Build from (label, dense entries) pairs; labels not listed are zero.
    pub fn from_entries(entries: &[(Label, &[u32])]) -> Self {
        let mut a = Self::zero();
        for (l, v) in entries {
            a.seqs[l.index()] = Sequence::new(v.to_vec());
        }
        a
    }

    /// Build from a type-count list of (label, index, count).
    pub fn from_counts(counts: impl IntoIterator<Item = (Label, usize, u32)>) -> Self {
        let mut dense: [Vec<u32>; 7] = Default::default();
        for (l, i, c) in counts {
            let v = &mut dense[l.index()];
            if v.len() <= i {
                v.resize(i + 1, 0);
            }
            v[i] += c;
        }
        PreMultiIndex { seqs: dense.map(Sequence::new) }
    }

    pub fn seq(&self, l: Label) -> &Sequence {
        &self.seqs[l.index()]
    }

    pub fn get(&self, l: Label, i: usize) -> u32 {
        self.seqs[l.index()].get(i)
    }

    pub fn is_zero(&self) -> bool {
        self.seqs.iter().all(Sequence::is_zero)
    }

    /// Add `delta` copies of vertex (l, i); `None` if a count turns negative.
    pub fn shifted(&self, l: Label, i: usize, delta: i64) -> Option<Self> {
        let mut out = self.clone();
        out.seqs[l.index()] = self.seqs[l.index()].shifted(i, delta)?;
        Some(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_counts(self.types().chain(other.types()))
    }

    /// Componentwise difference, `None` if negative anywhere.
    pub fn sub(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (l, i, c) in other.types() {
            out = out.shifted(l, i, -(c as i64))?;
        }
        Some(out)
    }

    /// Nonzero entries as (label, index, count) in canonical order.
    pub fn types(&self) -> impl Iterator<Item = (Label, usize, u32)> + '_ {
        Label::ALL.iter().flat_map(move |&l| {
            self.seqs[l.index()].entries().iter().enumerate().filter(|(_, &c)| c > 0).map(move |(i, &c)| (l, i, c))
        })
    }

    /// The vertex set [a] expanded in canonical order (label, index, copy).
    pub fn vertices(&self) -> Vec<(Label, usize)> {
        let mut v = Vec::new();
        for (l, i, c) in self.types() {
            for _ in 0..c {
                v.push((l, i));
            }
        }
        v
    }

    pub fn label_size(&self, l: Label) -> u64 {
        self.seqs[l.index()].size()
    }

    pub fn size(&self) -> u64 {
        self.seqs.iter().map(Sequence::size).sum()
    }

    pub fn order(&self) -> u64 {
        let base: u64 = self.seqs.iter().map(Sequence::order).sum();
        base + self.label_size(Label::D) + self.label_size(Label::F) + 2 * self.label_size(Label::G)
    }

    pub fn length(&self) -> usize {
        self.seqs.iter().map(Sequence::length).max().unwrap_or(0)
    }

    pub fn is_populated(&self) -> bool {
        self.size() == self.order() + 1
    }

    /// Scaling from the full definition, exact in α.
    pub fn scaling(&self, alpha: Rational) -> Rational {
        let r = |x: u64| Rational::from_integer(x as i64);
        let two = r(2);
        let s = |l| r(self.label_size(l));
        -(two - alpha) * r(self.size())
            + two * r(self.order())
            + (two - alpha) * (s(Label::B) + s(Label::C) + s(Label::E))
            + (r(1) - alpha) * (s(Label::D) + s(Label::F))
            - alpha * s(Label::G)
    }

    /// Reduced form of the scaling, valid for populated a.
    pub fn scaling_reduced(&self, alpha: Rational) -> Rational {
        let r = |x: u64| Rational::from_integer(x as i64);
        let s = |l| r(self.label_size(l));
        r(0) - r(2)
            + alpha * s(Label::H)
            + (s(Label::D) + s(Label::F))
            + r(2) * (s(Label::B) + s(Label::C) + s(Label::E))
    }

    pub fn characteristics(&self, p: &ModelParams) -> Characteristics {
        Characteristics {
            order: self.order(),
            size: self.size(),
            length: self.length(),
            scaling: self.scaling(p.alpha),
        }
    }

    /// n^{s(a^d)+s(a^f)} · (n(n+1)/2)^{s(a^g)}
    pub fn hilbert_dim(&self, n: u32) -> u128 {
        let n = n as u128;
        let e1 = (self.label_size(Label::D) + self.label_size(Label::F)) as u32;
        let e2 = self.label_size(Label::G) as u32;
        n.pow(e1) * (n * (n + 1) / 2).pow(e2)
    }

    pub fn multifactorial(&self) -> u128 {
        self.types().map(|(_, _, c)| factorial(c as u64)).product()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

pub fn characteristics(a: &PreMultiIndex, p: &ModelParams) -> Characteristics {
    a.characteristics(p)
}

pub fn is_populated(a: &PreMultiIndex) -> bool {
    a.is_populated()
}

pub fn hilbert_dim(a: &PreMultiIndex, n: u32) -> u128 {
    a.hilbert_dim(n)
}

pub fn multifactorial(a: &PreMultiIndex) -> u128 {
    a.multifactorial()
}

/// The scaling lower bound in terms of order and label sizes.
pub fn scaling_lower_bound(a: &PreMultiIndex, alpha: Rational) -> Rational {
    let r = |x: u64| Rational::from_integer(x as i64);
    let s = |l| r(a.label_size(l));
    r(0) - r(2)
        + alpha
        + alpha / 2 * r(a.order())
        + (r(2) - alpha) * (s(Label::B) + s(Label::C) + s(Label::E))
        + (r(1) - alpha) * (s(Label::D) + s(Label::F))
}

impl Ord for PreMultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order().cmp(&other.order()).then_with(|| self.types().cmp(other.types()))
    }
}

impl PartialOrd for PreMultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PreMultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for PreMultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for l in Label::ALL {
            let s = self.seq(l);
            if s.is_zero() {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{}{:?}", l, s.entries())?;
        }
        Ok(())
    }
}

impl Serialize for PreMultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let nonzero = Label::ALL.iter().filter(|l| !self.seq(**l).is_zero()).count();
        let mut m = s.serialize_map(Some(nonzero))?;
        for l in Label::ALL {
            let seq = self.seq(l);
            if !seq.is_zero() {
                m.serialize_entry(&l.as_char().to_string(), seq.entries())?;
            }
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for PreMultiIndex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, Vec<u32>> = BTreeMap::deserialize(d)?;
        let mut a = PreMultiIndex::zero();
        for (k, v) in raw {
            let mut chars = k.chars();
            let label = match (chars.next(), chars.next()) {
                (Some(c), None) => Label::from_char(c),
                _ => None,
            }
            .ok_or_else(|| D::Error::custom(format!("unknown label {k:?}")))?;
            a.seqs[label.index()] = Sequence::new(v);
        }
        Ok(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;

    fn h(v: &[u32]) -> PreMultiIndex {
        PreMultiIndex::from_entries(&[(Label::H, v)])
    }

    #[test]
    fn characteristics_examples() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let c = PreMultiIndex::unit(Label::H, 0).characteristics(&p);
        assert_eq!((c.order, c.size, c.scaling), (0, 1, rat(-3, 2)));
        for alpha in [rat(1, 2), rat(3, 4), rat(1, 1)] {
            assert_eq!(PreMultiIndex::unit(Label::E, 0).scaling(alpha), rat(0, 1));
        }
        let a = h(&[1, 1]);
        let c = a.characteristics(&p);
        assert_eq!((c.order, c.size, c.scaling), (1, 2, rat(-1, 1)));
        assert_eq!(a.scaling_reduced(p.alpha), rat(-1, 1));
    }

    #[test]
    fn population_examples() {
        assert!(h(&[2, 1, 1]).is_populated());
        assert!(!h(&[2, 1, 0]).is_populated());
        assert!(PreMultiIndex::unit(Label::B, 0).is_populated());
        assert!(!PreMultiIndex::unit(Label::G, 0).is_populated());
    }

    #[test]
    fn dims_and_factorials() {
        assert_eq!(h(&[2, 1]).hilbert_dim(3), 1);
        let a = PreMultiIndex::from_entries(&[(Label::D, &[1]), (Label::G, &[1])]);
        assert_eq!(a.hilbert_dim(2), 6);
        assert_eq!(PreMultiIndex::from_entries(&[(Label::F, &[1, 1])]).hilbert_dim(3), 9);
        assert_eq!(h(&[2, 1, 1]).multifactorial(), 2);
        assert_eq!(PreMultiIndex::unit(Label::C, 4).multifactorial(), 1);
        assert_eq!(PreMultiIndex::from_entries(&[(Label::E, &[3])]).multifactorial(), 6);
    }

    #[test]
    fn json_round_trip() {
        let a = PreMultiIndex::from_entries(&[(Label::D, &[0, 2]), (Label::H, &[1, 0, 1])]);
        let s = a.to_json();
        assert_eq!(s, r#"{"d":[0,2],"h":[1,0,1]}"#);
        assert_eq!(PreMultiIndex::from_json(&s).unwrap(), a);
        assert_eq!(PreMultiIndex::from_json(r#"{"b":[],"h":[1,0,1,0]}"#).unwrap(), h(&[1, 0, 1]));
        assert!(PreMultiIndex::from_json(r#"{"x":[1]}"#).is_err());
    }

    #[test]
    fn ordering_is_by_order_first() {
        let mut v = [h(&[1, 1]), PreMultiIndex::unit(Label::H, 0), PreMultiIndex::unit(Label::B, 0)];
        v.sort();
        assert_eq!(v[2], h(&[1, 1]));
        assert_eq!(v[0], PreMultiIndex::unit(Label::B, 0));
    }
}
