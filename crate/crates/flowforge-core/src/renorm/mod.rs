//! Generalized multi-indices, relevance, Taylor localization and the
//! counterterm catalog.

mod generalized;
mod localization;
mod signature;

pub use generalized::{generalized_insertion_set, GenInsertionTerm};
pub use localization::{localization_order, taylor_localization, LocalizationExpansion};
pub use signature::{Factor, Func, FunctionalSignature};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::multiindex::{for_each_populated, Label, PreMultiIndex, WeightBudget};
use crate::params::{ModelParams, Rational};

/// Space-time multi-index (l0; l1..ln) with parabolic size 2·l0 + Σ li.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpaceTimeIndex {
    pub l0: u32,
    pub spatial: Vec<u32>,
}

impl SpaceTimeIndex {
    pub fn zero(n: u32) -> Self {
        SpaceTimeIndex { l0: 0, spatial: vec![0; n as usize] }
    }

    pub fn new(l0: u32, spatial: Vec<u32>) -> Self {
        SpaceTimeIndex { l0, spatial }
    }

    pub fn size(&self) -> u32 {
        2 * self.l0 + self.spatial.iter().sum::<u32>()
    }

    pub fn spatial_size(&self) -> u32 {
        self.spatial.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.size() == 0
    }

    pub fn components(&self) -> impl Iterator<Item = u32> + '_ {
        std::iter::once(self.l0).chain(self.spatial.iter().copied())
    }

    fn from_components(c: &[u32]) -> Self {
        SpaceTimeIndex { l0: c[0], spatial: c[1..].to_vec() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let c: Vec<u32> = self.components().zip(o.components()).map(|(x, y)| x + y).collect();
        Self::from_components(&c)
    }

    /// Every index in dimension n with parabolic size ≤ max, sorted.
    pub fn all_up_to(n: u32, max: u32) -> Vec<SpaceTimeIndex> {
        let mut out = Vec::new();
        let mut comps = vec![0u32; n as usize + 1];
        fn rec(pos: usize, left: u32, comps: &mut Vec<u32>, out: &mut Vec<SpaceTimeIndex>) {
            if pos == comps.len() {
                out.push(SpaceTimeIndex::from_components(comps));
                return;
            }
            let w = if pos == 0 { 2 } else { 1 };
            let mut v = 0;
            while v * w <= left {
                comps[pos] = v;
                rec(pos + 1, left - v * w, comps, out);
                v += 1;
            }
            comps[pos] = 0;
        }
        rec(0, max, &mut comps, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for SpaceTimeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({};", self.l0)?;
        for (i, x) in self.spatial.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for SpaceTimeIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<u32> = self.components().collect();
        v.serialize(s)
    }
}

pub fn decoration_size(l: &[SpaceTimeIndex]) -> u32 {
    l.iter().map(SpaceTimeIndex::size).sum()
}

/// (a, 𝔩ᵃ, s, t): decorations are listed per vertex of [a] in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GenMultiIndex {
    pub a: PreMultiIndex,
    pub decorations: Vec<SpaceTimeIndex>,
    pub s: u8,
    pub t: u8,
}

impl GenMultiIndex {
    pub fn new(a: PreMultiIndex, decorations: Vec<SpaceTimeIndex>, s: u8, t: u8) -> Result<Self> {
        if !a.is_populated() {
            return Err(Error::Domain(format!("{a} is not populated")));
        }
        if decorations.len() as u64 != a.size() {
            return Err(Error::Domain(format!("{} decorations for {} vertices", decorations.len(), a.size())));
        }
        if s > 2 || t > 1 {
            return Err(Error::Domain(format!("s = {s}, t = {t} outside {{0,1,2}} x {{0,1}}")));
        }
        Ok(GenMultiIndex { a, decorations, s, t })
    }

    pub fn plain(a: PreMultiIndex, n: u32, s: u8, t: u8) -> Result<Self> {
        let d = vec![SpaceTimeIndex::zero(n); a.size() as usize];
        Self::new(a, d, s, t)
    }

    pub fn decoration_size(&self) -> u32 {
        decoration_size(&self.decorations)
    }

    /// |a| + |𝔩ᵃ|
    pub fn scaling(&self, alpha: Rational) -> Rational {
        self.a.scaling(alpha) + Rational::from_integer(self.decoration_size() as i64)
    }

    /// Sort decorations inside each vertex group (k, i), the representative
    /// of the 𝔖ᵃ orbit.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        canonicalize(&self.a, &mut out.decorations);
        out
    }
}

pub fn canonicalize(a: &PreMultiIndex, l: &mut [SpaceTimeIndex]) {
    let mut start = 0;
    for (_, _, c) in a.types() {
        let end = start + c as usize;
        l[start..end].sort();
        start = end;
    }
}

/// Decorations of [a], one per symmetry class, with total size ≤ max.
pub fn canonical_decorations(a: &PreMultiIndex, n: u32, max: u32) -> Vec<Vec<SpaceTimeIndex>> {
    let verts = a.vertices();
    let cands = SpaceTimeIndex::all_up_to(n, max);
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(verts.len());
    fn rec(
        verts: &[(Label, usize)],
        cands: &[SpaceTimeIndex],
        left: u32,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<SpaceTimeIndex>>,
    ) {
        let k = cur.len();
        if k == verts.len() {
            out.push(cur.iter().map(|&j| cands[j].clone()).collect());
            return;
        }
        let lo = if k > 0 && verts[k - 1] == verts[k] { cur[k - 1] } else { 0 };
        for j in lo..cands.len() {
            let s = cands[j].size();
            if s > left {
                continue;
            }
            cur.push(j);
            rec(verts, cands, left - s, cur, out);
            cur.pop();
        }
    }
    rec(&verts, &cands, max, &mut cur, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountertermEntry {
    pub a: PreMultiIndex,
    pub decorations: Vec<SpaceTimeIndex>,
    pub order: u64,
    /// |a| + |𝔩ᵃ|
    pub scaling: Rational,
    pub ell: u32,
    pub signature: FunctionalSignature,
}

impl CountertermEntry {
    pub fn decoration_json(&self) -> String {
        serde_json::to_string(&self.decorations).expect("serializable")
    }

    /// (a_json, l_json, order, scaling_num, scaling_den, ell, signature)
    pub fn csv_record(&self) -> [String; 7] {
        [
            self.a.to_json(),
            self.decoration_json(),
            self.order.to_string(),
            self.scaling.numer().to_string(),
            self.scaling.denom().to_string(),
            self.ell.to_string(),
            self.signature.render(),
        ]
    }
}

pub const CSV_HEADER: [&str; 7] = ["a_json", "l_json", "order", "scaling_num", "scaling_den", "ell", "signature"];

/// Weight whose sum minus two is the scaling of a populated a.
pub fn relevance_budget(alpha: Rational, max: Rational) -> WeightBudget {
    let two = Rational::from_integer(2);
    let one = Rational::from_integer(1);
    let zero = Rational::from_integer(0);
    WeightBudget { weights: [two, two, one, two, one, zero, alpha], max }
}

/// All (a, 𝔩ᵃ) with 1 ≤ 𝔬(a) ≤ Γ and |a| + |𝔩ᵃ| ≤ 0, decorations up to symmetry.
pub fn enumerate_relevant(p: &ModelParams) -> Vec<CountertermEntry> {
    let budget = relevance_budget(p.alpha, Rational::from_integer(2));
    let mut base = Vec::new();
    for_each_populated(1, p.gamma, Some(&budget), |a| base.push(a));
    base.sort();
    let mut out = Vec::new();
    for a in base {
        let sa = a.scaling(p.alpha);
        let max = (-sa).floor().to_integer().max(0) as u32;
        for dec in canonical_decorations(&a, p.n, max) {
            let scaling = sa + Rational::from_integer(decoration_size(&dec) as i64);
            debug_assert!(scaling <= Rational::from_integer(0));
            let ell = localization_order(&a, &dec, p).expect("relevant entries have scaling above -2");
            let signature = FunctionalSignature::of(&a, &dec);
            out.push(CountertermEntry { order: a.order(), a: a.clone(), decorations: dec, scaling, ell, signature });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;

    fn h(v: &[u32]) -> PreMultiIndex {
        PreMultiIndex::from_entries(&[(Label::H, v)])
    }

    #[test]
    fn parabolic_sizes() {
        assert_eq!(SpaceTimeIndex::new(1, vec![2]).size(), 4);
        let all = SpaceTimeIndex::all_up_to(1, 2);
        assert_eq!(all.len(), 4); // (0;0) (0;1) (0;2) (1;0)
        assert_eq!(SpaceTimeIndex::all_up_to(2, 1).len(), 3);
    }

    #[test]
    fn canonical_decorations_quotient_symmetry() {
        // two identical h_0 vertices, total size ≤ 1, n = 1: (0,0), (0,e) only
        let a = PreMultiIndex::from_entries(&[(Label::H, &[2]), (Label::G, &[1])]);
        let decs = canonical_decorations(&a, 1, 1);
        assert_eq!(decs.len(), 3);
    }

    #[test]
    fn kpz_entry_present() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        let rel = enumerate_relevant(&p);
        let e = rel.iter().find(|e| e.a == h(&[1, 1]) && decoration_size(&e.decorations) == 0).unwrap();
        assert_eq!(e.scaling, rat(-1, 1));
        assert_eq!(e.signature.compact(), "h·h′");
        assert_eq!(e.ell, 2);
        assert!(rel.iter().all(|e| e.order >= 1 && e.order <= 8 && e.scaling <= rat(0, 1)));
        assert!(rel.iter().all(|e| e.signature.is_local()));
    }

    #[test]
    fn marginal_entry_at_alpha_one() {
        let p = ModelParams::new(rat(1, 1), 1).unwrap();
        let rel = enumerate_relevant(&p);
        assert!(rel.iter().any(|e| e.a == h(&[1, 1]) && e.scaling == rat(0, 1) && e.ell == 1));
    }
}
