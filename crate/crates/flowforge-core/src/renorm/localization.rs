use super::{decoration_size, SpaceTimeIndex};
use crate::error::{Error, Result};
use crate::multiindex::PreMultiIndex;
use crate::params::{binomial, ModelParams, Rational};

/// Taylor expansion of X^𝔩 f around the diagonal: the δ-part with
/// |𝔩+𝔪| < ℓ and the integral remainder with |𝔩+𝔪| = ℓ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalizationExpansion {
    pub ell: u32,
    pub delta: Vec<(Vec<SpaceTimeIndex>, u128)>,
    pub remainder: Vec<(Vec<SpaceTimeIndex>, u128)>,
}

/// Smallest ℓ ∈ {1, 2} with |a| + |𝔩ᵃ| + ℓ > 0.
pub fn localization_order(a: &PreMultiIndex, decorations: &[SpaceTimeIndex], p: &ModelParams) -> Result<u32> {
    let s = a.scaling(p.alpha) + Rational::from_integer(decoration_size(decorations) as i64);
    if s <= Rational::from_integer(-2) {
        return Err(Error::Domain(format!("combined scaling {s} is at most -2")));
    }
    if s > Rational::from_integer(0) {
        return Err(Error::Domain(format!("combined scaling {s} is not relevant")));
    }
    Ok(if s + 1 > Rational::from_integer(0) { 1 } else { 2 })
}

fn binom_index(l: &SpaceTimeIndex, m: &SpaceTimeIndex) -> u128 {
    l.components().zip(m.components()).map(|(l, m)| binomial((l + m) as u64, l as u64)).product()
}

/// Enumerate every 𝔪ᵃ with |𝔩ᵃ + 𝔪ᵃ| ≤ ℓ over the vertices carrying 𝔩ᵃ.
pub fn taylor_localization(decorations: &[SpaceTimeIndex], ell: u32, n: u32) -> LocalizationExpansion {
    let base = decoration_size(decorations);
    let mut out = LocalizationExpansion { ell, delta: Vec::new(), remainder: Vec::new() };
    if base > ell {
        return out;
    }
    let budget = ell - base;
    let cands = SpaceTimeIndex::all_up_to(n, budget);
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        decs: &[SpaceTimeIndex],
        cands: &[SpaceTimeIndex],
        left: u32,
        budget: u32,
        cur: &mut Vec<usize>,
        out: &mut LocalizationExpansion,
    ) {
        if cur.len() == decs.len() {
            let m: Vec<SpaceTimeIndex> = cur.iter().map(|&j| cands[j].clone()).collect();
            let coeff: u128 = decs.iter().zip(&m).map(|(l, m)| binom_index(l, m)).product();
            let msize = budget - left;
            if msize < budget {
                out.delta.push((m, coeff));
            } else {
                // with 𝔪 = 0 there is no integral, the term is X^𝔩 f itself
                out.remainder.push((m, msize.max(1) as u128 * coeff));
            }
            return;
        }
        for j in 0..cands.len() {
            let s = cands[j].size();
            if s <= left {
                cur.push(j);
                rec(decs, cands, left - s, budget, cur, out);
                cur.pop();
            }
        }
    }
    rec(decorations, &cands, budget, budget, &mut cur, &mut out);
    out
}
