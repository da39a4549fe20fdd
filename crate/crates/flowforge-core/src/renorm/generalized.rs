//! Insertion index set of a generalized multi-index (a, 𝔩ᵃ, s, t = 1).
//!
//! Vertices of a are matched to those of b and c as in the plain insertion
//! with σ the identity: in group (k, i) the first b^k_i − [(k,i) = (k0,k0)]
//! copies belong to b, the last copy of (k1, k1) is the vertex z where c is
//! inserted, and the rest belong to c. A decoration on a c-side vertex y is
//! split along x − y = (x − z) + (z − w) + (w − y) into 𝔪ᵇ + 𝔪ᵈ + 𝔪ᶜ.

use super::{decoration_size, GenMultiIndex, SpaceTimeIndex};
use crate::error::{Error, Result};
use crate::flowgen::{insertion_index_set, Derivator};
use crate::multiindex::{Label, PreMultiIndex};
use crate::params::{binomial, factorial, ModelParams, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenInsertionTerm {
    pub b: GenMultiIndex,
    pub c: GenMultiIndex,
    pub d: Derivator,
    /// Polynomial weight (z − w)^{𝔩ᵈ} carried by the derivative of Ġ_μ.
    pub l_d: SpaceTimeIndex,
    pub multiplicity: u128,
    /// b^{k0}_{k0}·(1 + [(k0,k1) = (e,f)])·s!/(s1!·s2!)
    pub prefactor: Rational,
    /// Multinomial weight from regrouping the normalized monomials.
    pub regroup: u128,
    pub deriv_count: u32,
}

#[derive(Clone, Copy)]
enum Side {
    B(usize),
    C(usize),
    Z,
}

/// Position of each vertex of a in the vertex lists of b and c.
fn vertex_map(a: &PreMultiIndex, b: &PreMultiIndex, d: &Derivator) -> Vec<Side> {
    let bverts = b.vertices();
    let cverts_start = |l: Label, i: usize, c: &PreMultiIndex| -> usize {
        c.vertices().iter().position(|&v| v == (l, i)).unwrap_or(0)
    };
    let c = {
        let r = a.shifted(d.k1_label, d.k1, -1).and_then(|x| x.shifted(d.k0_label, d.k0, 1)).unwrap();
        r.sub(b).unwrap()
    };
    let mut out = Vec::new();
    for (l, i, count) in a.types() {
        let special = (l, i) == (d.k0_label, d.k0);
        let nb = b.get(l, i) as usize - special as usize;
        let bstart = bverts.iter().position(|&v| v == (l, i)).unwrap_or(0);
        let cstart = cverts_start(l, i, &c);
        for j in 0..count as usize {
            if j < nb {
                out.push(Side::B(bstart + j));
            } else if (l, i) == (d.k1_label, d.k1) && j == count as usize - 1 {
                out.push(Side::Z);
            } else {
                out.push(Side::C(cstart + j - nb));
            }
        }
    }
    out
}

/// All ordered splits of one index into (𝔪ᵇ, 𝔪ᶜ, 𝔪ᵈ).
fn splits3(l: &SpaceTimeIndex) -> Vec<[SpaceTimeIndex; 3]> {
    let comps: Vec<u32> = l.components().collect();
    let mut out = Vec::new();
    let mut cur = vec![[0u32; 3]; comps.len()];
    fn rec(comps: &[u32], k: usize, cur: &mut Vec<[u32; 3]>, out: &mut Vec<[SpaceTimeIndex; 3]>) {
        if k == comps.len() {
            let mk = |s: usize| SpaceTimeIndex { l0: cur[0][s], spatial: cur[1..].iter().map(|x| x[s]).collect() };
            out.push([mk(0), mk(1), mk(2)]);
            return;
        }
        for x in 0..=comps[k] {
            for y in 0..=comps[k] - x {
                cur[k] = [x, y, comps[k] - x - y];
                rec(comps, k + 1, cur, out);
            }
        }
    }
    rec(&comps, 0, &mut cur, &mut out);
    out
}

/// Componentwise multinomial (Σ parts)! / Π parts!.
fn multinomial(parts: &[&SpaceTimeIndex]) -> u128 {
    if parts.is_empty() {
        return 1;
    }
    let ncomp = parts[0].spatial.len() + 1;
    let mut acc: u128 = 1;
    for k in 0..ncomp {
        let mut total = 0u64;
        for p in parts {
            let x = p.components().nth(k).unwrap() as u64;
            total += x;
            acc *= binomial(total, x);
        }
    }
    acc
}

pub fn generalized_insertion_set(at: &GenMultiIndex, p: &ModelParams) -> Result<Vec<GenInsertionTerm>> {
    if at.t != 1 {
        return Err(Error::Contract("generalized insertion needs t = 1".into()));
    }
    let n = p.n;
    let mut out = Vec::new();
    for term in insertion_index_set(&at.a, p) {
        let map = vertex_map(&at.a, &term.b, &term.d);
        let bsize = term.b.size() as usize;
        let csize = term.c.size() as usize;
        // the b vertex standing for z: last copy of (k0, k0) in b
        let bverts = term.b.vertices();
        let bz = bverts.iter().rposition(|&v| v == (term.d.k0_label, term.d.k0)).unwrap();
        let cside: Vec<usize> = (0..map.len()).filter(|&k| matches!(map[k], Side::C(_))).collect();
        let zpos = (0..map.len()).find(|&k| matches!(map[k], Side::Z)).unwrap();
        let options: Vec<Vec<[SpaceTimeIndex; 3]>> = cside.iter().map(|&k| splits3(&at.decorations[k])).collect();
        let mut choice = vec![0usize; cside.len()];
        loop {
            let mut lb = vec![SpaceTimeIndex::zero(n); bsize];
            let mut lc = vec![SpaceTimeIndex::zero(n); csize];
            let mut ld = SpaceTimeIndex::zero(n);
            for (k, side) in map.iter().enumerate() {
                if let Side::B(j) = side {
                    lb[*j] = at.decorations[k].clone();
                }
            }
            lb[bz] = at.decorations[zpos].clone();
            let mut bparts = vec![at.decorations[zpos].clone()];
            let mut dparts = Vec::new();
            for (q, &k) in cside.iter().enumerate() {
                let [mb, mc, md] = &options[q][choice[q]];
                if let Side::C(j) = map[k] {
                    lc[j] = mc.clone();
                }
                lb[bz] = lb[bz].add(mb);
                ld = ld.add(md);
                bparts.push(mb.clone());
                dparts.push(md.clone());
            }
            let regroup =
                multinomial(&bparts.iter().collect::<Vec<_>>()) * multinomial(&dparts.iter().collect::<Vec<_>>());
            debug_assert_eq!(decoration_size(&at.decorations), decoration_size(&lb) + decoration_size(&lc) + ld.size());
            for s1 in 0..=at.s {
                let s2 = at.s - s1;
                let leibniz = factorial(at.s as u64) / (factorial(s1 as u64) * factorial(s2 as u64));
                out.push(GenInsertionTerm {
                    b: GenMultiIndex { a: term.b.clone(), decorations: lb.clone(), s: s1, t: 0 },
                    c: GenMultiIndex { a: term.c.clone(), decorations: lc.clone(), s: s2, t: 0 },
                    d: term.d,
                    l_d: ld.clone(),
                    multiplicity: term.multiplicity,
                    prefactor: term.prefactor * Rational::from_integer(leibniz as i64),
                    regroup,
                    deriv_count: term.deriv_count,
                });
            }
            let mut q = 0;
            loop {
                if q == choice.len() {
                    break;
                }
                choice[q] += 1;
                if choice[q] < options[q].len() {
                    break;
                }
                choice[q] = 0;
                q += 1;
            }
            if q == choice.len() {
                break;
            }
        }
    }
    Ok(out)
}
