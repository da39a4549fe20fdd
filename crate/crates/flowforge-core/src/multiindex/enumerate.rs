//! Enumeration of populated multi-indices.
//!
//! A populated a is a tree's vertex multiset, so its leaf count is fixed by
//! the internal vertices: leaves = 𝔬(a) + 1 − #internal. We choose internal
//! vertex counts under the order budget, then spread the leaves over the
//! four leaf types b_0, c_0, e_0, h_0.

use super::{Label, PreMultiIndex};
use crate::params::{binomial, ModelParams, Rational};

/// Nonnegative per-label weights with an upper bound on the total weight.
#[derive(Debug, Clone)]
pub struct WeightBudget {
    pub weights: [Rational; 7],
    pub max: Rational,
}

const LEAF_TYPES: [Label; 4] = [Label::B, Label::C, Label::E, Label::H];

fn internal_types(max_order: u32) -> Vec<(Label, usize, u32)> {
    let mut v = Vec::new();
    for l in Label::ALL {
        let extra = l.extra_children();
        for i in 0..=max_order as usize {
            let deg = i as u32 + extra;
            if deg >= 1 && deg <= max_order {
                v.push((l, i, deg));
            }
        }
    }
    v
}

/// Call `f` on every populated a with min_order ≤ 𝔬(a) ≤ max_order whose
/// weight stays within `budget`. The visiting order is unspecified.
pub fn for_each_populated<F: FnMut(PreMultiIndex)>(
    min_order: u32,
    max_order: u32,
    budget: Option<&WeightBudget>,
    mut f: F,
) {
    let types = internal_types(max_order);
    let mut counts = vec![0u32; types.len()];
    let zero = Rational::from_integer(0);
    internal(&types, 0, &mut counts, 0, 0, zero, min_order, max_order, budget, &mut f);
}

#[allow(clippy::too_many_arguments)]
fn internal<F: FnMut(PreMultiIndex)>(
    types: &[(Label, usize, u32)],
    pos: usize,
    counts: &mut Vec<u32>,
    order: u32,
    n_internal: u32,
    weight: Rational,
    min_order: u32,
    max_order: u32,
    budget: Option<&WeightBudget>,
    f: &mut F,
) {
    if pos == types.len() {
        if order < min_order {
            return;
        }
        let leaves = order + 1 - n_internal;
        let mut leaf_counts = [0u32; 4];
        spread_leaves(types, counts, &mut leaf_counts, 0, leaves, weight, budget, f);
        return;
    }
    let (l, _, deg) = types[pos];
    let w = budget.map(|b| b.weights[l.index()]).unwrap_or_default();
    let mut c = 0u32;
    let mut o = order;
    let mut wt = weight;
    loop {
        counts[pos] = c;
        internal(types, pos + 1, counts, o, n_internal + c, wt, min_order, max_order, budget, f);
        o += deg;
        wt += w;
        if o > max_order {
            break;
        }
        if let Some(b) = budget {
            if wt > b.max {
                break;
            }
        }
        c += 1;
    }
    counts[pos] = 0;
}

#[allow(clippy::too_many_arguments)]
fn spread_leaves<F: FnMut(PreMultiIndex)>(
    types: &[(Label, usize, u32)],
    counts: &[u32],
    leaf_counts: &mut [u32; 4],
    pos: usize,
    left: u32,
    weight: Rational,
    budget: Option<&WeightBudget>,
    f: &mut F,
) {
    if pos == 3 {
        if let Some(b) = budget {
            if weight + b.weights[Label::H.index()] * Rational::from_integer(left as i64) > b.max {
                return;
            }
        }
        leaf_counts[3] = left;
        let it = types
            .iter()
            .zip(counts)
            .filter(|(_, &c)| c > 0)
            .map(|(&(l, i, _), &c)| (l, i, c))
            .chain(LEAF_TYPES.iter().zip(leaf_counts.iter()).filter(|(_, &c)| c > 0).map(|(&l, &c)| (l, 0, c)));
        f(PreMultiIndex::from_counts(it));
        return;
    }
    let w = budget.map(|b| b.weights[LEAF_TYPES[pos].index()]).unwrap_or_default();
    let mut wt = weight;
    for c in 0..=left {
        if let Some(b) = budget {
            if wt > b.max {
                break;
            }
        }
        leaf_counts[pos] = c;
        spread_leaves(types, counts, leaf_counts, pos + 1, left - c, wt, budget, f);
        wt += w;
    }
    leaf_counts[pos] = 0;
}

/// All populated a with 𝔬(a) ≤ k, in canonical order.
pub fn enumerate(_p: &ModelParams, k: u32) -> Vec<PreMultiIndex> {
    let mut v = Vec::new();
    for_each_populated(0, k, None, |a| v.push(a));
    v.sort_unstable();
    v
}

/// Generate-and-filter over the box of multisets with entries indexed ≤ k and
/// total size ≤ k+1. Slow; used as an independent check of `enumerate`.
pub fn enumerate_brute_force(k: u32) -> Vec<PreMultiIndex> {
    let types: Vec<(Label, usize)> = Label::ALL.iter().flat_map(|&l| (0..=k as usize).map(move |i| (l, i))).collect();
    let mut out = Vec::new();
    let mut counts = vec![0u32; types.len()];
    fn rec(
        types: &[(Label, usize)],
        pos: usize,
        left: u32,
        counts: &mut Vec<u32>,
        k: u32,
        out: &mut Vec<PreMultiIndex>,
    ) {
        if pos == types.len() {
            let a = PreMultiIndex::from_counts(
                types.iter().zip(counts.iter()).filter(|(_, &c)| c > 0).map(|(&(l, i), &c)| (l, i, c)),
            );
            if !a.is_zero() && a.is_populated() && a.order() <= k as u64 {
                out.push(a);
            }
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            rec(types, pos + 1, left - c, counts, k, out);
        }
        counts[pos] = 0;
    }
    rec(&types, 0, k + 1, &mut counts, k, &mut out);
    out.sort_unstable();
    out
}

/// Number of populated multi-indices of each order 0..=k, by a generating
/// function count that never builds the multi-indices.
pub fn count_populated_by_order(k: u32) -> Vec<u128> {
    let k = k as usize;
    // p[o][m]: multisets of internal vertices with total outdegree o and m vertices
    let mut p = vec![vec![0u128; k + 1]; k + 1];
    p[0][0] = 1;
    for deg in 1..=k {
        let ntypes = if deg == 1 { 6 } else { 7 };
        for _ in 0..ntypes {
            for o in deg..=k {
                for m in 1..=k {
                    p[o][m] += p[o - deg][m - 1];
                }
            }
        }
    }
    (0..=k)
        .map(|o| {
            (0..=o)
                .map(|m| {
                    let leaves = (o + 1 - m) as u64;
                    p[o][m] * binomial(leaves + 3, 3)
                })
                .sum()
        })
        .collect()
}
