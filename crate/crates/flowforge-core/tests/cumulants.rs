use flowforge_core::cumulant::{
    classify_cumulants, cumulant_flow_index_set, cumulant_scaling, list_order, q_partitions, vanishes_identically,
    CumulantList, FlowCase,
};
use flowforge_core::multiindex::{enumerate, Label, PreMultiIndex};
use flowforge_core::params::rat;
use flowforge_core::renorm::GenMultiIndex;
use flowforge_core::{Exec, ModelParams, Rational};
use proptest::prelude::*;

/// Finite probability space: weights and the values of each variable per outcome.
#[derive(Debug, Clone)]
struct Space {
    prob: Vec<f64>,
    vars: Vec<Vec<f64>>,
}

impl Space {
    fn moment(&self, mask: u32) -> f64 {
        (0..self.prob.len())
            .map(|w| {
                let mut x = self.prob[w];
                for (v, vals) in self.vars.iter().enumerate() {
                    if mask & (1 << v) != 0 {
                        x *= vals[w];
                    }
                }
                x
            })
            .sum()
    }

    /// m(S) = Σ_{B ∋ min S} κ(B)·m(S∖B), solved for κ(S).
    fn cumulant(&self, mask: u32, memo: &mut std::collections::HashMap<u32, f64>) -> f64 {
        if let Some(&k) = memo.get(&mask) {
            return k;
        }
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut acc = self.moment(mask);
        let mut sub = rest;
        // proper subsets B of S containing min S
        loop {
            let b = sub | low;
            if b != mask {
                acc -= self.cumulant(b, memo) * self.moment(mask ^ b);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        memo.insert(mask, acc);
        acc
    }
}

fn space_strategy(vars: usize) -> impl Strategy<Value = Space> {
    (2usize..6).prop_flat_map(move |w| {
        (prop::collection::vec(0.05f64..1.0, w), prop::collection::vec(prop::collection::vec(-2.0f64..2.0, w), vars))
            .prop_map(|(p, vars)| {
                let s: f64 = p.iter().sum();
                Space { prob: p.into_iter().map(|x| x / s).collect(), vars }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cumulant_of_product_expands_over_q_partitions(sp in space_strategy(5), ni in 0usize..3) {
        // variables 0..ni are the X's, ni..5 are the Y's (at least two)
        let nj = 5 - ni;
        let mut prod = vec![1.0; sp.prob.len()];
        for j in 0..nj {
            for (x, y) in prod.iter_mut().zip(&sp.vars[ni + j]) {
                *x *= y;
            }
        }
        let mut lhs_vars: Vec<Vec<f64>> = sp.vars[..ni].to_vec();
        lhs_vars.push(prod);
        let lhs_space = Space { prob: sp.prob.clone(), vars: lhs_vars };
        let lhs = lhs_space.cumulant((1 << (ni + 1)) - 1, &mut Default::default());

        let is: Vec<usize> = (0..ni).collect();
        let js: Vec<usize> = (ni..5).collect();
        let mut memo = Default::default();
        let mut rhs = 0.0;
        for q in q_partitions(&is, &js).unwrap() {
            let mut term = 1.0;
            for k in 0..q.rho.len() {
                let mut mask = 0u32;
                for i in q.pi_block(&is, k) {
                    mask |= 1 << i;
                }
                for &j in &q.rho.blocks[k] {
                    mask |= 1 << j;
                }
                term *= sp.cumulant(mask, &mut memo);
            }
            rhs += term;
        }
        prop_assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()), "{} vs {}", lhs, rhs);
    }
}

fn h(v: &[u32]) -> PreMultiIndex {
    PreMultiIndex::from_entries(&[(Label::H, v)])
}

#[test]
fn covariance_list_marginal_only_at_reference_point() {
    let cov = |n: u32| {
        let e = GenMultiIndex::plain(PreMultiIndex::unit(Label::H, 0), n, 0, 0).unwrap();
        vec![e.clone(), e]
    };
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    assert_eq!(cumulant_scaling(&cov(1), &p), rat(0, 1));
    let p = ModelParams::new(rat(3, 4), 1).unwrap();
    // above 1/2 the covariance sits just below zero, by (2 - 2α)ι/(1 + ι)
    assert_eq!(cumulant_scaling(&cov(1), &p), rat(-1, 202));
    let p = ModelParams::new(rat(1, 1), 2).unwrap();
    assert_eq!(cumulant_scaling(&cov(2), &p), rat(0, 1));
}

#[test]
fn classification_across_alpha() {
    for (alpha, expect) in [
        (rat(1, 5), false),
        (rat(13, 50), true),
        (rat(1, 3), true),
        (rat(1, 2), true),
        (rat(3, 4), true),
        (rat(1, 1), true),
    ] {
        let p = ModelParams::new(alpha, 1).unwrap();
        let rep = classify_cumulants(&p, 4, 3, Exec::default()).unwrap();
        assert_eq!(rep.paper_consistent, expect, "alpha = {alpha}: {} violations", rep.violations.len());
        assert!(rep.relevant_lists.iter().any(|l| l.p == 2));
        if !expect {
            let kpz = h(&[1, 1]);
            assert!(rep
                .violations
                .iter()
                .any(|l| l.p == 2 && l.entries.iter().all(|e| e.a == kpz) && l.scaling == rat(-1, 5)));
        }
    }
}

#[test]
fn p2_threshold_minimum_is_minus_one_plus_four_alpha() {
    for alpha in [rat(1, 5), rat(1, 4), rat(3, 10), rat(2, 5), rat(1, 2)] {
        let p = ModelParams::new(alpha, 1).unwrap();
        let entries: Vec<GenMultiIndex> = enumerate(&p, 2)
            .into_iter()
            .filter(|a| a.order() >= 1)
            .map(|a| GenMultiIndex::plain(a, 1, 0, 0).unwrap())
            .collect();
        let mut min: Option<Rational> = None;
        for x in &entries {
            for y in &entries {
                let l = vec![x.clone(), y.clone()];
                if list_order(&l) > 2 || vanishes_identically(&l) {
                    continue;
                }
                let s = cumulant_scaling(&l, &p);
                min = Some(min.map_or(s, |m: Rational| m.min(s)));
            }
        }
        let min = min.unwrap();
        assert_eq!(min, rat(-1, 1) + alpha * 4);
        assert_eq!(min > rat(0, 1), alpha > rat(1, 4));
    }
}

#[test]
fn flow_index_sets_are_graded_by_order() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let mut count = 0;
    for a in enumerate(&p, 3).into_iter().filter(|a| a.order() >= 1) {
        let mut e = GenMultiIndex::plain(a.clone(), 1, 0, 1).unwrap();
        let other = GenMultiIndex::plain(PreMultiIndex::unit(Label::H, 0), 1, 0, 0).unwrap();
        for l in [vec![e.clone()], vec![other.clone(), e.clone()]] {
            let set = cumulant_flow_index_set(&l, &p).unwrap();
            assert_eq!(set.case, FlowCase::Differentiated);
            for t in &set.terms {
                assert_eq!(t.i, l.len() - 1);
                for c in &t.lists {
                    assert!(list_order(c) < list_order(&l));
                }
                count += 1;
            }
        }
        e.t = 0;
        let l: CumulantList = vec![e.clone(), e];
        if cumulant_scaling(&l, &p) > rat(0, 1) {
            let set = cumulant_flow_index_set(&l, &p).unwrap();
            assert_eq!(set.case, FlowCase::Irrelevant);
        }
    }
    assert!(count > 0);
}

#[test]
fn relevant_list_of_length_two_is_rejected() {
    let p = ModelParams::new(rat(1, 5), 1).unwrap();
    let e = GenMultiIndex::plain(h(&[1, 1]), 1, 0, 0).unwrap();
    assert!(cumulant_flow_index_set(&[e.clone(), e], &p).is_err());
    let z = GenMultiIndex::plain(PreMultiIndex::unit(Label::H, 0), 1, 0, 0).unwrap();
    let set = cumulant_flow_index_set(&[z.clone(), z], &p).unwrap();
    assert_eq!(set.case, FlowCase::Constant);
    assert!(set.terms.is_empty());
}
