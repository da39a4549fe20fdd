use std::collections::BTreeMap;

use flowforge_core::flowgen::{
    apply_derivator, build_hierarchy_with, derivator_slice, insertion_index_set, insertion_terms, Block,
    HierarchyOptions,
};
use flowforge_core::multiindex::{enumerate, Label, PreMultiIndex};
use flowforge_core::params::rat;
use flowforge_core::{Exec, ModelParams};

fn h(v: &[u32]) -> PreMultiIndex {
    PreMultiIndex::from_entries(&[(Label::H, v)])
}

/// Forward oracle: every (b, c, 𝐝) with b + c + d(𝐝) landing inside the box,
/// grouped by the resulting a.
#[test]
fn index_sets_match_forward_construction() {
    const K: u64 = 4;
    let p = ModelParams::new(rat(1, 1), 1).unwrap();
    let all = enumerate(&p, K as u32);
    let ds = derivator_slice(K as usize);
    let mut fwd: BTreeMap<PreMultiIndex, Vec<(PreMultiIndex, PreMultiIndex, String)>> = BTreeMap::new();
    for b in &all {
        for c in &all {
            if b.order() + c.order() + 1 > K {
                continue;
            }
            let r = b.add(c);
            for d in &ds {
                if b.get(d.k0_label, d.k0) == 0 {
                    continue;
                }
                let Some(a) = apply_derivator(&r, d) else { continue };
                assert!(a.is_populated(), "closure fails for {b} + {c} + {d}");
                assert_eq!(a.order(), b.order() + c.order() + 1);
                fwd.entry(a).or_default().push((b.clone(), c.clone(), d.to_string()));
            }
        }
    }
    let mut checked = 0;
    for a in &all {
        let mut got: Vec<_> = insertion_terms(a, K).into_iter().map(|t| (t.b, t.c, t.d.to_string())).collect();
        let mut want = fwd.remove(a).unwrap_or_default();
        got.sort();
        want.sort();
        assert_eq!(got, want, "a = {a}");
        checked += got.len();
    }
    assert!(fwd.is_empty());
    assert!(checked > 1000);
}

#[test]
fn unpopulated_target_has_no_terms() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    assert!(insertion_index_set(&h(&[2, 1]), &p).is_empty());
    // the non-tree pair from the paper's example
    assert!(insertion_index_set(&h(&[2, 1, 0]), &p).is_empty());
}

#[test]
fn hierarchy_structure_and_stability() {
    let p = ModelParams::new(rat(1, 1), 1).unwrap();
    let opts = HierarchyOptions { max_order: Some(5), ..Default::default() };
    let hier = build_hierarchy_with(&p, opts).unwrap();
    assert!(hier.check_structure().is_empty());
    assert_eq!(hier.nodes.len(), 19390);
    let orders: Vec<u64> = hier.nodes.iter().map(|n| n.order).collect();
    assert!(orders.windows(2).all(|w| w[0] <= w[1]));
    let initial: Vec<String> = hier.nodes.iter().filter(|n| n.is_initial()).map(|n| n.a.to_json()).collect();
    assert_eq!(initial, [r#"{"b":[1]}"#, r#"{"c":[1]}"#, r#"{"e":[1]}"#, r#"{"h":[1]}"#]);
    assert!(hier.nodes.iter().all(|n| (n.block == Block::Projected) == (n.order <= p.gamma as u64)));

    let kpz = hier.node(&h(&[1, 1])).unwrap();
    assert_eq!(kpz.terms.len(), 1);
    let t = &hier.expand_terms(hier.node_index(&h(&[1, 1])).unwrap())[0];
    assert_eq!((t.b.clone(), t.c.clone()), (h(&[1]), h(&[1])));
    assert_eq!(t.d.to_string(), "(h,h,0,1)");
    assert_eq!((t.prefactor, t.multiplicity, t.deriv_count), (rat(1, 1), 1, 0));

    let again = build_hierarchy_with(&p, HierarchyOptions { exec: Exec::Sequential, ..opts }).unwrap();
    assert_eq!(hier.to_json_bytes(), again.to_json_bytes());
}
