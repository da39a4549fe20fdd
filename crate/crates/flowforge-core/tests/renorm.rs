use std::collections::BTreeSet;

use flowforge_core::flowgen::insertion_index_set;
use flowforge_core::multiindex::{enumerate, Label};
use flowforge_core::params::rat;
use flowforge_core::renorm::{
    canonicalize, decoration_size, enumerate_relevant, generalized_insertion_set, taylor_localization, GenMultiIndex,
    SpaceTimeIndex,
};
use flowforge_core::{ModelParams, Rational};

/// Relevant (a, 𝔩ᵃ) by scanning all of 𝓜 and every per-vertex decoration,
/// collapsing symmetric ones.
fn relevant_oracle(p: &ModelParams) -> BTreeSet<(String, String)> {
    let mut out = BTreeSet::new();
    for a in enumerate(p, p.gamma) {
        if a.order() == 0 || a.scaling(p.alpha) > rat(0, 1) {
            continue;
        }
        let cands = SpaceTimeIndex::all_up_to(p.n, 2);
        let k = a.size() as usize;
        let mut idx = vec![0usize; k];
        loop {
            let mut dec: Vec<SpaceTimeIndex> = idx.iter().map(|&j| cands[j].clone()).collect();
            let s = a.scaling(p.alpha) + Rational::from_integer(decoration_size(&dec) as i64);
            if s <= rat(0, 1) {
                canonicalize(&a, &mut dec);
                out.insert((a.to_json(), serde_json::to_string(&dec).unwrap()));
            }
            let mut q = 0;
            while q < k {
                idx[q] += 1;
                if idx[q] < cands.len() {
                    break;
                }
                idx[q] = 0;
                q += 1;
            }
            if q == k {
                break;
            }
        }
    }
    out
}

#[test]
fn relevant_catalog_matches_exhaustive_scan() {
    for (alpha, n, golden) in [(rat(1, 2), 1, 29), (rat(3, 4), 1, 4), (rat(1, 1), 2, 4)] {
        let p = ModelParams::new(alpha, n).unwrap();
        let rel = enumerate_relevant(&p);
        let got: BTreeSet<(String, String)> = rel.iter().map(|e| (e.a.to_json(), e.decoration_json())).collect();
        assert_eq!(got.len(), rel.len(), "duplicates at alpha {alpha}");
        assert_eq!(got, relevant_oracle(&p), "alpha {alpha}");
        assert_eq!(rel.len(), golden, "alpha {alpha}");
        for e in &rel {
            let s = |l| Rational::from_integer(e.a.label_size(l) as i64);
            let w = alpha * s(Label::H)
                + s(Label::D)
                + s(Label::F)
                + (s(Label::B) + s(Label::C) + s(Label::E)) * 2
                + Rational::from_integer(decoration_size(&e.decorations) as i64);
            assert!(w <= rat(2, 1));
            assert!(e.signature.is_local(), "{} {}", e.a, e.signature.render());
            if alpha == rat(1, 2) {
                assert!(e.a.label_size(Label::H) <= 4);
            }
        }
    }
}

#[test]
fn localization_sizes_are_bounded_by_ell() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    for e in enumerate_relevant(&p) {
        let exp = taylor_localization(&e.decorations, e.ell, p.n);
        for (m, _) in &exp.delta {
            assert!(decoration_size(&e.decorations) + decoration_size(m) < e.ell);
        }
        for (m, c) in &exp.remainder {
            assert_eq!(decoration_size(&e.decorations) + decoration_size(m), e.ell);
            assert!(*c >= 1);
        }
        assert_eq!(exp.delta.is_empty(), decoration_size(&e.decorations) >= e.ell);
    }
}

#[test]
fn undecorated_generalized_insertion_is_plain_insertion() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    for a in enumerate(&p, 4).into_iter().filter(|a| a.order() >= 1) {
        let at = GenMultiIndex::plain(a.clone(), 1, 0, 1).unwrap();
        let gen = generalized_insertion_set(&at, &p).unwrap();
        let plain = insertion_index_set(&a, &p);
        assert_eq!(gen.len(), plain.len());
        for (g, t) in gen.iter().zip(&plain) {
            assert_eq!((&g.b.a, &g.c.a, g.d, g.prefactor), (&t.b, &t.c, t.d, t.prefactor));
            assert!(g.l_d.is_zero() && g.b.decoration_size() == 0 && g.c.decoration_size() == 0);
        }
    }
}

#[test]
fn decorations_are_conserved_in_generalized_insertion() {
    let p = ModelParams::new(rat(1, 2), 1).unwrap();
    let cands = SpaceTimeIndex::all_up_to(1, 2);
    for a in enumerate(&p, 3).into_iter().filter(|a| a.order() >= 1) {
        for (j, l) in cands.iter().enumerate() {
            let mut dec = vec![SpaceTimeIndex::zero(1); a.size() as usize];
            let v = j % dec.len();
            dec[v] = l.clone();
            for s in 0..=2u8 {
                let at = GenMultiIndex::new(a.clone(), dec.clone(), s, 1).unwrap();
                for t in generalized_insertion_set(&at, &p).unwrap() {
                    assert_eq!(at.decoration_size(), t.b.decoration_size() + t.c.decoration_size() + t.l_d.size());
                    assert_eq!(t.b.s + t.c.s, s);
                }
            }
        }
    }
}
