use flowforge_core::multiindex::check_population_equivalence;
use flowforge_core::Exec;
use std::time::Instant;

#[test]
fn population_iff_tree_small_box() {
    let t = Instant::now();
    let rep = check_population_equivalence(6, 5, Exec::Parallel);
    eprintln!("checked {} populated {} in {:?}", rep.checked, rep.populated, t.elapsed());
    assert!(rep.mismatches.is_empty(), "{:?}", &rep.mismatches[..rep.mismatches.len().min(5)]);
}

mod naive {
    //! Tree enumeration by canonical strings: every tree is built explicitly
    //! and identical shapes collapse in a set.
    use std::collections::BTreeSet;

    pub type Ty = (usize, usize); // (label index, vertex index)

    pub fn outdeg(t: Ty) -> usize {
        t.1 + [0, 0, 1, 0, 1, 2, 0][t.0]
    }

    pub fn trees(m: &[Ty]) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (idx, &t) in m.iter().enumerate() {
            if idx > 0 && m[idx - 1] == t {
                continue;
            }
            let mut rest = m.to_vec();
            rest.remove(idx);
            for f in forests(&rest, outdeg(t)) {
                out.insert(format!("{}{}({})", t.0, t.1, f.join(",")));
            }
        }
        out
    }

    fn forests(r: &[Ty], k: usize) -> BTreeSet<Vec<String>> {
        let mut out = BTreeSet::new();
        if k == 0 {
            if r.is_empty() {
                out.insert(Vec::new());
            }
            return out;
        }
        if r.is_empty() {
            return out;
        }
        // the tree holding r[0]: choose any subset of the others
        let others = &r[1..];
        for mask in 0u32..(1 << others.len()) {
            let mut s = vec![r[0]];
            let mut rest = Vec::new();
            for (j, &t) in others.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    s.push(t);
                } else {
                    rest.push(t);
                }
            }
            for t in trees(&s) {
                for mut f in forests(&rest, k - 1) {
                    f.push(t.clone());
                    f.sort();
                    out.insert(f);
                }
            }
        }
        out
    }
}

#[test]
fn tree_count_matches_explicit_enumeration() {
    use flowforge_core::multiindex::{Label, PreMultiIndex, TreeCounter};
    let types: Vec<naive::Ty> = (0..=2).flat_map(|i| (0..7).map(move |l| (l, i))).collect();
    let mut counter = TreeCounter::new();
    let mut checked = 0;
    let mut nonzero = 0;
    fn rec(types: &[naive::Ty], from: usize, m: &mut Vec<naive::Ty>, f: &mut dyn FnMut(&[naive::Ty])) {
        f(m);
        if m.len() == 5 {
            return;
        }
        for j in from..types.len() {
            m.push(types[j]);
            rec(types, j, m, f);
            m.pop();
        }
    }
    let mut m = Vec::new();
    rec(&types, 0, &mut m, &mut |m: &[naive::Ty]| {
        if m.is_empty() {
            return;
        }
        let mut sorted = m.to_vec();
        sorted.sort();
        let want = naive::trees(&sorted).len() as u64;
        let a = PreMultiIndex::from_counts(m.iter().map(|&(l, i)| (Label::from_index(l), i, 1)));
        assert_eq!(counter.count(&a), want, "{a}");
        checked += 1;
        nonzero += (want > 0) as u32;
    });
    assert!(checked > 50_000 && nonzero > 500, "{checked} {nonzero}");
}
