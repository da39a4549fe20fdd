//! Counting unordered typed rooted trees with a prescribed vertex multiset.
//!
//! T(M) sums over the root type t the number of multisets of outdeg(t)
//! trees whose vertex multisets partition M − t. Forests are counted by
//! enumerating multiset partitions into blocks and choosing, for each block
//! S repeated m times, a multiset of m trees among the T(S) trees on S.

use rustc_hash::FxHashMap as HashMap;

use super::{Label, PreMultiIndex};
use crate::error::{Error, Result};
use crate::params::binomial;

type Ty = u16;

fn type_id(l: Label, i: usize) -> Ty {
    (i * 7 + l.index()) as Ty
}

fn outdeg(t: Ty) -> usize {
    let l = Label::from_index(t as usize % 7);
    t as usize / 7 + l.extra_children() as usize
}

/// Memoizing tree counter. One instance per thread.
#[derive(Default)]
pub struct TreeCounter {
    small: HashMap<u128, u64>,
    large: HashMap<Vec<Ty>, u64>,
    forest_memo: HashMap<u128, u64>,
}

fn pack(m: &[Ty]) -> Option<u128> {
    if m.len() > 11 || m.iter().any(|&t| t >= 1023) {
        return None;
    }
    Some(m.iter().fold(0u128, |acc, &t| (acc << 10) | (t as u128 + 1)))
}

fn multichoose(n: u64, m: u64) -> u64 {
    if m == 0 {
        return 1;
    }
    if n == 0 {
        return 0;
    }
    u64::try_from(binomial(n + m - 1, m)).unwrap_or(u64::MAX)
}

impl TreeCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn memo_len(&self) -> usize {
        self.small.len() + self.large.len() + self.forest_memo.len()
    }

    pub fn clear(&mut self) {
        self.small.clear();
        self.large.clear();
        self.forest_memo.clear();
    }

    /// Number of distinct unordered trees whose vertex multiset is `a`.
    pub fn count(&mut self, a: &PreMultiIndex) -> u64 {
        let mut m: Vec<Ty> = Vec::new();
        for (l, i, c) in a.types() {
            for _ in 0..c {
                m.push(type_id(l, i));
            }
        }
        m.sort_unstable();
        self.count_top(&m)
    }

    /// Like `count_sorted` but does not store the result, so one-off queries
    /// do not grow the memo.
    fn count_top(&mut self, m: &[Ty]) -> u64 {
        self.count_inner(m, false)
    }

    fn count_sorted(&mut self, m: &[Ty]) -> u64 {
        self.count_inner(m, true)
    }

    fn count_inner(&mut self, m: &[Ty], store: bool) -> u64 {
        match m.len() {
            0 => return 0,
            1 => return u64::from(outdeg(m[0]) == 0),
            _ => {}
        }
        let key = pack(m);
        if let Some(k) = key {
            if let Some(&v) = self.small.get(&k) {
                return v;
            }
        } else if let Some(&v) = self.large.get(m) {
            return v;
        }
        let mut total: u64 = 0;
        let mut rest: Vec<Ty> = Vec::with_capacity(m.len() - 1);
        for (idx, &t) in m.iter().enumerate() {
            if idx > 0 && m[idx - 1] == t {
                continue;
            }
            let k = outdeg(t);
            if k == 0 || k > m.len() - 1 {
                continue;
            }
            rest.clear();
            rest.extend_from_slice(&m[..idx]);
            rest.extend_from_slice(&m[idx + 1..]);
            total = total.saturating_add(self.forests(&rest, k));
        }
        match key {
            _ if !store => {}
            Some(k) => {
                self.small.insert(k, total);
            }
            None => {
                self.large.insert(m.to_vec(), total);
            }
        }
        total
    }

    /// Number of multisets of exactly k trees partitioning the sorted multiset r.
    fn forests(&mut self, r: &[Ty], k: usize) -> u64 {
        if k == 1 {
            return self.count_sorted(r);
        }
        if r.len() < k {
            return 0;
        }
        let key = if k < 16 { pack(r).map(|p| (p << 4) | k as u128) } else { None };
        if let Some(v) = key.and_then(|key| self.forest_memo.get(&key)) {
            return *v;
        }
        let mut blocks: Vec<Vec<Ty>> = Vec::with_capacity(k);
        let mut total = 0u64;
        self.partitions(r.to_vec(), k, &mut blocks, &mut total);
        if let Some(key) = key {
            self.forest_memo.insert(key, total);
        }
        total
    }

    /// Enumerate partitions of `rem` into `k` further blocks, each block
    /// containing the smallest remaining element and not smaller than the
    /// previous block, so every multiset partition is produced once.
    fn partitions(&mut self, rem: Vec<Ty>, k: usize, blocks: &mut Vec<Vec<Ty>>, total: &mut u64) {
        if k == 0 {
            if rem.is_empty() {
                let w = self.weight(blocks);
                *total = total.saturating_add(w);
            }
            return;
        }
        if rem.len() < k {
            return;
        }
        if k == 1 {
            if blocks.last().is_none_or(|p| rem.as_slice() >= p.as_slice()) {
                blocks.push(rem);
                let w = self.weight(blocks);
                *total = total.saturating_add(w);
                blocks.pop();
            }
            return;
        }
        // distinct types of rem[1..] with counts
        let first = rem[0];
        let mut kinds: Vec<(Ty, usize)> = Vec::new();
        for &t in &rem[1..] {
            match kinds.last_mut() {
                Some((u, c)) if *u == t => *c += 1,
                _ => kinds.push((t, 1)),
            }
        }
        let max_extra = rem.len() - k;
        let mut take = vec![0usize; kinds.len()];
        loop {
            let extra: usize = take.iter().sum();
            if extra <= max_extra {
                let mut block = Vec::with_capacity(extra + 1);
                block.push(first);
                let mut left = Vec::with_capacity(rem.len() - extra - 1);
                for (j, &(t, c)) in kinds.iter().enumerate() {
                    for _ in 0..take[j] {
                        block.push(t);
                    }
                    for _ in take[j]..c {
                        left.push(t);
                    }
                }
                let ok = blocks.last().is_none_or(|p| block.as_slice() >= p.as_slice());
                if ok && self.block_has_tree(&block) {
                    blocks.push(block);
                    self.partitions(left, k - 1, blocks, total);
                    blocks.pop();
                }
            }
            // odometer over take[j] in 0..=count_j
            let mut j = 0;
            loop {
                if j == take.len() {
                    return;
                }
                if take[j] < kinds[j].1 {
                    take[j] += 1;
                    break;
                }
                take[j] = 0;
                j += 1;
            }
        }
    }

    fn block_has_tree(&mut self, block: &[Ty]) -> bool {
        self.count_sorted(block) > 0
    }

    fn weight(&mut self, blocks: &[Vec<Ty>]) -> u64 {
        let mut w: u64 = 1;
        let mut i = 0;
        while i < blocks.len() {
            let mut j = i + 1;
            while j < blocks.len() && blocks[j] == blocks[i] {
                j += 1;
            }
            let t = self.count_sorted(&blocks[i]);
            w = w.saturating_mul(multichoose(t, (j - i) as u64));
            if w == 0 {
                return 0;
            }
            i = j;
        }
        w
    }
}

/// Number of unordered typed trees with vertex multiset `a`.
/// Fails with a resource error when 𝔰(a) exceeds `cap`.
pub fn tree_count(a: &PreMultiIndex, cap: u64) -> Result<u64> {
    if a.size() > cap {
        return Err(Error::Resource(format!("size {} exceeds tree enumeration cap {}", a.size(), cap)));
    }
    Ok(TreeCounter::new().count(a))
}


/// Outcome of the exhaustive population/tree comparison.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub checked: u64,
    pub populated: u64,
    pub mismatches: Vec<PreMultiIndex>,
}

/// Compare `is_populated` with `tree_count ≥ 1` on every nonzero pre-multi-index
/// of size ≤ `max_size` whose entries have index ≤ `max_index`.
pub fn check_population_equivalence(max_size: u32, max_index: usize, exec: crate::Exec) -> EquivalenceReport {
    let types: Vec<Ty> = (0..=max_index)
        .flat_map(|i| Label::ALL.iter().map(move |&l| type_id(l, i)))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    // split the work on the smallest type of the multiset
    let parts = exec.map_range(types.len(), |first| {
        let mut counter = TreeCounter::new();
        let mut rep = EquivalenceReport::default();
        let mut m = vec![types[first]];
        scan(&types, first, &mut m, max_size as usize, &mut counter, &mut rep);
        rep
    });
    let mut out = EquivalenceReport::default();
    for p in parts {
        out.checked += p.checked;
        out.populated += p.populated;
        out.mismatches.extend(p.mismatches);
    }
    out
}

fn scan(
    types: &[Ty],
    from: usize,
    m: &mut Vec<Ty>,
    max_size: usize,
    counter: &mut TreeCounter,
    rep: &mut EquivalenceReport,
) {
    let size = m.len() as u64;
    let order: u64 = m.iter().map(|&t| outdeg(t) as u64).sum();
    let populated = size == order + 1;
    let trees = counter.count_top(m);
    rep.checked += 1;
    rep.populated += populated as u64;
    if populated != (trees >= 1) {
        rep.mismatches.push(PreMultiIndex::from_counts(
            m.iter().map(|&t| (Label::from_index(t as usize % 7), t as usize / 7, 1)),
        ));
    }
    if m.len() == max_size {
        return;
    }
    for j in from..types.len() {
        m.push(types[j]);
        scan(types, j, m, max_size, counter, rep);
        m.pop();
    }
}
