//! Cumulant lists, their scaling and relevance, and the index sets of the
//! cumulant flow.

mod partition;

pub use partition::{partitions, q_partitions, Partition, QPartition, MAX_PARTITION_SET};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::flowgen::ser_rational;
use crate::multiindex::{enumerate, Label, PreMultiIndex};
use crate::params::{ModelParams, ParamsSummary, Rational};
use crate::renorm::{
    canonical_decorations, generalized_insertion_set, GenInsertionTerm, GenMultiIndex, SpaceTimeIndex,
};

pub type CumulantList = Vec<GenMultiIndex>;

pub fn list_order(l: &[GenMultiIndex]) -> u64 {
    l.iter().map(|e| e.a.order()).sum()
}

/// Σ(|aᵢ| + |𝔩ᵃⁱ|) + (p − 1)(2 + n/r)
pub fn cumulant_scaling(l: &[GenMultiIndex], p: &ModelParams) -> Rational {
    let per = Rational::from_integer(2) + p.integrability().n_over_r(p.n);
    let sum: Rational = l.iter().map(|e| e.scaling(p.alpha)).sum();
    sum + per * Rational::from_integer(l.len() as i64 - 1)
}

/// The joint cumulant vanishes identically for centred Gaussian noise when
/// the total number of noise factors is odd, or when a list of length ≥ 2
/// contains a deterministic entry (no noise factor).
pub fn vanishes_identically(l: &[GenMultiIndex]) -> bool {
    let hs: Vec<u64> = l.iter().map(|e| e.a.label_size(Label::H)).collect();
    hs.iter().sum::<u64>() % 2 == 1 || (l.len() >= 2 && hs.contains(&0))
}

/// The covariance of the noise: two copies of 𝟙^h_0, any decorations.
pub fn is_noise_covariance(l: &[GenMultiIndex]) -> bool {
    let unit = PreMultiIndex::unit(Label::H, 0);
    l.len() == 2 && l.iter().all(|e| e.a == unit)
}

fn whitelisted(l: &[GenMultiIndex]) -> bool {
    l.len() == 1 || is_noise_covariance(l)
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryView {
    pub a: PreMultiIndex,
    pub l: Vec<SpaceTimeIndex>,
    pub s: u8,
    pub t: u8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ListView {
    pub p: usize,
    pub entries: Vec<EntryView>,
    #[serde(serialize_with = "ser_rational")]
    pub scaling: Rational,
}

impl ListView {
    fn of(l: &[GenMultiIndex], scaling: Rational) -> Self {
        ListView {
            p: l.len(),
            entries: l.iter().map(|e| EntryView { a: e.a.clone(), l: e.decorations.clone(), s: e.s, t: e.t }).collect(),
            scaling,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CumulantReport {
    pub params: ParamsSummary,
    pub pmax: usize,
    pub order_cap: u32,
    pub scanned_count: u64,
    pub vanishing_count: u64,
    pub relevant_lists: Vec<ListView>,
    pub paper_consistent: bool,
    pub violations: Vec<ListView>,
}

/// Entries (a, 𝔩ᵃ, 0, 0) with 𝔬(a) ≤ cap and |𝔩ᵃ| ≤ 2, sorted by scaling.
fn scan_entries(p: &ModelParams, cap: u32) -> Vec<(GenMultiIndex, Rational)> {
    let mut v = Vec::new();
    for a in enumerate(p, cap) {
        for dec in canonical_decorations(&a, p.n, 2) {
            let e = GenMultiIndex { a: a.clone(), decorations: dec, s: 0, t: 0 };
            let s = e.scaling(p.alpha);
            v.push((e, s));
        }
    }
    v.sort_by_key(|x| x.1);
    v
}

struct ScanState {
    scanned: u64,
    vanishing: u64,
    relevant: Vec<(CumulantList, Rational)>,
}

#[allow(clippy::too_many_arguments)]
fn extend(
    entries: &[(GenMultiIndex, Rational)],
    from: usize,
    list: &mut CumulantList,
    partial: Rational,
    order: u64,
    pmax: usize,
    cap: u64,
    per: Rational,
    st: &mut ScanState,
) {
    st.scanned += 1;
    if vanishes_identically(list) {
        st.vanishing += 1;
    } else if partial <= Rational::from_integer(0) {
        st.relevant.push((list.clone(), partial));
    }
    if list.len() == pmax {
        return;
    }
    for j in from..entries.len() {
        let (e, s) = &entries[j];
        let next = partial + per + s;
        // entries are sorted by scaling and every addition raises the
        // scaling, so nothing further can come back to ≤ 0
        if next > Rational::from_integer(0) {
            break;
        }
        let o = order + e.a.order();
        if o > cap {
            continue;
        }
        list.push(e.clone());
        extend(entries, j, list, next, o, pmax, cap, per, st);
        list.pop();
    }
}

/// Scan all lists with s = t = 0, length ≤ pmax and total order ≤ order_cap,
/// and compare the relevant ones with the expected set: expectations (p = 1)
/// and the noise covariance.
pub fn classify_cumulants(p: &ModelParams, pmax: usize, order_cap: u32, exec: Exec) -> Result<CumulantReport> {
    if !(1..=MAX_PARTITION_SET).contains(&pmax) {
        return Err(Error::Domain(format!("pmax = {pmax} outside [1, {MAX_PARTITION_SET}]")));
    }
    let entries = scan_entries(p, order_cap);
    let per = Rational::from_integer(2) + p.integrability().n_over_r(p.n);
    let firsts: Vec<usize> = (0..entries.len()).take_while(|&j| entries[j].1 <= Rational::from_integer(0)).collect();
    let parts = exec.map(&firsts, |&j| {
        let mut st = ScanState { scanned: 0, vanishing: 0, relevant: Vec::new() };
        let (e, s) = &entries[j];
        let mut list = vec![e.clone()];
        extend(&entries, j, &mut list, *s, e.a.order(), pmax, order_cap as u64, per, &mut st);
        st
    });
    // single-entry lists with positive scaling are scanned but never extended
    let mut scanned = (entries.len() - firsts.len()) as u64;
    let mut vanishing = 0;
    let mut relevant = Vec::new();
    for st in parts {
        scanned += st.scanned;
        vanishing += st.vanishing;
        relevant.extend(st.relevant);
    }
    let violations: Vec<ListView> =
        relevant.iter().filter(|(l, _)| !whitelisted(l)).map(|(l, s)| ListView::of(l, *s)).collect();
    Ok(CumulantReport {
        params: p.summary(),
        pmax,
        order_cap,
        scanned_count: scanned,
        vanishing_count: vanishing,
        paper_consistent: violations.is_empty(),
        relevant_lists: relevant.iter().map(|(l, s)| ListView::of(l, *s)).collect(),
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowCase {
    /// t(𝒂) ≥ 1: the first entry carrying the μ-derivative is expanded.
    Differentiated,
    /// t(𝒂) = 0 and |𝒂| > 0: integrated from μ = 0, sum over all entries.
    Irrelevant,
    /// t(𝒂) = 0, |𝒂| ≤ 0, p = 1: integrated down from the boundary at μ = 1
    /// where the counterterm fixes the value.
    RelevantExpectation,
    /// The noise covariance, constant along the flow.
    Constant,
}

#[derive(Debug, Clone)]
pub struct CumulantFlowTerm {
    /// Entry of 𝒂 that is expanded.
    pub i: usize,
    pub insertion: GenInsertionTerm,
    pub q: QPartition,
    /// 𝒄_k = 𝒂_{π_k} ⊔ 𝒃_{ρ_k}
    pub lists: Vec<CumulantList>,
}

#[derive(Debug, Clone)]
pub struct CumulantFlowIndexSet {
    pub case: FlowCase,
    pub boundary_at_one: bool,
    pub terms: Vec<CumulantFlowTerm>,
}

fn expand_entry(l: &[GenMultiIndex], i: usize, p: &ModelParams, out: &mut Vec<CumulantFlowTerm>) -> Result<()> {
    let mut hat = l[i].clone();
    hat.t = 1;
    let others: Vec<usize> = (0..l.len()).filter(|&k| k != i).collect();
    let qs = q_partitions(&others, &[0, 1])?;
    for ins in generalized_insertion_set(&hat, p)? {
        let bl = [ins.b.clone(), ins.c.clone()];
        for q in &qs {
            let lists = (0..q.rho.len())
                .map(|k| {
                    let mut c: CumulantList = q.pi_block(&others, k).into_iter().map(|j| l[j].clone()).collect();
                    c.extend(q.rho.blocks[k].iter().map(|&j| bl[j].clone()));
                    c
                })
                .collect();
            out.push(CumulantFlowTerm { i, insertion: ins.clone(), q: q.clone(), lists });
        }
    }
    Ok(())
}

/// Index set of the flow equation for the cumulant of the list `l`.
pub fn cumulant_flow_index_set(l: &[GenMultiIndex], p: &ModelParams) -> Result<CumulantFlowIndexSet> {
    if l.is_empty() || list_order(l) == 0 {
        if is_noise_covariance(l) {
            return Ok(CumulantFlowIndexSet { case: FlowCase::Constant, boundary_at_one: false, terms: Vec::new() });
        }
        return Err(Error::Contract("cumulant flow needs a list of order at least 1".into()));
    }
    let mut terms = Vec::new();
    if let Some(i) = l.iter().position(|e| e.t == 1) {
        expand_entry(l, i, p, &mut terms)?;
        return Ok(CumulantFlowIndexSet { case: FlowCase::Differentiated, boundary_at_one: false, terms });
    }
    if cumulant_scaling(l, p) > Rational::from_integer(0) {
        for i in 0..l.len() {
            expand_entry(l, i, p, &mut terms)?;
        }
        return Ok(CumulantFlowIndexSet { case: FlowCase::Irrelevant, boundary_at_one: false, terms });
    }
    if l.len() != 1 {
        return Err(Error::Contract(format!("relevant cumulant list of length {} outside the expected set", l.len())));
    }
    expand_entry(l, 0, p, &mut terms)?;
    Ok(CumulantFlowIndexSet { case: FlowCase::RelevantExpectation, boundary_at_one: true, terms })
}
