use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use super::{insertion_terms, ser_rational, ser_u128, support_window, Derivator, InsertionTerm};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::multiindex::{count_populated_by_order, for_each_populated, PreMultiIndex};
use crate::params::{ModelParams, ParamsSummary, Rational};

/// Which part of the flow a node belongs to: the projected force (order ≤ Γ)
/// or the overflow beyond Γ feeding the remainder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Projected,
    Overflow,
}

/// An insertion term whose b and c are stored as node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactTerm {
    pub b: u32,
    pub c: u32,
    pub d: Derivator,
    pub prefactor: Rational,
    pub deriv_count: u32,
}

#[derive(Debug, Clone)]
pub struct HierarchyNode {
    pub a: PreMultiIndex,
    pub order: u64,
    pub scaling: Rational,
    pub block: Block,
    pub multiplicity: u128,
    pub terms: Vec<CompactTerm>,
}

impl HierarchyNode {
    /// Order-0 nodes carry the initial data b, c, e, h and have no right-hand side.
    pub fn is_initial(&self) -> bool {
        self.order == 0
    }
}

#[derive(Debug, Clone)]
pub struct FlowHierarchy {
    pub params: ModelParams,
    pub max_order: u32,
    pub nodes: Vec<HierarchyNode>,
    index: HashMap<PreMultiIndex, u32>,
}

#[derive(Debug, Clone, Copy)]
pub struct HierarchyOptions {
    /// Top order; `None` means 2Γ+1.
    pub max_order: Option<u32>,
    pub node_cap: u128,
    pub exec: Exec,
}

impl Default for HierarchyOptions {
    fn default() -> Self {
        HierarchyOptions { max_order: None, node_cap: 250_000, exec: Exec::Parallel }
    }
}

/// Number of nodes of the hierarchy up to `max_order` without building it.
pub fn hierarchy_node_count(max_order: u32) -> u128 {
    count_populated_by_order(max_order).iter().sum()
}

pub fn build_hierarchy(p: &ModelParams) -> Result<FlowHierarchy> {
    build_hierarchy_with(p, HierarchyOptions::default())
}

pub fn build_hierarchy_with(p: &ModelParams, opts: HierarchyOptions) -> Result<FlowHierarchy> {
    let max_order = opts.max_order.unwrap_or(p.star_order());
    let count = hierarchy_node_count(max_order);
    if count > opts.node_cap {
        return Err(Error::Resource(format!(
            "hierarchy up to order {max_order} has {count} nodes, above the cap of {}",
            opts.node_cap
        )));
    }
    let mut all = Vec::with_capacity(count as usize);
    for_each_populated(0, max_order, None, |a| all.push(a));
    opts.exec.sort(&mut all);
    let index: HashMap<PreMultiIndex, u32> = all.iter().enumerate().map(|(i, a)| (a.clone(), i as u32)).collect();
    let gamma = p.gamma as u64;
    let nodes = opts.exec.map(&all, |a| {
        let terms = insertion_terms(a, gamma)
            .into_iter()
            .map(|t| CompactTerm {
                b: index[&t.b],
                c: index[&t.c],
                d: t.d,
                prefactor: t.prefactor,
                deriv_count: t.deriv_count,
            })
            .collect();
        let order = a.order();
        HierarchyNode {
            a: a.clone(),
            order,
            scaling: a.scaling(p.alpha),
            block: if order <= gamma { Block::Projected } else { Block::Overflow },
            multiplicity: a.multifactorial(),
            terms,
        }
    });
    Ok(FlowHierarchy { params: p.clone(), max_order, nodes, index })
}

#[derive(Serialize)]
struct TermView<'a> {
    b: &'a PreMultiIndex,
    c: &'a PreMultiIndex,
    d: Derivator,
    #[serde(serialize_with = "ser_u128")]
    mult: u128,
    #[serde(serialize_with = "ser_rational")]
    prefactor: Rational,
    dx: u32,
}

#[derive(Serialize)]
struct NodeView<'a> {
    a: &'a PreMultiIndex,
    order: u64,
    #[serde(serialize_with = "ser_rational")]
    scaling: Rational,
    block: Block,
    terms: Vec<TermView<'a>>,
}

impl FlowHierarchy {
    pub fn node_index(&self, a: &PreMultiIndex) -> Option<usize> {
        self.index.get(a).map(|&i| i as usize)
    }

    pub fn node(&self, a: &PreMultiIndex) -> Option<&HierarchyNode> {
        self.node_index(a).map(|i| &self.nodes[i])
    }

    pub fn term_count(&self) -> usize {
        self.nodes.iter().map(|n| n.terms.len()).sum()
    }

    /// Full insertion terms of node `i`.
    pub fn expand_terms(&self, i: usize) -> Vec<InsertionTerm> {
        let n = &self.nodes[i];
        n.terms
            .iter()
            .map(|t| InsertionTerm {
                b: self.nodes[t.b as usize].a.clone(),
                c: self.nodes[t.c as usize].a.clone(),
                d: t.d,
                multiplicity: n.multiplicity,
                prefactor: t.prefactor,
                deriv_count: t.deriv_count,
            })
            .collect()
    }

    /// Stream the canonical JSON export.
    pub fn write_json<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let params: ParamsSummary = self.params.summary();
        write!(w, "{{\"params\":")?;
        serde_json::to_writer(&mut w, &params)?;
        write!(w, ",\"max_order\":{},\"nodes\":[", self.max_order)?;
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                w.write_all(b",")?;
            }
            let view = NodeView {
                a: &n.a,
                order: n.order,
                scaling: n.scaling,
                block: n.block,
                terms: n
                    .terms
                    .iter()
                    .map(|t| TermView {
                        b: &self.nodes[t.b as usize].a,
                        c: &self.nodes[t.c as usize].a,
                        d: t.d,
                        mult: n.multiplicity,
                        prefactor: t.prefactor,
                        dx: t.deriv_count,
                    })
                    .collect(),
            };
            serde_json::to_writer(&mut w, &view)?;
        }
        w.write_all(b"]}\n")
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.write_json(&mut v).expect("writing to memory");
        v
    }

    /// Structural checks over every term: order and size conservation, the
    /// scaling identity |a| = |b| + |c| + 2 − dx, nesting of the time-support
    /// windows, and that b and c precede a. Returns one message per violation.
    pub fn check_structure(&self) -> Vec<String> {
        let alpha = self.params.alpha;
        let mu = Rational::new(1, 2);
        let two_mu2 = Rational::from_integer(2) * mu * mu;
        let mut bad = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.order == 0 && !n.terms.is_empty() {
                bad.push(format!("order-0 node {} has a right-hand side", n.a));
            }
            for t in &n.terms {
                let (b, c) = (&self.nodes[t.b as usize], &self.nodes[t.c as usize]);
                if t.b as usize >= i || t.c as usize >= i {
                    bad.push(format!("{}: input not earlier in topological order", n.a));
                }
                if n.order != b.order + c.order + 1 || n.a.size() != b.a.size() + c.a.size() {
                    bad.push(format!("{}: order/size not conserved", n.a));
                }
                let want = b.scaling + c.scaling + Rational::from_integer(2 - t.deriv_count as i64);
                if n.a.scaling(alpha) != want {
                    bad.push(format!("{}: scaling identity fails", n.a));
                }
                // window(a) must hold window(b) and window(c) shifted by the Ġ support [−2μ², −μ²]
                let (la, _) = support_window(&n.a, mu);
                let (lb, _) = support_window(&b.a, mu);
                let (lc, _) = support_window(&c.a, mu);
                if lb < la || lc - two_mu2 < la || la != lb + lc - two_mu2 {
                    bad.push(format!("{}: support window recursion fails", n.a));
                }
                if super::apply_derivator(&b.a, &t.d).map(|x| x.add(&c.a)) != Some(n.a.clone()) {
                    bad.push(format!("{}: a ≠ b + c + d(𝐝)", n.a));
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::Label;
    use crate::params::rat;

    #[test]
    fn small_hierarchy_is_consistent() {
        let p = ModelParams::new(rat(1, 1), 1).unwrap();
        let opts = HierarchyOptions { max_order: Some(3), ..Default::default() };
        let h = build_hierarchy_with(&p, opts).unwrap();
        assert_eq!(h.nodes.len(), 966);
        assert!(h.check_structure().is_empty());
        let initial: Vec<_> = h.nodes.iter().filter(|n| n.is_initial()).map(|n| n.a.clone()).collect();
        let units: Vec<_> =
            [Label::B, Label::C, Label::E, Label::H].iter().map(|&l| PreMultiIndex::unit(l, 0)).collect();
        assert_eq!(initial, units);
        assert!(h.nodes.iter().filter(|n| n.order > 0).all(|n| !n.terms.is_empty()));
    }

    #[test]
    fn cap_is_enforced() {
        let p = ModelParams::new(rat(1, 2), 1).unwrap();
        assert!(matches!(build_hierarchy(&p), Err(Error::Resource(_))));
        assert_eq!(hierarchy_node_count(p.star_order()), 6_890_166_388);
    }

    #[test]
    fn modes_agree() {
        let p = ModelParams::new(rat(1, 1), 1).unwrap();
        let seq = HierarchyOptions { max_order: Some(3), exec: Exec::Sequential, ..Default::default() };
        let par = HierarchyOptions { exec: Exec::Parallel, ..seq };
        let a = build_hierarchy_with(&p, seq).unwrap().to_json_bytes();
        let b = build_hierarchy_with(&p, par).unwrap().to_json_bytes();
        assert_eq!(a, b);
    }
}
