//! The laminar family of minimally unsatisfied sets seen during a run, the
//! tree it induces, and the per-iteration structure used to audit the
//! degree argument: children still unsatisfied at iteration `i`, the
//! leftover part `X^i_A`, the contracted forest `H^i_A`, the edge sets
//! `α^i(A)` and critical sets.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{is_laminar, EdgeId, Multigraph, UnionFind, VertexSet};

use super::WgmvCertificate;

/// Structure of one set `A` of the tree at one iteration `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationNode {
    pub iteration: usize,
    pub set: VertexSet,
    pub is_root: bool,
    /// Children of `A` in the tree whose label is at least `i`.
    pub children: Vec<VertexSet>,
    /// `A` minus those children.
    pub leftover: VertexSet,
    /// Solution edges inside `A` joining different parts
    /// (`leftover`, children).
    pub h_edges: Vec<EdgeId>,
    pub h_is_forest: bool,
    /// `H` is a tree in which the leftover part is a leaf.
    pub critical: bool,
    /// `δ_F(A)` minus the solution edges crossing a smaller set of the
    /// family with label at least `i`.
    pub alpha: Vec<EdgeId>,
    /// Same set computed as the edges of `δ_F(A)` touching `leftover`.
    pub alpha_by_leftover: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaminarHistory {
    /// Every set that was minimally unsatisfied at some point.
    pub sets: Vec<VertexSet>,
    pub labels: BTreeMap<VertexSet, usize>,
    pub root: VertexSet,
    /// Parent of each member of `sets`: the smallest strict superset in
    /// `sets ∪ {V}`.
    pub parent: BTreeMap<VertexSet, VertexSet>,
    pub iterations: usize,
    pub nodes: Vec<IterationNode>,
}

impl LaminarHistory {
    pub fn children_of(&self, a: VertexSet) -> Vec<VertexSet> {
        self.parent.iter().filter(|(_, &p)| p == a).map(|(&c, _)| c).collect()
    }

    pub fn nodes_at(&self, i: usize) -> impl Iterator<Item = &IterationNode> {
        self.nodes.iter().filter(move |n| n.iteration == i)
    }

    /// Members of the family with label at least `i`.
    pub fn live_at(&self, i: usize) -> Vec<VertexSet> {
        self.sets.iter().copied().filter(|s| self.labels[s] >= i).collect()
    }
}

/// Materializes the tree and per-iteration structure against the final
/// solution of `cert`. Fails with the offending pair if the family is not
/// laminar.
pub fn build_laminar_history(
    g: &Multigraph,
    cert: &WgmvCertificate,
) -> Result<LaminarHistory, (VertexSet, VertexSet)> {
    let sets: Vec<VertexSet> = cert.history.iter().map(|r| r.set).collect();
    is_laminar(&sets)?;
    let labels: BTreeMap<VertexSet, usize> = cert.history.iter().map(|r| (r.set, r.label)).collect();
    let root = g.vertices();
    let mut parent = BTreeMap::new();
    for &s in &sets {
        if s == root {
            continue;
        }
        let p = sets
            .iter()
            .copied()
            .filter(|&t| s.is_proper_subset(t))
            .min_by_key(|t| t.len())
            .unwrap_or(root);
        parent.insert(s, p);
    }
    let mut history = LaminarHistory {
        sets,
        labels,
        root,
        parent,
        iterations: cert.iterations.len(),
        nodes: Vec::new(),
    };
    let solution = &cert.solution;
    for i in 1..=history.iterations {
        let live = history.live_at(i);
        let mut tops: Vec<(VertexSet, bool)> = live.iter().map(|&s| (s, false)).collect();
        if !history.labels.contains_key(&root) {
            tops.push((root, true));
        }
        for (a, is_root) in tops {
            let children: Vec<VertexSet> = history
                .children_of(a)
                .into_iter()
                .filter(|c| history.labels[c] >= i)
                .collect();
            let leftover = children.iter().fold(a, |acc, c| acc.difference(*c));
            let part_of = |v: usize| -> usize {
                children.iter().position(|c| c.contains(v)).map_or(0, |j| j + 1)
            };
            let mut h_edges = Vec::new();
            let mut uf = UnionFind::new(children.len() + 1);
            let mut h_is_forest = true;
            let mut leftover_degree = 0;
            for &e in solution {
                let edge = g.edge(e);
                if !a.contains(edge.u) || !a.contains(edge.v) {
                    continue;
                }
                let (pu, pv) = (part_of(edge.u), part_of(edge.v));
                if pu == pv {
                    continue;
                }
                h_edges.push(e);
                if pu == 0 || pv == 0 {
                    leftover_degree += 1;
                }
                if !uf.union(pu, pv) {
                    h_is_forest = false;
                }
            }
            let is_tree = h_is_forest && h_edges.len() == children.len();
            let critical = is_tree && leftover_degree == 1;
            let boundary = g.cut_edges_within(a, solution);
            let smaller: Vec<VertexSet> =
                live.iter().copied().filter(|s| s.is_proper_subset(a)).collect();
            let alpha: Vec<EdgeId> = boundary
                .iter()
                .copied()
                .filter(|&e| !smaller.iter().any(|&s| g.crosses(e, s)))
                .collect();
            let alpha_by_leftover: Vec<EdgeId> = boundary
                .iter()
                .copied()
                .filter(|&e| leftover.contains(g.edge(e).u) || leftover.contains(g.edge(e).v))
                .collect();
            history.nodes.push(IterationNode {
                iteration: i,
                set: a,
                is_root,
                children,
                leftover,
                h_edges,
                h_is_forest,
                critical,
                alpha,
                alpha_by_leftover,
            });
        }
    }
    Ok(history)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeViolation {
    pub iteration: usize,
    pub active: usize,
    pub total_degree: usize,
}

/// Per-iteration total degree of the active sets in the final solution,
/// against `2|A| - 2` (sharp) and `2|A|` (weak).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DegreeAudit {
    pub iterations_checked: usize,
    pub sharp_violations: Vec<DegreeViolation>,
    pub weak_violations: Vec<DegreeViolation>,
}

impl DegreeAudit {
    pub fn passed(&self) -> bool {
        self.sharp_violations.is_empty() && self.weak_violations.is_empty()
    }
}

pub fn wgmv_degree_audit(g: &Multigraph, cert: &WgmvCertificate) -> DegreeAudit {
    let mut audit = DegreeAudit::default();
    for rec in &cert.iterations {
        if rec.active.is_empty() {
            continue;
        }
        audit.iterations_checked += 1;
        let k = rec.active.len();
        let total_degree: usize =
            rec.active.iter().map(|&s| g.cut_edges_within(s, &cert.solution).len()).sum();
        let v = DegreeViolation { iteration: rec.index, active: k, total_degree };
        if total_degree + 2 > 2 * k {
            audit.sharp_violations.push(v.clone());
        }
        if total_degree > 2 * k {
            audit.weak_violations.push(v);
        }
    }
    audit
}

/// Outcome of every structural check on one run. Each list holds
/// human-readable witnesses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StructuralAudit {
    pub nodes_checked: usize,
    pub forest: Vec<String>,
    pub alpha_partition: Vec<String>,
    pub labels: Vec<String>,
    pub critical_alpha: Vec<String>,
    pub degree: DegreeAudit,
    /// Iterations where `∑ |α^i(S)| > 2|A^i| - 2 + |R^i|` (reported only).
    pub token_bound_exceeded: Vec<usize>,
}

impl StructuralAudit {
    pub fn passed(&self) -> bool {
        self.forest.is_empty()
            && self.alpha_partition.is_empty()
            && self.labels.is_empty()
            && self.critical_alpha.is_empty()
            && self.degree.passed()
    }
}

/// Checks, against the final solution:
/// * every `H^i_A` is a forest;
/// * for `A` with label `>= i`, each edge of `δ_F(A)` lies in `α^i(S)` for
///   exactly one family member `S ⊆ A` with label `>= i`, and the two ways of
///   computing `α^i(A)` agree;
/// * labels are monotone under inclusion, and a solution edge crossing `S`
///   was admitted no earlier than `S` became satisfied;
/// * critical sets have nonempty `α^i`;
/// * the active-degree bound.
pub fn structural_audit(
    g: &Multigraph,
    cert: &WgmvCertificate,
    history: &LaminarHistory,
) -> StructuralAudit {
    let mut audit = StructuralAudit { degree: wgmv_degree_audit(g, cert), ..Default::default() };
    let solution = &cert.solution;

    for &b in &history.sets {
        for &a in &history.sets {
            if b.is_proper_subset(a) && history.labels[&b] > history.labels[&a] {
                audit.labels.push(format!(
                    "{b} ⊂ {a} but label {} > {}",
                    history.labels[&b], history.labels[&a]
                ));
            }
        }
        for e in g.cut_edges_within(b, solution) {
            match cert.edge_labels.get(&e) {
                Some(&le) if le >= history.labels[&b] => {}
                Some(&le) => audit.labels.push(format!(
                    "{e} crosses {b} with label {le} < {}",
                    history.labels[&b]
                )),
                None => audit.labels.push(format!("{e} in solution has no label")),
            }
        }
    }

    for i in 1..=history.iterations {
        let live = history.live_at(i);
        let nodes: Vec<&IterationNode> = history.nodes_at(i).collect();
        let alpha_of: BTreeMap<VertexSet, BTreeSet<EdgeId>> =
            nodes.iter().map(|n| (n.set, n.alpha.iter().copied().collect())).collect();
        for node in &nodes {
            audit.nodes_checked += 1;
            if !node.h_is_forest {
                audit.forest.push(format!("iteration {i}: H for {} has a cycle", node.set));
            }
            if node.alpha != node.alpha_by_leftover {
                audit.alpha_partition.push(format!(
                    "iteration {i}: α({}) = {:?} but leftover edges are {:?}",
                    node.set, node.alpha, node.alpha_by_leftover
                ));
            }
            if !node.is_root {
                for e in g.cut_edges_within(node.set, solution) {
                    let owners = live
                        .iter()
                        .filter(|s| s.is_subset(node.set) && alpha_of[s].contains(&e))
                        .count();
                    if owners != 1 {
                        audit.alpha_partition.push(format!(
                            "iteration {i}: {e} ∈ δ_F({}) lies in {owners} α-sets",
                            node.set
                        ));
                    }
                }
                if node.critical && node.alpha.is_empty() {
                    audit
                        .critical_alpha
                        .push(format!("iteration {i}: {} is critical with empty α", node.set));
                }
            }
        }
        if let Some(rec) = cert.iterations.get(i - 1) {
            let alpha_total: usize =
                nodes.iter().filter(|n| !n.is_root).map(|n| n.alpha.len()).sum();
            let critical = nodes.iter().filter(|n| n.critical).count();
            if alpha_total + 2 > 2 * rec.active.len() + critical {
                audit.token_bound_exceeded.push(i);
            }
        }
    }
    audit
}
