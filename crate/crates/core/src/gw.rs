//! Moat growing for proper requirement functions.
//!
//! Growth is simulated event by event with exact rationals: all active
//! components raise their duals at unit rate until some edge leaving an
//! active component goes tight. Every edge that is tight at the event time
//! is considered in ascending id order and picked when it still joins two
//! different components; components are recomputed once the batch is done.

use serde::{Deserialize, Serialize};

use crate::dual::DualSolution;
use crate::error::SolverError;
use crate::graph::{EdgeId, Multigraph, UnionFind, VertexSet};
use crate::rational::Rational;
use crate::requirements::{Flavor, RequirementOracle, ViolatedSetMethod, DEFAULT_CHECK_CAP};
use crate::reverse_delete::reverse_delete;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GwEvent {
    EdgeTight {
        time: Rational,
        edge: EdgeId,
    },
    /// `edge` joined `left` and `right` into `merged`.
    Merge {
        time: Rational,
        edge: EdgeId,
        left: VertexSet,
        right: VertexSet,
        merged: VertexSet,
    },
    /// A component containing previously active vertices has requirement 0.
    Deactivate {
        time: Rational,
        set: VertexSet,
    },
}

impl GwEvent {
    pub fn time(&self) -> Rational {
        match *self {
            GwEvent::EdgeTight { time, .. }
            | GwEvent::Merge { time, .. }
            | GwEvent::Deactivate { time, .. } => time,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GwGrowth {
    /// Picked edges in pick order.
    pub picked: Vec<EdgeId>,
    pub duals: DualSolution,
    pub trace: Vec<GwEvent>,
    pub final_time: Rational,
}

#[derive(Clone, Debug)]
pub struct GwOutcome {
    pub growth: GwGrowth,
    /// Survivors of reverse delete, in pick order.
    pub solution: Vec<EdgeId>,
}

fn ensure_proper(oracle: &RequirementOracle) -> Result<(), SolverError> {
    match oracle.flavor() {
        Flavor::ProperFromDemands(_) => Ok(()),
        Flavor::AugmentationFromForest(_) => {
            Err(SolverError::NotProper("augmentation requirements are not proper".into()))
        }
        Flavor::ExplicitTable(_) => match oracle.check_proper(DEFAULT_CHECK_CAP)? {
            None => Ok(()),
            Some(v) => Err(SolverError::NotProper(format!("{v:?}"))),
        },
    }
}

/// Growth phase.
pub fn gw_grow(g: &Multigraph, oracle: &RequirementOracle) -> Result<GwGrowth, SolverError> {
    if g.vertex_count() != oracle.ground_size() {
        return Err(SolverError::GroundMismatch {
            graph: g.vertex_count(),
            oracle: oracle.ground_size(),
        });
    }
    ensure_proper(oracle)?;
    let n = g.vertex_count();
    let mut uf = UnionFind::new(n);
    let mut members: Vec<VertexSet> = (0..n).map(VertexSet::singleton).collect();
    let mut load = vec![Rational::ZERO; g.edge_count()];
    let mut in_f = vec![false; g.edge_count()];
    let mut picked = Vec::new();
    let mut duals = DualSolution::new();
    let mut trace = Vec::new();
    let mut time = Rational::ZERO;
    let mut was_active = VertexSet::EMPTY;

    loop {
        let mut comp = vec![0usize; n];
        for (v, c) in comp.iter_mut().enumerate() {
            *c = uf.find(v);
        }
        let mut active = vec![false; n];
        let mut active_sets = Vec::new();
        for r in (0..n).filter(|&v| comp[v] == v) {
            if oracle.eval(members[r])? {
                active[r] = true;
                active_sets.push(members[r]);
            } else if !members[r].is_disjoint(was_active) {
                trace.push(GwEvent::Deactivate { time, set: members[r] });
            }
        }
        was_active = active_sets.iter().fold(VertexSet::EMPTY, |acc, s| acc.union(*s));
        if active_sets.is_empty() {
            break;
        }

        let rate = |e: EdgeId| -> i64 {
            let edge = g.edge(e);
            let (a, b) = (comp[edge.u], comp[edge.v]);
            if a == b {
                0
            } else {
                active[a] as i64 + active[b] as i64
            }
        };
        let mut step: Option<Rational> = None;
        for e in g.edge_ids().filter(|e| !in_f[e.0]) {
            let r = rate(e);
            if r > 0 {
                let slack = Rational::from_integer(g.edge(e).cost) - load[e.0];
                let cand = slack / Rational::from_integer(r);
                step = Some(step.map_or(cand, |s: Rational| s.min(cand)));
            }
        }
        let Some(step) = step else {
            return Err(SolverError::Infeasible(active_sets[0]));
        };
        for &s in &active_sets {
            duals.raise(s, step);
        }
        let rates: Vec<i64> = g.edge_ids().map(rate).collect();
        for e in g.edge_ids() {
            load[e.0] += Rational::from_integer(rates[e.0]) * step;
        }
        time += step;

        for e in g.edge_ids() {
            if in_f[e.0] || rates[e.0] == 0 {
                continue;
            }
            if load[e.0] != Rational::from_integer(g.edge(e).cost) {
                continue;
            }
            trace.push(GwEvent::EdgeTight { time, edge: e });
            let edge = g.edge(e);
            let (ra, rb) = (uf.find(edge.u), uf.find(edge.v));
            if ra == rb {
                continue;
            }
            let (left, right) = (members[ra], members[rb]);
            let merged = left.union(right);
            uf.union(ra, rb);
            let root = uf.find(ra);
            members[root] = merged;
            in_f[e.0] = true;
            picked.push(e);
            trace.push(GwEvent::Merge { time, edge: e, left, right, merged });
        }
    }
    Ok(GwGrowth { picked, duals, trace, final_time: time })
}

/// Growth followed by reverse delete.
pub fn gw_solve(g: &Multigraph, oracle: &RequirementOracle) -> Result<GwOutcome, SolverError> {
    let growth = gw_grow(g, oracle)?;
    let solution = gw_reverse_delete(g, oracle, &growth.picked)?;
    Ok(GwOutcome { growth, solution })
}

pub fn gw_reverse_delete(
    g: &Multigraph,
    oracle: &RequirementOracle,
    picked: &[EdgeId],
) -> Result<Vec<EdgeId>, SolverError> {
    ensure_proper(oracle)?;
    let method = match oracle.flavor() {
        Flavor::ProperFromDemands(_) => ViolatedSetMethod::ProperComponents,
        _ => ViolatedSetMethod::BruteForce,
    };
    reverse_delete(g, oracle, picked, method)
}

/// A merge at which the vertices of the new set disagree on parity, or
/// share a parity outside `{0, 1/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityFault {
    pub set: VertexSet,
    pub time: Rational,
    pub parities: Vec<(usize, Rational)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GwParityReport {
    pub merges_checked: usize,
    pub faults: Vec<ParityFault>,
    /// Dual entries whose fractional part is not 0 or 1/2.
    pub non_half_integral: Vec<(VertexSet, Rational)>,
}

impl GwParityReport {
    pub fn passed(&self) -> bool {
        self.faults.is_empty() && self.non_half_integral.is_empty()
    }
}

/// Vertex parity `π_v(S)`: the fractional part of `∑ y_T` over `T ∋ v`,
/// `T ⊆ S`.
pub fn vertex_parity(duals: &DualSolution, v: usize, s: VertexSet) -> Rational {
    duals
        .iter()
        .filter(|(t, _)| t.contains(v) && t.is_subset(s))
        .map(|(_, y)| y)
        .sum::<Rational>()
        .fract()
}

/// Replays the merge events of a growth trace. When `S` is formed, every
/// `T ⊊ S` has its final dual value and `y_S` is still 0, so the parity of
/// each vertex of `S` is computed over the strict subsets.
pub fn gw_parity_audit(growth: &GwGrowth) -> GwParityReport {
    let mut report = GwParityReport::default();
    for event in &growth.trace {
        let GwEvent::Merge { time, merged, .. } = *event else {
            continue;
        };
        report.merges_checked += 1;
        let parities: Vec<(usize, Rational)> = merged
            .iter()
            .map(|v| {
                let p: Rational = growth
                    .duals
                    .iter()
                    .filter(|(t, _)| t.contains(v) && t.is_proper_subset(merged))
                    .map(|(_, y)| y)
                    .sum();
                (v, p.fract())
            })
            .collect();
        let first = parities[0].1;
        let uniform = parities.iter().all(|&(_, p)| p == first);
        if !uniform || !first.is_half_integral() {
            report.faults.push(ParityFault { set: merged, time, parities });
        }
    }
    report.non_half_integral =
        growth.duals.iter().filter(|(_, y)| !y.is_half_integral()).collect();
    report
}
