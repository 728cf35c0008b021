//! Path flows read off the duals of the face-level augmentation instance,
//! their independent verification, and the full multicut/flow pipeline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dual::DualSolution;
use crate::error::SolverError;
use crate::graph::{EdgeId, Multigraph, Vertex, VertexSet};
use crate::planar::{dualize, multicut_from_cover, DualCorrespondence, DualizeError, EdgeKind, MulticutError, SeymourInstance};
use crate::rational::Rational;
use crate::requirements::RequirementOracle;
use crate::wgmv::{theorem1_certificate_check, wgmv_half_solve, ClauseResult, WgmvCertificate};

/// One flow path for one demand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowPath {
    pub demand: EdgeId,
    /// Supply edges from the demand's first endpoint to its second.
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<Vertex>,
    pub value: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowAssignment {
    pub paths: Vec<FlowPath>,
}

impl FlowAssignment {
    pub fn total(&self) -> Rational {
        self.paths.iter().map(|p| p.value).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot read a flow path off set {set}: {reason}")]
pub struct ExtractionError {
    pub set: VertexSet,
    pub reason: String,
}

/// Turns each dual set `S` with `y_S > 0` into a path carrying `y_S`.
///
/// The primal edges whose duals cross `S` form an even subgraph holding
/// exactly one demand edge `d`. When that subgraph is a single cycle the
/// path is the cycle minus `d`. Otherwise (the boundary touches itself at a
/// cut vertex) the path is a shortest supply path between the ends of `d`
/// inside the boundary; every edge it uses still crosses `S`, so the
/// capacity argument is unchanged. Equal (demand, path) pairs are merged.
pub fn extract_flow(
    inst: &SeymourInstance,
    corr: &DualCorrespondence,
    duals: &DualSolution,
) -> Result<FlowAssignment, ExtractionError> {
    Ok(extract_flow_counted(inst, corr, duals)?.0)
}

/// [`extract_flow`] that also returns how many boundaries were not a
/// single cycle.
pub fn extract_flow_counted(
    inst: &SeymourInstance,
    corr: &DualCorrespondence,
    duals: &DualSolution,
) -> Result<(FlowAssignment, usize), ExtractionError> {
    let mut merged: BTreeMap<(EdgeId, Vec<EdgeId>), (Vec<Vertex>, Rational)> = BTreeMap::new();
    let mut non_simple = 0;
    for (s, y) in duals.iter() {
        let fail = |reason: String| ExtractionError { set: s, reason };
        let boundary = corr.primal_boundary(s);
        let demands: Vec<EdgeId> =
            boundary.iter().copied().filter(|&e| inst.edge(e).kind == EdgeKind::Demand).collect();
        let [demand] = demands[..] else {
            return Err(fail(format!("boundary holds {} demand edges", demands.len())));
        };
        let mut degree = vec![0usize; inst.vertex_count];
        for &e in &boundary {
            degree[inst.edge(e).u] += 1;
            degree[inst.edge(e).v] += 1;
        }
        if let Some(v) = (0..inst.vertex_count).find(|&v| degree[v] % 2 == 1) {
            return Err(fail(format!("vertex {v} has odd degree {} on the boundary", degree[v])));
        }
        let supply: Vec<EdgeId> = boundary.iter().copied().filter(|&e| e != demand).collect();
        let d = inst.edge(demand);
        let (vertices, edges) = shortest_path(inst, &supply, d.u, d.v)
            .ok_or_else(|| fail(format!("no boundary path joins {} and {}", d.u, d.v)))?;
        if edges.len() != supply.len() {
            non_simple += 1;
        }
        let entry = merged.entry((demand, edges)).or_insert((vertices, Rational::ZERO));
        entry.1 += y;
    }
    let flow = FlowAssignment {
        paths: merged
            .into_iter()
            .map(|((demand, edges), (vertices, value))| FlowPath { demand, edges, vertices, value })
            .collect(),
    };
    Ok((flow, non_simple))
}

/// Breadth-first path from `from` to `to` over `allowed` edges.
fn shortest_path(
    inst: &SeymourInstance,
    allowed: &[EdgeId],
    from: Vertex,
    to: Vertex,
) -> Option<(Vec<Vertex>, Vec<EdgeId>)> {
    let mut prev: Vec<Option<(Vertex, EdgeId)>> = vec![None; inst.vertex_count];
    let mut seen = vec![false; inst.vertex_count];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            break;
        }
        for &e in allowed {
            let edge = inst.edge(e);
            let y = if edge.u == x {
                edge.v
            } else if edge.v == x {
                edge.u
            } else {
                continue;
            };
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some((x, e));
                queue.push_back(y);
            }
        }
    }
    if !seen[to] {
        return None;
    }
    let (mut vertices, mut edges) = (vec![to], Vec::new());
    let mut at = to;
    while let Some((p, e)) = prev[at] {
        vertices.push(p);
        edges.push(e);
        at = p;
    }
    vertices.reverse();
    edges.reverse();
    Some((vertices, edges))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowVerdict {
    pub clauses: Vec<ClauseResult>,
    pub total: Rational,
    pub half_integral: bool,
}

impl FlowVerdict {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

fn path_problem(inst: &SeymourInstance, p: &FlowPath) -> Option<String> {
    let Some(d) = inst.edges.get(p.demand.0) else {
        return Some(format!("unknown demand {}", p.demand));
    };
    if d.kind != EdgeKind::Demand {
        return Some(format!("{} is not a demand edge", p.demand));
    }
    if p.vertices.len() != p.edges.len() + 1 {
        return Some(format!("path for {} lists {} vertices for {} edges", p.demand, p.vertices.len(), p.edges.len()));
    }
    if p.vertices.first() != Some(&d.u) || p.vertices.last() != Some(&d.v) {
        return Some(format!("path for {} does not join {} and {}", p.demand, d.u, d.v));
    }
    for (i, &e) in p.edges.iter().enumerate() {
        let Some(edge) = inst.edges.get(e.0) else {
            return Some(format!("unknown edge {e}"));
        };
        if edge.kind != EdgeKind::Supply {
            return Some(format!("{e} on the path for {} is not a supply edge", p.demand));
        }
        let (a, b) = (p.vertices[i], p.vertices[i + 1]);
        if !((edge.u == a && edge.v == b) || (edge.u == b && edge.v == a)) {
            return Some(format!("{e} does not join {a} and {b}"));
        }
    }
    None
}

/// Checks endpoints, nonnegativity, capacities and half-integrality of a
/// path flow with exact sums.
pub fn verify_flow(inst: &SeymourInstance, flow: &FlowAssignment) -> FlowVerdict {
    let mut clauses = Vec::new();
    let problem = flow.paths.iter().find_map(|p| path_problem(inst, p));
    clauses.push(ClauseResult {
        name: "endpoints".into(),
        passed: problem.is_none(),
        detail: problem.unwrap_or_else(|| format!("{} paths", flow.paths.len())),
    });

    let negative = flow.paths.iter().find(|p| p.value.is_negative());
    clauses.push(ClauseResult {
        name: "nonnegative".into(),
        passed: negative.is_none(),
        detail: negative.map_or("all values >= 0".into(), |p| format!("path for {} has value {}", p.demand, p.value)),
    });

    let mut load: BTreeMap<EdgeId, Rational> = BTreeMap::new();
    for p in &flow.paths {
        for &e in &p.edges {
            *load.entry(e).or_insert(Rational::ZERO) += p.value;
        }
    }
    let over = load.iter().find(|(&e, &l)| {
        inst.edges.get(e.0).is_some_and(|edge| l > Rational::from_integer(edge.capacity))
    });
    clauses.push(ClauseResult {
        name: "capacity".into(),
        passed: over.is_none(),
        detail: over.map_or("every load within capacity".into(), |(&e, &l)| {
            format!("{e} carries {l} > {}", inst.edge(e).capacity)
        }),
    });

    let fractional = flow.paths.iter().find(|p| !p.value.is_half_integral());
    let half_integral = fractional.is_none();
    clauses.push(ClauseResult {
        name: "half-integral".into(),
        passed: half_integral,
        detail: fractional.map_or("all values in ½ℤ".into(), |p| format!("path for {} has value {}", p.demand, p.value)),
    });

    FlowVerdict { clauses, total: flow.total(), half_integral }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("invalid embedding: {0}")]
    Dualize(#[from] DualizeError),
    #[error("solver failed on the dual: {0}")]
    Solver(#[from] SolverError),
    #[error("cover does not give a multicut: {0}")]
    Multicut(#[from] MulticutError),
    #[error("flow extraction failed: {0}")]
    Extraction(#[from] ExtractionError),
    #[error("check failed: {0}")]
    Check(String),
}

/// Everything the pipeline produced for one instance.
#[derive(Clone, Debug)]
pub struct GapReport {
    pub dual_graph: Multigraph,
    pub dual_oracle: RequirementOracle,
    pub correspondence: DualCorrespondence,
    pub certificate: WgmvCertificate,
    pub multicut: Vec<EdgeId>,
    pub multicut_value: i64,
    pub flow: FlowAssignment,
    pub flow_value: Rational,
    pub dual_sum: Rational,
    /// `C / F`; absent when `F = 0`.
    pub ratio: Option<Rational>,
    /// Dual sets whose primal boundary was not a single cycle.
    pub non_simple_boundaries: usize,
}

/// Dualizes, solves with half-integral duals, maps the cover to a multicut
/// and the duals to a flow, verifies both, and checks
/// `F = ∑ y_S` and `F <= C <= 2F`.
pub fn gap_report(inst: &SeymourInstance) -> Result<GapReport, PipelineError> {
    let (dual_graph, dual_oracle, corr) = dualize(inst)?;
    let certificate = wgmv_half_solve(&dual_graph, &dual_oracle, None)?;
    let check = theorem1_certificate_check(&dual_graph, &dual_oracle, &certificate)
        .map_err(SolverError::from)?;
    if let Some(c) = check.clauses.iter().find(|c| !c.passed) {
        return Err(PipelineError::Check(format!("dual certificate clause {}: {}", c.name, c.detail)));
    }
    let multicut = multicut_from_cover(inst, &corr, &certificate.solution)?;
    let multicut_value = inst.capacity(&multicut);
    if multicut_value != certificate.cost() {
        return Err(PipelineError::Check(format!(
            "multicut capacity {multicut_value} differs from cover cost {}",
            certificate.cost()
        )));
    }
    let (flow, non_simple_boundaries) = extract_flow_counted(inst, &corr, &certificate.duals)?;
    let verdict = verify_flow(inst, &flow);
    if let Some(c) = verdict.clauses.iter().find(|c| !c.passed) {
        return Err(PipelineError::Check(format!("flow clause {}: {}", c.name, c.detail)));
    }
    let flow_value = verdict.total;
    let dual_sum = certificate.duals.total();
    if flow_value != dual_sum {
        return Err(PipelineError::Check(format!("flow value {flow_value} differs from dual sum {dual_sum}")));
    }
    let c = Rational::from_integer(multicut_value);
    if flow_value > c {
        return Err(PipelineError::Check(format!("flow {flow_value} exceeds multicut {c}")));
    }
    if c > Rational::from_integer(2) * flow_value {
        return Err(PipelineError::Check(format!("multicut {c} exceeds twice the flow {flow_value}")));
    }
    let ratio = (!flow_value.is_zero()).then(|| c / flow_value);
    Ok(GapReport {
        dual_graph,
        dual_oracle,
        correspondence: corr,
        certificate,
        multicut,
        multicut_value,
        flow,
        flow_value,
        dual_sum,
        ratio,
        non_simple_boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::SeymourEdge;

    fn parallel_pair(capacity: i64) -> SeymourInstance {
        SeymourInstance::new(
            2,
            vec![
                SeymourEdge { u: 0, v: 1, kind: EdgeKind::Supply, capacity },
                SeymourEdge { u: 0, v: 1, kind: EdgeKind::Demand, capacity: 0 },
            ],
            vec![vec![EdgeId(0), EdgeId(1)], vec![EdgeId(0), EdgeId(1)]],
        )
        .unwrap()
    }

    #[test]
    fn parallel_pair_saturates() {
        let report = gap_report(&parallel_pair(4)).unwrap();
        assert_eq!(report.multicut_value, 4);
        assert_eq!(report.flow_value, Rational::from_integer(4));
        assert_eq!(report.ratio, Some(Rational::ONE));
        assert_eq!(report.flow.paths.len(), 1);
        assert_eq!(report.flow.paths[0].edges, vec![EdgeId(0)]);
        assert_eq!(report.flow.paths[0].value, Rational::from_integer(4));
    }

    #[test]
    fn empty_duals_give_empty_flow() {
        let inst = parallel_pair(4);
        let (_, _, corr) = dualize(&inst).unwrap();
        let flow = extract_flow(&inst, &corr, &DualSolution::new()).unwrap();
        assert!(flow.paths.is_empty());
        assert!(verify_flow(&inst, &flow).passed());
    }

    #[test]
    fn injected_faults_are_reported() {
        let inst = parallel_pair(4);
        let report = gap_report(&inst).unwrap();
        let mut doubled = report.flow.clone();
        doubled.paths.push(doubled.paths[0].clone());
        let verdict = verify_flow(&inst, &doubled);
        assert!(!verdict.clause("capacity").unwrap().passed);
        assert!(verdict.clause("capacity").unwrap().detail.contains("e0"));

        let mut third = report.flow.clone();
        third.paths[0].value = Rational::new(1, 3);
        let verdict = verify_flow(&inst, &third);
        assert!(!verdict.half_integral);
        assert!(verdict.clause("capacity").unwrap().passed);
    }
}
