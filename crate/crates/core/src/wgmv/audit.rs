//! Checks that re-derive properties of a finished run from its records
//! rather than trusting the engine's internal state.

use serde::{Deserialize, Serialize};

use crate::dual::DualSolution;
use crate::error::RequirementError;
use crate::graph::{EdgeId, Multigraph, VertexSet};
use crate::oracle::feasibility_bruteforce;
use crate::rational::Rational;
use crate::requirements::{minimal_violated, RequirementOracle, ViolatedSetMethod};

use super::WgmvCertificate;

/// An edge whose parity on a set disagreed with the clock when a reduction
/// pass over that set finished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityMismatch {
    pub pass: usize,
    pub time: Rational,
    pub set: VertexSet,
    pub edge: EdgeId,
    pub parity: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityAuditReport {
    pub passes_checked: usize,
    pub edges_checked: usize,
    pub mismatches: Vec<ParityMismatch>,
    /// Sets whose replayed dual differs from the reported one.
    pub replay_errors: Vec<VertexSet>,
    /// Recorded reductions on edges that do not cross their set.
    pub misplaced_reductions: Vec<usize>,
}

impl ParityAuditReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.replay_errors.is_empty() && self.misplaced_reductions.is_empty()
    }
}

/// `y_T` at time `t`, replayed from the iteration records.
fn replayed_dual(cert: &WgmvCertificate, t: Rational) -> DualSolution {
    let mut y = DualSolution::new();
    for rec in cert.iterations.iter().take_while(|r| r.end <= t) {
        for &a in &rec.active {
            y.raise(a, rec.gamma);
        }
    }
    y
}

/// Replays the duals and reductions of `cert` and checks, for every
/// reduction pass over `C` at time `t` and every `e ∈ δ(C)`, that
/// `π_e(C) = frac(t)` once the pass is over.
pub fn parity_uniformity_audit(g: &Multigraph, cert: &WgmvCertificate) -> ParityAuditReport {
    let mut report = ParityAuditReport::default();
    for (i, r) in cert.reductions.iter().enumerate() {
        if !g.crosses(r.edge, r.set) {
            report.misplaced_reductions.push(i);
        }
    }
    let final_y = replayed_dual(cert, cert.final_time);
    for (s, v) in cert.duals.iter() {
        if final_y.value(s) != v {
            report.replay_errors.push(s);
        }
    }
    for (s, _) in final_y.iter() {
        if cert.duals.value(s).is_zero() {
            report.replay_errors.push(s);
        }
    }
    for (k, pass) in cert.passes.iter().enumerate() {
        report.passes_checked += 1;
        let y = replayed_dual(cert, pass.time);
        let target = pass.time.fract();
        for e in g.cut_edges(pass.set) {
            report.edges_checked += 1;
            let grown: Rational = y
                .iter()
                .filter(|&(t, _)| t.is_subset(pass.set) && g.crosses(e, t))
                .map(|(_, v)| v)
                .sum();
            let halves = cert
                .reductions
                .iter()
                .filter(|r| r.seq < pass.seq && r.edge == e && r.set.is_subset(pass.set))
                .count() as i64;
            let parity = (grown + Rational::new(halves, 2)).fract();
            if parity != target {
                report.mismatches.push(ParityMismatch { pass: k, time: pass.time, set: pass.set, edge: e, parity });
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Clause-by-clause verdict on a (solution, dual) pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateCheck {
    pub clauses: Vec<ClauseResult>,
    pub cost: i64,
    pub dual_value: Rational,
    /// `cost / dual_value`; absent when the dual value is zero.
    pub ratio: Option<Rational>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&ClauseResult> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

fn clause(name: &str, passed: bool, detail: impl Into<String>) -> ClauseResult {
    ClauseResult { name: name.to_string(), passed, detail: detail.into() }
}

/// Largest ground set on which feasibility is decided by enumerating all
/// subsets.
pub const CERTIFICATE_BRUTE_FORCE_CAP: usize = 16;

/// Checks a solution and a dual against the graph and requirement, each
/// clause on its own: feasibility, laminar support, dual feasibility
/// against the original costs, half-integrality, and
/// `cost <= 2 ∑ f(S) y_S`.
pub fn check_certificate(
    g: &Multigraph,
    oracle: &RequirementOracle,
    solution: &[EdgeId],
    duals: &DualSolution,
) -> Result<CertificateCheck, RequirementError> {
    let mut clauses = Vec::new();

    let bad_ids: Vec<EdgeId> = solution.iter().copied().filter(|e| e.0 >= g.edge_count()).collect();
    if !bad_ids.is_empty() {
        clauses.push(clause("feasible", false, format!("unknown edges {bad_ids:?}")));
        return Ok(CertificateCheck { clauses, cost: 0, dual_value: Rational::ZERO, ratio: None });
    }
    let mut dedup = solution.to_vec();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != solution.len() {
        clauses.push(clause("feasible", false, "solution repeats an edge"));
    } else if oracle.ground_size() <= CERTIFICATE_BRUTE_FORCE_CAP {
        match feasibility_bruteforce(g, oracle, solution)? {
            None => clauses.push(clause("feasible", true, "all subsets enumerated")),
            Some(s) => clauses.push(clause("feasible", false, format!("{s} has no solution edge"))),
        }
    } else {
        let method = ViolatedSetMethod::for_oracle(oracle);
        let report = minimal_violated(oracle, g, solution, method)?;
        match report.sets.first() {
            None => clauses.push(clause("feasible", true, "structural check")),
            Some(s) => clauses.push(clause("feasible", false, format!("{s} has no solution edge"))),
        }
    }

    let ground = oracle.ground_set();
    let outside: Vec<VertexSet> = duals.support().into_iter().filter(|s| !s.is_subset(ground)).collect();
    match (outside.first(), duals.is_laminar()) {
        (Some(s), _) => clauses.push(clause("laminar", false, format!("{s} is not a vertex subset"))),
        (None, Ok(())) => clauses.push(clause("laminar", true, format!("{} sets", duals.len()))),
        (None, Err((a, b))) => clauses.push(clause("laminar", false, format!("{a} and {b} cross"))),
    }

    let overloaded = duals.overloaded_edges(g);
    match overloaded.first() {
        None => clauses.push(clause("dual-feasible", true, "every edge load within cost")),
        Some((e, load)) => clauses.push(clause(
            "dual-feasible",
            false,
            format!("{e} carries {load} > {}", g.edge(*e).cost),
        )),
    }

    let fractional: Vec<(VertexSet, Rational)> =
        duals.iter().filter(|(_, v)| !v.is_half_integral()).collect();
    match fractional.first() {
        None => clauses.push(clause("half-integral", true, "all values in ½ℤ")),
        Some((s, v)) => clauses.push(clause("half-integral", false, format!("y{s} = {v}"))),
    }

    let cost: i64 = solution.iter().map(|&e| g.edge(e).cost).sum();
    let dual_value = duals.objective(oracle)?;
    let ratio = (!dual_value.is_zero()).then(|| Rational::from_integer(cost) / dual_value);
    let bound = Rational::from_integer(2) * dual_value;
    let within = Rational::from_integer(cost) <= bound;
    clauses.push(clause(
        "two-approximation",
        within,
        format!("cost {cost}, 2 × dual {bound}"),
    ));

    Ok(CertificateCheck { clauses, cost, dual_value, ratio })
}

/// [`check_certificate`] applied to the solution and duals of a run.
pub fn theorem1_certificate_check(
    g: &Multigraph,
    oracle: &RequirementOracle,
    cert: &WgmvCertificate,
) -> Result<CertificateCheck, RequirementError> {
    check_certificate(g, oracle, &cert.solution, &cert.duals)
}
