//! Primal-dual growth for uncrossable requirements.
//!
//! [`wgmv_solve`] runs the plain procedure: all minimally unsatisfied sets
//! grow at unit rate until an edge crossing one of them goes tight, tight
//! edges are scanned in ascending id order and admitted when they still
//! cross a minimally unsatisfied set (the collection is recomputed after
//! every admission), and a reverse-delete pass trims the result.
//!
//! [`wgmv_half_solve`] adds parity tracking. Whenever the growth is frozen,
//! each edge `e` on the boundary of a current minimally unsatisfied set `C`
//! whose parity `π_e(C)` differs from the fractional part of the current
//! time has its cost lowered by 1/2. Edges made tight by this rejoin the
//! scan. The resulting duals are half-integral on integer costs.

mod audit;
mod history;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use audit::{
    check_certificate, parity_uniformity_audit, theorem1_certificate_check, CertificateCheck,
    ClauseResult, CERTIFICATE_BRUTE_FORCE_CAP,
    ParityAuditReport, ParityMismatch,
};
pub use history::{
    build_laminar_history, structural_audit, wgmv_degree_audit, DegreeAudit, DegreeViolation,
    IterationNode, LaminarHistory, StructuralAudit,
};

use crate::dual::DualSolution;
use crate::error::SolverError;
use crate::graph::{EdgeId, Multigraph, VertexSet};
use crate::rational::Rational;
use crate::requirements::{minimal_violated, RequirementOracle, ViolatedSetMethod};
use crate::reverse_delete::reverse_delete;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Gw,
    Wgmv,
    WgmvHalf,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Gw => "gw",
            Algorithm::Wgmv => "wgmv",
            Algorithm::WgmvHalf => "wgmv-half",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gw" => Ok(Algorithm::Gw),
            "wgmv" => Ok(Algorithm::Wgmv),
            "wgmv-half" => Ok(Algorithm::WgmvHalf),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WgmvOptions {
    /// `None` picks the structural routine matching the oracle's flavor.
    pub method: Option<ViolatedSetMethod>,
    pub parity_reductions: bool,
    pub reverse_delete: bool,
}

impl WgmvOptions {
    pub fn plain() -> Self {
        WgmvOptions { method: None, parity_reductions: false, reverse_delete: true }
    }

    pub fn half_integral() -> Self {
        WgmvOptions { method: None, parity_reductions: true, reverse_delete: true }
    }
}

/// One growth step and the scan that follows it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based.
    pub index: usize,
    pub start: Rational,
    pub end: Rational,
    /// `end - start`, the amount every active set grew.
    pub gamma: Rational,
    /// The minimally unsatisfied sets grown in this iteration.
    pub active: Vec<VertexSet>,
    /// Edges that went tight by growth and crossed an active set.
    pub tight: Vec<EdgeId>,
    /// Edges admitted during the scan after growth (including those made
    /// tight by parity reductions).
    pub admitted: Vec<EdgeId>,
}

/// A half-unit cost reduction of `edge` on behalf of `set`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionEvent {
    pub seq: usize,
    pub time: Rational,
    pub set: VertexSet,
    pub edge: EdgeId,
}

/// Completion of a reduction pass over `set`; every reduction with a
/// smaller `seq` was applied before it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionPass {
    pub seq: usize,
    pub time: Rational,
    pub set: VertexSet,
}

/// A set that was minimally unsatisfied at some point of the run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetRecord {
    pub set: VertexSet,
    /// Iteration in which the set first appeared as minimally unsatisfied
    /// (0 for the scan before any growth).
    pub appeared: usize,
    /// Iteration in which the set became satisfied.
    pub label: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WgmvCertificate {
    pub algorithm: Algorithm,
    pub method: ViolatedSetMethod,
    /// Original integer costs, by edge id.
    pub costs: Vec<i64>,
    /// Edges in admission order, before reverse delete.
    pub grown: Vec<EdgeId>,
    /// Iteration in which each grown edge was admitted.
    pub edge_labels: BTreeMap<EdgeId, usize>,
    /// Final solution, in admission order.
    pub solution: Vec<EdgeId>,
    pub duals: DualSolution,
    pub iterations: Vec<IterationRecord>,
    pub history: Vec<SetRecord>,
    pub reductions: Vec<ReductionEvent>,
    pub passes: Vec<ReductionPass>,
    pub final_time: Rational,
}

impl WgmvCertificate {
    pub fn cost(&self) -> i64 {
        self.solution.iter().map(|e| self.costs[e.0]).sum()
    }

    pub fn label_of(&self, s: VertexSet) -> Option<usize> {
        self.history.iter().find(|r| r.set == s).map(|r| r.label)
    }
}

struct Engine<'a> {
    g: &'a Multigraph,
    oracle: &'a RequirementOracle,
    method: ViolatedSetMethod,
    parity_reductions: bool,
    load: Vec<Rational>,
    halves: Vec<u32>,
    in_f: Vec<bool>,
    grown: Vec<EdgeId>,
    edge_labels: BTreeMap<EdgeId, usize>,
    duals: DualSolution,
    time: Rational,
    current: Vec<VertexSet>,
    history: BTreeMap<VertexSet, (usize, Option<usize>)>,
    iteration: usize,
    iterations: Vec<IterationRecord>,
    reductions: Vec<ReductionEvent>,
    passes: Vec<ReductionPass>,
    seq: usize,
}

impl<'a> Engine<'a> {
    fn new(
        g: &'a Multigraph,
        oracle: &'a RequirementOracle,
        method: ViolatedSetMethod,
        parity_reductions: bool,
    ) -> Self {
        let m = g.edge_count();
        Engine {
            g,
            oracle,
            method,
            parity_reductions,
            load: vec![Rational::ZERO; m],
            halves: vec![0; m],
            in_f: vec![false; m],
            grown: Vec::new(),
            edge_labels: BTreeMap::new(),
            duals: DualSolution::new(),
            time: Rational::ZERO,
            current: Vec::new(),
            history: BTreeMap::new(),
            iteration: 0,
            iterations: Vec::new(),
            reductions: Vec::new(),
            passes: Vec::new(),
            seq: 0,
        }
    }

    fn reduced_cost(&self, e: EdgeId) -> Rational {
        Rational::from_integer(self.g.edge(e).cost)
            - self.load[e.0]
            - Rational::new(self.halves[e.0] as i64, 2)
    }

    fn refresh(&mut self) -> Result<(), SolverError> {
        let report = minimal_violated(self.oracle, self.g, &self.grown, self.method)?;
        for old in &self.current {
            if !report.sets.contains(old) {
                if let Some(entry) = self.history.get_mut(old) {
                    entry.1.get_or_insert(self.iteration);
                }
            }
        }
        for &s in &report.sets {
            self.history.entry(s).or_insert((self.iteration, None));
        }
        self.current = report.sets;
        Ok(())
    }

    fn crossing_count(&self, e: EdgeId) -> usize {
        self.current.iter().filter(|&&c| self.g.crosses(e, c)).count()
    }

    fn admit(&mut self, e: EdgeId) -> Result<(), SolverError> {
        self.in_f[e.0] = true;
        self.grown.push(e);
        self.edge_labels.insert(e, self.iteration);
        self.refresh()
    }

    /// Admits tight edges crossing a current minimally unsatisfied set, in
    /// ascending id order, repeating the pass while anything is admitted.
    fn admit_tight(&mut self) -> Result<Vec<EdgeId>, SolverError> {
        let mut admitted = Vec::new();
        loop {
            let mut progress = false;
            for e in self.g.edge_ids() {
                if self.in_f[e.0] || !self.reduced_cost(e).is_zero() {
                    continue;
                }
                if self.crossing_count(e) > 0 {
                    self.admit(e)?;
                    admitted.push(e);
                    progress = true;
                }
            }
            if !progress {
                return Ok(admitted);
            }
        }
    }

    /// `π_e(S)`: fractional part of the dual load that sets inside `S` put
    /// on `e`, plus 1/2 per reduction of `e` recorded for a set inside `S`.
    fn edge_parity(&self, e: EdgeId, s: VertexSet) -> Rational {
        let grown: Rational = self
            .duals
            .iter()
            .filter(|&(t, _)| t.is_subset(s) && self.g.crosses(e, t))
            .map(|(_, y)| y)
            .sum();
        let halves: u32 = self
            .duals
            .reductions()
            .filter(|&(edge, t, _)| edge == e && t.is_subset(s))
            .map(|(_, _, k)| k)
            .sum();
        (grown + Rational::new(halves as i64, 2)).fract()
    }

    /// Returns whether some reduction made an edge tight.
    fn reduction_pass(&mut self) -> Result<bool, SolverError> {
        let target = self.time.fract();
        let mut sets = self.current.clone();
        sets.sort_by_key(|s| s.min_vertex());
        let mut new_tight = false;
        for c in sets {
            for e in self.g.cut_edges(c) {
                if self.edge_parity(e, c) == target {
                    continue;
                }
                self.halves[e.0] += 1;
                self.duals.record_reduction(e, c);
                self.reductions.push(ReductionEvent { seq: self.seq, time: self.time, set: c, edge: e });
                self.seq += 1;
                let reduced = self.reduced_cost(e);
                if reduced.is_negative() {
                    return Err(SolverError::NegativeReducedCost { edge: e, reduced, time: self.time });
                }
                if reduced.is_zero() {
                    new_tight = true;
                }
            }
            self.passes.push(ReductionPass { seq: self.seq, time: self.time, set: c });
        }
        Ok(new_tight)
    }

    /// Everything that happens while the clock is stopped.
    fn scan(&mut self) -> Result<Vec<EdgeId>, SolverError> {
        let mut admitted = Vec::new();
        loop {
            admitted.extend(self.admit_tight()?);
            if !self.parity_reductions || self.current.is_empty() {
                return Ok(admitted);
            }
            if !self.reduction_pass()? {
                return Ok(admitted);
            }
        }
    }

    fn grow(&mut self) -> Result<(), SolverError> {
        self.iteration += 1;
        let start = self.time;
        let active = self.current.clone();
        let rates: Vec<usize> = self
            .g
            .edge_ids()
            .map(|e| if self.in_f[e.0] { 0 } else { self.crossing_count(e) })
            .collect();
        let step = self
            .g
            .edge_ids()
            .filter(|e| rates[e.0] > 0)
            .map(|e| self.reduced_cost(e) / Rational::from_integer(rates[e.0] as i64))
            .min()
            .ok_or(SolverError::Infeasible(active[0]))?;
        for &c in &active {
            self.duals.raise(c, step);
        }
        for e in self.g.edge_ids() {
            self.load[e.0] += Rational::from_integer(rates[e.0] as i64) * step;
        }
        self.time += step;
        let tight: Vec<EdgeId> = self
            .g
            .edge_ids()
            .filter(|e| rates[e.0] > 0 && self.reduced_cost(*e).is_zero())
            .collect();
        let admitted = self.scan()?;
        self.iterations.push(IterationRecord {
            index: self.iteration,
            start,
            end: self.time,
            gamma: step,
            active,
            tight,
            admitted,
        });
        Ok(())
    }
}

/// Runs the growth phase and (optionally) reverse delete.
pub fn solve_with(
    g: &Multigraph,
    oracle: &RequirementOracle,
    options: WgmvOptions,
) -> Result<WgmvCertificate, SolverError> {
    if g.vertex_count() != oracle.ground_size() {
        return Err(SolverError::GroundMismatch {
            graph: g.vertex_count(),
            oracle: oracle.ground_size(),
        });
    }
    let method = options.method.unwrap_or_else(|| ViolatedSetMethod::for_oracle(oracle));
    let mut engine = Engine::new(g, oracle, method, options.parity_reductions);
    engine.refresh()?;
    engine.scan()?;
    while !engine.current.is_empty() {
        engine.grow()?;
    }
    let solution = if options.reverse_delete {
        reverse_delete(g, oracle, &engine.grown, method)?
    } else {
        engine.grown.clone()
    };
    let history = engine
        .history
        .iter()
        .map(|(&set, &(appeared, label))| SetRecord {
            set,
            appeared,
            label: label.unwrap_or(engine.iteration),
        })
        .collect();
    Ok(WgmvCertificate {
        algorithm: if options.parity_reductions { Algorithm::WgmvHalf } else { Algorithm::Wgmv },
        method,
        costs: g.edges().iter().map(|e| e.cost).collect(),
        grown: engine.grown,
        edge_labels: engine.edge_labels,
        solution,
        duals: engine.duals,
        iterations: engine.iterations,
        history,
        reductions: engine.reductions,
        passes: engine.passes,
        final_time: engine.time,
    })
}

/// Plain primal-dual growth with reverse delete.
pub fn wgmv_solve(
    g: &Multigraph,
    oracle: &RequirementOracle,
    method: Option<ViolatedSetMethod>,
) -> Result<WgmvCertificate, SolverError> {
    solve_with(g, oracle, WgmvOptions { method, ..WgmvOptions::plain() })
}

/// Growth with half-unit parity reductions; emits half-integral duals.
pub fn wgmv_half_solve(
    g: &Multigraph,
    oracle: &RequirementOracle,
    method: Option<ViolatedSetMethod>,
) -> Result<WgmvCertificate, SolverError> {
    solve_with(g, oracle, WgmvOptions { method, ..WgmvOptions::half_integral() })
}
