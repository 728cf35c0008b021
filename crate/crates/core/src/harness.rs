//! Randomized property harness. Every solver and audit runs on seeded
//! random instances with brute force as ground truth where the caps allow.
//! Failing instances are shrunk before they are reported.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual::DualSolution;
use crate::error::SolverError;
use crate::flow::gap_report;
use crate::format::{InstanceFile, FORMAT_VERSION};
use crate::generate::{random_ecap, random_proper, random_seymour, SizeBounds};
use crate::graph::{EdgeId, Multigraph, VertexSet};
use crate::gw::{gw_parity_audit, gw_solve};
use crate::oracle::{feasibility_bruteforce, min_cut_cover_bruteforce, multigraph_isomorphic, OPT_EDGE_CAP};
use crate::planar::{check_multicut, SeymourInstance};
use crate::rational::Rational;
use crate::requirements::{
    minimal_violated, minimal_violated_bruteforce, Flavor, RequirementOracle, ViolatedSetMethod,
    DEFAULT_CHECK_CAP, DEFAULT_ENUMERATION_CAP,
};
use crate::reverse_delete::redundant_edge;
use crate::wgmv::{
    build_laminar_history, check_certificate, parity_uniformity_audit, solve_with, structural_audit, WgmvOptions,
};

/// Deliberate solver defects, used to show that the properties notice
/// them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    None,
    SkipReverseDelete,
    SkipReductions,
}

impl std::str::FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Fault::None),
            "skip-reverse-delete" => Ok(Fault::SkipReverseDelete),
            "skip-reductions" => Ok(Fault::SkipReductions),
            other => Err(format!("unknown fault {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub seed: u64,
    /// Instances of each kind.
    pub count: usize,
    pub bounds: SizeBounds,
    pub planar_bounds: SizeBounds,
    pub fault: Fault,
    pub shrink: bool,
}

impl HarnessConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        HarnessConfig {
            seed,
            count,
            bounds: SizeBounds::SMALL,
            planar_bounds: SizeBounds::PLANAR,
            fault: Fault::None,
            shrink: true,
        }
    }
}

/// One generated instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Case {
    Proper(Multigraph, RequirementOracle),
    Augmentation(Multigraph, RequirementOracle),
    Planar(SeymourInstance),
}

impl Case {
    pub fn to_file(&self) -> InstanceFile {
        match self {
            Case::Proper(g, f) | Case::Augmentation(g, f) => {
                InstanceFile::from_cover(g, f).expect("generated requirements serialize")
            }
            Case::Planar(inst) => InstanceFile::from_seymour(inst),
        }
    }

    fn size(&self) -> (usize, usize) {
        match self {
            Case::Proper(g, _) | Case::Augmentation(g, _) => (g.vertex_count(), g.edge_count()),
            Case::Planar(inst) => (inst.vertex_count, inst.edges.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// Not applicable (outside caps, or the instance itself is invalid).
    Skip,
}

fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

type Results = Vec<(String, Outcome)>;

fn push(out: &mut Results, name: &str, o: Outcome) {
    out.push((name.to_string(), o));
}

/// Every property on one instance.
pub fn evaluate(case: &Case, fault: Fault) -> Results {
    let mut out = Vec::new();
    match case {
        Case::Proper(g, f) => {
            let opt = optimum(g, f);
            if opt == Some(None) {
                return out;
            }
            evaluate_gw(g, f, opt.flatten(), &mut out);
            evaluate_wgmv(g, f, opt.flatten(), fault, false, &mut out);
            evaluate_wgmv(g, f, opt.flatten(), fault, true, &mut out);
        }
        Case::Augmentation(g, f) => {
            let opt = optimum(g, f);
            if opt == Some(None) {
                return out;
            }
            evaluate_wgmv(g, f, opt.flatten(), fault, false, &mut out);
            evaluate_wgmv(g, f, opt.flatten(), fault, true, &mut out);
        }
        Case::Planar(inst) => evaluate_planar(inst, &mut out),
    }
    out
}

/// `Some(None)` when infeasible, `None` when outside the caps.
fn optimum(g: &Multigraph, f: &RequirementOracle) -> Option<Option<i64>> {
    if g.vertex_count() > DEFAULT_ENUMERATION_CAP || g.edge_count() > OPT_EDGE_CAP {
        return None;
    }
    min_cut_cover_bruteforce(g, f).ok().map(|o| o.map(|c| c.cost))
}

fn opt_properties(prefix: &str, cost: i64, dual: Rational, opt: Option<i64>, out: &mut Results) {
    let Some(opt) = opt else {
        push(out, &format!("{prefix}.opt-two-approx"), Outcome::Skip);
        push(out, &format!("{prefix}.weak-duality"), Outcome::Skip);
        return;
    };
    push(out, &format!("{prefix}.opt-two-approx"), verdict(cost <= 2 * opt, || format!("cost {cost} > 2 × OPT {opt}")));
    push(
        out,
        &format!("{prefix}.weak-duality"),
        verdict(dual <= Rational::from_integer(opt), || format!("dual {dual} > OPT {opt}")),
    );
}

fn evaluate_gw(g: &Multigraph, f: &RequirementOracle, opt: Option<i64>, out: &mut Results) {
    let run = match gw_solve(g, f) {
        Ok(run) => run,
        Err(e) => return push(out, "gw.solves", Outcome::Fail(e.to_string())),
    };
    push(out, "gw.solves", Outcome::Pass);
    let duals = &run.growth.duals;
    let feasible = feasibility_bruteforce(g, f, &run.solution).ok().flatten();
    push(out, "gw.feasible", verdict(feasible.is_none(), || format!("{} is uncovered", feasible.unwrap())));
    let frac = duals.iter().find(|(_, y)| !y.is_half_integral());
    push(out, "gw.half-integral", verdict(frac.is_none(), || format!("y{} = {}", frac.unwrap().0, frac.unwrap().1)));
    let over = duals.overloaded_edges(g);
    push(out, "gw.dual-feasible", verdict(over.is_empty(), || format!("{:?}", over[0])));
    let dual = duals.objective(f).unwrap_or(Rational::ZERO);
    let cost = g.total_cost(&run.solution);
    push(
        out,
        "gw.approximation",
        verdict(Rational::from_integer(cost) <= Rational::from_integer(2) * dual, || format!("cost {cost}, dual {dual}")),
    );
    let parity = gw_parity_audit(&run.growth);
    push(out, "gw.parity", verdict(parity.passed(), || format!("{parity:?}")));
    opt_properties("gw", cost, dual, opt, out);
}

fn evaluate_wgmv(
    g: &Multigraph,
    f: &RequirementOracle,
    opt: Option<i64>,
    fault: Fault,
    half: bool,
    out: &mut Results,
) {
    let prefix = if half { "wgmv-half" } else { "wgmv" };
    let name = |p: &str| format!("{prefix}.{p}");
    let options = WgmvOptions {
        method: None,
        parity_reductions: half && fault != Fault::SkipReductions,
        reverse_delete: fault != Fault::SkipReverseDelete,
    };
    let cert = match solve_with(g, f, options) {
        Ok(c) => c,
        Err(SolverError::Infeasible(_)) => return,
        Err(e) => return push(out, &name("solves"), Outcome::Fail(e.to_string())),
    };
    push(out, &name("solves"), Outcome::Pass);

    match check_certificate(g, f, &cert.solution, &cert.duals) {
        Ok(check) => {
            for c in &check.clauses {
                if c.name == "half-integral" && !half {
                    continue;
                }
                push(out, &name(&c.name), verdict(c.passed, || c.detail.clone()));
            }
        }
        Err(e) => push(out, &name("certificate"), Outcome::Fail(e.to_string())),
    }

    let method = cert.method;
    match redundant_edge(g, f, &cert.solution, method) {
        Ok(r) => push(out, &name("minimal"), verdict(r.is_none(), || format!("{} is redundant", r.unwrap()))),
        Err(e) => push(out, &name("minimal"), Outcome::Fail(e.to_string())),
    }

    let dual = cert.duals.objective(f).unwrap_or(Rational::ZERO);
    opt_properties(prefix, cert.cost(), dual, opt, out);

    match build_laminar_history(g, &cert) {
        Ok(history) => {
            let audit = structural_audit(g, &cert, &history);
            let first = |v: &Vec<String>| v.first().cloned().unwrap_or_default();
            push(out, &name("forest"), verdict(audit.forest.is_empty(), || first(&audit.forest)));
            push(out, &name("alpha-partition"), verdict(audit.alpha_partition.is_empty(), || first(&audit.alpha_partition)));
            push(out, &name("labels"), verdict(audit.labels.is_empty(), || first(&audit.labels)));
            push(out, &name("critical-alpha"), verdict(audit.critical_alpha.is_empty(), || first(&audit.critical_alpha)));
            push(
                out,
                &name("degree-bound"),
                verdict(audit.degree.passed(), || format!("{:?}", audit.degree.sharp_violations.first())),
            );
        }
        Err((a, b)) => push(out, &name("forest"), Outcome::Fail(format!("history not laminar: {a}, {b}"))),
    }

    if half {
        let audit = parity_uniformity_audit(g, &cert);
        push(out, &name("parity-uniformity"), verdict(audit.passed(), || format!("{:?}", audit.mismatches.first())));
    }

    // the structural violated-set routine agrees with enumeration along the run
    if method != ViolatedSetMethod::BruteForce && g.vertex_count() <= DEFAULT_ENUMERATION_CAP {
        let mut problem = None;
        for k in 0..=cert.grown.len() {
            let prefix_edges = &cert.grown[..k];
            let fast = minimal_violated(f, g, prefix_edges, method).map(|r| r.sets);
            let slow = minimal_violated_bruteforce(f, g, prefix_edges, DEFAULT_ENUMERATION_CAP).map(|r| r.sets);
            if fast != slow {
                problem = Some(format!("after {k} edges: {fast:?} vs {slow:?}"));
                break;
            }
        }
        push(out, &name("violated-sets"), verdict(problem.is_none(), || problem.unwrap()));
    }
}

fn evaluate_planar(inst: &SeymourInstance, out: &mut Results) {
    let report = match gap_report(inst) {
        Ok(r) => r,
        Err(e) => return push(out, "planar.pipeline", Outcome::Fail(e.to_string())),
    };
    push(out, "planar.pipeline", Outcome::Pass);
    let c = Rational::from_integer(report.multicut_value);
    let flow = report.flow_value;
    push(
        out,
        "planar.value-preserved",
        verdict(flow == report.certificate.duals.total(), || format!("flow {flow} vs dual sum {}", report.dual_sum)),
    );
    push(out, "planar.weak-duality", verdict(flow <= c, || format!("flow {flow} > multicut {c}")));
    push(
        out,
        "planar.two-approx",
        verdict(c <= Rational::from_integer(2) * flow, || format!("multicut {c} > 2 × flow {flow}")),
    );
    let frac = report.flow.paths.iter().find(|p| !p.value.is_half_integral());
    push(out, "planar.half-integral-flow", verdict(frac.is_none(), || format!("{:?}", frac.unwrap())));
    let cut = check_multicut(inst, &report.multicut);
    push(out, "planar.multicut", verdict(cut.is_ok(), || cut.unwrap_err().to_string()));

    let g = &report.dual_graph;
    let f = &report.dual_oracle;
    if g.vertex_count() <= DEFAULT_CHECK_CAP {
        let v = f.check_uncrossable(DEFAULT_CHECK_CAP).ok().flatten();
        push(out, "planar.uncrossable", verdict(v.is_none(), || format!("{v:?}")));
    }

    // every cover of the dual, feasible or not, agrees with a direct
    // reachability check on the primal
    let mut rng = ChaCha8Rng::seed_from_u64(g.edge_count() as u64 * 7919 + g.vertex_count() as u64);
    let mut problem = None;
    let trials = if g.edge_count() <= 8 { 1usize << g.edge_count() } else { 256 };
    for t in 0..trials {
        let cover: Vec<EdgeId> = if g.edge_count() <= 8 {
            g.edge_ids().filter(|e| t >> e.0 & 1 == 1).collect()
        } else {
            let p = rng.gen_range(0.2..0.9);
            g.edge_ids().filter(|_| rng.gen_bool(p)).collect()
        };
        let dual_feasible = if g.vertex_count() <= DEFAULT_ENUMERATION_CAP {
            feasibility_bruteforce(g, f, &cover).ok().flatten().is_none()
        } else {
            minimal_violated(f, g, &cover, ViolatedSetMethod::EcapStructural).is_ok_and(|r| r.is_empty())
        };
        let primal: Vec<EdgeId> = cover.iter().map(|d| report.correspondence.supply_of_dual[d.0]).collect();
        let is_multicut = check_multicut(inst, &primal).is_ok();
        if dual_feasible != is_multicut {
            problem = Some(format!("cover {cover:?}: dual feasible {dual_feasible}, multicut {is_multicut}"));
            break;
        }
        if inst.capacity(&primal) != g.total_cost(&cover) {
            problem = Some(format!("cover {cover:?} changes cost"));
            break;
        }
    }
    push(out, "planar.cover-roundtrip", verdict(problem.is_none(), || problem.unwrap()));

    let connected = {
        let all: Vec<(usize, usize)> = inst.edges.iter().map(|e| (e.u, e.v)).collect();
        let mut uf = crate::graph::UnionFind::new(inst.vertex_count);
        all.iter().for_each(|&(u, v)| {
            uf.union(u, v);
        });
        uf.classes().len() == 1
    };
    if connected && report.correspondence.dropped_supply.is_empty() && report.correspondence.removed_demands.is_empty() {
        let ok = inst
            .dual_instance()
            .and_then(|d| d.dual_instance())
            .is_ok_and(|dd| multigraph_isomorphic(&dd, inst));
        push(out, "planar.double-dual", verdict(ok, || "double dual is not isomorphic".into()));
    }
}

/// Smaller instances: one edge or one vertex removed.
pub fn shrink_candidates(case: &Case) -> Vec<Case> {
    let mut out = Vec::new();
    match case {
        Case::Proper(g, f) | Case::Augmentation(g, f) => {
            let pairs: Vec<(usize, usize, i64)> = g.edges().iter().map(|e| (e.u, e.v, e.cost)).collect();
            let rebuild = |n: usize, edges: Vec<(usize, usize, i64)>, req: Vec<(usize, usize)>| -> Option<Case> {
                let g = Multigraph::from_edges(n, edges).ok()?;
                Some(match case {
                    Case::Proper(..) => Case::Proper(g, RequirementOracle::proper_from_demands(n, req).ok()?),
                    _ => Case::Augmentation(g, RequirementOracle::augmentation(n, req).ok()?),
                })
            };
            let req = match f.flavor() {
                Flavor::ProperFromDemands(d) | Flavor::AugmentationFromForest(d) => d.clone(),
                Flavor::ExplicitTable(_) => return out,
            };
            let n = g.vertex_count();
            for i in 0..pairs.len() {
                let mut e = pairs.clone();
                e.remove(i);
                out.extend(rebuild(n, e, req.clone()));
            }
            for i in 0..req.len() {
                let mut r = req.clone();
                r.remove(i);
                out.extend(rebuild(n, pairs.clone(), r));
            }
            if n > 2 {
                for v in 0..n {
                    let relabel = |x: usize| if x > v { x - 1 } else { x };
                    let e = pairs.iter().filter(|p| p.0 != v && p.1 != v).map(|&(a, b, c)| (relabel(a), relabel(b), c)).collect();
                    let r = req.iter().filter(|p| p.0 != v && p.1 != v).map(|&(a, b)| (relabel(a), relabel(b))).collect();
                    out.extend(rebuild(n - 1, e, r));
                }
            }
        }
        Case::Planar(inst) => {
            for x in 0..inst.edges.len() {
                out.extend(remove_planar(inst, |i| i == x, None).map(Case::Planar));
            }
            if inst.vertex_count > 1 {
                for v in 0..inst.vertex_count {
                    out.extend(
                        remove_planar(inst, |i| inst.edges[i].u == v || inst.edges[i].v == v, Some(v)).map(Case::Planar),
                    );
                }
            }
        }
    }
    out
}

fn remove_planar(inst: &SeymourInstance, drop: impl Fn(usize) -> bool, vertex: Option<usize>) -> Option<SeymourInstance> {
    let keep: Vec<usize> = (0..inst.edges.len()).filter(|&i| !drop(i)).collect();
    let new_id = |old: usize| keep.iter().position(|&k| k == old);
    let relabel = |x: usize| match vertex {
        Some(v) if x > v => x - 1,
        _ => x,
    };
    let edges = keep
        .iter()
        .map(|&i| {
            let e = inst.edges[i];
            crate::planar::SeymourEdge { u: relabel(e.u), v: relabel(e.v), ..e }
        })
        .collect();
    let rotation = inst
        .rotation
        .iter()
        .enumerate()
        .filter(|(x, _)| Some(*x) != vertex)
        .map(|(_, r)| r.iter().filter_map(|e| new_id(e.0).map(EdgeId)).collect())
        .collect();
    let n = inst.vertex_count - usize::from(vertex.is_some());
    SeymourInstance::new(n, edges, rotation).ok()
}

fn fails(case: &Case, fault: Fault, property: &str) -> Option<String> {
    evaluate(case, fault).into_iter().find_map(|(name, o)| match o {
        Outcome::Fail(d) if name == property => Some(d),
        _ => None,
    })
}

/// Greedily removes edges and vertices while `property` keeps failing.
/// The result is locally minimal: every single removal makes the property
/// pass or become inapplicable.
pub fn shrink(case: &Case, fault: Fault, property: &str) -> (Case, String) {
    let mut current = case.clone();
    let mut detail = fails(case, fault, property).unwrap_or_default();
    'outer: loop {
        for cand in shrink_candidates(&current) {
            if let Some(d) = fails(&cand, fault, property) {
                current = cand;
                detail = d;
                continue 'outer;
            }
        }
        return (current, detail);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub instance_index: usize,
    pub detail: String,
    /// Vertex and edge count before shrinking.
    pub original_size: (usize, usize),
    pub instance: InstanceFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub instances_run: usize,
    pub failures: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnessReport {
    pub format_version: u32,
    pub kind: String,
    pub config: HarnessConfig,
    pub properties: Vec<PropertyResult>,
    /// Observations that are not pass/fail properties.
    pub stats: BTreeMap<String, String>,
}

impl HarnessReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.failures == 0)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.properties.iter().filter(|p| p.failures > 0).map(|p| p.name.as_str()).collect()
    }
}

/// The instances a harness run visits, in order.
pub fn harness_cases(config: &HarnessConfig) -> Vec<Case> {
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let mut cases = Vec::with_capacity(3 * config.count);
    for _ in 0..config.count {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let (g, f) = random_proper(&mut rng, config.bounds);
        cases.push(Case::Proper(g, f));
        let (g, f) = random_ecap(&mut rng, config.bounds);
        cases.push(Case::Augmentation(g, f));
        cases.push(Case::Planar(random_seymour(&mut rng, config.planar_bounds)));
    }
    cases
}

/// Witnesses kept per property.
const MAX_WITNESSES: usize = 3;

pub fn property_harness(config: HarnessConfig) -> HarnessReport {
    let mut props: BTreeMap<String, PropertyResult> = BTreeMap::new();
    let mut stats: BTreeMap<String, String> = BTreeMap::new();
    let mut quarter = 0usize;
    let mut max_ratio: Option<Rational> = None;
    for (index, case) in harness_cases(&config).into_iter().enumerate() {
        for (name, outcome) in evaluate(&case, config.fault) {
            let entry = props.entry(name.clone()).or_insert_with(|| PropertyResult {
                name: name.clone(),
                instances_run: 0,
                failures: 0,
                witnesses: Vec::new(),
            });
            match outcome {
                Outcome::Pass => entry.instances_run += 1,
                Outcome::Skip => {}
                Outcome::Fail(detail) => {
                    entry.instances_run += 1;
                    entry.failures += 1;
                    if entry.witnesses.len() < MAX_WITNESSES {
                        let (small, detail) =
                            if config.shrink { shrink(&case, config.fault, &name) } else { (case.clone(), detail) };
                        entry.witnesses.push(Witness {
                            instance_index: index,
                            detail,
                            original_size: case.size(),
                            instance: small.to_file(),
                            path: None,
                        });
                    }
                }
            }
        }
        match &case {
            Case::Augmentation(g, f) => {
                if let Ok(c) = solve_with(g, f, WgmvOptions::plain()) {
                    quarter += usize::from(!c.duals.is_half_integral());
                }
            }
            Case::Planar(inst) => {
                if let Ok(r) = gap_report(inst) {
                    if r.ratio > max_ratio {
                        max_ratio = r.ratio;
                    }
                }
            }
            Case::Proper(..) => {}
        }
    }
    stats.insert("plain-wgmv-non-half-integral".into(), quarter.to_string());
    stats.insert("max-planar-ratio".into(), max_ratio.map_or("none".into(), |r| r.to_string()));
    HarnessReport {
        format_version: FORMAT_VERSION,
        kind: "harness-report".into(),
        config,
        properties: props.into_values().collect(),
        stats,
    }
}

/// Searches random augmentation instances for one on which plain growth
/// leaves a dual value outside `½ℤ`.
pub fn find_non_half_integral(seed: u64, tries: usize, bounds: SizeBounds) -> Option<(Multigraph, RequirementOracle, DualSolution)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..tries {
        let (g, f) = random_ecap(&mut rng, bounds);
        if let Ok(c) = solve_with(&g, &f, WgmvOptions::plain()) {
            if !c.duals.is_half_integral() {
                return Some((g, f, c.duals));
            }
        }
    }
    None
}

/// Convenience for tests: the sets of a dual with a value outside `½ℤ`.
pub fn non_half_integral_sets(d: &DualSolution) -> Vec<(VertexSet, Rational)> {
    d.iter().filter(|(_, y)| !y.is_half_integral()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let report = property_harness(HarnessConfig::new(5, 10));
        assert!(report.passed(), "{:?}", report.failing());
        assert!(report.property("wgmv-half.half-integral").unwrap().instances_run > 0);
    }

    #[test]
    fn search_finds_quarter_values() {
        let (_, _, d) = find_non_half_integral(1, 500, SizeBounds::SMALL).unwrap();
        assert!(non_half_integral_sets(&d).iter().all(|(_, y)| y.denom() == 4));
    }
}
