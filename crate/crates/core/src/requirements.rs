//! 0-1 requirement functions `f: 2^V -> {0,1}` and the routines that find
//! minimally violated sets with respect to a partial solution.
//!
//! Three flavors are supported. Steiner-forest style demand pairs give a
//! proper function; a set of augmentation edges `Y` gives the
//! 2-edge-connectivity augmentation function (`f(S) = 1` iff exactly one
//! `Y` edge crosses `S`), which is uncrossable; an explicit table is kept
//! for adversarial tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::RequirementError;
use crate::graph::{bridge_indices, EdgeId, Multigraph, UnionFind, Vertex, VertexSet, MAX_VERTICES};

/// Default ground-set cap for the definitional validators.
pub const DEFAULT_CHECK_CAP: usize = 12;
/// Default ground-set cap for brute-force violated-set enumeration.
pub const DEFAULT_ENUMERATION_CAP: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Flavor {
    ProperFromDemands(Vec<(Vertex, Vertex)>),
    AugmentationFromForest(Vec<(Vertex, Vertex)>),
    ExplicitTable(BTreeMap<VertexSet, bool>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RequirementOracle {
    ground: usize,
    flavor: Flavor,
}

impl RequirementOracle {
    /// `f(S) = 1` iff some demand pair has exactly one endpoint in `S`.
    pub fn proper_from_demands(
        ground: usize,
        demands: Vec<(Vertex, Vertex)>,
    ) -> Result<Self, RequirementError> {
        check_pairs(ground, &demands)?;
        Ok(RequirementOracle { ground, flavor: Flavor::ProperFromDemands(demands) })
    }

    /// `f(S) = 1` iff exactly one edge of `y` crosses `S`. `y` need not be a
    /// forest and may contain parallel pairs, but no loops.
    pub fn augmentation(ground: usize, y: Vec<(Vertex, Vertex)>) -> Result<Self, RequirementError> {
        check_pairs(ground, &y)?;
        Ok(RequirementOracle { ground, flavor: Flavor::AugmentationFromForest(y) })
    }

    /// Sets absent from `table` are not assumed to be 0; evaluating them is
    /// an error.
    pub fn explicit_table(
        ground: usize,
        table: BTreeMap<VertexSet, bool>,
    ) -> Result<Self, RequirementError> {
        check_ground(ground)?;
        let full = VertexSet::full(ground);
        for (&s, &value) in &table {
            if !s.is_subset(full) {
                return Err(RequirementError::OutOfGround(s.to_string()));
            }
            if value && (s.is_empty() || s == full) {
                return Err(RequirementError::NonzeroBoundary(s));
            }
        }
        Ok(RequirementOracle { ground, flavor: Flavor::ExplicitTable(table) })
    }

    /// Explicit table listing every subset, with value 1 exactly on `ones`.
    pub fn table_from_ones(ground: usize, ones: &[VertexSet]) -> Result<Self, RequirementError> {
        check_ground(ground)?;
        if ground >= 20 {
            return Err(RequirementError::CapExceeded { size: ground, cap: 19 });
        }
        let table = VertexSet::all_subsets(ground).map(|s| (s, ones.contains(&s))).collect();
        RequirementOracle::explicit_table(ground, table)
    }

    /// The zero function on `ground` vertices.
    pub fn zero(ground: usize) -> Result<Self, RequirementError> {
        RequirementOracle::proper_from_demands(ground, Vec::new())
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn ground_set(&self) -> VertexSet {
        VertexSet::full(self.ground)
    }

    pub fn flavor(&self) -> &Flavor {
        &self.flavor
    }

    pub fn flavor_name(&self) -> &'static str {
        match self.flavor {
            Flavor::ProperFromDemands(_) => "proper",
            Flavor::AugmentationFromForest(_) => "augmentation",
            Flavor::ExplicitTable(_) => "table",
        }
    }

    pub fn is_proper_flavor(&self) -> bool {
        matches!(self.flavor, Flavor::ProperFromDemands(_))
    }

    /// Flavors known to be uncrossable by construction.
    pub fn is_trusted_uncrossable(&self) -> bool {
        !matches!(self.flavor, Flavor::ExplicitTable(_))
    }

    pub fn eval(&self, s: VertexSet) -> Result<bool, RequirementError> {
        if !s.is_subset(self.ground_set()) {
            return Err(RequirementError::OutOfGround(s.to_string()));
        }
        Ok(match &self.flavor {
            Flavor::ProperFromDemands(d) => d.iter().any(|&(a, b)| s.separates(a, b)),
            Flavor::AugmentationFromForest(y) => {
                y.iter().filter(|&&(a, b)| s.separates(a, b)).count() == 1
            }
            Flavor::ExplicitTable(t) => {
                *t.get(&s).ok_or(RequirementError::IncompleteTable(s))?
            }
        })
    }

    /// Values on all `2^n` subsets, indexed by bitset.
    pub fn table(&self, cap: usize) -> Result<Vec<bool>, RequirementError> {
        if self.ground > cap || self.ground >= MAX_VERTICES {
            return Err(RequirementError::CapExceeded { size: self.ground, cap });
        }
        VertexSet::all_subsets(self.ground).map(|s| self.eval(s)).collect()
    }

    /// Exhaustive check of the proper-function axioms: `f(V) = 0`,
    /// symmetry, and `f(A ∪ B) <= max(f(A), f(B))` for disjoint `A`, `B`.
    pub fn check_proper(&self, cap: usize) -> Result<Option<ProperViolation>, RequirementError> {
        let f = self.table(cap)?;
        let n = self.ground;
        let full = (1u64 << n) - 1;
        if f[full as usize] {
            return Ok(Some(ProperViolation::NonzeroGround));
        }
        for s in 0..=full {
            if f[s as usize] != f[(full & !s) as usize] {
                return Ok(Some(ProperViolation::Asymmetric(VertexSet::from_bits(s))));
            }
        }
        for a in 1..=full {
            let rest = full & !a;
            // every nonempty b ⊆ rest
            let mut b = rest;
            while b != 0 {
                if f[(a | b) as usize] && !f[a as usize] && !f[b as usize] {
                    return Ok(Some(ProperViolation::UnionExceedsMax(
                        VertexSet::from_bits(a),
                        VertexSet::from_bits(b),
                    )));
                }
                b = (b - 1) & rest;
            }
        }
        Ok(None)
    }

    /// Exhaustive check of uncrossability over all pairs with
    /// `f(A) = f(B) = 1`.
    pub fn check_uncrossable(
        &self,
        cap: usize,
    ) -> Result<Option<UncrossableViolation>, RequirementError> {
        let f = self.table(cap)?;
        let n = self.ground;
        let full = (1u64 << n) - 1;
        if f[0] {
            return Ok(Some(UncrossableViolation::NonzeroBoundary(VertexSet::EMPTY)));
        }
        if f[full as usize] {
            return Ok(Some(UncrossableViolation::NonzeroBoundary(VertexSet::from_bits(full))));
        }
        let ones: Vec<u64> = (0..=full).filter(|&s| f[s as usize]).collect();
        for (i, &a) in ones.iter().enumerate() {
            for &b in &ones[i..] {
                let meet_join = f[(a & b) as usize] && f[(a | b) as usize];
                let diffs = f[(a & !b) as usize] && f[(b & !a) as usize];
                if !meet_join && !diffs {
                    return Ok(Some(UncrossableViolation::Pair(
                        VertexSet::from_bits(a),
                        VertexSet::from_bits(b),
                    )));
                }
            }
        }
        Ok(None)
    }
}

fn check_ground(ground: usize) -> Result<(), RequirementError> {
    if ground > MAX_VERTICES {
        return Err(RequirementError::CapExceeded { size: ground, cap: MAX_VERTICES });
    }
    Ok(())
}

fn check_pairs(ground: usize, pairs: &[(Vertex, Vertex)]) -> Result<(), RequirementError> {
    check_ground(ground)?;
    for &(a, b) in pairs {
        if a >= ground || b >= ground {
            return Err(RequirementError::OutOfGround(format!("({a}, {b})")));
        }
        if a == b {
            return Err(RequirementError::SelfLoop(a));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProperViolation {
    NonzeroGround,
    Asymmetric(VertexSet),
    UnionExceedsMax(VertexSet, VertexSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UncrossableViolation {
    NonzeroBoundary(VertexSet),
    Pair(VertexSet, VertexSet),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolatedSetMethod {
    BruteForce,
    ProperComponents,
    EcapStructural,
}

impl ViolatedSetMethod {
    /// The structural routine matching the oracle's flavor, or brute force
    /// for explicit tables.
    pub fn for_oracle(oracle: &RequirementOracle) -> Self {
        match oracle.flavor() {
            Flavor::ProperFromDemands(_) => ViolatedSetMethod::ProperComponents,
            Flavor::AugmentationFromForest(_) => ViolatedSetMethod::EcapStructural,
            Flavor::ExplicitTable(_) => ViolatedSetMethod::BruteForce,
        }
    }
}

/// The collection of minimally violated sets: each has `f(S) = 1`, no
/// selected edge crossing it, and no violated proper subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolatedSetReport {
    /// Pairwise disjoint, ordered by smallest member.
    pub sets: Vec<VertexSet>,
    pub method: ViolatedSetMethod,
}

impl ViolatedSetReport {
    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

fn check_ground_matches(oracle: &RequirementOracle, g: &Multigraph) -> Result<(), RequirementError> {
    if oracle.ground_size() != g.vertex_count() {
        return Err(RequirementError::OutOfGround(format!(
            "graph with {} vertices (ground set has {})",
            g.vertex_count(),
            oracle.ground_size()
        )));
    }
    Ok(())
}

fn ensure_disjoint(sets: &[VertexSet]) -> Result<(), RequirementError> {
    for (i, &a) in sets.iter().enumerate() {
        for &b in &sets[i + 1..] {
            if !a.is_disjoint(b) {
                return Err(RequirementError::NotUncrossable(a, b));
            }
        }
    }
    Ok(())
}

/// Enumerates all subsets and keeps violated sets with no violated proper
/// subset. Fails if two of them overlap, which cannot happen for an
/// uncrossable requirement.
pub fn minimal_violated_bruteforce(
    oracle: &RequirementOracle,
    g: &Multigraph,
    selected: &[EdgeId],
    cap: usize,
) -> Result<ViolatedSetReport, RequirementError> {
    check_ground_matches(oracle, g)?;
    let f = oracle.table(cap)?;
    let n = oracle.ground_size();
    let size = 1usize << n;
    let ends: Vec<(u64, u64)> = selected
        .iter()
        .map(|&e| (1u64 << g.edge(e).u, 1u64 << g.edge(e).v))
        .collect();
    let violated: Vec<bool> = (0..size as u64)
        .map(|s| f[s as usize] && ends.iter().all(|&(a, b)| (s & a == 0) == (s & b == 0)))
        .collect();
    // below[s]: some proper subset of s is violated
    let mut below = vec![false; size];
    for s in 1..size {
        let mut bits = s;
        while bits != 0 {
            let v = bits & bits.wrapping_neg();
            bits &= bits - 1;
            let t = s & !v;
            if violated[t] || below[t] {
                below[s] = true;
                break;
            }
        }
    }
    let sets: Vec<VertexSet> = (0..size)
        .filter(|&s| violated[s] && !below[s])
        .map(|s| VertexSet::from_bits(s as u64))
        .collect();
    ensure_disjoint(&sets)?;
    let mut sets = sets;
    sets.sort_by_key(|s| s.min_vertex());
    Ok(ViolatedSetReport { sets, method: ViolatedSetMethod::BruteForce })
}

/// For proper requirements the minimally violated sets are exactly the
/// components of `(V, selected)` with requirement 1.
pub fn minimal_violated_proper(
    oracle: &RequirementOracle,
    g: &Multigraph,
    selected: &[EdgeId],
) -> Result<ViolatedSetReport, RequirementError> {
    check_ground_matches(oracle, g)?;
    if !oracle.is_proper_flavor() {
        return Err(RequirementError::WrongFlavor {
            method: "component-based violated-set search",
            expected: "proper (demand-pair)",
        });
    }
    let mut sets = Vec::new();
    for c in g.connected_components(selected) {
        if oracle.eval(c)? {
            sets.push(c);
        }
    }
    Ok(ViolatedSetReport { sets, method: ViolatedSetMethod::ProperComponents })
}

/// Minimally violated sets of the augmentation requirement.
///
/// Contract the components of `(V, selected)`. In the contracted multigraph
/// of `Y` edges, a violated set is a union of contracted nodes crossed by
/// exactly one `Y` edge, which is then a bridge; the inclusion-minimal ones
/// are the 2-edge-connected blocks incident to exactly one bridge.
pub fn minimal_violated_2ecap(
    oracle: &RequirementOracle,
    g: &Multigraph,
    selected: &[EdgeId],
) -> Result<ViolatedSetReport, RequirementError> {
    check_ground_matches(oracle, g)?;
    let Flavor::AugmentationFromForest(y) = oracle.flavor() else {
        return Err(RequirementError::WrongFlavor {
            method: "bridge-block violated-set search",
            expected: "augmentation",
        });
    };
    let n = g.vertex_count();
    let components = g.connected_components(selected);
    let mut node_of = vec![0usize; n];
    for (i, c) in components.iter().enumerate() {
        for v in c.iter() {
            node_of[v] = i;
        }
    }
    let contracted: Vec<(usize, usize)> = y
        .iter()
        .map(|&(a, b)| (node_of[a], node_of[b]))
        .filter(|(a, b)| a != b)
        .collect();
    let k = components.len();
    let bridges = bridge_indices(k, &contracted);
    let mut is_bridge = vec![false; contracted.len()];
    for &i in &bridges {
        is_bridge[i] = true;
    }
    let mut blocks = UnionFind::new(k);
    for (i, &(a, b)) in contracted.iter().enumerate() {
        if !is_bridge[i] {
            blocks.union(a, b);
        }
    }
    let mut bridge_degree = vec![0usize; k];
    for &i in &bridges {
        let (a, b) = contracted[i];
        bridge_degree[blocks.find(a)] += 1;
        bridge_degree[blocks.find(b)] += 1;
    }
    let mut expansion = vec![VertexSet::EMPTY; k];
    for (i, c) in components.iter().enumerate() {
        let r = blocks.find(i);
        expansion[r] = expansion[r].union(*c);
    }
    let mut sets: Vec<VertexSet> =
        (0..k).filter(|&r| bridge_degree[r] == 1).map(|r| expansion[r]).collect();
    sets.sort_by_key(|s| s.min_vertex());
    Ok(ViolatedSetReport { sets, method: ViolatedSetMethod::EcapStructural })
}

/// Dispatches to the chosen routine.
pub fn minimal_violated(
    oracle: &RequirementOracle,
    g: &Multigraph,
    selected: &[EdgeId],
    method: ViolatedSetMethod,
) -> Result<ViolatedSetReport, RequirementError> {
    match method {
        ViolatedSetMethod::BruteForce => {
            minimal_violated_bruteforce(oracle, g, selected, DEFAULT_ENUMERATION_CAP)
        }
        ViolatedSetMethod::ProperComponents => minimal_violated_proper(oracle, g, selected),
        ViolatedSetMethod::EcapStructural => minimal_violated_2ecap(oracle, g, selected),
    }
}
