use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::RequirementError;
use crate::graph::{is_laminar, EdgeId, Multigraph, VertexSet};
use crate::rational::Rational;
use crate::requirements::RequirementOracle;

/// Dual assignment `y_S` over vertex sets. Only strictly positive values
/// are stored. The reduction ledger records, per `(edge, set)`, how many
/// half-unit cost reductions were applied to the edge on behalf of the set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DualSolution {
    values: BTreeMap<VertexSet, Rational>,
    reductions: BTreeMap<(EdgeId, VertexSet), u32>,
}

/// One entry of a serialized dual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualEntry {
    pub set: VertexSet,
    pub value: Rational,
}

impl DualSolution {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `amount` to `y_set`. Zero amounts leave no entry.
    pub fn raise(&mut self, set: VertexSet, amount: Rational) {
        assert!(!amount.is_negative(), "dual raise by negative amount {amount}");
        if amount.is_zero() {
            return;
        }
        *self.values.entry(set).or_insert(Rational::ZERO) += amount;
    }

    pub fn record_reduction(&mut self, edge: EdgeId, set: VertexSet) {
        *self.reductions.entry((edge, set)).or_insert(0) += 1;
    }

    pub fn value(&self, set: VertexSet) -> Rational {
        self.values.get(&set).copied().unwrap_or(Rational::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexSet, Rational)> + '_ {
        self.values.iter().map(|(&s, &y)| (s, y))
    }

    pub fn support(&self) -> Vec<VertexSet> {
        self.values.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn reductions(&self) -> impl Iterator<Item = (EdgeId, VertexSet, u32)> + '_ {
        self.reductions.iter().map(|(&(e, s), &k)| (e, s, k))
    }

    /// Total half-unit reductions applied to `edge`.
    pub fn reduction_count(&self, edge: EdgeId) -> u32 {
        self.reductions.range((edge, VertexSet::EMPTY)..).take_while(|((e, _), _)| *e == edge).map(|(_, k)| k).sum()
    }

    /// `∑_S y_S`.
    pub fn total(&self) -> Rational {
        self.values.values().sum()
    }

    /// `∑_S f(S) y_S`.
    pub fn objective(&self, oracle: &RequirementOracle) -> Result<Rational, RequirementError> {
        let mut total = Rational::ZERO;
        for (&s, &y) in &self.values {
            if oracle.eval(s)? {
                total += y;
            }
        }
        Ok(total)
    }

    /// `∑_{S: e ∈ δ(S)} y_S`.
    pub fn edge_load(&self, g: &Multigraph, e: EdgeId) -> Rational {
        self.values.iter().filter(|(&s, _)| g.crosses(e, s)).map(|(_, &y)| y).sum()
    }

    pub fn is_half_integral(&self) -> bool {
        self.values.values().all(Rational::is_half_integral)
    }

    pub fn is_laminar(&self) -> Result<(), (VertexSet, VertexSet)> {
        is_laminar(&self.support())
    }

    /// Edges whose load exceeds their cost, with the load.
    pub fn overloaded_edges(&self, g: &Multigraph) -> Vec<(EdgeId, Rational)> {
        g.edge_ids()
            .map(|e| (e, self.edge_load(g, e)))
            .filter(|&(e, load)| load > Rational::from_integer(g.edge(e).cost))
            .collect()
    }

    pub fn entries(&self) -> Vec<DualEntry> {
        self.iter().map(|(set, value)| DualEntry { set, value }).collect()
    }

    /// Rebuilds a dual from serialized entries. Negative values and repeated
    /// sets are rejected.
    pub fn from_entries(entries: &[DualEntry]) -> Result<Self, String> {
        let mut d = DualSolution::new();
        for e in entries {
            if e.value.is_negative() {
                return Err(format!("negative dual value {} on {}", e.value, e.set));
            }
            if d.values.contains_key(&e.set) {
                return Err(format!("dual set {} listed twice", e.set));
            }
            d.raise(e.set, e.value);
        }
        Ok(d)
    }
}
