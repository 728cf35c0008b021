//! Loop-free undirected multigraphs over at most 64 vertices, vertex sets as
//! bitsets, cuts, components, bridges and laminarity checks.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::GraphError;

/// Hard cap on the ground set size; vertex sets are single `u64` bitsets.
pub const MAX_VERTICES: usize = 64;

pub type Vertex = usize;

/// Identifies an edge of a [`Multigraph`]. Ids are dense: edge `i` is
/// `graph.edges()[i]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A subset of `{0, .., 63}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_VERTICES);
        if n == MAX_VERTICES {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(1u64 << v)
    }

    pub fn contains(self, v: Vertex) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn insert(&mut self, v: Vertex) {
        self.0 |= 1u64 << v;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    /// Complement within `{0, .., n-1}`.
    pub fn complement(self, n: usize) -> VertexSet {
        VertexSet::full(n).difference(self)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: VertexSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn is_disjoint(self, other: VertexSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest member, if any.
    pub fn min_vertex(self) -> Option<Vertex> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = Vertex> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// Exactly one endpoint inside.
    pub fn separates(self, u: Vertex, v: Vertex) -> bool {
        self.contains(u) != self.contains(v)
    }

    /// All subsets of `{0, .., n-1}` in increasing bit order.
    pub fn all_subsets(n: usize) -> impl Iterator<Item = VertexSet> {
        assert!(n < MAX_VERTICES, "subset enumeration over {n} vertices");
        (0..1u64 << n).map(VertexSet)
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut s = VertexSet::EMPTY;
        for v in iter {
            s.insert(v);
        }
        s
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

// Serialized as a sorted vertex list.
impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for VertexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let members = Vec::<usize>::deserialize(deserializer)?;
        if let Some(&v) = members.iter().find(|&&v| v >= MAX_VERTICES) {
            return Err(serde::de::Error::custom(format!("vertex {v} out of range")));
        }
        Ok(members.into_iter().collect())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub cost: i64,
}

impl Edge {
    pub fn other(&self, x: Vertex) -> Vertex {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected multigraph without self-loops. Parallel edges are distinct
/// objects with their own [`EdgeId`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multigraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl Multigraph {
    pub fn new(vertex_count: usize) -> Result<Self, GraphError> {
        if vertex_count > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(vertex_count));
        }
        Ok(Multigraph { vertex_count, edges: Vec::new() })
    }

    /// Builds a graph from `(u, v, cost)` triples; edge ids follow list order.
    pub fn from_edges(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (Vertex, Vertex, i64)>,
    ) -> Result<Self, GraphError> {
        let mut g = Multigraph::new(vertex_count)?;
        for (u, v, c) in edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, cost: i64) -> Result<EdgeId, GraphError> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return Err(GraphError::VertexOutOfRange { u, v, n: self.vertex_count });
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if cost < 0 {
            return Err(GraphError::NegativeCost { edge: self.edges.len(), cost });
        }
        self.edges.push(Edge { u, v, cost });
        Ok(EdgeId(self.edges.len() - 1))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.vertex_count)
    }

    pub fn total_cost(&self, edges: &[EdgeId]) -> i64 {
        edges.iter().map(|&e| self.edge(e).cost).sum()
    }

    pub fn crosses(&self, e: EdgeId, s: VertexSet) -> bool {
        let edge = self.edge(e);
        s.separates(edge.u, edge.v)
    }

    /// `δ(S)`: edges with exactly one endpoint in `s`, in id order.
    pub fn cut_edges(&self, s: VertexSet) -> Vec<EdgeId> {
        self.edge_ids().filter(|&e| self.crosses(e, s)).collect()
    }

    /// `δ_F(S)`: the members of `subset` crossing `s`.
    pub fn cut_edges_within(&self, s: VertexSet, subset: &[EdgeId]) -> Vec<EdgeId> {
        subset.iter().copied().filter(|&e| self.crosses(e, s)).collect()
    }

    /// Partition of the vertices into components of `(V, edge_subset)`,
    /// ordered by smallest member.
    pub fn connected_components(&self, edge_subset: &[EdgeId]) -> Vec<VertexSet> {
        let mut uf = UnionFind::new(self.vertex_count);
        for &e in edge_subset {
            let edge = self.edge(e);
            uf.union(edge.u, edge.v);
        }
        uf.classes()
    }

    /// Edges of `edge_subset` whose removal increases the number of
    /// components of `(V, edge_subset)`. Parallel copies are never bridges.
    pub fn bridges(&self, edge_subset: &[EdgeId]) -> Vec<EdgeId> {
        let pairs: Vec<(Vertex, Vertex)> =
            edge_subset.iter().map(|&e| (self.edge(e).u, self.edge(e).v)).collect();
        let mut out: Vec<EdgeId> =
            bridge_indices(self.vertex_count, &pairs).into_iter().map(|i| edge_subset[i]).collect();
        out.sort();
        out
    }
}

/// Bridges of the multigraph `(0..n, pairs)`, as indices into `pairs`.
pub(crate) fn bridge_indices(n: usize, pairs: &[(Vertex, Vertex)]) -> Vec<usize> {
    let mut adj: Vec<Vec<(Vertex, usize)>> = vec![Vec::new(); n];
    for (i, &(u, v)) in pairs.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    let mut out = Vec::new();
    // Iterative DFS; skipping the parent *edge index* (not the parent vertex)
    // keeps parallel edges from being reported.
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        let mut stack: Vec<(Vertex, usize, usize)> = vec![(root, usize::MAX, 0)];
        while let Some(&mut (x, parent_edge, ref mut next)) = stack.last_mut() {
            if *next < adj[x].len() {
                let (y, idx) = adj[x][*next];
                *next += 1;
                if idx == parent_edge {
                    continue;
                }
                if disc[y] == usize::MAX {
                    disc[y] = timer;
                    low[y] = timer;
                    timer += 1;
                    stack.push((y, idx, 0));
                } else {
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[x]);
                    if low[x] > disc[p] {
                        out.push(parent_edge);
                    }
                }
            }
        }
    }
    out
}

/// Checks pairwise nested-or-disjoint; on failure returns the first
/// offending pair in input order.
pub fn is_laminar(family: &[VertexSet]) -> Result<(), (VertexSet, VertexSet)> {
    for (i, &a) in family.iter().enumerate() {
        for &b in &family[i + 1..] {
            if !(a.is_subset(b) || b.is_subset(a) || a.is_disjoint(b)) {
                return Err((a, b));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Equivalence classes ordered by smallest member.
    pub fn classes(&mut self) -> Vec<VertexSet> {
        let n = self.parent.len();
        let mut by_root = vec![VertexSet::EMPTY; n];
        for v in 0..n {
            let r = self.find(v);
            by_root[r].insert(v);
        }
        let mut out: Vec<VertexSet> = by_root.into_iter().filter(|s| !s.is_empty()).collect();
        out.sort_by_key(|s| s.min_vertex());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Multigraph {
        Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap()
    }

    #[test]
    fn cut_of_singleton_in_triangle() {
        let g = triangle();
        assert_eq!(g.cut_edges(VertexSet::singleton(0)), vec![EdgeId(0), EdgeId(2)]);
    }

    #[test]
    fn empty_and_full_cuts_are_empty() {
        let g = triangle();
        assert!(g.cut_edges(VertexSet::EMPTY).is_empty());
        assert!(g.cut_edges(g.vertices()).is_empty());
    }

    #[test]
    fn parallel_edges_counted_separately() {
        let g = Multigraph::from_edges(2, [(0, 1, 1), (0, 1, 2)]).unwrap();
        assert_eq!(g.cut_edges(VertexSet::singleton(0)), vec![EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn components() {
        let g = Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let singles: Vec<_> = (0..3).map(VertexSet::singleton).collect();
        assert_eq!(g.connected_components(&[]), singles);
        assert_eq!(g.connected_components(&[EdgeId(0), EdgeId(1)]), vec![g.vertices()]);
        assert_eq!(
            g.connected_components(&[EdgeId(0)]),
            vec![[0, 1].into_iter().collect(), VertexSet::singleton(2)]
        );
    }

    #[test]
    fn laminar_examples() {
        let a = VertexSet::singleton(0);
        let b = VertexSet::singleton(1);
        let ab: VertexSet = [0, 1].into_iter().collect();
        let bc: VertexSet = [1, 2].into_iter().collect();
        assert!(is_laminar(&[a, b, ab]).is_ok());
        assert_eq!(is_laminar(&[ab, bc]), Err((ab, bc)));
        assert!(is_laminar(&[]).is_ok());
    }

    #[test]
    fn bridge_examples() {
        let path = Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let all: Vec<_> = path.edge_ids().collect();
        assert_eq!(path.bridges(&all), all);
        let tri = triangle();
        let all: Vec<_> = tri.edge_ids().collect();
        assert!(tri.bridges(&all).is_empty());
        let par = Multigraph::from_edges(2, [(0, 1, 1), (0, 1, 1)]).unwrap();
        let all: Vec<_> = par.edge_ids().collect();
        assert!(par.bridges(&all).is_empty());
    }

    #[test]
    fn rejects_self_loop_and_negative_cost() {
        let mut g = Multigraph::new(2).unwrap();
        assert!(matches!(g.add_edge(1, 1, 0), Err(GraphError::SelfLoop(1))));
        assert!(matches!(g.add_edge(0, 1, -1), Err(GraphError::NegativeCost { .. })));
        assert!(Multigraph::new(65).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Multigraph> {
        (2usize..9).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n, 0i64..5), 0..14).prop_map(move |raw| {
                Multigraph::from_edges(n, raw.into_iter().filter(|(u, v, _)| u != v)).unwrap()
            })
        })
    }

    /// Brute force: an edge is a bridge iff dropping it changes the count.
    fn bridges_by_removal(g: &Multigraph, subset: &[EdgeId]) -> Vec<EdgeId> {
        let base = g.connected_components(subset).len();
        subset
            .iter()
            .copied()
            .filter(|&e| {
                let rest: Vec<_> = subset.iter().copied().filter(|&x| x != e).collect();
                g.connected_components(&rest).len() > base
            })
            .collect()
    }

    proptest! {
        #[test]
        fn cut_is_symmetric(g in arb_graph(), bits in any::<u64>()) {
            let s = VertexSet::from_bits(bits).intersection(g.vertices());
            prop_assert_eq!(g.cut_edges(s), g.cut_edges(s.complement(g.vertex_count())));
        }

        #[test]
        fn two_part_partition_counts_crossing_edges_twice(g in arb_graph(), bits in any::<u64>()) {
            let s = VertexSet::from_bits(bits).intersection(g.vertices());
            let t = s.complement(g.vertex_count());
            let total = g.cut_edges(s).len() + g.cut_edges(t).len();
            let crossing = g.edges().iter().filter(|e| s.separates(e.u, e.v)).count();
            prop_assert_eq!(total, 2 * crossing);
        }

        #[test]
        fn bridges_match_removal(g in arb_graph()) {
            let all: Vec<_> = g.edge_ids().collect();
            prop_assert_eq!(g.bridges(&all), bridges_by_removal(&g, &all));
        }

        #[test]
        fn laminarity_is_order_insensitive(sets in prop::collection::vec(0u64..64, 0..6), seed in any::<u64>()) {
            let fam: Vec<VertexSet> = sets.into_iter().map(VertexSet::from_bits).collect();
            let mut shuffled = fam.clone();
            let len = shuffled.len();
            if len > 1 {
                shuffled.rotate_left((seed as usize) % len);
                shuffled.reverse();
            }
            prop_assert_eq!(is_laminar(&fam).is_ok(), is_laminar(&shuffled).is_ok());
        }
    }
}
