//! Combinatorial planar embeddings of supply+demand graphs and the
//! reduction from multicut to 2-edge-connectivity augmentation in the
//! planar dual.
//!
//! Each edge `e = (u, v)` has two darts: `2e` leaves `u`, `2e + 1` leaves
//! `v`. The rotation at a vertex is the cyclic order of its incident edges;
//! `σ(d)` is the dart after `d` around its tail, and a face is an orbit of
//! `φ(d) = σ(reverse(d))`.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GraphError;
use crate::graph::{EdgeId, Multigraph, UnionFind, Vertex, VertexSet, MAX_VERTICES};
use crate::requirements::RequirementOracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeKind {
    Supply,
    Demand,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeymourEdge {
    pub u: Vertex,
    pub v: Vertex,
    pub kind: EdgeKind,
    /// Capacity of a supply edge; ignored for demands.
    pub capacity: i64,
}

/// Supply and demand edges over one vertex set, with a rotation system for
/// their union. Edge ids index `edges`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeymourInstance {
    pub vertex_count: usize,
    pub edges: Vec<SeymourEdge>,
    pub rotation: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("edge {0} has an endpoint out of range or is a loop")]
    BadEdge(EdgeId),
    #[error("edge {0} has negative capacity")]
    NegativeCapacity(EdgeId),
    #[error("rotation has {got} vertices, expected {expected}")]
    RotationLength { got: usize, expected: usize },
    #[error("rotation at vertex {vertex} does not list its incident edges exactly once")]
    RotationMismatch { vertex: Vertex },
    #[error("component {component} fails Euler's formula: {vertices} - {edges} + {faces} != 2")]
    Euler { component: VertexSet, vertices: usize, edges: usize, faces: usize },
    #[error("{0} faces exceed the vertex limit of the dual")]
    TooManyFaces(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A face as its cyclic sequence of darts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub darts: Vec<usize>,
}

impl Face {
    pub fn edges(&self) -> Vec<EdgeId> {
        self.darts.iter().map(|d| EdgeId(d / 2)).collect()
    }
}

impl SeymourInstance {
    pub fn new(
        vertex_count: usize,
        edges: Vec<SeymourEdge>,
        rotation: Vec<Vec<EdgeId>>,
    ) -> Result<Self, EmbeddingError> {
        let inst = SeymourInstance { vertex_count, edges, rotation };
        inst.validate_rotation()?;
        Ok(inst)
    }

    pub fn edge(&self, e: EdgeId) -> &SeymourEdge {
        &self.edges[e.0]
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn supply_edges(&self) -> Vec<EdgeId> {
        self.edge_ids().filter(|&e| self.edge(e).kind == EdgeKind::Supply).collect()
    }

    pub fn demand_edges(&self) -> Vec<EdgeId> {
        self.edge_ids().filter(|&e| self.edge(e).kind == EdgeKind::Demand).collect()
    }

    pub fn capacity(&self, cut: &[EdgeId]) -> i64 {
        cut.iter().map(|&e| self.edge(e).capacity).sum()
    }

    fn tail(&self, dart: usize) -> Vertex {
        let e = &self.edges[dart / 2];
        if dart.is_multiple_of(2) { e.u } else { e.v }
    }

    fn dart_at(&self, e: EdgeId, x: Vertex) -> usize {
        if self.edges[e.0].u == x { 2 * e.0 } else { 2 * e.0 + 1 }
    }

    fn validate_rotation(&self) -> Result<(), EmbeddingError> {
        if self.vertex_count > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(self.vertex_count).into());
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= self.vertex_count || e.v >= self.vertex_count || e.u == e.v {
                return Err(EmbeddingError::BadEdge(EdgeId(i)));
            }
            if e.capacity < 0 {
                return Err(EmbeddingError::NegativeCapacity(EdgeId(i)));
            }
        }
        if self.rotation.len() != self.vertex_count {
            return Err(EmbeddingError::RotationLength {
                got: self.rotation.len(),
                expected: self.vertex_count,
            });
        }
        for (x, order) in self.rotation.iter().enumerate() {
            let mut listed: Vec<usize> = order.iter().map(|e| e.0).collect();
            listed.sort_unstable();
            let incident: Vec<usize> = (0..self.edges.len())
                .filter(|&i| self.edges[i].u == x || self.edges[i].v == x)
                .collect();
            if listed != incident {
                return Err(EmbeddingError::RotationMismatch { vertex: x });
            }
        }
        Ok(())
    }

    /// `σ`: next dart around the tail.
    fn sigma(&self) -> Vec<usize> {
        let mut next = vec![0; 2 * self.edges.len()];
        for (x, order) in self.rotation.iter().enumerate() {
            for (i, &e) in order.iter().enumerate() {
                let succ = order[(i + 1) % order.len()];
                next[self.dart_at(e, x)] = self.dart_at(succ, x);
            }
        }
        next
    }

    /// Face traversal with Euler's formula checked on every connected
    /// component that has an edge.
    pub fn faces(&self) -> Result<Vec<Face>, EmbeddingError> {
        self.validate_rotation()?;
        let sigma = self.sigma();
        let darts = 2 * self.edges.len();
        let mut seen = vec![false; darts];
        let mut faces = Vec::new();
        for start in 0..darts {
            if seen[start] {
                continue;
            }
            let mut walk = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                walk.push(d);
                d = sigma[d ^ 1];
            }
            faces.push(Face { darts: walk });
        }
        let mut uf = UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        for component in uf.classes() {
            let edges = self
                .edges
                .iter()
                .filter(|e| component.contains(e.u))
                .count();
            if edges == 0 {
                continue;
            }
            let count = faces
                .iter()
                .filter(|f| component.contains(self.tail(f.darts[0])))
                .count();
            let vertices = component.len();
            if vertices + count != edges + 2 {
                return Err(EmbeddingError::Euler { component, vertices, edges, faces: count });
            }
        }
        Ok(faces)
    }

    /// Face index of every dart.
    fn face_index(faces: &[Face], darts: usize) -> Vec<usize> {
        let mut of = vec![0; darts];
        for (i, f) in faces.iter().enumerate() {
            for &d in &f.darts {
                of[d] = i;
            }
        }
        of
    }

    /// Edges with the same face on both sides.
    pub fn bridges(&self) -> Result<Vec<EdgeId>, EmbeddingError> {
        let faces = self.faces()?;
        let of = Self::face_index(&faces, 2 * self.edges.len());
        Ok(self.edge_ids().filter(|e| of[2 * e.0] == of[2 * e.0 + 1]).collect())
    }

    /// The planar dual as an instance in its own right: one vertex per
    /// face, the same edges (ids, kinds, capacities) joining the faces on
    /// their two sides, rotation given by face traversal. Bridges would
    /// become loops, so they are rejected.
    pub fn dual_instance(&self) -> Result<SeymourInstance, DualizeError> {
        let faces = self.faces()?;
        if faces.len() > MAX_VERTICES {
            return Err(EmbeddingError::TooManyFaces(faces.len()).into());
        }
        let of = Self::face_index(&faces, 2 * self.edges.len());
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (of[2 * i], of[2 * i + 1]);
            if a == b {
                return Err(DualizeError::Bridge(EdgeId(i)));
            }
            edges.push(SeymourEdge { u: a, v: b, ..*e });
        }
        let rotation = faces.iter().map(|f| f.edges()).collect();
        Ok(SeymourInstance::new(faces.len(), edges, rotation)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DualizeError {
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error("edge {0} is a bridge; its dual would be a loop")]
    Bridge(EdgeId),
}

/// Correspondence between primal edges and the 2ECAP instance built on the
/// faces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualCorrespondence {
    pub faces: Vec<Face>,
    /// Face on each side of every primal edge, as `(face of 2e, face of 2e+1)`.
    pub sides: Vec<(usize, usize)>,
    /// Primal supply edge of each dual edge, by dual edge id.
    pub supply_of_dual: Vec<EdgeId>,
    /// Dual edge of each primal supply edge that was kept.
    pub dual_of_supply: BTreeMap<EdgeId, EdgeId>,
    /// Primal demand edge of each augmentation pair, by position in `Y`.
    pub demand_of_y: Vec<EdgeId>,
    /// Supply bridges, left out of the dual.
    pub dropped_supply: Vec<EdgeId>,
    /// Demand bridges: their endpoints have no supply connection, so they
    /// need no cut and carry no flow.
    pub removed_demands: Vec<EdgeId>,
    pub notes: Vec<String>,
}

impl DualCorrespondence {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Primal edges (supply and demand) whose dual crosses the face set `s`.
    pub fn primal_boundary(&self, s: VertexSet) -> Vec<EdgeId> {
        self.sides
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| s.separates(a, b))
            .map(|(i, _)| EdgeId(i))
            .collect()
    }
}

/// Builds the 2ECAP instance on the faces: supply edges become links with
/// cost equal to capacity and demand edges become the augmentation set.
/// Components of a disconnected instance have disjoint face sets, so the
/// result is the disjoint union of the per-component duals.
pub fn dualize(
    inst: &SeymourInstance,
) -> Result<(Multigraph, RequirementOracle, DualCorrespondence), DualizeError> {
    let faces = inst.faces()?;
    if faces.len() > MAX_VERTICES {
        return Err(EmbeddingError::TooManyFaces(faces.len()).into());
    }
    let of = SeymourInstance::face_index(&faces, 2 * inst.edges.len());
    let sides: Vec<(usize, usize)> =
        (0..inst.edges.len()).map(|i| (of[2 * i], of[2 * i + 1])).collect();
    let mut g = Multigraph::new(faces.len()).map_err(EmbeddingError::from)?;
    let mut corr = DualCorrespondence {
        faces,
        sides: sides.clone(),
        supply_of_dual: Vec::new(),
        dual_of_supply: BTreeMap::new(),
        demand_of_y: Vec::new(),
        dropped_supply: Vec::new(),
        removed_demands: Vec::new(),
        notes: Vec::new(),
    };
    let mut y = Vec::new();
    for e in inst.edge_ids() {
        let edge = inst.edge(e);
        let (a, b) = sides[e.0];
        match (edge.kind, a == b) {
            (EdgeKind::Supply, true) => {
                corr.dropped_supply.push(e);
                corr.notes.push(format!("supply bridge {e} dropped from the dual"));
            }
            (EdgeKind::Demand, true) => {
                corr.removed_demands.push(e);
                corr.notes.push(format!("demand bridge {e} removed: endpoints already separated"));
            }
            (EdgeKind::Supply, false) => {
                let d = g.add_edge(a, b, edge.capacity).map_err(EmbeddingError::from)?;
                corr.supply_of_dual.push(e);
                corr.dual_of_supply.insert(e, d);
            }
            (EdgeKind::Demand, false) => {
                y.push((a, b));
                corr.demand_of_y.push(e);
            }
        }
    }
    let oracle = RequirementOracle::augmentation(g.vertex_count(), y)
        .expect("dual pairs are in range and loop-free");
    Ok((g, oracle, corr))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MulticutError {
    #[error("dual edge {0} is not a supply dual")]
    NotSupplyDual(EdgeId),
    #[error("demand {demand} survives the cut along vertices {path:?}")]
    SurvivingDemand { demand: EdgeId, path: Vec<Vertex> },
}

/// Supply path between the endpoints of `demand` avoiding `cut`, as a
/// vertex sequence.
pub fn surviving_path(inst: &SeymourInstance, cut: &[EdgeId], demand: EdgeId) -> Option<Vec<Vertex>> {
    let d = inst.edge(demand);
    let mut prev: Vec<Option<Vertex>> = vec![None; inst.vertex_count];
    let mut seen = vec![false; inst.vertex_count];
    seen[d.u] = true;
    let mut queue = VecDeque::from([d.u]);
    while let Some(x) = queue.pop_front() {
        if x == d.v {
            let mut path = vec![x];
            let mut cur = x;
            while let Some(p) = prev[cur] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for e in inst.supply_edges() {
            if cut.contains(&e) {
                continue;
            }
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
                prev[y] = Some(x);
                queue.push_back(y);
            }
        }
    }
    None
}

/// First demand still connected in the supply graph minus `cut`.
pub fn check_multicut(inst: &SeymourInstance, cut: &[EdgeId]) -> Result<(), MulticutError> {
    for demand in inst.demand_edges() {
        if let Some(path) = surviving_path(inst, cut, demand) {
            return Err(MulticutError::SurvivingDemand { demand, path });
        }
    }
    Ok(())
}

/// Maps a set of dual supply edges back to primal supply edges and checks
/// that every demand is separated.
pub fn multicut_from_cover(
    inst: &SeymourInstance,
    corr: &DualCorrespondence,
    cover: &[EdgeId],
) -> Result<Vec<EdgeId>, MulticutError> {
    let mut cut = Vec::with_capacity(cover.len());
    for &d in cover {
        let &e = corr.supply_of_dual.get(d.0).ok_or(MulticutError::NotSupplyDual(d))?;
        cut.push(e);
    }
    cut.sort();
    check_multicut(inst, &cut)?;
    Ok(cut)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: Vertex, v: Vertex, kind: EdgeKind, capacity: i64) -> SeymourEdge {
        SeymourEdge { u, v, kind, capacity }
    }

    fn ids(xs: &[usize]) -> Vec<EdgeId> {
        xs.iter().map(|&i| EdgeId(i)).collect()
    }

    fn triangle() -> SeymourInstance {
        let s = EdgeKind::Supply;
        SeymourInstance::new(
            3,
            vec![edge(0, 1, s, 1), edge(1, 2, s, 1), edge(2, 0, s, 1)],
            vec![ids(&[0, 2]), ids(&[1, 0]), ids(&[2, 1])],
        )
        .unwrap()
    }

    /// Square 0-1-2-3 of supply edges with the demand diagonal 0-2 drawn
    /// inside.
    pub(crate) fn square_with_diagonal() -> SeymourInstance {
        let s = EdgeKind::Supply;
        SeymourInstance::new(
            4,
            vec![
                edge(0, 1, s, 1),
                edge(1, 2, s, 2),
                edge(2, 3, s, 3),
                edge(3, 0, s, 4),
                edge(0, 2, EdgeKind::Demand, 0),
            ],
            // counterclockwise around each corner of the unit square
            vec![ids(&[0, 4, 3]), ids(&[1, 0]), ids(&[2, 4, 1]), ids(&[3, 2])],
        )
        .unwrap()
    }

    #[test]
    fn triangle_has_two_faces() {
        assert_eq!(triangle().faces().unwrap().len(), 2);
    }

    #[test]
    fn single_edge_has_one_face() {
        let inst = SeymourInstance::new(
            2,
            vec![edge(0, 1, EdgeKind::Supply, 1)],
            vec![ids(&[0]), ids(&[0])],
        )
        .unwrap();
        assert_eq!(inst.faces().unwrap().len(), 1);
        assert_eq!(inst.bridges().unwrap(), ids(&[0]));
    }

    #[test]
    fn k4_has_four_faces() {
        // outer triangle 0,1,2 with 3 in the middle
        let s = EdgeKind::Supply;
        let edges = vec![
            edge(0, 1, s, 1),
            edge(1, 2, s, 1),
            edge(2, 0, s, 1),
            edge(0, 3, s, 1),
            edge(1, 3, s, 1),
            edge(2, 3, s, 1),
        ];
        let rotation = vec![ids(&[0, 3, 2]), ids(&[1, 4, 0]), ids(&[2, 5, 1]), ids(&[3, 4, 5])];
        let inst = SeymourInstance::new(4, edges, rotation).unwrap();
        assert_eq!(inst.faces().unwrap().len(), 4);
    }

    #[test]
    fn twisted_rotation_fails_euler() {
        let s = EdgeKind::Supply;
        let edges = vec![
            edge(0, 1, s, 1),
            edge(1, 2, s, 1),
            edge(2, 0, s, 1),
            edge(0, 3, s, 1),
            edge(1, 3, s, 1),
            edge(2, 3, s, 1),
        ];
        let rotation = vec![ids(&[0, 2, 3]), ids(&[1, 4, 0]), ids(&[2, 5, 1]), ids(&[3, 4, 5])];
        let inst = SeymourInstance::new(4, edges, rotation).unwrap();
        assert!(matches!(inst.faces(), Err(EmbeddingError::Euler { .. })));
    }

    #[test]
    fn rotation_must_list_incident_edges() {
        let s = EdgeKind::Supply;
        let err = SeymourInstance::new(2, vec![edge(0, 1, s, 1)], vec![ids(&[0]), vec![]]);
        assert_eq!(err, Err(EmbeddingError::RotationMismatch { vertex: 1 }));
    }

    #[test]
    fn triangle_dual_is_three_parallel_edges() {
        let (g, f, corr) = dualize(&triangle()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 3);
        assert!(g.edges().iter().all(|e| (e.u, e.v) == (0, 1) || (e.u, e.v) == (1, 0)));
        assert!(matches!(f.flavor(), crate::requirements::Flavor::AugmentationFromForest(y) if y.is_empty()));
        assert!(corr.notes.is_empty());
    }

    #[test]
    fn square_with_diagonal_dual() {
        let inst = square_with_diagonal();
        let (g, f, corr) = dualize(&inst).unwrap();
        // V - E + F = 2 gives 3 faces
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(corr.demand_of_y, ids(&[4]));
        assert!(f.check_uncrossable(12).unwrap().is_none());
    }

    #[test]
    fn parallel_supply_and_demand() {
        let inst = SeymourInstance::new(
            2,
            vec![edge(0, 1, EdgeKind::Supply, 4), edge(0, 1, EdgeKind::Demand, 0)],
            vec![ids(&[0, 1]), ids(&[0, 1])],
        )
        .unwrap();
        let (g, _, corr) = dualize(&inst).unwrap();
        assert_eq!(g.vertex_count(), 2);
        let cut = multicut_from_cover(&inst, &corr, &[EdgeId(0)]).unwrap();
        assert_eq!(cut, ids(&[0]));
        assert!(matches!(
            multicut_from_cover(&inst, &corr, &[]),
            Err(MulticutError::SurvivingDemand { .. })
        ));
    }

    #[test]
    fn bridges_are_dropped_with_notes() {
        // triangle with a pendant supply edge 2-3 and a pendant demand 0-4
        let s = EdgeKind::Supply;
        let inst = SeymourInstance::new(
            5,
            vec![
                edge(0, 1, s, 1),
                edge(1, 2, s, 1),
                edge(2, 0, s, 1),
                edge(2, 3, s, 1),
                edge(0, 4, EdgeKind::Demand, 0),
            ],
            vec![ids(&[0, 4, 2]), ids(&[1, 0]), ids(&[2, 3, 1]), ids(&[3]), ids(&[4])],
        )
        .unwrap();
        let (g, _, corr) = dualize(&inst).unwrap();
        assert_eq!(corr.dropped_supply, ids(&[3]));
        assert_eq!(corr.removed_demands, ids(&[4]));
        assert_eq!(corr.notes.len(), 2);
        assert_eq!(g.edge_count(), 3);
        assert!(matches!(inst.dual_instance(), Err(DualizeError::Bridge(_))));
    }

    #[test]
    fn dual_of_dual_has_original_rotation() {
        let inst = square_with_diagonal();
        let dd = inst.dual_instance().unwrap().dual_instance().unwrap();
        assert_eq!(dd.vertex_count, inst.vertex_count);
        assert_eq!(dd.edges.len(), inst.edges.len());
    }
}
