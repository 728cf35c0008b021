//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{EdgeId, Multigraph, UnionFind, Vertex};
use crate::planar::{EdgeKind, SeymourEdge, SeymourInstance};
use crate::requirements::{minimal_violated_2ecap, RequirementOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_cost: i64,
}

impl SizeBounds {
    /// Fits the brute-force optimum: at most 10 vertices and 20 edges.
    pub const SMALL: SizeBounds = SizeBounds { max_vertices: 10, max_edges: 20, max_cost: 10 };
    /// Planar instances with at most 12 vertices.
    pub const PLANAR: SizeBounds = SizeBounds { max_vertices: 12, max_edges: 30, max_cost: 10 };
}

fn spanning_tree<R: Rng>(rng: &mut R, n: usize) -> Vec<(Vertex, Vertex)> {
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(rng);
    (1..n).map(|i| (order[rng.gen_range(0..i)], order[i])).collect()
}

fn random_pair<R: Rng>(rng: &mut R, n: usize) -> (Vertex, Vertex) {
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    (u, v)
}

/// Connected multigraph with random demand pairs.
pub fn random_proper<R: Rng>(rng: &mut R, bounds: SizeBounds) -> (Multigraph, RequirementOracle) {
    let n = rng.gen_range(2..=bounds.max_vertices.max(2));
    let mut pairs = spanning_tree(rng, n);
    let extra = rng.gen_range(0..=bounds.max_edges.saturating_sub(pairs.len()).min(2 * n));
    for _ in 0..extra {
        pairs.push(random_pair(rng, n));
    }
    pairs.shuffle(rng);
    let g = Multigraph::from_edges(n, pairs.into_iter().map(|(u, v)| (u, v, rng.gen_range(0..=bounds.max_cost))))
        .expect("generated edges are valid");
    let k = rng.gen_range(1..=3);
    let demands = (0..k).map(|_| random_pair(rng, n)).collect();
    let f = RequirementOracle::proper_from_demands(n, demands).expect("valid demands");
    (g, f)
}

/// Random forest `Y` plus random links, topped up until every `Y` edge
/// lies on a cycle of links and `Y`.
pub fn random_ecap<R: Rng>(rng: &mut R, bounds: SizeBounds) -> (Multigraph, RequirementOracle) {
    loop {
        let n = rng.gen_range(2..=bounds.max_vertices.max(2));
        let y: Vec<(Vertex, Vertex)> = spanning_tree(rng, n)
            .into_iter()
            .filter(|_| rng.gen_bool(0.85))
            .collect();
        let f = RequirementOracle::augmentation(n, y).expect("valid forest");
        let mut g = Multigraph::new(n).expect("small graph");
        let initial = rng.gen_range(0..=n);
        for _ in 0..initial {
            let (u, v) = random_pair(rng, n);
            g.add_edge(u, v, rng.gen_range(0..=bounds.max_cost)).expect("valid edge");
        }
        loop {
            let all: Vec<EdgeId> = g.edge_ids().collect();
            let report = minimal_violated_2ecap(&f, &g, &all).expect("matching ground set");
            let Some(&s) = report.sets.choose(rng) else { break };
            let inside: Vec<Vertex> = s.iter().collect();
            let outside: Vec<Vertex> = (0..n).filter(|&v| !s.contains(v)).collect();
            let u = *inside.choose(rng).expect("violated sets are nonempty");
            let v = *outside.choose(rng).expect("violated sets are proper");
            g.add_edge(u, v, rng.gen_range(0..=bounds.max_cost)).expect("valid edge");
        }
        if g.edge_count() <= bounds.max_edges {
            return (g, f);
        }
    }
}

/// Planar instance: a stacked triangulation of the sphere on at most
/// `max_vertices` vertices, thinned by deleting random edges while it stays
/// connected, with each surviving edge tagged supply or demand.
pub fn random_seymour<R: Rng>(rng: &mut R, bounds: SizeBounds) -> SeymourInstance {
    let n = rng.gen_range(3..=bounds.max_vertices.max(3));
    // oriented triangles; the first two are the two sides of the start triangle
    let mut faces: Vec<[Vertex; 3]> = vec![[0, 1, 2], [0, 2, 1]];
    for x in 3..n {
        let i = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(i);
        faces.extend([[a, b, x], [b, c, x], [c, a, x]]);
    }
    // around vertex a, the corner (a, b, c) sends neighbor b to neighbor c
    let mut next = vec![std::collections::BTreeMap::new(); n];
    for &[a, b, c] in &faces {
        next[a].insert(b, c);
        next[b].insert(c, a);
        next[c].insert(a, b);
    }
    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    for (a, succ) in next.iter().enumerate() {
        for &b in succ.keys() {
            if a < b {
                pairs.push((a, b));
            }
        }
    }
    pairs.shuffle(rng);
    let delete_p = rng.gen_range(0.1..0.6);
    let mut keep = vec![true; pairs.len()];
    for i in 0..pairs.len() {
        if !rng.gen_bool(delete_p) {
            continue;
        }
        keep[i] = false;
        let mut uf = UnionFind::new(n);
        let mut joined = 0;
        for (j, &(u, v)) in pairs.iter().enumerate() {
            if keep[j] && uf.union(u, v) {
                joined += 1;
            }
        }
        if joined + 1 < n {
            keep[i] = true;
        }
    }
    let kept: Vec<(Vertex, Vertex)> =
        pairs.iter().zip(&keep).filter(|(_, &k)| k).map(|(&p, _)| p).collect();
    let demand_p = rng.gen_range(0.15..0.45);
    let edges: Vec<SeymourEdge> = kept
        .iter()
        .map(|&(u, v)| {
            if rng.gen_bool(demand_p) {
                SeymourEdge { u, v, kind: EdgeKind::Demand, capacity: 0 }
            } else {
                SeymourEdge { u, v, kind: EdgeKind::Supply, capacity: rng.gen_range(1..=bounds.max_cost) }
            }
        })
        .collect();
    let id_of = |a: Vertex, b: Vertex| {
        let key = (a.min(b), a.max(b));
        kept.iter().position(|&p| p == key).map(EdgeId)
    };
    let rotation = (0..n)
        .map(|a| {
            let start = *next[a].keys().next().expect("triangulation vertices have neighbors");
            let mut order = Vec::new();
            let mut b = start;
            loop {
                if let Some(e) = id_of(a, b) {
                    order.push(e);
                }
                b = next[a][&b];
                if b == start {
                    break;
                }
            }
            order
        })
        .collect();
    SeymourInstance::new(n, edges, rotation).expect("restriction of a planar embedding")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (g, f) = random_ecap(&mut rng, SizeBounds::SMALL);
            assert!(g.edge_count() <= 20);
            let all: Vec<EdgeId> = g.edge_ids().collect();
            assert!(minimal_violated_2ecap(&f, &g, &all).unwrap().is_empty());
            let (g, _) = random_proper(&mut rng, SizeBounds::SMALL);
            assert_eq!(g.connected_components(&g.edge_ids().collect::<Vec<_>>()).len(), 1);
            let inst = random_seymour(&mut rng, SizeBounds::PLANAR);
            assert!(inst.vertex_count <= 12);
            inst.faces().unwrap();
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_seymour(&mut ChaCha8Rng::seed_from_u64(3), SizeBounds::PLANAR);
        let b = random_seymour(&mut ChaCha8Rng::seed_from_u64(3), SizeBounds::PLANAR);
        assert_eq!(a, b);
    }
}
