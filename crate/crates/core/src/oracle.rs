//! Exhaustive ground truth for small instances.

use crate::error::RequirementError;
use crate::graph::{EdgeId, Multigraph, VertexSet};
use std::collections::BTreeMap;

use crate::planar::SeymourInstance;
use crate::requirements::{RequirementOracle, DEFAULT_ENUMERATION_CAP};

/// Largest edge count accepted by [`min_cut_cover_bruteforce`].
pub const OPT_EDGE_CAP: usize = 22;

/// First set (in bitset order) with `f(S) = 1` that no edge of `selected`
/// crosses.
pub fn feasibility_bruteforce(
    g: &Multigraph,
    oracle: &RequirementOracle,
    selected: &[EdgeId],
) -> Result<Option<VertexSet>, RequirementError> {
    let n = oracle.ground_size();
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(RequirementError::CapExceeded { size: n, cap: DEFAULT_ENUMERATION_CAP });
    }
    for s in VertexSet::all_subsets(n) {
        if oracle.eval(s)? && !selected.iter().any(|&e| g.crosses(e, s)) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Optimal cover and its cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimalCover {
    pub cost: i64,
    pub edges: Vec<EdgeId>,
}

/// Minimum-cost edge set crossing every set with `f(S) = 1`, or `None` if
/// no edge set does. Solved as a hitting-set problem over the cuts of the
/// required sets by branch and bound, which is exact over all `2^|E|`
/// subsets.
pub fn min_cut_cover_bruteforce(
    g: &Multigraph,
    oracle: &RequirementOracle,
) -> Result<Option<OptimalCover>, RequirementError> {
    let n = oracle.ground_size();
    if n > DEFAULT_ENUMERATION_CAP {
        return Err(RequirementError::CapExceeded { size: n, cap: DEFAULT_ENUMERATION_CAP });
    }
    let m = g.edge_count();
    if m > OPT_EDGE_CAP {
        return Err(RequirementError::CapExceeded { size: m, cap: OPT_EDGE_CAP });
    }
    let mut cuts: Vec<u32> = Vec::new();
    for s in VertexSet::all_subsets(n) {
        if !oracle.eval(s)? {
            continue;
        }
        let mask = g.cut_edges(s).iter().fold(0u32, |acc, e| acc | 1 << e.0);
        if mask == 0 {
            return Ok(None);
        }
        cuts.push(mask);
    }
    cuts.sort_unstable();
    cuts.dedup();
    // a cut containing another cut is implied by it
    let minimal: Vec<u32> = cuts
        .iter()
        .copied()
        .filter(|&c| !cuts.iter().any(|&d| d != c && d & c == d))
        .collect();
    let costs: Vec<i64> = g.edges().iter().map(|e| e.cost).collect();
    let mut best = (i64::MAX, 0u32);
    search(&minimal, &costs, 0, 0, 0, &mut best);
    let edges = (0..m).filter(|&i| best.1 >> i & 1 == 1).map(EdgeId).collect();
    Ok(Some(OptimalCover { cost: best.0, edges }))
}

fn search(cuts: &[u32], costs: &[i64], chosen: u32, banned: u32, cost: i64, best: &mut (i64, u32)) {
    if cost >= best.0 {
        return;
    }
    let open = cuts
        .iter()
        .filter(|&&c| c & chosen == 0)
        .map(|&c| c & !banned)
        .min_by_key(|c| c.count_ones());
    let Some(options) = open else {
        *best = (cost, chosen);
        return;
    };
    let mut banned = banned;
    let mut bits = options;
    while bits != 0 {
        let i = bits.trailing_zeros();
        bits &= bits - 1;
        search(cuts, costs, chosen | 1 << i, banned, cost + costs[i as usize], best);
        banned |= 1 << i;
    }
}

type EdgeLabel = (crate::planar::EdgeKind, i64);

/// Whether vertex `v` may map to `w` given the partial map.
type Fits<'a> = dyn Fn(usize, usize, &[Option<usize>]) -> bool + 'a;

fn label_table(inst: &SeymourInstance) -> BTreeMap<(usize, usize), Vec<EdgeLabel>> {
    let mut t: BTreeMap<(usize, usize), Vec<EdgeLabel>> = BTreeMap::new();
    for e in &inst.edges {
        let cap = if e.kind == crate::planar::EdgeKind::Supply { e.capacity } else { 0 };
        t.entry((e.u.min(e.v), e.u.max(e.v))).or_default().push((e.kind, cap));
    }
    t.values_mut().for_each(|v| v.sort());
    t
}

/// True when some vertex bijection maps the labelled edge multiset of `a`
/// onto that of `b`. Edge ids and rotations are ignored; demand capacities
/// are ignored. Backtracking with per-vertex signature pruning.
pub fn multigraph_isomorphic(a: &SeymourInstance, b: &SeymourInstance) -> bool {
    if a.vertex_count != b.vertex_count || a.edges.len() != b.edges.len() {
        return false;
    }
    let n = a.vertex_count;
    let (ta, tb) = (label_table(a), label_table(b));
    let signature = |t: &BTreeMap<(usize, usize), Vec<EdgeLabel>>, v: usize| {
        let mut s: Vec<EdgeLabel> =
            t.iter().filter(|((x, y), _)| *x == v || *y == v).flat_map(|(_, l)| l.iter().copied()).collect();
        s.sort();
        s
    };
    let sa: Vec<_> = (0..n).map(|v| signature(&ta, v)).collect();
    let sb: Vec<_> = (0..n).map(|v| signature(&tb, v)).collect();
    let mut ms_a = sa.clone();
    let mut ms_b = sb.clone();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(sa[v].len()));
    let empty = Vec::new();
    let between = |t: &BTreeMap<(usize, usize), Vec<EdgeLabel>>, x: usize, y: usize| -> Vec<EdgeLabel> {
        t.get(&(x.min(y), x.max(y))).cloned().unwrap_or_else(|| empty.clone())
    };
    fn extend(
        k: usize,
        order: &[usize],
        map: &mut [Option<usize>],
        used: &mut [bool],
        fits: &Fits,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let v = order[k];
        for w in 0..used.len() {
            if used[w] || !fits(v, w, map) {
                continue;
            }
            map[v] = Some(w);
            used[w] = true;
            if extend(k + 1, order, map, used, fits) {
                return true;
            }
            map[v] = None;
            used[w] = false;
        }
        false
    }
    let fits = |v: usize, w: usize, map: &[Option<usize>]| {
        sa[v] == sb[w]
            && between(&ta, v, v) == between(&tb, w, w)
            && (0..n).all(|x| map[x].is_none_or(|y| between(&ta, v, x) == between(&tb, w, y)))
    };
    extend(0, &order, &mut vec![None; n], &mut vec![false; n], &fits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn subsets_optimum(g: &Multigraph, f: &RequirementOracle) -> Option<i64> {
        let m = g.edge_count();
        (0u32..1 << m)
            .filter_map(|mask| {
                let sel: Vec<EdgeId> = (0..m).filter(|&i| mask >> i & 1 == 1).map(EdgeId).collect();
                feasibility_bruteforce(g, f, &sel).unwrap().is_none().then(|| g.total_cost(&sel))
            })
            .min()
    }

    #[test]
    fn single_supply_edge() {
        let g = Multigraph::from_edges(2, [(0, 1, 4)]).unwrap();
        let f = RequirementOracle::augmentation(2, vec![(0, 1)]).unwrap();
        let opt = min_cut_cover_bruteforce(&g, &f).unwrap().unwrap();
        assert_eq!(opt.cost, 4);
        assert_eq!(opt.edges, vec![EdgeId(0)]);
    }

    #[test]
    fn zero_requirement() {
        let g = Multigraph::from_edges(3, [(0, 1, 4), (1, 2, 3)]).unwrap();
        let f = RequirementOracle::zero(3).unwrap();
        let opt = min_cut_cover_bruteforce(&g, &f).unwrap().unwrap();
        assert_eq!(opt, OptimalCover { cost: 0, edges: vec![] });
    }

    #[test]
    fn infeasible_and_violated() {
        let g = Multigraph::from_edges(3, [(0, 1, 4)]).unwrap();
        let f = RequirementOracle::proper_from_demands(3, vec![(0, 2)]).unwrap();
        assert_eq!(min_cut_cover_bruteforce(&g, &f).unwrap(), None);
        assert!(feasibility_bruteforce(&g, &f, &[]).unwrap().is_some());
    }

    #[test]
    fn matches_plain_enumeration() {
        let g = Multigraph::from_edges(
            5,
            [(0, 1, 3), (1, 2, 1), (2, 3, 4), (3, 4, 1), (0, 4, 2), (1, 3, 5), (0, 2, 2), (2, 4, 6)],
        )
        .unwrap();
        for f in [
            RequirementOracle::proper_from_demands(5, vec![(0, 3), (1, 4)]).unwrap(),
            RequirementOracle::augmentation(5, vec![(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap(),
        ] {
            let opt = min_cut_cover_bruteforce(&g, &f).unwrap().unwrap();
            assert_eq!(Some(opt.cost), subsets_optimum(&g, &f));
            assert!(feasibility_bruteforce(&g, &f, &opt.edges).unwrap().is_none());
        }
    }

    #[test]
    fn isomorphism_ignores_labels_but_not_structure() {
        use crate::planar::{EdgeKind, SeymourEdge};
        let edge = |u, v, kind, capacity| SeymourEdge { u, v, kind, capacity };
        let path = |edges: Vec<SeymourEdge>| SeymourInstance { vertex_count: 3, edges, rotation: vec![] };
        let a = path(vec![edge(0, 1, EdgeKind::Supply, 2), edge(1, 2, EdgeKind::Demand, 0)]);
        let b = path(vec![edge(2, 0, EdgeKind::Demand, 0), edge(1, 0, EdgeKind::Supply, 2)]);
        let c = path(vec![edge(0, 1, EdgeKind::Supply, 3), edge(1, 2, EdgeKind::Demand, 0)]);
        let d = path(vec![edge(0, 1, EdgeKind::Supply, 2), edge(0, 1, EdgeKind::Demand, 0)]);
        assert!(multigraph_isomorphic(&a, &b));
        assert!(!multigraph_isomorphic(&a, &c));
        assert!(!multigraph_isomorphic(&a, &d));
    }
}
