//! Small fixed instances used as regression anchors.

use crate::graph::{EdgeId, Multigraph};
use crate::planar::{EdgeKind, SeymourEdge, SeymourInstance};
use crate::requirements::RequirementOracle;

/// Augmentation instance on which plain primal-dual growth produces duals
/// with denominator 4.
///
/// Vertices `a..e` are `0..4`. The forest `Y` is the tree with edges
/// `ab, bc, bd, ae`; its leaves `c, d, e` start as the minimally unsatisfied
/// sets. Supply edges: `cd` (id 0) and `be` (id 1), both of cost 1.
///
/// Growth: `cd` goes tight at `t = 1/2` and merges `c, d` into the new
/// violated set `{b, c, d}`; `be` is then loaded from both `{e}` and
/// `{b, c, d}` and goes tight a quarter later, leaving `y_e = 3/4` and
/// `y_{bcd} = 1/4`.
pub fn quarter_integral_counterexample() -> (Multigraph, RequirementOracle) {
    let g = Multigraph::from_edges(5, [(2, 3, 1), (1, 4, 1)]).expect("valid graph");
    let f = RequirementOracle::augmentation(5, vec![(0, 1), (1, 2), (1, 3), (0, 4)])
        .expect("valid forest");
    (g, f)
}

/// Planar multicut/multiflow instance on which the half-integral pipeline
/// reports a multicut of capacity 4 against a flow of value 5/2, a ratio of
/// 8/5. Found by random search over stacked triangulations and shrunk by
/// deleting edges while the ratio stayed above 3/2.
pub fn gap_instance() -> SeymourInstance {
    use EdgeKind::{Demand, Supply};
    let edge = |u, v, kind, capacity| SeymourEdge { u, v, kind, capacity };
    let edges = vec![
        edge(3, 7, Supply, 2),
        edge(2, 6, Supply, 4),
        edge(0, 3, Demand, 0),
        edge(1, 3, Supply, 1),
        edge(2, 4, Supply, 1),
        edge(1, 4, Supply, 1),
        edge(1, 6, Demand, 0),
        edge(1, 2, Supply, 1),
        edge(0, 1, Supply, 3),
        edge(4, 5, Demand, 0),
        edge(2, 5, Supply, 1),
        edge(4, 7, Demand, 0),
    ];
    let ids = |xs: &[usize]| xs.iter().map(|&i| EdgeId(i)).collect::<Vec<_>>();
    let rotation = vec![
        ids(&[8, 2]),
        ids(&[8, 6, 7, 5, 3]),
        ids(&[4, 10, 7, 1]),
        ids(&[2, 3, 0]),
        ids(&[5, 9, 4, 11]),
        ids(&[10, 9]),
        ids(&[1, 6]),
        ids(&[0, 11]),
    ];
    SeymourInstance::new(8, edges, rotation).expect("valid embedding")
}
