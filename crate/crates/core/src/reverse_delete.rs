use crate::error::SolverError;
use crate::graph::{EdgeId, Multigraph};
use crate::requirements::{minimal_violated, RequirementOracle, ViolatedSetMethod};

/// True when no set is violated by `selected`.
pub fn is_feasible(
    g: &Multigraph,
    oracle: &RequirementOracle,
    selected: &[EdgeId],
    method: ViolatedSetMethod,
) -> Result<bool, SolverError> {
    Ok(minimal_violated(oracle, g, selected, method)?.is_empty())
}

/// Scans `picked` from last to first and drops every edge whose removal
/// keeps the remaining set feasible. The survivors keep their pick order.
pub fn reverse_delete(
    g: &Multigraph,
    oracle: &RequirementOracle,
    picked: &[EdgeId],
    method: ViolatedSetMethod,
) -> Result<Vec<EdgeId>, SolverError> {
    let report = minimal_violated(oracle, g, picked, method)?;
    if let Some(&s) = report.sets.first() {
        return Err(SolverError::InfeasibleInput(s));
    }
    let mut keep = vec![true; picked.len()];
    for i in (0..picked.len()).rev() {
        keep[i] = false;
        let trial: Vec<EdgeId> =
            picked.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect();
        if !is_feasible(g, oracle, &trial, method)? {
            keep[i] = true;
        }
    }
    Ok(picked.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e).collect())
}

/// An edge of `selected` that can be dropped without losing feasibility,
/// if any.
pub fn redundant_edge(
    g: &Multigraph,
    oracle: &RequirementOracle,
    selected: &[EdgeId],
    method: ViolatedSetMethod,
) -> Result<Option<EdgeId>, SolverError> {
    for &e in selected {
        let rest: Vec<EdgeId> = selected.iter().copied().filter(|&x| x != e).collect();
        if is_feasible(g, oracle, &rest, method)? {
            return Ok(Some(e));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drops_redundant_parallel_edge() {
        let g = Multigraph::from_edges(2, [(0, 1, 1), (0, 1, 1)]).unwrap();
        let f = RequirementOracle::proper_from_demands(2, vec![(0, 1)]).unwrap();
        let m = ViolatedSetMethod::ProperComponents;
        let out = reverse_delete(&g, &f, &[EdgeId(0), EdgeId(1)], m).unwrap();
        assert_eq!(out, vec![EdgeId(0)]);
        assert_eq!(redundant_edge(&g, &f, &out, m).unwrap(), None);
    }

    #[test]
    fn keeps_minimal_input() {
        let g = Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let f = RequirementOracle::proper_from_demands(3, vec![(0, 2)]).unwrap();
        let m = ViolatedSetMethod::ProperComponents;
        let out = reverse_delete(&g, &f, &[EdgeId(0), EdgeId(1)], m).unwrap();
        assert_eq!(out, vec![EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn rejects_infeasible_input() {
        let g = Multigraph::from_edges(3, [(0, 1, 1), (1, 2, 1)]).unwrap();
        let f = RequirementOracle::proper_from_demands(3, vec![(0, 2)]).unwrap();
        let err = reverse_delete(&g, &f, &[EdgeId(0)], ViolatedSetMethod::ProperComponents);
        assert!(matches!(err, Err(SolverError::InfeasibleInput(_))));
    }
}
