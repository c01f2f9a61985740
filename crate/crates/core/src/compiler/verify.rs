use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{NavForest, NavGraph, NodeKind};

use super::resolve::route_into;

/// A `(target, reference chain)` pair naming one forest path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AccessSpec {
    pub target: u32,
    pub entry_ref_id: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Root-to-leaf paths in the graph (saturating).
    pub dag_paths: u128,
    pub access_specs: usize,
    /// Forest nodes whose origin is not a graph node.
    pub unknown_origins: Vec<u32>,
    /// Specs whose resolved path is not a root-to-leaf path of the graph.
    pub invalid_specs: Vec<AccessSpec>,
    /// Specs resolving to a graph path some earlier spec already covers.
    pub duplicate_specs: Vec<AccessSpec>,
    pub forest_problems: Vec<String>,
    pub bijection: bool,
}

impl VerificationReport {
    pub fn is_ok(&self) -> bool {
        self.bijection && self.unknown_origins.is_empty() && self.forest_problems.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dag root-to-leaf paths: {}", self.dag_paths)?;
        writeln!(f, "forest access specs:    {}", self.access_specs)?;
        writeln!(
            f,
            "bijection:              {}",
            if self.bijection { "holds" } else { "BROKEN" }
        )?;
        for id in &self.unknown_origins {
            writeln!(f, "  unknown origin at node {id}")?;
        }
        for s in &self.invalid_specs {
            writeln!(f, "  spec {} via {:?} is not a dag path", s.target, s.entry_ref_id)?;
        }
        for s in &self.duplicate_specs {
            writeln!(
                f,
                "  spec {} via {:?} duplicates another spec",
                s.target, s.entry_ref_id
            )?;
        }
        for p in &self.forest_problems {
            writeln!(f, "  forest: {p}")?;
        }
        Ok(())
    }
}

/// Every access spec the forest offers: each non-reference leaf, paired with
/// each reference chain that enters its tree.
pub fn access_specs(forest: &NavForest) -> Vec<AccessSpec> {
    let mut out = Vec::new();
    let into = forest.references_by_entry();
    let mut memo = BTreeMap::new();
    for n in forest.nodes() {
        if n.kind == NodeKind::Reference || !n.children.is_empty() {
            continue;
        }
        for chain in forest.entry_chains_memo(forest.tree_root_of(n.id), into, &mut memo) {
            out.push(AccessSpec {
                target: n.id,
                entry_ref_id: chain,
            });
        }
    }
    out
}

/// Counts the graph's source-to-leaf paths by dynamic programming.
fn count_paths(dag: &NavGraph) -> Option<u128> {
    let order = super::topological_order(dag)?;
    let succ = dag.successors();
    let reachable = dag.reachable();
    let mut paths = vec![0u128; dag.len()];
    for &v in order.iter().rev() {
        if !reachable[v] {
            continue;
        }
        paths[v] = if succ[v].is_empty() {
            1
        } else {
            succ[v].iter().fold(0u128, |a, &c| a.saturating_add(paths[c]))
        };
    }
    Some(dag.source_index().map_or(0, |s| paths[s]))
}

/// Checks that access specs and graph root-to-leaf paths correspond one-to-one.
///
/// Each spec is resolved and its origin sequence checked to be a distinct
/// source-to-leaf path of `dag`; with the spec count equal to the graph's path
/// count, that makes the correspondence a bijection.
pub fn verify_forest(dag: &NavGraph, forest: &NavForest) -> VerificationReport {
    let mut report = VerificationReport {
        forest_problems: forest.check_invariants(),
        ..Default::default()
    };
    report.unknown_origins = forest
        .nodes()
        .iter()
        .filter(|n| !dag.contains(&n.origin))
        .map(|n| n.id)
        .collect();
    let Some(dag_paths) = count_paths(dag) else {
        report.forest_problems.push("graph is not acyclic".into());
        return report;
    };
    report.dag_paths = dag_paths;
    if !report.forest_problems.is_empty() {
        return report;
    }

    let succ = dag.successors();
    let origin_index: Vec<Option<usize>> = forest.nodes().iter().map(|n| dag.index_of(&n.origin)).collect();
    let specs = access_specs(forest);
    report.access_specs = specs.len();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let (mut route, mut idx) = (Vec::new(), Vec::new());
    for spec in specs {
        route_into(forest, spec.target, &spec.entry_ref_id, &mut route);
        idx.clear();
        idx.extend(route.iter().map_while(|&id| origin_index[id as usize]));
        let valid = idx.len() == route.len()
            && idx.first().copied() == dag.source_index()
            && idx.windows(2).all(|w| succ[w[0]].contains(&w[1]))
            && idx.last().is_some_and(|&l| succ[l].is_empty());
        if !valid {
            report.invalid_specs.push(spec);
        } else if !seen.insert(idx.clone()) {
            report.duplicate_specs.push(spec);
        }
    }
    report.bijection = report.invalid_specs.is_empty()
        && report.duplicate_specs.is_empty()
        && report.access_specs as u128 == report.dag_paths;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::test_support::graph_from_edges;
    use crate::compiler::{externalize, CompilerConfig, Threshold};

    #[test]
    fn diamond_has_two_specs_at_every_threshold() {
        let g = graph_from_edges(&[(0, 1), (0, 2), (1, 3), (2, 3)]);
        for theta in [Threshold::Finite(0), Threshold::Finite(8), Threshold::Infinite] {
            let cfg = CompilerConfig {
                externalization_threshold: theta,
                ..Default::default()
            };
            let f = externalize(&g, &cfg).unwrap();
            let r = verify_forest(&g, &f);
            assert!(r.is_ok(), "{r}");
            assert_eq!(r.dag_paths, 2);
            assert_eq!(r.access_specs, 2);
        }
    }

    #[test]
    fn detects_a_forest_from_another_graph() {
        let g = graph_from_edges(&[(0, 1), (0, 2), (1, 3), (2, 3)]);
        let f = externalize(&g, &CompilerConfig::default()).unwrap();
        let other = graph_from_edges(&[(0, 1), (0, 2), (1, 3)]);
        let r = verify_forest(&other, &f);
        assert!(!r.bijection);
        assert!(!r.invalid_specs.is_empty());
    }
}
