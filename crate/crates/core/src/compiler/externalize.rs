use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CompileError;
use crate::model::{ForestBuilder, NavForest, NavGraph, NodeIndex, NodeKind};

use super::{require_valid, CompilerConfig};

/// Per-node decisions made by the bottom-up pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalizationPlan {
    /// Resolved subtree size per graph node (saturating); 0 for unreachable nodes.
    pub subtree_size: Vec<u64>,
    /// In-degree among source-reachable nodes.
    pub in_degree: Vec<usize>,
    /// Externalized merge nodes in the order they were externalized.
    pub externalized: Vec<NodeIndex>,
}

/// Runs the cost model over `dag`: nodes are visited in reverse topological
/// order (ties by ascending discovery order); a merge node with in-degree `d`
/// and resolved size `t` costs `(d - 1) * t` to clone, and is externalized
/// when that exceeds the threshold.
pub fn plan_externalization(dag: &NavGraph, cfg: &CompilerConfig) -> Result<ExternalizationPlan, CompileError> {
    require_valid(dag)?;
    let n = dag.len();
    let reachable = dag.reachable();
    let succ = dag.successors();

    let mut in_degree = vec![0usize; n];
    let mut pending_out = vec![0usize; n];
    for v in (0..n).filter(|&v| reachable[v]) {
        for &c in &succ[v] {
            in_degree[c] += 1;
        }
        pending_out[v] = succ[v].len();
    }
    let mut preds: Vec<Vec<NodeIndex>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| reachable[v]) {
        for &c in &succ[v] {
            preds[c].push(v);
        }
    }

    let mut ready: BTreeSet<NodeIndex> = (0..n).filter(|&v| reachable[v] && pending_out[v] == 0).collect();
    let mut subtree_size = vec![0u64; n];
    let mut is_external = vec![false; n];
    let mut externalized = Vec::new();
    let mut processed = 0usize;
    while let Some(v) = ready.pop_first() {
        processed += 1;
        let mut size = 1u64;
        for &c in &succ[v] {
            size = size.saturating_add(if is_external[c] { 1 } else { subtree_size[c] });
        }
        subtree_size[v] = size;
        if in_degree[v] >= 2 {
            let cost = ((in_degree[v] - 1) as u64).saturating_mul(size);
            if cfg.externalization_threshold.is_exceeded_by(cost) {
                is_external[v] = true;
                externalized.push(v);
            }
        }
        for &p in &preds[v] {
            pending_out[p] -= 1;
            if pending_out[p] == 0 {
                ready.insert(p);
            }
        }
    }
    if processed != reachable.iter().filter(|&&r| r).count() {
        return Err(CompileError::NotAcyclic);
    }
    Ok(ExternalizationPlan {
        subtree_size,
        in_degree,
        externalized,
    })
}

/// Compiles an acyclic single-source graph into a path-unambiguous forest.
pub fn externalize(dag: &NavGraph, cfg: &CompilerConfig) -> Result<NavForest, CompileError> {
    let plan = plan_externalization(dag, cfg)?;
    Ok(materialize(dag, &plan))
}

/// Expands the plan into trees, numbering nodes in one pre-order pass: the
/// main tree first, then each shared subtree in externalization order.
pub fn materialize(dag: &NavGraph, plan: &ExternalizationPlan) -> NavForest {
    let succ = dag.successors();
    let external: BTreeSet<NodeIndex> = plan.externalized.iter().copied().collect();
    let mut builder = ForestBuilder::new();
    let mut copies: BTreeMap<NodeIndex, usize> = BTreeMap::new();
    let mut pending_refs: Vec<(u32, NodeIndex)> = Vec::new();
    let mut subtree_root_of: BTreeMap<NodeIndex, u32> = BTreeMap::new();

    let Some(source) = dag.source_index() else {
        return builder.finish();
    };
    let roots = core::iter::once(source).chain(plan.externalized.iter().copied());
    for (i, root) in roots.enumerate() {
        // (graph node, parent forest id, as reference)
        let mut stack: Vec<(NodeIndex, Option<u32>, bool)> = vec![(root, None, false)];
        while let Some((v, parent, as_ref)) = stack.pop() {
            let node = dag.node(v);
            if as_ref {
                let id = builder.push(
                    parent,
                    node.identifier.clone(),
                    NodeKind::Reference,
                    node.name.clone(),
                    node.description.clone(),
                );
                pending_refs.push((id, v));
                continue;
            }
            let count = copies.entry(v).or_default();
            let kind = if *count == 0 {
                NodeKind::Original
            } else {
                NodeKind::Clone
            };
            *count += 1;
            let id = builder.push(
                parent,
                node.identifier.clone(),
                kind,
                node.name.clone(),
                node.description.clone(),
            );
            if parent.is_none() && i > 0 {
                builder.mark_shared_root(id);
                subtree_root_of.insert(v, id);
            }
            for &c in succ[v].iter().rev() {
                stack.push((c, Some(id), external.contains(&c)));
            }
        }
    }
    for (reference, v) in pending_refs {
        builder.add_entry(reference, subtree_root_of[&v]);
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::test_support::graph_from_edges;
    use crate::compiler::Threshold;

    fn cfg(theta: Threshold) -> CompilerConfig {
        CompilerConfig {
            externalization_threshold: theta,
            ..CompilerConfig::default()
        }
    }

    fn diamond() -> NavGraph {
        // A(0) -> {B(1), C(2)} -> D(3)
        graph_from_edges(&[(0, 1), (0, 2), (1, 3), (2, 3)])
    }

    #[test]
    fn tree_input_is_copied_verbatim() {
        let g = graph_from_edges(&[(0, 1), (0, 2), (1, 3)]);
        let f = externalize(&g, &cfg(Threshold::Finite(0))).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f.shared_roots().is_empty());
        assert!(f.entry_map().is_empty());
        assert!(f.nodes().iter().all(|n| n.kind == NodeKind::Original));
        assert!(f.check_invariants().is_empty());
    }

    #[test]
    fn diamond_clones_when_cheap() {
        let f = externalize(&diamond(), &cfg(Threshold::Infinite)).unwrap();
        assert_eq!(f.len(), 5);
        let order: Vec<_> = f.nodes().iter().map(|n| (n.name.as_str(), n.kind)).collect();
        assert_eq!(
            order,
            [
                ("n0", NodeKind::Original),
                ("n1", NodeKind::Original),
                ("n3", NodeKind::Original),
                ("n2", NodeKind::Original),
                ("n3", NodeKind::Clone),
            ]
        );
        assert!(f.check_invariants().is_empty());
    }

    #[test]
    fn diamond_externalizes_at_zero() {
        // t(D) = 1, d = 2, cost 1 > 0
        let f = externalize(&diamond(), &cfg(Threshold::Finite(0))).unwrap();
        assert_eq!(f.shared_roots().len(), 1);
        assert_eq!(f.entry_map().len(), 2);
        let refs: Vec<u32> = f.entry_map().keys().copied().collect();
        assert!(refs.iter().all(|&r| f.tree_root_of(r) == 0 && f.is_leaf(r)));
        // A, B, ref, C, ref | D
        assert_eq!(f.len(), 6);
        assert_eq!(f.shared_roots(), &[5]);
        assert_eq!(refs, [2, 4]);
        assert!(f.check_invariants().is_empty());
    }

    #[test]
    fn cost_equal_to_threshold_clones() {
        let f = externalize(&diamond(), &cfg(Threshold::Finite(1))).unwrap();
        assert!(f.shared_roots().is_empty());
    }

    #[test]
    fn cyclic_input_is_rejected() {
        let g = graph_from_edges(&[(0, 1), (1, 2), (2, 1)]);
        assert_eq!(
            externalize(&g, &CompilerConfig::default()),
            Err(CompileError::NotAcyclic)
        );
    }
}
