use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::CompileError;
use crate::model::NavGraph;

use super::require_valid;

/// Indices (into `g.edges()`) of the back-edges found by a depth-first search
/// from the source, visiting successors in edge order. Nodes the source cannot
/// reach are searched afterwards in discovery order so the result covers the
/// whole graph.
pub fn back_edges(g: &NavGraph) -> BTreeSet<usize> {
    let n = g.len();
    let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (ei, e) in g.edges().iter().enumerate() {
        if let (Some(s), Some(d)) = (g.index_of(&e.src), g.index_of(&e.dst)) {
            out[s].push((ei, d));
        }
    }

    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Gray,
        Black,
    }
    let mut color = vec![Color::White; n];
    let mut back = BTreeSet::new();
    let starts = g.source_index().into_iter().chain(0..n);
    for start in starts {
        if color[start] != Color::White {
            continue;
        }
        color[start] = Color::Gray;
        let mut stack = vec![(start, 0usize)];
        while let Some(top) = stack.last_mut() {
            let (node, pos) = *top;
            if let Some(&(ei, d)) = out[node].get(pos) {
                top.1 += 1;
                match color[d] {
                    Color::White => {
                        color[d] = Color::Gray;
                        stack.push((d, 0));
                    }
                    Color::Gray => {
                        back.insert(ei);
                    }
                    Color::Black => {}
                }
            } else {
                color[node] = Color::Black;
                stack.pop();
            }
        }
    }
    back
}

/// Removes the DFS back-edges, yielding an acyclic graph with the same nodes
/// and the same source-reachable set.
pub fn decycle(g: &NavGraph) -> Result<NavGraph, CompileError> {
    require_valid(g)?;
    let back = back_edges(g);
    let mut dag = g.clone();
    dag.retain_edges(|i, _| !back.contains(&i));
    Ok(dag)
}

/// Kahn's algorithm over every node; `None` if a cycle remains.
pub fn topological_order(g: &NavGraph) -> Option<Vec<usize>> {
    let succ = g.successors();
    let mut indeg = vec![0usize; g.len()];
    for s in &succ {
        for &d in s {
            indeg[d] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..g.len()).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(g.len());
    while let Some(n) = ready.pop_first() {
        order.push(n);
        for &d in &succ[n] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.insert(d);
            }
        }
    }
    (order.len() == g.len()).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::test_support::graph_from_edges;

    #[test]
    fn acyclic_input_is_unchanged() {
        let g = graph_from_edges(&[(0, 1), (0, 2), (1, 3), (2, 3)]);
        assert_eq!(decycle(&g).unwrap(), g);
    }

    #[test]
    fn two_cycle_loses_the_return_edge() {
        // root -> A -> B -> A
        let g = graph_from_edges(&[(0, 1), (1, 2), (2, 1)]);
        let dag = decycle(&g).unwrap();
        assert_eq!(dag.edges().len(), 2);
        assert_eq!(dag.edges()[1].src, g.node(1).identifier);
        assert_eq!(dag.edges()[1].dst, g.node(2).identifier);
        assert!(topological_order(&dag).is_some());
    }

    #[test]
    fn self_loop_is_a_back_edge() {
        let g = graph_from_edges(&[(0, 1), (1, 1)]);
        assert_eq!(back_edges(&g).into_iter().collect::<Vec<_>>(), [1]);
    }

    #[test]
    fn cross_edges_survive() {
        // 0->1->3, 0->2->3, 3->1 closes a cycle through the first branch only
        let g = graph_from_edges(&[(0, 1), (1, 3), (0, 2), (2, 3), (3, 1)]);
        let back = back_edges(&g);
        assert_eq!(back.into_iter().collect::<Vec<_>>(), [4]);
    }
}
