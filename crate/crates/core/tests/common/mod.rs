//! Graph generators and brute-force oracles shared by the property tests
//! and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use goi_core::model::{ControlIdentifier, ControlNode, ControlType, Edge, NavGraph};
use rand::Rng;

pub const TYPES: [ControlType; 6] = [
    ControlType::Button,
    ControlType::MenuItem,
    ControlType::TabItem,
    ControlType::Group,
    ControlType::ListItem,
    ControlType::Edit,
];

/// Name alphabet including every character the text format escapes.
const NAME_CHARS: &[char] = &[
    'a', 'b', 'K', ' ', '(', ')', '[', ']', ',', '_', '\\', '<', '>', '|', '/', 'é', '…',
];

pub fn ident(i: usize) -> ControlIdentifier {
    ControlIdentifier::new(format!("n{i}"), TYPES[i % TYPES.len()], vec!["App".into()])
}

pub fn node(i: usize) -> ControlNode {
    ControlNode::new(ident(i), format!("n{i}"))
}

pub fn graph(n: usize, edges: &[(usize, usize)]) -> NavGraph {
    graph_with_nodes((0..n).map(node).collect(), edges)
}

pub fn graph_with_nodes(nodes: Vec<ControlNode>, edges: &[(usize, usize)]) -> NavGraph {
    let edges = edges
        .iter()
        .map(|&(a, b)| Edge {
            src: nodes[a].identifier.clone(),
            dst: nodes[b].identifier.clone(),
            action: Default::default(),
        })
        .collect();
    NavGraph::from_parts(nodes[0].identifier.clone(), nodes, edges)
}

pub fn random_name<R: Rng>(rng: &mut R) -> String {
    let len = rng.gen_range(1..10);
    (0..len)
        .map(|_| NAME_CHARS[rng.gen_range(0..NAME_CHARS.len())])
        .collect()
}

/// Source-to-sink path count over an edge list on `n` nodes, `None` if it
/// exceeds `cap`.
fn path_count(n: usize, edges: &[(usize, usize)], cap: u128) -> Option<u128> {
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edges {
        succ[a].push(b);
    }
    let mut paths = vec![0u128; n];
    for v in (0..n).rev() {
        paths[v] = if succ[v].is_empty() {
            1
        } else {
            succ[v].iter().map(|&c| paths[c]).sum()
        };
        if paths[v] > cap {
            return None;
        }
    }
    Some(paths[0])
}

/// Edges of a random single-source DAG on `n` nodes, every node reachable
/// from node 0. Edges only run from lower to higher index. Extra edges that
/// would push the source-to-sink path count past `path_cap` are skipped.
pub fn random_dag_edges<R: Rng>(rng: &mut R, n: usize, max_edges: usize, path_cap: u128) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    let mut set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let target = rng.gen_range(edges.len()..=max_edges.max(edges.len()));
    let mut attempts = 0;
    while edges.len() < target && attempts < 4 * max_edges {
        attempts += 1;
        let a = rng.gen_range(0..n - 1);
        let b = rng.gen_range(a + 1..n);
        if set.contains(&(a, b)) {
            continue;
        }
        edges.push((a, b));
        if path_count(n, &edges, path_cap).is_none() {
            edges.pop();
            continue;
        }
        set.insert((a, b));
    }
    edges
}

pub fn random_dag<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize, path_cap: u128) -> NavGraph {
    let n = rng.gen_range(2..=max_nodes);
    let edges = random_dag_edges(rng, n, max_edges, path_cap);
    graph(n, &edges)
}

/// Like [`random_dag`] but with random names and descriptions.
pub fn random_named_dag<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize, path_cap: u128) -> NavGraph {
    let n = rng.gen_range(2..=max_nodes);
    let edges = random_dag_edges(rng, n, max_edges, path_cap);
    let nodes = (0..n)
        .map(|i| {
            let name = random_name(rng);
            let id = ControlIdentifier::new(
                format!("{name}#{i}"),
                TYPES[rng.gen_range(0..TYPES.len())],
                vec!["App".into()],
            );
            let mut node = ControlNode::new(id, name);
            if rng.gen_bool(0.3) {
                node.description = Some(random_name(rng));
            }
            node
        })
        .collect();
    graph_with_nodes(nodes, &edges)
}

/// A random graph with cycles: a spanning tree from node 0, random extra
/// edges in any direction (never into node 0, self-loops allowed) and
/// sometimes a pair of nodes only reachable from each other.
pub fn random_cyclic_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_extra: usize) -> NavGraph {
    let n = rng.gen_range(2..=max_nodes);
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    for _ in 0..rng.gen_range(1..=max_extra) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(1..n);
        edges.push((a, b));
    }
    edges.sort_unstable();
    edges.dedup();
    let mut total = n;
    if rng.gen_bool(0.3) {
        edges.push((n, n + 1));
        edges.push((n + 1, n));
        edges.push((n, rng.gen_range(1..n)));
        total += 2;
    }
    graph(total, &edges)
}

/// Successor lists built from the raw edge list.
fn successors(g: &NavGraph) -> BTreeMap<&ControlIdentifier, Vec<&ControlIdentifier>> {
    let mut succ: BTreeMap<&ControlIdentifier, Vec<&ControlIdentifier>> = BTreeMap::new();
    for e in g.edges() {
        succ.entry(&e.src).or_default().push(&e.dst);
    }
    succ
}

/// Every simple path from the source to a node without successors, found by
/// exhaustive depth-first enumeration.
pub fn enumerate_paths(g: &NavGraph) -> Vec<Vec<ControlIdentifier>> {
    fn walk<'a>(
        succ: &BTreeMap<&'a ControlIdentifier, Vec<&'a ControlIdentifier>>,
        path: &mut Vec<&'a ControlIdentifier>,
        out: &mut Vec<Vec<ControlIdentifier>>,
    ) {
        let last = *path.last().unwrap();
        match succ.get(last) {
            None => out.push(path.iter().map(|&i| i.clone()).collect()),
            Some(next) => {
                for &n in next {
                    if path.contains(&n) {
                        continue;
                    }
                    path.push(n);
                    walk(succ, path, out);
                    path.pop();
                }
            }
        }
    }
    let succ = successors(g);
    let mut out = Vec::new();
    walk(&succ, &mut vec![g.source()], &mut out);
    out
}

/// Source-reachable identifiers by breadth-first search over the edge list.
pub fn bfs_reachable(g: &NavGraph) -> BTreeSet<ControlIdentifier> {
    let succ = successors(g);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::from([g.source()]);
    seen.insert(g.source().clone());
    while let Some(v) = queue.pop_front() {
        for &n in succ.get(v).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(n.clone()) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Node count of the fully cloned tree: one node per source-to-node path,
/// counted by walking every path.
pub fn full_clone_size(g: &NavGraph) -> u64 {
    fn walk(succ: &BTreeMap<&ControlIdentifier, Vec<&ControlIdentifier>>, v: &ControlIdentifier) -> u64 {
        1 + succ.get(v).map_or(0, |next| next.iter().map(|n| walk(succ, n)).sum())
    }
    walk(&successors(g), g.source())
}

/// `k` chained merge diamonds: `s_i -> a_i, s_i -> b_i, a_i -> s_{i+1},
/// b_i -> s_{i+1}`, followed by a leaf region of `tail` nodes under the last
/// merge point. Node 0 is the source.
pub fn diamond_chain(k: usize, tail: usize) -> (NavGraph, Vec<usize>) {
    let mut edges = Vec::new();
    for i in 0..k {
        let s = 3 * i;
        edges.extend([(s, s + 1), (s, s + 2), (s + 1, s + 3), (s + 2, s + 3)]);
    }
    let last = 3 * k;
    let tail_nodes: Vec<usize> = (last + 1..=last + tail).collect();
    for &t in &tail_nodes {
        edges.push((last, t));
    }
    (graph(last + tail + 1, &edges), tail_nodes)
}
