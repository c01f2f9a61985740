use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ControlIdentifier, ControlNode, ControlType};

pub type NodeIndex = usize;

pub const VIRTUAL_ROOT_NAME: &str = "[Root]";

/// The interaction an edge records. Only clicks are modeled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClickKind {
    #[default]
    Click,
}

/// Clicking `src` reveals `dst`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: ControlIdentifier,
    pub dst: ControlIdentifier,
    #[serde(default)]
    pub action: ClickKind,
}

/// Single-source navigation graph produced by ripping.
///
/// Nodes are kept in discovery order and edges in the order the ripper
/// recorded them; both orders feed deterministic tie-breaking downstream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "GraphRepr", into = "GraphRepr")]
pub struct NavGraph {
    source: ControlIdentifier,
    nodes: Vec<ControlNode>,
    edges: Vec<Edge>,
    index: BTreeMap<ControlIdentifier, NodeIndex>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    source: ControlIdentifier,
    nodes: Vec<ControlNode>,
    edges: Vec<Edge>,
}

impl From<GraphRepr> for NavGraph {
    fn from(r: GraphRepr) -> Self {
        NavGraph::from_parts(r.source, r.nodes, r.edges)
    }
}

impl From<NavGraph> for GraphRepr {
    fn from(g: NavGraph) -> Self {
        GraphRepr {
            source: g.source,
            nodes: g.nodes,
            edges: g.edges,
        }
    }
}

impl NavGraph {
    /// A graph holding only the given virtual root.
    pub fn new(root: ControlNode) -> Self {
        let source = root.identifier.clone();
        Self::from_parts(source, vec![root], Vec::new())
    }

    /// A graph holding only the standard virtual root.
    pub fn with_virtual_root() -> Self {
        Self::new(Self::virtual_root_node())
    }

    pub fn virtual_root_node() -> ControlNode {
        let id = ControlIdentifier::new(VIRTUAL_ROOT_NAME, ControlType::Pane, Vec::new());
        ControlNode::new(id, VIRTUAL_ROOT_NAME)
    }

    /// Assembles a graph without checking it; see [`super::validate_graph`].
    /// Later duplicates of an identifier are kept in `nodes` but never indexed.
    pub fn from_parts(source: ControlIdentifier, nodes: Vec<ControlNode>, edges: Vec<Edge>) -> Self {
        let mut index = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.identifier.clone()).or_insert(i);
        }
        Self {
            source,
            nodes,
            edges,
            index,
        }
    }

    pub fn source(&self) -> &ControlIdentifier {
        &self.source
    }

    pub fn source_index(&self) -> Option<NodeIndex> {
        self.index_of(&self.source)
    }

    pub fn nodes(&self) -> &[ControlNode] {
        &self.nodes
    }

    pub fn node(&self, idx: NodeIndex) -> &ControlNode {
        &self.nodes[idx]
    }

    pub fn node_mut(&mut self, idx: NodeIndex) -> &mut ControlNode {
        &mut self.nodes[idx]
    }

    pub fn get(&self, id: &ControlIdentifier) -> Option<&ControlNode> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &ControlIdentifier) -> Option<NodeIndex> {
        self.index.get(id).copied()
    }

    pub fn contains(&self, id: &ControlIdentifier) -> bool {
        self.index.contains_key(id)
    }

    /// Inserts `node` unless its identifier is already present.
    /// Returns the node's index and whether it was newly inserted.
    pub fn add_node(&mut self, node: ControlNode) -> (NodeIndex, bool) {
        if let Some(&i) = self.index.get(&node.identifier) {
            return (i, false);
        }
        let i = self.nodes.len();
        self.index.insert(node.identifier.clone(), i);
        self.nodes.push(node);
        (i, true)
    }

    /// Appends a click edge unless the same edge already exists.
    pub fn add_edge(&mut self, src: &ControlIdentifier, dst: &ControlIdentifier) -> bool {
        if self.edges.iter().any(|e| &e.src == src && &e.dst == dst) {
            return false;
        }
        self.edges.push(Edge {
            src: src.clone(),
            dst: dst.clone(),
            action: ClickKind::Click,
        });
        true
    }

    /// Keeps only the edges for which `keep` returns true, preserving order.
    pub fn retain_edges(&mut self, mut keep: impl FnMut(usize, &Edge) -> bool) {
        let mut i = 0;
        self.edges.retain(|e| {
            let k = keep(i, e);
            i += 1;
            k
        });
    }

    /// Successor lists in edge order. Dangling edges are skipped.
    pub fn successors(&self) -> Vec<Vec<NodeIndex>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            if let (Some(s), Some(d)) = (self.index_of(&e.src), self.index_of(&e.dst)) {
                out[s].push(d);
            }
        }
        out
    }

    /// Nodes reachable from the source, as a membership vector.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let Some(src) = self.source_index() else { return seen };
        let succ = self.successors();
        let mut stack = vec![src];
        seen[src] = true;
        while let Some(n) = stack.pop() {
            for &m in &succ[n] {
                if !seen[m] {
                    seen[m] = true;
                    stack.push(m);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ControlType;
    use alloc::string::ToString;

    fn node(name: &str) -> ControlNode {
        ControlNode::new(
            ControlIdentifier::new(name, ControlType::Button, vec!["W".to_string()]),
            name,
        )
    }

    #[test]
    fn add_node_is_idempotent_on_identifier() {
        let mut g = NavGraph::with_virtual_root();
        let (a, fresh) = g.add_node(node("A"));
        assert!(fresh);
        assert_eq!(g.add_node(node("A")), (a, false));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn edges_keep_discovery_order_and_dedupe() {
        let mut g = NavGraph::with_virtual_root();
        let root = g.source().clone();
        for n in ["B", "A", "C"] {
            g.add_node(node(n));
            assert!(g.add_edge(&root, &node(n).identifier));
        }
        assert!(!g.add_edge(&root, &node("A").identifier));
        let names: Vec<_> = g.successors()[0].iter().map(|&i| g.node(i).name.clone()).collect();
        assert_eq!(names, ["B", "A", "C"]);
    }
}
