use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ControlIdentifier, ControlType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    /// First materialization of a graph node.
    Original,
    /// Further copy of a graph node, made when a merge node was cheap enough to duplicate.
    Clone,
    /// Leaf standing in for one redirected in-edge of an externalized merge node.
    Reference,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestNode {
    /// Display id; equals the node's position in [`NavForest::nodes`].
    pub id: u32,
    pub origin: ControlIdentifier,
    pub kind: NodeKind,
    pub name: String,
    #[serde(rename = "type")]
    pub control_type: ControlType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<u32>,
}

/// Path-unambiguous navigation topology: one main tree plus shared subtrees,
/// joined by an entry map from reference nodes to subtree roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "ForestParts")]
pub struct NavForest {
    nodes: Vec<ForestNode>,
    shared_roots: Vec<u32>,
    entry_map: BTreeMap<u32, u32>,
    /// Reference ids grouped by the subtree root they enter; derived from `entry_map`.
    #[serde(skip)]
    entries_into: BTreeMap<u32, Vec<u32>>,
}

#[derive(Deserialize)]
struct ForestParts {
    nodes: Vec<ForestNode>,
    shared_roots: Vec<u32>,
    entry_map: BTreeMap<u32, u32>,
}

impl From<ForestParts> for NavForest {
    fn from(p: ForestParts) -> Self {
        Self::from_parts(p.nodes, p.shared_roots, p.entry_map)
    }
}

/// Appends nodes in pre-order so display ids come out consecutive.
#[derive(Debug, Default)]
pub struct ForestBuilder {
    nodes: Vec<ForestNode>,
    shared_roots: Vec<u32>,
    entry_map: BTreeMap<u32, u32>,
}

impl ForestBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn next_id(&self) -> u32 {
        self.nodes.len() as u32
    }

    /// Adds a node under `parent` (or as a new tree root) and returns its id.
    pub fn push(
        &mut self,
        parent: Option<u32>,
        origin: ControlIdentifier,
        kind: NodeKind,
        name: String,
        description: Option<String>,
    ) -> u32 {
        let id = self.next_id();
        let control_type = origin.control_type;
        self.nodes.push(ForestNode {
            id,
            origin,
            kind,
            name,
            control_type,
            description,
            parent,
            children: Vec::new(),
        });
        if let Some(p) = parent {
            self.nodes[p as usize].children.push(id);
        }
        id
    }

    pub fn mark_shared_root(&mut self, id: u32) {
        self.shared_roots.push(id);
    }

    pub fn add_entry(&mut self, reference: u32, subtree_root: u32) {
        self.entry_map.insert(reference, subtree_root);
    }

    pub fn finish(self) -> NavForest {
        NavForest::from_parts(self.nodes, self.shared_roots, self.entry_map)
    }
}

impl NavForest {
    pub fn from_parts(nodes: Vec<ForestNode>, shared_roots: Vec<u32>, entry_map: BTreeMap<u32, u32>) -> Self {
        let mut entries_into: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (&r, &root) in &entry_map {
            entries_into.entry(root).or_default().push(r);
        }
        Self {
            nodes,
            shared_roots,
            entry_map,
            entries_into,
        }
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, id: u32) -> Option<&ForestNode> {
        self.nodes.get(id as usize)
    }

    pub fn node(&self, id: u32) -> &ForestNode {
        &self.nodes[id as usize]
    }

    pub fn main_root(&self) -> u32 {
        0
    }

    pub fn shared_roots(&self) -> &[u32] {
        &self.shared_roots
    }

    pub fn entry_map(&self) -> &BTreeMap<u32, u32> {
        &self.entry_map
    }

    /// Main root followed by the shared roots, in display order.
    pub fn tree_roots(&self) -> impl Iterator<Item = u32> + '_ {
        core::iter::once(self.main_root()).chain(self.shared_roots.iter().copied())
    }

    pub fn is_leaf(&self, id: u32) -> bool {
        self.node(id).children.is_empty()
    }

    /// A functional node is a leaf that is not just an entry into a
    /// navigational shared subtree.
    pub fn is_functional(&self, id: u32) -> bool {
        let n = self.node(id);
        if !n.children.is_empty() {
            return false;
        }
        match (n.kind, self.entry_map.get(&id)) {
            (NodeKind::Reference, Some(&root)) => self.get(root).is_some_and(|r| r.children.is_empty()),
            _ => true,
        }
    }

    pub fn tree_root_of(&self, id: u32) -> u32 {
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            cur = p;
        }
        cur
    }

    /// Ids from the containing tree's root down to `id`, inclusive.
    pub fn path_from_root(&self, id: u32) -> Vec<u32> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Depth within the containing tree; roots are at depth 0.
    pub fn depth(&self, id: u32) -> usize {
        self.path_from_root(id).len() - 1
    }

    /// Reference nodes whose entry is `subtree_root`, ascending.
    pub fn references_into(&self, subtree_root: u32) -> Vec<u32> {
        self.entries_into.get(&subtree_root).cloned().unwrap_or_default()
    }

    /// Every chain of reference ids that leads from the main tree into the
    /// tree rooted at `tree_root`. The main tree itself has one empty chain.
    pub fn entry_chains(&self, tree_root: u32) -> Vec<Vec<u32>> {
        self.entry_chains_memo(tree_root, &self.entries_into, &mut BTreeMap::new())
    }

    /// Reference ids grouped by the subtree root they enter.
    pub(crate) fn references_by_entry(&self) -> &BTreeMap<u32, Vec<u32>> {
        &self.entries_into
    }

    /// [`Self::entry_chains`] with a caller-held cache, for repeated queries.
    pub(crate) fn entry_chains_memo(
        &self,
        tree_root: u32,
        into: &BTreeMap<u32, Vec<u32>>,
        memo: &mut BTreeMap<u32, Vec<Vec<u32>>>,
    ) -> Vec<Vec<u32>> {
        if tree_root == self.main_root() {
            return vec![Vec::new()];
        }
        if let Some(c) = memo.get(&tree_root) {
            return c.clone();
        }
        // placeholder guards against malformed, cyclic reference structure
        memo.insert(tree_root, Vec::new());
        let mut out = Vec::new();
        for &r in into.get(&tree_root).map(Vec::as_slice).unwrap_or_default() {
            for mut chain in self.entry_chains_memo(self.tree_root_of(r), into, memo) {
                chain.push(r);
                out.push(chain);
            }
        }
        memo.insert(tree_root, out.clone());
        out
    }

    /// Follows a sequence of names from the main root, descending through
    /// reference nodes into shared subtrees. Returns the matching ids
    /// (references included) or `None` if some name is missing.
    pub fn find_by_names(&self, names: &[&str]) -> Option<Vec<u32>> {
        let mut cur = self.main_root();
        let mut out = Vec::new();
        for name in names {
            let here = match self.entry_map.get(&cur) {
                Some(&root) => root,
                None => cur,
            };
            let next = *self.node(here).children.iter().find(|&&c| self.node(c).name == *name)?;
            out.push(next);
            cur = next;
        }
        Some(out)
    }

    /// Structural invariant check; returns human-readable violations.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if self.nodes.is_empty() {
            problems.push("forest has no nodes".into());
            return problems;
        }
        let n = self.nodes.len() as u32;
        for (i, node) in self.nodes.iter().enumerate() {
            if node.id != i as u32 {
                problems.push(format!("node at position {i} has id {}", node.id));
            }
            if node.control_type != node.origin.control_type {
                problems.push(format!("node {i} type disagrees with its origin"));
            }
            for &c in &node.children {
                if c >= n || self.nodes[c as usize].parent != Some(i as u32) {
                    problems.push(format!("child {c} of node {i} does not point back"));
                }
            }
            if let Some(p) = node.parent {
                if p >= n || !self.nodes[p as usize].children.contains(&(i as u32)) {
                    problems.push(format!("node {i} has inconsistent parent {p}"));
                }
            }
            if node.kind == NodeKind::Reference {
                if !node.children.is_empty() {
                    problems.push(format!("reference {i} has children"));
                }
                if !self.entry_map.contains_key(&(i as u32)) {
                    problems.push(format!("reference {i} missing from entry map"));
                }
            }
        }
        if self.nodes[0].parent.is_some() {
            problems.push("main root has a parent".into());
        }
        let roots: BTreeSet<u32> = self.tree_roots().collect();
        for &r in &self.shared_roots {
            if r >= n || self.nodes[r as usize].parent.is_some() {
                problems.push(format!("shared root {r} is not a root"));
            }
        }
        for (i, node) in self.nodes.iter().enumerate() {
            if node.parent.is_none() && !roots.contains(&(i as u32)) {
                problems.push(format!("node {i} is an unlisted root"));
            }
        }
        for (&k, &v) in &self.entry_map {
            if k >= n || self.nodes[k as usize].kind != NodeKind::Reference {
                problems.push(format!("entry key {k} is not a reference node"));
            }
            if !self.shared_roots.contains(&v) {
                problems.push(format!("entry value {v} is not a shared root"));
            }
        }
        let mut originals: BTreeMap<&ControlIdentifier, usize> = BTreeMap::new();
        for node in &self.nodes {
            if node.kind != NodeKind::Reference {
                *originals.entry(&node.origin).or_default() += 1;
            }
        }
        for node in &self.nodes {
            if node.kind == NodeKind::Clone && originals.get(&node.origin).copied().unwrap_or(0) < 2 {
                problems.push(format!("clone {} shares its origin with no other node", node.id));
            }
        }
        // pre-order numbering: each tree occupies a contiguous id range in display order
        let mut expected = 0u32;
        for root in self.tree_roots() {
            if root >= n {
                continue;
            }
            let mut stack = vec![root];
            while let Some(x) = stack.pop() {
                if x != expected {
                    problems.push(format!("node {x} breaks pre-order numbering (expected {expected})"));
                    return problems;
                }
                expected += 1;
                stack.extend(self.nodes[x as usize].children.iter().rev());
            }
        }
        if expected != n {
            problems.push(format!("{} nodes are not reachable from any root", n - expected));
        }
        problems
    }
}
