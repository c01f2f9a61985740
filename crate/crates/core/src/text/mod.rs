//! Compact text form of a navigation forest.
//!
//! Each node renders as `name(type)(description)_id[children]`; the
//! description group and the child list are optional. One tree per line: the
//! main tree first, then, after a `## shared` divider, every shared subtree
//! followed by one `ref <ref_id> -> subtree <root_id>` line per entry-map
//! entry. Children elided from a core view are replaced by a placeholder
//! `<N more, further_query P>` naming the parent to expand.

mod parse;
mod render;
mod tokens;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::ControlType;

pub use parse::parse_topology;
pub use render::{expand_query, extract_core, serialize, QueryTarget};
pub use tokens::{estimate_tokens, TokenEstimate};

pub const SHARED_DIVIDER: &str = "## shared";
pub const TRUNCATION_MARKER: &str = "…";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SerializationConfig {
    pub core_depth: usize,
    pub description_char_limit: usize,
    pub key_types: BTreeSet<ControlType>,
    pub enumeration_collapse_threshold: usize,
    pub exclusion_ids: BTreeSet<u32>,
}

impl Default for SerializationConfig {
    fn default() -> Self {
        Self {
            core_depth: 6,
            description_char_limit: 80,
            key_types: [
                ControlType::Menu,
                ControlType::TabItem,
                ControlType::ComboBox,
                ControlType::Group,
                ControlType::Button,
            ]
            .into_iter()
            .collect(),
            enumeration_collapse_threshold: 50,
            exclusion_ids: BTreeSet::new(),
        }
    }
}

/// Parsed text: trees in document order plus the entry map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TopologyView {
    pub trees: Vec<ViewNode>,
    /// Index into `trees` where the shared section begins, if present.
    pub shared_start: Option<usize>,
    pub entries: BTreeMap<u32, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViewNode {
    pub id: u32,
    pub name: String,
    pub control_type: ControlType,
    pub description: Option<String>,
    pub children: Vec<ViewNode>,
    /// Set when some children were elided behind a placeholder.
    pub hidden: Option<HiddenChildren>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HiddenChildren {
    pub count: usize,
    pub further_query: u32,
}

impl TopologyView {
    /// All nodes in document pre-order.
    pub fn nodes(&self) -> Vec<&ViewNode> {
        let mut out = Vec::new();
        let mut stack: Vec<&ViewNode> = self.trees.iter().rev().collect();
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(n.children.iter().rev());
        }
        out
    }

    /// The same view with every description removed.
    pub fn without_descriptions(&self) -> TopologyView {
        fn strip(n: &ViewNode) -> ViewNode {
            ViewNode {
                description: None,
                children: n.children.iter().map(strip).collect(),
                ..n.clone()
            }
        }
        TopologyView {
            trees: self.trees.iter().map(strip).collect(),
            ..self.clone()
        }
    }

    /// Builds the full view of a forest directly, without going through text.
    pub fn of_forest(forest: &crate::model::NavForest) -> TopologyView {
        fn build(forest: &crate::model::NavForest, id: u32) -> ViewNode {
            let n = forest.node(id);
            ViewNode {
                id,
                name: n.name.clone(),
                control_type: n.control_type,
                description: None,
                children: n.children.iter().map(|&c| build(forest, c)).collect(),
                hidden: None,
            }
        }
        let trees: Vec<ViewNode> = forest.tree_roots().map(|r| build(forest, r)).collect();
        let shared_start = (!forest.shared_roots().is_empty()).then_some(1);
        TopologyView {
            trees,
            shared_start,
            entries: forest.entry_map().clone(),
        }
    }
}
