use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::TextError;
use crate::model::{ControlIdentifier, NavForest, NodeKind};

use super::{SerializationConfig, SHARED_DIVIDER, TRUNCATION_MARKER};

/// What a `further_query` asks for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryTarget {
    /// The complete forest (sentinel `-1`).
    All,
    Nodes(Vec<u32>),
}

impl QueryTarget {
    pub fn from_ids(ids: &[i64]) -> Result<Self, TextError> {
        if ids.is_empty() {
            return Err(TextError::EmptyQuery);
        }
        if ids.contains(&-1) {
            return Ok(QueryTarget::All);
        }
        ids.iter()
            .map(|&i| u32::try_from(i).map_err(|_| TextError::UnknownId { id: i }))
            .collect::<Result<Vec<_>, _>>()
            .map(QueryTarget::Nodes)
    }
}

pub(crate) fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' | '(' | ')' | '[' | ']' | ',' | '_' | '<' | '>' => {
                out.push('\\');
                out.push(c);
            }
            _ => out.push(c),
        }
    }
}

/// Per-node description text after the attachment and truncation rules.
fn descriptions(forest: &NavForest, cfg: &SerializationConfig) -> Vec<Option<String>> {
    // names shared by distinct controls, where at least one of them has a key type
    let mut by_name: BTreeMap<&str, BTreeSet<&ControlIdentifier>> = BTreeMap::new();
    for n in forest.nodes() {
        by_name.entry(n.name.as_str()).or_default().insert(&n.origin);
    }
    let key_groups: BTreeSet<&str> = by_name
        .iter()
        .filter(|(_, ids)| ids.len() >= 2 && ids.iter().any(|id| cfg.key_types.contains(&id.control_type)))
        .map(|(name, _)| *name)
        .collect();

    forest
        .nodes()
        .iter()
        .map(|n| {
            let navigational = match n.kind {
                NodeKind::Reference => forest
                    .entry_map()
                    .get(&n.id)
                    .is_some_and(|&r| !forest.node(r).children.is_empty()),
                _ => !n.children.is_empty(),
            };
            if key_groups.contains(n.name.as_str()) {
                let location = (!n.origin.ancestor_path.is_empty()).then(|| n.origin.ancestor_path.join("/"));
                n.description.clone().or(location)
            } else if navigational || cfg.key_types.contains(&n.control_type) {
                n.description.clone()
            } else {
                n.description.as_ref().map(|d| truncate(d, cfg.description_char_limit))
            }
        })
        .collect()
}

fn truncate(s: &str, limit: usize) -> String {
    match s.char_indices().nth(limit) {
        None => s.to_string(),
        Some((cut, _)) => {
            let mut t = s[..cut].to_string();
            t.push_str(TRUNCATION_MARKER);
            t
        }
    }
}

struct Limits<'a> {
    max_depth: Option<usize>,
    collapse_over: Option<usize>,
    exclude: Option<&'a BTreeSet<u32>>,
}

impl Limits<'_> {
    const NONE: Limits<'static> = Limits {
        max_depth: None,
        collapse_over: None,
        exclude: None,
    };

    fn excluded(&self, id: u32) -> bool {
        self.exclude.is_some_and(|e| e.contains(&id))
    }
}

struct Renderer<'a> {
    forest: &'a NavForest,
    descriptions: Vec<Option<String>>,
    rendered_refs: Vec<u32>,
}

impl<'a> Renderer<'a> {
    fn new(forest: &'a NavForest, cfg: &SerializationConfig) -> Self {
        Self {
            forest,
            descriptions: descriptions(forest, cfg),
            rendered_refs: Vec::new(),
        }
    }

    fn tree(&mut self, out: &mut String, id: u32, depth: usize, limits: &Limits<'_>) {
        let n = self.forest.node(id);
        escape_into(out, &n.name);
        out.push('(');
        out.push_str(n.control_type.as_str());
        out.push(')');
        if let Some(d) = &self.descriptions[id as usize] {
            out.push('(');
            escape_into(out, d);
            out.push(')');
        }
        let _ = write!(out, "_{id}");
        if n.kind == NodeKind::Reference {
            self.rendered_refs.push(id);
        }

        let mut kept: Vec<u32> = n.children.iter().copied().filter(|&c| !limits.excluded(c)).collect();
        let mut hidden = n.children.len() - kept.len();
        let too_deep = limits.max_depth.is_some_and(|m| depth >= m);
        let too_wide = limits.collapse_over.is_some_and(|t| kept.len() > t);
        if too_deep || too_wide {
            hidden = n.children.len();
            kept.clear();
        }
        if kept.is_empty() && hidden == 0 {
            return;
        }
        out.push('[');
        for (i, &c) in kept.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            self.tree(out, c, depth + 1, limits);
        }
        if hidden > 0 {
            if !kept.is_empty() {
                out.push(',');
            }
            let _ = write!(out, "<{hidden} more, further_query {id}>");
        }
        out.push(']');
    }

    fn entry_lines(&self, out: &mut String) {
        let mut refs = self.rendered_refs.clone();
        refs.sort_unstable();
        refs.dedup();
        for r in refs {
            if let Some(root) = self.forest.entry_map().get(&r) {
                let _ = writeln!(out, "ref {r} -> subtree {root}");
            }
        }
    }

    fn document(&mut self, limits: &Limits<'_>) -> String {
        let mut out = String::new();
        let main = self.forest.main_root();
        if !limits.excluded(main) {
            self.tree(&mut out, main, 0, limits);
        }
        out.push('\n');
        if !self.forest.shared_roots().is_empty() {
            out.push_str(SHARED_DIVIDER);
            out.push('\n');
            for &r in self.forest.shared_roots() {
                if limits.excluded(r) {
                    continue;
                }
                // a shared root stands for a clicked control, one level below the virtual root
                self.tree(&mut out, r, 1, limits);
                out.push('\n');
            }
            self.entry_lines(&mut out);
        }
        out
    }
}

/// Full text of the forest.
pub fn serialize(forest: &NavForest, cfg: &SerializationConfig) -> String {
    if forest.is_empty() {
        return String::new();
    }
    Renderer::new(forest, cfg).document(&Limits::NONE)
}

/// Depth-limited core view: nodes below `core_depth` are elided, sibling
/// groups larger than the collapse threshold become one placeholder, and
/// excluded ids are pruned.
pub fn extract_core(forest: &NavForest, cfg: &SerializationConfig) -> String {
    if forest.is_empty() {
        return String::new();
    }
    let limits = Limits {
        max_depth: Some(cfg.core_depth),
        collapse_over: Some(cfg.enumeration_collapse_threshold),
        exclude: Some(&cfg.exclusion_ids),
    };
    Renderer::new(forest, cfg).document(&limits)
}

/// Answers a `further_query`: `-1` anywhere yields the full text; otherwise
/// one line per requested node holding its full substructure, followed by the
/// entry-map lines for every reference shown.
pub fn expand_query(forest: &NavForest, node_ids: &[i64], cfg: &SerializationConfig) -> Result<String, TextError> {
    let ids = match QueryTarget::from_ids(node_ids)? {
        QueryTarget::All => return Ok(serialize(forest, cfg)),
        QueryTarget::Nodes(ids) => ids,
    };
    if let Some(&bad) = ids.iter().find(|&&i| forest.get(i).is_none()) {
        return Err(TextError::UnknownId { id: bad as i64 });
    }
    let mut seen = vec![false; forest.len()];
    let mut r = Renderer::new(forest, cfg);
    let mut out = String::new();
    for id in ids {
        if core::mem::replace(&mut seen[id as usize], true) {
            continue;
        }
        r.tree(&mut out, id, 0, &Limits::NONE);
        out.push('\n');
    }
    r.entry_lines(&mut out);
    Ok(out)
}
