use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::ResolveError;
use crate::model::{ControlIdentifier, ControlType, NavForest, NodeKind};

/// One control to click on the way to (or as) the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathHop {
    pub display_id: u32,
    pub identifier: ControlIdentifier,
    pub name: String,
}

impl PathHop {
    pub fn control_type(&self) -> ControlType {
        self.identifier.control_type
    }
}

/// The unique navigation path for one access spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NavPath {
    /// Forest node ids from the main root to the target, references included.
    pub forest_nodes: Vec<u32>,
    /// The reference chain that selected the path.
    pub entry_chain: Vec<u32>,
    /// Controls to click, virtual root excluded, each reference merged with
    /// the subtree root it enters.
    pub hops: Vec<PathHop>,
}

impl NavPath {
    pub fn target(&self) -> Option<&PathHop> {
        self.hops.last()
    }

    /// Origins along the path, virtual root included, reference/root pairs merged.
    pub fn origins<'a>(&self, forest: &'a NavForest) -> Vec<&'a ControlIdentifier> {
        collapse(forest, &self.forest_nodes)
            .into_iter()
            .map(|id| &forest.node(id).origin)
            .collect()
    }
}

/// Drops the subtree root that directly follows its reference.
fn collapse(forest: &NavForest, nodes: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(nodes.len());
    for &id in nodes {
        if let Some(&prev) = out.last() {
            if forest.node(prev).kind == NodeKind::Reference && forest.entry_map().get(&prev) == Some(&id) {
                continue;
            }
        }
        out.push(id);
    }
    out
}

fn check_id(forest: &NavForest, id: i64) -> Result<u32, ResolveError> {
    u32::try_from(id)
        .ok()
        .filter(|&i| forest.get(i).is_some())
        .ok_or(ResolveError::UnknownId { id })
}

/// Resolves `(target, refs)` to its unique root-to-target path.
///
/// `refs` may be the full reference chain, any suffix of it, or empty; it
/// must select exactly one entry chain into the target's tree. An
/// under-specified chain is reported as [`ResolveError::AmbiguousEntry`],
/// never guessed.
pub fn resolve_access(forest: &NavForest, target: i64, refs: &[i64]) -> Result<NavPath, ResolveError> {
    let chain = resolve_chain(forest, target, refs)?;
    Ok(build_path(forest, target as u32, chain))
}

/// The full entry chain selected by `(target, refs)`, without building the path.
pub fn resolve_chain(forest: &NavForest, target: i64, refs: &[i64]) -> Result<Vec<u32>, ResolveError> {
    let target = check_id(forest, target)?;
    let mut ref_ids = Vec::with_capacity(refs.len());
    for &r in refs {
        let r = check_id(forest, r)?;
        if forest.node(r).kind != NodeKind::Reference {
            return Err(ResolveError::RefMismatch {
                target,
                reason: format!("{r} is not a reference node"),
            });
        }
        ref_ids.push(r);
    }

    let tree = forest.tree_root_of(target);
    if tree == forest.main_root() && !ref_ids.is_empty() {
        return Err(ResolveError::RefMismatch {
            target,
            reason: "target is in the main tree".into(),
        });
    }
    if tree == forest.main_root() {
        return Ok(Vec::new());
    }
    let mut chains = ChainIndex::new(forest);
    let consistent = ref_ids
        .windows(2)
        .all(|w| forest.entry_map().get(&w[0]) == Some(&forest.tree_root_of(w[1])))
        && ref_ids.last().is_none_or(|r| forest.entry_map().get(r) == Some(&tree));
    let outer = ref_ids.first().map_or(tree, |&r| forest.tree_root_of(r));
    let chain = match if consistent { chains.count(outer) } else { 0 } {
        0 => {
            return Err(ResolveError::RefMismatch {
                target,
                reason: format!("no entry chain into subtree {tree} ends with {ref_ids:?}"),
            })
        }
        1 => {
            let mut chain = chains.unique(outer);
            chain.extend_from_slice(&ref_ids);
            chain
        }
        _ => {
            let candidates = forest
                .entry_chains(tree)
                .into_iter()
                .filter(|c| c.ends_with(&ref_ids))
                .collect();
            return Err(ResolveError::AmbiguousEntry { target, candidates });
        }
    };
    Ok(chain)
}

/// Entry-chain counts per tree, saturating at 2.
struct ChainIndex<'a> {
    forest: &'a NavForest,
    into: &'a BTreeMap<u32, Vec<u32>>,
    counts: BTreeMap<u32, u8>,
}

impl<'a> ChainIndex<'a> {
    fn new(forest: &'a NavForest) -> Self {
        Self {
            forest,
            into: forest.references_by_entry(),
            counts: BTreeMap::new(),
        }
    }

    fn count(&mut self, tree: u32) -> u8 {
        if tree == self.forest.main_root() {
            return 1;
        }
        if let Some(&c) = self.counts.get(&tree) {
            return c;
        }
        // placeholder guards against malformed, cyclic reference structure
        self.counts.insert(tree, 0);
        let into = self.into;
        let mut total = 0u8;
        for &r in into.get(&tree).map(Vec::as_slice).unwrap_or_default() {
            total = total.saturating_add(self.count(self.forest.tree_root_of(r))).min(2);
        }
        self.counts.insert(tree, total);
        total
    }

    /// The chain into `tree`, which must have a count of exactly one.
    fn unique(&mut self, tree: u32) -> Vec<u32> {
        let mut chain = Vec::new();
        let mut cur = tree;
        while cur != self.forest.main_root() {
            let into = self.into;
            let refs = into.get(&cur).map(Vec::as_slice).unwrap_or_default();
            let Some(&r) = refs.iter().find(|&&r| self.count(self.forest.tree_root_of(r)) > 0) else {
                break;
            };
            chain.push(r);
            cur = self.forest.tree_root_of(r);
        }
        chain.reverse();
        chain
    }
}

/// Writes the forest ids from the main root to `target` through `chain`
/// into `out`, each reference merged with the subtree root it enters.
pub fn route_into(forest: &NavForest, target: u32, chain: &[u32], out: &mut Vec<u32>) {
    out.clear();
    for &end in chain.iter().chain(core::iter::once(&target)) {
        let start = out.len();
        let mut cur = Some(end);
        while let Some(id) = cur {
            out.push(id);
            cur = forest.node(id).parent;
        }
        out[start..].reverse();
        if let Some(&prev) = start.checked_sub(1).map(|i| &out[i]) {
            if forest.node(prev).kind == NodeKind::Reference && forest.entry_map().get(&prev) == Some(&out[start]) {
                out.remove(start);
            }
        }
    }
}

/// Forest ids from the main root to `target` through `chain`.
fn path_nodes(forest: &NavForest, target: u32, chain: &[u32]) -> Vec<u32> {
    let mut nodes = Vec::with_capacity(16);
    for &end in chain.iter().chain(core::iter::once(&target)) {
        let start = nodes.len();
        let mut cur = Some(end);
        while let Some(id) = cur {
            nodes.push(id);
            cur = forest.node(id).parent;
        }
        nodes[start..].reverse();
    }
    nodes
}

pub(crate) fn build_path(forest: &NavForest, target: u32, chain: Vec<u32>) -> NavPath {
    let nodes = path_nodes(forest, target, &chain);
    let hops = collapse(forest, &nodes)
        .into_iter()
        .filter(|&id| id != forest.main_root())
        .map(|id| {
            let n = forest.node(id);
            PathHop {
                display_id: id,
                identifier: n.origin.clone(),
                name: n.name.clone(),
            }
        })
        .collect();
    NavPath {
        forest_nodes: nodes,
        entry_chain: chain,
        hops,
    }
}
