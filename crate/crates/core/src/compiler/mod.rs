//! Navigation graph -> acyclic graph -> path-unambiguous forest.

mod decycle;
mod externalize;
mod resolve;
mod verify;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CompileError;
use crate::model::{validate_graph, NavForest, NavGraph};

pub use decycle::{back_edges, decycle, topological_order};
pub use externalize::{externalize, materialize, plan_externalization, ExternalizationPlan};
pub use resolve::{resolve_access, resolve_chain, route_into, NavPath, PathHop};
pub use verify::{access_specs, verify_forest, AccessSpec, VerificationReport};

pub const DEFAULT_THRESHOLD: u64 = 20;

/// Cloning-cost threshold; `Infinite` never externalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ThresholdRepr", into = "ThresholdRepr")]
pub enum Threshold {
    Finite(u64),
    Infinite,
}

impl Threshold {
    pub fn is_exceeded_by(self, cost: u64) -> bool {
        match self {
            Threshold::Finite(t) => cost > t,
            Threshold::Infinite => false,
        }
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::Finite(DEFAULT_THRESHOLD)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(t) => write!(f, "{t}"),
            Threshold::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Threshold::Infinite),
            _ => s
                .parse()
                .map(Threshold::Finite)
                .map_err(|_| alloc::format!("invalid threshold {s:?}")),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ThresholdRepr {
    Number(u64),
    Text(String),
}

impl TryFrom<ThresholdRepr> for Threshold {
    type Error = String;

    fn try_from(r: ThresholdRepr) -> Result<Self, Self::Error> {
        match r {
            ThresholdRepr::Number(n) => Ok(Threshold::Finite(n)),
            ThresholdRepr::Text(s) => s.parse(),
        }
    }
}

impl From<Threshold> for ThresholdRepr {
    fn from(t: Threshold) -> Self {
        match t {
            Threshold::Finite(n) => ThresholdRepr::Number(n),
            Threshold::Infinite => ThresholdRepr::Text("inf".into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompilerConfig {
    pub externalization_threshold: Threshold,
    /// Reserved; compilation is deterministic and does not consult it.
    #[serde(default)]
    pub deterministic_seed: u64,
}

impl CompilerConfig {
    pub fn with_threshold(threshold: Threshold) -> Self {
        Self {
            externalization_threshold: threshold,
            ..Self::default()
        }
    }
}

/// Output of the full compile pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Compiled {
    pub dag: NavGraph,
    /// Edges removed by decycling, in their original order.
    pub removed: Vec<crate::model::Edge>,
    pub forest: NavForest,
}

/// Decycles then externalizes. Nodes the source cannot reach are dropped
/// from the acyclic graph first; they would never appear in the forest.
pub fn compile(g: &NavGraph, cfg: &CompilerConfig) -> Result<Compiled, CompileError> {
    let back = back_edges(g);
    let dag = reachable_part(&decycle(g)?);
    let removed = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| back.contains(i))
        .map(|(_, e)| e.clone())
        .collect();
    let forest = externalize(&dag, cfg)?;
    Ok(Compiled { dag, removed, forest })
}

fn reachable_part(g: &NavGraph) -> NavGraph {
    let reachable = g.reachable();
    if reachable.iter().all(|&r| r) {
        return g.clone();
    }
    let nodes: Vec<_> = g
        .nodes()
        .iter()
        .zip(&reachable)
        .filter(|(_, &r)| r)
        .map(|(n, _)| n.clone())
        .collect();
    let keep = |id| g.index_of(id).is_some_and(|i| reachable[i]);
    let edges = g
        .edges()
        .iter()
        .filter(|e| keep(&e.src) && keep(&e.dst))
        .cloned()
        .collect();
    NavGraph::from_parts(g.source().clone(), nodes, edges)
}

fn require_valid(g: &NavGraph) -> Result<(), CompileError> {
    let report = validate_graph(g);
    let first = report.errors().next().map(|i| i.kind.clone());
    match first {
        None => Ok(()),
        Some(kind) => Err(CompileError::InvalidGraph(alloc::format!(
            "{} error(s), first: {kind:?}",
            report.errors().count()
        ))),
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use alloc::format;
    use alloc::vec;

    use crate::model::{ControlIdentifier, ControlNode, ControlType, Edge, NavGraph};

    /// Graph over nodes `n0..=nmax` with `n0` as the source.
    pub fn graph_from_edges(edges: &[(usize, usize)]) -> NavGraph {
        let max = edges.iter().flat_map(|&(a, b)| [a, b]).max().unwrap_or(0);
        let nodes: alloc::vec::Vec<ControlNode> = (0..=max)
            .map(|i| {
                let name = format!("n{i}");
                ControlNode::new(
                    ControlIdentifier::new(name.clone(), ControlType::Button, vec!["W".into()]),
                    name,
                )
            })
            .collect();
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
}
