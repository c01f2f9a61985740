use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ControlIdentifier, NavGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// Tolerated; compilation proceeds.
    Warning,
    /// Breaks compilation.
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IssueKind {
    MissingSource {
        source: ControlIdentifier,
    },
    SourceHasIncoming {
        source: ControlIdentifier,
    },
    DanglingEdge {
        src: ControlIdentifier,
        dst: ControlIdentifier,
    },
    /// A node other than the designated source has no incoming edges.
    ExtraSource {
        node: ControlIdentifier,
    },
    Unreachable {
        node: ControlIdentifier,
    },
    DuplicateNode {
        node: ControlIdentifier,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub severity: Severity,
    #[serde(flatten)]
    pub kind: IssueKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    pub fn errors(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &ValidationIssue> {
        self.issues.iter().filter(|i| i.severity == Severity::Warning)
    }

    fn push(&mut self, severity: Severity, kind: IssueKind) {
        self.issues.push(ValidationIssue { severity, kind });
    }
}

/// Checks the structural invariants of a navigation graph. Never modifies it.
pub fn validate_graph(g: &NavGraph) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut seen = BTreeSet::new();
    for n in g.nodes() {
        if !seen.insert(&n.identifier) {
            report.push(
                Severity::Warning,
                IssueKind::DuplicateNode {
                    node: n.identifier.clone(),
                },
            );
        }
    }

    let Some(src) = g.source_index() else {
        report.push(
            Severity::Error,
            IssueKind::MissingSource {
                source: g.source().clone(),
            },
        );
        return report;
    };

    let mut in_degree = vec![0usize; g.len()];
    for e in g.edges() {
        match (g.index_of(&e.src), g.index_of(&e.dst)) {
            (Some(_), Some(d)) => in_degree[d] += 1,
            _ => report.push(
                Severity::Error,
                IssueKind::DanglingEdge {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                },
            ),
        }
    }
    if in_degree[src] > 0 {
        report.push(
            Severity::Error,
            IssueKind::SourceHasIncoming {
                source: g.source().clone(),
            },
        );
    }

    let reachable = g.reachable();
    for (i, n) in g.nodes().iter().enumerate() {
        // duplicates share the first occurrence's index
        if g.index_of(&n.identifier) != Some(i) || i == src {
            continue;
        }
        if in_degree[i] == 0 {
            report.push(
                Severity::Error,
                IssueKind::ExtraSource {
                    node: n.identifier.clone(),
                },
            );
        } else if !reachable[i] {
            report.push(
                Severity::Warning,
                IssueKind::Unreachable {
                    node: n.identifier.clone(),
                },
            );
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ControlNode, ControlType};
    use alloc::string::ToString;

    fn id(name: &str) -> ControlIdentifier {
        ControlIdentifier::new(name, ControlType::Button, vec!["W".to_string()])
    }

    #[test]
    fn root_only_graph_is_clean() {
        let g = NavGraph::with_virtual_root();
        let r = validate_graph(&g);
        assert!(r.is_valid());
        assert!(r.issues.is_empty());
    }

    #[test]
    fn dangling_edge_is_one_error() {
        let mut g = NavGraph::with_virtual_root();
        let root = g.source().clone();
        g.add_edge(&root, &id("Ghost"));
        let r = validate_graph(&g);
        assert_eq!(r.errors().count(), 1);
        assert!(matches!(r.issues[0].kind, IssueKind::DanglingEdge { .. }));
    }

    #[test]
    fn detached_nodes() {
        let mut g = NavGraph::with_virtual_root();
        g.add_node(ControlNode::new(id("Lonely"), "Lonely"));
        g.add_node(ControlNode::new(id("X"), "X"));
        g.add_node(ControlNode::new(id("Y"), "Y"));
        // X <-> Y cycle hanging off nothing
        g.add_edge(&id("X"), &id("Y"));
        g.add_edge(&id("Y"), &id("X"));
        let r = validate_graph(&g);
        assert_eq!(r.errors().count(), 1);
        assert_eq!(r.warnings().count(), 2);
    }

    #[test]
    fn duplicates_are_warnings() {
        let root = NavGraph::virtual_root_node();
        let a = ControlNode::new(id("A"), "A");
        let g = NavGraph::from_parts(
            root.identifier.clone(),
            vec![root.clone(), a.clone(), a.clone()],
            vec![crate::model::Edge {
                src: root.identifier.clone(),
                dst: a.identifier.clone(),
                action: Default::default(),
            }],
        );
        let r = validate_graph(&g);
        assert!(r.is_valid());
        assert_eq!(r.warnings().count(), 1);
    }
}
