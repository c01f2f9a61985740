//! Builds a navigation graph from a live backend by differential capture.
//!
//! Each candidate control is clicked from a reproducible state and the
//! accessibility tree is captured before and after; every control that
//! appears becomes a child of the clicked one. Exploration is depth-first in
//! document order. Controls revealed again from elsewhere get an edge but are
//! not explored twice.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{AccTreeSnapshot, UiAction, UiBackend};
use crate::error::{BackendError, RipError};
use crate::model::{ControlIdentifier, ControlNode, ControlType, NavGraph};

/// Controls the ripper must never activate.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Blocklist {
    /// Canonical identifiers, primary ids or names.
    pub controls: BTreeSet<String>,
    pub control_types: BTreeSet<ControlType>,
}

impl Blocklist {
    pub fn blocks(&self, node: &ControlNode) -> bool {
        self.control_types.contains(&node.control_type)
            || self.controls.contains(&node.identifier.canonical())
            || self.controls.contains(&node.identifier.primary_id)
            || self.controls.contains(&node.name)
    }
}

/// A context to explore separately; `setup` names the backend context to
/// enter, none meaning the application's initial state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextSpec {
    pub name: String,
    #[serde(default)]
    pub setup: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RipperConfig {
    pub blocklist: Blocklist,
    pub contexts: Vec<ContextSpec>,
    pub max_depth: usize,
    pub max_actions: usize,
    /// Ticks to wait after each click before capturing.
    pub settle_ticks: u64,
}

impl Default for RipperConfig {
    fn default() -> Self {
        Self {
            blocklist: Blocklist::default(),
            contexts: Vec::new(),
            max_depth: 12,
            max_actions: 10_000,
            settle_ticks: 3,
        }
    }
}

impl RipperConfig {
    pub fn validate(&self) -> Result<(), RipError> {
        if self.max_depth == 0 {
            return Err(RipError::InvalidConfig("max_depth must be at least 1".into()));
        }
        if self.max_actions == 0 {
            return Err(RipError::InvalidConfig("max_actions must be at least 1".into()));
        }
        let mut names = BTreeSet::new();
        for c in &self.contexts {
            if !names.insert(c.name.as_str()) {
                return Err(RipError::InvalidConfig(format!("duplicate context {:?}", c.name)));
            }
        }
        Ok(())
    }
}

/// What changed between two captures.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureDiff {
    /// Newly visible controls in document order, windows excluded.
    pub revealed: Vec<ControlNode>,
    pub new_windows: Vec<String>,
    pub removed: Vec<ControlIdentifier>,
}

pub fn capture_diff(before: &AccTreeSnapshot, after: &AccTreeSnapshot) -> CaptureDiff {
    let had = before.identifiers();
    let has = after.identifiers();
    let mut seen = BTreeSet::new();
    let revealed = after
        .controls
        .iter()
        .filter(|c| c.node.control_type != ControlType::Window)
        .filter(|c| !had.contains(&c.node.identifier) && seen.insert(&c.node.identifier))
        .map(|c| c.node.clone())
        .collect();
    let new_windows = after
        .windows
        .iter()
        .filter(|w| before.window(&w.id).is_none())
        .map(|w| w.id.clone())
        .collect();
    let mut gone = BTreeSet::new();
    let removed = before
        .controls
        .iter()
        .filter(|c| !has.contains(&c.node.identifier) && gone.insert(&c.node.identifier))
        .map(|c| c.node.identifier.clone())
        .collect();
    CaptureDiff {
        revealed,
        new_windows,
        removed,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RipWarningKind {
    BudgetExhausted,
    DuplicateIdentifier,
    ActivationFailed,
    StateNotRestored,
    MetadataConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RipWarning {
    pub kind: RipWarningKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RipOutcome {
    pub graph: NavGraph,
    pub warnings: Vec<RipWarning>,
    /// Backend actions spent, replays and probes included.
    pub actions: usize,
    /// False when the action budget ran out first.
    pub complete: bool,
}

/// The state reached after a click sequence, identified by what is visible.
#[derive(Clone)]
struct Checkpoint {
    path: Vec<ControlIdentifier>,
    visible: BTreeSet<ControlIdentifier>,
}

struct Ripper<'a, B: UiBackend> {
    backend: &'a mut B,
    cfg: &'a RipperConfig,
    setup: Option<String>,
    graph: NavGraph,
    warnings: Vec<RipWarning>,
    actions: usize,
    exhausted: bool,
}

impl<'a, B: UiBackend> Ripper<'a, B> {
    fn warn(&mut self, kind: RipWarningKind, message: String) {
        self.warnings.push(RipWarning { kind, message });
    }

    fn snapshot(&mut self) -> Result<AccTreeSnapshot, RipError> {
        self.backend.snapshot().map_err(RipError::BackendUnavailable)
    }

    fn spend(&mut self) -> bool {
        if self.actions >= self.cfg.max_actions {
            if !self.exhausted {
                self.exhausted = true;
                let m = format!("stopped after {} actions; graph is partial", self.actions);
                self.warn(RipWarningKind::BudgetExhausted, m);
            }
            return false;
        }
        self.actions += 1;
        true
    }

    fn restart(&mut self) -> Result<(), RipError> {
        self.backend.reset().map_err(RipError::BackendUnavailable)?;
        if let Some(ctx) = self.setup.clone() {
            self.backend.enter_context(&ctx).map_err(RipError::BackendUnavailable)?;
            self.backend.wait(self.cfg.settle_ticks);
        }
        Ok(())
    }

    fn click(&mut self, snap: &AccTreeSnapshot, id: &ControlIdentifier) -> Result<bool, BackendError> {
        let Some(c) = snap.find(id) else { return Ok(false) };
        let handle = c.handle;
        if !self.spend() {
            return Ok(false);
        }
        self.backend.perform(&UiAction::Click { handle })?;
        self.backend.wait(self.cfg.settle_ticks);
        Ok(true)
    }

    fn note_duplicates(&mut self, snap: &AccTreeSnapshot) {
        let mut seen = BTreeSet::new();
        let dups: Vec<String> = snap
            .controls
            .iter()
            .filter(|c| !seen.insert(&c.node.identifier))
            .map(|c| c.node.identifier.canonical())
            .collect();
        for d in dups {
            if !self
                .warnings
                .iter()
                .any(|w| w.kind == RipWarningKind::DuplicateIdentifier && w.message.contains(&d))
            {
                self.warn(
                    RipWarningKind::DuplicateIdentifier,
                    format!("{d} names several controls; the first is kept"),
                );
            }
        }
    }

    /// Brings the backend to `cp`: close extra windows if that suffices,
    /// otherwise restart and replay the click path.
    fn restore(&mut self, cp: &Checkpoint) -> Result<bool, RipError> {
        let snap = self.snapshot()?;
        if snap.identifiers().into_iter().cloned().collect::<BTreeSet<_>>() == cp.visible {
            return Ok(true);
        }
        let extra: Vec<String> = snap
            .windows
            .iter()
            .rev()
            .filter(|w| {
                w.closable
                    && !cp
                        .visible
                        .iter()
                        .any(|id| id.control_type == ControlType::Window && id.primary_id == w.id)
            })
            .map(|w| w.id.clone())
            .collect();
        if !extra.is_empty() {
            for w in extra {
                if !self.spend() {
                    return Ok(false);
                }
                if self.backend.perform(&UiAction::CloseWindow { window: w }).is_err() {
                    break;
                }
            }
            let snap = self.snapshot()?;
            if snap.identifiers().into_iter().cloned().collect::<BTreeSet<_>>() == cp.visible {
                return Ok(true);
            }
        }
        self.restart()?;
        for id in &cp.path {
            let snap = self.snapshot()?;
            match self.click(&snap, id) {
                Ok(true) => {}
                Ok(false) if self.exhausted => return Ok(false),
                _ => {
                    self.warn(
                        RipWarningKind::StateNotRestored,
                        format!("could not replay {}", id.canonical()),
                    );
                    return Ok(false);
                }
            }
        }
        let snap = self.snapshot()?;
        if snap.identifiers().into_iter().cloned().collect::<BTreeSet<_>>() != cp.visible {
            let path: Vec<String> = cp.path.iter().map(|i| i.canonical()).collect();
            self.warn(
                RipWarningKind::StateNotRestored,
                format!("replaying {path:?} reached a different screen"),
            );
        }
        Ok(true)
    }

    fn explore(
        &mut self,
        at: &Checkpoint,
        children: Vec<(ControlIdentifier, Vec<ControlIdentifier>)>,
    ) -> Result<(), RipError> {
        let parent = at.path.last().cloned().unwrap_or_else(|| self.graph.source().clone());
        for (child, attached) in children {
            if self.exhausted {
                return Ok(());
            }
            let Some(node) = self.graph.get(&child) else { continue };
            if self.cfg.blocklist.blocks(node) || at.path.len() + 1 > self.cfg.max_depth {
                continue;
            }
            if !self.restore(at)? {
                if self.exhausted {
                    return Ok(());
                }
                continue;
            }
            let before = self.snapshot()?;
            match self.click(&before, &child) {
                Ok(true) => {}
                Ok(false) if self.exhausted => return Ok(()),
                Ok(false) => {
                    let m = format!("{} not visible under {}", child.canonical(), parent.canonical());
                    self.warn(RipWarningKind::ActivationFailed, m);
                    continue;
                }
                Err(e) => {
                    self.warn(RipWarningKind::ActivationFailed, format!("{}: {e}", child.canonical()));
                    continue;
                }
            }
            let after = self.snapshot()?;
            self.note_duplicates(&after);
            let diff = capture_diff(&before, &after);
            let mut next: Vec<(ControlIdentifier, Vec<ControlIdentifier>)> =
                attached.into_iter().map(|a| (a, Vec::new())).collect();
            for n in diff.revealed {
                let id = n.identifier.clone();
                if &id == self.graph.source() || id == child {
                    continue;
                }
                let (_, inserted) = self.graph.add_node(n);
                self.graph.add_edge(&child, &id);
                if inserted {
                    next.push((id, Vec::new()));
                }
            }
            if next.is_empty() {
                continue;
            }
            let mut path = at.path.clone();
            path.push(child);
            let cp = Checkpoint {
                path,
                visible: after.identifiers().into_iter().cloned().collect(),
            };
            self.explore(&cp, next)?;
        }
        Ok(())
    }

    fn run(mut self) -> Result<RipOutcome, RipError> {
        self.restart()?;
        let snap = self.snapshot()?;
        self.note_duplicates(&snap);
        let initial: Vec<ControlNode> = {
            let mut seen = BTreeSet::new();
            snap.controls
                .iter()
                .filter(|c| c.node.control_type != ControlType::Window && seen.insert(c.node.identifier.clone()))
                .map(|c| c.node.clone())
                .collect()
        };
        let scoped = self.active_tab_scope(&snap, &initial)?;
        let root = self.graph.source().clone();
        let mut roots: Vec<(ControlIdentifier, Vec<ControlIdentifier>)> = Vec::new();
        for n in &initial {
            self.graph.add_node(n.clone());
        }
        for n in &initial {
            let id = &n.identifier;
            match &scoped {
                Some((tab, members)) if members.contains(id) => {
                    self.graph.add_edge(tab, id);
                }
                _ => {
                    self.graph.add_edge(&root, id);
                    let attached = match &scoped {
                        Some((tab, members)) if tab == id => initial
                            .iter()
                            .map(|m| m.identifier.clone())
                            .filter(|m| members.contains(m))
                            .collect(),
                        _ => Vec::new(),
                    };
                    roots.push((id.clone(), attached));
                }
            }
        }
        if !self.exhausted {
            let cp = Checkpoint {
                path: Vec::new(),
                visible: snap.identifiers().into_iter().cloned().collect(),
            };
            self.explore(&cp, roots)?;
        }
        Ok(RipOutcome {
            graph: self.graph,
            warnings: self.warnings,
            actions: self.actions,
            complete: !self.exhausted,
        })
    }

    /// With several tabs and one selected, the initial controls that vanish
    /// when another tab is selected belong to the selected tab.
    fn active_tab_scope(
        &mut self,
        snap: &AccTreeSnapshot,
        initial: &[ControlNode],
    ) -> Result<Option<(ControlIdentifier, BTreeSet<ControlIdentifier>)>, RipError> {
        let tabs: Vec<_> = snap
            .controls
            .iter()
            .filter(|c| c.node.control_type == ControlType::TabItem)
            .collect();
        if tabs.len() < 2 {
            return Ok(None);
        }
        let Some(active) = tabs.iter().find(|c| c.selected) else {
            return Ok(None);
        };
        let active_id = active.node.identifier.clone();
        let Some(probe) = tabs.iter().find(|c| !c.selected && !self.cfg.blocklist.blocks(&c.node)) else {
            return Ok(None);
        };
        let probe_id = probe.node.identifier.clone();
        match self.click(snap, &probe_id) {
            Ok(true) => {}
            _ => return Ok(None),
        }
        let after = self.snapshot()?;
        let still: BTreeSet<&ControlIdentifier> = after.identifiers();
        let members: BTreeSet<ControlIdentifier> = initial
            .iter()
            .filter(|n| n.control_type != ControlType::TabItem && !still.contains(&n.identifier))
            .map(|n| n.identifier.clone())
            .collect();
        self.restart()?;
        Ok((!members.is_empty()).then_some((active_id, members)))
    }
}

/// Rips the application from its initial state.
pub fn rip<B: UiBackend>(backend: &mut B, cfg: &RipperConfig) -> Result<RipOutcome, RipError> {
    cfg.validate()?;
    rip_in_context(backend, cfg, None)
}

fn rip_in_context<B: UiBackend>(
    backend: &mut B,
    cfg: &RipperConfig,
    setup: Option<String>,
) -> Result<RipOutcome, RipError> {
    let ripper = Ripper {
        backend,
        cfg,
        setup,
        graph: NavGraph::with_virtual_root(),
        warnings: Vec::new(),
        actions: 0,
        exhausted: false,
    };
    ripper.run()
}

/// Rips once per configured context and merges the graphs by identifier.
/// Each node's `context_tags` names the contexts that exposed it.
pub fn rip_with_contexts<B: UiBackend>(backend: &mut B, cfg: &RipperConfig) -> Result<RipOutcome, RipError> {
    cfg.validate()?;
    if cfg.contexts.is_empty() {
        return Err(RipError::InvalidConfig("no contexts configured".into()));
    }
    let mut merged = NavGraph::with_virtual_root();
    let mut warnings = Vec::new();
    let mut actions = 0;
    let mut complete = true;
    for ctx in &cfg.contexts {
        let out = rip_in_context(backend, cfg, ctx.setup.clone())?;
        warnings.extend(out.warnings);
        actions += out.actions;
        complete &= out.complete;
        let source = out.graph.source().clone();
        for n in out.graph.nodes() {
            if n.identifier == source {
                continue;
            }
            let mut tagged = n.clone();
            tagged.context_tags.insert(ctx.name.clone());
            match merged.index_of(&n.identifier) {
                None => {
                    merged.add_node(tagged);
                }
                Some(i) => {
                    let existing = merged.node_mut(i);
                    let conflict = existing.patterns != n.patterns
                        || existing.description != n.description
                        || existing.enabled != n.enabled
                        || existing.name != n.name;
                    existing.patterns.extend(n.patterns.iter().copied());
                    existing.context_tags.insert(ctx.name.clone());
                    if conflict {
                        warnings.push(RipWarning {
                            kind: RipWarningKind::MetadataConflict,
                            message: format!(
                                "{} differs in context {:?}; patterns merged",
                                n.identifier.canonical(),
                                ctx.name
                            ),
                        });
                    }
                }
            }
        }
        let root = merged.source().clone();
        for e in out.graph.edges() {
            let src = if e.src == source { &root } else { &e.src };
            merged.add_edge(src, &e.dst);
        }
    }
    Ok(RipOutcome {
        graph: merged,
        warnings,
        actions,
        complete,
    })
}
