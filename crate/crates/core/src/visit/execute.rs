use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{AccTreeSnapshot, SnapshotControl, UiAction, UiBackend};
use crate::compiler::{resolve_access, NavPath, PathHop};
use crate::error::{Candidate, VisitError};
use crate::model::{ControlNode, ControlType, NavForest};
use crate::text::{expand_query, SerializationConfig};

use super::command::{filter_commands, DropReason, VisitCommand};
use super::fuzzy::{rank_candidates, MatchPolicy};

/// Buttons tried, in order, to dismiss a window that holds none of the path.
pub const CLOSE_BUTTONS: [&str; 3] = ["OK", "Close", "Cancel"];

const MAX_CLOSES: usize = 8;
const NEAREST_SHOWN: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionRole {
    /// Click on a path control before the target.
    Navigation,
    /// Click or window close that dismissed an unrelated window.
    Close,
    /// The click on the target itself.
    Activation,
    Input,
    Shortcut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionRecord {
    pub role: ActionRole,
    /// Canonical identifier, window id or key combination.
    pub target: String,
}

/// Everything a navigation or command did to the backend.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub actions: Vec<ActionRecord>,
    pub retries: usize,
    pub fetches: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NavOutcome {
    pub trace: Trace,
    /// The located target, ready for interaction.
    pub result: Result<SnapshotControl, VisitError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Executed,
    FilteredOut { reason: DropReason },
    Failed { error: VisitError },
    NotAttempted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandReport {
    pub index: usize,
    pub command: VisitCommand,
    pub outcome: Outcome,
    #[serde(flatten)]
    pub trace: Trace,
}

/// Screen state after execution, by reference rather than in full.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenRef {
    pub tick: u64,
    pub windows: Vec<String>,
    pub visible_controls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub commands: Vec<CommandReport>,
    pub clicks: usize,
    pub inputs: usize,
    pub closes: usize,
    pub shortcuts: usize,
    pub retries: usize,
    pub fetches: usize,
    /// Topology text answering a further_query array.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub further_query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_screen: Option<ScreenRef>,
}

impl ExecutionReport {
    /// Clicks, text inputs and window closes.
    pub fn backend_actions(&self) -> usize {
        self.clicks + self.inputs + self.closes
    }

    pub fn succeeded(&self) -> bool {
        self.commands
            .iter()
            .all(|c| matches!(c.outcome, Outcome::Executed | Outcome::FilteredOut { .. }))
    }

    /// Activation clicks in order, one per executed access command.
    pub fn activations(&self) -> Vec<&str> {
        self.commands
            .iter()
            .flat_map(|c| c.trace.actions.iter())
            .filter(|a| a.role == ActionRole::Activation)
            .map(|a| a.target.as_str())
            .collect()
    }
}

struct Navigator<'a, B: UiBackend> {
    backend: &'a mut B,
    policy: &'a MatchPolicy,
    trace: Trace,
}

fn window_order(snap: &AccTreeSnapshot) -> Vec<&SnapshotControl> {
    let mut out = Vec::with_capacity(snap.controls.len());
    for w in snap.windows.iter().rev() {
        out.extend(
            snap.in_window(&w.id)
                .filter(|c| c.node.control_type != ControlType::Window),
        );
    }
    out
}

fn disabled(c: &SnapshotControl) -> VisitError {
    VisitError::DisabledControl {
        identifier: c.node.identifier.canonical(),
        name: c.node.name.clone(),
        enabled: false,
        state: format!("enabled=false, visible=true, window={}", c.window),
    }
}

impl<B: UiBackend> Navigator<'_, B> {
    fn fetch(&mut self) -> Result<AccTreeSnapshot, VisitError> {
        self.trace.fetches += 1;
        Ok(self.backend.snapshot()?)
    }

    fn note_fuzzy(&mut self, hop: &PathHop, got: &SnapshotControl) {
        self.trace.notes.push(format!(
            "{} matched fuzzily to {}",
            hop.identifier.canonical(),
            got.node.identifier.canonical()
        ));
    }

    /// Exact then fuzzy search for one hop among `pool`.
    fn find<'s>(&mut self, hop: &PathHop, pool: &[&'s SnapshotControl]) -> Option<&'s SnapshotControl> {
        if let Some(c) = pool.iter().find(|c| c.node.identifier == hop.identifier) {
            return Some(c);
        }
        let nodes: Vec<ControlNode> = pool.iter().map(|c| c.node.clone()).collect();
        let best = rank_candidates(&hop.identifier, &nodes, self.policy).into_iter().next();
        let (i, _) = best.filter(|(_, s)| *s >= self.policy.name_similarity_threshold)?;
        self.note_fuzzy(hop, pool[i]);
        Some(pool[i])
    }

    fn nearest(&self, hop: &PathHop, snap: &AccTreeSnapshot) -> Vec<Candidate> {
        let pool = window_order(snap);
        let nodes: Vec<ControlNode> = pool.iter().map(|c| c.node.clone()).collect();
        rank_candidates(&hop.identifier, &nodes, self.policy)
            .into_iter()
            .take(NEAREST_SHOWN)
            .map(|(i, score)| Candidate {
                identifier: nodes[i].identifier.canonical(),
                name: nodes[i].name.clone(),
                score,
            })
            .collect()
    }

    fn click(&mut self, c: &SnapshotControl, role: ActionRole) -> Result<(), VisitError> {
        if !c.node.enabled {
            return Err(disabled(c));
        }
        self.backend.perform(&UiAction::Click { handle: c.handle })?;
        self.trace.actions.push(ActionRecord {
            role,
            target: c.node.identifier.canonical(),
        });
        Ok(())
    }

    fn close(&mut self, snap: &AccTreeSnapshot, window: &str) -> Result<(), VisitError> {
        let buttons: Vec<&SnapshotControl> = snap
            .in_window(window)
            .filter(|c| c.node.control_type == ControlType::Button && c.node.enabled)
            .collect();
        for label in CLOSE_BUTTONS {
            if let Some(b) = buttons.iter().find(|b| b.node.name.trim().eq_ignore_ascii_case(label)) {
                return self.click(b, ActionRole::Close);
            }
        }
        if snap.window(window).is_some_and(|w| w.closable) {
            self.backend
                .perform(&UiAction::CloseWindow {
                    window: window.to_string(),
                })
                .map_err(|e| VisitError::WindowCloseFailed {
                    window: window.to_string(),
                    reason: format!("{e}"),
                })?;
            self.trace.actions.push(ActionRecord {
                role: ActionRole::Close,
                target: window.to_string(),
            });
            return Ok(());
        }
        Err(VisitError::WindowCloseFailed {
            window: window.to_string(),
            reason: "no OK, Close or Cancel button and no close affordance".into(),
        })
    }

    /// Deepest hop visible in the topmost window, closing windows that hold
    /// none of the path.
    fn locate(&mut self, hops: &[PathHop]) -> Result<(usize, SnapshotControl, AccTreeSnapshot), VisitError> {
        let mut closes = 0;
        let mut retries = 0;
        loop {
            let snap = self.fetch()?;
            let Some(top) = snap.topmost_window().cloned() else {
                return Err(VisitError::Backend {
                    message: "no open window".into(),
                });
            };
            let pool: Vec<&SnapshotControl> = snap
                .in_window(&top.id)
                .filter(|c| c.node.control_type != ControlType::Window)
                .collect();
            let exact = (0..hops.len()).rev().find_map(|k| {
                pool.iter()
                    .find(|c| c.node.identifier == hops[k].identifier)
                    .map(|c| (k, (*c).clone()))
            });
            let found = exact.or_else(|| {
                (0..hops.len()).rev().find_map(|k| {
                    let nodes: Vec<ControlNode> = pool.iter().map(|c| c.node.clone()).collect();
                    let (i, _) = rank_candidates(&hops[k].identifier, &nodes, self.policy)
                        .into_iter()
                        .next()
                        .filter(|(_, s)| *s >= self.policy.name_similarity_threshold)?;
                    Some((k, pool[i].clone()))
                })
            });
            if let Some((k, c)) = found {
                if c.node.identifier != hops[k].identifier {
                    self.note_fuzzy(&hops[k], &c);
                }
                let elsewhere = snap.windows.iter().filter(|w| w.id != top.id).any(|w| {
                    snap.in_window(&w.id)
                        .any(|o| hops.iter().any(|h| h.identifier == o.node.identifier))
                });
                if elsewhere {
                    self.trace.notes.push(format!(
                        "path controls also visible outside topmost window {:?}",
                        top.id
                    ));
                }
                return Ok((k, c, snap));
            }
            if !top.main {
                if closes == MAX_CLOSES {
                    return Err(VisitError::WindowCloseFailed {
                        window: top.id.clone(),
                        reason: format!("still open after {MAX_CLOSES} close attempts"),
                    });
                }
                closes += 1;
                self.close(&snap, &top.id)?;
                continue;
            }
            if retries == self.policy.max_retries {
                return Err(VisitError::ControlNotFound {
                    expected: hops[0].identifier.canonical(),
                    hop: 0,
                    retries,
                    nearest: self.nearest(&hops[0], &snap),
                });
            }
            retries += 1;
            self.trace.retries += 1;
            self.backend.wait(1);
        }
    }

    fn navigate(&mut self, path: &NavPath) -> Result<SnapshotControl, VisitError> {
        let hops = &path.hops;
        if hops.is_empty() {
            return Err(VisitError::Backend {
                message: "empty navigation path".into(),
            });
        }
        let (mut k, mut current, _) = self.locate(hops)?;
        while k + 1 < hops.len() {
            self.click(&current, ActionRole::Navigation)?;
            let next = &hops[k + 1];
            let mut retries = 0;
            current = loop {
                let snap = self.fetch()?;
                let pool = window_order(&snap);
                if let Some(c) = self.find(next, &pool) {
                    break c.clone();
                }
                if retries == self.policy.max_retries {
                    return Err(VisitError::ControlNotFound {
                        expected: next.identifier.canonical(),
                        hop: k + 1,
                        retries,
                        nearest: self.nearest(next, &snap),
                    });
                }
                retries += 1;
                self.trace.retries += 1;
                self.backend.wait(1);
            };
            k += 1;
        }
        Ok(current)
    }
}

/// Walks the UI to the path's target from whatever state it is in.
///
/// The topmost window is searched for the deepest visible path control,
/// exact identifiers first, fuzzy matches second. A non-main window holding
/// none of the path is dismissed (OK, then Close, then Cancel, then the
/// window's own close affordance). From the located control the path is
/// clicked forward; a control that has not appeared is re-fetched after a
/// one-tick wait, at most `max_retries` times.
pub fn navigate_path<B: UiBackend>(path: &NavPath, backend: &mut B, policy: &MatchPolicy) -> NavOutcome {
    let mut nav = Navigator {
        backend,
        policy,
        trace: Trace::default(),
    };
    let result = nav.navigate(path);
    NavOutcome {
        trace: nav.trace,
        result,
    }
}

fn run_access<B: UiBackend>(
    forest: &NavForest,
    backend: &mut B,
    policy: &MatchPolicy,
    id: i64,
    refs: &[i64],
    text: Option<&str>,
) -> (Trace, Result<(), VisitError>) {
    let path = match resolve_access(forest, id, refs) {
        Ok(p) => p,
        Err(e) => return (Trace::default(), Err(e.into())),
    };
    let mut nav = Navigator {
        backend,
        policy,
        trace: Trace::default(),
    };
    let result = nav.navigate(&path).and_then(|target| {
        nav.click(&target, ActionRole::Activation)?;
        if let Some(t) = text {
            nav.backend.perform(&UiAction::Input {
                handle: target.handle,
                text: t.to_string(),
            })?;
            nav.trace.actions.push(ActionRecord {
                role: ActionRole::Input,
                target: target.node.identifier.canonical(),
            });
        }
        Ok(())
    });
    (nav.trace, result)
}

/// Filters, resolves and executes a command array, stopping at the first
/// failure.
pub fn execute_visit<B: UiBackend>(
    cmds: &[VisitCommand],
    forest: &NavForest,
    backend: &mut B,
    policy: &MatchPolicy,
) -> ExecutionReport {
    execute_visit_with(cmds, forest, backend, policy, &SerializationConfig::default())
}

/// [`execute_visit`] with an explicit configuration for further_query text.
pub fn execute_visit_with<B: UiBackend>(
    cmds: &[VisitCommand],
    forest: &NavForest,
    backend: &mut B,
    policy: &MatchPolicy,
    text_cfg: &SerializationConfig,
) -> ExecutionReport {
    let mut report = ExecutionReport {
        commands: Vec::with_capacity(cmds.len()),
        clicks: 0,
        inputs: 0,
        closes: 0,
        shortcuts: 0,
        retries: 0,
        fetches: 0,
        further_query: None,
        final_screen: None,
    };
    if let [VisitCommand::FurtherQuery { further_query }] = cmds {
        let outcome = match expand_query(forest, further_query, text_cfg) {
            Ok(text) => {
                report.further_query = Some(text);
                Outcome::Executed
            }
            Err(e) => Outcome::Failed {
                error: VisitError::Query {
                    message: format!("{e}"),
                },
            },
        };
        report.commands.push(CommandReport {
            index: 0,
            command: cmds[0].clone(),
            outcome,
            trace: Trace::default(),
        });
        return report;
    }

    let filtered = filter_commands(cmds, forest);
    let mut failed = false;
    for (index, cmd) in cmds.iter().enumerate() {
        if let Some((_, reason)) = filtered.dropped.iter().find(|(i, _)| *i == index) {
            let outcome = Outcome::FilteredOut { reason: reason.clone() };
            report.commands.push(CommandReport {
                index,
                command: cmd.clone(),
                outcome,
                trace: Trace::default(),
            });
            continue;
        }
        if failed {
            report.commands.push(CommandReport {
                index,
                command: cmd.clone(),
                outcome: Outcome::NotAttempted,
                trace: Trace::default(),
            });
            continue;
        }
        let (trace, result) = match cmd {
            VisitCommand::Access { id, entry_ref_id } => run_access(forest, backend, policy, *id, entry_ref_id, None),
            VisitCommand::AccessInput { id, entry_ref_id, text } => {
                run_access(forest, backend, policy, *id, entry_ref_id, Some(text))
            }
            VisitCommand::Shortcut { key_combination } => {
                let r = backend.perform(&UiAction::Shortcut {
                    keys: key_combination.clone(),
                });
                let mut t = Trace::default();
                if r.is_ok() {
                    t.actions.push(ActionRecord {
                        role: ActionRole::Shortcut,
                        target: key_combination.clone(),
                    });
                }
                (t, r.map_err(VisitError::from))
            }
            VisitCommand::FurtherQuery { .. } => (
                Trace::default(),
                Err(VisitError::Query {
                    message: "further_query cannot be mixed with other commands".into(),
                }),
            ),
        };
        for a in &trace.actions {
            match a.role {
                ActionRole::Navigation | ActionRole::Activation => report.clicks += 1,
                ActionRole::Close => report.closes += 1,
                ActionRole::Input => report.inputs += 1,
                ActionRole::Shortcut => report.shortcuts += 1,
            }
        }
        report.retries += trace.retries;
        report.fetches += trace.fetches;
        let outcome = match result {
            Ok(()) => Outcome::Executed,
            Err(error) => {
                failed = true;
                Outcome::Failed { error }
            }
        };
        report.commands.push(CommandReport {
            index,
            command: cmd.clone(),
            outcome,
            trace,
        });
    }
    if let Ok(snap) = backend.snapshot() {
        report.final_screen = Some(ScreenRef {
            tick: snap.tick,
            windows: snap.windows.iter().map(|w| w.id.clone()).collect(),
            visible_controls: snap.controls.len(),
        });
    }
    report
}
