//! The stages behind each subcommand, callable without touching files.

use goi_core::compiler::{compile, verify_forest, CompilerConfig, Threshold, VerificationReport};
use goi_core::model::NavGraph;
use goi_core::ripper::{rip, rip_with_contexts, RipperConfig};
use goi_core::script::{run_script, ReplayMetrics, RunConfig, ScriptReport, Turn};
use goi_core::sim::{assert_state, Assertion, AssertionReport, SimAppSpec, SimSession, SimState};
use goi_core::text::{expand_query, extract_core, serialize, SerializationConfig};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::formats::{ForestDoc, GraphDoc};

pub fn rip_app(spec: SimAppSpec, cfg: &RipperConfig) -> Result<GraphDoc, Error> {
    let mut session = SimSession::new(spec)?;
    let outcome = if cfg.contexts.is_empty() {
        rip(&mut session, cfg)?
    } else {
        rip_with_contexts(&mut session, cfg)?
    };
    Ok(outcome.into())
}

pub fn compile_graph(graph: &NavGraph, threshold: Threshold) -> Result<ForestDoc, Error> {
    let c = compile(graph, &CompilerConfig::with_threshold(threshold))?;
    Ok(ForestDoc {
        threshold,
        forest: c.forest,
        dag: c.dag,
        removed_edges: c.removed,
    })
}

pub fn verify(doc: &ForestDoc) -> VerificationReport {
    verify_forest(&doc.dag, &doc.forest)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum View {
    Full,
    Core,
    /// Display ids to expand; `-1` means everything.
    Expand(Vec<i64>),
}

pub fn render(doc: &ForestDoc, view: &View, cfg: &SerializationConfig) -> Result<String, Error> {
    Ok(match view {
        View::Full => serialize(&doc.forest, cfg),
        View::Core => extract_core(&doc.forest, cfg),
        View::Expand(ids) => expand_query(&doc.forest, ids, cfg)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecReport {
    pub script: ScriptReport,
    pub final_state: SimState,
}

pub fn exec(
    doc: &ForestDoc,
    app: SimAppSpec,
    turns: &[Turn],
    cfg: &RunConfig,
) -> Result<(ExecReport, SimSession), Error> {
    let mut session = SimSession::new(app)?;
    let script = run_script(turns, &doc.forest, &mut session, cfg);
    let final_state = session.state().clone();
    Ok((ExecReport { script, final_state }, session))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TurnSummary {
    pub turn: usize,
    pub backend_actions: usize,
    pub succeeded: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub turns: usize,
    pub backend_actions: usize,
    /// The script ran to completion and every assertion passed.
    pub success: bool,
    pub script_success: bool,
    pub assertions: AssertionReport,
    pub per_turn: Vec<TurnSummary>,
}

impl Metrics {
    pub fn replay(&self) -> ReplayMetrics {
        ReplayMetrics {
            turns: self.turns,
            backend_actions: self.backend_actions,
            success: self.success,
        }
    }
}

pub fn replay(
    doc: &ForestDoc,
    app: SimAppSpec,
    turns: &[Turn],
    assertions: &[Assertion],
    cfg: &RunConfig,
) -> Result<Metrics, Error> {
    let (report, session) = exec(doc, app, turns, cfg)?;
    let assertions = assert_state(&session, assertions);
    let m = report.script.metrics;
    Ok(Metrics {
        turns: m.turns,
        backend_actions: m.backend_actions,
        success: m.success && assertions.all_passed(),
        script_success: m.success,
        assertions,
        per_turn: report
            .script
            .turns
            .iter()
            .map(|t| TurnSummary {
                turn: t.turn,
                backend_actions: t.backend_actions,
                succeeded: t.succeeded,
            })
            .collect(),
    })
}
