//! Multi-turn scripts: each turn is either one visit array or a run of
//! interaction ops, preceded by a passive text observation.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::backend::UiBackend;
use crate::error::ScriptError;
use crate::model::NavForest;
use crate::patterns::{get_texts, parse_op, run_op, InteractionOp, PatternResult, TextConfig, TextMode};
use crate::text::SerializationConfig;
use crate::visit::{commands_from_value, execute_visit_with, ExecutionReport, MatchPolicy, VisitCommand};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "body", rename_all = "snake_case")]
pub enum Turn {
    Visit(Vec<VisitCommand>),
    Ops(Vec<InteractionOp>),
}

impl Turn {
    pub fn to_value(&self) -> Value {
        match self {
            Turn::Visit(cmds) => serde_json::to_value(cmds).unwrap_or(Value::Null),
            Turn::Ops(ops) if ops.len() == 1 => serde_json::to_value(&ops[0]).unwrap_or(Value::Null),
            Turn::Ops(ops) => serde_json::json!({ "ops": ops }),
        }
    }
}

fn is_op(v: &Value) -> bool {
    v.get("op").is_some()
}

fn ops(turn: usize, items: &[Value]) -> Result<Turn, ScriptError> {
    if items.is_empty() {
        return Err(ScriptError::MalformedTurn {
            turn,
            reason: "empty op list".into(),
        });
    }
    items
        .iter()
        .map(|v| {
            if !is_op(v) {
                return Err(ScriptError::MixedTurn { turn });
            }
            parse_op(v).map_err(|error| ScriptError::Op { turn, error })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Turn::Ops)
}

fn visit(turn: usize, v: &Value) -> Result<Turn, ScriptError> {
    if let Value::Array(items) = v {
        if items.iter().any(is_op) {
            return Err(ScriptError::MixedTurn { turn });
        }
        if items.is_empty() {
            return Err(ScriptError::MalformedTurn {
                turn,
                reason: "empty visit array".into(),
            });
        }
    }
    commands_from_value(v)
        .map(Turn::Visit)
        .map_err(|error| ScriptError::Command { turn, error })
}

/// Parses one turn: a visit array, `{"visit": [...]}`, one `{"op": ...}`
/// object or `{"ops": [...]}`.
pub fn parse_turn(turn: usize, v: &Value) -> Result<Turn, ScriptError> {
    match v {
        Value::Array(_) => visit(turn, v),
        Value::Object(obj) => {
            let kinds = ["visit", "op", "ops"].iter().filter(|k| obj.contains_key(**k)).count();
            if kinds > 1 {
                return Err(ScriptError::MixedTurn { turn });
            }
            if let Some(cmds) = obj.get("visit") {
                if obj.len() > 1 {
                    return Err(ScriptError::MalformedTurn {
                        turn,
                        reason: "unexpected keys beside visit".into(),
                    });
                }
                return visit(turn, cmds);
            }
            if let Some(list) = obj.get("ops") {
                let Value::Array(items) = list else {
                    return Err(ScriptError::MalformedTurn {
                        turn,
                        reason: "ops must be an array".into(),
                    });
                };
                if obj.len() > 1 {
                    return Err(ScriptError::MalformedTurn {
                        turn,
                        reason: "unexpected keys beside ops".into(),
                    });
                }
                return ops(turn, items);
            }
            if is_op(v) {
                return ops(turn, core::slice::from_ref(v));
            }
            Err(ScriptError::MalformedTurn {
                turn,
                reason: "expected visit, op or ops".into(),
            })
        }
        other => Err(ScriptError::MalformedTurn {
            turn,
            reason: format!("expected an array or object, found {other}"),
        }),
    }
}

/// Parses a script: a JSON array of turns, or `{"turns": [...]}`.
pub fn parse_script(json_text: &str) -> Result<Vec<Turn>, ScriptError> {
    let v: Value = serde_json::from_str(json_text).map_err(|e| ScriptError::MalformedTurn {
        turn: 0,
        reason: format!("invalid JSON: {e}"),
    })?;
    let turns = match &v {
        Value::Array(t) => t,
        Value::Object(o) => match o.get("turns") {
            Some(Value::Array(t)) => t,
            _ => {
                return Err(ScriptError::MalformedTurn {
                    turn: 0,
                    reason: "expected a turns array".into(),
                })
            }
        },
        _ => {
            return Err(ScriptError::MalformedTurn {
                turn: 0,
                reason: "expected a turns array".into(),
            })
        }
    };
    turns.iter().enumerate().map(|(i, t)| parse_turn(i, t)).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub policy: MatchPolicy,
    pub serialization: SerializationConfig,
    pub text: TextConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpReport {
    pub op: InteractionOp,
    pub result: PatternResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TurnResult {
    Visit { report: ExecutionReport },
    Ops { results: Vec<OpReport> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnReport {
    pub turn: usize,
    /// Passive text read just before the turn ran.
    pub observation: PatternResult,
    pub result: TurnResult,
    pub backend_actions: usize,
    pub succeeded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayMetrics {
    /// Turns actually run.
    pub turns: usize,
    /// Clicks, inputs and window closes across all turns.
    pub backend_actions: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptReport {
    pub turns: Vec<TurnReport>,
    pub metrics: ReplayMetrics,
}

/// Runs turns in order, stopping after the first turn that fails.
pub fn run_script<B: UiBackend>(turns: &[Turn], forest: &NavForest, backend: &mut B, cfg: &RunConfig) -> ScriptReport {
    let mut reports = Vec::with_capacity(turns.len());
    for (i, turn) in turns.iter().enumerate() {
        let observation = get_texts(backend, TextMode::Passive, &[], &cfg.text);
        let (result, backend_actions, succeeded) = match turn {
            Turn::Visit(cmds) => {
                let report = execute_visit_with(cmds, forest, backend, &cfg.policy, &cfg.serialization);
                let (n, ok) = (report.backend_actions(), report.succeeded());
                (TurnResult::Visit { report }, n, ok)
            }
            Turn::Ops(ops) => {
                let mut results = Vec::with_capacity(ops.len());
                let mut clicks = 0;
                let mut ok = true;
                for op in ops {
                    let result = run_op(op, backend, &cfg.text);
                    if result.is_ok() && matches!(op, InteractionOp::Click { .. }) {
                        clicks += 1;
                    }
                    ok = result.is_ok();
                    results.push(OpReport { op: op.clone(), result });
                    if !ok {
                        break;
                    }
                }
                (TurnResult::Ops { results }, clicks, ok)
            }
        };
        reports.push(TurnReport {
            turn: i,
            observation,
            result,
            backend_actions,
            succeeded,
        });
        if !succeeded {
            break;
        }
    }
    let metrics = ReplayMetrics {
        turns: reports.len(),
        backend_actions: reports.iter().map(|r| r.backend_actions).sum(),
        success: reports.len() == turns.len() && reports.iter().all(|r| r.succeeded),
    };
    ScriptReport {
        turns: reports,
        metrics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::OpError;
    use serde_json::json;

    #[test]
    fn turn_shapes() {
        let t = parse_script(r#"[[{"id": 3}], {"visit": [{"id": 4}]}, {"op": "click", "target": "B"}, {"ops": [{"op": "wait", "ticks": 1}]}]"#)
            .unwrap();
        assert!(matches!(&t[0], Turn::Visit(c) if c.len() == 1));
        assert!(matches!(&t[1], Turn::Visit(_)));
        assert!(matches!(&t[2], Turn::Ops(o) if o.len() == 1));
        assert!(matches!(&t[3], Turn::Ops(_)));
        for turn in &t {
            assert_eq!(&parse_turn(0, &turn.to_value()).unwrap(), turn);
        }
    }

    #[test]
    fn mixing_is_rejected() {
        let mixed = [
            json!([{"id": 3}, {"op": "click", "target": "A"}]),
            json!({"visit": [{"id": 3}], "op": "click", "target": "A"}),
            json!({"ops": [{"op": "click", "target": "A"}, {"id": 3}]}),
        ];
        for m in mixed {
            assert_eq!(parse_turn(2, &m), Err(ScriptError::MixedTurn { turn: 2 }), "{m}");
        }
        assert!(matches!(
            parse_turn(0, &json!({"op": "click", "target": "7"})),
            Err(ScriptError::Op {
                error: OpError::StaticIdProhibited { .. },
                ..
            })
        ));
        assert!(matches!(
            parse_turn(0, &json!([])),
            Err(ScriptError::MalformedTurn { .. })
        ));
        assert!(matches!(parse_script("{}"), Err(ScriptError::MalformedTurn { .. })));
    }
}
