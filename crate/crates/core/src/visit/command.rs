use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CommandError;
use crate::model::NavForest;

/// One declarative command of a `visit` array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VisitCommand {
    AccessInput {
        id: i64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        entry_ref_id: Vec<i64>,
        text: String,
    },
    Access {
        id: i64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        entry_ref_id: Vec<i64>,
    },
    Shortcut {
        #[serde(rename = "shortcut_key")]
        key_combination: String,
    },
    FurtherQuery {
        further_query: Vec<i64>,
    },
}

impl VisitCommand {
    pub fn access(id: i64) -> Self {
        VisitCommand::Access {
            id,
            entry_ref_id: Vec::new(),
        }
    }

    pub fn target(&self) -> Option<i64> {
        match self {
            VisitCommand::Access { id, .. } | VisitCommand::AccessInput { id, .. } => Some(*id),
            _ => None,
        }
    }
}

const MODIFIERS: &[&str] = &["CTRL", "ALT", "SHIFT", "WIN"];
const NAMED_KEYS: &[&str] = &[
    "ENTER",
    "ESC",
    "TAB",
    "SPACE",
    "BACKSPACE",
    "DELETE",
    "INSERT",
    "HOME",
    "END",
    "PAGEUP",
    "PAGEDOWN",
    "UP",
    "DOWN",
    "LEFT",
    "RIGHT",
];

/// Normalizes a key combination such as `ctrl+s` to `CTRL+S`.
///
/// Grammar: zero or more distinct modifiers (`CTRL`, `ALT`, `SHIFT`, `WIN`)
/// followed by exactly one key: a letter, a digit, `F1`..`F24` or one of
/// `ENTER ESC TAB SPACE BACKSPACE DELETE INSERT HOME END PAGEUP PAGEDOWN UP
/// DOWN LEFT RIGHT`, joined by `+`.
pub fn normalize_key_combination(s: &str) -> Result<String, String> {
    let parts: Vec<String> = s.split('+').map(|p| p.trim().to_ascii_uppercase()).collect();
    let (key, mods) = parts.split_last().ok_or("empty key combination")?;
    let mut seen: Vec<&str> = Vec::new();
    for m in mods {
        if !MODIFIERS.contains(&m.as_str()) {
            return Err(format!("{m:?} is not a modifier"));
        }
        if seen.contains(&m.as_str()) {
            return Err(format!("modifier {m} repeated"));
        }
        seen.push(m);
    }
    let is_key = NAMED_KEYS.contains(&key.as_str())
        || (key.len() == 1 && key.chars().all(|c| c.is_ascii_alphanumeric()))
        || key
            .strip_prefix('F')
            .and_then(|n| n.parse::<u8>().ok())
            .is_some_and(|n| (1..=24).contains(&n));
    if !is_key {
        return Err(format!("{key:?} is not a key"));
    }
    Ok(parts.join("+"))
}

fn id_value(v: &Value) -> Result<i64, String> {
    match v {
        Value::Number(n) => n.as_i64().ok_or_else(|| format!("{n} is not an integer id")),
        Value::String(s) => s.trim().parse().map_err(|_| format!("{s:?} is not an integer id")),
        other => Err(format!("expected an id, found {other}")),
    }
}

fn id_list(v: &Value) -> Result<Vec<i64>, String> {
    match v {
        Value::Array(items) => items.iter().map(id_value).collect(),
        other => Err(format!("expected a list of ids, found {other}")),
    }
}

fn command(obj: &Map<String, Value>) -> Result<VisitCommand, String> {
    let allowed: &[&str] = if obj.contains_key("id") {
        &["id", "entry_ref_id", "text"]
    } else if obj.contains_key("shortcut_key") {
        &["shortcut_key"]
    } else if obj.contains_key("further_query") {
        &["further_query"]
    } else {
        return Err("expected one of id, shortcut_key or further_query".into());
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(format!("unknown key {k:?}"));
    }
    if let Some(id) = obj.get("id") {
        let id = id_value(id)?;
        let entry_ref_id = obj.get("entry_ref_id").map(id_list).transpose()?.unwrap_or_default();
        return Ok(match obj.get("text") {
            None => VisitCommand::Access { id, entry_ref_id },
            Some(Value::String(t)) => VisitCommand::AccessInput {
                id,
                entry_ref_id,
                text: t.clone(),
            },
            Some(other) => return Err(format!("text must be a string, found {other}")),
        });
    }
    if let Some(k) = obj.get("shortcut_key") {
        let Value::String(k) = k else {
            return Err("shortcut_key must be a string".into());
        };
        return Ok(VisitCommand::Shortcut {
            key_combination: normalize_key_combination(k)?,
        });
    }
    let ids = id_list(&obj["further_query"])?;
    if ids.is_empty() {
        return Err("further_query needs at least one id".into());
    }
    Ok(VisitCommand::FurtherQuery { further_query: ids })
}

/// Parses an already-decoded JSON array of commands.
pub fn commands_from_value(v: &Value) -> Result<Vec<VisitCommand>, CommandError> {
    let Value::Array(items) = v else {
        return Err(CommandError::MalformedCommand {
            index: 0,
            reason: "expected a JSON array of commands".into(),
        });
    };
    let mut out = Vec::with_capacity(items.len());
    for (index, item) in items.iter().enumerate() {
        let Value::Object(obj) = item else {
            return Err(CommandError::MalformedCommand {
                index,
                reason: "expected an object".into(),
            });
        };
        out.push(command(obj).map_err(|reason| CommandError::MalformedCommand { index, reason })?);
    }
    if out.len() > 1 {
        if let Some(index) = out.iter().position(|c| matches!(c, VisitCommand::FurtherQuery { .. })) {
            return Err(CommandError::MixedFurtherQuery { index });
        }
    }
    Ok(out)
}

/// Parses a `visit` JSON array. Ids may be written as numbers or strings.
pub fn parse_commands(json_text: &str) -> Result<Vec<VisitCommand>, CommandError> {
    let v: Value = serde_json::from_str(json_text).map_err(|e| CommandError::MalformedCommand {
        index: 0,
        reason: format!("invalid JSON: {e}"),
    })?;
    commands_from_value(&v)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// The target has children; navigation is the executor's job.
    NavigationalTarget,
    /// A shortcut that followed a dropped command.
    FollowsDropped,
}

/// Result of filtering: indices into the original command list.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filtered {
    pub kept: Vec<usize>,
    pub dropped: Vec<(usize, DropReason)>,
}

/// Drops access commands aimed at navigational nodes, and any shortcut that
/// directly follows a dropped command.
pub fn filter_commands(cmds: &[VisitCommand], forest: &NavForest) -> Filtered {
    let mut f = Filtered::default();
    let mut prev_dropped = false;
    for (i, c) in cmds.iter().enumerate() {
        let reason = match c {
            VisitCommand::Access { id, .. } | VisitCommand::AccessInput { id, .. } => u32::try_from(*id)
                .ok()
                .filter(|&n| forest.get(n).is_some() && !forest.is_functional(n))
                .map(|_| DropReason::NavigationalTarget),
            VisitCommand::Shortcut { .. } if prev_dropped => Some(DropReason::FollowsDropped),
            _ => None,
        };
        prev_dropped = reason.is_some();
        match reason {
            Some(r) => f.dropped.push((i, r)),
            None => f.kept.push(i),
        }
    }
    f
}

impl core::fmt::Display for VisitCommand {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = serde_json::to_string(self).unwrap_or_else(|_| "?".to_string());
        f.write_str(&s)
    }
}
