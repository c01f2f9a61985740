use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::labels::{assign_labels, Label, ScreenLabel};
use crate::backend::{PatternReply, PatternRequest, TextUnit, UiAction, UiBackend};
use crate::error::{BackendError, OpError};
use crate::model::{ControlType, Pattern};
use crate::text::TRUNCATION_MARKER;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextMode {
    /// Every visible DataItem, truncated and with empty runs coalesced.
    Passive,
    /// Named controls, full content.
    Active,
}

/// One state or observation declaration, addressed by on-screen label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionOp {
    SetScrollbarPos {
        target: Label,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<f64>,
    },
    SelectLines {
        target: Label,
        start: usize,
        end: usize,
    },
    SelectParagraphs {
        target: Label,
        start: usize,
        end: usize,
    },
    SelectControls {
        targets: Vec<Label>,
    },
    GetTexts {
        mode: TextMode,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        targets: Vec<Label>,
    },
    SetToggleState {
        target: Label,
        on: bool,
    },
    SetExpanded {
        target: Label,
        expanded: bool,
    },
    /// Plain click, for scripts that drive the UI one control at a time.
    Click {
        target: Label,
    },
    Wait {
        ticks: u64,
    },
}

fn is_static_id(v: &Value) -> bool {
    match v {
        Value::Number(_) => true,
        Value::String(s) => matches!(Label::parse(s), Err(OpError::StaticIdProhibited { .. })),
        _ => false,
    }
}

/// Parses one `{"op": ...}` object. Numeric targets are refused before
/// anything else is checked.
pub fn parse_op(v: &Value) -> Result<InteractionOp, OpError> {
    let Value::Object(obj) = v else {
        return Err(OpError::MalformedOp {
            reason: "expected an object".into(),
        });
    };
    let mut targets: Vec<&Value> = obj.get("target").into_iter().collect();
    if let Some(Value::Array(items)) = obj.get("targets") {
        targets.extend(items);
    }
    if let Some(t) = targets.into_iter().find(|t| is_static_id(t)) {
        let value = match t {
            Value::String(s) => s.clone(),
            other => format!("{other}"),
        };
        return Err(OpError::StaticIdProhibited { value });
    }
    let op: InteractionOp =
        serde_json::from_value(v.clone()).map_err(|e| OpError::MalformedOp { reason: format!("{e}") })?;
    op.validate()?;
    Ok(op)
}

impl InteractionOp {
    pub fn validate(&self) -> Result<(), OpError> {
        let bad = |reason: &str| Err(OpError::MalformedOp { reason: reason.into() });
        match self {
            InteractionOp::SetScrollbarPos { x: None, y: None, .. } => bad("set_scrollbar_pos needs x or y"),
            InteractionOp::SelectControls { targets } if targets.is_empty() => bad("select_controls needs targets"),
            InteractionOp::GetTexts {
                mode: TextMode::Active,
                targets,
            } if targets.is_empty() => bad("active get_texts needs targets"),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InteractionOp::SetScrollbarPos { .. } => "set_scrollbar_pos",
            InteractionOp::SelectLines { .. } => "select_lines",
            InteractionOp::SelectParagraphs { .. } => "select_paragraphs",
            InteractionOp::SelectControls { .. } => "select_controls",
            InteractionOp::GetTexts { .. } => "get_texts",
            InteractionOp::SetToggleState { .. } => "set_toggle_state",
            InteractionOp::SetExpanded { .. } => "set_expanded",
            InteractionOp::Click { .. } => "click",
            InteractionOp::Wait { .. } => "wait",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternStatus {
    Ok,
    UnsupportedPattern,
    OutOfRange,
    NotFound,
    /// Any other backend refusal.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum TextEntry {
    Item {
        label: Label,
        name: String,
        text: String,
        truncated: bool,
    },
    EmptyRun {
        from: usize,
        to: usize,
        summary: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatternPayload {
    Scroll {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<f64>,
    },
    Range {
        unit: TextUnit,
        start: usize,
        end: usize,
    },
    Selected {
        labels: Vec<Label>,
    },
    Texts {
        entries: Vec<TextEntry>,
    },
    Toggle {
        on: bool,
    },
    Expanded {
        expanded: bool,
    },
    Clicked {
        label: Label,
    },
    Waited {
        ticks: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternResult {
    pub status: PatternStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<PatternPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl PatternResult {
    pub fn ok(payload: PatternPayload) -> Self {
        Self {
            status: PatternStatus::Ok,
            payload: Some(payload),
            message: None,
        }
    }

    pub fn fail(status: PatternStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            payload: None,
            message: Some(message.into()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == PatternStatus::Ok
    }
}

impl From<BackendError> for PatternResult {
    fn from(e: BackendError) -> Self {
        let status = match e {
            BackendError::UnsupportedPattern { .. } => PatternStatus::UnsupportedPattern,
            BackendError::OutOfRange { .. } => PatternStatus::OutOfRange,
            BackendError::TargetNotVisible { .. } | BackendError::UnknownWindow { .. } => PatternStatus::NotFound,
            _ => PatternStatus::Failed,
        };
        PatternResult::fail(status, format!("{e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TextConfig {
    /// Characters kept per passive value.
    pub passive_char_limit: usize,
}

impl Default for TextConfig {
    fn default() -> Self {
        Self { passive_char_limit: 64 }
    }
}

fn current_labels<B: UiBackend>(backend: &mut B) -> Result<Vec<ScreenLabel>, PatternResult> {
    backend
        .snapshot()
        .map(|s| assign_labels(&s))
        .map_err(PatternResult::from)
}

fn lookup<'a>(labels: &'a [ScreenLabel], label: &Label) -> Result<&'a ScreenLabel, PatternResult> {
    labels.get(label.index()).filter(|l| l.label == *label).ok_or_else(|| {
        PatternResult::fail(
            PatternStatus::NotFound,
            format!("no control labelled {label} on screen"),
        )
    })
}

fn resolve<B: UiBackend>(
    backend: &mut B,
    label: &Label,
    pattern: Option<Pattern>,
) -> Result<ScreenLabel, PatternResult> {
    let labels = current_labels(backend)?;
    let l = lookup(&labels, label)?;
    if let Some(p) = pattern.filter(|p| !l.patterns.contains(p)) {
        return Err(PatternResult::fail(
            PatternStatus::UnsupportedPattern,
            format!("{label} ({}) does not support {}", l.name, p.as_str()),
        ));
    }
    Ok(l.clone())
}

fn reply<B: UiBackend>(backend: &mut B, req: PatternRequest) -> Result<PatternReply, PatternResult> {
    backend.pattern(&req).map_err(PatternResult::from)
}

fn collect(r: Result<PatternResult, PatternResult>) -> PatternResult {
    r.unwrap_or_else(|e| e)
}

/// Moves a scrollbar to the given percentages. Either axis may be omitted.
pub fn set_scrollbar_pos<B: UiBackend>(
    backend: &mut B,
    target: &Label,
    x: Option<f64>,
    y: Option<f64>,
) -> PatternResult {
    for v in [x, y].into_iter().flatten() {
        if !(0.0..=100.0).contains(&v) {
            return PatternResult::fail(PatternStatus::OutOfRange, format!("position {v} outside 0..=100"));
        }
    }
    collect((|| {
        let l = resolve(backend, target, Some(Pattern::Scroll))?;
        match reply(backend, PatternRequest::SetScroll { handle: l.handle, x, y })? {
            PatternReply::Scroll { x, y } => Ok(PatternResult::ok(PatternPayload::Scroll { x, y })),
            other => Err(PatternResult::fail(
                PatternStatus::Failed,
                format!("unexpected reply {other:?}"),
            )),
        }
    })())
}

fn select_range<B: UiBackend>(
    backend: &mut B,
    target: &Label,
    unit: TextUnit,
    start: usize,
    end: usize,
) -> PatternResult {
    if start == 0 || start > end {
        return PatternResult::fail(
            PatternStatus::OutOfRange,
            format!("range {start}..={end} is empty or not 1-based"),
        );
    }
    collect((|| {
        let l = resolve(backend, target, Some(Pattern::Text))?;
        match reply(
            backend,
            PatternRequest::SelectRange {
                handle: l.handle,
                unit,
                start,
                end,
            },
        )? {
            PatternReply::Range { unit, start, end } => {
                Ok(PatternResult::ok(PatternPayload::Range { unit, start, end }))
            }
            other => Err(PatternResult::fail(
                PatternStatus::Failed,
                format!("unexpected reply {other:?}"),
            )),
        }
    })())
}

/// Selects lines `start..=end`, 1-based.
pub fn select_lines<B: UiBackend>(backend: &mut B, target: &Label, start: usize, end: usize) -> PatternResult {
    select_range(backend, target, TextUnit::Line, start, end)
}

/// Selects paragraphs `start..=end`, 1-based.
pub fn select_paragraphs<B: UiBackend>(backend: &mut B, target: &Label, start: usize, end: usize) -> PatternResult {
    select_range(backend, target, TextUnit::Paragraph, start, end)
}

/// Selects every target or, if any lacks the Select pattern, none.
pub fn select_controls<B: UiBackend>(backend: &mut B, targets: &[Label]) -> PatternResult {
    collect((|| {
        let labels = current_labels(backend)?;
        let found = targets
            .iter()
            .map(|t| lookup(&labels, t))
            .collect::<Result<Vec<_>, _>>()?;
        let offending: Vec<&str> = found
            .iter()
            .filter(|l| !l.patterns.contains(&Pattern::Select))
            .map(|l| l.label.as_str())
            .collect();
        if !offending.is_empty() {
            return Err(PatternResult::fail(
                PatternStatus::UnsupportedPattern,
                format!("not selectable: {}", offending.join(", ")),
            ));
        }
        let handles = found.iter().map(|l| l.handle).collect();
        reply(backend, PatternRequest::Select { handles })?;
        Ok(PatternResult::ok(PatternPayload::Selected {
            labels: targets.to_vec(),
        }))
    })())
}

/// Cuts `text` to `limit` characters plus the marker; a `partial` read is
/// marked even when it fits.
fn truncate(text: &str, limit: usize, partial: bool) -> (String, bool) {
    match text.char_indices().nth(limit) {
        Some((cut, _)) => (format!("{}{TRUNCATION_MARKER}", &text[..cut]), true),
        None if partial => (format!("{text}{TRUNCATION_MARKER}"), true),
        None => (text.into(), false),
    }
}

fn coalesce(rows: Vec<(usize, ScreenLabel, String, bool)>) -> Vec<TextEntry> {
    let mut out = Vec::with_capacity(rows.len());
    let mut i = 0;
    while i < rows.len() {
        let mut j = i;
        while j < rows.len() && rows[j].2.is_empty() {
            j += 1;
        }
        if j - i >= 2 {
            let (from, to) = (rows[i].0, rows[j - 1].0);
            out.push(TextEntry::EmptyRun {
                from,
                to,
                summary: format!("rows {from}–{to}: empty"),
            });
            i = j;
            continue;
        }
        let (_, l, text, truncated) = &rows[i];
        out.push(TextEntry::Item {
            label: l.label.clone(),
            name: l.name.clone(),
            text: text.clone(),
            truncated: *truncated,
        });
        i += 1;
    }
    out
}

/// Reads text. Passive mode covers every visible DataItem, truncating each
/// value to the configured limit and folding runs of two or more empty
/// values into one `rows i–j: empty` entry (rows numbered from 1 in screen
/// order). Active mode returns the full content of the named controls,
/// expanding them where needed.
pub fn get_texts<B: UiBackend>(backend: &mut B, mode: TextMode, targets: &[Label], cfg: &TextConfig) -> PatternResult {
    collect((|| {
        let labels = current_labels(backend)?;
        match mode {
            TextMode::Passive => {
                let mut rows = Vec::new();
                let cells = labels.iter().filter(|l| l.control_type == ControlType::DataItem);
                for (n, l) in cells.enumerate() {
                    if !l.patterns.iter().any(|p| matches!(p, Pattern::Value | Pattern::Text)) {
                        continue;
                    }
                    if let PatternReply::Text { text, partial } = reply(
                        backend,
                        PatternRequest::GetText {
                            handle: l.handle,
                            expand: false,
                        },
                    )? {
                        let (text, truncated) = truncate(&text, cfg.passive_char_limit, partial);
                        rows.push((n + 1, l.clone(), text, truncated));
                    }
                }
                Ok(PatternResult::ok(PatternPayload::Texts {
                    entries: coalesce(rows),
                }))
            }
            TextMode::Active => {
                let mut entries = Vec::with_capacity(targets.len());
                for t in targets {
                    let l = lookup(&labels, t)?;
                    if !l.patterns.iter().any(|p| matches!(p, Pattern::Value | Pattern::Text)) {
                        return Err(PatternResult::fail(
                            PatternStatus::UnsupportedPattern,
                            format!("{t} ({}) has no Text or Value pattern", l.name),
                        ));
                    }
                    if let PatternReply::Text { text, .. } = reply(
                        backend,
                        PatternRequest::GetText {
                            handle: l.handle,
                            expand: true,
                        },
                    )? {
                        entries.push(TextEntry::Item {
                            label: t.clone(),
                            name: l.name.clone(),
                            text,
                            truncated: false,
                        });
                    }
                }
                Ok(PatternResult::ok(PatternPayload::Texts { entries }))
            }
        }
    })())
}

pub fn set_toggle_state<B: UiBackend>(backend: &mut B, target: &Label, on: bool) -> PatternResult {
    collect((|| {
        let l = resolve(backend, target, Some(Pattern::Toggle))?;
        reply(backend, PatternRequest::SetToggle { handle: l.handle, on })?;
        Ok(PatternResult::ok(PatternPayload::Toggle { on }))
    })())
}

pub fn set_expanded<B: UiBackend>(backend: &mut B, target: &Label, expanded: bool) -> PatternResult {
    collect((|| {
        let l = resolve(backend, target, Some(Pattern::ExpandCollapse))?;
        reply(
            backend,
            PatternRequest::SetExpanded {
                handle: l.handle,
                expanded,
            },
        )?;
        Ok(PatternResult::ok(PatternPayload::Expanded { expanded }))
    })())
}

pub fn click<B: UiBackend>(backend: &mut B, target: &Label) -> PatternResult {
    collect((|| {
        let l = resolve(backend, target, None)?;
        backend
            .perform(&UiAction::Click { handle: l.handle })
            .map_err(PatternResult::from)?;
        Ok(PatternResult::ok(PatternPayload::Clicked { label: target.clone() }))
    })())
}

/// Runs one op against the current screen.
pub fn run_op<B: UiBackend>(op: &InteractionOp, backend: &mut B, cfg: &TextConfig) -> PatternResult {
    match op {
        InteractionOp::SetScrollbarPos { target, x, y } => set_scrollbar_pos(backend, target, *x, *y),
        InteractionOp::SelectLines { target, start, end } => select_lines(backend, target, *start, *end),
        InteractionOp::SelectParagraphs { target, start, end } => select_paragraphs(backend, target, *start, *end),
        InteractionOp::SelectControls { targets } => select_controls(backend, targets),
        InteractionOp::GetTexts { mode, targets } => get_texts(backend, *mode, targets, cfg),
        InteractionOp::SetToggleState { target, on } => set_toggle_state(backend, target, *on),
        InteractionOp::SetExpanded { target, expanded } => set_expanded(backend, target, *expanded),
        InteractionOp::Click { target } => click(backend, target),
        InteractionOp::Wait { ticks } => {
            backend.wait(*ticks);
            PatternResult::ok(PatternPayload::Waited { ticks: *ticks })
        }
    }
}
