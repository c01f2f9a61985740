use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::TextUnit;

use super::session::SimSession;

/// A declarative predicate over a session's final state and action log.
/// Controls are named by spec key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assertion {
    Clicked {
        control: String,
        #[serde(default = "one")]
        min: u32,
    },
    ValueEquals {
        control: String,
        value: String,
    },
    /// The control's value was committed; with `value`, it must also match.
    Committed {
        control: String,
        #[serde(default)]
        value: Option<String>,
    },
    SelectionEquals {
        control: String,
        unit: TextUnit,
        start: usize,
        end: usize,
    },
    /// Exactly these controls are selected among their selectable siblings.
    Selected {
        controls: Vec<String>,
    },
    ScrollWithin {
        control: String,
        #[serde(default)]
        x: Option<f64>,
        #[serde(default)]
        y: Option<f64>,
        #[serde(default = "half")]
        epsilon: f64,
    },
    WindowClosed {
        window: String,
    },
    VarEquals {
        var: String,
        value: String,
    },
}

fn one() -> u32 {
    1
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The predicate names something the app does not have.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub index: usize,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssertionReport {
    pub results: Vec<AssertionResult>,
}

impl AssertionReport {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.verdict == Verdict::Pass)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.results.iter().filter(|r| r.verdict == verdict).count()
    }
}

pub fn assert_state(session: &SimSession, assertions: &[Assertion]) -> AssertionReport {
    let results = assertions
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let (verdict, detail) = evaluate(session, a);
            AssertionResult { index, verdict, detail }
        })
        .collect();
    AssertionReport { results }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn evaluate(s: &SimSession, a: &Assertion) -> (Verdict, String) {
    let unknown = |what: &str| (Verdict::Unknown, format!("no control {what:?}"));
    match a {
        Assertion::Clicked { control, min } => match s.control_state(control) {
            None => unknown(control),
            Some(c) => (
                verdict(c.clicks >= *min),
                format!("{control} clicked {} time(s), need {min}", c.clicks),
            ),
        },
        Assertion::ValueEquals { control, value } => match s.control_state(control) {
            None => unknown(control),
            Some(c) => (
                verdict(c.value.as_deref() == Some(value.as_str())),
                format!("{control} value is {:?}", c.value),
            ),
        },
        Assertion::Committed { control, value } => match s.control_state(control) {
            None => unknown(control),
            Some(c) => {
                let ok = match (&c.committed_value, value) {
                    (None, _) => false,
                    (Some(_), None) => true,
                    (Some(got), Some(want)) => got == want,
                };
                (
                    verdict(ok),
                    format!("{control} committed value is {:?}", c.committed_value),
                )
            }
        },
        Assertion::SelectionEquals {
            control,
            unit,
            start,
            end,
        } => match s.control_state(control) {
            None => unknown(control),
            Some(c) => {
                let ok = c
                    .selection
                    .is_some_and(|sel| sel.unit == *unit && sel.start == *start && sel.end == *end);
                (verdict(ok), format!("{control} selection is {:?}", c.selection))
            }
        },
        Assertion::Selected { controls } => {
            if let Some(missing) = controls.iter().find(|k| s.control_state(k).is_none()) {
                return unknown(missing);
            }
            let mut siblings = Vec::new();
            for k in controls {
                let parent = &s.control_spec(k).map(|c| c.parent.clone());
                for c in &s.spec().controls {
                    if Some(&c.parent) == parent.as_ref() && c.patterns.contains(&crate::model::Pattern::Select) {
                        siblings.push(c.key.as_str());
                    }
                }
            }
            let wrong: Vec<&str> = siblings
                .into_iter()
                .filter(|k| s.control_state(k).is_some_and(|c| c.selected) != controls.iter().any(|w| w == k))
                .collect();
            (verdict(wrong.is_empty()), format!("selection differs at {wrong:?}"))
        }
        Assertion::ScrollWithin { control, x, y, epsilon } => match s.control_state(control) {
            None => unknown(control),
            Some(c) => {
                let near = |want: &Option<f64>, got: f64| want.is_none_or(|w| (w - got).abs() <= *epsilon);
                let ok = near(x, c.scroll_x) && near(y, c.scroll_y);
                (
                    verdict(ok),
                    format!("{control} scrolled to ({}, {})", c.scroll_x, c.scroll_y),
                )
            }
        },
        Assertion::WindowClosed { window } => {
            if !s.spec().windows.iter().any(|w| &w.id == window) {
                return (Verdict::Unknown, format!("no window {window:?}"));
            }
            let open = s.is_window_open(window);
            (
                verdict(!open),
                format!("window {window} is {}", if open { "open" } else { "closed" }),
            )
        }
        Assertion::VarEquals { var, value } => {
            let got = s.state().vars.get(var);
            (verdict(got == Some(value)), format!("{var} is {got:?}"))
        }
    }
}
