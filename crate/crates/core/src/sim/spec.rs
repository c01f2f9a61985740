use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::model::{ControlType, Pattern};

/// A scripted application: windows, control trees and the rules that change
/// what is visible.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimAppSpec {
    #[serde(default)]
    pub name: String,
    pub windows: Vec<WindowSpec>,
    pub controls: Vec<ControlSpec>,
    #[serde(default)]
    pub reveal_rules: Vec<RevealRule>,
    #[serde(default)]
    pub context_rules: Vec<ContextRule>,
    /// Ticks between a control being revealed and it becoming visible.
    #[serde(default)]
    pub latencies: BTreeMap<String, u64>,
    #[serde(default)]
    pub aliases: Vec<AliasSpec>,
    #[serde(default)]
    pub disabled: BTreeSet<String>,
    #[serde(default)]
    pub shortcuts: Vec<ShortcutRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub main: bool,
    #[serde(default)]
    pub modal: bool,
    /// Title-bar close affordance.
    #[serde(default = "yes")]
    pub closable: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    pub key: String,
    #[serde(default)]
    pub name: String,
    #[serde(rename = "type")]
    pub control_type: ControlType,
    #[serde(default)]
    pub automation_id: Option<String>,
    pub window: String,
    #[serde(default)]
    pub parent: Option<String>,
    /// Shown when its window opens.
    #[serde(default = "yes")]
    pub visible: bool,
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub patterns: BTreeSet<Pattern>,
    #[serde(default)]
    pub selected: bool,
    #[serde(default)]
    pub scroll: Option<ScrollSpec>,
    /// Document content for the Text pattern, lines separated by `\n`.
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub value: Option<String>,
    /// Characters readable without expanding the control.
    #[serde(default)]
    pub collapsed_value_len: Option<usize>,
    #[serde(default)]
    pub commit_on_enter: bool,
}

impl ControlSpec {
    pub fn new(key: &str, name: &str, control_type: ControlType, window: &str) -> Self {
        Self {
            key: key.into(),
            name: name.into(),
            control_type,
            automation_id: None,
            window: window.into(),
            parent: None,
            visible: true,
            description: None,
            patterns: BTreeSet::new(),
            selected: false,
            scroll: None,
            text: None,
            value: None,
            collapsed_value_len: None,
            commit_on_enter: false,
        }
    }

    pub fn under(mut self, parent: &str) -> Self {
        self.parent = Some(parent.into());
        self
    }

    pub fn hidden(mut self) -> Self {
        self.visible = false;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScrollSpec {
    #[serde(default)]
    pub horizontal: bool,
    #[serde(default)]
    pub vertical: bool,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
    /// Positions are quantized to this many steps across the range.
    #[serde(default = "default_steps")]
    pub steps: u32,
}

fn default_steps() -> u32 {
    1000
}

/// What clicking `on` does.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RevealRule {
    pub on: String,
    #[serde(default)]
    pub show: Vec<String>,
    #[serde(default)]
    pub hide: Vec<String>,
    #[serde(default)]
    pub open_window: Option<String>,
    #[serde(default)]
    pub close_window: Option<String>,
    /// Values may reference other variables as `$name`.
    #[serde(default)]
    pub set_vars: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextRule {
    pub name: String,
    #[serde(default)]
    pub show: Vec<String>,
}

/// A display name a control takes once its conditions hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AliasSpec {
    pub control: String,
    pub name: String,
    #[serde(default)]
    pub from_tick: Option<u64>,
    #[serde(default)]
    pub when_input: Option<InputCondition>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputCondition {
    pub control: String,
    pub prefix: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShortcutRule {
    pub keys: String,
    #[serde(default)]
    pub set_vars: BTreeMap<String, String>,
    #[serde(default)]
    pub close_window: Option<String>,
}

impl SimAppSpec {
    /// Checks references, uniqueness and the single-main-window rule.
    pub fn validate(&self) -> Result<(), SimError> {
        let fail = |m: String| Err(SimError::SpecValidation(m));
        let mut windows = BTreeSet::new();
        for w in &self.windows {
            if !windows.insert(w.id.as_str()) {
                return fail(format!("duplicate window id {:?}", w.id));
            }
        }
        let mains = self.windows.iter().filter(|w| w.main).count();
        if mains != 1 {
            return fail(format!("expected exactly one main window, found {mains}"));
        }
        let mut keys: BTreeMap<&str, &ControlSpec> = BTreeMap::new();
        for c in &self.controls {
            if keys.insert(c.key.as_str(), c).is_some() {
                return fail(format!("duplicate control key {:?}", c.key));
            }
            if !windows.contains(c.window.as_str()) {
                return fail(format!("control {:?} names missing window {:?}", c.key, c.window));
            }
        }
        for c in &self.controls {
            if let Some(p) = &c.parent {
                let Some(parent) = keys.get(p.as_str()) else {
                    return fail(format!("control {:?} names missing parent {p:?}", c.key));
                };
                if parent.window != c.window {
                    return fail(format!("control {:?} and its parent live in different windows", c.key));
                }
            }
            // parent chains must terminate
            let mut cur = c;
            for _ in 0..=self.controls.len() {
                match &cur.parent {
                    Some(p) => cur = keys[p.as_str()],
                    None => break,
                }
            }
            if cur.parent.is_some() {
                return fail(format!("control {:?} sits on a parent cycle", c.key));
            }
        }
        let control = |k: &str, what: &str| -> Result<(), SimError> {
            if keys.contains_key(k) {
                Ok(())
            } else {
                Err(SimError::SpecValidation(format!("{what} names missing control {k:?}")))
            }
        };
        let window = |w: &str, what: &str| -> Result<(), SimError> {
            if windows.contains(w) {
                Ok(())
            } else {
                Err(SimError::SpecValidation(format!("{what} names missing window {w:?}")))
            }
        };
        for r in &self.reveal_rules {
            control(&r.on, "reveal rule")?;
            for k in r.show.iter().chain(&r.hide) {
                control(k, "reveal rule")?;
            }
            if let Some(w) = &r.open_window {
                window(w, "reveal rule")?;
            }
            if let Some(w) = &r.close_window {
                window(w, "reveal rule")?;
            }
        }
        let mut contexts = BTreeSet::new();
        for c in &self.context_rules {
            if !contexts.insert(c.name.as_str()) {
                return fail(format!("duplicate context {:?}", c.name));
            }
            for k in &c.show {
                control(k, "context rule")?;
            }
        }
        for k in self.latencies.keys().chain(&self.disabled) {
            control(k, "latency or disabled entry")?;
        }
        for a in &self.aliases {
            control(&a.control, "alias")?;
            if let Some(cond) = &a.when_input {
                control(&cond.control, "alias condition")?;
            }
            if a.from_tick.is_none() && a.when_input.is_none() {
                return fail(format!("alias for {:?} has no condition", a.control));
            }
        }
        for s in &self.shortcuts {
            if let Some(w) = &s.close_window {
                window(w, "shortcut")?;
            }
        }
        Ok(())
    }
}
