use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::backend::{
    AccTreeSnapshot, Handle, PatternReply, PatternRequest, SnapshotControl, TextUnit, UiAction, UiBackend, WindowInfo,
};
use crate::error::{BackendError, SimError};
use crate::model::{ControlIdentifier, ControlNode, ControlType, Pattern};

use super::spec::{ControlSpec, SimAppSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogKind {
    Click,
    Input,
    Shortcut,
    CloseWindow,
    Context,
    Pattern,
    Expand,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEntry {
    pub tick: u64,
    pub kind: LogKind,
    /// Control key, window id or key combination.
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSelection {
    pub unit: TextUnit,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlState {
    pub key: String,
    pub shown: bool,
    pub visible_from: u64,
    pub selected: bool,
    pub scroll_x: f64,
    pub scroll_y: f64,
    pub value: Option<String>,
    pub committed_value: Option<String>,
    pub selection: Option<TextSelection>,
    pub toggled: bool,
    pub expanded: bool,
    pub clicks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub tick: u64,
    /// Oldest first; the main window is always present.
    pub open_windows: Vec<String>,
    pub controls: Vec<ControlState>,
    pub vars: BTreeMap<String, String>,
    pub focus: Option<String>,
    pub context: Option<String>,
    pub log: Vec<LogEntry>,
}

/// A running simulated application.
#[derive(Debug, Clone)]
pub struct SimSession {
    spec: SimAppSpec,
    index: BTreeMap<String, usize>,
    window_index: BTreeMap<String, usize>,
    children: Vec<Vec<usize>>,
    top_level: Vec<Vec<usize>>,
    state: SimState,
}

impl SimSession {
    pub fn new(spec: SimAppSpec) -> Result<Self, SimError> {
        spec.validate()?;
        let index: BTreeMap<String, usize> = spec
            .controls
            .iter()
            .enumerate()
            .map(|(i, c)| (c.key.clone(), i))
            .collect();
        let window_index = spec
            .windows
            .iter()
            .enumerate()
            .map(|(i, w)| (w.id.clone(), i))
            .collect();
        let mut children = alloc::vec![Vec::new(); spec.controls.len()];
        let mut top_level: Vec<Vec<usize>> = alloc::vec![Vec::new(); spec.windows.len()];
        let window_of = |id: &str| spec.windows.iter().position(|w| w.id == id).unwrap_or(0);
        for (i, c) in spec.controls.iter().enumerate() {
            match &c.parent {
                Some(p) => children[index[p]].push(i),
                None => top_level[window_of(&c.window)].push(i),
            }
        }
        let state = Self::initial_state(&spec);
        Ok(Self {
            spec,
            index,
            window_index,
            children,
            top_level,
            state,
        })
    }

    fn initial_state(spec: &SimAppSpec) -> SimState {
        let main = spec
            .windows
            .iter()
            .find(|w| w.main)
            .map(|w| w.id.clone())
            .unwrap_or_default();
        let controls = spec
            .controls
            .iter()
            .map(|c| {
                let (x, y) = c.scroll.map_or((0.0, 0.0), |s| (s.x, s.y));
                ControlState {
                    key: c.key.clone(),
                    shown: c.visible && c.window == main,
                    visible_from: 0,
                    selected: c.selected,
                    scroll_x: x,
                    scroll_y: y,
                    value: c.value.clone(),
                    committed_value: None,
                    selection: None,
                    toggled: false,
                    expanded: false,
                    clicks: 0,
                }
            })
            .collect();
        SimState {
            tick: 0,
            open_windows: alloc::vec![main],
            controls,
            vars: BTreeMap::new(),
            focus: None,
            context: None,
            log: Vec::new(),
        }
    }

    pub fn spec(&self) -> &SimAppSpec {
        &self.spec
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.state.log
    }

    pub fn control_state(&self, key: &str) -> Option<&ControlState> {
        self.index.get(key).map(|&i| &self.state.controls[i])
    }

    pub fn control_spec(&self, key: &str) -> Option<&ControlSpec> {
        self.index.get(key).map(|&i| &self.spec.controls[i])
    }

    pub fn is_window_open(&self, id: &str) -> bool {
        self.state.open_windows.iter().any(|w| w == id)
    }

    /// Handle of a control, whether or not it is visible right now.
    pub fn handle_of(&self, key: &str) -> Option<Handle> {
        self.index.get(key).map(|&i| i as Handle)
    }

    pub fn key_of(&self, handle: Handle) -> Option<&str> {
        self.spec.controls.get(handle as usize).map(|c| c.key.as_str())
    }

    pub fn is_visible(&self, key: &str) -> bool {
        self.index.get(key).is_some_and(|&i| self.visible(i))
    }

    /// Current identifier of a control, computed from its current name and
    /// its ancestors' current names.
    pub fn identifier_of(&self, key: &str) -> Option<ControlIdentifier> {
        self.index.get(key).map(|&i| self.identifier(i))
    }

    pub fn tick(&self) -> u64 {
        self.state.tick
    }

    fn window_open(&self, id: &str) -> bool {
        self.state.open_windows.iter().any(|w| w == id)
    }

    fn visible(&self, i: usize) -> bool {
        let c = &self.spec.controls[i];
        let s = &self.state.controls[i];
        if !s.shown || s.visible_from > self.state.tick || !self.window_open(&c.window) {
            return false;
        }
        match &c.parent {
            Some(p) => self.visible(self.index[p]),
            None => true,
        }
    }

    fn current_name(&self, i: usize) -> &str {
        let c = &self.spec.controls[i];
        let mut name = c.name.as_str();
        for a in self.spec.aliases.iter().filter(|a| a.control == c.key) {
            let by_tick = a.from_tick.is_none_or(|t| self.state.tick >= t);
            let by_input = a.when_input.as_ref().is_none_or(|cond| {
                self.state.controls[self.index[&cond.control]]
                    .value
                    .as_deref()
                    .is_some_and(|v| v.starts_with(cond.prefix.as_str()))
            });
            if by_tick && by_input {
                name = a.name.as_str();
            }
        }
        name
    }

    fn window_title<'a>(&'a self, id: &'a str) -> &'a str {
        self.window_index
            .get(id)
            .map_or(id, |&w| self.spec.windows[w].title.as_str())
    }

    fn identifier(&self, i: usize) -> ControlIdentifier {
        let c = &self.spec.controls[i];
        let mut ancestors = Vec::new();
        let mut cur = c.parent.as_ref().map(|p| self.index[p]);
        while let Some(p) = cur {
            ancestors.push(self.current_name(p).to_string());
            cur = self.spec.controls[p].parent.as_ref().map(|k| self.index[k]);
        }
        ancestors.push(self.window_title(&c.window).to_string());
        ancestors.reverse();
        let name = self.current_name(i);
        let primary = c.automation_id.as_deref().filter(|s| !s.is_empty()).unwrap_or(name);
        ControlIdentifier::new(primary, c.control_type, ancestors)
    }

    fn enabled(&self, i: usize) -> bool {
        !self.spec.disabled.contains(&self.spec.controls[i].key)
    }

    fn control_node(&self, i: usize) -> ControlNode {
        let c = &self.spec.controls[i];
        let mut node = ControlNode::new(self.identifier(i), self.current_name(i));
        node.description = c.description.clone();
        node.patterns = c.patterns.clone();
        node.enabled = self.enabled(i);
        node
    }

    fn window_handle(&self, w: usize) -> Handle {
        (self.spec.controls.len() + w) as Handle
    }

    /// Pre-order snapshot of every visible control.
    pub fn visible_tree(&self) -> AccTreeSnapshot {
        let mut snap = AccTreeSnapshot {
            tick: self.state.tick,
            ..Default::default()
        };
        for wid in &self.state.open_windows {
            let w = self.window_index[wid];
            let ws = &self.spec.windows[w];
            snap.windows.push(WindowInfo {
                id: ws.id.clone(),
                title: ws.title.clone(),
                main: ws.main,
                modal: ws.modal,
                closable: ws.closable && !ws.main,
            });
            let wh = self.window_handle(w);
            let id = ControlIdentifier::new(ws.id.clone(), ControlType::Window, Vec::new());
            snap.controls.push(SnapshotControl {
                handle: wh,
                window: ws.id.clone(),
                node: ControlNode::new(id, ws.title.clone()),
                depth: 0,
                parent: None,
                selected: false,
            });
            let mut stack: Vec<(usize, usize, Handle)> = self.top_level[w].iter().rev().map(|&c| (c, 1, wh)).collect();
            while let Some((i, depth, parent)) = stack.pop() {
                if !self.visible(i) {
                    continue;
                }
                snap.controls.push(SnapshotControl {
                    handle: i as Handle,
                    window: ws.id.clone(),
                    node: self.control_node(i),
                    depth,
                    parent: Some(parent),
                    selected: self.state.controls[i].selected,
                });
                stack.extend(self.children[i].iter().rev().map(|&c| (c, depth + 1, i as Handle)));
            }
        }
        snap
    }

    fn log_entry(&mut self, kind: LogKind, target: String, detail: Option<String>) {
        let tick = self.state.tick;
        self.state.log.push(LogEntry {
            tick,
            kind,
            target,
            detail,
        });
    }

    fn control_index(&self, handle: Handle) -> Result<usize, BackendError> {
        let i = handle as usize;
        if i < self.spec.controls.len() && self.visible(i) {
            Ok(i)
        } else {
            Err(BackendError::TargetNotVisible { handle })
        }
    }

    fn check_reachable(&self, i: usize) -> Result<(), BackendError> {
        if !self.enabled(i) {
            return Err(BackendError::TargetDisabled {
                handle: i as Handle,
                reason: "control is disabled".into(),
            });
        }
        let own = &self.spec.controls[i].window;
        let blocker = self
            .state
            .open_windows
            .iter()
            .rev()
            .find(|w| *w != own && self.spec.windows[self.window_index[*w]].modal);
        if let Some(b) = blocker {
            let above = self.state.open_windows.iter().position(|w| w == b)
                > self.state.open_windows.iter().position(|w| w == own);
            if above {
                return Err(BackendError::TargetDisabled {
                    handle: i as Handle,
                    reason: format!("blocked by modal window {b:?}"),
                });
            }
        }
        Ok(())
    }

    fn substitute(&self, value: &str) -> String {
        match value.strip_prefix('$') {
            Some(var) => self.state.vars.get(var).cloned().unwrap_or_default(),
            None => value.to_string(),
        }
    }

    fn set_vars(&mut self, vars: &BTreeMap<String, String>) {
        let resolved: Vec<(String, String)> = vars.iter().map(|(k, v)| (k.clone(), self.substitute(v))).collect();
        self.state.vars.extend(resolved);
    }

    fn show(&mut self, i: usize, at: u64) {
        let latency = self
            .spec
            .latencies
            .get(&self.spec.controls[i].key)
            .copied()
            .unwrap_or(0);
        let s = &mut self.state.controls[i];
        s.shown = true;
        s.visible_from = at + latency;
    }

    fn open_window(&mut self, id: &str, at: u64) {
        self.state.open_windows.retain(|w| w != id);
        self.state.open_windows.push(id.to_string());
        for i in 0..self.spec.controls.len() {
            if self.spec.controls[i].window == id {
                if self.spec.controls[i].visible {
                    self.show(i, at);
                } else {
                    self.state.controls[i].shown = false;
                }
            }
        }
    }

    fn close_window(&mut self, id: &str) {
        self.state.open_windows.retain(|w| w != id);
        if let Some(f) = &self.state.focus {
            if self.spec.controls[self.index[f]].window == id {
                self.state.focus = None;
            }
        }
    }

    /// Applies one action and advances the clock by one tick.
    pub fn apply_action(&mut self, action: &UiAction) -> Result<(), BackendError> {
        match action {
            UiAction::Click { handle } => self.click(*handle)?,
            UiAction::Input { handle, text } => {
                let i = self.control_index(*handle)?;
                self.check_reachable(i)?;
                let c = &self.spec.controls[i];
                let accepts = matches!(c.control_type, ControlType::Edit | ControlType::ComboBox)
                    || c.patterns.contains(&Pattern::Value);
                if !accepts {
                    return Err(BackendError::TargetDisabled {
                        handle: *handle,
                        reason: format!("{} control does not accept text input", c.control_type),
                    });
                }
                let key = c.key.clone();
                let s = &mut self.state.controls[i];
                s.value = Some(text.clone());
                s.committed_value = None;
                self.state.focus = Some(key.clone());
                self.log_entry(LogKind::Input, key, Some(text.clone()));
            }
            UiAction::Shortcut { keys } => self.shortcut(keys)?,
            UiAction::CloseWindow { window } => {
                let Some(&w) = self.window_index.get(window).filter(|_| self.window_open(window)) else {
                    return Err(BackendError::UnknownWindow { id: window.clone() });
                };
                let ws = &self.spec.windows[w];
                if ws.main || !ws.closable {
                    return Err(BackendError::NotClosable { id: window.clone() });
                }
                self.close_window(window);
                self.log_entry(LogKind::CloseWindow, window.clone(), None);
            }
        }
        self.state.tick += 1;
        Ok(())
    }

    fn click(&mut self, handle: Handle) -> Result<(), BackendError> {
        let i = self.control_index(handle)?;
        self.check_reachable(i)?;
        let at = self.state.tick + 1;
        let c = self.spec.controls[i].clone();
        self.log_entry(LogKind::Click, c.key.clone(), None);
        self.state.controls[i].clicks += 1;
        if c.control_type == ControlType::TabItem {
            for j in 0..self.spec.controls.len() {
                let o = &self.spec.controls[j];
                if o.control_type == ControlType::TabItem && o.parent == c.parent && o.window == c.window {
                    self.state.controls[j].selected = j == i;
                }
            }
        }
        if c.patterns.contains(&Pattern::Toggle) {
            let s = &mut self.state.controls[i];
            s.toggled = !s.toggled;
        }
        if matches!(c.control_type, ControlType::Edit | ControlType::ComboBox) {
            self.state.focus = Some(c.key.clone());
        }
        let rules: Vec<_> = self
            .spec
            .reveal_rules
            .iter()
            .filter(|r| r.on == c.key)
            .cloned()
            .collect();
        for r in rules {
            for k in &r.hide {
                let j = self.index[k];
                self.state.controls[j].shown = false;
            }
            for k in &r.show {
                let j = self.index[k];
                self.show(j, at);
            }
            if let Some(w) = &r.close_window {
                self.close_window(w);
            }
            if let Some(w) = &r.open_window {
                self.open_window(w, at);
            }
            self.set_vars(&r.set_vars);
        }
        Ok(())
    }

    fn shortcut(&mut self, keys: &str) -> Result<(), BackendError> {
        let norm = keys.trim().to_ascii_uppercase();
        match norm.as_str() {
            "ENTER" => {
                if let Some(f) = self.state.focus.clone() {
                    let i = self.index[&f];
                    if self.spec.controls[i].commit_on_enter {
                        let s = &mut self.state.controls[i];
                        s.committed_value = s.value.clone();
                    }
                }
            }
            "ESC" => {
                let top = self.state.open_windows.last().cloned();
                if let Some(top) = top {
                    let ws = &self.spec.windows[self.window_index[&top]];
                    if !ws.main && ws.closable {
                        self.close_window(&top);
                    }
                }
            }
            _ => {
                let Some(rule) = self
                    .spec
                    .shortcuts
                    .iter()
                    .find(|s| s.keys.to_ascii_uppercase() == norm)
                    .cloned()
                else {
                    return Err(BackendError::UnknownShortcut { keys: keys.to_string() });
                };
                self.set_vars(&rule.set_vars);
                if let Some(w) = &rule.close_window {
                    self.close_window(w);
                }
            }
        }
        self.log_entry(LogKind::Shortcut, norm, None);
        Ok(())
    }

    fn require(&self, handle: Handle, any_of: &[Pattern]) -> Result<usize, BackendError> {
        let i = self.control_index(handle)?;
        let c = &self.spec.controls[i];
        if any_of.iter().any(|p| c.patterns.contains(p)) {
            Ok(i)
        } else {
            let names: Vec<&str> = any_of.iter().map(|p| p.as_str()).collect();
            Err(BackendError::UnsupportedPattern {
                handle,
                pattern: names.join("/"),
            })
        }
    }

    fn units(text: &str, unit: TextUnit) -> usize {
        match unit {
            TextUnit::Line => text.split('\n').count(),
            TextUnit::Paragraph => {
                let mut count = 0;
                let mut in_block = false;
                for line in text.split('\n') {
                    let blank = line.trim().is_empty();
                    if !blank && !in_block {
                        count += 1;
                    }
                    in_block = !blank;
                }
                count
            }
        }
    }

    fn quantize(p: f64, steps: u32) -> f64 {
        let steps = f64::from(steps.max(1));
        let k = (p * steps / 100.0 + 0.5) as u64;
        k as f64 * 100.0 / steps
    }

    fn pattern_op(&mut self, request: &PatternRequest) -> Result<PatternReply, BackendError> {
        match request {
            PatternRequest::SetScroll { handle, x, y } => {
                let i = self.require(*handle, &[Pattern::Scroll])?;
                let spec = self.spec.controls[i].scroll.unwrap_or(super::spec::ScrollSpec {
                    horizontal: false,
                    vertical: true,
                    x: 0.0,
                    y: 0.0,
                    steps: 1000,
                });
                for (v, supported, axis) in [(x, spec.horizontal, "horizontal"), (y, spec.vertical, "vertical")] {
                    if let Some(v) = v {
                        if !supported {
                            return Err(BackendError::UnsupportedPattern {
                                handle: *handle,
                                pattern: format!("Scroll ({axis})"),
                            });
                        }
                        if !(0.0..=100.0).contains(v) {
                            return Err(BackendError::OutOfRange {
                                reason: format!("{axis} position {v} outside 0..=100"),
                            });
                        }
                    }
                }
                let s = &mut self.state.controls[i];
                if let Some(v) = x {
                    s.scroll_x = Self::quantize(*v, spec.steps);
                }
                if let Some(v) = y {
                    s.scroll_y = Self::quantize(*v, spec.steps);
                }
                let reply = PatternReply::Scroll {
                    x: spec.horizontal.then_some(s.scroll_x),
                    y: spec.vertical.then_some(s.scroll_y),
                };
                let key = self.spec.controls[i].key.clone();
                self.log_entry(LogKind::Pattern, key, Some("set_scroll".into()));
                Ok(reply)
            }
            PatternRequest::SelectRange {
                handle,
                unit,
                start,
                end,
            } => {
                let i = self.require(*handle, &[Pattern::Text])?;
                let text = self.spec.controls[i].text.clone().unwrap_or_default();
                let count = Self::units(&text, *unit);
                if *start == 0 || start > end || *end > count {
                    return Err(BackendError::OutOfRange {
                        reason: format!("range {start}..={end} outside 1..={count}"),
                    });
                }
                self.state.controls[i].selection = Some(TextSelection {
                    unit: *unit,
                    start: *start,
                    end: *end,
                });
                let key = self.spec.controls[i].key.clone();
                self.log_entry(LogKind::Pattern, key, Some(format!("select {unit:?} {start}..={end}")));
                Ok(PatternReply::Range {
                    unit: *unit,
                    start: *start,
                    end: *end,
                })
            }
            PatternRequest::Select { handles } => {
                let idx = handles
                    .iter()
                    .map(|&h| self.require(h, &[Pattern::Select]))
                    .collect::<Result<Vec<_>, _>>()?;
                let parents: Vec<Option<String>> = idx.iter().map(|&i| self.spec.controls[i].parent.clone()).collect();
                for j in 0..self.spec.controls.len() {
                    let c = &self.spec.controls[j];
                    if c.patterns.contains(&Pattern::Select) && parents.contains(&c.parent) {
                        self.state.controls[j].selected = idx.contains(&j);
                    }
                }
                let keys: Vec<String> = idx.iter().map(|&i| self.spec.controls[i].key.clone()).collect();
                self.log_entry(LogKind::Pattern, keys.join(","), Some("select".into()));
                Ok(PatternReply::Selected {
                    handles: handles.clone(),
                })
            }
            PatternRequest::GetText { handle, expand } => {
                let i = self.require(*handle, &[Pattern::Value, Pattern::Text])?;
                let c = &self.spec.controls[i];
                let full = self.state.controls[i]
                    .value
                    .clone()
                    .or_else(|| c.text.clone())
                    .unwrap_or_default();
                let key = c.key.clone();
                let (text, partial) = match c.collapsed_value_len {
                    Some(n) if !*expand => (full.chars().take(n).collect(), full.chars().count() > n),
                    Some(_) => {
                        self.log_entry(LogKind::Expand, key, None);
                        (full, false)
                    }
                    None => (full, false),
                };
                Ok(PatternReply::Text { text, partial })
            }
            PatternRequest::SetToggle { handle, on } => {
                let i = self.require(*handle, &[Pattern::Toggle])?;
                self.state.controls[i].toggled = *on;
                let key = self.spec.controls[i].key.clone();
                self.log_entry(LogKind::Pattern, key, Some(format!("toggle {on}")));
                Ok(PatternReply::Toggle { on: *on })
            }
            PatternRequest::SetExpanded { handle, expanded } => {
                let i = self.require(*handle, &[Pattern::ExpandCollapse])?;
                self.state.controls[i].expanded = *expanded;
                let key = self.spec.controls[i].key.clone();
                self.log_entry(LogKind::Pattern, key, Some(format!("expanded {expanded}")));
                Ok(PatternReply::Expanded { expanded: *expanded })
            }
        }
    }
}

impl UiBackend for SimSession {
    fn snapshot(&mut self) -> Result<AccTreeSnapshot, BackendError> {
        Ok(self.visible_tree())
    }

    fn perform(&mut self, action: &UiAction) -> Result<(), BackendError> {
        self.apply_action(action)
    }

    fn wait(&mut self, ticks: u64) {
        self.state.tick += ticks;
    }

    fn reset(&mut self) -> Result<(), BackendError> {
        self.state = Self::initial_state(&self.spec);
        Ok(())
    }

    fn enter_context(&mut self, name: &str) -> Result<(), BackendError> {
        let Some(rule) = self.spec.context_rules.iter().find(|r| r.name == name).cloned() else {
            return Err(BackendError::UnknownContext { name: name.to_string() });
        };
        let at = self.state.tick;
        for k in &rule.show {
            let i = self.index[k];
            self.show(i, at);
        }
        self.state.context = Some(name.to_string());
        self.log_entry(LogKind::Context, name.to_string(), None);
        Ok(())
    }

    fn pattern(&mut self, request: &PatternRequest) -> Result<PatternReply, BackendError> {
        self.pattern_op(request)
    }
}
