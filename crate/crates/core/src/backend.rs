//! The abstract UI backend the ripper, the visit engine and the pattern
//! operations drive.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::BackendError;
use crate::model::{ControlIdentifier, ControlNode};

/// Backend-local handle of a visible control, valid until the next action.
pub type Handle = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub id: String,
    pub title: String,
    pub main: bool,
    pub modal: bool,
    /// Whether the window offers a title-bar close affordance.
    pub closable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotControl {
    pub handle: Handle,
    pub window: String,
    pub node: ControlNode,
    /// Depth in the accessibility tree; window roots are at depth 0.
    pub depth: usize,
    pub parent: Option<Handle>,
    #[serde(default)]
    pub selected: bool,
}

/// Visible accessibility tree at one instant, controls in pre-order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccTreeSnapshot {
    pub tick: u64,
    /// Open windows, oldest first; the last one is topmost.
    pub windows: Vec<WindowInfo>,
    pub controls: Vec<SnapshotControl>,
}

impl AccTreeSnapshot {
    pub fn topmost_window(&self) -> Option<&WindowInfo> {
        self.windows.last()
    }

    pub fn window(&self, id: &str) -> Option<&WindowInfo> {
        self.windows.iter().find(|w| w.id == id)
    }

    pub fn in_window<'a>(&'a self, window: &'a str) -> impl Iterator<Item = &'a SnapshotControl> + 'a {
        self.controls.iter().filter(move |c| c.window == window)
    }

    pub fn find(&self, id: &ControlIdentifier) -> Option<&SnapshotControl> {
        self.controls.iter().find(|c| &c.node.identifier == id)
    }

    pub fn by_handle(&self, handle: Handle) -> Option<&SnapshotControl> {
        self.controls.iter().find(|c| c.handle == handle)
    }

    pub fn identifiers(&self) -> BTreeSet<&ControlIdentifier> {
        self.controls.iter().map(|c| &c.node.identifier).collect()
    }

    /// Names of a control's ancestors, nearest last, the control excluded.
    pub fn ancestor_names(&self, handle: Handle) -> Vec<&str> {
        let mut names = Vec::new();
        let mut cur = self.by_handle(handle).and_then(|c| c.parent);
        while let Some(h) = cur {
            let Some(c) = self.by_handle(h) else { break };
            names.push(c.node.name.as_str());
            cur = c.parent;
        }
        names.reverse();
        names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum UiAction {
    Click {
        handle: Handle,
    },
    /// Replaces the control's content with `text`.
    Input {
        handle: Handle,
        text: String,
    },
    Shortcut {
        keys: String,
    },
    CloseWindow {
        window: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextUnit {
    Line,
    Paragraph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "request", rename_all = "snake_case")]
pub enum PatternRequest {
    /// Percentages in `[0, 100]`; `None` leaves that axis alone.
    SetScroll {
        handle: Handle,
        x: Option<f64>,
        y: Option<f64>,
    },
    /// 1-based inclusive range.
    SelectRange {
        handle: Handle,
        unit: TextUnit,
        start: usize,
        end: usize,
    },
    /// Replaces the selection in each target's container; all or nothing.
    Select {
        handles: Vec<Handle>,
    },
    /// `expand` performs whatever reveal step the control needs to show its
    /// complete content.
    GetText {
        handle: Handle,
        expand: bool,
    },
    SetToggle {
        handle: Handle,
        on: bool,
    },
    SetExpanded {
        handle: Handle,
        expanded: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reply", rename_all = "snake_case")]
pub enum PatternReply {
    Scroll {
        x: Option<f64>,
        y: Option<f64>,
    },
    Range {
        unit: TextUnit,
        start: usize,
        end: usize,
    },
    Selected {
        handles: Vec<Handle>,
    },
    /// `partial` is set when a collapsed control returned only a prefix.
    Text {
        text: String,
        #[serde(default)]
        partial: bool,
    },
    Toggle {
        on: bool,
    },
    Expanded {
        expanded: bool,
    },
}

pub trait UiBackend {
    fn snapshot(&mut self) -> Result<AccTreeSnapshot, BackendError>;

    fn perform(&mut self, action: &UiAction) -> Result<(), BackendError>;

    /// Lets `ticks` units of time pass without acting.
    fn wait(&mut self, ticks: u64);

    /// Returns the application to its initial state.
    fn reset(&mut self) -> Result<(), BackendError>;

    /// Runs the setup that puts the application into a named context.
    fn enter_context(&mut self, name: &str) -> Result<(), BackendError>;

    fn pattern(&mut self, request: &PatternRequest) -> Result<PatternReply, BackendError>;
}

impl<B: UiBackend + ?Sized> UiBackend for &mut B {
    fn snapshot(&mut self) -> Result<AccTreeSnapshot, BackendError> {
        (**self).snapshot()
    }

    fn perform(&mut self, action: &UiAction) -> Result<(), BackendError> {
        (**self).perform(action)
    }

    fn wait(&mut self, ticks: u64) {
        (**self).wait(ticks)
    }

    fn reset(&mut self) -> Result<(), BackendError> {
        (**self).reset()
    }

    fn enter_context(&mut self, name: &str) -> Result<(), BackendError> {
        (**self).enter_context(name)
    }

    fn pattern(&mut self, request: &PatternRequest) -> Result<PatternReply, BackendError> {
        (**self).pattern(request)
    }
}
