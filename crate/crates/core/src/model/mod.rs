//! Controls, navigation graphs and compiled navigation forests.

mod forest;
mod graph;
mod identifier;
mod validate;

use alloc::collections::BTreeSet;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

pub use forest::{ForestBuilder, ForestNode, NavForest, NodeKind};
pub use graph::{ClickKind, Edge, NavGraph, NodeIndex, VIRTUAL_ROOT_NAME};
pub use identifier::{synthesize_identifier, ControlIdentifier, RawControlRecord, UNNAMED};
pub use validate::{validate_graph, IssueKind, Severity, ValidationIssue, ValidationReport};

macro_rules! string_enum {
    ($(#[$meta:meta])* $vis:vis enum $name:ident { $($variant:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        $vis enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => stringify!($variant)),+ }
            }
        }

        impl FromStr for $name {
            type Err = UnknownName;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $(stringify!($variant) => Ok($name::$variant),)+
                    _ => Err(UnknownName),
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

/// Returned when a string names no known control type or pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownName;

string_enum! {
    /// The UIA control type vocabulary.
    pub enum ControlType {
        AppBar, Button, Calendar, CheckBox, ComboBox, Custom, DataGrid, DataItem, Document,
        Edit, Group, Header, HeaderItem, Hyperlink, Image, List, ListItem, Menu, MenuBar,
        MenuItem, Pane, ProgressBar, RadioButton, ScrollBar, SemanticZoom, Separator, Slider,
        Spinner, SplitButton, StatusBar, Tab, TabItem, Table, Text, Thumb, TitleBar, ToolBar,
        ToolTip, Tree, TreeItem, Window,
    }
}

string_enum! {
    /// Capability tags a control exposes for programmatic operation.
    pub enum Pattern {
        Invoke, Scroll, Text, Value, Select, Toggle, ExpandCollapse,
    }
}

/// One UI control.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlNode {
    pub identifier: ControlIdentifier,
    pub name: String,
    pub control_type: ControlType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub patterns: BTreeSet<Pattern>,
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(default)]
    pub context_tags: BTreeSet<String>,
}

fn default_true() -> bool {
    true
}

impl ControlNode {
    pub fn new(identifier: ControlIdentifier, name: impl Into<String>) -> Self {
        let control_type = identifier.control_type;
        Self {
            identifier,
            name: name.into(),
            control_type,
            description: None,
            patterns: BTreeSet::new(),
            enabled: true,
            context_tags: BTreeSet::new(),
        }
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn with_patterns(mut self, patterns: impl IntoIterator<Item = Pattern>) -> Self {
        self.patterns.extend(patterns);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn control_type_vocabulary_is_uia_sized() {
        assert_eq!(ControlType::ALL.len(), 41);
        for t in ControlType::ALL {
            assert_eq!(t.as_str().parse::<ControlType>(), Ok(*t));
        }
        assert_eq!("Widget".parse::<ControlType>(), Err(UnknownName));
    }
}
