//! XPath-like control identifiers: `primary_id|control_type|ancestor_path`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ControlType;
use crate::error::ModelError;

/// Placeholder primary id for controls with neither a stable id nor a name.
pub const UNNAMED: &str = "[Unnamed]";

/// Identity of one control, stable across sessions of the same application build.
///
/// Index-based addressing is deliberately absent: dynamic menus shift indices,
/// so a control is located by its own id or name, its type, and the names of
/// its ancestors in the accessibility tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ControlIdentifier {
    pub primary_id: String,
    pub control_type: ControlType,
    /// Ancestor names, root first. Never contains empty names.
    pub ancestor_path: Vec<String>,
}

/// Raw properties of a control as read from an accessibility tree.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RawControlRecord {
    pub stable_id: Option<String>,
    pub name: Option<String>,
    pub control_type: Option<String>,
    pub ancestors: Vec<String>,
}

impl RawControlRecord {
    pub fn new(control_type: &str) -> Self {
        Self {
            control_type: Some(control_type.into()),
            ..Self::default()
        }
    }

    pub fn stable_id(mut self, id: &str) -> Self {
        self.stable_id = Some(id.into());
        self
    }

    pub fn name(mut self, name: &str) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn ancestors<I, S>(mut self, ancestors: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.ancestors = ancestors.into_iter().map(Into::into).collect();
        self
    }
}

fn non_empty(s: &Option<String>) -> Option<&str> {
    s.as_deref().filter(|s| !s.is_empty())
}

/// Builds the identifier for a raw record, applying the
/// `stable_id -> name -> [Unnamed]` fallback chain.
pub fn synthesize_identifier(raw: &RawControlRecord) -> Result<ControlIdentifier, ModelError> {
    let type_name =
        non_empty(&raw.control_type).ok_or_else(|| ModelError::InvalidRecord("missing control_type".into()))?;
    let control_type = ControlType::from_str(type_name)
        .map_err(|_| ModelError::InvalidRecord(alloc::format!("unknown control_type {type_name:?}")))?;
    let primary_id = non_empty(&raw.stable_id)
        .or_else(|| non_empty(&raw.name))
        .unwrap_or(UNNAMED)
        .to_string();
    let ancestor_path = raw
        .ancestors
        .iter()
        .map(|a| if a.is_empty() { UNNAMED.to_string() } else { a.clone() })
        .collect();
    Ok(ControlIdentifier {
        primary_id,
        control_type,
        ancestor_path,
    })
}

impl ControlIdentifier {
    pub fn new<S: Into<String>>(primary_id: S, control_type: ControlType, ancestor_path: Vec<String>) -> Self {
        Self {
            primary_id: primary_id.into(),
            control_type,
            ancestor_path,
        }
    }

    /// Canonical string form, with `\`, `|` and `/` backslash-escaped inside components.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        escape_into(&mut out, &self.primary_id);
        out.push('|');
        out.push_str(self.control_type.as_str());
        out.push('|');
        for (i, a) in self.ancestor_path.iter().enumerate() {
            if i > 0 {
                out.push('/');
            }
            escape_into(&mut out, a);
        }
        out
    }

    /// Name of the nearest ancestor, if any.
    pub fn parent_name(&self) -> Option<&str> {
        self.ancestor_path.last().map(String::as_str)
    }
}

fn escape_into(out: &mut String, s: &str) {
    for c in s.chars() {
        if matches!(c, '\\' | '|' | '/') {
            out.push('\\');
        }
        out.push(c);
    }
}

/// Splits on unescaped `sep`, unescaping each piece.
fn split_escaped(s: &str, sep: char) -> Result<Vec<String>, ModelError> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(n) => cur.push(n),
                None => return Err(ModelError::MalformedIdentifier("trailing backslash".into())),
            }
        } else if c == sep {
            parts.push(core::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    parts.push(cur);
    Ok(parts)
}

fn unescape(s: &str) -> Result<String, ModelError> {
    let mut out = split_escaped(s, '|')?;
    // callers only pass pieces free of unescaped '|'
    Ok(out.remove(0))
}

/// Splits on unescaped `sep` without unescaping, so nested splits still see escapes.
fn split_raw(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        if escaped {
            escaped = false;
        } else if c == '\\' {
            escaped = true;
        } else if c == sep {
            parts.push(&s[start..i]);
            start = i + 1;
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for ControlIdentifier {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = split_raw(s, '|');
        if parts.len() != 3 {
            return Err(ModelError::MalformedIdentifier(alloc::format!(
                "expected 3 '|'-separated components, found {}",
                parts.len()
            )));
        }
        let primary_id = unescape(parts[0])?;
        if primary_id.is_empty() {
            return Err(ModelError::MalformedIdentifier("empty primary_id".into()));
        }
        let control_type = ControlType::from_str(parts[1])
            .map_err(|_| ModelError::MalformedIdentifier(alloc::format!("unknown control_type {:?}", parts[1])))?;
        let ancestor_path = if parts[2].is_empty() {
            Vec::new()
        } else {
            let names = split_escaped(parts[2], '/')?;
            if names.iter().any(String::is_empty) {
                return Err(ModelError::MalformedIdentifier("empty ancestor name".into()));
            }
            names
        };
        Ok(ControlIdentifier {
            primary_id,
            control_type,
            ancestor_path,
        })
    }
}

impl fmt::Display for ControlIdentifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}

impl TryFrom<String> for ControlIdentifier {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ControlIdentifier> for String {
    fn from(id: ControlIdentifier) -> Self {
        id.canonical()
    }
}
