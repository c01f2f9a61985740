use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::backend::{AccTreeSnapshot, Handle};
use crate::error::OpError;
use crate::model::{ControlType, Pattern};

/// An on-screen label such as `A`, `Z`, `AA` or `HF`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(String);

impl Label {
    /// Accepts letters only (case-insensitive). Digit strings are topology
    /// display ids and are refused as such.
    pub fn parse(s: &str) -> Result<Self, OpError> {
        let t = s.trim();
        if !t.is_empty() && t.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
            return Err(OpError::StaticIdProhibited { value: s.into() });
        }
        if t.is_empty() || !t.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(OpError::InvalidLabel { value: s.into() });
        }
        Ok(Label(t.to_ascii_uppercase()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Zero-based position in labelling order.
    pub fn index(&self) -> usize {
        self.0.bytes().fold(0usize, |acc, b| {
            acc.saturating_mul(26).saturating_add(usize::from(b - b'A' + 1))
        }) - 1
    }

    pub fn from_index(index: usize) -> Self {
        Label(label_for(index))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Bijective base-26 label for a zero-based index: 0 → `A`, 25 → `Z`,
/// 26 → `AA`.
pub fn label_for(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'A' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenLabel {
    pub label: Label,
    pub handle: Handle,
    pub name: String,
    pub control_type: ControlType,
    pub window: String,
    pub patterns: Vec<Pattern>,
}

/// Labels every visible control in snapshot pre-order. Window entries are
/// not labelled.
pub fn assign_labels(snapshot: &AccTreeSnapshot) -> Vec<ScreenLabel> {
    snapshot
        .controls
        .iter()
        .filter(|c| c.node.control_type != ControlType::Window)
        .enumerate()
        .map(|(i, c)| ScreenLabel {
            label: Label::from_index(i),
            handle: c.handle,
            name: c.node.name.clone(),
            control_type: c.node.control_type,
            window: c.window.clone(),
            patterns: c.node.patterns.iter().copied().collect(),
        })
        .collect()
}
