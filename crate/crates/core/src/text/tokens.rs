use serde::{Deserialize, Serialize};

use super::parse_topology;

/// Context-size proxy for topology text: one token per four bytes, rounded up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenEstimate {
    pub tokens: usize,
    /// Controls found by parsing the text; 0 when it does not parse.
    pub controls: usize,
    pub per_control: f64,
}

pub fn estimate_tokens(text: &str) -> TokenEstimate {
    let tokens = text.len().div_ceil(4);
    let controls = parse_topology(text).map(|v| v.nodes().len()).unwrap_or(0);
    let per_control = if controls == 0 {
        0.0
    } else {
        tokens as f64 / controls as f64
    };
    TokenEstimate {
        tokens,
        controls,
        per_control,
    }
}
