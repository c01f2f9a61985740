use std::fmt;
use std::path::Path;

use goi_core::error::{CompileError, RipError, ScriptError, SimError, TextError};
use serde_json::json;

/// A failure with a module-qualified code such as `compile.not_acyclic`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Error {
    pub code: String,
    pub message: String,
}

impl Error {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io.failed", format!("{}: {e}", path.display()))
    }

    /// The JSON object written to stderr.
    pub fn to_json(&self) -> String {
        json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for Error {}

/// `SpecValidation` -> `spec_validation`.
fn snake(variant: &str) -> String {
    let mut out = String::new();
    for (i, c) in variant.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

fn variant_name<T: fmt::Debug>(e: &T) -> String {
    let dbg = format!("{e:?}");
    let end = dbg.find(|c: char| !c.is_ascii_alphanumeric()).unwrap_or(dbg.len());
    snake(&dbg[..end])
}

/// Reads the serde `code` tag when the error carries one.
fn tagged_code<T: serde::Serialize>(e: &T) -> Option<String> {
    serde_json::to_value(e).ok()?.get("code")?.as_str().map(str::to_owned)
}

macro_rules! qualified {
    ($ty:ty, $module:literal) => {
        impl From<$ty> for Error {
            fn from(e: $ty) -> Self {
                Error::new(format!("{}.{}", $module, variant_name(&e)), e.to_string())
            }
        }
    };
}

qualified!(SimError, "sim");
qualified!(RipError, "rip");
qualified!(CompileError, "compile");
qualified!(TextError, "text");

impl From<ScriptError> for Error {
    fn from(e: ScriptError) -> Self {
        let code = match &e {
            ScriptError::Command { error, .. } => tagged_code(error).map(|c| format!("visit.{c}")),
            ScriptError::Op { error, .. } => tagged_code(error).map(|c| format!("patterns.{c}")),
            _ => tagged_code(&e).map(|c| format!("script.{c}")),
        };
        Error::new(
            code.unwrap_or_else(|| format!("script.{}", variant_name(&e))),
            e.to_string(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use goi_core::error::OpError;

    #[test]
    fn codes_are_module_qualified() {
        assert_eq!(
            Error::from(SimError::SpecValidation("x".into())).code,
            "sim.spec_validation"
        );
        assert_eq!(Error::from(CompileError::NotAcyclic).code, "compile.not_acyclic");
        assert_eq!(
            Error::from(ScriptError::MixedTurn { turn: 1 }).code,
            "script.mixed_turn"
        );
        let op = ScriptError::Op {
            turn: 0,
            error: OpError::StaticIdProhibited { value: "7".into() },
        };
        assert_eq!(Error::from(op).code, "patterns.static_id_prohibited");
    }

    #[test]
    fn stderr_shape() {
        let v: serde_json::Value = serde_json::from_str(&Error::new("a.b", "c").to_json()).unwrap();
        assert_eq!(v["error"]["code"], "a.b");
        assert_eq!(v["error"]["message"], "c");
    }
}
