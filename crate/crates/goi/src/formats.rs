//! On-disk JSON documents and atomic output.
//!
//! Every document written here is a JSON object with a `schema` version and
//! a `kind`, keys sorted, pretty-printed with a trailing newline, so equal
//! inputs give byte-equal files.

use std::fs;
use std::io::Write;
use std::path::Path;

use goi_core::compiler::Threshold;
use goi_core::model::{validate_graph, Edge, NavForest, NavGraph};
use goi_core::ripper::{RipOutcome, RipWarning, RipperConfig};
use goi_core::script::{parse_script, Turn};
use goi_core::sim::{Assertion, SimAppSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::Error;

pub const SCHEMA: u64 = 1;

/// Schema versions by document kind, as printed by `--version`.
pub const SCHEMAS: &[(&str, u64)] = &[
    ("app", SCHEMA),
    ("rip_config", SCHEMA),
    ("graph", SCHEMA),
    ("forest", SCHEMA),
    ("script", SCHEMA),
    ("assertions", SCHEMA),
    ("exec_report", SCHEMA),
    ("metrics", SCHEMA),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub graph: NavGraph,
    pub warnings: Vec<RipWarning>,
    /// Backend actions the rip spent.
    pub actions: usize,
    pub complete: bool,
}

impl From<RipOutcome> for GraphDoc {
    fn from(o: RipOutcome) -> Self {
        Self {
            graph: o.graph,
            warnings: o.warnings,
            actions: o.actions,
            complete: o.complete,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestDoc {
    pub threshold: Threshold,
    pub forest: NavForest,
    /// The acyclic graph the forest was compiled from.
    pub dag: NavGraph,
    pub removed_edges: Vec<Edge>,
}

pub fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_json(path: &Path) -> Result<Value, Error> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::new("format.invalid_json", format!("{}: {e}", path.display())))
}

fn decode<T: DeserializeOwned>(path: &Path, v: Value) -> Result<T, Error> {
    serde_json::from_value(v).map_err(|e| Error::new("format.invalid_document", format!("{}: {e}", path.display())))
}

/// Removes and checks `schema` (and `kind`, when `kind` is given). With
/// `required`, a missing `schema` is an error.
fn take_header(path: &Path, obj: &mut Map<String, Value>, kind: Option<&str>, required: bool) -> Result<(), Error> {
    match obj.remove("schema") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA) => {}
        Some(other) => {
            return Err(Error::new(
                "format.schema_mismatch",
                format!(
                    "{}: schema {other} is not supported (expected {SCHEMA})",
                    path.display()
                ),
            ))
        }
        None if required => {
            return Err(Error::new(
                "format.schema_mismatch",
                format!("{}: missing schema version", path.display()),
            ))
        }
        None => {}
    }
    if let Some(kind) = kind {
        match obj.remove("kind") {
            Some(Value::String(k)) if k == kind => {}
            Some(other) => {
                return Err(Error::new(
                    "format.wrong_kind",
                    format!("{}: expected a {kind} document, found {other}", path.display()),
                ))
            }
            None if required => {
                return Err(Error::new(
                    "format.wrong_kind",
                    format!("{}: missing kind (expected {kind})", path.display()),
                ))
            }
            None => {}
        }
    }
    Ok(())
}

fn load_object(path: &Path, kind: Option<&str>, required: bool) -> Result<Value, Error> {
    let mut v = parse_json(path)?;
    if let Value::Object(obj) = &mut v {
        take_header(path, obj, kind, required)?;
    } else if required {
        return Err(Error::new(
            "format.invalid_document",
            format!("{}: expected a JSON object", path.display()),
        ));
    }
    Ok(v)
}

pub fn load_app(path: &Path) -> Result<SimAppSpec, Error> {
    decode(path, load_object(path, None, false)?)
}

pub fn load_rip_config(path: &Path) -> Result<RipperConfig, Error> {
    let cfg: RipperConfig = decode(path, load_object(path, None, false)?)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_graph(path: &Path) -> Result<GraphDoc, Error> {
    let doc: GraphDoc = decode(path, load_object(path, Some("graph"), true)?)?;
    let report = validate_graph(&doc.graph);
    if let Some(issue) = report.errors().next() {
        let detail = serde_json::to_string(&issue.kind).unwrap_or_default();
        return Err(Error::new(
            "model.invalid_graph",
            format!("{}: {detail}", path.display()),
        ));
    }
    Ok(doc)
}

pub fn load_forest(path: &Path) -> Result<ForestDoc, Error> {
    let doc: ForestDoc = decode(path, load_object(path, Some("forest"), true)?)?;
    if let Some(problem) = doc.forest.check_invariants().into_iter().next() {
        return Err(Error::new(
            "model.invalid_forest",
            format!("{}: {problem}", path.display()),
        ));
    }
    Ok(doc)
}

/// A script file: a JSON array of turns or `{"schema": 1, "turns": [...]}`.
pub fn load_script(path: &Path) -> Result<Vec<Turn>, Error> {
    let v = load_object(path, None, false)?;
    Ok(parse_script(&v.to_string())?)
}

/// An assertion file: a JSON array or `{"schema": 1, "assertions": [...]}`.
pub fn load_assertions(path: &Path) -> Result<Vec<Assertion>, Error> {
    let v = load_object(path, None, false)?;
    let list = match v {
        Value::Object(mut obj) => {
            let list = obj.remove("assertions").unwrap_or(Value::Null);
            if !obj.is_empty() || !list.is_array() {
                return Err(Error::new(
                    "format.invalid_document",
                    format!("{}: expected an assertions array", path.display()),
                ));
            }
            list
        }
        other => other,
    };
    decode(path, list)
}

/// Wraps `body` (which must serialize to an object) with `schema` and `kind`.
pub fn document<T: Serialize>(kind: &str, body: &T) -> Result<Value, Error> {
    let mut v = serde_json::to_value(body).map_err(|e| Error::new("format.encode_failed", e.to_string()))?;
    let Value::Object(obj) = &mut v else {
        return Err(Error::new(
            "format.encode_failed",
            format!("{kind} body is not an object"),
        ));
    };
    obj.insert("schema".into(), SCHEMA.into());
    obj.insert("kind".into(), kind.into());
    Ok(v)
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_text(v: &Value) -> String {
    // serde_json's map is ordered by key unless `preserve_order` is enabled
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

/// Writes to stdout for `-`, otherwise through a temporary file renamed
/// into place.
pub fn write_output(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e));
    }
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.flush())
        .map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
