use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid control record: {0}")]
    InvalidRecord(String),
    #[error("malformed identifier: {0}")]
    MalformedIdentifier(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("graph failed validation: {0}")]
    InvalidGraph(String),
    #[error("graph is not acyclic")]
    NotAcyclic,
}

/// Why a (target, reference chain) access spec did not resolve to a path.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum ResolveError {
    #[error("unknown display id {id}")]
    UnknownId { id: i64 },
    #[error("target {target} lies in a shared subtree reachable through {} reference chains; name the entry with entry_ref_id", candidates.len())]
    AmbiguousEntry { target: u32, candidates: Vec<Vec<u32>> },
    #[error("reference chain does not lead to target {target}: {reason}")]
    RefMismatch { target: u32, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error("malformed topology text at {line}:{column}: {reason}")]
    MalformedText { line: usize, column: usize, reason: String },
    #[error("unknown display id {id}")]
    UnknownId { id: i64 },
    #[error("further_query needs at least one node id")]
    EmptyQuery,
}

/// Failures reported by a UI backend.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum BackendError {
    #[error("backend unavailable: {reason}")]
    Unavailable { reason: String },
    #[error("control {handle} is not visible")]
    TargetNotVisible { handle: u32 },
    #[error("control {handle} rejected the action: {reason}")]
    TargetDisabled { handle: u32, reason: String },
    #[error("control {handle} does not support the {pattern} pattern")]
    UnsupportedPattern { handle: u32, pattern: String },
    #[error("out of range: {reason}")]
    OutOfRange { reason: String },
    #[error("no open window {id:?}")]
    UnknownWindow { id: String },
    #[error("window {id:?} cannot be closed directly")]
    NotClosable { id: String },
    #[error("unknown context {name:?}")]
    UnknownContext { name: String },
    #[error("unknown key combination {keys:?}")]
    UnknownShortcut { keys: String },
}

/// Problems found while loading a simulated application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("invalid app spec: {0}")]
    SpecValidation(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RipError {
    #[error("invalid ripper config: {0}")]
    InvalidConfig(String),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(BackendError),
}

/// A `visit` command array that could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum CommandError {
    #[error("command {index} is malformed: {reason}")]
    MalformedCommand { index: usize, reason: String },
    #[error("further_query at command {index} cannot be mixed with other commands")]
    MixedFurtherQuery { index: usize },
}

/// A control considered while looking for an expected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub identifier: String,
    pub name: String,
    pub score: f64,
}

/// Why one visit command failed.
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum VisitError {
    #[error("unknown display id {id}")]
    UnknownId { id: i64 },
    #[error("target {target} is reachable through {} reference chains; name one with entry_ref_id", candidates.len())]
    AmbiguousEntry { target: u32, candidates: Vec<Vec<u32>> },
    #[error("reference chain does not lead to target {target}: {reason}")]
    RefMismatch { target: u32, reason: String },
    #[error("control {expected} not found after {retries} retries")]
    ControlNotFound {
        expected: String,
        hop: usize,
        retries: usize,
        nearest: Vec<Candidate>,
    },
    #[error("could not close window {window:?}: {reason}")]
    WindowCloseFailed { window: String, reason: String },
    #[error("control {identifier} is disabled ({state})")]
    DisabledControl {
        identifier: String,
        name: String,
        enabled: bool,
        state: String,
    },
    #[error("backend rejected the action: {message}")]
    Backend { message: String },
    #[error("further_query failed: {message}")]
    Query { message: String },
}

impl From<ResolveError> for VisitError {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::UnknownId { id } => VisitError::UnknownId { id },
            ResolveError::AmbiguousEntry { target, candidates } => VisitError::AmbiguousEntry { target, candidates },
            ResolveError::RefMismatch { target, reason } => VisitError::RefMismatch { target, reason },
        }
    }
}

impl From<BackendError> for VisitError {
    fn from(e: BackendError) -> Self {
        VisitError::Backend {
            message: alloc::format!("{e}"),
        }
    }
}

/// A malformed interaction op or target.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum OpError {
    #[error("{value:?} is a topology display id; interaction ops take on-screen labels")]
    StaticIdProhibited { value: String },
    #[error("{value:?} is not an on-screen label")]
    InvalidLabel { value: String },
    #[error("malformed op: {reason}")]
    MalformedOp { reason: String },
}

/// A script that cannot be run as written.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum ScriptError {
    #[error("turn {turn} is malformed: {reason}")]
    MalformedTurn { turn: usize, reason: String },
    #[error("turn {turn} mixes a visit array with interaction ops")]
    MixedTurn { turn: usize },
    #[error("turn {turn}: {error}")]
    Command { turn: usize, error: CommandError },
    #[error("turn {turn}: {error}")]
    Op { turn: usize, error: OpError },
}
