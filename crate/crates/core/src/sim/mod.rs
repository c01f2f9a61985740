//! Deterministic scripted application used as the reference backend.
//!
//! Time is a logical tick counter: every action and every explicit wait
//! advances it. A control revealed by an action at tick `t` becomes visible
//! at `t + 1 + latency`.

mod assert;
mod session;
mod spec;

pub use assert::{assert_state, Assertion, AssertionReport, AssertionResult, Verdict};
pub use session::{ControlState, LogEntry, LogKind, SimSession, SimState, TextSelection};
pub use spec::{
    AliasSpec, ContextRule, ControlSpec, InputCondition, RevealRule, ScrollSpec, ShortcutRule, SimAppSpec, WindowSpec,
};
