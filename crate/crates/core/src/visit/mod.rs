//! Declarative visit commands and their execution against a live UI.

mod command;
mod execute;
mod fuzzy;

pub use command::{
    commands_from_value, filter_commands, normalize_key_combination, parse_commands, DropReason, Filtered, VisitCommand,
};
pub use execute::{
    execute_visit, execute_visit_with, navigate_path, ActionRecord, ActionRole, CommandReport, ExecutionReport,
    NavOutcome, Outcome, ScreenRef, Trace, CLOSE_BUTTONS,
};
pub use fuzzy::{ancestor_similarity, edit_similarity, fuzzy_match, match_score, rank_candidates, MatchPolicy};
