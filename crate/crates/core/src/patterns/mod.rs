//! State and observation declarations over control patterns, addressed by
//! alphabetic on-screen labels.
//!
//! Labels are assigned afresh from each snapshot in pre-order. Ops take
//! labels, never topology display ids; a numeric target is refused with
//! [`OpError::StaticIdProhibited`](crate::error::OpError::StaticIdProhibited).
//! New patterns are added as an [`InteractionOp`] variant plus a backend
//! [`PatternRequest`](crate::backend::PatternRequest).

mod labels;
mod ops;

pub use labels::{assign_labels, label_for, Label, ScreenLabel};
pub use ops::{
    click, get_texts, parse_op, run_op, select_controls, select_lines, select_paragraphs, set_expanded,
    set_scrollbar_pos, set_toggle_state, InteractionOp, PatternPayload, PatternResult, PatternStatus, TextConfig,
    TextEntry, TextMode,
};
