//! File formats, pipeline stages and the command-line driver built on
//! `goi-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod pipeline;

pub use error::Error;
pub use goi_core;
