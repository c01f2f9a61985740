#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod backend;
pub mod compiler;
pub mod error;
pub mod model;
pub mod patterns;
pub mod ripper;
pub mod script;
pub mod sim;
pub mod text;
pub mod visit;
