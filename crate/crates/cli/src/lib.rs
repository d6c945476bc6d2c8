//! Orchestration behind the `rollwave` command-line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod overlay;
pub mod svg;
pub mod sweep;

pub use error::{CliError, Result};
