//! File formats, scenario files and the `dsalink` command-line tool built on
//! [`dsalink_core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod formats;
pub mod scenario;

pub use commands::CommandResult;
pub use error::{CliError, CliResult};
