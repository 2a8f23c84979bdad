//! Command implementations behind the `cspdich` binary. Each command
//! returns the text it prints so the binary only handles exit codes.

pub mod check;
pub mod classify;
pub mod error;
pub mod eval;
pub mod file;
pub mod reduce;

pub use error::{CliError, CliResult};
