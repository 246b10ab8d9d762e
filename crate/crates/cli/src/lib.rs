//! Batch front end for the `adelic` library: descriptor parsing, dispatch and
//! deterministic report emission.

pub mod descriptor;
pub mod output;
pub mod run;

use thiserror::Error;

pub use descriptor::{emit_descriptor, parse_descriptor, Descriptor, Format};
pub use output::{emit, Report};
pub use run::run;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    /// Unreadable input, malformed text or a descriptor violating the schema.
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Core(#[from] adelic::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use adelic::Error as E;
        match self {
            CliError::Schema(_) | CliError::Core(E::Parse(_)) => 2,
            CliError::Core(E::NumericalGuard(_)) => 3,
            CliError::Core(E::Argument(_) | E::Infeasible(_) | E::Unsupported(_)) => 4,
        }
    }
}
