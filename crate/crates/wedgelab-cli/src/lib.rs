//! Model documents, suite orchestration and report output for the `wedgelab` command.

pub mod build;
pub mod error;
pub mod model;
pub mod output;
pub mod run;

pub use error::CliError;
pub use model::{parse_model, parse_model_str, ModelDocument, Suite};
pub use run::{run_suite, RunOptions, RunOutcome};
