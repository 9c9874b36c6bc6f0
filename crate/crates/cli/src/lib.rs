//! Job files, command dispatch and reports for the `gcorner` binary.

pub mod commands;
pub mod report;
pub mod spec;

pub use commands::{run, run_source, Command, JobSpec, Options, Outcome};
pub use report::Report;
pub use spec::{parse_spec, ParseError, SpecFile};
