//! IO, reports and the experiment runner behind the `dmlab` binary.

pub mod commands;
pub mod experiments;
pub mod limits;
pub mod parse;
pub mod plotdata;
pub mod report;
pub mod sampling;

pub use experiments::{run_example, ExperimentSpec, EXAMPLES};
pub use limits::Limits;
pub use plotdata::emit_plotdata;
pub use report::{Report, Status};
