//! Instance generation, file formats and the property suites behind `drfeas verify`.

pub mod generate;
pub mod io;
pub mod suites;
pub mod syntax;

pub use generate::{default_start, generate, Generator, InstanceSpec};
pub use io::{load_problem, load_run, save_problem, save_run, RunMetadata};
pub use suites::{run_suite, SuiteCase, SUITES};
