//! Host-side companion to `vake-core`: the command-line driver and the file
//! formats it reads and writes.

pub mod cardfile;
pub mod cli;
pub mod eventlog;
pub mod report;
pub mod runner;
pub mod scenario_file;
pub mod vectors;

pub use cli::run_cli;
