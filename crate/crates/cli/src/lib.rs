//! Command-line front end: problem files, CSV I/O, subcommands and the
//! built-in verification suite.

pub mod commands;
pub mod csvio;
pub mod problem_file;
pub mod verify;
