//! Command-line harness around the prediction library: flat key=value
//! configuration, fixed-schema CSV/JSON output, and the six experiment
//! subcommands.

pub mod commands;
pub mod config;
pub mod output;
pub mod shor;
