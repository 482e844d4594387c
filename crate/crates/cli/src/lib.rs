//! Library side of the command-line tool: config parsing, file formats,
//! reports, and the command implementations (kept callable so the test
//! suites can drive them without spawning processes).

pub mod commands;
pub mod config;
pub mod error;
pub mod formats;
pub mod report;
pub mod units_report;

pub use error::CliError;
