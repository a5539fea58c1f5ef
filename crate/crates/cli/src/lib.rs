//! Command-line front end: configuration, verbs and report writers.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; for certify and diagnose verbs, every check passed |
//! | 1 | a certification or diagnostic check failed |
//! | 2 | configuration error (the message names the key) |
//! | 3 | blow-up; the message carries the last valid time |
//! | 4 | IO failure |

pub mod commands;
pub mod config;
mod error;
pub mod output;

pub use commands::{run_verb, Outcome};
pub use config::{Overrides, RunConfig, Verb};
pub use error::CliError;
