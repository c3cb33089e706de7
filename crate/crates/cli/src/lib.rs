//! Front end for `rog`: problem files, subcommands, reports and exit codes.
//!
//! Exit codes: 0 ROG, SufficientROG, success or hull member; 10 NotROG or
//! outside the hull; 20 Unknown; 2 parse or usage error; 3 dimension error;
//! 4 input or precondition error; 5 numerical failure; 6 failed invariant or
//! verification.

// negated comparisons make NaN residuals fail the checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod error;
pub mod problem;

pub use commands::{hull_check, run, verify, Command, Report, Verification};
pub use error::{CliError, CliResult};
pub use problem::ProblemFile;
