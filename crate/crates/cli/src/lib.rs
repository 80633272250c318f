//! Verification suites and data emitters behind the `hquot` binary.

pub mod commands;
pub mod output;
pub mod range;
pub mod report;
pub mod suites;
