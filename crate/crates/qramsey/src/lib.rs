//! Command-line front end for `qramsey-core`: input formats, random
//! instances, JSON reports and the `qramsey` command.

pub mod cli;
pub mod format;
pub mod instances;
pub mod report;
