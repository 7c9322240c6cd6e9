//! File formats, run reports and the `qdistill` command line on top of
//! [`qdistill_core`].

pub mod cli;
pub mod commands;
pub mod io;
pub mod report;
