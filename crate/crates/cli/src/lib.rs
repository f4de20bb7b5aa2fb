//! Library side of the `gns` explorer: spec parsing and the subcommands.

pub mod spec;
pub mod tasks;
