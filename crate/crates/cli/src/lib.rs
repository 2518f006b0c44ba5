//! Configuration and subcommands of the `gkflow` binary.

pub mod commands;
pub mod config;
