//! Command-line companion to `hsfnet-core`: file formats, reports, sweeps
//! and the acceptance suite.

pub use hsfnet_core as core;

pub mod error;
pub mod fmt;
pub mod hitting;
pub mod io;
pub mod report;
pub mod sweep;
pub mod verify;
