//! File formats, plotting, parallel drivers and the command line for `rodrigues-core`.

pub mod cli;
pub mod format;
pub mod parallel;
pub mod svg;
pub mod verify;

pub use rodrigues_core as core;
