//! File formats, the reference configuration and rendering for `sqiis-core`.

pub mod config;
pub mod format;
pub mod parallel;
pub mod reference;
pub mod render;

pub use config::{EngineConfig, OutputFormat};
pub use format::FormatError;
