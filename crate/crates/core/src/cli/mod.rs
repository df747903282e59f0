//! Dataset ingestion, run configuration and the command implementations
//! behind the binary.

mod commands;
mod config;
mod export;
mod manifest;

pub use commands::{cmd_export, cmd_sweep, cmd_synth, cmd_train, resolve_dataset};
pub use config::CliConfig;
pub use export::export_embeddings;
pub use manifest::{load_dataset, write_dataset, DatasetManifest};
