//! Configuration, initial data and output formats.

pub mod config;
pub mod recipes;
pub mod rng;
pub mod snapshot;
pub mod timeseries;

pub use config::{parse_config, parse_config_unvalidated, Mode, RunConfig};
pub use recipes::{generate_initial, InitialData, Recipe, RecipeParams};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use timeseries::{parse_timeseries, write_timeseries, Record, HEADER};
