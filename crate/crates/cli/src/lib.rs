//! Command-line front end: reads a claims data set, calibrates the models,
//! runs the requested reserving methods and writes the report files.

pub mod cli;
pub mod config;
pub mod csv_io;
pub mod error;
pub mod histogram;
pub mod output;
pub mod run;

pub use config::{DataSource, RunConfig};
pub use error::{Category, CliError, CliResult};
pub use run::{calibrate, load_data, run, RunReport};
