//! Batch front-end: masking, risk reports, evidence combination and the ℕ³
//! noise demonstration, with file formats and exit-code conventions.

pub mod combine;
pub mod config;
pub mod demo;
pub mod error;
pub mod massfile;
pub mod risk;
pub mod table_io;

pub use error::CliError;
