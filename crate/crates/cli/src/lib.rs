//! Batch analysis of CSV price panels in the complexity-entropy causality
//! plane: loading, the end-to-end pipeline, result tables and plot data.

pub mod dataset;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod report;
pub mod table;

pub use error::{CliError, Result};
