//! Two-way feature set analysis of omics association matrices.
//!
//! This crate wraps [`ocean_core`] with file formats and drivers: delimited matrix
//! and GMT parsing, Pearson p-value matrices, the binary state file, result tables,
//! scans over set collections, clustered SVG heatmaps and simulation-based checks.

pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod gmt;
pub mod heatmap;
pub mod pvalues;
pub mod resolve;
pub mod results;
pub mod selftest;
pub mod simulation;
pub mod statefile;

pub use dataset::{parse_matrix, parse_pvalue_matrix, Dataset, Delimiter, Orientation};
pub use error::{Error, Result};
pub use gmt::{parse_gmt, FeatureSet, FeatureSetCollection};
pub use heatmap::{build_heatmap, render_svg, Heatmap};
pub use pvalues::{build_pvalue_matrix, PvalueMatrix};
pub use resolve::{resolve_selection, ResolvedSelection, SetSpec};
pub use results::{
    read_results, scan, Format, Metric, Ratio, ResultRow, ResultWriter, ScanRequest,
};
pub use simulation::{null_simulation, run_simulation, SimulationConfig, SimulationReport};

/// Builds the global thread pool, capped by `OCEAN_THREADS` when set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(value) = std::env::var("OCEAN_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| {
            Error::Validation(format!(
                "OCEAN_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Validation(format!("thread pool: {e}")))
}
