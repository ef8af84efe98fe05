//! File formats, experiment drivers and reports on top of `faprop-core`.
//!
//! An experiment is described by an [`config::ExperimentConfig`] (JSON), run with
//! [`experiments::run`], and rendered as a tidy CSV or JSON [`report::Report`].

pub mod config;
pub mod dto;
mod error;
pub mod experiments;
pub mod report;

pub use error::{FapropError, Result};

/// Worker pool sized by `FAPROP_THREADS`, or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(raw) = std::env::var("FAPROP_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| FapropError::Config {
            path: "FAPROP_THREADS".into(),
            message: format!("expected a positive integer, got {raw:?}"),
        })?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| FapropError::Config {
        path: "FAPROP_THREADS".into(),
        message: e.to_string(),
    })
}
