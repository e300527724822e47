//! Measures how much complex-network metrics of word co-occurrence graphs
//! respond to text structure, and how adding semantic "virtual" edges from
//! word embeddings changes that.
//!
//! A typical run loads a manifest of texts, truncates and optionally filters
//! each one, builds the co-occurrence network of the text and of shuffled
//! replicas, optionally enriches every network with embedding-derived edges,
//! and reports each metric normalized against the shuffled baseline.
//!
//! ```no_run
//! use conet_probe::{run_and_report, RunConfig};
//!
//! let cfg = RunConfig::from_file("sweep.toml")?;
//! let out = run_and_report(&cfg)?;
//! println!("{} record rows", out.records.len());
//! # Ok::<(), conet_probe::Error>(())
//! ```

pub mod cache;
pub mod config;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod network;
pub mod pipeline;
pub mod report;
pub mod stats;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use pipeline::{run_and_report, run_pipeline, PipelineOutput};
