//! Puppet-attack detection for two-press fingerprint authentication.
//!
//! An attempt is two consecutive presses with different fingers. The image
//! channel (Otsu segmentation, then LBP, HOG or an external embedding, then
//! PCA) and the timing channel (the standardized inter-press interval) are
//! fused at the feature level, or classified separately and joined by a
//! logical AND. One-class detectors (OC-SVM, Isolation Forest, LOF) are fitted
//! on legitimate attempts only. [`synthgen`] produces labeled synthetic data
//! with coerced attempts for end-to-end evaluation.
//!
//! ```no_run
//! use pupguard::config::PipelineConfig;
//! use pupguard::eval::run_pipeline;
//! use pupguard::synthgen::{gen_pairs, GenSpec};
//! use pupguard::dataset::Dataset;
//!
//! let train = Dataset::new(gen_pairs(&GenSpec::new(200, 0, 10, 1))?, ".")?;
//! let test = Dataset::new(gen_pairs(&GenSpec::new(41, 53, 10, 2))?, ".")?;
//! let report = run_pipeline(&train, &test, &PipelineConfig::default())?;
//! println!("{report}");
//! # Ok::<(), pupguard::Error>(())
//! ```

// `!(x > 0.0)` style checks are how NaN gets rejected here
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod fusion;
pub mod preprocess;
pub mod synthgen;

pub use error::{Error, Result};
