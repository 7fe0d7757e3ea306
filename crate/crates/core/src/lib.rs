//! Block-extrema extreme value analysis on gridded daily temperature series.
//!
//! The crate fits generalized extreme value distributions to annual (or
//! multi-year) block maxima and minima, quantifies uncertainty with a
//! circular block bootstrap, and compares fitted tails between two epochs.
//! Everything numeric is generic over the scalar type through [`num::Real`];
//! the `*64` aliases at the crate root fix `f64` for ordinary use.

pub mod blocks;
pub mod bootstrap;
pub mod changes;
pub mod error;
pub mod fit;
pub mod gev;
pub mod math;
pub mod num;
pub mod qq;
pub mod sensitivity;
pub mod synth;

pub use error::{Error, Result};

/// `f64` daily series.
pub type DailySeries64 = blocks::DailySeries<f64>;
/// `f64` block extrema.
pub type BlockExtremes64 = blocks::BlockExtremes<f64>;
/// `f64` distribution parameters.
pub type GevParams64 = gev::GevParams<f64>;
/// `f64` return level query.
pub type ReturnLevelQuery64 = gev::ReturnLevelQuery<f64>;
/// `f64` fit result.
pub type FitResult64 = fit::FitResult<f64>;
/// `f64` bootstrap result.
pub type BootstrapResult64 = bootstrap::BootstrapResult<f64>;
/// `f64` change report.
pub type ChangeReport64 = changes::ChangeReport<f64>;
/// `f64` block-size diagnostic.
pub type BlockDiagnostic64 = sensitivity::BlockDiagnostic<f64>;
/// `f64` segment experiment.
pub type SegmentExperiment64 = sensitivity::SegmentExperiment<f64>;
/// `f64` synthetic series spec.
pub type SyntheticSpec64 = synth::SyntheticSpec<f64>;
