//! Patterned random matrices (reverse circulant, symmetric circulant,
//! Toeplitz, Hankel) with independent, not necessarily identically
//! distributed entries.
//!
//! The crate simulates such matrices and computes their spectral moments,
//! and separately evaluates the limiting moments as sums over set
//! partitions, so the two can be compared at moderate dimension.

pub mod asymptotics;
pub mod combin;
pub mod entries;
pub mod error;
pub mod harness;
pub mod patterns;
pub mod rng;
pub mod spectra;
pub mod stats;

pub use asymptotics::{LimitMomentReport, McConfig, PiCountResult};
pub use combin::{Partition, Word};
pub use entries::{EntryModel, MomentProfile};
pub use error::{Error, Result};
pub use harness::{ComparisonReport, EmpiricalMoments, ExperimentConfig};
pub use patterns::{LinkPattern, MaskKind, MaskSpec, MatrixSpec};
pub use spectra::{SpectrumResult, SymmetricMatrix};
pub use stats::MeanSe;
