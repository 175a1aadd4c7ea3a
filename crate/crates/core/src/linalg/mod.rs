//! Small dense real-matrix spectral toolkit.
//!
//! Matrices here are tiny (a few dozen rows at most) and frequently
//! defective, so multiplicities are read off root clusters and rank
//! filtrations rather than eigenvector counts.

pub mod eigen;
mod matrix;
pub mod rank;
pub mod spectrum;

pub use matrix::SquareMatrix;
pub use rank::{rank, rank_shifted, DEFAULT_RANK_TOL};
pub use spectrum::{
    char_poly, power_traces, spectral_summary, spectral_summary_with, SpectralEntry,
    SpectralOptions, SpectralSummary, DEFAULT_ZERO_TOL,
};
