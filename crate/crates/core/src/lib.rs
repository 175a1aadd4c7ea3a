//! Numerical workbench for affine curvature models, torsion-free connections
//! and the deformed / modified Riemannian extension metrics on the cotangent
//! bundle.
//!
//! The central object is the Jacobi operator `J(v): w -> A(w, v) v`. Its
//! spectrum, up to a positive rescaling, decides whether a model is
//! (projective) Osserman; the checkers in [`model`], [`connection`] and
//! [`metric`] sample directions and compare spectra.

// Index loops mirror the tensor formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod connection;
pub mod error;
pub mod exec;
pub mod io;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod model;
pub mod poly;
pub mod suite;

pub use error::{Error, Result};
