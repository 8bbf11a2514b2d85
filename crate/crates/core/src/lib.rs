//! Critical site percolation on the triangular lattice, its exploration
//! interface, Cardy's crossing formula and chordal SLE(6).
//!
//! Hexagon geometry lives in [`lattice`], the coin-flip interface in
//! [`exploration`], the continuum side in [`conformal`], [`cardy`] and
//! [`sle`], and Monte Carlo drivers in [`harness`].

pub mod cardy;
pub mod conformal;
pub mod curvemetric;
pub mod error;
pub mod exploration;
pub mod harness;
pub mod lattice;
pub mod rng;
pub mod sle;
pub mod stats;
pub mod union_find;

pub use error::{Error, Result};
