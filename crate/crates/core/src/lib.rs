//! Explicit presentations of Ulrich bundles on the Hesse cubic.
//!
//! The crate evaluates the Hesse theta basis and its derivatives, builds Moore
//! matrices `M_{a,x}` with their factorization partners `L_{a,x}`, and assembles
//! the block matrices `A_{k+1}` / `B_{k+1}` presenting the rank-`k+1`
//! indecomposable Ulrich bundles, both from theta derivatives and from the
//! points `(−2)^l a`. Every identity is checked numerically and reported as a
//! [`report::CheckReport`].

pub mod error;
pub mod hesse;
pub mod jet;
pub mod latex;
pub mod matrix;
pub mod moore;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod suite;
pub mod theta;
pub mod ulrich;

pub use error::{Error, Result};
pub use num_complex::Complex64;
