//! Simulation of post-selected two-qubit polarization states produced by
//! classical second-order interference of attenuated laser pulses at a
//! 50:50 beamsplitter, with the correlation measures used to characterize
//! them (discord, concurrence), simulated maximum-likelihood tomography and
//! the multi-photon contamination model.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod measures;
pub mod multiphoton;
pub mod optics;
pub mod optimize;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, DensityMatrix, Subsystem};
