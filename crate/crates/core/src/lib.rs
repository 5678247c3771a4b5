//! Wavelet multiresolution analysis and denoising for multichannel
//! magnetoencephalography (MEG) style recordings.
//!
//! The crate is organised bottom-up:
//!
//! - [`filters`]: orthonormal scaling/wavelet filter pairs (Daubechies-4,
//!   Coiflet-1 and the adjusted Haar family) and the adjusted-Haar
//!   frequency magnitude.
//! - [`transform`]: cascaded QMF analysis/synthesis with periodized
//!   boundaries, plus a rectangle-rule CWT for piecewise-constant wavelets.
//! - [`denoise`]: the concatenate, decompose, estimate and reconstruct
//!   pipeline in single- and multi-trial modes.
//! - [`metrics`]: output SNIR and RMSE.
//! - [`dataio`]: manifest/CSV dataset files and a seedable synthetic
//!   trial generator.
//!
//! With the default `parallel` feature, batch work (trials in multi-trial
//! mode, long filter-bank levels) runs on rayon. Every parallel path
//! computes each output element independently and reduces in a fixed
//! order, so results are bit-identical to the sequential build.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataio;
pub mod denoise;
mod error;
pub mod filters;
pub mod matrix;
pub mod metrics;
mod par;
pub mod transform;

pub use error::{Error, Result};
pub use filters::{FilterPair, Wavelet};
pub use matrix::Matrix;
