//! Random density matrices from the induced measures `μ_{n,k}`.
//!
//! A density matrix is drawn as `ρ = W / tr W` with `W = X X*` and `X` an
//! `n × k` complex Ginibre matrix. The crate provides the samplers
//! ([`sampling`]), spectra and empirical measures ([`spectra`]), closed-form
//! finite-size quantities ([`exact`]), the limiting laws with goodness-of-fit
//! tools ([`asymptotics`]) and a seeded parallel driver ([`montecarlo`]).
//!
//! Randomness comes from [`rng::RngStream`]: ChaCha12 keyed by
//! `(master_seed, stream_index)`, with complex normals from Box–Muller.
// `!(x > 0.0)` guards are deliberate: they reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod exact;
pub mod matrix;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod spectra;

pub use asymptotics::{GoFReport, MarchenkoPastur, ReferenceCdf, StandardNormal, TracyWidomTable};
pub use error::{Error, Result};
pub use exact::{EnsembleParams, MomentMethod, MomentTable, MAX_MOMENT_ORDER};
pub use matrix::ComplexMatrix;
pub use rng::{derive_seed, RngStream};
pub use sampling::{DensityMatrix, SimplexVector, WishartSample};
pub use spectra::{EmpiricalMeasure, Rescale, Spectrum, SpectrumSource};
