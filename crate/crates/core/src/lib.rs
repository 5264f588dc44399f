//! Numerical toolkit for Fourier multipliers on product Hardy spaces.
//!
//! The crate is organised around five areas:
//!
//! * [`spectral`]: sampled functions on uniform grids and the three Fourier
//!   transform conventions (torus coefficients, `ε`-periodic coefficients and
//!   the continuous transform on `R²`).
//! * [`torus_multipliers`]: Fejér kernels, `H¹(T×T)` membership, dyadic block
//!   energies of a multiplier sequence and the witnesses showing the block
//!   condition is necessary and sufficient for boundedness into `ℓ²`.
//! * [`classical_bmo`]: cube oscillations, the Plancherel form of the mean
//!   square oscillation and the cell-mass condition for measures.
//! * [`product_bmo`]: the wavelet `ψ`, the two-parameter lift `λ∗Ψ_y`,
//!   Chang–Fefferman square functions and the Carleson-type functionals over
//!   dyadic rectangles in an open set.
//! * [`report`]: the command implementations behind the `bmo-multipliers`
//!   binary.

pub mod classical_bmo;
pub mod corpus;
pub mod error;
pub mod fixtures;
pub mod product_bmo;
pub mod quadrature;
pub mod report;
pub mod spectral;
pub mod torus_multipliers;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version tag written into every persisted file and report.
pub const SCHEMA_VERSION: u32 = 1;
