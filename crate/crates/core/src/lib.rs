//! Werner–Holevo channels `Γ_d(ρ) = (𝟙 − ρᵀ)/(d − 1)`, their tensor products,
//! minimal Rényi output entropy, and numerical checks of the purity identity
//! behind multiple additivity for `1 ≤ p ≤ 2`.
//!
//! Sites are indexed from 0 in code; site 0 is the most significant factor of
//! a row-major multi-index. All entropies are in nats.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod dims;
pub mod entropy;
pub mod error;
pub mod expansion;
pub mod linalg;
pub mod optimize;
pub mod random;
pub mod report;
pub mod state;

pub use num_complex::Complex64;

pub use channel::{verify_cptp, CptpReport, ProductChannel, WhChannel};
pub use dims::{SiteDims, SubsetMask};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use state::{DensityMatrix, PureState};
