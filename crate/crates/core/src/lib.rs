//! Distribution-free conservative bounds for Hotelling's T² under the
//! orthant symmetry condition.
//!
//! The crate is organised bottom-up:
//!
//! * [`chi_kernel`]: the χ_r density, its unnormalised tail `q_r`, moments,
//!   the cubic tail function `γ_r` with its derivatives, and quantiles.
//! * [`extremal`]: the extremal tail bound `Q_r(u)`, the ratio `Λ_r(u)` and
//!   its envelope, built around the sharp constant [`SHARP_CONSTANT`] = 2e³/9.
//! * [`hotelling`]: T² and R² for an arbitrary sample through the
//!   orthogonal projector onto the column span of the data matrix.
//! * [`symmetry_test`]: conservative p-values and critical values.
//! * [`monotone`]: likelihood-ratio, tail-ratio and stochastic ordering of
//!   the shifted family χ_r − √(r−1).
//! * [`oracle`]: exact sign enumeration and Monte Carlo used to check the
//!   extremal inequalities.
//! * [`verify`]: named verification suites driven by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chi_kernel;
mod error;
pub mod extremal;
pub mod hotelling;
pub mod json;
pub mod monotone;
pub mod oracle;
mod roots;
mod special;
pub mod symmetry_test;
pub mod verify;

pub use error::{Error, Result};
pub use extremal::SHARP_CONSTANT;
