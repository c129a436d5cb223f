//! Exact Fisher information and optimal sampling designs for linear trends
//! observed through a stationary Ornstein-Uhlenbeck process (one dimension)
//! or Ornstein-Uhlenbeck sheet (two dimensions, regular grids).
//!
//! The crate covers:
//!
//! * [`model`]: parameter and design types, the exponential correlation
//!   matrices, their tridiagonal inverses and the separable grid covariance,
//! * [`fim`]: closed-form information matrices on the trend coefficients,
//! * [`objectives`]: the determinant, condition number and the monotone
//!   surrogate used to minimise it, including closed-form 3x3 eigenvalues,
//! * [`search`]: restricted, two-point, equidistant and grid design searches,
//! * [`asymptotics`]: doubling ratios and their limits,
//! * [`sample`] and [`mc`]: exact Gaussian sampling and the Monte Carlo GLS
//!   efficiency comparison of K- and D-designs.
//!
//! Everything here is `no_std` (with `alloc`); IO, the command line and
//! parallel sweeps live in the `oukopt` crate.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymptotics;
mod error;
pub mod fim;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod objectives;
pub mod optim;
pub mod sample;
pub mod search;

pub use crate::error::{Error, Result};
pub use crate::fim::{Fim2, Fim3, FimEntries1D, FimEntries2D};
pub use crate::model::{Design1D, GridDesign2D, OuParams, SheetParams, Trend1D, Trend2D};
pub use crate::objectives::{Eigen3Closed, ObjectiveEval};
pub use crate::search::{Criterion, SearchResult};
