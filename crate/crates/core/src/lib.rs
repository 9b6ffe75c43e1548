//! Exact determinants and inverses of r-circulant matrices whose first row is
//! a window of a general third-order linear recurrence.
//!
//! Every closed-form route is cross-checked against brute-force oracles
//! (Bareiss elimination, Gauss–Jordan inversion, and a floating eigenvalue
//! product), all in exact arithmetic except the last.

pub mod closed_form;
pub mod closed_form_inverse;
pub mod cli;
pub mod errata;
pub mod error;
pub mod hessenberg;
pub mod matrix;
pub mod rcirculant;
pub mod recurrence;
pub mod scalar;
pub mod verify;

pub use error::{Degeneracy, Error, Result};
pub use matrix::Matrix;
pub use rcirculant::RCirculantMatrix;
pub use recurrence::{Preset, RecurrenceParams};
pub use scalar::{Field, QExt, Rational};
