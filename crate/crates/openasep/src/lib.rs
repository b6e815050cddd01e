//! Open ASEP stationary measures, Askey-Wilson signed measures and their
//! boundary limits.

// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aw_measure;
pub mod asep_exact;
pub mod asep_mc;
pub mod error;
pub mod limits;
pub mod qseries;
pub mod verify;
pub mod real;

pub use error::{Error, Result};
pub use real::{DoubleDouble, Precision, Real};
