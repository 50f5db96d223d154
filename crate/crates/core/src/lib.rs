//! Analysis toolkit for the dual active bridge converter under triple phase
//! shift control.

// Index loops mirror the matrix algebra; `!(x > 0)` guards also reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod envelope;
pub mod error;
pub mod geometry;
pub mod io;
pub mod model;
pub mod numerics;
pub mod optsolve;
pub mod params;
pub mod simulate;
pub mod stability;
pub mod zvs;

pub use error::{DabError, Result};
pub use num_complex::Complex64;
pub use params::ConverterParams;
