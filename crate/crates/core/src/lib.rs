#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fourier;
pub mod oscillatory;
pub mod plot;
pub mod testfam;
pub mod quad;
pub mod semigroup;
pub mod signal;
pub mod specfun;

pub use error::{Error, Result};
