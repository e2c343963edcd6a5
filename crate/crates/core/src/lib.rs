// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod graph;
pub mod kernels;
pub mod lamplighter;
pub mod lang;
pub mod schreier;
pub mod simulate;
pub mod spectral;
pub mod tour;

pub use error::{Error, Result};
