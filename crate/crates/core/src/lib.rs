//! Partial composite cyclotomic Fourier transforms over GF(2^m) and an
//! errors-and-erasures Reed-Solomon decoder that evaluates syndromes, the
//! errata locator and the errata evaluator through pruned transform plans.

pub mod cfft;
pub mod cost;
pub mod error;
pub mod gf;
pub mod gf2;
pub mod planner;
pub mod rs;

pub use error::{Error, Result};
pub use gf::{FieldContext, FieldElement};
