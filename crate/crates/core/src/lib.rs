//! Verification library for critical logarithmic Hardy–Sobolev type
//! identities and inequalities on cylinders, the Heisenberg group and
//! homogeneous groups.
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod combinatorics;
pub mod corpus;
pub mod error;
pub mod geometry;
pub mod jets;
pub mod quadrature;
pub mod report;
pub mod verifiers;
pub use error::{Error, Result};
