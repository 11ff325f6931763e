//! Heavy-tailed random walks on Z^d, their operator-stable limits,
//! occupation-time functionals and switch-walk-switch return probabilities
//! on wreath products.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dilation;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod numerics;
pub mod occupation;
pub mod par;
pub mod rng;
pub mod stablelaw;
pub mod steplaw;
pub mod varconst;
pub mod wreath;

pub use error::{Error, Result};
pub use lattice::Site;
pub use par::Execution;
