//! Sparse storage, exact factorizations, and the operator abstraction.

mod csr;
mod factor;
mod operator;
pub mod vec;

pub use csr::CsrMatrix;
pub use factor::{solve_direct, SparseFactor};
pub use operator::{Commutator, Identity, LinearOperator};
