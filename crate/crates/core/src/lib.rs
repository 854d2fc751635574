//! Crouzeix–Raviart finite volume element (CRFVE) and finite element (CRFE)
//! discretizations of `-∇·(α∇u) = f` with homogeneous Dirichlet data, additive
//! average Schwarz preconditioners, and GMRES in the energy inner product.

pub mod decomposition;
pub mod discretization;
pub mod error;
pub mod harness;
pub mod krylov;
pub mod linalg;
pub mod mesh;
pub mod schwarz;

pub use error::{Error, Result};
