//! GMRES in a chosen inner product and spectral estimators.

mod gmres;
mod inner;
mod lanczos;
mod spectrum;

pub use gmres::{gmres, GmresOptions, KrylovReport};
pub use inner::{EnergyMetric, InnerProduct};
pub use lanczos::{
    estimate_Cp, estimate_cp, lanczos_extremes, spectral_norm, Extreme, LanczosOptions, RitzExtremes,
    SpectralEstimate,
};
pub use spectrum::{dense_spectrum, DENSE_CAP};
