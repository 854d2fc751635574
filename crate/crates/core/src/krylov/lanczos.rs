//! Lanczos extreme-eigenvalue estimates for operators self-adjoint in an
//! inner product, and the derived norm and GMRES-parameter estimates.

use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::inner::InnerProduct;
use crate::error::{Error, Result};
use crate::linalg::vec::{axpy, dot};
use crate::linalg::LinearOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Ritz residual relative to the largest Ritz value magnitude.
    pub tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            max_iter: 800,
            tol: 1e-6,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    Smallest,
    Largest,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RitzExtremes {
    pub min: f64,
    pub max: f64,
    pub min_residual: f64,
    pub max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Extreme eigenvalues of `S`, which must be self-adjoint in `ip`.
///
/// Full reorthogonalization; stops when the requested Ritz residuals fall
/// below `tol` times the spectral scale or the Krylov space is exhausted.
pub fn lanczos_extremes(
    dim: usize,
    apply: &dyn Fn(&[f64], &mut [f64]) -> Result<()>,
    ip: &InnerProduct,
    which: Extreme,
    opts: &LanczosOptions,
) -> Result<RitzExtremes> {
    if dim == 0 {
        return Ok(RitzExtremes { min: 0.0, max: 0.0, min_residual: 0.0, max_residual: 0.0, iterations: 0, converged: true });
    }
    let metric = ip.matrix().is_some();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut mv = vec![0.0; dim];
    ip.apply_metric(&v, &mut mv);
    let nrm = dot(&v, &mv).sqrt();
    v.iter_mut().for_each(|x| *x /= nrm);
    mv.iter_mut().for_each(|x| *x /= nrm);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut mbasis: Vec<Vec<f64>> = Vec::new();
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut mw = vec![0.0; dim];
    let mut last = RitzExtremes { min: 0.0, max: 0.0, min_residual: f64::INFINITY, max_residual: f64::INFINITY, iterations: 0, converged: false };
    let limit = opts.max_iter.min(dim).max(1);

    for j in 0..limit {
        apply(&v, &mut w)?;
        let a = dot(&w, &mv);
        axpy(-a, &v, &mut w);
        if let Some(&b) = betas.last() {
            axpy(-b, basis.last().unwrap(), &mut w);
        }
        basis.push(v.clone());
        if metric {
            mbasis.push(mv.clone());
        }
        alphas.push(a);
        // Two passes of Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for (q, mq) in basis.iter().zip(if metric { &mbasis } else { &basis }) {
                let c = dot(&w, mq);
                axpy(-c, q, &mut w);
            }
        }
        ip.apply_metric(&w, &mut mw);
        let beta = dot(&w, &mw).max(0.0).sqrt();

        let m = j + 1;
        let exhausted = m == dim || beta <= 1e-13 * alphas.iter().fold(0.0_f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
        if exhausted || m <= 20 || m % 5 == 0 || m == limit {
            last = ritz(&alphas, &betas, beta, m)?;
            let scale = last.min.abs().max(last.max.abs()).max(f64::MIN_POSITIVE);
            let ok = |r: f64| r <= opts.tol * scale;
            let done = match which {
                Extreme::Smallest => ok(last.min_residual),
                Extreme::Largest => ok(last.max_residual),
                Extreme::Both => ok(last.min_residual) && ok(last.max_residual),
            };
            if exhausted || done {
                if exhausted {
                    last.min_residual = 0.0;
                    last.max_residual = 0.0;
                }
                last.converged = true;
                return Ok(last);
            }
        }
        betas.push(beta);
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / beta);
        mv.iter_mut().zip(&mw).for_each(|(x, y)| *x = y / beta);
    }
    Ok(last)
}

fn ritz(alphas: &[f64], betas: &[f64], beta_next: f64, m: usize) -> Result<RitzExtremes> {
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i == j + 1 {
            betas[j]
        } else if j == i + 1 {
            betas[i]
        } else {
            0.0
        }
    });
    let eig = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Factorization {
        what: "Lanczos tridiagonal".into(),
        reason: format!("{e:?}"),
    })?;
    let s = eig.S().column_vector();
    let u = eig.U();
    Ok(RitzExtremes {
        min: s[0],
        max: s[m - 1],
        min_residual: beta_next * u[(m - 1, 0)].abs(),
        max_residual: beta_next * u[(m - 1, m - 1)].abs(),
        iterations: m,
        converged: false,
    })
}

fn require(r: RitzExtremes, method: &'static str) -> Result<RitzExtremes> {
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NotConverged { method, iterations: r.iterations })
    }
}

/// `‖B‖₂ = √λ_max(BᵗB)`.
pub fn spectral_norm(op: &dyn LinearOperator, opts: &LanczosOptions) -> Result<f64> {
    let n = op.dim();
    let apply = |x: &[f64], y: &mut [f64]| -> Result<()> {
        let mut t = vec![0.0; n];
        op.apply(x, &mut t);
        op.apply_transpose(&t, y);
        Ok(())
    };
    let r = require(
        lanczos_extremes(n, &apply, &InnerProduct::Euclidean, Extreme::Largest, opts)?,
        "Lanczos (spectral norm)",
    )?;
    Ok(r.max.max(0.0).sqrt())
}

/// Converged spectral estimate with its Lanczos diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
}

/// `c_p`: smallest eigenvalue of the `ip`-symmetric part `½(T + Tᵃ)`.
pub fn estimate_cp(op: &dyn LinearOperator, ip: &InnerProduct, opts: &LanczosOptions) -> Result<SpectralEstimate> {
    let n = op.dim();
    let apply = |x: &[f64], y: &mut [f64]| -> Result<()> {
        let mut t = vec![0.0; n];
        op.apply(x, y);
        ip.apply_adjoint(op, x, &mut t)?;
        y.iter_mut().zip(&t).for_each(|(a, b)| *a = 0.5 * (*a + b));
        Ok(())
    };
    let r = require(lanczos_extremes(n, &apply, ip, Extreme::Smallest, opts)?, "Lanczos (c_p)")?;
    Ok(SpectralEstimate { value: r.min, iterations: r.iterations })
}

/// `C_p = sup ‖T u‖/‖u‖` in `ip`, as `√λ_max(Tᵃ T)`.
#[allow(non_snake_case)]
pub fn estimate_Cp(op: &dyn LinearOperator, ip: &InnerProduct, opts: &LanczosOptions) -> Result<SpectralEstimate> {
    let n = op.dim();
    let apply = |x: &[f64], y: &mut [f64]| -> Result<()> {
        let t = op.apply_vec(x);
        ip.apply_adjoint(op, &t, y)
    };
    let r = require(lanczos_extremes(n, &apply, ip, Extreme::Largest, opts)?, "Lanczos (C_p)")?;
    Ok(SpectralEstimate { value: r.max.max(0.0).sqrt(), iterations: r.iterations })
}
