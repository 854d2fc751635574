use std::io::Write;

use super::inner::InnerProduct;
use crate::error::{Error, Result};
use crate::linalg::vec::{axpy, dot, norm2};
use crate::linalg::LinearOperator;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresOptions {
    pub rtol: f64,
    pub maxit: usize,
    /// Steps without a 0.1% drop of the monitored residual before
    /// stagnation is flagged.
    pub stagnation_window: usize,
    /// Measure `max |⟨q_i, q_j⟩ - δ_ij|` of the final basis.
    pub check_orthogonality: bool,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            rtol: 1e-6,
            maxit: 1000,
            stagnation_window: 50,
            check_orthogonality: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct KrylovReport {
    pub iterations: usize,
    pub converged: bool,
    /// Monitored residual ratio per step, starting with step 0.
    pub residual_history: Vec<f64>,
    /// `‖b - T u_m‖₂ / ‖b‖₂` per step.
    pub preconditioned_residual_history: Vec<f64>,
    /// `‖b - T u_m‖_ip / ‖b‖_ip` per step; non-increasing.
    pub ip_residual_history: Vec<f64>,
    pub happy_breakdown: bool,
    pub stagnated: bool,
    pub orthogonality_error: Option<f64>,
    pub cp: Option<f64>,
    /// `C_p`
    pub cp_upper: Option<f64>,
}

impl KrylovReport {
    /// CSV with header `iter,true_resid_rel,precond_resid_rel`.
    pub fn write_history_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,true_resid_rel,precond_resid_rel")?;
        for (i, (t, p)) in self
            .residual_history
            .iter()
            .zip(&self.preconditioned_residual_history)
            .enumerate()
        {
            writeln!(w, "{i},{t:e},{p:e}")?;
        }
        Ok(())
    }
}

/// Full GMRES for `T u = b` from `u₀ = 0`, orthogonalizing in `ip`.
///
/// `monitor(u)` returns the residual ratio that decides convergence (for
/// example the unpreconditioned `‖f - A u‖₂/‖f‖₂`); without it the
/// Euclidean ratio `‖b - T u‖₂/‖b‖₂` is used.
pub fn gmres(
    op: &dyn LinearOperator,
    b: &[f64],
    ip: &InnerProduct,
    opts: &GmresOptions,
    monitor: Option<&dyn Fn(&[f64]) -> f64>,
) -> Result<(Vec<f64>, KrylovReport)> {
    let n = op.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: b.len() });
    }
    let mut report = KrylovReport::default();
    let mut u = vec![0.0; n];
    let b2 = norm2(b);
    let mut mb = vec![0.0; n];
    ip.apply_metric(b, &mut mb);
    let beta = dot(b, &mb).max(0.0).sqrt();
    if beta == 0.0 || b2 == 0.0 {
        report.converged = true;
        report.residual_history.push(0.0);
        report.preconditioned_residual_history.push(0.0);
        report.ip_residual_history.push(0.0);
        return Ok((u, report));
    }
    let measure = |u: &[f64]| monitor.map_or_else(|| norm2(&residual(op, b, u)) / b2, |m| m(u));
    report.residual_history.push(measure(&u));
    report.preconditioned_residual_history.push(1.0);
    report.ip_residual_history.push(1.0);
    if report.residual_history[0] <= opts.rtol {
        report.converged = true;
        return Ok((u, report));
    }

    let mut q: Vec<Vec<f64>> = vec![b.iter().map(|x| x / beta).collect()];
    let mut mq: Vec<Vec<f64>> = vec![mb.iter().map(|x| x / beta).collect()];
    // Columns of the Hessenberg matrix, each of length j + 2, kept raw and rotated.
    let mut h_raw: Vec<Vec<f64>> = Vec::new();
    let mut r: Vec<Vec<f64>> = Vec::new();
    let (mut cs, mut sn): (Vec<f64>, Vec<f64>) = (Vec::new(), Vec::new());
    let mut g = vec![beta];

    for j in 0..opts.maxit {
        let mut w = op.apply_vec(&q[j]);
        let mut mw = vec![0.0; n];
        ip.apply_metric(&w, &mut mw);
        let before = dot(&w, &mw).max(0.0).sqrt();
        let mut h = vec![0.0; j + 2];
        for i in 0..=j {
            let c = dot(&w, &mq[i]);
            h[i] += c;
            axpy(-c, &q[i], &mut w);
            axpy(-c, &mq[i], &mut mw);
        }
        let mut after = dot(&w, &mw).max(0.0).sqrt();
        if after < 0.7 * before {
            for i in 0..=j {
                let c = dot(&w, &mq[i]);
                h[i] += c;
                axpy(-c, &q[i], &mut w);
                axpy(-c, &mq[i], &mut mw);
            }
            ip.apply_metric(&w, &mut mw);
            after = dot(&w, &mw).max(0.0).sqrt();
        }
        h[j + 1] = after;
        h_raw.push(h.clone());

        let mut col = h;
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = col[j].hypot(col[j + 1]);
        let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[j] / denom, col[j + 1] / denom) };
        cs.push(c);
        sn.push(s);
        col[j] = denom;
        col[j + 1] = 0.0;
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        col.truncate(j + 1);
        r.push(col);

        let m = j + 1;
        let y = back_substitute(&r, &g[..m]);
        u.iter_mut().for_each(|x| *x = 0.0);
        for (yi, qi) in y.iter().zip(&q) {
            axpy(*yi, qi, &mut u);
        }
        let breakdown = after <= 1e-14 * before.max(f64::MIN_POSITIVE);

        // b - T u_m = Q_{m+1} (β e₁ - H̄ y)
        let mut z = vec![0.0; m + 1];
        z[0] = beta;
        for (k, hk) in h_raw.iter().enumerate() {
            for (i, hik) in hk.iter().enumerate() {
                z[i] -= hik * y[k];
            }
        }
        let mut res = vec![0.0; n];
        for (zi, qi) in z.iter().zip(&q) {
            axpy(*zi, qi, &mut res);
        }
        if !breakdown {
            axpy(z[m], &w.iter().map(|x| x / after).collect::<Vec<_>>(), &mut res);
        }
        report.preconditioned_residual_history.push(norm2(&res) / b2);
        report.ip_residual_history.push(g[m].abs() / beta);
        let monitored = measure(&u);
        report.residual_history.push(monitored);
        report.iterations = m;

        let win = opts.stagnation_window;
        if win > 0 && m >= win {
            let old = report.residual_history[m - win];
            if monitored > old * (1.0 - 1e-3) {
                report.stagnated = true;
            }
        }
        if monitored <= opts.rtol {
            report.converged = true;
        }
        if breakdown {
            report.happy_breakdown = true;
            report.converged = report.converged || monitored <= opts.rtol.max(1e-10);
        }
        if report.converged || breakdown {
            break;
        }
        q.push(w.iter().map(|x| x / after).collect());
        mq.push(mw.iter().map(|x| x / after).collect());
    }

    if opts.check_orthogonality {
        let mut worst: f64 = 0.0;
        for i in 0..q.len() {
            for j in 0..=i {
                let d = dot(&q[i], &mq[j]) - if i == j { 1.0 } else { 0.0 };
                worst = worst.max(d.abs());
            }
        }
        report.orthogonality_error = Some(worst);
    }
    Ok((u, report))
}

fn residual(op: &dyn LinearOperator, b: &[f64], u: &[f64]) -> Vec<f64> {
    let tu = op.apply_vec(u);
    b.iter().zip(&tu).map(|(x, y)| x - y).collect()
}

fn back_substitute(r: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let m = g.len();
    let mut y = g.to_vec();
    for i in (0..m).rev() {
        for k in i + 1..m {
            y[i] -= r[k][i] * y[k];
        }
        y[i] /= r[i][i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{solve_direct, CsrMatrix, Identity};

    #[test]
    fn identity_in_one_step() {
        let b = vec![1.0, -2.0, 3.0, 0.5];
        let (u, rep) = gmres(&Identity(4), &b, &InnerProduct::Euclidean, &GmresOptions::default(), None).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        for (x, y) in u.iter().zip(&b) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn spd_three_by_three_matches_direct() {
        let a = CsrMatrix::from_dense(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, -1.0], vec![0.0, -1.0, 2.0]]);
        let b = [1.0, 2.0, 3.0];
        let opts = GmresOptions { rtol: 1e-13, check_orthogonality: true, ..Default::default() };
        let ip = InnerProduct::energy(a.clone()).unwrap();
        let (u, rep) = gmres(&a, &b, &ip, &opts, None).unwrap();
        let x = solve_direct(&a, &b).unwrap();
        assert!(rep.iterations <= 3);
        for (p, q) in u.iter().zip(&x) {
            assert!((p - q).abs() < 1e-10);
        }
        assert!(rep.orthogonality_error.unwrap() < 1e-10);
    }

    #[test]
    fn ip_residual_is_monotone() {
        let n = 60;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0 + (i % 5) as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.3));
                t.push((i + 1, i, 0.4));
            }
        }
        let a = CsrMatrix::from_triplets(n, n, t);
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
        let (u, rep) = gmres(&a, &b, &InnerProduct::Euclidean, &GmresOptions { rtol: 1e-10, ..Default::default() }, None).unwrap();
        assert!(rep.converged);
        for w in rep.ip_residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        // Euclidean ip: the two histories coincide.
        for (p, e) in rep.preconditioned_residual_history.iter().zip(&rep.ip_residual_history) {
            assert!((p - e).abs() < 1e-8);
        }
        let r = residual(&a, &b, &u);
        assert!(norm2(&r) / norm2(&b) <= 1e-10);
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let (u, rep) = gmres(&Identity(3), &[0.0; 3], &InnerProduct::Euclidean, &GmresOptions::default(), None).unwrap();
        assert_eq!(u, vec![0.0; 3]);
        assert!(rep.converged && rep.iterations == 0);
    }

    #[test]
    fn history_csv_header() {
        let (_, rep) = gmres(&Identity(2), &[1.0, 1.0], &InnerProduct::Euclidean, &GmresOptions::default(), None).unwrap();
        let mut buf = Vec::new();
        rep.write_history_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("iter,true_resid_rel,precond_resid_rel\n0,"));
    }
}
