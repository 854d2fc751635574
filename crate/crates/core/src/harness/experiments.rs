use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::coefficient::CoefficientSpec;
use super::config::{BaseKind, ExperimentConfig, ManufacturedSolution, Scheme, SolverConfig};
use crate::decomposition::{build_block_partition, layer_contrast, CoarseSpace, Partition};
use crate::discretization::{
    assemble_fe_matrix, assemble_fe_rhs, assemble_fe_system, assemble_fve_matrix, assemble_fve_rhs,
    assemble_fve_system, boundary_midpoint_values, broken_h1_error_with_boundary, nonsymmetry_measures,
    perturbation_norm, CoefficientField, CrFunction, FnSolution, OperatorMatrix, TriangleRule,
};
use crate::error::{Error, Result};
use crate::krylov::{dense_spectrum, estimate_cp, gmres, GmresOptions, InnerProduct, KrylovReport, LanczosOptions};
use crate::linalg::vec::{norm2, relative_error};
use crate::linalg::solve_direct;
use crate::mesh::{build_dual_mesh, build_unit_square_mesh, validate_mesh, Diagonal, DualMesh, InteriorPoint, Point2, TriMesh};
use crate::schwarz::{SchwarzOperator, Variant};

/// Everything needed to solve one configuration: mesh, partition,
/// coefficient, both operators and both loads.
pub struct Problem {
    pub mesh: TriMesh,
    pub dual: DualMesh,
    pub partition: Partition,
    pub alpha: CoefficientField,
    pub fe: OperatorMatrix,
    pub fve: OperatorMatrix,
    pub load_fe: CrFunction,
    pub load_fve: CrFunction,
}

impl Problem {
    pub fn build(
        n: usize,
        diagonal: Diagonal,
        m: usize,
        spec: &CoefficientSpec,
        alpha1: f64,
        f: &(dyn Fn(Point2) -> f64 + Sync),
    ) -> Result<Self> {
        let base = build_unit_square_mesh(n, diagonal)?;
        let quad = spec.quadrature(base.h());
        let (mesh, alpha) = spec.realize(&base, alpha1)?;
        let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter)?;
        let partition = build_block_partition(&mesh, m)?;
        Ok(Problem {
            fe: assemble_fe_matrix(&mesh, &alpha, &quad)?,
            fve: assemble_fve_matrix(&mesh, &dual, &alpha, &quad)?,
            load_fe: assemble_fe_rhs(&mesh, f, &quad)?,
            load_fve: assemble_fve_rhs(&mesh, &dual, f, &quad)?,
            mesh,
            dual,
            partition,
            alpha,
        })
    }

    /// Problem of `cfg` at its own mesh and partition with load `f = 1`.
    pub fn from_config(cfg: &ExperimentConfig, alpha1: f64) -> Result<Self> {
        let spec = CoefficientSpec::from_config(&cfg.coefficient, cfg.mesh.n)?;
        Problem::build(cfg.mesh.n, cfg.mesh.diagonal, cfg.partition.m, &spec, alpha1, &|_| 1.0)
    }

    /// `(B, f)` for variant `k`: the FE pair for k = 1, the FVE pair otherwise.
    pub fn system(&self, variant: Variant) -> (&OperatorMatrix, &CrFunction) {
        if variant == Variant::K1 {
            (&self.fe, &self.load_fe)
        } else {
            (&self.fve, &self.load_fve)
        }
    }

    pub fn schwarz(&self, variant: Variant, coarse: CoarseSpace) -> Result<SchwarzOperator> {
        SchwarzOperator::from_matrices(variant, self.fe.clone(), self.fve.clone(), &self.partition, coarse)
    }
}

/// Result of GMRES on `T_A^(k) u = g^(k)`.
pub struct SolveOutcome {
    pub solution: CrFunction,
    pub report: KrylovReport,
    /// Relative l₂ distance to a direct sparse solve of the same system.
    pub direct_error: f64,
}

/// Lanczos settings used for `c_p` in the experiment tables.
pub fn cp_options() -> LanczosOptions {
    LanczosOptions { tol: 1e-6, max_iter: 1000, ..Default::default() }
}

/// GMRES in the energy inner product of `A^FE`, stopped on the l₂ norm of
/// the unpreconditioned residual; optionally estimates `c_p`.
pub fn solve_preconditioned(
    problem: &Problem,
    variant: Variant,
    coarse: CoarseSpace,
    solver: &SolverConfig,
    estimate_cp_too: bool,
) -> Result<SolveOutcome> {
    let t = problem.schwarz(variant, coarse)?;
    let g = t.build_g(&problem.load_fve, &problem.load_fe)?;
    let ip = InnerProduct::energy(problem.fe.matrix().clone())?;
    let (b, f) = problem.system(variant);
    let f_norm = norm2(f);
    let monitor = |u: &[f64]| {
        let bu = b.mul_vec(u);
        let r: Vec<f64> = f.iter().zip(&bu).map(|(x, y)| x - y).collect();
        norm2(&r) / f_norm
    };
    let opts = GmresOptions { rtol: solver.rtol, maxit: solver.maxit, ..Default::default() };
    let (u, mut report) = gmres(&t, &g, &ip, &opts, Some(&monitor))?;
    if estimate_cp_too {
        report.cp = Some(estimate_cp(&t, &ip, &cp_options())?.value);
    }
    let direct = solve_direct(b, f)?;
    Ok(SolveOutcome {
        direct_error: relative_error(&u, &direct),
        solution: CrFunction::new(&problem.mesh, u)?,
        report,
    })
}

/// One CSV-serializable table row.
pub trait CsvRow {
    const HEADER: &'static str;
    fn csv(&self) -> String;
    fn converged(&self) -> bool {
        true
    }
}

pub fn write_csv<R: CsvRow, W: std::io::Write>(rows: &[R], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", R::HEADER)?;
    for r in rows {
        writeln!(w, "{}", r.csv())?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

#[derive(Clone, Debug)]
pub struct IterationRow {
    pub alpha1: f64,
    pub iterations: usize,
    pub cp: Option<f64>,
    pub converged: bool,
    pub direct_error: f64,
    pub report: KrylovReport,
}

impl CsvRow for IterationRow {
    const HEADER: &'static str = "alpha1,iterations,cp,converged,direct_rel_error";
    fn csv(&self) -> String {
        format!("{:e},{},{},{},{:e}", self.alpha1, self.iterations, opt(self.cp), self.converged, self.direct_error)
    }
    fn converged(&self) -> bool {
        self.converged
    }
}

/// GMRES iteration counts over the `alpha1` sweep of `cfg`.
pub fn run_iteration_table(cfg: &ExperimentConfig) -> Result<Vec<IterationRow>> {
    let variant = Variant::from_k(cfg.solver.k)?;
    cfg.alpha1_values()
        .par_iter()
        .map(|&a1| {
            let p = Problem::from_config(cfg, a1)?;
            let s = solve_preconditioned(&p, variant, cfg.partition.coarse_space, &cfg.solver, cfg.output.cp)?;
            Ok(IterationRow {
                alpha1: a1,
                iterations: s.report.iterations,
                cp: s.report.cp,
                converged: s.report.converged,
                direct_error: s.direct_error,
                report: s.report,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub n: usize,
    pub m: usize,
    pub iterations: usize,
    pub cp: f64,
    pub converged: bool,
}

impl CsvRow for ScalingRow {
    const HEADER: &'static str = "h,H,iterations,cp,converged";
    fn csv(&self) -> String {
        format!("1/{},1/{},{},{:e},{}", self.n, self.m, self.iterations, self.cp, self.converged)
    }
    fn converged(&self) -> bool {
        self.converged
    }
}

/// Admissible `(n, m)` pairs of the sweep: `m | n` and `h ≤ H/2`.
pub fn scaling_pairs(cfg: &ExperimentConfig) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for &n in &cfg.sweep.n {
        for &m in &cfg.sweep.m {
            if m > 0 && n % m == 0 && n >= 2 * m {
                pairs.push((n, m));
            }
        }
    }
    pairs
}

/// Iterations and `c_p` over the `(h, H)` grid of `cfg`.
pub fn run_scaling_table(cfg: &ExperimentConfig) -> Result<Vec<ScalingRow>> {
    let variant = Variant::from_k(cfg.solver.k)?;
    let alpha1 = cfg.alpha1_values().first().copied().unwrap_or(1.0);
    let pairs = scaling_pairs(cfg);
    if pairs.is_empty() {
        return Err(Error::Config("scaling sweep needs sweep.n and sweep.m with m | n and n >= 2m".into()));
    }
    pairs
        .par_iter()
        .map(|&(n, m)| {
            let spec = CoefficientSpec::from_config(&cfg.coefficient, n)?;
            let p = Problem::build(n, cfg.mesh.diagonal, m, &spec, alpha1, &|_| 1.0)?;
            let s = solve_preconditioned(&p, variant, cfg.partition.coarse_space, &cfg.solver, true)?;
            Ok(ScalingRow {
                n,
                m,
                iterations: s.report.iterations,
                cp: s.report.cp.unwrap_or(f64::NAN),
                converged: s.report.converged,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct NonsymmetryRow {
    pub alpha1: f64,
    pub skew_norm: f64,
    pub commutator_norm: f64,
}

impl CsvRow for NonsymmetryRow {
    const HEADER: &'static str = "alpha1,skew_norm,commutator_norm";
    fn csv(&self) -> String {
        format!("{:e},{:e},{:e}", self.alpha1, self.skew_norm, self.commutator_norm)
    }
}

#[derive(Clone, Debug)]
pub struct PerturbationRow {
    pub n: usize,
    pub fe_fve_diff_norm: f64,
}

impl CsvRow for PerturbationRow {
    const HEADER: &'static str = "h,fe_fve_diff_norm";
    fn csv(&self) -> String {
        format!("1/{},{:e}", self.n, self.fe_fve_diff_norm)
    }
}

pub enum Diagnostics {
    Alpha1(Vec<NonsymmetryRow>),
    H(Vec<PerturbationRow>),
}

/// `‖A - Aᵗ‖₂` and `‖AAᵗ - AᵗA‖₂` per `alpha1`, or `‖A^FE - A^FVE‖₂` per
/// `h` when `sweep.n` is given.
pub fn run_matrix_diagnostics(cfg: &ExperimentConfig) -> Result<Diagnostics> {
    let alpha1 = cfg.alpha1_values();
    if !cfg.sweep.n.is_empty() {
        let a1 = alpha1.first().copied().unwrap_or(1.0);
        let rows = cfg
            .sweep
            .n
            .par_iter()
            .map(|&n| {
                let spec = CoefficientSpec::from_config(&cfg.coefficient, n)?;
                let (mesh, alpha) = spec.realize(&build_unit_square_mesh(n, cfg.mesh.diagonal)?, a1)?;
                let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter)?;
                let quad = spec.quadrature(mesh.h());
                Ok(PerturbationRow { n, fe_fve_diff_norm: perturbation_norm(&mesh, &dual, &alpha, &quad)? })
            })
            .collect::<Result<_>>()?;
        return Ok(Diagnostics::H(rows));
    }
    let spec = CoefficientSpec::from_config(&cfg.coefficient, cfg.mesh.n)?;
    let base = build_unit_square_mesh(cfg.mesh.n, cfg.mesh.diagonal)?;
    let quad = spec.quadrature(base.h());
    let rows = alpha1
        .par_iter()
        .map(|&a1| {
            let (mesh, alpha) = spec.realize(&base, a1)?;
            let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter)?;
            let a = assemble_fve_matrix(&mesh, &dual, &alpha, &quad)?;
            let m = nonsymmetry_measures(&a)?;
            Ok(NonsymmetryRow { alpha1: a1, skew_norm: m.skew, commutator_norm: m.commutator })
        })
        .collect::<Result<_>>()?;
    Ok(Diagnostics::Alpha1(rows))
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub error: f64,
    /// `log₂(e(2h)/e(h))` against the previous row.
    pub order: Option<f64>,
}

impl CsvRow for ConvergenceRow {
    const HEADER: &'static str = "h,error,order";
    fn csv(&self) -> String {
        format!("1/{},{:e},{}", self.n, self.error, self.order.map_or_else(String::new, |o| format!("{o:.4}")))
    }
}

/// Smooth coefficient with its gradient, for manufactured right-hand sides.
fn smooth_alpha(cfg: &ExperimentConfig) -> Result<(CoefficientField, impl Fn(Point2) -> (f64, [f64; 2]) + Sync)> {
    let c = &cfg.coefficient;
    if c.preset.is_some() || !c.inclusions.is_empty() {
        return Err(Error::Config("convergence study needs a smooth coefficient without inclusions".into()));
    }
    let (base, value, k) = (c.base, c.value, c.frequency);
    let field = CoefficientSpec::from_config(c, cfg.mesh.n)?.field(1.0)?;
    let eval = move |p: Point2| match base {
        BaseKind::Constant => (value, [0.0, 0.0]),
        BaseKind::Sinusoidal => {
            let (sx, sy) = ((k * PI * p.x).sin(), (k * PI * p.y).sin());
            let (cx, cy) = ((k * PI * p.x).cos(), (k * PI * p.y).cos());
            (2.0 + sx * sy, [k * PI * cx * sy, k * PI * sx * cy])
        }
    };
    Ok((field, eval))
}

/// Broken-`H¹` errors of direct solves against a manufactured solution over
/// `sweep.n`, with observed orders.
pub fn run_convergence_study(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    let (alpha, alpha_grad) = smooth_alpha(cfg)?;
    let kind = cfg.convergence.solution;
    let exact_u = move |p: Point2| match kind {
        ManufacturedSolution::Sine => (PI * p.x).sin() * (PI * p.y).sin(),
        ManufacturedSolution::Linear => 1.0 + 2.0 * p.x - 3.0 * p.y,
    };
    let exact_grad = move |p: Point2| match kind {
        ManufacturedSolution::Sine => [PI * (PI * p.x).cos() * (PI * p.y).sin(), PI * (PI * p.x).sin() * (PI * p.y).cos()],
        ManufacturedSolution::Linear => [2.0, -3.0],
    };
    // f = -∇·(α∇u) = -α Δu - ∇α·∇u
    let f = move |p: Point2| {
        let (a, ga) = alpha_grad(p);
        let g = exact_grad(p);
        let lap = match kind {
            ManufacturedSolution::Sine => -2.0 * PI * PI * exact_u(p),
            ManufacturedSolution::Linear => 0.0,
        };
        -a * lap - (ga[0] * g[0] + ga[1] * g[1])
    };
    let exact = FnSolution { value: exact_u, gradient: exact_grad };
    let spec = CoefficientSpec::from_config(&cfg.coefficient, cfg.mesh.n)?;
    let mut rows: Vec<ConvergenceRow> = cfg
        .sweep
        .n
        .par_iter()
        .map(|&n| {
            let mesh = build_unit_square_mesh(n, cfg.mesh.diagonal)?;
            let mut quad = spec.quadrature(mesh.h());
            if quad.triangle.degree < 4 {
                quad.triangle = TriangleRule::degree4();
            }
            let gb = boundary_midpoint_values(&mesh, exact_u);
            let (sys, load) = match cfg.convergence.scheme {
                Scheme::Fve => {
                    let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter)?;
                    (assemble_fve_system(&mesh, &dual, &alpha, &quad)?, assemble_fve_rhs(&mesh, &dual, &f, &quad)?)
                }
                Scheme::Fe => (assemble_fe_system(&mesh, &alpha, &quad)?, assemble_fe_rhs(&mesh, &f, &quad)?),
            };
            let lift = sys.boundary_coupling.mul_vec(&gb);
            let rhs: Vec<f64> = load.iter().zip(&lift).map(|(a, b)| a - b).collect();
            let u = CrFunction::new(&mesh, solve_direct(&sys.operator, &rhs)?)?;
            let error = broken_h1_error_with_boundary(&u, Some(&gb), &exact, &mesh, &TriangleRule::degree4())?;
            Ok(ConvergenceRow { n, error, order: None })
        })
        .collect::<Result<_>>()?;
    for i in 1..rows.len() {
        let (prev, cur) = (&rows[i - 1], &rows[i]);
        let ratio = cur.n as f64 / prev.n as f64;
        rows[i].order = Some((prev.error / cur.error).ln() / ratio.ln());
    }
    Ok(rows)
}

/// Dense spectra of `A^FVE` and of `T_A^(k)`.
pub struct SpectrumDump {
    pub fve: Vec<Complex64>,
    pub preconditioned: Vec<Complex64>,
}

pub fn write_spectrum<W: std::io::Write>(ev: &[Complex64], mut w: W) -> std::io::Result<()> {
    writeln!(w, "re,im")?;
    for z in ev {
        writeln!(w, "{:e},{:e}", z.re, z.im)?;
    }
    Ok(())
}

pub fn run_spectrum_dump(cfg: &ExperimentConfig) -> Result<SpectrumDump> {
    let variant = Variant::from_k(cfg.solver.k)?;
    let alpha1 = cfg.alpha1_values().first().copied().unwrap_or(1.0);
    let p = Problem::from_config(cfg, alpha1)?;
    let t = p.schwarz(variant, cfg.partition.coarse_space)?;
    Ok(SpectrumDump { fve: dense_spectrum(&p.fve)?, preconditioned: dense_spectrum(&t)? })
}

/// `key,value` summary of the mesh, partition and coefficient layers.
pub fn mesh_info(cfg: &ExperimentConfig) -> Result<Vec<(String, String)>> {
    let alpha1 = cfg.alpha1_values().last().copied().unwrap_or(1.0);
    let spec = CoefficientSpec::from_config(&cfg.coefficient, cfg.mesh.n)?;
    let (mesh, alpha) = spec.realize(&build_unit_square_mesh(cfg.mesh.n, cfg.mesh.diagonal)?, alpha1)?;
    let diag = validate_mesh(&mesh);
    let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter)?;
    let part = build_block_partition(&mesh, cfg.partition.m)?;
    let contrast = layer_contrast(&part, &alpha, &mesh, &TriangleRule::degree2())?;
    let coarse = crate::decomposition::CoarseMap::new(&part, cfg.partition.coarse_space);
    let tagged = mesh.triangles().iter().filter(|t| t.region != 0).count();
    let total_volume: f64 = (0..dual.num_volumes()).map(|v| dual.volume_area(v)).sum();
    let kv = |k: &str, v: String| (k.to_string(), v);
    Ok(vec![
        kv("n", cfg.mesh.n.to_string()),
        kv("vertices", diag.num_vertices.to_string()),
        kv("triangles", diag.num_triangles.to_string()),
        kv("edges", diag.num_edges.to_string()),
        kv("dofs", diag.num_dofs.to_string()),
        kv("max_diameter", format!("{:e}", mesh.h())),
        kv("min_h", format!("{:e}", diag.min_h)),
        kv("shape_regularity", format!("{:e}", diag.shape_regularity)),
        kv("valid", diag.is_valid().to_string()),
        kv("control_volume_area", format!("{total_volume:e}")),
        kv("inclusion_triangles", tagged.to_string()),
        kv("subdomains", part.len().to_string()),
        kv("interface_dofs", part.interface_dofs().len().to_string()),
        kv("coarse_dim", coarse.dim().to_string()),
        kv("alpha1", format!("{alpha1:e}")),
        kv("layer_contrast_max", format!("{:e}", contrast.max_ratio())),
        kv("beta1_linear", format!("{:e}", contrast.beta1_linear)),
        kv("beta1_quadratic", format!("{:e}", contrast.beta1_quadratic)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(k: u8) -> ExperimentConfig {
        let mut c = ExperimentConfig::default();
        c.mesh.n = 8;
        c.partition.m = 2;
        c.solver.k = k;
        c.coefficient.preset = Some(3);
        c.coefficient.alpha1 = super::super::config::OneOrMany::Many(vec![1.0, 100.0]);
        c
    }

    #[test]
    fn iteration_table_matches_direct_solve() {
        for k in 1..=3 {
            let rows = run_iteration_table(&small(k)).unwrap();
            assert_eq!(rows.len(), 2);
            for r in &rows {
                assert!(r.converged, "k={k}: {r:?}");
                assert!(r.direct_error < 1e-4, "k={k}: {}", r.direct_error);
            }
        }
    }

    #[test]
    fn scaling_pairs_filter() {
        let mut c = small(2);
        c.sweep.n = vec![4, 8, 12];
        c.sweep.m = vec![2, 4];
        assert_eq!(scaling_pairs(&c), vec![(4, 2), (8, 2), (8, 4), (12, 2), (12, 4)]);
    }

    #[test]
    fn convergence_orders_for_linear_solution_vanish() {
        // CR elements reproduce affine functions exactly for constant α.
        let mut c = ExperimentConfig::default();
        c.coefficient.base = BaseKind::Constant;
        c.convergence.solution = ManufacturedSolution::Linear;
        c.sweep.n = vec![4, 8];
        for scheme in [Scheme::Fe, Scheme::Fve] {
            c.convergence.scheme = scheme;
            for r in run_convergence_study(&c).unwrap() {
                assert!(r.error < 1e-10, "{scheme:?}: {}", r.error);
            }
        }
    }

    #[test]
    fn csv_rows_have_header_width() {
        let row = ConvergenceRow { n: 8, error: 0.5, order: Some(1.0) };
        let mut buf = Vec::new();
        write_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
    }

    #[test]
    fn mesh_info_reports_interface() {
        let info = mesh_info(&small(2)).unwrap();
        let get = |k: &str| info.iter().find(|(key, _)| key == k).unwrap().1.clone();
        assert_eq!(get("dofs"), "176");
        assert_eq!(get("interface_dofs"), "16");
    }
}
