use criterion::{black_box, criterion_group, criterion_main, Criterion};

use crfve::decomposition::{build_block_partition, CoarseSpace};
use crfve::discretization::{assemble_fe_matrix, assemble_fve_matrix, CoefficientField, QuadratureRule};
use crfve::harness::{preset_geometry, solve_preconditioned, Problem, SolverConfig};
use crfve::linalg::LinearOperator;
use crfve::mesh::{build_dual_mesh, build_unit_square_mesh, Diagonal, InteriorPoint};
use crfve::schwarz::{build_schwarz, Variant};

fn assembly(c: &mut Criterion) {
    let mesh = build_unit_square_mesh(64, Diagonal::default()).unwrap();
    let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter).unwrap();
    let alpha = CoefficientField::sinusoidal(100.0);
    let quad = QuadratureRule::default();
    c.bench_function("assemble_fe n=64", |b| b.iter(|| assemble_fe_matrix(&mesh, &alpha, &quad).unwrap()));
    c.bench_function("assemble_fve n=64", |b| b.iter(|| assemble_fve_matrix(&mesh, &dual, &alpha, &quad).unwrap()));
}

fn apply_t(c: &mut Criterion) {
    let mesh = build_unit_square_mesh(64, Diagonal::default()).unwrap();
    let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter).unwrap();
    let part = build_block_partition(&mesh, 4).unwrap();
    let alpha = CoefficientField::sinusoidal(100.0);
    let quad = QuadratureRule::default();
    for variant in [Variant::K2, Variant::K3] {
        let t = build_schwarz(variant, &mesh, &dual, &part, &alpha, &quad, CoarseSpace::default()).unwrap();
        let x: Vec<f64> = (0..t.dim()).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; t.dim()];
        c.bench_function(&format!("apply_T k={} n=64", variant.k()), |b| {
            b.iter(|| t.apply(black_box(&x), &mut y))
        });
    }
}

fn gmres_solve(c: &mut Criterion) {
    let spec = preset_geometry(4, 32).unwrap();
    let p = Problem::build(32, Diagonal::default(), 4, &spec, 1e3, &|_| 1.0).unwrap();
    let solver = SolverConfig::default();
    let mut g = c.benchmark_group("gmres");
    g.sample_size(10);
    g.bench_function("example4 n=32 alpha1=1e3 k=2", |b| {
        b.iter(|| solve_preconditioned(&p, Variant::K2, CoarseSpace::default(), &solver, false).unwrap())
    });
    g.finish();
}

criterion_group!(benches, assembly, apply_t, gmres_solve);
criterion_main!(benches);
