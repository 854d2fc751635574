use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::decomposition::build_block_partition;
use crate::discretization::{assemble_fe_rhs, assemble_fve_rhs, interpolate_midpoints};
use crate::linalg::solve_direct;
use crate::linalg::vec::{dot, relative_error};
use crate::mesh::{build_dual_mesh, build_unit_square_mesh, Diagonal, InteriorPoint};

struct Setup {
    mesh: TriMesh,
    dual: DualMesh,
    part: Partition,
}

fn setup(n: usize, m: usize) -> Setup {
    let mesh = build_unit_square_mesh(n, Diagonal::default()).unwrap();
    let dual = build_dual_mesh(&mesh, InteriorPoint::Barycenter).unwrap();
    let part = build_block_partition(&mesh, m).unwrap();
    Setup { mesh, dual, part }
}

fn op(s: &Setup, v: Variant, alpha: &CoefficientField) -> SchwarzOperator {
    build_schwarz(v, &s.mesh, &s.dual, &s.part, alpha, &QuadratureRule::default(), CoarseSpace::default()).unwrap()
}

fn random(mesh: &TriMesh, seed: u64) -> CrFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CrFunction::new(mesh, (0..mesh.num_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

#[test]
fn zero_maps_to_zero_and_linear() {
    let s = setup(8, 2);
    let t = op(&s, Variant::K2, &CoefficientField::sinusoidal(3.0));
    assert!(t.apply_t(&CrFunction::zeros(&s.mesh)).unwrap().iter().all(|&v| v == 0.0));
    let (u, v) = (random(&s.mesh, 1), random(&s.mesh, 2));
    let mut w = u.clone();
    w.iter_mut().zip(v.iter()).for_each(|(a, b)| *a = 2.0 * *a - 3.0 * b);
    let tw = t.apply_t(&w).unwrap();
    let (tu, tv) = (t.apply_t(&u).unwrap(), t.apply_t(&v).unwrap());
    let comb: Vec<f64> = tu.iter().zip(tv.iter()).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
    assert!(relative_error(&tw, &comb) < 1e-12);
}

#[test]
fn single_subdomain_k1_is_identity() {
    let s = setup(4, 1);
    let t = op(&s, Variant::K1, &CoefficientField::sinusoidal(1.0));
    assert_eq!(t.coarse_dim(), 0);
    let u = random(&s.mesh, 3);
    assert!(relative_error(&t.apply_t(&u).unwrap(), &u) < 1e-12);
}

#[test]
fn k1_and_k2_agree_for_elementwise_constant() {
    let s = setup(8, 2);
    let regions = (0..s.mesh.triangles().len() as u32).map(|t| t % 3).collect();
    let mesh = s.mesh.with_regions(regions).unwrap();
    let s = Setup {
        dual: build_dual_mesh(&mesh, InteriorPoint::Barycenter).unwrap(),
        part: build_block_partition(&mesh, 2).unwrap(),
        mesh,
    };
    let alpha = CoefficientField::per_region(vec![1.0, 100.0, 7.0]);
    let (t1, t2) = (op(&s, Variant::K1, &alpha), op(&s, Variant::K2, &alpha));
    let n = s.mesh.num_dofs();
    let mut e = vec![0.0; n];
    for j in (0..n).step_by(7) {
        e[j] = 1.0;
        let (a, b) = (t1.apply_vec(&e), t2.apply_vec(&e));
        assert!(relative_error(&a, &b) < 1e-12);
        e[j] = 0.0;
    }
}

#[test]
fn k1_is_positive_in_energy() {
    let s = setup(8, 2);
    let t = op(&s, Variant::K1, &CoefficientField::sinusoidal(5.0));
    let a = t.fe_matrix().clone();
    for seed in 0..100 {
        let u = random(&s.mesh, seed);
        let tu = t.apply_t(&u).unwrap();
        assert!(dot(&a.mul_vec(&tu), &u) > 0.0);
    }
}

#[test]
fn g_is_consistent_with_discrete_solution() {
    let s = setup(8, 2);
    let alpha = CoefficientField::sinusoidal(2.0);
    let q = QuadratureRule::default();
    let f = |p: crate::mesh::Point2| 1.0 + p.x * p.y;
    let f_fve = assemble_fve_rhs(&s.mesh, &s.dual, &f, &q).unwrap();
    let f_fe = assemble_fe_rhs(&s.mesh, &f, &q).unwrap();
    for v in [Variant::K1, Variant::K2, Variant::K3] {
        let t = op(&s, v, &alpha);
        let (a, rhs) = if v == Variant::K1 { (t.fe_matrix(), &f_fe) } else { (t.fve_matrix(), &f_fve) };
        let u = CrFunction::new(&s.mesh, solve_direct(a, rhs).unwrap()).unwrap();
        let g = t.build_g(&f_fve, &f_fe).unwrap();
        assert!(relative_error(&g, &t.apply_t(&u).unwrap()) < 1e-10, "{v:?}");
    }
    let zero = CrFunction::zeros(&s.mesh);
    let t = op(&s, Variant::K2, &alpha);
    assert!(t.build_g(&zero, &zero).unwrap().iter().all(|&x| x == 0.0));
}

#[test]
fn transpose_is_adjoint() {
    let s = setup(8, 4);
    for v in [Variant::K2, Variant::K3] {
        let t = op(&s, v, &CoefficientField::sinusoidal(4.0));
        let (x, y) = (random(&s.mesh, 10), random(&s.mesh, 11));
        let mut ty = vec![0.0; y.len()];
        t.apply_transpose(&y, &mut ty);
        let lhs = dot(&t.apply_vec(&x), &y);
        let rhs = dot(&x, &ty);
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}

#[test]
fn coarse_dimensions() {
    let s = setup(32, 4);
    let alpha = CoefficientField::constant(1.0);
    let q = QuadratureRule::default();
    let iface = s.part.interface_dofs().len();
    assert_eq!(iface, 2 * 3 * 32);
    let avg = build_schwarz(Variant::K1, &s.mesh, &s.dual, &s.part, &alpha, &q, CoarseSpace::AverageInterpolation).unwrap();
    assert_eq!(avg.coarse_dim(), iface);
    let aug = build_schwarz(Variant::K1, &s.mesh, &s.dual, &s.part, &alpha, &q, CoarseSpace::Augmented).unwrap();
    assert_eq!(aug.coarse_dim(), iface + 16);
    assert_eq!(aug.num_subdomains(), 16);
}

#[test]
fn mismatched_input_rejected() {
    let s = setup(4, 2);
    let t = op(&s, Variant::K2, &CoefficientField::constant(1.0));
    let other = build_unit_square_mesh(4, Diagonal::default()).unwrap();
    let u = interpolate_midpoints(&other, |_| 1.0);
    assert!(matches!(t.apply_t(&u), Err(Error::MeshMismatch)));
}
