use std::sync::OnceLock;

use mixbem::geometry::{unit_sphere_mesh, BoundaryPartition, Part, Point3, SurfaceMesh};
use mixbem::kernels::WaveNumber;
use mixbem::operators::{
    assemble_operators, restrict, AssemblyConfig, BoundaryOperators, CMatrix, CVector, DensityVector, Space,
    VolumeSourceSpec,
};
use mixbem::solver::{
    assemble_block_a, build_rhs, evaluate, solve, solve_monolithic, solve_schur, MixedProblem, MixedSolver, Side,
    DIRICHLET_DATA, NEUMANN_DATA,
};
use mixbem::verify::manufactured_case;
use num_complex::Complex64;
use proptest::prelude::*;

fn helmholtz() -> WaveNumber {
    WaveNumber::from_parts(1.0, 1.0).unwrap()
}

struct Setup {
    mesh: SurfaceMesh,
    partition: BoundaryPartition,
    ops: BoundaryOperators,
}

fn setup(level: u32) -> &'static Setup {
    static S: [OnceLock<Setup>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    S[level as usize].get_or_init(|| {
        let mesh = unit_sphere_mesh(level).unwrap();
        let partition = BoundaryPartition::half_space(&mesh, Point3::zeros(), Point3::z()).unwrap();
        let ops = assemble_operators(&mesh, helmholtz(), &AssemblyConfig::default()).unwrap();
        Setup { mesh, partition, ops }
    })
}

fn interior_probes() -> Vec<Point3> {
    vec![
        Point3::zeros(),
        Point3::new(0.3, 0.0, 0.2),
        Point3::new(-0.2, 0.3, -0.3),
    ]
}

fn rel(a: &CVector, b: &CVector) -> f64 {
    (a - b).norm() / b.norm()
}

fn random_vec(n: usize, seed: u64) -> CVector {
    CVector::from_fn(n, |i, _| {
        let t = (i as f64 + 1.0) * (seed as f64 + 0.37);
        Complex64::new((1.7 * t).sin(), (0.9 * t).cos())
    })
}

fn random_problem<'a>(s: &'a Setup, seed: u64) -> MixedProblem<'a> {
    let part = Some(&s.partition);
    let n1 = DIRICHLET_DATA.dim(&s.mesh, part).unwrap();
    let n2 = NEUMANN_DATA.dim(&s.mesh, part).unwrap();
    let f1 = DensityVector::new(DIRICHLET_DATA, random_vec(n1, seed), &s.mesh, part).unwrap();
    let f2 = DensityVector::new(NEUMANN_DATA, random_vec(n2, seed + 11), &s.mesh, part).unwrap();
    let atom = VolumeSourceSpec::atom(Point3::new(0.1, -0.1, 0.05), Complex64::new(seed as f64 * 0.1, 1.0));
    MixedProblem::new(&s.mesh, &s.partition, helmholtz(), Side::Interior, f1, f2, atom).unwrap()
}

#[test]
fn block_shapes_match_dof_counts() {
    let s = setup(2);
    let a = assemble_block_a(&s.mesh, &s.partition, &s.ops).unwrap();
    let n_tri1 = s.partition.triangles(Part::Dirichlet).len();
    let n_int2 = s.partition.interior_vertices(Part::Neumann).len();
    assert_eq!(a.k21.shape(), (n_tri1, n_int2));
    assert_eq!(a.s11.shape(), (n_tri1, n_tri1));
    assert_eq!(a.d22.shape(), (n_int2, n_int2));
    assert_eq!(a.ks12.shape(), (n_int2, n_tri1));
    assert_eq!(a.matrix().shape(), (n_tri1 + n_int2, n_tri1 + n_int2));
    let (r1, r2) = a.apply(&CVector::zeros(n_int2), &CVector::zeros(n_tri1)).unwrap();
    assert_eq!(r1.norm() + r2.norm(), 0.0);
}

#[test]
fn partition_without_interior_neumann_vertices_is_rejected() {
    let s = setup(1);
    // a single Γ₂ triangle has no vertex whose whole star is in Γ₂
    let mut labels = vec![Part::Dirichlet; s.mesh.num_triangles()];
    labels[0] = Part::Neumann;
    let thin = BoundaryPartition::from_labels(&s.mesh, labels).unwrap();
    let err = assemble_block_a(&s.mesh, &thin, &s.ops).unwrap_err();
    assert!(err.to_string().contains("refine"), "{err}");
}

#[test]
fn solved_densities_reproduce_the_right_hand_side() {
    let s = setup(2);
    let p = random_problem(s, 3);
    let (f, g) = build_rhs(&p, &s.ops).unwrap();
    let a = assemble_block_a(&s.mesh, &s.partition, &s.ops).unwrap();
    let (g1, g2) = solve_schur(&a, &f, &g).unwrap();
    let (r1, r2) = a.apply(&g1, &g2).unwrap();
    let res = ((r1 - &f).norm_squared() + (r2 - &g).norm_squared()).sqrt();
    assert!(res < 1e-8 * (f.norm_squared() + g.norm_squared()).sqrt());
    let (m1, m2) = solve_monolithic(&a, &f, &g).unwrap();
    assert!(rel(&m1, &g1) < 1e-10 && rel(&m2, &g2) < 1e-10);
}

#[test]
fn zero_right_hand_side_gives_zero_unknowns() {
    let s = setup(1);
    let a = assemble_block_a(&s.mesh, &s.partition, &s.ops).unwrap();
    let (g1, g2) = solve_schur(&a, &CVector::zeros(a.n_g2()), &CVector::zeros(a.n_g1())).unwrap();
    assert_eq!(g1.norm() + g2.norm(), 0.0);
}

#[test]
fn schur_matches_monolithic_on_random_blocks() {
    let n1 = 7;
    let n2 = 5;
    let m = |r: usize, c: usize, seed: f64, diag: f64| {
        CMatrix::from_fn(r, c, |i, j| {
            let d = if i == j { diag } else { 0.0 };
            Complex64::new(
                d + (seed * (i * c + j + 1) as f64).sin(),
                0.3 * (seed * (i + 2 * j) as f64).cos(),
            )
        })
    };
    let s = setup(1);
    let mut a = assemble_block_a(&s.mesh, &s.partition, &s.ops).unwrap();
    a.k21.entries = m(n2, n1, 1.3, 0.0);
    a.s11.entries = m(n2, n2, 0.7, 6.0);
    a.d22.entries = m(n1, n1, 2.1, 6.0);
    a.ks12.entries = m(n1, n2, 0.5, 0.0);
    let f = random_vec(n2, 1);
    let g = random_vec(n1, 2);
    let (g1, g2) = solve_schur(&a, &f, &g).unwrap();
    let (m1, m2) = solve_monolithic(&a, &f, &g).unwrap();
    assert!(rel(&m1, &g1) < 1e-10 && rel(&m2, &g2) < 1e-10);
}

#[test]
fn dirichlet_trace_on_gamma1_is_the_data_bit_for_bit() {
    let s = setup(2);
    let p = random_problem(s, 5);
    let r = solve(&p, &s.ops).unwrap();
    let on1 = restrict(&r.cauchy.phi, DIRICHLET_DATA, &s.mesh, Some(&s.partition)).unwrap();
    assert_eq!(on1.coefficients(), p.f1().coefficients());
    let on2 = restrict(&r.cauchy.psi, NEUMANN_DATA, &s.mesh, Some(&s.partition)).unwrap();
    assert_eq!(on2.coefficients(), p.f2().coefficients());
    assert!(r.schur_residual < 1e-8);
}

#[test]
fn scaling_the_data_scales_the_solution() {
    let s = setup(2);
    let p = random_problem(s, 7);
    let solver = MixedSolver::new(&s.mesh, &s.partition, &s.ops).unwrap();
    let a = solver.solve(&p).unwrap();
    let b = solver.solve(&p.scaled(Complex64::new(10.0, 0.0))).unwrap();
    let ten = Complex64::new(10.0, 0.0);
    for (x, y) in [
        (a.g1.coefficients(), b.g1.coefficients()),
        (a.g2.coefficients(), b.g2.coefficients()),
        (a.cauchy.phi.coefficients(), b.cauchy.phi.coefficients()),
        (a.cauchy.psi.coefficients(), b.cauchy.psi.coefficients()),
    ] {
        assert!(rel(&(x * ten), y) < 1e-8);
    }
    assert!((a.stability_ratio - b.stability_ratio).abs() < 1e-8 * a.stability_ratio);
}

#[test]
fn representation_formula_with_exact_cauchy_data() {
    // no solve: plug the projected exact traces straight into the formula
    let s = setup(3);
    let case = manufactured_case(
        helmholtz(),
        Side::Interior,
        Point3::new(0.0, 0.0, 2.0),
        &s.mesh,
        &interior_probes(),
    )
    .unwrap();
    let p = case.problem(&s.mesh, &s.partition).unwrap();
    let cauchy = case.exact_cauchy(&s.mesh).unwrap();
    let u = evaluate(&p, &cauchy, &case.probes).unwrap();
    let err = case.max_relative_error(&u);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn interior_solution_approaches_dirichlet_data_near_gamma1() {
    let s = setup(3);
    let case = manufactured_case(helmholtz(), Side::Interior, Point3::new(0.0, 0.0, 2.0), &s.mesh, &[]).unwrap();
    let p = case.problem(&s.mesh, &s.partition).unwrap();
    let r = solve(&p, &s.ops).unwrap();
    // boundary point in Γ₁ and inward normal line
    let x0 = Point3::new(0.6, 0.0, 0.8);
    let f1 = case.exact_value(&x0).unwrap();
    let h = s.mesh.max_diameter();
    let depths = [3.0 * h, 2.0 * h, 1.3 * h];
    let pts: Vec<Point3> = depths.iter().map(|d| x0 * (1.0 - d)).collect();
    let u = evaluate(&p, &r.cauchy, &pts).unwrap();
    let gaps: Vec<f64> = u.iter().map(|v| (v - f1).norm()).collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
}

#[test]
fn evaluation_rejects_points_near_the_boundary_or_outside() {
    let s = setup(2);
    let p = MixedProblem::homogeneous(&s.mesh, &s.partition, helmholtz(), Side::Interior).unwrap();
    let r = solve(&p, &s.ops).unwrap();
    assert!(evaluate(&p, &r.cauchy, &[Point3::new(0.0, 0.0, 0.95)]).is_err());
    assert!(evaluate(&p, &r.cauchy, &[Point3::new(0.0, 0.0, 2.0)]).is_err());
}

#[test]
fn mismatched_wavenumber_is_rejected() {
    let s = setup(1);
    let p = MixedProblem::homogeneous(&s.mesh, &s.partition, WaveNumber::laplace(), Side::Interior).unwrap();
    assert!(build_rhs(&p, &s.ops).is_err());
}

#[test]
fn data_in_the_wrong_space_is_rejected() {
    let s = setup(1);
    let wrong = DensityVector::zeros(Space::P1, &s.mesh, None).unwrap();
    let f2 = DensityVector::zeros(NEUMANN_DATA, &s.mesh, Some(&s.partition)).unwrap();
    let r = MixedProblem::new(
        &s.mesh,
        &s.partition,
        helmholtz(),
        Side::Interior,
        wrong,
        f2,
        Default::default(),
    );
    assert!(r.is_err());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn solve_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, s1 in 0u64..50, s2 in 50u64..100) {
        let s = setup(2);
        let solver = MixedSolver::new(&s.mesh, &s.partition, &s.ops).unwrap();
        let p = random_problem(s, s1);
        let q = random_problem(s, s2);
        let (ca, cb) = (Complex64::new(a, 0.5), Complex64::new(b, -0.25));
        let f1 = p.f1().coefficients() * ca + q.f1().coefficients() * cb;
        let f2 = p.f2().coefficients() * ca + q.f2().coefficients() * cb;
        let mut vol = p.volume().scaled(ca);
        vol.atoms.extend(q.volume().scaled(cb).atoms);
        let part = Some(&s.partition);
        let combo = MixedProblem::new(
            &s.mesh,
            &s.partition,
            helmholtz(),
            Side::Interior,
            DensityVector::new(DIRICHLET_DATA, f1, &s.mesh, part).unwrap(),
            DensityVector::new(NEUMANN_DATA, f2, &s.mesh, part).unwrap(),
            vol,
        )
        .unwrap();
        let rp = solver.solve(&p).unwrap();
        let rq = solver.solve(&q).unwrap();
        let rc = solver.solve(&combo).unwrap();
        let want = rp.cauchy.psi.coefficients() * ca + rq.cauchy.psi.coefficients() * cb;
        prop_assert!(rel(rc.cauchy.psi.coefficients(), &want) < 1e-8);
        let want = rp.cauchy.phi.coefficients() * ca + rq.cauchy.phi.coefficients() * cb;
        prop_assert!(rel(rc.cauchy.phi.coefficients(), &want) < 1e-8);
        prop_assert!(rc.path_discrepancy < 1e-10);
    }
}
