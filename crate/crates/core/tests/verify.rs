use std::f64::consts::PI;

use mixbem::geometry::{unit_sphere_mesh, BoundaryPartition, Point3};
use mixbem::kernels::WaveNumber;
use mixbem::operators::{assemble_operators, AssemblyConfig};
use mixbem::solver::{MixedSolver, Side};
use mixbem::verify::{closure, jump_relation_suite, manufactured_case, radiation_check, JumpReport};

fn jump(level: u32) -> JumpReport {
    let m = unit_sphere_mesh(level).unwrap();
    let ops = assemble_operators(&m, WaveNumber::laplace(), &AssemblyConfig::default()).unwrap();
    jump_relation_suite(&m, &ops, 1).unwrap()
}

#[test]
fn jump_relations_on_refined_spheres() {
    let (a, b) = (jump(2), jump(3));
    for r in [&a, &b] {
        assert!(r.interior_double_layer.unwrap() < 5e-2);
        assert!(r.exterior_double_layer.unwrap() < 5e-2);
        assert!(r.single_layer_sphere.unwrap() < 5e-2);
        assert!(r.hypersingular_constant.unwrap() < 1e-8);
        assert!(r.s_symmetry < 1e-6 && r.d_symmetry < 1e-6 && r.k_transpose < 1e-6);
        assert!(r.single_layer_two_sided < 5e-2, "{}", r.single_layer_two_sided);
    }
    // discretization errors at least halve under refinement
    assert!(b.single_layer_sphere.unwrap() < 0.5 * a.single_layer_sphere.unwrap());
    assert!(b.single_layer_two_sided < 0.5 * a.single_layer_two_sided);
    // K·1 = -½ holds exactly on flat panels, so what is left is quadrature
    // error; it still decreases
    assert!(b.interior_double_layer.unwrap() < a.interior_double_layer.unwrap());
}

#[test]
fn identities_that_need_laplace_are_skipped_for_helmholtz() {
    let m = unit_sphere_mesh(1).unwrap();
    let ops = assemble_operators(
        &m,
        WaveNumber::from_parts(1.0, 1.0).unwrap(),
        &AssemblyConfig::default(),
    )
    .unwrap();
    let r = jump_relation_suite(&m, &ops, 1).unwrap();
    assert!(r.interior_double_layer.is_none() && r.hypersingular_constant.is_none());
    assert!(r.s_symmetry < 1e-6 && r.d_symmetry < 1e-6 && r.k_transpose < 1e-6);
}

#[test]
fn laplace_interior_closure_converges() {
    let probes = [Point3::zeros(), Point3::new(0.25, -0.25, 0.3)];
    let mut errs = Vec::new();
    for level in [2, 3] {
        let m = unit_sphere_mesh(level).unwrap();
        let p = BoundaryPartition::half_space(&m, Point3::zeros(), Point3::new(1.0, 1.0, 0.0)).unwrap();
        let ops = assemble_operators(&m, WaveNumber::laplace(), &AssemblyConfig::default()).unwrap();
        let case = manufactured_case(
            WaveNumber::laplace(),
            Side::Interior,
            Point3::new(1.5, 1.0, -0.5),
            &m,
            &probes,
        )
        .unwrap();
        let c = closure(&case, &m, &p, &ops).unwrap();
        assert!(c.report.schur_residual < 1e-8 && c.report.path_discrepancy < 1e-10);
        errs.push(c.max_relative_error);
    }
    assert!(errs[1] < 1e-2 && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn exterior_decay_matches_the_point_source() {
    let m = unit_sphere_mesh(2).unwrap();
    let p = BoundaryPartition::half_space(&m, Point3::zeros(), Point3::z()).unwrap();
    for (k, im) in [
        (WaveNumber::from_parts(1.0, 0.1).unwrap(), 0.1),
        (WaveNumber::laplace(), 0.0),
    ] {
        let ops = assemble_operators(&m, k, &AssemblyConfig::default()).unwrap();
        let case = manufactured_case(k, Side::Exterior, Point3::zeros(), &m, &[]).unwrap();
        let prob = case.problem(&m, &p).unwrap();
        let r = MixedSolver::new(&m, &p, &ops).unwrap().solve(&prob).unwrap();
        let rows = radiation_check(&prob, &r.cauchy, &[3.0, 6.0, 12.0]).unwrap();
        for row in &rows {
            let predicted = (-im * row.radius).exp() / (4.0 * PI);
            assert!((row.amplitude - predicted).abs() < 0.2 * predicted, "{row:?}");
        }
        if k.is_laplace() {
            // (|u| + R|∇u|) R = 2/(4π) for the unit source
            assert!(rows
                .iter()
                .all(|r| (r.residual - 2.0 / (4.0 * PI)).abs() < 0.2 * 2.0 / (4.0 * PI)));
        } else {
            assert!(rows[2].residual < 0.5 * rows[0].residual, "{rows:?}");
        }
    }
}

#[test]
fn radiation_check_rejects_small_radii_and_interior_problems() {
    let m = unit_sphere_mesh(1).unwrap();
    let p = BoundaryPartition::half_space(&m, Point3::zeros(), Point3::z()).unwrap();
    let k = WaveNumber::laplace();
    let ops = assemble_operators(&m, k, &AssemblyConfig::default()).unwrap();
    let case = manufactured_case(k, Side::Exterior, Point3::zeros(), &m, &[]).unwrap();
    let prob = case.problem(&m, &p).unwrap();
    let r = MixedSolver::new(&m, &p, &ops).unwrap().solve(&prob).unwrap();
    assert!(radiation_check(&prob, &r.cauchy, &[1.5]).is_err());
    let inner = manufactured_case(k, Side::Interior, Point3::new(0.0, 0.0, 3.0), &m, &[]).unwrap();
    let iprob = inner.problem(&m, &p).unwrap();
    assert!(radiation_check(&iprob, &r.cauchy, &[3.0]).is_err());
}
