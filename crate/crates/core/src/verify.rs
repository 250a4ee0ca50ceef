//! Exact-solution oracles and property checks: manufactured point-source
//! problems, jump-relation residuals, and decay at infinity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::{distance_to_mesh, is_inside, BoundaryPartition, Point3, SurfaceMesh};
use crate::kernels::{dphi_dnx, grad_phi_x, phi, WaveNumber};
use crate::operators::{
    l2_norm_p0, l2_project, project_flux, BoundaryOperators, CVector, DensityVector, LayerEvaluator, Space,
    VolumeSourceSpec,
};
use crate::solver::{evaluate, evaluate_gradient, CauchyData, MixedProblem, MixedSolver, Side, SolveReport};
use crate::solver::{DIRICHLET_DATA, NEUMANN_DATA};

/// Minimum source-to-boundary distance as a fraction of the domain diameter.
pub const SOURCE_CLEARANCE: f64 = 0.2;

/// Largest distance between two vertices.
pub fn domain_diameter(mesh: &SurfaceMesh) -> f64 {
    let v = mesh.vertices();
    (0..v.len())
        .into_par_iter()
        .map(|i| v[i + 1..].iter().map(|w| (v[i] - w).norm()).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max)
}

/// Dirichlet data on Γ₁ (L² projection) and Neumann data on Γ₂ (panel
/// averages) of a field given with its normal derivative.
pub fn boundary_data<U, G>(
    u: U,
    dudn: G,
    mesh: &SurfaceMesh,
    partition: &BoundaryPartition,
) -> Result<(DensityVector, DensityVector)>
where
    U: Fn(&Point3) -> Complex64 + Sync,
    G: Fn(&Point3, &Point3) -> Complex64 + Sync,
{
    Ok((
        l2_project(u, DIRICHLET_DATA, mesh, Some(partition))?,
        project_flux(dudn, NEUMANN_DATA, mesh, Some(partition))?,
    ))
}

/// `u = Φ_λ(x - y*)` with `y*` on the far side of Γ, so `u` solves the
/// homogeneous equation on the problem side.
#[derive(Debug, Clone)]
pub struct ManufacturedCase {
    pub wavenumber: WaveNumber,
    pub side: Side,
    pub source: Point3,
    pub probes: Vec<Point3>,
    pub exact: Vec<Complex64>,
}

impl ManufacturedCase {
    pub fn exact_value(&self, x: &Point3) -> Result<Complex64> {
        phi(self.wavenumber, x, &self.source)
    }

    pub fn exact_gradient(&self, x: &Point3) -> Result<[Complex64; 3]> {
        grad_phi_x(self.wavenumber, x, &self.source)
    }

    /// The mixed problem with data read off the exact field.
    pub fn problem<'a>(&self, mesh: &'a SurfaceMesh, partition: &'a BoundaryPartition) -> Result<MixedProblem<'a>> {
        let (k, y) = (self.wavenumber, self.source);
        let (f1, f2) = boundary_data(
            |x| phi(k, x, &y).unwrap_or_default(),
            |x, n| dphi_dnx(k, x, &y, n).unwrap_or_default(),
            mesh,
            partition,
        )?;
        MixedProblem::new(mesh, partition, k, self.side, f1, f2, VolumeSourceSpec::default())
    }

    /// Exact Cauchy data, projected the same way as the problem data.
    pub fn exact_cauchy(&self, mesh: &SurfaceMesh) -> Result<CauchyData> {
        let (k, y) = (self.wavenumber, self.source);
        Ok(CauchyData {
            phi: l2_project(|x| phi(k, x, &y).unwrap_or_default(), Space::P1, mesh, None)?,
            psi: project_flux(|x, n| dphi_dnx(k, x, &y, n).unwrap_or_default(), Space::P0, mesh, None)?,
        })
    }

    /// `max_i |v_i - u_i| / |u_i|`.
    pub fn max_relative_error(&self, values: &[Complex64]) -> f64 {
        max_relative_error(values, &self.exact)
    }
}

pub fn max_relative_error(values: &[Complex64], exact: &[Complex64]) -> f64 {
    values
        .iter()
        .zip(exact)
        .map(|(v, e)| (v - e).norm() / e.norm())
        .fold(0.0, f64::max)
}

fn check_probe(mesh: &SurfaceMesh, side: Side, index: usize, x: &Point3) -> Result<()> {
    let required = mesh.max_diameter();
    let distance = distance_to_mesh(mesh, x);
    if distance <= required {
        return Err(BemError::TooClose {
            index,
            distance,
            required,
        });
    }
    if is_inside(mesh, x) != (side == Side::Interior) {
        return Err(BemError::WrongSide { index });
    }
    Ok(())
}

pub fn manufactured_case(
    wavenumber: WaveNumber,
    side: Side,
    source: Point3,
    mesh: &SurfaceMesh,
    probes: &[Point3],
) -> Result<ManufacturedCase> {
    let required = SOURCE_CLEARANCE * domain_diameter(mesh);
    let distance = distance_to_mesh(mesh, &source);
    if distance <= required {
        return Err(BemError::InvalidInput(format!(
            "source is {distance:.3e} from the boundary, needs more than {required:.3e}"
        )));
    }
    // the source sits on the side opposite to the problem
    if is_inside(mesh, &source) == (side == Side::Interior) {
        return Err(BemError::InvalidInput(format!(
            "a {side:?} manufactured problem needs its source on the other side of the boundary"
        )));
    }
    for (i, x) in probes.iter().enumerate() {
        check_probe(mesh, side, i, x)?;
    }
    let exact = probes
        .iter()
        .map(|x| phi(wavenumber, x, &source))
        .collect::<Result<_>>()?;
    Ok(ManufacturedCase {
        wavenumber,
        side,
        source,
        probes: probes.to_vec(),
        exact,
    })
}

/// Solve, evaluate at the probes, and compare with the exact field.
#[derive(Debug, Clone)]
pub struct Closure {
    pub report: SolveReport,
    pub values: Vec<Complex64>,
    pub max_relative_error: f64,
}

pub fn closure(
    case: &ManufacturedCase,
    mesh: &SurfaceMesh,
    partition: &BoundaryPartition,
    ops: &BoundaryOperators,
) -> Result<Closure> {
    let p = case.problem(mesh, partition)?;
    let report = MixedSolver::new(mesh, partition, ops)?.solve(&p)?;
    let values = evaluate(&p, &report.cauchy, &case.probes)?;
    let max_relative_error = case.max_relative_error(&values);
    Ok(Closure {
        report,
        values,
        max_relative_error,
    })
}

/// Residuals of the jump relations and operator symmetries. Entries that do
/// not apply (λ ≠ 0 identities, `S·1` off the sphere) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpReport {
    /// `‖(-½I + K)1 + 1‖ / ‖1‖`, λ = 0.
    pub interior_double_layer: Option<f64>,
    /// `‖(½I + K)1‖ / ‖1‖`, λ = 0.
    pub exterior_double_layer: Option<f64>,
    /// `‖S·1 - R‖ / ‖R‖` on a sphere of radius R, λ = 0.
    pub single_layer_sphere: Option<f64>,
    /// `‖D·1‖ / ‖D‖`, λ = 0.
    pub hypersingular_constant: Option<f64>,
    pub s_symmetry: f64,
    pub d_symmetry: f64,
    pub k_transpose: f64,
    /// Relative gap between the interior and exterior limits of a single
    /// layer potential with a random smooth density.
    pub single_layer_two_sided: f64,
}

impl JumpReport {
    pub fn rows(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("interior_double_layer", self.interior_double_layer),
            ("exterior_double_layer", self.exterior_double_layer),
            ("single_layer_sphere", self.single_layer_sphere),
            ("hypersingular_constant", self.hypersingular_constant),
            ("s_symmetry", Some(self.s_symmetry)),
            ("d_symmetry", Some(self.d_symmetry)),
            ("k_transpose", Some(self.k_transpose)),
            ("single_layer_two_sided", Some(self.single_layer_two_sided)),
        ]
    }
}

fn max_abs(m: &crate::operators::CMatrix) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Radius of the sphere through all vertices, if there is one.
fn sphere_radius(mesh: &SurfaceMesh) -> Option<f64> {
    let norms: Vec<f64> = mesh.vertices().iter().map(|v| v.norm()).collect();
    let r = norms.iter().sum::<f64>() / norms.len() as f64;
    norms.iter().all(|n| (n - r).abs() < 1e-9 * r).then_some(r)
}

/// Value at `t = 0` of the Lagrange polynomial through `(t_i, v_i)`.
fn extrapolate(t: &[f64], v: &[Complex64]) -> Complex64 {
    let mut out = Complex64::new(0.0, 0.0);
    for i in 0..t.len() {
        let mut l = 1.0;
        for j in 0..t.len() {
            if j != i {
                l *= t[j] / (t[j] - t[i]);
            }
        }
        out += v[i] * l;
    }
    out
}

pub fn jump_relation_suite(mesh: &SurfaceMesh, ops: &BoundaryOperators, seed: u64) -> Result<JumpReport> {
    let nt = mesh.num_triangles();
    let nv = mesh.num_vertices();
    let k = ops.s.wavenumber;
    let lap = k.is_laplace();
    let one_p0 = CVector::from_element(nt, Complex64::new(1.0, 0.0));
    let one_p1 = CVector::from_element(nv, Complex64::new(1.0, 0.0));
    let unit = l2_norm_p0(mesh, &one_p0);
    // panel values of a P0-tested load
    let values = |load: CVector| CVector::from_iterator(nt, load.iter().enumerate().map(|(t, v)| v / mesh.area(t)));
    let k1 = values(&ops.k.entries * &one_p1);
    let interior = lap.then(|| l2_norm_p0(mesh, &k1.add_scalar(Complex64::new(0.5, 0.0))) / unit);
    // (½I + K)1: the identity term is ½ on every panel, same residual form
    let exterior = lap.then(|| l2_norm_p0(mesh, &k1.add_scalar(Complex64::new(0.5, 0.0))) / unit);
    let single = match (lap, sphere_radius(mesh)) {
        (true, Some(r)) => {
            let s1 = values(&ops.s.entries * &one_p0);
            Some(l2_norm_p0(mesh, &s1.add_scalar(Complex64::new(-r, 0.0))) / (r * unit))
        }
        _ => None,
    };
    let d = &ops.d.entries;
    let hyper = lap.then(|| (d * &one_p1).norm() / d.norm());
    let s = &ops.s.entries;
    let s_symmetry = max_abs(&(s - s.transpose())) / max_abs(s);
    let d_symmetry = max_abs(&(d - d.transpose())) / max_abs(d);
    let kk = &ops.k.entries;
    let k_transpose = max_abs(&(ops.kstar.entries.transpose() - kk)) / max_abs(kk);
    let single_layer_two_sided = two_sided_single_layer(mesh, k, seed)?;
    Ok(JumpReport {
        interior_double_layer: interior,
        exterior_double_layer: exterior,
        single_layer_sphere: single,
        hypersingular_constant: hyper,
        s_symmetry,
        d_symmetry,
        k_transpose,
        single_layer_two_sided,
    })
}

/// Evaluate `Sψ` along the normal line through a few panel centroids at
/// depths between 1.1 and 2 panel diameters on both sides, extrapolate each
/// side to the surface with a cubic, and report the largest gap relative to the largest
/// limit.
fn two_sided_single_layer(mesh: &SurfaceMesh, k: WaveNumber, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // smooth random density: random quadratic polynomial in x, y, z
    let coef: Vec<Complex64> = (0..10)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let density = move |x: &Point3| {
        let m = [
            1.0,
            x.x,
            x.y,
            x.z,
            x.x * x.x,
            x.y * x.y,
            x.z * x.z,
            x.x * x.y,
            x.y * x.z,
            x.z * x.x,
        ];
        coef.iter().zip(m).map(|(c, m)| c * m).sum::<Complex64>()
    };
    let psi = l2_project(density, Space::P0, mesh, None)?;
    let phi0 = CVector::zeros(mesh.num_vertices());
    let layers = LayerEvaluator::new(mesh, k)?;
    let h = mesh.max_diameter();
    let depths = [1.1 * h, 1.4 * h, 1.7 * h, 2.0 * h];
    let nt = mesh.num_triangles();
    let picks: Vec<usize> = (0..8).map(|_| rng.random_range(0..nt)).collect();
    let mut gap: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for t in picks {
        let c = mesh.centroid(t);
        let n = mesh.normal(t);
        let side = |sign: f64| -> Result<Complex64> {
            let mut v = [Complex64::new(0.0, 0.0); 4];
            for (i, d) in depths.iter().enumerate() {
                v[i] = layers.values(&phi0, psi.coefficients(), &(c + n * (sign * d)))?.1;
            }
            Ok(extrapolate(&depths, &v))
        };
        let inner = side(-1.0)?;
        let outer = side(1.0)?;
        gap = gap.max((inner - outer).norm());
        scale = scale.max(inner.norm()).max(outer.norm());
    }
    Ok(if scale > 0.0 { gap / scale } else { gap })
}

/// Decay of an exterior solution on a ladder of spheres centred at the
/// origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiationRow {
    pub radius: f64,
    /// `max |u| R`.
    pub amplitude: f64,
    /// `max |∂u/∂R - iλu| R` (λ ≠ 0) or `max (|u| + R|∇u|) R` (λ = 0).
    pub residual: f64,
}

/// Fibonacci points on the unit sphere.
pub fn sphere_directions(n: usize) -> Vec<Point3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * i as f64;
            Point3::new(r * a.cos(), r * a.sin(), z)
        })
        .collect()
}

pub const RADIATION_DIRECTIONS: usize = 32;

pub fn radiation_check(p: &MixedProblem, cauchy: &CauchyData, radii: &[f64]) -> Result<Vec<RadiationRow>> {
    if p.side() != Side::Exterior {
        return Err(BemError::InvalidInput(
            "radiation check needs an exterior problem".into(),
        ));
    }
    let min = 2.0 * p.mesh().circumradius();
    let lam = p.wavenumber().value();
    let dirs = sphere_directions(RADIATION_DIRECTIONS);
    let mut rows = Vec::new();
    for &radius in radii {
        if !(radius >= min) {
            return Err(BemError::InvalidInput(format!(
                "radius {radius} is below twice the mesh circumradius ({min})"
            )));
        }
        let pts: Vec<Point3> = dirs.iter().map(|d| d * radius).collect();
        let u = evaluate(p, cauchy, &pts)?;
        let g = evaluate_gradient(p, cauchy, &pts)?;
        let mut amplitude: f64 = 0.0;
        let mut residual: f64 = 0.0;
        for ((u, g), d) in u.iter().zip(&g).zip(&dirs) {
            amplitude = amplitude.max(u.norm() * radius);
            let du_dr = g[0] * d.x + g[1] * d.y + g[2] * d.z;
            let r = if p.wavenumber().is_laplace() {
                let grad = (g[0].norm_sqr() + g[1].norm_sqr() + g[2].norm_sqr()).sqrt();
                (u.norm() + radius * grad) * radius
            } else {
                (du_dr - Complex64::i() * lam * u).norm() * radius
            };
            residual = residual.max(r);
        }
        rows.push(RadiationRow {
            radius,
            amplitude,
            residual,
        });
    }
    Ok(rows)
}
