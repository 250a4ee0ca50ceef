//! Mass matrices, L² projections, and discrete L²(Γ) norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::spaces::{restrict, CVector, DensityVector, Space};
use super::{OperatorKind, OperatorMatrix};
use crate::error::{BemError, Result};
use crate::geometry::{BoundaryPartition, Point3, SurfaceMesh};
use crate::kernels::WaveNumber;
use crate::quadrature::gauss_triangle;

const PROJECTION_ORDER: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassKind {
    P0,
    P1,
    /// P0 rows, P1 columns: `M[t, v] = ∫_{T_t} ψ_v`.
    Mixed,
}

pub fn mass_matrix(mesh: &SurfaceMesh, kind: MassKind) -> OperatorMatrix {
    let nt = mesh.num_triangles();
    let nv = mesh.num_vertices();
    let c = |x: f64| Complex64::new(x, 0.0);
    let (entries, op, rows, cols) = match kind {
        MassKind::P0 => {
            let mut m = DMatrix::zeros(nt, nt);
            for t in 0..nt {
                m[(t, t)] = c(mesh.area(t));
            }
            (m, OperatorKind::MassP0, Space::P0, Space::P0)
        }
        MassKind::P1 => {
            let mut m = DMatrix::zeros(nv, nv);
            for (t, tri) in mesh.triangles().iter().enumerate() {
                let a = mesh.area(t) / 12.0;
                for i in 0..3 {
                    for j in 0..3 {
                        m[(tri[i], tri[j])] += c(if i == j { 2.0 * a } else { a });
                    }
                }
            }
            (m, OperatorKind::MassP1, Space::P1, Space::P1)
        }
        MassKind::Mixed => {
            let mut m = DMatrix::zeros(nt, nv);
            for (t, tri) in mesh.triangles().iter().enumerate() {
                for &v in tri {
                    m[(t, v)] = c(mesh.area(t) / 3.0);
                }
            }
            (m, OperatorKind::MassMixed, Space::P0, Space::P1)
        }
    };
    OperatorMatrix {
        kind: op,
        rows,
        cols,
        wavenumber: WaveNumber::laplace(),
        entries,
    }
}

/// `M_mixed · c` for a whole-boundary P1 vector, without forming the matrix.
pub(crate) fn mixed_apply(mesh: &SurfaceMesh, p1: &CVector) -> CVector {
    CVector::from_iterator(
        mesh.num_triangles(),
        mesh.triangles()
            .iter()
            .enumerate()
            .map(|(t, tri)| (p1[tri[0]] + p1[tri[1]] + p1[tri[2]]) * (mesh.area(t) / 3.0)),
    )
}

/// `M_mixedᵀ · c` for a whole-boundary P0 vector.
pub(crate) fn mixed_apply_transpose(mesh: &SurfaceMesh, p0: &CVector) -> CVector {
    let mut out = CVector::zeros(mesh.num_vertices());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let v = p0[t] * (mesh.area(t) / 3.0);
        for &i in tri {
            out[i] += v;
        }
    }
    out
}

pub(crate) fn p1_mass_apply(mesh: &SurfaceMesh, x: &CVector) -> CVector {
    let mut out = CVector::zeros(mesh.num_vertices());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.area(t) / 12.0;
        let s = x[tri[0]] + x[tri[1]] + x[tri[2]];
        for &i in tri {
            out[i] += (s + x[i]) * a;
        }
    }
    out
}

/// Solve `M_P1 x = b` by conjugate gradients. The mass matrix is uniformly
/// well conditioned on shape-regular meshes, so this converges in a few dozen
/// iterations.
pub(crate) fn p1_mass_solve(mesh: &SurfaceMesh, b: &CVector) -> Result<CVector> {
    let n = b.len();
    let bnorm = b.norm();
    let mut x = CVector::zeros(n);
    if bnorm == 0.0 {
        return Ok(x);
    }
    // Jacobi preconditioner: diagonal = star area / 6
    let mut diag = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        for &i in tri {
            diag[i] += mesh.area(t) / 6.0;
        }
    }
    let precond = |r: &CVector| CVector::from_iterator(n, r.iter().zip(&diag).map(|(r, d)| r / d));
    let mut r = b.clone();
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = r.dotc(&z);
    for _ in 0..10 * n.max(10) {
        let ap = p1_mass_apply(mesh, &p);
        let alpha = rz / p.dotc(&ap);
        x.axpy(alpha, &p, Complex64::new(1.0, 0.0));
        r.axpy(-alpha, &ap, Complex64::new(1.0, 0.0));
        if r.norm() <= 1e-15 * bnorm {
            return Ok(x);
        }
        z = precond(&r);
        let rz_new = r.dotc(&z);
        let beta = rz_new / rz;
        rz = rz_new;
        p = &z + &p * beta;
    }
    Err(BemError::SingularMatrix("P1 mass matrix"))
}

/// L² projection of a function onto `space` (P1 spaces project onto the whole
/// boundary first and then restrict).
pub fn l2_project<F>(
    f: F,
    space: Space,
    mesh: &SurfaceMesh,
    partition: Option<&BoundaryPartition>,
) -> Result<DensityVector>
where
    F: Fn(&Point3) -> Complex64 + Sync,
{
    let rule = gauss_triangle(PROJECTION_ORDER)?;
    let full = if space.is_p0() {
        let c = CVector::from_iterator(
            mesh.num_triangles(),
            (0..mesh.num_triangles()).map(|t| {
                let p = mesh.triangle_points(t);
                rule.points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(b, w)| f(&(p[0] * b[0] + p[1] * b[1] + p[2] * b[2])) * *w)
                    .sum::<Complex64>()
            }),
        );
        DensityVector::new(Space::P0, c, mesh, None)?
    } else {
        let mut load = CVector::zeros(mesh.num_vertices());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let p = mesh.triangle_points(t);
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let v = f(&(p[0] * b[0] + p[1] * b[1] + p[2] * b[2])) * (*w * mesh.area(t));
                for k in 0..3 {
                    load[tri[k]] += v * b[k];
                }
            }
        }
        DensityVector::new(Space::P1, p1_mass_solve(mesh, &load)?, mesh, None)?
    };
    if space.is_full() {
        Ok(full)
    } else {
        restrict(&full, space, mesh, partition)
    }
}

/// Panel averages of a flux `f(x, n)` evaluated with the panel normal, for
/// Neumann data. `space` must be a P0 space.
pub fn project_flux<F>(
    f: F,
    space: Space,
    mesh: &SurfaceMesh,
    partition: Option<&BoundaryPartition>,
) -> Result<DensityVector>
where
    F: Fn(&Point3, &Point3) -> Complex64 + Sync,
{
    if !space.is_p0() {
        return Err(BemError::Dimension(format!(
            "flux data lives in a P0 space, got {space:?}"
        )));
    }
    let rule = gauss_triangle(PROJECTION_ORDER)?;
    let c = CVector::from_iterator(
        mesh.num_triangles(),
        (0..mesh.num_triangles()).map(|t| {
            let p = mesh.triangle_points(t);
            let n = mesh.normal(t);
            rule.points
                .iter()
                .zip(&rule.weights)
                .map(|(b, w)| f(&(p[0] * b[0] + p[1] * b[1] + p[2] * b[2]), &n) * *w)
                .sum::<Complex64>()
        }),
    );
    let full = DensityVector::new(Space::P0, c, mesh, None)?;
    if space.is_full() {
        Ok(full)
    } else {
        restrict(&full, space, mesh, partition)
    }
}

/// `‖u‖_{L²(Γ)}` of a whole-boundary P0 vector.
pub fn l2_norm_p0(mesh: &SurfaceMesh, c: &CVector) -> f64 {
    c.iter()
        .zip(mesh.areas())
        .map(|(c, a)| c.norm_sqr() * a)
        .sum::<f64>()
        .sqrt()
}

/// `‖u‖_{L²(Γ)}` of a whole-boundary P1 vector.
pub fn l2_norm_p1(mesh: &SurfaceMesh, c: &CVector) -> f64 {
    c.dotc(&p1_mass_apply(mesh, c)).re.max(0.0).sqrt()
}

/// L² norm of a P0 or P1 vector restricted to a set of triangles.
pub fn l2_norm_on(mesh: &SurfaceMesh, d: &DensityVector, triangles: &[usize]) -> Result<f64> {
    let c = d.coefficients();
    let s: f64 = match d.space() {
        Space::P0 => triangles.iter().map(|&t| c[t].norm_sqr() * mesh.area(t)).sum(),
        Space::P1 => triangles
            .iter()
            .map(|&t| {
                let tri = mesh.triangles()[t];
                let v = [c[tri[0]], c[tri[1]], c[tri[2]]];
                let sum = v[0] + v[1] + v[2];
                let q: f64 = (0..3).map(|i| (v[i].conj() * (sum + v[i])).re).sum();
                q * mesh.area(t) / 12.0
            })
            .sum(),
        other => {
            return Err(BemError::Dimension(format!(
                "norm on triangles needs a whole-boundary vector, got {other:?}"
            )))
        }
    };
    Ok(s.max(0.0).sqrt())
}
