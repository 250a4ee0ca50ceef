//! Off-surface evaluation of the single and double layer potentials and
//! their gradients.
//!
//! Panels far from the evaluation point use a low-order rule; nearby panels
//! switch to a higher order and, closer still, to a four-way split of the
//! panel. Points are expected to be at least about one panel diameter away
//! from the boundary.

use num_complex::Complex64;
use rayon::prelude::*;

use super::spaces::CVector;
use crate::error::{BemError, Result};
use crate::geometry::{Point3, SurfaceMesh};
use crate::kernels::{grad_factor_derivative_over_r, sample, WaveNumber};
use crate::quadrature::gauss_triangle;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Quadrature points of a panel: positions, barycentrics with respect to the
/// panel, and weights including the area.
struct PointSet {
    points: Vec<Point3>,
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

fn point_set(p: &[Point3; 3], area: f64, order: u32, split: bool) -> Result<PointSet> {
    let rule = gauss_triangle(order)?;
    let mut set = PointSet {
        points: Vec::new(),
        bary: Vec::new(),
        weights: Vec::new(),
    };
    // sub-triangles in barycentric coordinates of the parent
    let e = |i: usize| {
        let mut b = [0.0; 3];
        b[i] = 1.0;
        b
    };
    let mid = |i: usize, j: usize| {
        let mut b = [0.0; 3];
        b[i] = 0.5;
        b[j] = 0.5;
        b
    };
    let subs: Vec<[[f64; 3]; 3]> = if split {
        vec![
            [e(0), mid(0, 1), mid(0, 2)],
            [mid(0, 1), e(1), mid(1, 2)],
            [mid(0, 2), mid(1, 2), e(2)],
            [mid(1, 2), mid(0, 2), mid(0, 1)],
        ]
    } else {
        vec![[e(0), e(1), e(2)]]
    };
    let sub_area = area / subs.len() as f64;
    for s in &subs {
        for (rb, w) in rule.points.iter().zip(&rule.weights) {
            let b: [f64; 3] = std::array::from_fn(|k| s[0][k] * rb[0] + s[1][k] * rb[1] + s[2][k] * rb[2]);
            set.points.push(p[0] * b[0] + p[1] * b[1] + p[2] * b[2]);
            set.bary.push(b);
            set.weights.push(w * sub_area);
        }
    }
    Ok(set)
}

/// Evaluates `(Kφ)(x) = ∫_Γ ∂Φ/∂n_y φ` and `(Sψ)(x) = ∫_Γ Φ ψ` for a P1
/// density `φ` and a P0 density `ψ` on the whole boundary.
pub struct LayerEvaluator<'a> {
    mesh: &'a SurfaceMesh,
    k: WaveNumber,
    far: Vec<PointSet>,
    near: Vec<PointSet>,
    close: Vec<PointSet>,
}

impl<'a> LayerEvaluator<'a> {
    pub fn new(mesh: &'a SurfaceMesh, k: WaveNumber) -> Result<Self> {
        let build = |order, split| -> Result<Vec<PointSet>> {
            (0..mesh.num_triangles())
                .map(|t| point_set(&mesh.triangle_points(t), mesh.area(t), order, split))
                .collect()
        };
        Ok(Self {
            mesh,
            k,
            far: build(4, false)?,
            near: build(8, false)?,
            close: build(8, true)?,
        })
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        self.mesh
    }

    fn set(&self, t: usize, x: &Point3) -> &PointSet {
        let ratio = (x - self.mesh.centroid(t)).norm() / self.mesh.diameter(t);
        if ratio > 4.0 {
            &self.far[t]
        } else if ratio > 1.5 {
            &self.near[t]
        } else {
            &self.close[t]
        }
    }

    fn check(&self, phi: &CVector, psi: &CVector) -> Result<()> {
        if phi.len() != self.mesh.num_vertices() || psi.len() != self.mesh.num_triangles() {
            return Err(BemError::Dimension(format!(
                "layer densities need {} P1 and {} P0 coefficients, got {} and {}",
                self.mesh.num_vertices(),
                self.mesh.num_triangles(),
                phi.len(),
                psi.len()
            )));
        }
        Ok(())
    }

    /// `((Kφ)(x), (Sψ)(x))`.
    pub fn values(&self, phi: &CVector, psi: &CVector, x: &Point3) -> Result<(Complex64, Complex64)> {
        self.check(phi, psi)?;
        let (kv, lap) = (self.k.value(), self.k.is_laplace());
        let (mut dl, mut sl) = (ZERO, ZERO);
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let n = self.mesh.normal(t);
            let ps = self.set(t, x);
            let (mut a, mut b) = (ZERO, ZERO);
            for q in 0..ps.points.len() {
                let d = x - ps.points[q];
                let ks = sample(kv, lap, d.norm());
                let bq = &ps.bary[q];
                let phi_q = phi[tri[0]] * bq[0] + phi[tri[1]] * bq[1] + phi[tri[2]] * bq[2];
                a += ks.grad_factor * phi_q * (-d.dot(&n) * ps.weights[q]);
                b += ks.phi * ps.weights[q];
            }
            dl += a;
            sl += b * psi[t];
        }
        Ok((dl, sl))
    }

    /// `(∇(Kφ)(x), ∇(Sψ)(x))`.
    pub fn gradients(&self, phi: &CVector, psi: &CVector, x: &Point3) -> Result<([Complex64; 3], [Complex64; 3])> {
        self.check(phi, psi)?;
        let (kv, lap) = (self.k.value(), self.k.is_laplace());
        let mut gd = [ZERO; 3];
        let mut gs = [ZERO; 3];
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            let n = self.mesh.normal(t);
            let ps = self.set(t, x);
            for q in 0..ps.points.len() {
                let d = x - ps.points[q];
                let r = d.norm();
                let g = sample(kv, lap, r).grad_factor;
                let h = grad_factor_derivative_over_r(kv, lap, r);
                let bq = &ps.bary[q];
                let w = ps.weights[q];
                let phi_q = (phi[tri[0]] * bq[0] + phi[tri[1]] * bq[1] + phi[tri[2]] * bq[2]) * w;
                let dn = d.dot(&n);
                let sw = g * psi[t] * w;
                for c in 0..3 {
                    gd[c] -= (g * n[c] + h * dn * d[c]) * phi_q;
                    gs[c] += sw * d[c];
                }
            }
        }
        Ok((gd, gs))
    }

    pub fn values_many(&self, phi: &CVector, psi: &CVector, points: &[Point3]) -> Result<Vec<(Complex64, Complex64)>> {
        points.par_iter().map(|x| self.values(phi, psi, x)).collect()
    }

    pub fn gradients_many(
        &self,
        phi: &CVector,
        psi: &CVector,
        points: &[Point3],
    ) -> Result<Vec<([Complex64; 3], [Complex64; 3])>> {
        points.par_iter().map(|x| self.gradients(phi, psi, x)).collect()
    }
}
