//! Volume (Newton) potential of point sources and sampled densities.

use num_complex::Complex64;
use rayon::prelude::*;

use super::mass::l2_project;
use super::spaces::{CVector, DensityVector, Space};
use crate::error::{BemError, Result};
use crate::geometry::{distance_to_mesh, is_inside, Point3, SurfaceMesh};
use crate::kernels::{sample, WaveNumber};
use crate::quadrature::gauss_triangle;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub location: Point3,
    pub weight: Complex64,
}

/// One node of a user-supplied volume quadrature: contributes
/// `weight · value · Φ(x - location)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub location: Point3,
    pub weight: f64,
    pub value: Complex64,
}

/// Right-hand side `h` of `-Δu - λ²u = h` in Ω, as atoms plus a sampled
/// density.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VolumeSourceSpec {
    pub atoms: Vec<PointSource>,
    pub density_samples: Vec<DensitySample>,
}

impl VolumeSourceSpec {
    pub fn atom(location: Point3, weight: Complex64) -> Self {
        Self {
            atoms: vec![PointSource { location, weight }],
            density_samples: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.density_samples.is_empty()
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| PointSource {
                    location: a.location,
                    weight: a.weight * s,
                })
                .collect(),
            density_samples: self
                .density_samples
                .iter()
                .map(|d| DensitySample {
                    value: d.value * s,
                    ..*d
                })
                .collect(),
        }
    }

    /// `Σ|c_j| + Σ w_k |ρ_k|`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum::<f64>()
            + self
                .density_samples
                .iter()
                .map(|d| d.weight * d.value.norm())
                .sum::<f64>()
    }

    fn sources(&self) -> impl Iterator<Item = (Point3, Complex64)> + '_ {
        self.atoms
            .iter()
            .map(|a| (a.location, a.weight))
            .chain(self.density_samples.iter().map(|d| (d.location, d.value * d.weight)))
    }

    /// Checks finiteness, that every location is inside Ω, and that atoms keep
    /// `atom_clearance` and samples `sample_clearance` distance from Γ.
    pub fn validate(&self, mesh: &SurfaceMesh, atom_clearance: f64, sample_clearance: f64) -> Result<()> {
        let finite = |c: Complex64| c.re.is_finite() && c.im.is_finite();
        let check = |index: usize, x: &Point3, required: f64| -> Result<()> {
            if !(x.x.is_finite() && x.y.is_finite() && x.z.is_finite()) {
                return Err(BemError::InvalidInput(format!(
                    "source {index} has a non-finite location"
                )));
            }
            if !is_inside(mesh, x) {
                return Err(BemError::WrongSide { index });
            }
            let distance = distance_to_mesh(mesh, x);
            if distance <= required {
                return Err(BemError::TooClose {
                    index,
                    distance,
                    required,
                });
            }
            Ok(())
        };
        for (i, a) in self.atoms.iter().enumerate() {
            if !finite(a.weight) {
                return Err(BemError::InvalidInput(format!("atom {i} has a non-finite weight")));
            }
            check(i, &a.location, atom_clearance)?;
        }
        let n = self.atoms.len();
        for (i, d) in self.density_samples.iter().enumerate() {
            if !finite(d.value) || !d.weight.is_finite() {
                return Err(BemError::InvalidInput(format!("density sample {i} is not finite")));
            }
            check(n + i, &d.location, sample_clearance)?;
        }
        Ok(())
    }
}

/// `N_λh(x) = Σ_j c_j Φ(x - x_j) + Σ_k w_k ρ_k Φ(x - y_k)`.
pub fn newton_potential_eval(src: &VolumeSourceSpec, k: WaveNumber, x: &Point3) -> Result<Complex64> {
    let (kv, lap) = (k.value(), k.is_laplace());
    let mut u = ZERO;
    for (y, c) in src.sources() {
        let r = (x - y).norm();
        if r <= 1e-14 * x.norm().max(y.norm()).max(1.0) {
            return Err(BemError::SingularEvaluation { distance: r });
        }
        u += c * sample(kv, lap, r).phi;
    }
    Ok(u)
}

/// `∇N_λh(x)`.
pub fn newton_gradient(src: &VolumeSourceSpec, k: WaveNumber, x: &Point3) -> Result<[Complex64; 3]> {
    let (kv, lap) = (k.value(), k.is_laplace());
    let mut g = [ZERO; 3];
    for (y, c) in src.sources() {
        let d = x - y;
        let r = d.norm();
        if r <= 1e-14 * x.norm().max(y.norm()).max(1.0) {
            return Err(BemError::SingularEvaluation { distance: r });
        }
        let f = c * sample(kv, lap, r).grad_factor;
        for i in 0..3 {
            g[i] += f * d[i];
        }
    }
    Ok(g)
}

/// Minimum distance of an atom from Γ, in units of the largest panel
/// diameter, for the pointwise traces to be trusted.
pub const ATOM_CLEARANCE: f64 = 2.0;
/// Same for density samples, whose weights are small.
pub const SAMPLE_CLEARANCE: f64 = 1.0;

/// Dirichlet trace (L² projection onto P1) and Neumann trace (panel averages,
/// P0) of the Newton potential on Γ.
pub fn newton_traces(
    src: &VolumeSourceSpec,
    k: WaveNumber,
    mesh: &SurfaceMesh,
) -> Result<(DensityVector, DensityVector)> {
    if src.is_empty() {
        return Ok((
            DensityVector::zeros(Space::P1, mesh, None)?,
            DensityVector::zeros(Space::P0, mesh, None)?,
        ));
    }
    let h = mesh.max_diameter();
    src.validate(mesh, ATOM_CLEARANCE * h, SAMPLE_CLEARANCE * h)?;
    let dirichlet = l2_project(
        |x| newton_potential_eval(src, k, x).unwrap_or(ZERO),
        Space::P1,
        mesh,
        None,
    )?;
    let rule = gauss_triangle(6)?;
    let neumann: Vec<Complex64> = (0..mesh.num_triangles())
        .into_par_iter()
        .map(|t| {
            let p = mesh.triangle_points(t);
            let n = mesh.normal(t);
            let mut acc = ZERO;
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
                let g = newton_gradient(src, k, &x)?;
                acc += (g[0] * n.x + g[1] * n.y + g[2] * n.z) * *w;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let neumann = DensityVector::new(Space::P0, CVector::from_vec(neumann), mesh, None)?;
    Ok((dirichlet, neumann))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_mesh;
    use crate::kernels::phi;
    use std::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn single_atom_value() {
        let src = VolumeSourceSpec::atom(Point3::zeros(), one());
        let v = newton_potential_eval(&src, WaveNumber::laplace(), &Point3::new(0.6, 0.0, 0.8)).unwrap();
        assert!((v.re - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert!(newton_potential_eval(&src, WaveNumber::laplace(), &Point3::zeros()).is_err());
    }

    #[test]
    fn empty_source_is_zero() {
        let src = VolumeSourceSpec::default();
        let k = WaveNumber::from_parts(1.0, 1.0).unwrap();
        assert_eq!(
            newton_potential_eval(&src, k, &Point3::new(1.0, 2.0, 3.0)).unwrap(),
            ZERO
        );
        let m = unit_sphere_mesh(1).unwrap();
        let (d, n) = newton_traces(&src, k, &m).unwrap();
        assert!(d.coefficients().iter().all(|c| *c == ZERO));
        assert!(n.coefficients().iter().all(|c| *c == ZERO));
    }

    #[test]
    fn antisymmetric_pair_vanishes_on_midplane() {
        let src = VolumeSourceSpec {
            atoms: vec![
                PointSource {
                    location: Point3::new(0.0, 0.0, 0.3),
                    weight: one(),
                },
                PointSource {
                    location: Point3::new(0.0, 0.0, -0.3),
                    weight: -one(),
                },
            ],
            density_samples: Vec::new(),
        };
        let k = WaveNumber::from_parts(2.0, 0.5).unwrap();
        for x in [Point3::new(0.4, 0.1, 0.0), Point3::new(-1.0, 2.0, 0.0)] {
            assert!(newton_potential_eval(&src, k, &x).unwrap().norm() < 1e-16);
        }
        let a = newton_potential_eval(&src, k, &Point3::new(0.1, 0.2, 0.5)).unwrap();
        let b = newton_potential_eval(&src, k, &Point3::new(0.1, 0.2, -0.5)).unwrap();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn traces_of_centered_atom() {
        let m = unit_sphere_mesh(3).unwrap();
        let src = VolumeSourceSpec::atom(Point3::zeros(), one());
        let (d, n) = newton_traces(&src, WaveNumber::laplace(), &m).unwrap();
        // vertices lie on the unit sphere; panels sit slightly inside it
        let c = 1.0 / (4.0 * PI);
        for v in d.coefficients().iter() {
            assert!((v.re - c).abs() < 0.02 * c);
        }
        for v in n.coefficients().iter() {
            assert!((v.re + c).abs() < 0.03 * c);
        }
    }

    #[test]
    fn traces_match_finite_differences() {
        let m = unit_sphere_mesh(2).unwrap();
        let k = WaveNumber::from_parts(1.0, 0.0).unwrap();
        let src = VolumeSourceSpec::atom(Point3::new(0.1, -0.2, 0.05), Complex64::new(0.5, 0.25));
        let (_, n) = newton_traces(&src, k, &m).unwrap();
        // panel average of ∂N/∂n versus centred differences of the closed form
        let rule = gauss_triangle(6).unwrap();
        let h = 1e-5;
        for t in [0, 17, 200] {
            let p = m.triangle_points(t);
            let nt = m.normal(t);
            let mut fd = ZERO;
            for (b, w) in rule.points.iter().zip(&rule.weights) {
                let x = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
                let a = src.atoms[0];
                let up = phi(k, &(x + nt * h), &a.location).unwrap();
                let dn = phi(k, &(x - nt * h), &a.location).unwrap();
                fd += a.weight * (up - dn) / (2.0 * h) * *w;
            }
            assert!((fd - n.coefficients()[t]).norm() < 1e-4 * fd.norm());
        }
    }

    #[test]
    fn atom_near_boundary_rejected() {
        let m = unit_sphere_mesh(2).unwrap();
        let src = VolumeSourceSpec::atom(Point3::new(0.0, 0.0, 0.9), one());
        assert!(matches!(
            newton_traces(&src, WaveNumber::laplace(), &m),
            Err(BemError::TooClose { .. })
        ));
        let outside = VolumeSourceSpec::atom(Point3::new(0.0, 0.0, 2.0), one());
        assert!(matches!(
            newton_traces(&outside, WaveNumber::laplace(), &m),
            Err(BemError::WrongSide { .. })
        ));
    }
}
