//! Finite measures inside Ω as volume sources, their mollified
//! approximations, the approximating Poisson solves, and the diagnostics
//! that go with them: weak-* residuals, truncation, the Marcinkiewicz
//! quasinorm, and discrete W^{1,q} norms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::{distance_to_mesh, is_inside, Point3, SurfaceMesh};
use crate::operators::{BoundaryOperators, DensitySample, PointSource, VolumeSourceSpec};
use crate::solver::{evaluate, evaluate_gradient, MixedProblem, MixedSolver, Side, SolveReport};

/// Bump lattice points per mollifier radius.
pub const MOLLIFIER_RESOLUTION: usize = 8;

/// Largest `q` allowed by the W^{1,q} bound in three dimensions is
/// `N/(N-1) = 3/2`, exclusive.
pub const W1Q_LIMIT: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: [f64; 3],
    pub weight: f64,
}

impl Atom {
    pub fn point(&self) -> Point3 {
        Point3::from(self.location)
    }
}

/// Atoms plus an absolutely continuous part given by quadrature samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MeasureData {
    pub atoms: Vec<Atom>,
    pub smooth_part: Vec<DensitySample>,
}

impl MeasureData {
    pub fn dirac(location: Point3, weight: f64) -> Self {
        Self {
            atoms: vec![Atom {
                location: location.into(),
                weight,
            }],
            smooth_part: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.smooth_part.is_empty()
    }

    /// Every atom and sample must be strictly inside Ω.
    pub fn validate(&self, mesh: &SurfaceMesh) -> Result<()> {
        let pts = self.atoms.iter().map(|a| (a.point(), a.weight.is_finite())).chain(
            self.smooth_part
                .iter()
                .map(|d| (d.location, d.weight.is_finite() && d.value.re.is_finite())),
        );
        for (index, (x, finite)) in pts.enumerate() {
            if !finite {
                return Err(BemError::InvalidInput(format!("measure entry {index} is not finite")));
            }
            if !is_inside(mesh, &x) {
                return Err(BemError::WrongSide { index });
            }
        }
        Ok(())
    }

    /// `∫ g dμ`.
    pub fn integrate(&self, g: &(dyn Fn(&Point3) -> f64 + Sync)) -> f64 {
        self.atoms.iter().map(|a| a.weight * g(&a.point())).sum::<f64>()
            + self
                .smooth_part
                .iter()
                .map(|d| d.weight * d.value.re * g(&d.location))
                .sum::<f64>()
    }

    pub fn mass(&self) -> f64 {
        self.integrate(&|_| 1.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    weight: a.weight * s,
                    ..*a
                })
                .collect(),
            smooth_part: self
                .smooth_part
                .iter()
                .map(|d| DensitySample {
                    value: d.value * s,
                    ..*d
                })
                .collect(),
        }
    }

    pub fn to_source(&self) -> VolumeSourceSpec {
        VolumeSourceSpec {
            atoms: self
                .atoms
                .iter()
                .map(|a| PointSource {
                    location: a.point(),
                    weight: Complex64::new(a.weight, 0.0),
                })
                .collect(),
            density_samples: self.smooth_part.clone(),
        }
    }
}

/// `Σ|c_j| + ∫|ρ|`.
pub fn total_variation(mu: &MeasureData) -> f64 {
    mu.atoms.iter().map(|a| a.weight.abs()).sum::<f64>()
        + mu.smooth_part.iter().map(|d| d.weight * d.value.norm()).sum::<f64>()
}

/// Cell-centred Cartesian points inside Ω, each carrying its cell volume.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeGrid {
    pub spacing: f64,
    pub points: Vec<Point3>,
    pub weights: Vec<f64>,
}

impl VolumeGrid {
    pub fn new(mesh: &SurfaceMesh, spacing: f64) -> Result<Self> {
        if !(spacing > 0.0) {
            return Err(BemError::InvalidInput(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        let (lo, hi) = mesh.bounding_box();
        let n: [usize; 3] = std::array::from_fn(|i| ((hi[i] - lo[i]) / spacing).ceil() as usize);
        if n.iter().product::<usize>() > 50_000_000 {
            return Err(BemError::InvalidInput("volume grid is too fine for this mesh".into()));
        }
        let candidates: Vec<Point3> = (0..n[0])
            .flat_map(|i| (0..n[1]).flat_map(move |j| (0..n[2]).map(move |k| [i, j, k])))
            .map(|[i, j, k]| lo + Point3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * spacing)
            .collect();
        let points: Vec<Point3> = candidates.into_par_iter().filter(|x| is_inside(mesh, x)).collect();
        let weights = vec![spacing.powi(3); points.len()];
        Ok(Self {
            spacing,
            points,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn volume(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Points farther than `clearance` from Γ, and the number dropped.
    pub fn shaved(&self, mesh: &SurfaceMesh, clearance: f64) -> (VolumeGrid, usize) {
        let keep: Vec<bool> = self
            .points
            .par_iter()
            .map(|x| distance_to_mesh(mesh, x) > clearance)
            .collect();
        let mut out = VolumeGrid {
            spacing: self.spacing,
            points: Vec::new(),
            weights: Vec::new(),
        };
        for (i, k) in keep.iter().enumerate() {
            if *k {
                out.points.push(self.points[i]);
                out.weights.push(self.weights[i]);
            }
        }
        let dropped = self.len() - out.len();
        (out, dropped)
    }
}

fn bump(s: f64) -> f64 {
    if s < 1.0 {
        let t = 1.0 - s * s;
        t * t
    } else {
        0.0
    }
}

/// Replace every atom by the bump `(1 - (r/ε)²)²` of the same mass, sampled
/// on a cell-centred lattice of spacing `ε/8` around the atom. The smooth
/// part is passed through unchanged.
pub fn mollify(mu: &MeasureData, eps: f64, mesh: &SurfaceMesh) -> Result<MeasureData> {
    if !(eps > 0.0) {
        return Err(BemError::InvalidInput(format!(
            "mollifier radius must be positive, got {eps}"
        )));
    }
    let n = MOLLIFIER_RESOLUTION as i64;
    let h = eps / n as f64;
    // lattice offsets inside the ball and their bump values, shared by atoms
    let mut offsets = Vec::new();
    for i in -n..n {
        for j in -n..n {
            for k in -n..n {
                let d = Point3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * h;
                let b = bump(d.norm() / eps);
                if b > 0.0 {
                    offsets.push((d, b));
                }
            }
        }
    }
    let vol = h * h * h;
    let total: f64 = offsets.iter().map(|(_, b)| b * vol).sum();
    let mut smooth = mu.smooth_part.clone();
    for (index, a) in mu.atoms.iter().enumerate() {
        let c = a.point();
        let distance = distance_to_mesh(mesh, &c);
        if !is_inside(mesh, &c) {
            return Err(BemError::WrongSide { index });
        }
        if eps >= distance {
            return Err(BemError::InvalidInput(format!(
                "mollifier radius {eps} reaches the boundary from atom {index} (distance {distance:.3e})"
            )));
        }
        smooth.extend(offsets.iter().map(|(d, b)| DensitySample {
            location: c + d,
            weight: vol,
            value: Complex64::new(a.weight * b / total, 0.0),
        }));
    }
    Ok(MeasureData {
        atoms: Vec::new(),
        smooth_part: smooth,
    })
}

pub type TestFunction = fn(&Point3) -> f64;

/// `1`, `x`, `x² + y²`, `exp(z)`.
pub fn standard_tests() -> Vec<(&'static str, TestFunction)> {
    vec![
        ("one", |_| 1.0),
        ("x", |x| x.x),
        ("x2_plus_y2", |x| x.x * x.x + x.y * x.y),
        ("exp_z", |x| x.z.exp()),
    ]
}

/// `max_g |∫g dμ_ε - ∫g dμ|`.
pub fn weakstar_residual(mu: &MeasureData, mu_eps: &MeasureData, tests: &[(&str, TestFunction)]) -> f64 {
    tests
        .iter()
        .map(|(_, g)| (mu_eps.integrate(g) - mu.integrate(g)).abs())
        .fold(0.0, f64::max)
}

/// One approximating solve.
#[derive(Debug, Clone)]
pub struct SequenceStep {
    /// `None` for the atomic reference.
    pub eps: Option<f64>,
    pub source: VolumeSourceSpec,
    pub report: SolveReport,
    pub values: Vec<Complex64>,
    /// `max_i |u_ε(x_i) - u_ref(x_i)| / |u_ref(x_i)|`; zero for the reference.
    pub gap: f64,
    pub weakstar: f64,
}

#[derive(Debug, Clone)]
pub struct ApproxSequence {
    pub observe: Vec<Point3>,
    pub reference: SequenceStep,
    pub steps: Vec<SequenceStep>,
}

impl ApproxSequence {
    /// Gaps decrease strictly along the ε list.
    pub fn is_monotone(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].gap < w[0].gap)
    }
}

/// Solves the Poisson problem with the mollified measures `μ_ε` as volume
/// source for every ε, plus the atomic measure itself as reference, all with
/// one factorization.
pub fn approx_solve_sequence(
    p: &MixedProblem,
    ops: &BoundaryOperators,
    mu: &MeasureData,
    eps_list: &[f64],
    observe: &[Point3],
) -> Result<ApproxSequence> {
    if !p.wavenumber().is_laplace() {
        return Err(BemError::InvalidInput(
            "the approximating problems are posed for λ = 0".into(),
        ));
    }
    if p.side() != Side::Interior {
        return Err(BemError::InvalidInput("measure data needs an interior problem".into()));
    }
    mu.validate(p.mesh())?;
    let solver = MixedSolver::new(p.mesh(), p.partition(), ops)?;
    let run = |measure: &MeasureData| -> Result<(VolumeSourceSpec, SolveReport, Vec<Complex64>)> {
        let source = measure.to_source();
        let q = p.with_volume(source.clone())?;
        let report = solver.solve(&q)?;
        let values = evaluate(&q, &report.cauchy, observe)?;
        Ok((source, report, values))
    };
    let (source, report, values) = run(mu)?;
    let reference = SequenceStep {
        eps: None,
        source,
        report,
        values,
        gap: 0.0,
        weakstar: 0.0,
    };
    let tests = standard_tests();
    let mut steps = Vec::new();
    for &eps in eps_list {
        let m = mollify(mu, eps, p.mesh())?;
        let (source, report, values) = run(&m)?;
        let gap = values
            .iter()
            .zip(&reference.values)
            .map(|(v, r)| (v - r).norm() / r.norm().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        steps.push(SequenceStep {
            eps: Some(eps),
            source,
            report,
            values,
            gap,
            weakstar: weakstar_residual(mu, &m, &tests),
        });
    }
    Ok(ApproxSequence {
        observe: observe.to_vec(),
        reference,
        steps,
    })
}

/// `T_a(u) = max(-a, min(a, u))`, elementwise.
pub fn truncate(values: &[f64], a: f64) -> Result<Vec<f64>> {
    if !(a > 0.0) {
        return Err(BemError::InvalidInput(format!(
            "truncation level must be positive, got {a}"
        )));
    }
    Ok(values.iter().map(|u| u.clamp(-a, a)).collect())
}

/// Smallest `C` with `m(|g| > b) ≤ C b^{-r}` for every `b > 0`, where `m`
/// is the weighted counting measure of the samples `(g_i, w_i)`. The
/// supremum over `b` is attained just below one of the sample values, so it
/// is computed exactly from the sorted values.
pub fn marcinkiewicz_quasinorm(samples: &[(f64, f64)], r: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(BemError::InvalidInput("no samples".into()));
    }
    if !(r > 0.0) {
        return Err(BemError::InvalidInput(format!("exponent must be positive, got {r}")));
    }
    let mut s: Vec<(f64, f64)> = samples.iter().map(|(v, w)| (v.abs(), *w)).collect();
    s.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best: f64 = 0.0;
    let mut mass = 0.0;
    let mut i = 0;
    while i < s.len() {
        let v = s[i].0;
        while i < s.len() && s[i].0 == v {
            mass += s[i].1;
            i += 1;
        }
        if v > 0.0 {
            best = best.max(v.powf(r) * mass);
        }
    }
    Ok(best)
}

/// Discrete `(Σ w |f|^q)^{1/q}`.
pub fn lq_norm(values: &[f64], weights: &[f64], q: f64) -> f64 {
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W1qRow {
    pub eps: f64,
    pub lq_u: f64,
    pub lq_grad: f64,
    pub total: f64,
    /// Marcinkiewicz quasinorm of `|∇u_ε|` at `r = N/(N-1)`.
    pub grad_quasinorm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct W1qDiagnostic {
    pub q: f64,
    pub rows: Vec<W1qRow>,
    pub max_total: f64,
    /// `(max - min) / max` of the totals.
    pub variation: f64,
    pub grid_points: usize,
    /// Points within one panel diameter of Γ, left out.
    pub excluded: usize,
}

/// `‖u_ε‖_q + ‖∇u_ε‖_q` over the grid points farther than one panel
/// diameter from Γ, for every mollified step of `seq`.
pub fn w1q_diagnostic(p: &MixedProblem, seq: &ApproxSequence, q: f64, grid: &VolumeGrid) -> Result<W1qDiagnostic> {
    if !(1.0..W1Q_LIMIT).contains(&q) {
        return Err(BemError::InvalidInput(format!(
            "q = {q} is outside [1, N/(N-1)) = [1, 1.5), where the approximate solutions are bounded in W^(1,q)"
        )));
    }
    let (shaved, excluded) = grid.shaved(p.mesh(), p.mesh().max_diameter());
    let mut rows = Vec::new();
    for step in &seq.steps {
        let eps = step.eps.expect("mollified steps carry their radius");
        let qp = p.with_volume(step.source.clone())?;
        let u = evaluate(&qp, &step.report.cauchy, &shaved.points)?;
        let g = evaluate_gradient(&qp, &step.report.cauchy, &shaved.points)?;
        let un: Vec<f64> = u.iter().map(|v| v.norm()).collect();
        let gn: Vec<f64> = g
            .iter()
            .map(|g| (g[0].norm_sqr() + g[1].norm_sqr() + g[2].norm_sqr()).sqrt())
            .collect();
        let lq_u = lq_norm(&un, &shaved.weights, q);
        let lq_grad = lq_norm(&gn, &shaved.weights, q);
        let samples: Vec<(f64, f64)> = gn.iter().copied().zip(shaved.weights.iter().copied()).collect();
        let grad_quasinorm = if samples.is_empty() {
            0.0
        } else {
            marcinkiewicz_quasinorm(&samples, W1Q_LIMIT)?
        };
        rows.push(W1qRow {
            eps,
            lq_u,
            lq_grad,
            total: lq_u + lq_grad,
            grad_quasinorm,
        });
    }
    let max_total = rows.iter().map(|r| r.total).fold(0.0, f64::max);
    let min_total = rows.iter().map(|r| r.total).fold(f64::INFINITY, f64::min);
    let variation = if max_total > 0.0 {
        (max_total - min_total) / max_total
    } else {
        0.0
    };
    Ok(W1qDiagnostic {
        q,
        rows,
        max_total,
        variation,
        grid_points: shaved.len(),
        excluded,
    })
}
