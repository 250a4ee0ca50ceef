//! Mixed Dirichlet-Neumann problems: right-hand sides, the block system for
//! the unknown parts of the Cauchy data, its Schur-complement and monolithic
//! solutions, and evaluation of the solution by the representation formula.
//!
//! With `φ = f₁° + g₁` and `ψ = f₂° + g₂` (zero extensions of the data plus
//! the unknowns), the unknowns satisfy
//!
//! ```text
//! [ K₂₁  -S₁₁ ] [g₁]   [F*]
//! [ D₂₂  -K*₁₂] [g₂] = [G*]
//! ```
//!
//! where the first row is tested with P0 functions on Γ₁ and the second with
//! P1 hats whose support lies in Γ₂. `g₁` lives on the vertices strictly
//! inside Γ₂ and `g₂` on the triangles of Γ₁.
//!
//! Interior problems use `u = N_λh - Kφ + Sψ`, exterior ones `u = Kφ - Sψ`.
//! Taking traces gives, with `σ = -1` inside and `σ = +1` outside,
//!
//! ```text
//! F* = σ/2 M f₁° - K f₁° + S f₂° (+ M γ_D N_λh inside)
//! G* = σ/2 Mᵀ f₂° - D f₁° + K* f₂° (+ Mᵀ γ_N N_λh inside)
//! ```
//!
//! with `M` the P0 × P1 mass matrix, both restricted to the test rows above.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::{distance_to_mesh, is_inside, BoundaryPartition, Part, Point3, SurfaceMesh};
use crate::kernels::WaveNumber;
use crate::linalg::DenseLu;
use crate::operators::{
    l2_norm_on, l2_norm_p0, l2_norm_p1, mixed_apply, mixed_apply_transpose, newton_gradient, newton_potential_eval,
    newton_traces, restrict, restrict_block, zero_extend, BoundaryOperators, CMatrix, CVector, DensityVector,
    LayerEvaluator, OperatorMatrix, Space, VolumeSourceSpec, ATOM_CLEARANCE, SAMPLE_CLEARANCE,
};

/// Space of the Dirichlet data `f₁`.
pub const DIRICHLET_DATA: Space = Space::P1Closure(Part::Dirichlet);
/// Space of the Neumann data `f₂`.
pub const NEUMANN_DATA: Space = Space::P0On(Part::Neumann);
/// Space of the unknown Dirichlet trace `g₁` on Γ₂.
pub const G1_SPACE: Space = Space::P1Interior(Part::Neumann);
/// Space of the unknown Neumann trace `g₂` on Γ₁.
pub const G2_SPACE: Space = Space::P0On(Part::Dirichlet);

/// Condition estimates above this make the Schur solve refuse to proceed.
pub const CONDITION_LIMIT: f64 = 1e12;

const EPS_GUARD: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    /// `-1` inside, `+1` outside.
    pub fn sigma(self) -> f64 {
        match self {
            Side::Interior => -1.0,
            Side::Exterior => 1.0,
        }
    }
}

/// `-Δu - λ²u = h` in Ω (or `0` outside Ω), `u = f₁` on Γ₁, `∂u/∂n = f₂` on Γ₂.
#[derive(Debug, Clone)]
pub struct MixedProblem<'a> {
    mesh: &'a SurfaceMesh,
    partition: &'a BoundaryPartition,
    wavenumber: WaveNumber,
    side: Side,
    f1: DensityVector,
    f2: DensityVector,
    volume: VolumeSourceSpec,
}

impl<'a> MixedProblem<'a> {
    pub fn new(
        mesh: &'a SurfaceMesh,
        partition: &'a BoundaryPartition,
        wavenumber: WaveNumber,
        side: Side,
        f1: DensityVector,
        f2: DensityVector,
        volume: VolumeSourceSpec,
    ) -> Result<Self> {
        partition.require_mixed()?;
        if partition.labels().len() != mesh.num_triangles() {
            return Err(BemError::Partition(format!(
                "partition labels {} triangles, mesh has {}",
                partition.labels().len(),
                mesh.num_triangles()
            )));
        }
        for (d, space, name) in [(&f1, DIRICHLET_DATA, "f1"), (&f2, NEUMANN_DATA, "f2")] {
            if d.space() != space || d.len() != space.dim(mesh, Some(partition))? {
                return Err(BemError::Dimension(format!(
                    "{name} must be {space:?} with {} coefficients, got {:?} with {}",
                    space.dim(mesh, Some(partition))?,
                    d.space(),
                    d.len()
                )));
            }
        }
        if side == Side::Exterior && !volume.is_empty() {
            return Err(BemError::InvalidInput("exterior problems take no volume source".into()));
        }
        let h = mesh.max_diameter();
        volume.validate(mesh, ATOM_CLEARANCE * h, SAMPLE_CLEARANCE * h)?;
        Ok(Self {
            mesh,
            partition,
            wavenumber,
            side,
            f1,
            f2,
            volume,
        })
    }

    /// Zero Dirichlet and Neumann data, no source.
    pub fn homogeneous(
        mesh: &'a SurfaceMesh,
        partition: &'a BoundaryPartition,
        wavenumber: WaveNumber,
        side: Side,
    ) -> Result<Self> {
        let f1 = DensityVector::zeros(DIRICHLET_DATA, mesh, Some(partition))?;
        let f2 = DensityVector::zeros(NEUMANN_DATA, mesh, Some(partition))?;
        Self::new(mesh, partition, wavenumber, side, f1, f2, VolumeSourceSpec::default())
    }

    pub fn mesh(&self) -> &'a SurfaceMesh {
        self.mesh
    }

    pub fn partition(&self) -> &'a BoundaryPartition {
        self.partition
    }

    pub fn wavenumber(&self) -> WaveNumber {
        self.wavenumber
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn f1(&self) -> &DensityVector {
        &self.f1
    }

    pub fn f2(&self) -> &DensityVector {
        &self.f2
    }

    pub fn volume(&self) -> &VolumeSourceSpec {
        &self.volume
    }

    /// Same problem with the volume source replaced.
    pub fn with_volume(&self, volume: VolumeSourceSpec) -> Result<Self> {
        Self::new(
            self.mesh,
            self.partition,
            self.wavenumber,
            self.side,
            self.f1.clone(),
            self.f2.clone(),
            volume,
        )
    }

    /// All data multiplied by `a`.
    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            f1: self.f1.scaled(a),
            f2: self.f2.scaled(a),
            volume: self.volume.scaled(a),
            ..self.clone()
        }
    }
}

/// Full Cauchy data `(φ, ψ)` on Γ.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    /// Dirichlet trace, whole-boundary P1.
    pub phi: DensityVector,
    /// Neumann trace, whole-boundary P0.
    pub psi: DensityVector,
}

fn check_operators(p: &MixedProblem, ops: &BoundaryOperators) -> Result<()> {
    if ops.s.wavenumber != p.wavenumber {
        return Err(BemError::InvalidInput(format!(
            "operators were assembled for λ = {}, problem has λ = {}",
            ops.s.wavenumber.value(),
            p.wavenumber.value()
        )));
    }
    let (nt, nv) = (p.mesh.num_triangles(), p.mesh.num_vertices());
    if ops.s.shape() != (nt, nt)
        || ops.k.shape() != (nt, nv)
        || ops.kstar.shape() != (nv, nt)
        || ops.d.shape() != (nv, nv)
    {
        return Err(BemError::Dimension("operators do not match the problem mesh".into()));
    }
    Ok(())
}

fn pick(v: &CVector, dofs: &[usize]) -> CVector {
    CVector::from_iterator(dofs.len(), dofs.iter().map(|&i| v[i]))
}

/// Loads `(F*, G*)`: F* on the Γ₁ triangles, G* on the vertices strictly
/// inside Γ₂.
pub fn build_rhs(p: &MixedProblem, ops: &BoundaryOperators) -> Result<(CVector, CVector)> {
    check_operators(p, ops)?;
    let (mesh, part) = (p.mesh, Some(p.partition));
    let half = 0.5 * p.side.sigma();
    let f1 = zero_extend(&p.f1, mesh, part)?.into_coefficients();
    let f2 = zero_extend(&p.f2, mesh, part)?.into_coefficients();
    let mut f = mixed_apply(mesh, &f1) * Complex64::from(half) - &ops.k.entries * &f1 + &ops.s.entries * &f2;
    let mut g =
        mixed_apply_transpose(mesh, &f2) * Complex64::from(half) - &ops.d.entries * &f1 + &ops.kstar.entries * &f2;
    if p.side == Side::Interior && !p.volume.is_empty() {
        let (dn, nn) = newton_traces(&p.volume, p.wavenumber, mesh)?;
        f += mixed_apply(mesh, dn.coefficients());
        g += mixed_apply_transpose(mesh, nn.coefficients());
    }
    Ok((
        pick(&f, &G2_SPACE.dofs(mesh, part)?),
        pick(&g, &G1_SPACE.dofs(mesh, part)?),
    ))
}

/// The four blocks of the system matrix.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub k21: OperatorMatrix,
    pub s11: OperatorMatrix,
    pub d22: OperatorMatrix,
    pub ks12: OperatorMatrix,
}

impl BlockOperator {
    /// Number of `g₁` unknowns (= rows of the second block row).
    pub fn n_g1(&self) -> usize {
        self.d22.entries.nrows()
    }

    /// Number of `g₂` unknowns (= rows of the first block row).
    pub fn n_g2(&self) -> usize {
        self.s11.entries.nrows()
    }

    /// The assembled block matrix; unknowns ordered `(g₁, g₂)`, rows
    /// `(Γ₁ triangles, Γ₂ interior vertices)`.
    pub fn matrix(&self) -> CMatrix {
        let (n1, n2) = (self.n_g1(), self.n_g2());
        let mut a = CMatrix::zeros(n2 + n1, n1 + n2);
        a.view_mut((0, 0), (n2, n1)).copy_from(&self.k21.entries);
        a.view_mut((0, n1), (n2, n2)).copy_from(&(-&self.s11.entries));
        a.view_mut((n2, 0), (n1, n1)).copy_from(&self.d22.entries);
        a.view_mut((n2, n1), (n1, n2)).copy_from(&(-&self.ks12.entries));
        a
    }

    pub fn apply(&self, g1: &CVector, g2: &CVector) -> Result<(CVector, CVector)> {
        if g1.len() != self.n_g1() || g2.len() != self.n_g2() {
            return Err(BemError::Dimension(format!(
                "block operator takes ({}, {}) unknowns, got ({}, {})",
                self.n_g1(),
                self.n_g2(),
                g1.len(),
                g2.len()
            )));
        }
        Ok((
            &self.k21.entries * g1 - &self.s11.entries * g2,
            &self.d22.entries * g1 - &self.ks12.entries * g2,
        ))
    }
}

pub fn assemble_block_a(
    mesh: &SurfaceMesh,
    partition: &BoundaryPartition,
    ops: &BoundaryOperators,
) -> Result<BlockOperator> {
    partition.require_mixed()?;
    if partition.interior_vertices(Part::Neumann).is_empty() {
        return Err(BemError::Partition(
            "no vertex lies strictly inside Γ₂, so g₁ has no degrees of freedom; refine the mesh or widen Γ₂".into(),
        ));
    }
    let part = Some(partition);
    Ok(BlockOperator {
        k21: restrict_block(&ops.k, G2_SPACE, G1_SPACE, mesh, part)?,
        s11: restrict_block(&ops.s, G2_SPACE, G2_SPACE, mesh, part)?,
        d22: restrict_block(&ops.d, G1_SPACE, G1_SPACE, mesh, part)?,
        ks12: restrict_block(&ops.kstar, G1_SPACE, G2_SPACE, mesh, part)?,
    })
}

fn guard(what: &'static str, estimate: f64) -> Result<()> {
    if !(estimate <= CONDITION_LIMIT) {
        return Err(BemError::NearSingular {
            what,
            estimate,
            limit: CONDITION_LIMIT,
        });
    }
    Ok(())
}

/// Factored `D₂₂` and `H = S₁₁ - K₂₁D₂₂⁻¹K*₁₂`, reusable across right-hand sides.
pub struct SchurSolver {
    d22: DenseLu,
    h: DenseLu,
    k21: CMatrix,
    ks12: CMatrix,
    pub cond_d22: f64,
    pub cond_h: f64,
}

impl SchurSolver {
    pub fn new(a: &BlockOperator) -> Result<Self> {
        let d22 = DenseLu::new(&a.d22.entries, "D22")?;
        let cond_d22 = d22.condition_estimate();
        guard("D22", cond_d22)?;
        let dks = d22.solve_matrix(&a.ks12.entries);
        let hm = &a.s11.entries - &a.k21.entries * dks;
        let h = DenseLu::new(&hm, "Schur complement H")?;
        let cond_h = h.condition_estimate();
        guard("Schur complement H", cond_h)?;
        Ok(Self {
            d22,
            h,
            k21: a.k21.entries.clone(),
            ks12: a.ks12.entries.clone(),
            cond_d22,
            cond_h,
        })
    }

    /// `g₂ = H⁻¹(K₂₁D₂₂⁻¹G* - F*)`, `g₁ = D₂₂⁻¹(K*₁₂g₂ + G*)`.
    pub fn solve(&self, f: &CVector, g: &CVector) -> Result<(CVector, CVector)> {
        if f.len() != self.h.dim() || g.len() != self.d22.dim() {
            return Err(BemError::Dimension(
                "right-hand side does not match the block operator".into(),
            ));
        }
        let t = self.d22.solve(g);
        let g2 = self.h.solve(&(&self.k21 * t - f));
        let g1 = self.d22.solve(&(&self.ks12 * &g2 + g));
        Ok((g1, g2))
    }
}

pub fn solve_schur(a: &BlockOperator, f: &CVector, g: &CVector) -> Result<(CVector, CVector)> {
    SchurSolver::new(a)?.solve(f, g)
}

/// Dense LU of the whole block matrix.
pub struct MonolithicSolver {
    lu: DenseLu,
    n_g1: usize,
    pub condition_estimate: f64,
}

impl MonolithicSolver {
    pub fn new(a: &BlockOperator) -> Result<Self> {
        let lu = DenseLu::new(&a.matrix(), "block system")?;
        let condition_estimate = lu.condition_estimate();
        Ok(Self {
            lu,
            n_g1: a.n_g1(),
            condition_estimate,
        })
    }

    pub fn solve(&self, f: &CVector, g: &CVector) -> Result<(CVector, CVector)> {
        let n = self.lu.dim();
        if f.len() + g.len() != n {
            return Err(BemError::Dimension(
                "right-hand side does not match the block operator".into(),
            ));
        }
        let mut rhs = CVector::zeros(n);
        rhs.rows_mut(0, f.len()).copy_from(f);
        rhs.rows_mut(f.len(), g.len()).copy_from(g);
        let x = self.lu.solve(&rhs);
        Ok((
            x.rows(0, self.n_g1).into_owned(),
            x.rows(self.n_g1, n - self.n_g1).into_owned(),
        ))
    }
}

pub fn solve_monolithic(a: &BlockOperator, f: &CVector, g: &CVector) -> Result<(CVector, CVector)> {
    MonolithicSolver::new(a)?.solve(f, g)
}

pub fn make_cauchy(p: &MixedProblem, g1: &DensityVector, g2: &DensityVector) -> Result<CauchyData> {
    let part = Some(p.partition);
    if g1.space() != G1_SPACE || g2.space() != G2_SPACE {
        return Err(BemError::Dimension(format!(
            "unknowns must be {G1_SPACE:?} and {G2_SPACE:?}, got {:?} and {:?}",
            g1.space(),
            g2.space()
        )));
    }
    let phi =
        zero_extend(&p.f1, p.mesh, part)?.into_coefficients() + zero_extend(g1, p.mesh, part)?.into_coefficients();
    let psi =
        zero_extend(&p.f2, p.mesh, part)?.into_coefficients() + zero_extend(g2, p.mesh, part)?.into_coefficients();
    Ok(CauchyData {
        phi: DensityVector::new(Space::P1, phi, p.mesh, None)?,
        psi: DensityVector::new(Space::P0, psi, p.mesh, None)?,
    })
}

/// Rejects points closer to Γ than one panel diameter or on the wrong side.
pub fn check_points(p: &MixedProblem, points: &[Point3]) -> Result<()> {
    let required = p.mesh.max_diameter();
    let inside_wanted = p.side == Side::Interior;
    points
        .par_iter()
        .enumerate()
        .map(|(index, x)| {
            if !(x.x.is_finite() && x.y.is_finite() && x.z.is_finite()) {
                return Err(BemError::InvalidInput(format!("point {index} is not finite")));
            }
            let distance = distance_to_mesh(p.mesh, x);
            if distance <= required {
                return Err(BemError::TooClose {
                    index,
                    distance,
                    required,
                });
            }
            if is_inside(p.mesh, x) != inside_wanted {
                return Err(BemError::WrongSide { index });
            }
            Ok(())
        })
        .collect()
}

/// `u(x)` from the representation formula.
pub fn evaluate(p: &MixedProblem, cauchy: &CauchyData, points: &[Point3]) -> Result<Vec<Complex64>> {
    check_points(p, points)?;
    let layers = LayerEvaluator::new(p.mesh, p.wavenumber)?;
    let vals = layers.values_many(cauchy.phi.coefficients(), cauchy.psi.coefficients(), points)?;
    match p.side {
        Side::Exterior => Ok(vals.into_iter().map(|(dl, sl)| dl - sl).collect()),
        Side::Interior => points
            .par_iter()
            .zip(vals)
            .map(|(x, (dl, sl))| {
                let n = if p.volume.is_empty() {
                    Complex64::new(0.0, 0.0)
                } else {
                    newton_potential_eval(&p.volume, p.wavenumber, x)?
                };
                Ok(n - dl + sl)
            })
            .collect(),
    }
}

/// `∇u(x)` from the representation formula.
pub fn evaluate_gradient(p: &MixedProblem, cauchy: &CauchyData, points: &[Point3]) -> Result<Vec<[Complex64; 3]>> {
    check_points(p, points)?;
    let layers = LayerEvaluator::new(p.mesh, p.wavenumber)?;
    let grads = layers.gradients_many(cauchy.phi.coefficients(), cauchy.psi.coefficients(), points)?;
    points
        .par_iter()
        .zip(grads)
        .map(|(x, (gd, gs))| {
            let mut out: [Complex64; 3] = std::array::from_fn(|c| gd[c] - gs[c]);
            if p.side == Side::Interior {
                let gn = if p.volume.is_empty() {
                    [Complex64::new(0.0, 0.0); 3]
                } else {
                    newton_gradient(&p.volume, p.wavenumber, x)?
                };
                out = std::array::from_fn(|c| gn[c] - out[c]);
            }
            Ok(out)
        })
        .collect()
}

/// `(‖φ‖ + ‖ψ‖) / (‖f₁‖_{Γ₁} + ‖f₂‖_{Γ₂} + ‖h‖_TV + ε)`, all norms L².
pub fn stability_ratio(p: &MixedProblem, cauchy: &CauchyData) -> Result<f64> {
    let part = Some(p.partition);
    let num = l2_norm_p1(p.mesh, cauchy.phi.coefficients()) + l2_norm_p0(p.mesh, cauchy.psi.coefficients());
    let f1 = l2_norm_on(
        p.mesh,
        &zero_extend(&p.f1, p.mesh, part)?,
        p.partition.triangles(Part::Dirichlet),
    )?;
    let f2 = l2_norm_on(
        p.mesh,
        &zero_extend(&p.f2, p.mesh, part)?,
        p.partition.triangles(Part::Neumann),
    )?;
    Ok(num / (f1 + f2 + p.volume.total_variation() + EPS_GUARD))
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub g1: DensityVector,
    pub g2: DensityVector,
    pub cauchy: CauchyData,
    /// `‖A(g₁, g₂) - (F*, G*)‖ / ‖(F*, G*)‖`.
    pub schur_residual: f64,
    /// Relative difference between the Schur and monolithic solutions.
    pub path_discrepancy: f64,
    /// 1-norm condition estimate of the block matrix.
    pub condition_estimate: f64,
    pub cond_d22: f64,
    pub cond_h: f64,
    pub stability_ratio: f64,
    pub warnings: Vec<String>,
}

/// Scalar part of a [`SolveReport`], for serialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub n_g1: usize,
    pub n_g2: usize,
    pub schur_residual: f64,
    pub path_discrepancy: f64,
    pub condition_estimate: f64,
    pub cond_d22: f64,
    pub cond_h: f64,
    pub stability_ratio: f64,
    pub phi_l2: f64,
    pub psi_l2: f64,
    pub warnings: Vec<String>,
}

impl SolveReport {
    pub fn summary(&self, mesh: &SurfaceMesh) -> ReportSummary {
        ReportSummary {
            n_g1: self.g1.len(),
            n_g2: self.g2.len(),
            schur_residual: self.schur_residual,
            path_discrepancy: self.path_discrepancy,
            condition_estimate: self.condition_estimate,
            cond_d22: self.cond_d22,
            cond_h: self.cond_h,
            stability_ratio: self.stability_ratio,
            phi_l2: l2_norm_p1(mesh, self.cauchy.phi.coefficients()),
            psi_l2: l2_norm_p0(mesh, self.cauchy.psi.coefficients()),
            warnings: self.warnings.clone(),
        }
    }
}

fn stacked_norm(a: &CVector, b: &CVector) -> f64 {
    (a.norm_squared() + b.norm_squared()).sqrt()
}

/// Block system with both factorizations, reusable across problems that
/// share the mesh, partition, and wavenumber.
pub struct MixedSolver<'a> {
    mesh: &'a SurfaceMesh,
    partition: &'a BoundaryPartition,
    ops: &'a BoundaryOperators,
    block: BlockOperator,
    schur: SchurSolver,
    mono: MonolithicSolver,
}

impl<'a> MixedSolver<'a> {
    pub fn new(mesh: &'a SurfaceMesh, partition: &'a BoundaryPartition, ops: &'a BoundaryOperators) -> Result<Self> {
        let block = assemble_block_a(mesh, partition, ops)?;
        let schur = SchurSolver::new(&block)?;
        let mono = MonolithicSolver::new(&block)?;
        Ok(Self {
            mesh,
            partition,
            ops,
            block,
            schur,
            mono,
        })
    }

    pub fn block(&self) -> &BlockOperator {
        &self.block
    }

    pub fn solve(&self, p: &MixedProblem) -> Result<SolveReport> {
        let same = std::ptr::eq(p.mesh, self.mesh)
            || (p.mesh.vertices() == self.mesh.vertices() && p.mesh.triangles() == self.mesh.triangles());
        if !same {
            return Err(BemError::InvalidInput(
                "problem mesh differs from the solver mesh".into(),
            ));
        }
        if p.partition.labels() != self.partition.labels() {
            return Err(BemError::InvalidInput(
                "problem partition differs from the solver partition".into(),
            ));
        }
        let mut warnings = Vec::new();
        if p.wavenumber.is_real_nonzero() {
            warnings.push(format!(
                "real wavenumber {}: uniqueness needs Im(λ) > 0 or λ = 0, relying on the condition estimate",
                p.wavenumber.value().re
            ));
        }
        let (f, g) = build_rhs(p, self.ops)?;
        let (g1, g2) = self.schur.solve(&f, &g)?;
        let (m1, m2) = self.mono.solve(&f, &g)?;
        let (r1, r2) = self.block.apply(&g1, &g2)?;
        let rhs_norm = stacked_norm(&f, &g);
        let res = stacked_norm(&(r1 - &f), &(r2 - &g));
        let schur_residual = if rhs_norm > 0.0 { res / rhs_norm } else { res };
        let sol_norm = stacked_norm(&g1, &g2);
        let diff = stacked_norm(&(&m1 - &g1), &(&m2 - &g2));
        let path_discrepancy = if sol_norm > 0.0 { diff / sol_norm } else { diff };
        let part = Some(self.partition);
        let g1 = DensityVector::new(G1_SPACE, g1, self.mesh, part)?;
        let g2 = DensityVector::new(G2_SPACE, g2, self.mesh, part)?;
        let cauchy = make_cauchy(p, &g1, &g2)?;
        let stability_ratio = stability_ratio(p, &cauchy)?;
        Ok(SolveReport {
            g1,
            g2,
            cauchy,
            schur_residual,
            path_discrepancy,
            condition_estimate: self.mono.condition_estimate,
            cond_d22: self.schur.cond_d22,
            cond_h: self.schur.cond_h,
            stability_ratio,
            warnings,
        })
    }
}

/// One-shot solve.
pub fn solve(p: &MixedProblem, ops: &BoundaryOperators) -> Result<SolveReport> {
    check_operators(p, ops)?;
    MixedSolver::new(p.mesh, p.partition, ops)?.solve(p)
}

/// Restriction of a whole-boundary trace to the data space of Γ₁ or Γ₂,
/// e.g. to compare `φ|Γ₁` with `f₁`.
pub fn trace_on(p: &MixedProblem, d: &DensityVector, target: Space) -> Result<DensityVector> {
    restrict(d, target, p.mesh, Some(p.partition))
}
