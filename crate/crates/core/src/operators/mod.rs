//! Galerkin matrices of the boundary integral operators, trace spaces, and
//! the Newton potential.
//!
//! Conventions (outward normal, `Φ(x, y) = e^{iλr}/(4πr)`):
//!
//! - `S ψ(x)  = ∫ Φ ψ`, P0 × P0
//! - `K φ(x)  = ∫ ∂Φ/∂n_y φ`, P0 rows × P1 columns; `K·1 = -½` on smooth Γ
//!   for λ = 0, so the interior trace of the double layer is `(-½ + K)φ`
//! - `K* ψ(x) = ∫ ∂Φ/∂n_x ψ`, P1 rows × P0 columns
//! - `D φ     = ∂/∂n (double layer)`, P1 × P1, assembled as the negative of
//!   the surface-curl bilinear form

mod assembly;
pub mod dump;
mod mass;
mod newton;
mod potentials;
mod spaces;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use mass::{l2_norm_on, l2_norm_p0, l2_norm_p1, l2_project, mass_matrix, project_flux, MassKind};
pub(crate) use mass::{mixed_apply, mixed_apply_transpose};
pub use newton::{
    newton_gradient, newton_potential_eval, newton_traces, DensitySample, PointSource, VolumeSourceSpec,
    ATOM_CLEARANCE, SAMPLE_CLEARANCE,
};
pub use potentials::LayerEvaluator;
pub use spaces::{restrict, zero_extend, CVector, DensityVector, Space};

use crate::error::{BemError, Result};
use crate::geometry::{BoundaryPartition, SurfaceMesh};
use crate::kernels::WaveNumber;
use crate::quadrature::{PairRules, QuadratureConfig};

pub type CMatrix = DMatrix<Complex64>;

pub const DEFAULT_DOF_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    S,
    K,
    Kstar,
    D,
    MassP0,
    MassP1,
    MassMixed,
}

impl OperatorKind {
    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::S => "S",
            OperatorKind::K => "K",
            OperatorKind::Kstar => "Kstar",
            OperatorKind::D => "D",
            OperatorKind::MassP0 => "massP0",
            OperatorKind::MassP1 => "massP1",
            OperatorKind::MassMixed => "massMixed",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            OperatorKind::S,
            OperatorKind::K,
            OperatorKind::Kstar,
            OperatorKind::D,
            OperatorKind::MassP0,
            OperatorKind::MassP1,
            OperatorKind::MassMixed,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

/// Dense matrix of Galerkin pairings `⟨A(basis_col), basis_row⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub rows: Space,
    pub cols: Space,
    pub wavenumber: WaveNumber,
    pub entries: CMatrix,
}

impl OperatorMatrix {
    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    /// Apply to a density in the column space.
    pub fn apply(&self, d: &DensityVector) -> Result<CVector> {
        if d.space() != self.cols || d.len() != self.entries.ncols() {
            return Err(BemError::Dimension(format!(
                "{} expects {:?} of length {}, got {:?} of length {}",
                self.kind.name(),
                self.cols,
                self.entries.ncols(),
                d.space(),
                d.len()
            )));
        }
        Ok(&self.entries * d.coefficients())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssemblyConfig {
    pub quadrature: QuadratureConfig,
    pub dof_cap: usize,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            dof_cap: DEFAULT_DOF_CAP,
        }
    }
}

/// The four boundary operators on the whole of Γ for one wavenumber.
#[derive(Debug, Clone)]
pub struct BoundaryOperators {
    pub s: OperatorMatrix,
    pub k: OperatorMatrix,
    pub kstar: OperatorMatrix,
    pub d: OperatorMatrix,
}

fn wrap(kind: OperatorKind, rows: Space, cols: Space, k: WaveNumber, entries: Option<CMatrix>) -> OperatorMatrix {
    OperatorMatrix {
        kind,
        rows,
        cols,
        wavenumber: k,
        entries: entries.expect("requested operator was assembled"),
    }
}

fn run(mesh: &SurfaceMesh, k: WaveNumber, cfg: &AssemblyConfig, want: assembly::Wanted) -> Result<assembly::Assembled> {
    let rules = PairRules::new(cfg.quadrature)?;
    assembly::assemble(mesh, k, &rules, want, cfg.dof_cap)
}

/// S, K, K*, and D in a single sweep over panel pairs.
pub fn assemble_operators(mesh: &SurfaceMesh, k: WaveNumber, cfg: &AssemblyConfig) -> Result<BoundaryOperators> {
    let a = run(
        mesh,
        k,
        cfg,
        assembly::Wanted {
            s: true,
            k: true,
            ks: true,
            d: true,
        },
    )?;
    Ok(BoundaryOperators {
        s: wrap(OperatorKind::S, Space::P0, Space::P0, k, a.s),
        k: wrap(OperatorKind::K, Space::P0, Space::P1, k, a.k),
        kstar: wrap(OperatorKind::Kstar, Space::P1, Space::P0, k, a.ks),
        d: wrap(OperatorKind::D, Space::P1, Space::P1, k, a.d),
    })
}

pub fn assemble_single_layer(mesh: &SurfaceMesh, k: WaveNumber, cfg: &AssemblyConfig) -> Result<OperatorMatrix> {
    let a = run(
        mesh,
        k,
        cfg,
        assembly::Wanted {
            s: true,
            ..Default::default()
        },
    )?;
    Ok(wrap(OperatorKind::S, Space::P0, Space::P0, k, a.s))
}

pub fn assemble_double_layer(mesh: &SurfaceMesh, k: WaveNumber, cfg: &AssemblyConfig) -> Result<OperatorMatrix> {
    let a = run(
        mesh,
        k,
        cfg,
        assembly::Wanted {
            k: true,
            ..Default::default()
        },
    )?;
    Ok(wrap(OperatorKind::K, Space::P0, Space::P1, k, a.k))
}

pub fn assemble_adjoint_double_layer(
    mesh: &SurfaceMesh,
    k: WaveNumber,
    cfg: &AssemblyConfig,
) -> Result<OperatorMatrix> {
    let a = run(
        mesh,
        k,
        cfg,
        assembly::Wanted {
            ks: true,
            ..Default::default()
        },
    )?;
    Ok(wrap(OperatorKind::Kstar, Space::P1, Space::P0, k, a.ks))
}

pub fn assemble_hypersingular(mesh: &SurfaceMesh, k: WaveNumber, cfg: &AssemblyConfig) -> Result<OperatorMatrix> {
    let a = run(
        mesh,
        k,
        cfg,
        assembly::Wanted {
            d: true,
            ..Default::default()
        },
    )?;
    Ok(wrap(OperatorKind::D, Space::P1, Space::P1, k, a.d))
}

/// Submatrix with rows from `row_space` and columns from `col_space`. Both
/// must embed into the matching whole-boundary space of `m`.
pub fn restrict_block(
    m: &OperatorMatrix,
    row_space: Space,
    col_space: Space,
    mesh: &SurfaceMesh,
    partition: Option<&BoundaryPartition>,
) -> Result<OperatorMatrix> {
    if row_space.full() != m.rows || col_space.full() != m.cols {
        return Err(BemError::Dimension(format!(
            "cannot restrict {} ({:?} x {:?}) to {row_space:?} x {col_space:?}",
            m.kind.name(),
            m.rows,
            m.cols
        )));
    }
    let r = row_space.dofs(mesh, partition)?;
    let c = col_space.dofs(mesh, partition)?;
    if r.is_empty() || c.is_empty() {
        return Err(BemError::Partition(format!(
            "empty block: {row_space:?} has {} dofs, {col_space:?} has {}",
            r.len(),
            c.len()
        )));
    }
    Ok(OperatorMatrix {
        kind: m.kind,
        rows: row_space,
        cols: col_space,
        wavenumber: m.wavenumber,
        entries: CMatrix::from_fn(r.len(), c.len(), |i, j| m.entries[(r[i], c[j])]),
    })
}
