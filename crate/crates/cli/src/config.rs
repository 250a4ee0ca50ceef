//! Run configuration: one JSON file per run. See `docs/config.md`.

use std::path::{Path, PathBuf};

use mixbem::geometry::{
    load_mesh, unit_sphere_mesh, BoundaryPartition, MeshFormat, PartitionRule, Point3, SurfaceMesh,
};
use mixbem::kernels::WaveNumber;
use mixbem::measure::{Atom, MeasureData, W1Q_LIMIT};
use mixbem::operators::{AssemblyConfig, DEFAULT_DOF_CAP};
use mixbem::quadrature::QuadratureConfig;
use mixbem::solver::Side;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSpec {
    /// Icosphere inscribed in the unit sphere.
    Sphere {
        level: u32,
    },
    File {
        path: PathBuf,
        format: MeshFormat,
    },
}

impl Default for MeshSpec {
    fn default() -> Self {
        MeshSpec::Sphere { level: 2 }
    }
}

/// Boundary data. Exactly one kind per config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    /// Traces of a unit point source at `source`, which must lie on the
    /// other side of Γ.
    Manufactured { source: [f64; 3] },
    /// Coefficient files: `dirichlet` holds f₁ on the vertices of closed Γ₁,
    /// `neumann` holds f₂ on the triangles of Γ₂, both in increasing global
    /// index order, one `re [im]` per line.
    Files { dirichlet: PathBuf, neumann: PathBuf },
    #[default]
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub atoms: Vec<Atom>,
    pub eps: Vec<f64>,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_grid_spacing")]
    pub grid_spacing: f64,
}

fn default_q() -> f64 {
    1.2
}

fn default_grid_spacing() -> f64 {
    0.1
}

fn default_partition() -> PartitionRule {
    PartitionRule::HalfSpace {
        point: [0.0; 3],
        normal: [0.0, 0.0, 1.0],
    }
}

fn default_side() -> Side {
    Side::Interior
}

fn default_radii() -> Vec<f64> {
    vec![3.0, 6.0, 12.0]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("mixbem-out")
}

fn default_dof_cap() -> usize {
    DEFAULT_DOF_CAP
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mesh: MeshSpec,
    #[serde(default = "default_partition")]
    pub partition: PartitionRule,
    /// `[re, im]`, `im ≥ 0`.
    #[serde(default)]
    pub wavenumber: [f64; 2],
    #[serde(default = "default_side")]
    pub side: Side,
    #[serde(default)]
    pub data: DataSpec,
    /// Point sources in the domain (interior problems only).
    #[serde(default)]
    pub volume: Vec<Atom>,
    #[serde(default)]
    pub measure: Option<MeasureSpec>,
    #[serde(default)]
    pub probes: Vec<[f64; 3]>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default = "default_dof_cap")]
    pub dof_cap: usize,
    /// Seed for the random densities of the jump suite.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let MeshSpec::File { path, .. } = &mut self.mesh {
            fix(path);
        }
        if let PartitionRule::LabelsFile { path } = &mut self.partition {
            let mut p = PathBuf::from(&*path);
            fix(&mut p);
            *path = p.to_string_lossy().into_owned();
        }
        if let DataSpec::Files { dirichlet, neumann } = &mut self.data {
            fix(dirichlet);
            fix(neumann);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> CliResult<()> {
        let [re, im] = self.wavenumber;
        if !re.is_finite() || !im.is_finite() {
            return Err(CliError::config("wavenumber must be finite"));
        }
        if im < 0.0 {
            return Err(CliError::config(format!("wavenumber must have Im ≥ 0, got {im}")));
        }
        if !self.probes.iter().all(|p| finite(p)) {
            return Err(CliError::config("probes must be finite"));
        }
        if !self.radii.iter().all(|r| r.is_finite() && *r > 0.0) {
            return Err(CliError::config("radii must be positive"));
        }
        if self.dof_cap == 0 {
            return Err(CliError::config("dof_cap must be positive"));
        }
        if !self.volume.is_empty() && self.side == Side::Exterior {
            return Err(CliError::config(
                "volume sources are only supported for interior problems",
            ));
        }
        if !self.volume.is_empty() && matches!(self.data, DataSpec::Manufactured { .. }) {
            return Err(CliError::config(
                "manufactured data cannot be combined with volume sources",
            ));
        }
        if let DataSpec::Manufactured { source } = &self.data {
            if !finite(source) {
                return Err(CliError::config("manufactured source must be finite"));
            }
        }
        for a in self.volume.iter().chain(self.measure.iter().flat_map(|m| &m.atoms)) {
            if !finite(&a.location) || !a.weight.is_finite() {
                return Err(CliError::config("atoms must be finite"));
            }
        }
        if let Some(m) = &self.measure {
            if !m.eps.iter().all(|e| e.is_finite() && *e > 0.0) {
                return Err(CliError::config("measure eps values must be positive"));
            }
            if !(1.0..W1Q_LIMIT).contains(&m.q) {
                return Err(CliError::config(format!(
                    "measure q must lie in [1, {W1Q_LIMIT}), got {}",
                    m.q
                )));
            }
            if !(m.grid_spacing.is_finite() && m.grid_spacing > 0.0) {
                return Err(CliError::config("measure grid_spacing must be positive"));
            }
        }
        self.quadrature.validate()?;
        Ok(())
    }

    pub fn wavenumber(&self) -> CliResult<WaveNumber> {
        Ok(WaveNumber::from_parts(self.wavenumber[0], self.wavenumber[1])?)
    }

    pub fn assembly(&self) -> AssemblyConfig {
        AssemblyConfig {
            quadrature: self.quadrature,
            dof_cap: self.dof_cap,
        }
    }

    pub fn load_mesh(&self) -> CliResult<SurfaceMesh> {
        let mesh = match &self.mesh {
            MeshSpec::Sphere { level } => unit_sphere_mesh(*level)?,
            MeshSpec::File { path, format } => {
                load_mesh(path, *format).map_err(|e| CliError::config(format!("mesh {}: {e}", path.display())))?
            }
        };
        let dofs = mesh.num_triangles().max(mesh.num_vertices());
        if dofs > self.dof_cap {
            return Err(mixbem::BemError::DofCapExceeded {
                dofs,
                cap: self.dof_cap,
            }
            .into());
        }
        Ok(mesh)
    }

    pub fn partition(&self, mesh: &SurfaceMesh) -> CliResult<BoundaryPartition> {
        let p = BoundaryPartition::from_rule(mesh, &self.partition)?;
        p.require_mixed()?;
        Ok(p)
    }

    pub fn probe_points(&self) -> Vec<Point3> {
        self.probes.iter().map(|p| Point3::from(*p)).collect()
    }

    pub fn volume_measure(&self) -> MeasureData {
        MeasureData {
            atoms: self.volume.clone(),
            smooth_part: vec![],
        }
    }
}
