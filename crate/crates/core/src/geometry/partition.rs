//! Triangle-level split of the boundary into a Dirichlet part (Γ₁) and a
//! Neumann part (Γ₂).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Point3, SurfaceMesh};
use crate::error::{BemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    /// Γ₁, carries Dirichlet data.
    Dirichlet,
    /// Γ₂, carries Neumann data.
    Neumann,
}

impl Part {
    pub fn label(self) -> u8 {
        match self {
            Part::Dirichlet => 1,
            Part::Neumann => 2,
        }
    }

    pub fn other(self) -> Part {
        match self {
            Part::Dirichlet => Part::Neumann,
            Part::Neumann => Part::Dirichlet,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionRule {
    /// One label (1 or 2) per line, line i labels triangle i.
    LabelsFile { path: String },
    /// Centroids with `(c - point)·normal > 0` go to Γ₁, the rest to Γ₂.
    HalfSpace { point: [f64; 3], normal: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionWarning {
    EmptyDirichlet,
    EmptyNeumann,
}

#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    labels: Vec<Part>,
    dirichlet_triangles: Vec<usize>,
    neumann_triangles: Vec<usize>,
    /// Vertices of Γ₁ triangles (closure of Γ₁, includes the interface).
    dirichlet_vertices: Vec<usize>,
    /// Vertices whose whole triangle star lies in Γ₂.
    neumann_interior_vertices: Vec<usize>,
    /// Vertices of Γ₂ triangles.
    neumann_vertices: Vec<usize>,
    /// Whole-star vertices of Γ₁.
    dirichlet_interior_vertices: Vec<usize>,
}

impl BoundaryPartition {
    pub fn from_labels(mesh: &SurfaceMesh, labels: Vec<Part>) -> Result<Self> {
        if labels.len() != mesh.num_triangles() {
            return Err(BemError::Partition(format!(
                "label count {} does not match triangle count {}",
                labels.len(),
                mesh.num_triangles()
            )));
        }
        let pick = |p: Part| -> Vec<usize> { (0..labels.len()).filter(|&t| labels[t] == p).collect() };
        let dirichlet_triangles = pick(Part::Dirichlet);
        let neumann_triangles = pick(Part::Neumann);

        let mut touches = vec![[false; 2]; mesh.num_vertices()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let k = (labels[t] == Part::Neumann) as usize;
            for &v in tri {
                touches[v][k] = true;
            }
        }
        let verts =
            |f: &dyn Fn(&[bool; 2]) -> bool| -> Vec<usize> { (0..touches.len()).filter(|&v| f(&touches[v])).collect() };
        Ok(Self {
            dirichlet_vertices: verts(&|t| t[0]),
            neumann_interior_vertices: verts(&|t| t[1] && !t[0]),
            neumann_vertices: verts(&|t| t[1]),
            dirichlet_interior_vertices: verts(&|t| t[0] && !t[1]),
            labels,
            dirichlet_triangles,
            neumann_triangles,
        })
    }

    pub fn from_label_values(mesh: &SurfaceMesh, values: &[u8]) -> Result<Self> {
        let labels = values
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                1 => Ok(Part::Dirichlet),
                2 => Ok(Part::Neumann),
                other => Err(BemError::Partition(format!(
                    "label {other} for triangle {i} is not 1 or 2"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_labels(mesh, labels)
    }

    pub fn half_space(mesh: &SurfaceMesh, point: Point3, normal: Point3) -> Result<Self> {
        if !(normal.norm() > 0.0) || !point.iter().all(|c| c.is_finite()) {
            return Err(BemError::Partition(
                "half-space rule needs a finite point and nonzero normal".into(),
            ));
        }
        let offset = point.dot(&normal);
        let labels = mesh
            .centroids()
            .iter()
            .map(|c| {
                if c.dot(&normal) > offset {
                    Part::Dirichlet
                } else {
                    Part::Neumann
                }
            })
            .collect();
        Self::from_labels(mesh, labels)
    }

    pub fn read_labels_file(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let values = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<u8>().map_err(|_| BemError::Parse {
                    line: i + 1,
                    message: format!("invalid label '{}'", l.trim()),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_label_values(mesh, &values)
    }

    pub fn from_rule(mesh: &SurfaceMesh, rule: &PartitionRule) -> Result<Self> {
        match rule {
            PartitionRule::LabelsFile { path } => Self::read_labels_file(mesh, path),
            PartitionRule::HalfSpace { point, normal } => Self::half_space(
                mesh,
                Point3::from_column_slice(point),
                Point3::from_column_slice(normal),
            ),
        }
    }

    pub fn labels(&self) -> &[Part] {
        &self.labels
    }

    pub fn label(&self, t: usize) -> Part {
        self.labels[t]
    }

    pub fn triangles(&self, part: Part) -> &[usize] {
        match part {
            Part::Dirichlet => &self.dirichlet_triangles,
            Part::Neumann => &self.neumann_triangles,
        }
    }

    /// Vertices touching at least one triangle of `part`.
    pub fn closure_vertices(&self, part: Part) -> &[usize] {
        match part {
            Part::Dirichlet => &self.dirichlet_vertices,
            Part::Neumann => &self.neumann_vertices,
        }
    }

    /// Vertices whose entire star belongs to `part`.
    pub fn interior_vertices(&self, part: Part) -> &[usize] {
        match part {
            Part::Dirichlet => &self.dirichlet_interior_vertices,
            Part::Neumann => &self.neumann_interior_vertices,
        }
    }

    pub fn warnings(&self) -> Vec<PartitionWarning> {
        let mut w = Vec::new();
        if self.dirichlet_triangles.is_empty() {
            w.push(PartitionWarning::EmptyDirichlet);
        }
        if self.neumann_triangles.is_empty() {
            w.push(PartitionWarning::EmptyNeumann);
        }
        w
    }

    /// Hard check used by the mixed solver.
    pub fn require_mixed(&self) -> Result<()> {
        match self.warnings().first() {
            None => Ok(()),
            Some(PartitionWarning::EmptyDirichlet) => Err(BemError::Partition("Γ₁ (Dirichlet part) is empty".into())),
            Some(PartitionWarning::EmptyNeumann) => Err(BemError::Partition("Γ₂ (Neumann part) is empty".into())),
        }
    }
}
