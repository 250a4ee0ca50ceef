//! Discrete trace spaces and coefficient vectors.

use std::borrow::Cow;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::{BoundaryPartition, Part, SurfaceMesh};

pub type CVector = DVector<Complex64>;

/// Lowest-order boundary element spaces.
///
/// `P0*` spaces have one dof per triangle, `P1*` spaces one per vertex.
/// `P1Interior(part)` keeps only vertices whose full star lies in `part`, so
/// its zero extension is continuous on the whole boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Space {
    P0,
    P1,
    P0On(Part),
    P1Closure(Part),
    P1Interior(Part),
}

impl Space {
    pub fn is_p0(self) -> bool {
        matches!(self, Space::P0 | Space::P0On(_))
    }

    /// The whole-boundary space this one embeds into.
    pub fn full(self) -> Space {
        if self.is_p0() {
            Space::P0
        } else {
            Space::P1
        }
    }

    pub fn is_full(self) -> bool {
        matches!(self, Space::P0 | Space::P1)
    }

    /// Global dof indices (triangle or vertex numbers), increasing.
    pub fn dofs<'a>(self, mesh: &SurfaceMesh, partition: Option<&'a BoundaryPartition>) -> Result<Cow<'a, [usize]>> {
        let need =
            || partition.ok_or_else(|| BemError::InvalidInput(format!("space {self:?} needs a boundary partition")));
        Ok(match self {
            Space::P0 => Cow::Owned((0..mesh.num_triangles()).collect()),
            Space::P1 => Cow::Owned((0..mesh.num_vertices()).collect()),
            Space::P0On(p) => Cow::Borrowed(need()?.triangles(p)),
            Space::P1Closure(p) => Cow::Borrowed(need()?.closure_vertices(p)),
            Space::P1Interior(p) => Cow::Borrowed(need()?.interior_vertices(p)),
        })
    }

    pub fn dim(self, mesh: &SurfaceMesh, partition: Option<&BoundaryPartition>) -> Result<usize> {
        Ok(self.dofs(mesh, partition)?.len())
    }
}

/// Coefficients of a boundary density in a [`Space`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityVector {
    space: Space,
    coefficients: CVector,
}

impl DensityVector {
    pub fn new(
        space: Space,
        coefficients: CVector,
        mesh: &SurfaceMesh,
        partition: Option<&BoundaryPartition>,
    ) -> Result<Self> {
        let n = space.dim(mesh, partition)?;
        if coefficients.len() != n {
            return Err(BemError::Dimension(format!(
                "{space:?} has {n} dofs, got {} coefficients",
                coefficients.len()
            )));
        }
        Ok(Self { space, coefficients })
    }

    pub fn zeros(space: Space, mesh: &SurfaceMesh, partition: Option<&BoundaryPartition>) -> Result<Self> {
        let n = space.dim(mesh, partition)?;
        Ok(Self {
            space,
            coefficients: CVector::zeros(n),
        })
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coefficients(&self) -> &CVector {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> CVector {
        self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scaled(&self, a: Complex64) -> Self {
        Self {
            space: self.space,
            coefficients: &self.coefficients * a,
        }
    }
}

/// Copy the coefficients onto the whole-boundary space, zero elsewhere.
pub fn zero_extend(
    d: &DensityVector,
    mesh: &SurfaceMesh,
    partition: Option<&BoundaryPartition>,
) -> Result<DensityVector> {
    let full = d.space.full();
    let dofs = d.space.dofs(mesh, partition)?;
    let mut out = CVector::zeros(full.dim(mesh, partition)?);
    for (k, &g) in dofs.iter().enumerate() {
        out[g] = d.coefficients[k];
    }
    Ok(DensityVector {
        space: full,
        coefficients: out,
    })
}

/// Pick the coefficients of `target` out of a whole-boundary vector.
pub fn restrict(
    d: &DensityVector,
    target: Space,
    mesh: &SurfaceMesh,
    partition: Option<&BoundaryPartition>,
) -> Result<DensityVector> {
    if d.space != target.full() {
        return Err(BemError::Dimension(format!(
            "cannot restrict {:?} to {target:?}",
            d.space
        )));
    }
    let dofs = target.dofs(mesh, partition)?;
    let coefficients = CVector::from_iterator(dofs.len(), dofs.iter().map(|&g| d.coefficients[g]));
    Ok(DensityVector {
        space: target,
        coefficients,
    })
}
