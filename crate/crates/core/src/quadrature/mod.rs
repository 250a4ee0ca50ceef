//! Triangle rules, panel-pair classification, and rule selection.

mod singular;
mod triangle;

pub use singular::{singular_pair_rule, PairClass, PairNode, PanelPairRule, SINGULAR_Q_RANGE};
pub use triangle::{gauss_legendre, gauss_triangle, TriangleRule, MAX_TRIANGLE_ORDER};

use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::SurfaceMesh;

/// Quadrature orders used during assembly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Triangle rule order for well-separated panel pairs.
    pub far_order: u32,
    /// Triangle rule order for nearby (but not touching) panel pairs.
    pub near_order: u32,
    /// Gauss points per direction in the regularized rules.
    pub singular_q: usize,
    /// A pair is "near" when the centroid distance is below this multiple of
    /// the larger panel diameter.
    pub near_factor: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            far_order: 5,
            near_order: 6,
            singular_q: 4,
            near_factor: 2.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        for o in [self.far_order, self.near_order] {
            if !(1..=MAX_TRIANGLE_ORDER).contains(&o) {
                return Err(BemError::InvalidInput(format!("triangle order {o} unsupported")));
            }
        }
        if !SINGULAR_Q_RANGE.contains(&self.singular_q) {
            return Err(BemError::InvalidInput(format!(
                "singular order {} unsupported",
                self.singular_q
            )));
        }
        if !(self.near_factor >= 0.0) {
            return Err(BemError::InvalidInput("near_factor must be non-negative".into()));
        }
        Ok(())
    }
}

pub fn classify_pair(mesh: &SurfaceMesh, t1: usize, t2: usize) -> PairClass {
    if t1 == t2 {
        return PairClass::Identical;
    }
    let a = mesh.triangles()[t1];
    let b = mesh.triangles()[t2];
    match a.iter().filter(|v| b.contains(v)).count() {
        0 => PairClass::Disjoint,
        1 => PairClass::SharedVertex,
        2 => PairClass::SharedEdge,
        // two distinct triangles on one vertex triple cannot occur on a valid mesh
        _ => PairClass::Identical,
    }
}

/// Local vertex order placing shared vertices first, as the regularized
/// rules expect. `x[k]` is the local index (0..3) of the test panel vertex
/// playing reference vertex `k`; likewise `y` for the trial panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairAlignment {
    pub class: PairClass,
    pub x: [usize; 3],
    pub y: [usize; 3],
}

pub fn align_pair(mesh: &SurfaceMesh, t1: usize, t2: usize) -> PairAlignment {
    let class = classify_pair(mesh, t1, t2);
    let a = mesh.triangles()[t1];
    let b = mesh.triangles()[t2];
    let pos = |tri: &[usize; 3], v: usize| tri.iter().position(|&w| w == v).unwrap();
    match class {
        PairClass::Identical | PairClass::Disjoint => PairAlignment {
            class,
            x: [0, 1, 2],
            y: [0, 1, 2],
        },
        PairClass::SharedVertex => {
            let i = (0..3).find(|&i| b.contains(&a[i])).unwrap();
            let j = pos(&b, a[i]);
            PairAlignment {
                class,
                x: [i, (i + 1) % 3, (i + 2) % 3],
                y: [j, (j + 1) % 3, (j + 2) % 3],
            }
        }
        PairClass::SharedEdge => {
            let shared: Vec<usize> = (0..3).filter(|&i| b.contains(&a[i])).collect();
            let (i0, i1) = (shared[0], shared[1]);
            let ix = 3 - i0 - i1;
            let (j0, j1) = (pos(&b, a[i0]), pos(&b, a[i1]));
            PairAlignment {
                class,
                x: [i0, i1, ix],
                y: [j0, j1, 3 - j0 - j1],
            }
        }
    }
}

/// Which rule a panel pair is integrated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleChoice {
    Far,
    Near,
    Singular(PairAlignment),
}

/// Precomputed rules for one [`QuadratureConfig`].
#[derive(Debug, Clone)]
pub struct PairRules {
    pub config: QuadratureConfig,
    pub far: TriangleRule,
    pub near: TriangleRule,
    identical: PanelPairRule,
    edge: PanelPairRule,
    vertex: PanelPairRule,
}

impl PairRules {
    pub fn new(config: QuadratureConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            far: gauss_triangle(config.far_order)?,
            near: gauss_triangle(config.near_order)?,
            identical: singular_pair_rule(PairClass::Identical, config.singular_q)?,
            edge: singular_pair_rule(PairClass::SharedEdge, config.singular_q)?,
            vertex: singular_pair_rule(PairClass::SharedVertex, config.singular_q)?,
        })
    }

    pub fn singular(&self, class: PairClass) -> &PanelPairRule {
        match class {
            PairClass::Identical => &self.identical,
            PairClass::SharedEdge => &self.edge,
            PairClass::SharedVertex => &self.vertex,
            PairClass::Disjoint => unreachable!("disjoint pairs have no singular rule"),
        }
    }

    pub fn select(&self, mesh: &SurfaceMesh, t1: usize, t2: usize) -> RuleChoice {
        let alignment = align_pair(mesh, t1, t2);
        if alignment.class != PairClass::Disjoint {
            return RuleChoice::Singular(alignment);
        }
        let dist = (mesh.centroid(t1) - mesh.centroid(t2)).norm();
        let diam = mesh.diameter(t1).max(mesh.diameter(t2));
        if dist < self.config.near_factor * diam {
            RuleChoice::Near
        } else {
            RuleChoice::Far
        }
    }

    /// Tensor rule for a disjoint pair as a [`PanelPairRule`].
    pub fn tensor(&self, near: bool) -> PanelPairRule {
        let r = if near { &self.near } else { &self.far };
        let mut nodes = Vec::with_capacity(r.len() * r.len());
        for (px, wx) in r.points.iter().zip(&r.weights) {
            for (py, wy) in r.points.iter().zip(&r.weights) {
                nodes.push(PairNode {
                    x: *px,
                    y: *py,
                    weight: wx * wy,
                });
            }
        }
        PanelPairRule {
            class: PairClass::Disjoint,
            q: r.order as usize,
            nodes,
        }
    }
}

/// Undo an alignment: reorder reference-vertex barycentrics into the panel's
/// own local vertex order.
#[inline]
pub fn unalign(b: &[f64; 3], perm: &[usize; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        out[perm[k]] = b[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_mesh;

    #[test]
    fn classification_on_icosahedron() {
        let m = unit_sphere_mesh(0).unwrap();
        assert_eq!(classify_pair(&m, 5, 5), PairClass::Identical);
        // faces 0 = [0,11,5] and 1 = [0,5,1] share edge 0-5
        assert_eq!(classify_pair(&m, 0, 1), PairClass::SharedEdge);
        // faces 0 and 2 = [0,1,7] share only vertex 0
        assert_eq!(classify_pair(&m, 0, 2), PairClass::SharedVertex);
        // antipodal faces
        let c0 = m.centroid(0);
        let far = (0..20)
            .min_by(|&a, &b| m.centroid(a).dot(&c0).partial_cmp(&m.centroid(b).dot(&c0)).unwrap())
            .unwrap();
        assert_eq!(classify_pair(&m, 0, far), PairClass::Disjoint);
    }

    #[test]
    fn alignment_puts_shared_vertices_first() {
        let m = unit_sphere_mesh(1).unwrap();
        for t1 in 0..m.num_triangles() {
            for t2 in 0..m.num_triangles() {
                let al = align_pair(&m, t1, t2);
                let a = m.triangles()[t1];
                let b = m.triangles()[t2];
                match al.class {
                    PairClass::SharedEdge => {
                        assert_eq!(a[al.x[0]], b[al.y[0]]);
                        assert_eq!(a[al.x[1]], b[al.y[1]]);
                        assert_ne!(a[al.x[2]], b[al.y[2]]);
                    }
                    PairClass::SharedVertex => assert_eq!(a[al.x[0]], b[al.y[0]]),
                    _ => {}
                }
                let mut sx = al.x;
                sx.sort();
                assert_eq!(sx, [0, 1, 2]);
            }
        }
    }

    #[test]
    fn selection_is_symmetric() {
        let m = unit_sphere_mesh(2).unwrap();
        let rules = PairRules::new(QuadratureConfig::default()).unwrap();
        for i in (0..m.num_triangles()).step_by(7) {
            for j in 0..m.num_triangles() {
                let a = rules.select(&m, i, j);
                let b = rules.select(&m, j, i);
                let kind = |c: RuleChoice| match c {
                    RuleChoice::Far => 0,
                    RuleChoice::Near => 1,
                    RuleChoice::Singular(al) => 2 + al.class as u8,
                };
                assert_eq!(kind(a), kind(b));
            }
        }
    }

    #[test]
    fn constant_kernel_gives_area_product() {
        let m = unit_sphere_mesh(1).unwrap();
        let rules = PairRules::new(QuadratureConfig::default()).unwrap();
        for (i, j) in [(0, 0), (0, 1), (0, 2), (0, 40)] {
            let class = classify_pair(&m, i, j);
            let rule = if class == PairClass::Disjoint {
                rules.tensor(false)
            } else {
                rules.singular(class).clone()
            };
            let s: f64 = rule.nodes.iter().map(|n| n.weight).sum::<f64>() * m.area(i) * m.area(j);
            assert!((s - m.area(i) * m.area(j)).abs() < 1e-10 * s);
        }
    }
}
