//! Closed, outward-oriented triangle meshes of the boundary surface.
//!
//! A [`SurfaceMesh`] is immutable after construction and always satisfies the
//! watertightness, orientation, and non-degeneracy invariants checked by
//! [`SurfaceMesh::new`].

mod io;
mod partition;
mod query;

use std::collections::HashMap;

pub use io::{load_mesh, parse_gmsh22, parse_off, write_off, MeshFormat};
pub use partition::{BoundaryPartition, Part, PartitionRule, PartitionWarning};

use crate::error::{BemError, Result};

pub type Point3 = nalgebra::Vector3<f64>;

/// Maximum subdivision level accepted by [`unit_sphere_mesh`].
pub const MAX_SPHERE_LEVEL: u32 = 5;

#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    vertices: Vec<Point3>,
    triangles: Vec<[usize; 3]>,
    normals: Vec<Point3>,
    areas: Vec<f64>,
    centroids: Vec<Point3>,
    diameters: Vec<f64>,
    volume: f64,
    /// Triangles incident to each vertex, in increasing order.
    vertex_star: Vec<Vec<usize>>,
}

impl SurfaceMesh {
    /// Builds a mesh and validates it.
    ///
    /// Orientation is taken from the vertex order of each triangle; nothing is
    /// re-oriented.
    pub fn new(vertices: Vec<Point3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if triangles.is_empty() {
            return Err(BemError::InvalidInput("mesh has no triangles".into()));
        }
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= vertices.len() {
                    return Err(BemError::VertexIndex { triangle: t, index: v });
                }
            }
        }

        let (lo, hi) = bounding_box(&vertices);
        let diag2 = (hi - lo).norm_squared();
        let area_floor = 1e-12 * diag2;

        let mut normals = Vec::with_capacity(triangles.len());
        let mut areas = Vec::with_capacity(triangles.len());
        let mut centroids = Vec::with_capacity(triangles.len());
        let mut diameters = Vec::with_capacity(triangles.len());
        for (t, &[a, b, c]) in triangles.iter().enumerate() {
            let (pa, pb, pc) = (vertices[a], vertices[b], vertices[c]);
            let cross = (pb - pa).cross(&(pc - pa));
            let area = 0.5 * cross.norm();
            if !(area > area_floor) {
                return Err(BemError::DegenerateTriangle { triangle: t, area });
            }
            normals.push(cross / (2.0 * area));
            areas.push(area);
            centroids.push((pa + pb + pc) / 3.0);
            diameters.push((pb - pa).norm().max((pc - pb).norm()).max((pa - pc).norm()));
        }

        check_closed(&triangles)?;

        let volume: f64 = centroids
            .iter()
            .zip(&normals)
            .zip(&areas)
            .map(|((c, n), a)| c.dot(n) * a / 3.0)
            .sum();
        if !(volume > 0.0) {
            return Err(BemError::InvertedOrientation { volume });
        }

        let mut vertex_star = vec![Vec::new(); vertices.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_star[v].push(t);
            }
        }

        Ok(Self {
            vertices,
            triangles,
            normals,
            areas,
            centroids,
            diameters,
            volume,
            vertex_star,
        })
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn normal(&self, t: usize) -> Point3 {
        self.normals[t]
    }

    pub fn normals(&self) -> &[Point3] {
        &self.normals
    }

    pub fn area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn centroid(&self, t: usize) -> Point3 {
        self.centroids[t]
    }

    pub fn centroids(&self) -> &[Point3] {
        &self.centroids
    }

    /// Longest edge of triangle `t`.
    pub fn diameter(&self, t: usize) -> f64 {
        self.diameters[t]
    }

    /// Longest edge over the whole mesh.
    pub fn max_diameter(&self) -> f64 {
        self.diameters.iter().cloned().fold(0.0, f64::max)
    }

    /// Triangles incident to vertex `v`.
    pub fn vertex_star(&self, v: usize) -> &[usize] {
        &self.vertex_star[v]
    }

    /// Divergence-theorem volume enclosed by the surface.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn surface_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn triangle_points(&self, t: usize) -> [Point3; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn bounding_box(&self) -> (Point3, Point3) {
        bounding_box(&self.vertices)
    }

    /// Largest distance from the origin to a vertex.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn bounding_box(points: &[Point3]) -> (Point3, Point3) {
    let mut lo = Point3::repeat(f64::INFINITY);
    let mut hi = Point3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

/// Every undirected edge must be used exactly twice, once in each direction.
fn check_closed(triangles: &[[usize; 3]]) -> Result<()> {
    // (min, max) -> list of (triangle, traversed min->max)
    let mut edges: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            edges.entry(key).or_default().push((t, a < b));
        }
    }
    let mut keys: Vec<_> = edges.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let uses = &edges[&key];
        if uses.len() != 2 {
            return Err(BemError::OpenSurface {
                a: key.0,
                b: key.1,
                count: uses.len(),
                triangle: uses[0].0,
            });
        }
        if uses[0].1 == uses[1].1 {
            return Err(BemError::InconsistentOrientation {
                a: key.0,
                b: key.1,
                first: uses[0].0,
                second: uses[1].0,
            });
        }
    }
    Ok(())
}

/// Splits every triangle into four through its edge midpoints.
///
/// With `project_to_unit_sphere`, every vertex of the result is normalized
/// onto the unit sphere.
pub fn refine(mesh: &SurfaceMesh, project_to_unit_sphere: bool) -> Result<SurfaceMesh> {
    let mut vertices = mesh.vertices.clone();
    let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triangles = Vec::with_capacity(4 * mesh.num_triangles());
    let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point3>| -> usize {
        let key = (a.min(b), a.max(b));
        *midpoints.entry(key).or_insert_with(|| {
            vertices.push(0.5 * (vertices[a] + vertices[b]));
            vertices.len() - 1
        })
    };
    for &[a, b, c] in &mesh.triangles {
        let ab = midpoint(a, b, &mut vertices);
        let bc = midpoint(b, c, &mut vertices);
        let ca = midpoint(c, a, &mut vertices);
        triangles.push([a, ab, ca]);
        triangles.push([b, bc, ab]);
        triangles.push([c, ca, bc]);
        triangles.push([ab, bc, ca]);
    }
    if project_to_unit_sphere {
        for v in &mut vertices {
            *v /= v.norm();
        }
    }
    SurfaceMesh::new(vertices, triangles)
}

/// Icosahedron inscribed in the unit sphere, refined `level` times with
/// projection.
pub fn unit_sphere_mesh(level: u32) -> Result<SurfaceMesh> {
    if level > MAX_SPHERE_LEVEL {
        return Err(BemError::InvalidInput(format!(
            "sphere level {level} exceeds maximum {MAX_SPHERE_LEVEL}"
        )));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let vertices = raw.iter().map(|p| Point3::new(p[0], p[1], p[2]).normalize()).collect();
    let triangles = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let mut mesh = SurfaceMesh::new(vertices, triangles)?;
    for _ in 0..level {
        mesh = refine(&mesh, true)?;
    }
    Ok(mesh)
}

pub use query::{distance_to_mesh, is_inside, winding_number};
