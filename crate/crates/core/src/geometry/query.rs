use super::{Point3, SurfaceMesh};

/// Generalized winding number of the surface around `x` (1 inside, 0 outside).
pub fn winding_number(mesh: &SurfaceMesh, x: &Point3) -> f64 {
    let mut total = 0.0;
    for t in 0..mesh.num_triangles() {
        let [a, b, c] = mesh.triangle_points(t);
        total += solid_angle(&(a - x), &(b - x), &(c - x));
    }
    total / (4.0 * std::f64::consts::PI)
}

pub fn is_inside(mesh: &SurfaceMesh, x: &Point3) -> bool {
    winding_number(mesh, x) > 0.5
}

// Van Oosterom-Strackee signed solid angle of a triangle seen from the origin.
fn solid_angle(a: &Point3, b: &Point3, c: &Point3) -> f64 {
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    let num = a.dot(&b.cross(c));
    let den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    2.0 * num.atan2(den)
}

/// Euclidean distance from `x` to the closest point of the surface.
pub fn distance_to_mesh(mesh: &SurfaceMesh, x: &Point3) -> f64 {
    (0..mesh.num_triangles())
        .map(|t| {
            let [a, b, c] = mesh.triangle_points(t);
            (closest_point_on_triangle(x, &a, &b, &c) - x).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

// Ericson, Real-Time Collision Detection, 5.1.5.
fn closest_point_on_triangle(p: &Point3, a: &Point3, b: &Point3, c: &Point3) -> Point3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return a + ab * (d1 / (d1 - d3));
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return a + ac * (d2 / (d2 - d6));
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
    }
    let denom = 1.0 / (va + vb + vc);
    a + ab * (vb * denom) + ac * (vc * denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::unit_sphere_mesh;

    #[test]
    fn winding_inside_outside() {
        let m = unit_sphere_mesh(1).unwrap();
        assert!((winding_number(&m, &Point3::zeros()) - 1.0).abs() < 1e-12);
        assert!(winding_number(&m, &Point3::new(0.0, 0.0, 3.0)).abs() < 1e-12);
        assert!(is_inside(&m, &Point3::new(0.3, 0.2, -0.1)));
    }

    #[test]
    fn distance_from_center_is_inradius() {
        let m = unit_sphere_mesh(2).unwrap();
        let d = distance_to_mesh(&m, &Point3::zeros());
        let inradius = m
            .centroids()
            .iter()
            .zip(m.normals())
            .map(|(c, n)| c.dot(n))
            .fold(f64::INFINITY, f64::min);
        assert!((d - inradius).abs() < 1e-12);
        let far = distance_to_mesh(&m, &Point3::new(0.0, 0.0, 3.0));
        assert!((2.0 - 1e-12..2.05).contains(&far), "far {far}");
    }
}
