use std::f64::consts::PI;

use mixbem::geometry::Point3;
use mixbem::quadrature::{gauss_triangle, singular_pair_rule, PairClass, TriangleRule};

type Tri = [Point3; 3];

fn area(t: &Tri) -> f64 {
    0.5 * (t[1] - t[0]).cross(&(t[2] - t[0])).norm()
}

fn at(t: &Tri, b: &[f64; 3]) -> Point3 {
    t[0] * b[0] + t[1] * b[1] + t[2] * b[2]
}

fn kernel(x: &Point3, y: &Point3) -> f64 {
    1.0 / (4.0 * PI * (x - y).norm())
}

/// Regularized rule applied to a pair whose shared vertices come first.
fn regularized(class: PairClass, q: usize, a: &Tri, b: &Tri) -> f64 {
    let rule = singular_pair_rule(class, q).unwrap();
    area(a)
        * area(b)
        * rule
            .nodes
            .iter()
            .map(|n| n.weight * kernel(&at(a, &n.x), &at(b, &n.y)))
            .sum::<f64>()
}

fn split(t: &Tri) -> [Tri; 4] {
    let m01 = (t[0] + t[1]) / 2.0;
    let m12 = (t[1] + t[2]) / 2.0;
    let m02 = (t[0] + t[2]) / 2.0;
    [[t[0], m01, m02], [m01, t[1], m12], [m02, m12, t[2]], [m12, m02, m01]]
}

fn tensor(rule: &TriangleRule, a: &Tri, b: &Tri) -> f64 {
    let mut s = 0.0;
    for (px, wx) in rule.points.iter().zip(&rule.weights) {
        for (py, wy) in rule.points.iter().zip(&rule.weights) {
            s += wx * wy * kernel(&at(a, px), &at(b, py));
        }
    }
    s * area(a) * area(b)
}

fn diameter(t: &Tri) -> f64 {
    (t[0] - t[1]).norm().max((t[1] - t[2]).norm()).max((t[0] - t[2]).norm())
}

/// Brute-force oracle: recursive subdivision until sub-pairs are well
/// separated, plain Gauss rules everywhere.
fn adaptive(rule: &TriangleRule, a: &Tri, b: &Tri, depth: u32) -> f64 {
    let ca = (a[0] + a[1] + a[2]) / 3.0;
    let cb = (b[0] + b[1] + b[2]) / 3.0;
    let sep = (ca - cb).norm() > 2.0 * diameter(a).max(diameter(b));
    if sep || depth == 0 {
        return tensor(rule, a, b);
    }
    let mut s = 0.0;
    for sa in split(a) {
        for sb in split(b) {
            s += adaptive(rule, &sa, &sb, depth - 1);
        }
    }
    s
}

#[test]
fn identical_pair_self_convergence() {
    let t = [Point3::zeros(), Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)];
    let a = regularized(PairClass::Identical, 3, &t, &t);
    let b = regularized(PairClass::Identical, 6, &t, &t);
    let c = regularized(PairClass::Identical, 8, &t, &t);
    // geometric convergence in q: about 1e-3 at q = 3, 4e-6 at q = 6
    assert!((a - c).abs() < 2e-3 * c, "{a} {c}");
    assert!((b - c).abs() < 1e-5 * c, "{b} {c}");
    assert!((b - c).abs() < 0.01 * (a - c).abs());
}

#[test]
fn identical_pair_scales_like_length_cubed() {
    let t = [
        Point3::zeros(),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
    ];
    let t2: Tri = [t[0] * 2.0, t[1] * 2.0, t[2] * 2.0];
    let a = regularized(PairClass::Identical, 6, &t, &t);
    let b = regularized(PairClass::Identical, 6, &t2, &t2);
    assert!((b - 8.0 * a).abs() < 1e-12 * b);
}

#[test]
fn shared_edge_matches_adaptive_oracle() {
    let rule = gauss_triangle(8).unwrap();
    let p0 = Point3::zeros();
    let p1 = Point3::new(1.0, 0.0, 0.0);
    for apex in [Point3::new(0.3, -0.8, 0.4), Point3::new(0.5, -1.0, 0.0)] {
        let a = [p0, p1, Point3::new(0.2, 0.9, 0.0)];
        let b = [p0, p1, apex];
        let reg = regularized(PairClass::SharedEdge, 4, &a, &b);
        let brute = adaptive(&rule, &a, &b, 7);
        assert!((reg - brute).abs() < 1e-3 * brute, "{reg} vs {brute}");
    }
}

#[test]
fn shared_vertex_matches_adaptive_oracle() {
    let rule = gauss_triangle(8).unwrap();
    let p0 = Point3::zeros();
    let a = [p0, Point3::new(1.0, 0.0, 0.0), Point3::new(0.3, 0.9, 0.0)];
    let b = [p0, Point3::new(-0.7, 0.2, 0.3), Point3::new(-0.4, -0.9, -0.2)];
    let reg = regularized(PairClass::SharedVertex, 4, &a, &b);
    let brute = adaptive(&rule, &a, &b, 7);
    assert!((reg - brute).abs() < 1e-3 * brute, "{reg} vs {brute}");
}

#[test]
fn singular_rules_converge_in_q() {
    let p0 = Point3::zeros();
    let p1 = Point3::new(1.0, 0.0, 0.0);
    let a = [p0, p1, Point3::new(0.2, 0.9, 0.0)];
    let b = [p0, p1, Point3::new(0.4, -0.7, 0.5)];
    let reference = regularized(PairClass::SharedEdge, 8, &a, &b);
    let e2 = (regularized(PairClass::SharedEdge, 2, &a, &b) - reference).abs();
    let e4 = (regularized(PairClass::SharedEdge, 4, &a, &b) - reference).abs();
    assert!(e4 < e2);
    assert!(e4 < 1e-5 * reference);
}
