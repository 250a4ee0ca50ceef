use crate::error::{BemError, Result};

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pnm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Quadrature on the reference triangle, normalized to unit measure.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// Barycentric coordinates of the nodes.
    pub points: Vec<[f64; 3]>,
    /// Positive weights summing to one.
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub order: u32,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub const MAX_TRIANGLE_ORDER: u32 = 10;

enum Orbit {
    Centroid,
    /// `(a, a, 1 - 2a)` and its 3 permutations.
    S21(f64),
    /// all 6 permutations of `(a, b, 1 - a - b)`.
    S111(f64, f64),
}

fn expand(order: u32, orbits: &[(Orbit, f64)]) -> TriangleRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (orbit, w) in orbits {
        match *orbit {
            Orbit::Centroid => {
                points.push([1.0 / 3.0; 3]);
                weights.push(*w);
            }
            Orbit::S21(a) => {
                let b = 1.0 - 2.0 * a;
                for p in [[a, a, b], [a, b, a], [b, a, a]] {
                    points.push(p);
                    weights.push(*w);
                }
            }
            Orbit::S111(a, b) => {
                let c = 1.0 - a - b;
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    points.push(p);
                    weights.push(*w);
                }
            }
        }
    }
    TriangleRule { points, weights, order }
}

/// Collapsed Gauss product rule averaged over the six vertex permutations,
/// which makes it fully symmetric while keeping positive weights.
fn symmetrized_conical(order: u32) -> TriangleRule {
    let n = (order as usize + 3) / 2;
    let (x, w) = gauss_legendre(n);
    let mut points = Vec::with_capacity(6 * n * n);
    let mut weights = Vec::with_capacity(6 * n * n);
    for i in 0..n {
        for j in 0..n {
            let u = x[i];
            let v = x[j] * (1.0 - u);
            let weight = 2.0 * w[i] * w[j] * (1.0 - u) / 6.0;
            let (a, b, c) = (1.0 - u - v, u, v);
            for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                points.push(p);
                weights.push(weight);
            }
        }
    }
    TriangleRule { points, weights, order }
}

/// Symmetric positive rule exact for polynomials of degree `order` (1..=10).
pub fn gauss_triangle(order: u32) -> Result<TriangleRule> {
    use Orbit::*;
    let rule = match order {
        1 => expand(1, &[(Centroid, 1.0)]),
        2 => expand(2, &[(S21(1.0 / 6.0), 1.0 / 3.0)]),
        // Strang-Fix six point rule
        3 => expand(3, &[(S111(0.659027622374092, 0.231933368553031), 1.0 / 6.0)]),
        // Dunavant
        4 => expand(
            4,
            &[
                (S21(0.445948490915965), 0.223381589678011),
                (S21(0.091576213509771), 0.109951743655322),
            ],
        ),
        5 => expand(
            5,
            &[
                (Centroid, 0.225),
                (S21(0.470142064105115), 0.132394152788506),
                (S21(0.101286507323456), 0.125939180544827),
            ],
        ),
        6 => expand(
            6,
            &[
                (S21(0.249286745170910), 0.116786275726379),
                (S21(0.063089014491502), 0.050844906370207),
                (S111(0.053145049844817, 0.310352451033784), 0.082851075618374),
            ],
        ),
        8 => expand(
            8,
            &[
                (Centroid, 0.144315607677787),
                (S21(0.459292588292723), 0.095091634267285),
                (S21(0.170569307751760), 0.103217370534718),
                (S21(0.050547228317031), 0.032458497623198),
                (S111(0.008394777409958, 0.263112829634638), 0.027230314174435),
            ],
        ),
        7 | 9 | 10 => symmetrized_conical(order),
        _ => {
            return Err(BemError::InvalidInput(format!(
                "unsupported triangle quadrature order {order} (1..={MAX_TRIANGLE_ORDER})"
            )))
        }
    };
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // ∫ λ₁^i λ₂^j over the reference triangle, normalized to unit area
    fn moment(i: u32, j: u32) -> f64 {
        2.0 * factorial(i) * factorial(j) / factorial(i + j + 2)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..=10 {
            let (x, w) = gauss_legendre(n);
            for d in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                assert!((s - 1.0 / (d as f64 + 1.0)).abs() < 1e-14, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn every_order_is_exact_and_positive() {
        for order in 1..=MAX_TRIANGLE_ORDER {
            let rule = gauss_triangle(order).unwrap();
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "order {order}: {total}");
            for i in 0..=order {
                for j in 0..=(order - i) {
                    let s: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[1].powi(i as i32) * p[2].powi(j as i32))
                        .sum();
                    assert!((s - moment(i, j)).abs() < 1e-13, "order {order} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn low_orders_have_expected_shape() {
        let r1 = gauss_triangle(1).unwrap();
        assert_eq!(r1.len(), 1);
        assert_eq!(r1.weights[0], 1.0);
        let r2 = gauss_triangle(2).unwrap();
        assert_eq!(r2.len(), 3);
        assert!(r2.weights.iter().all(|&w| (w - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn unsupported_orders() {
        assert!(gauss_triangle(0).is_err());
        assert!(gauss_triangle(11).is_err());
    }
}
