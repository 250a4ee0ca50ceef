//! Regularizing coordinate transforms for touching panel pairs.
//!
//! Both panels are parametrized over the reference triangle
//! `{(s, t) : 0 ≤ t ≤ s ≤ 1}` by `χ(s, t) = P0 + s (P1 - P0) + t (P2 - P1)`,
//! so `(s, t)` has barycentric coordinates `(1 - s, s - t, t)`. Shared
//! vertices are placed first (`P0`, then `P1` for a shared edge). The
//! four-dimensional integral is split into simplices whose Duffy-type
//! Jacobian cancels the `1/r` singularity.

use serde::{Deserialize, Serialize};

use super::triangle::gauss_legendre;
use crate::error::{BemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    Identical,
    SharedEdge,
    SharedVertex,
    Disjoint,
}

impl PairClass {
    /// Number of integration sub-domains of the regularized rule.
    pub fn subdomains(self) -> usize {
        match self {
            PairClass::Identical => 6,
            PairClass::SharedEdge => 5,
            PairClass::SharedVertex => 2,
            PairClass::Disjoint => 1,
        }
    }
}

/// One node of a rule over a pair of reference triangles.
#[derive(Debug, Clone, Copy)]
pub struct PairNode {
    /// Barycentric coordinates on the test (x) panel.
    pub x: [f64; 3],
    /// Barycentric coordinates on the trial (y) panel.
    pub y: [f64; 3],
    pub weight: f64,
}

/// Quadrature over a pair of panels, weights normalized so that they sum to
/// one (the product of the two normalized panel measures).
#[derive(Debug, Clone)]
pub struct PanelPairRule {
    pub class: PairClass,
    pub q: usize,
    pub nodes: Vec<PairNode>,
}

pub const SINGULAR_Q_RANGE: std::ops::RangeInclusive<usize> = 2..=8;

fn bary(s: f64, t: f64) -> [f64; 3] {
    [1.0 - s, s - t, t]
}

type Sub = (f64, (f64, f64), (f64, f64));

fn identical(xi: f64, e1: f64, e2: f64, e3: f64) -> Vec<Sub> {
    let w = xi.powi(3) * e1 * e1 * e2;
    vec![
        (
            w,
            (xi, xi * (1.0 - e1 + e1 * e2)),
            (xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1)),
        ),
        (
            w,
            (xi * (1.0 - e1 * e2 * e3), xi * (1.0 - e1)),
            (xi, xi * (1.0 - e1 + e1 * e2)),
        ),
        (
            w,
            (xi, xi * e1 * (1.0 - e2 + e2 * e3)),
            (xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2)),
        ),
        (
            w,
            (xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2)),
            (xi, xi * e1 * (1.0 - e2 + e2 * e3)),
        ),
        (
            w,
            (xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3)),
            (xi, xi * e1 * (1.0 - e2)),
        ),
        (
            w,
            (xi, xi * e1 * (1.0 - e2)),
            (xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3)),
        ),
    ]
}

fn shared_edge(xi: f64, e1: f64, e2: f64, e3: f64) -> Vec<Sub> {
    let w1 = xi.powi(3) * e1 * e1;
    let w = w1 * e2;
    vec![
        (w1, (xi, xi * e1 * e3), (xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2))),
        (w, (xi, xi * e1), (xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3))),
        (w, (xi * (1.0 - e1 * e2), xi * e1 * (1.0 - e2)), (xi, xi * e1 * e2 * e3)),
        (w, (xi * (1.0 - e1 * e2 * e3), xi * e1 * e2 * (1.0 - e3)), (xi, xi * e1)),
        (
            w,
            (xi * (1.0 - e1 * e2 * e3), xi * e1 * (1.0 - e2 * e3)),
            (xi, xi * e1 * e2),
        ),
    ]
}

fn shared_vertex(xi: f64, e1: f64, e2: f64, e3: f64) -> Vec<Sub> {
    let w = xi.powi(3) * e2;
    vec![
        (w, (xi, xi * e1), (xi * e2, xi * e2 * e3)),
        (w, (xi * e2, xi * e2 * e3), (xi, xi * e1)),
    ]
}

/// Regularized rule for a touching pair with `q` Gauss points per direction.
pub fn singular_pair_rule(class: PairClass, q: usize) -> Result<PanelPairRule> {
    if !SINGULAR_Q_RANGE.contains(&q) {
        return Err(BemError::InvalidInput(format!(
            "singular quadrature order {q} outside {SINGULAR_Q_RANGE:?}"
        )));
    }
    let maps: fn(f64, f64, f64, f64) -> Vec<Sub> = match class {
        PairClass::Identical => identical,
        PairClass::SharedEdge => shared_edge,
        PairClass::SharedVertex => shared_vertex,
        PairClass::Disjoint => return Err(BemError::InvalidInput("disjoint pairs use tensor Gauss rules".into())),
    };
    let (x, w) = gauss_legendre(q);
    let mut nodes = Vec::with_capacity(class.subdomains() * q.pow(4));
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    let base = 4.0 * w[a] * w[b] * w[c] * w[d];
                    for (jac, (xs, xt), (ys, yt)) in maps(x[a], x[b], x[c], x[d]) {
                        nodes.push(PairNode {
                            x: bary(xs, xt),
                            y: bary(ys, yt),
                            weight: base * jac,
                        });
                    }
                }
            }
        }
    }
    Ok(PanelPairRule { class, q, nodes })
}
