//! Dense Galerkin assembly of the four boundary integral operators.
//!
//! One sweep over ordered panel pairs `(i, j)` accumulates, for test panel
//! `T_i` and trial panel `T_j`,
//!
//! - `s    = ∫∫ Φ`
//! - `k_b  = ∫∫ ∂Φ/∂n_y ψ_b(y)`       (P0 test, P1 trial)
//! - `ks_a = ∫∫ ψ_a(x) ∂Φ/∂n_x`       (P1 test, P0 trial)
//! - `p_ab = ∫∫ Φ ψ_a(x) ψ_b(y)`
//!
//! from which the hypersingular entries follow by the surface-curl form
//! `D_ab = -(curl ψ_a · curl ψ_b s - λ² (n_x · n_y) p_ab)`.
//!
//! Rows are computed in parallel, one strip per test panel, and scattered
//! into the matrices serially in panel order, so results do not depend on the
//! number of threads. Touching pairs are always integrated with the
//! lower-numbered panel as the test panel; the mirrored entry is obtained by
//! swapping roles, which keeps S and D exactly symmetric on those pairs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{BemError, Result};
use crate::geometry::{Point3, SurfaceMesh};
use crate::kernels::{sample, WaveNumber};
use crate::quadrature::{align_pair, unalign, PairAlignment, PairRules, RuleChoice, TriangleRule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const BATCH: usize = 128;

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Wanted {
    pub s: bool,
    pub k: bool,
    pub ks: bool,
    pub d: bool,
}

pub(crate) struct Assembled {
    pub s: Option<DMatrix<Complex64>>,
    pub k: Option<DMatrix<Complex64>>,
    pub ks: Option<DMatrix<Complex64>>,
    pub d: Option<DMatrix<Complex64>>,
}

#[derive(Clone, Copy, Default)]
struct PairAcc {
    s: Complex64,
    k: [Complex64; 3],
    ks: [Complex64; 3],
    p: [[Complex64; 3]; 3],
}

impl PairAcc {
    fn swapped(self) -> Self {
        let mut p = [[ZERO; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                p[a][b] = self.p[b][a];
            }
        }
        Self {
            s: self.s,
            k: self.ks,
            ks: self.k,
            p,
        }
    }

    fn scale(&mut self, f: f64) {
        self.s *= f;
        for a in 0..3 {
            self.k[a] *= f;
            self.ks[a] *= f;
            for b in 0..3 {
                self.p[a][b] *= f;
            }
        }
    }
}

/// Physical quadrature points of one panel for a fixed triangle rule.
struct PanelPoints {
    points: Vec<Point3>,
    bary: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl PanelPoints {
    fn new(mesh: &SurfaceMesh, t: usize, rule: &TriangleRule) -> Self {
        let p = mesh.triangle_points(t);
        Self {
            points: rule
                .points
                .iter()
                .map(|b| p[0] * b[0] + p[1] * b[1] + p[2] * b[2])
                .collect(),
            bary: rule.points.clone(),
            weights: rule.weights.clone(),
        }
    }
}

struct Context<'a> {
    mesh: &'a SurfaceMesh,
    rules: &'a PairRules,
    k: Complex64,
    laplace: bool,
    want: Wanted,
    far: Vec<PanelPoints>,
    near: Vec<PanelPoints>,
    /// Surface curls of the three hat functions on each panel.
    curls: Vec<[Point3; 3]>,
}

impl Context<'_> {
    #[inline(always)]
    #[allow(clippy::too_many_arguments)]
    fn add(
        &self,
        acc: &mut PairAcc,
        w: f64,
        x: &Point3,
        y: &Point3,
        bx: &[f64; 3],
        by: &[f64; 3],
        nx: &Point3,
        ny: &Point3,
    ) {
        let d = x - y;
        let r = d.norm();
        let ks = sample(self.k, self.laplace, r);
        let wphi = ks.phi * w;
        acc.s += wphi;
        if self.want.k {
            let t = ks.grad_factor * (-d.dot(ny) * w);
            for b in 0..3 {
                acc.k[b] += t * by[b];
            }
        }
        if self.want.ks {
            let t = ks.grad_factor * (d.dot(nx) * w);
            for a in 0..3 {
                acc.ks[a] += t * bx[a];
            }
        }
        if self.want.d && !self.laplace {
            for a in 0..3 {
                let wa = wphi * bx[a];
                for b in 0..3 {
                    acc.p[a][b] += wa * by[b];
                }
            }
        }
    }

    fn tensor(&self, i: usize, j: usize, pts: &[PanelPoints]) -> PairAcc {
        let (pi, pj) = (&pts[i], &pts[j]);
        let (ni, nj) = (self.mesh.normal(i), self.mesh.normal(j));
        let mut acc = PairAcc::default();
        for (qx, x) in pi.points.iter().enumerate() {
            for (qy, y) in pj.points.iter().enumerate() {
                let w = pi.weights[qx] * pj.weights[qy];
                self.add(&mut acc, w, x, y, &pi.bary[qx], &pj.bary[qy], &ni, &nj);
            }
        }
        acc
    }

    fn singular(&self, i: usize, j: usize, al: &PairAlignment) -> PairAcc {
        let rule = self.rules.singular(al.class);
        let pi = self.mesh.triangle_points(i);
        let pj = self.mesh.triangle_points(j);
        let (ni, nj) = (self.mesh.normal(i), self.mesh.normal(j));
        let mut acc = PairAcc::default();
        for node in &rule.nodes {
            let bx = unalign(&node.x, &al.x);
            let by = unalign(&node.y, &al.y);
            let x = pi[0] * bx[0] + pi[1] * bx[1] + pi[2] * bx[2];
            let y = pj[0] * by[0] + pj[1] * by[1] + pj[2] * by[2];
            self.add(&mut acc, node.weight, &x, &y, &bx, &by, &ni, &nj);
        }
        acc
    }

    fn pair(&self, i: usize, j: usize) -> PairAcc {
        let mut acc = match self.rules.select(self.mesh, i, j) {
            RuleChoice::Far => self.tensor(i, j, &self.far),
            RuleChoice::Near => self.tensor(i, j, &self.near),
            RuleChoice::Singular(al) if i <= j => self.singular(i, j, &al),
            RuleChoice::Singular(_) => self.singular(j, i, &align_pair(self.mesh, j, i)).swapped(),
        };
        acc.scale(self.mesh.area(i) * self.mesh.area(j));
        acc
    }
}

/// Contributions of one test panel to every operator.
struct RowStrip {
    s: Vec<Complex64>,
    k: Vec<Complex64>,
    ks: [Vec<Complex64>; 3],
    d: [Vec<Complex64>; 3],
}

fn strip(ctx: &Context, i: usize) -> RowStrip {
    let mesh = ctx.mesh;
    let nt = mesh.num_triangles();
    let nv = mesh.num_vertices();
    let w = ctx.want;
    let alloc = |on: bool, n: usize| if on { vec![ZERO; n] } else { Vec::new() };
    let mut out = RowStrip {
        s: alloc(w.s, nt),
        k: alloc(w.k, nv),
        ks: std::array::from_fn(|_| alloc(w.ks, nt)),
        d: std::array::from_fn(|_| alloc(w.d, nv)),
    };
    let lam2 = ctx.k * ctx.k;
    let ni = mesh.normal(i);
    for j in 0..nt {
        let acc = ctx.pair(i, j);
        let tj = mesh.triangles()[j];
        if w.s {
            out.s[j] = acc.s;
        }
        if w.k {
            for b in 0..3 {
                out.k[tj[b]] += acc.k[b];
            }
        }
        if w.ks {
            for a in 0..3 {
                out.ks[a][j] = acc.ks[a];
            }
        }
        if w.d {
            let nn = ni.dot(&mesh.normal(j));
            for a in 0..3 {
                for b in 0..3 {
                    let cc = ctx.curls[i][a].dot(&ctx.curls[j][b]);
                    let mut v = acc.s * cc;
                    if !ctx.laplace {
                        v -= lam2 * acc.p[a][b] * nn;
                    }
                    out.d[a][tj[b]] -= v;
                }
            }
        }
    }
    out
}

fn surface_curls(mesh: &SurfaceMesh, t: usize) -> [Point3; 3] {
    let p = mesh.triangle_points(t);
    let two_a = 2.0 * mesh.area(t);
    std::array::from_fn(|a| (p[(a + 1) % 3] - p[(a + 2) % 3]) / two_a)
}

pub(crate) fn assemble(
    mesh: &SurfaceMesh,
    k: WaveNumber,
    rules: &PairRules,
    want: Wanted,
    dof_cap: usize,
) -> Result<Assembled> {
    let nt = mesh.num_triangles();
    let nv = mesh.num_vertices();
    let dofs = nt.max(nv);
    if dofs > dof_cap {
        return Err(BemError::DofCapExceeded { dofs, cap: dof_cap });
    }
    // swapped touching pairs read K from K* and vice versa
    let both = want.k || want.ks;
    let ctx = Context {
        mesh,
        rules,
        k: k.value(),
        laplace: k.is_laplace(),
        want: Wanted {
            k: both,
            ks: both,
            ..want
        },
        far: (0..nt).map(|t| PanelPoints::new(mesh, t, &rules.far)).collect(),
        near: (0..nt).map(|t| PanelPoints::new(mesh, t, &rules.near)).collect(),
        curls: (0..nt).map(|t| surface_curls(mesh, t)).collect(),
    };
    let mut s = want.s.then(|| DMatrix::zeros(nt, nt));
    let mut km = want.k.then(|| DMatrix::zeros(nt, nv));
    let mut ks = want.ks.then(|| DMatrix::zeros(nv, nt));
    let mut d = want.d.then(|| DMatrix::zeros(nv, nv));

    for start in (0..nt).step_by(BATCH) {
        let end = (start + BATCH).min(nt);
        let strips: Vec<RowStrip> = (start..end).into_par_iter().map(|i| strip(&ctx, i)).collect();
        for (off, st) in strips.into_iter().enumerate() {
            let i = start + off;
            let ti = mesh.triangles()[i];
            if let Some(m) = s.as_mut() {
                for (j, v) in st.s.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            if let Some(m) = km.as_mut() {
                for (j, v) in st.k.iter().enumerate() {
                    m[(i, j)] = *v;
                }
            }
            if let Some(m) = ks.as_mut() {
                for a in 0..3 {
                    for (j, v) in st.ks[a].iter().enumerate() {
                        m[(ti[a], j)] += *v;
                    }
                }
            }
            if let Some(m) = d.as_mut() {
                for a in 0..3 {
                    for (j, v) in st.d[a].iter().enumerate() {
                        m[(ti[a], j)] += *v;
                    }
                }
            }
        }
    }
    Ok(Assembled { s, k: km, ks, d })
}
