//! Dense LU with partial pivoting and a 1-norm condition estimate.

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;

use crate::error::{BemError, Result};

type CMatrix = DMatrix<Complex64>;
type CVector = DVector<Complex64>;

/// Factorization `P A = L U`, kept together with explicit triangular factors
/// so that systems with `Aᴴ` can be solved without refactoring.
pub struct DenseLu {
    lu: LU<Complex64, Dyn, Dyn>,
    l: CMatrix,
    u: CMatrix,
    norm1: f64,
}

pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

impl DenseLu {
    pub fn new(a: &CMatrix, what: &'static str) -> Result<Self> {
        if !a.is_square() {
            return Err(BemError::Dimension(format!(
                "{what} is {}x{}, not square",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(BemError::InvalidInput(format!("{what} has non-finite entries")));
        }
        let lu = a.clone().lu();
        if !lu.is_invertible() {
            return Err(BemError::SingularMatrix(what));
        }
        let l = lu.l();
        let u = lu.u();
        Ok(Self {
            lu,
            l,
            u,
            norm1: norm1(a),
        })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn solve(&self, b: &CVector) -> CVector {
        self.lu.solve(b).expect("factor checked invertible")
    }

    pub fn solve_matrix(&self, b: &CMatrix) -> CMatrix {
        self.lu.solve(b).expect("factor checked invertible")
    }

    /// Solve `Aᴴ x = b`.
    pub fn solve_adjoint(&self, b: &CVector) -> CVector {
        // Aᴴ = Uᴴ Lᴴ P
        let y = self.u.ad_solve_upper_triangular(b).expect("nonzero pivots");
        let mut z = self.l.ad_solve_lower_triangular(&y).expect("unit diagonal");
        self.lu.p().inv_permute_rows(&mut z);
        z
    }

    /// Estimate of `‖A‖₁ ‖A⁻¹‖₁` by Hager's method with Higham's extra
    /// test vector. Never larger than the true value, usually within a
    /// factor of a few.
    pub fn condition_estimate(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 0.0;
        }
        let one = |v: &CVector| v.iter().map(|c| c.norm()).sum::<f64>();
        let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for iter in 0..5 {
            let y = self.solve(&x);
            let e = one(&y);
            if iter > 0 && e <= est {
                break;
            }
            est = e;
            let xi = y.map(|c| {
                if c.norm() > 0.0 {
                    c / c.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                }
            });
            let z = self.solve_adjoint(&xi);
            let (j, zj) = z
                .iter()
                .enumerate()
                .map(|(j, c)| (j, c.norm()))
                .fold((0, -1.0), |a, b| if b.1 > a.1 { b } else { a });
            if iter > 0 && (zj <= z.dotc(&x).re || j == last_j) {
                break;
            }
            last_j = j;
            x = CVector::zeros(n);
            x[j] = Complex64::new(1.0, 0.0);
        }
        if n > 1 {
            let alt = CVector::from_fn(n, |i, _| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::new(s * (1.0 + i as f64 / (n - 1) as f64), 0.0)
            });
            est = est.max(2.0 * one(&self.solve(&alt)) / (3.0 * n as f64));
        }
        self.norm1 * est
    }
}
