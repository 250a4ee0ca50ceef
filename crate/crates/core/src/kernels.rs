//! Fundamental solution of `-Δ - λ²` in three dimensions and its derivatives.
//!
//! `Φ(x, y) = e^{iλr} / (4πr)` with `r = |x - y|`; for `λ = 0` this is the
//! Laplace kernel `1 / (4πr)`. The wavenumber must satisfy `Im(λ) ≥ 0`. The
//! operator is also assumed to be invertible, i.e. `λ²` is not a Dirichlet,
//! Neumann, or mixed eigenvalue of the Laplacian for the chosen geometry; this
//! cannot be checked here and is monitored through condition estimates in the
//! solver.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{BemError, Result};
use crate::geometry::Point3;

const FOUR_PI: f64 = 4.0 * PI;

/// Complex wavenumber `λ` with `Im(λ) ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct WaveNumber(Complex64);

impl WaveNumber {
    pub fn new(value: Complex64) -> Result<Self> {
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(BemError::InvalidInput("wavenumber must be finite".into()));
        }
        if value.im < 0.0 {
            return Err(BemError::InvalidInput(format!(
                "wavenumber {value} has negative imaginary part"
            )));
        }
        Ok(Self(value))
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub fn laplace() -> Self {
        Self(Complex64::new(0.0, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn is_laplace(&self) -> bool {
        self.0.re == 0.0 && self.0.im == 0.0
    }

    /// Real, nonzero wavenumbers are outside the range covered by the
    /// invertibility theory and only accepted with a warning.
    pub fn is_real_nonzero(&self) -> bool {
        self.0.im == 0.0 && self.0.re != 0.0
    }
}

impl TryFrom<[f64; 2]> for WaveNumber {
    type Error = BemError;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::from_parts(v[0], v[1])
    }
}

impl From<WaveNumber> for [f64; 2] {
    fn from(k: WaveNumber) -> Self {
        [k.0.re, k.0.im]
    }
}

/// Kernel value together with the radial factor of its gradient:
/// `∇ₓΦ(x, y) = grad_factor · (x - y)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct KernelSample {
    pub phi: Complex64,
    pub grad_factor: Complex64,
}

#[inline]
pub(crate) fn sample(k: Complex64, laplace: bool, r: f64) -> KernelSample {
    let inv_r = 1.0 / r;
    if laplace {
        let phi = inv_r / FOUR_PI;
        KernelSample {
            phi: Complex64::new(phi, 0.0),
            grad_factor: Complex64::new(-phi * inv_r * inv_r, 0.0),
        }
    } else {
        let ikr = Complex64::new(0.0, 1.0) * k * r;
        let phi = ikr.exp() * (inv_r / FOUR_PI);
        KernelSample {
            phi,
            grad_factor: phi * (ikr - 1.0) * (inv_r * inv_r),
        }
    }
}

/// Derivative of the gradient factor with respect to `r`, divided by `r`.
/// Used for the Hessian `∇ₓ∇ₓΦ = g I + (g'/r) (x-y)(x-y)ᵀ`.
#[inline]
pub(crate) fn grad_factor_derivative_over_r(k: Complex64, laplace: bool, r: f64) -> Complex64 {
    let inv_r = 1.0 / r;
    if laplace {
        Complex64::new(3.0 * inv_r.powi(5) / FOUR_PI, 0.0)
    } else {
        let ikr = Complex64::new(0.0, 1.0) * k * r;
        let e = ikr.exp();
        // g(r) = e^{ikr}(ikr - 1)/(4π r³)
        // g'(r) = e^{ikr}[-k² r + 3(1 - ikr)/r] / (4π r³)
        e * (-(k * k) * r + (1.0 - ikr) * 3.0 * inv_r) * (inv_r.powi(4) / FOUR_PI)
    }
}

fn separation(x: &Point3, y: &Point3) -> Result<(Point3, f64)> {
    let d = x - y;
    let r = d.norm();
    let scale = x.norm().max(y.norm()).max(1.0);
    if r <= 1e-14 * scale {
        return Err(BemError::SingularEvaluation { distance: r });
    }
    Ok((d, r))
}

pub fn phi(k: WaveNumber, x: &Point3, y: &Point3) -> Result<Complex64> {
    let (_, r) = separation(x, y)?;
    Ok(sample(k.value(), k.is_laplace(), r).phi)
}

/// `∇ₓΦ(x, y)`.
pub fn grad_phi_x(k: WaveNumber, x: &Point3, y: &Point3) -> Result<[Complex64; 3]> {
    let (d, r) = separation(x, y)?;
    let g = sample(k.value(), k.is_laplace(), r).grad_factor;
    Ok([g * d.x, g * d.y, g * d.z])
}

/// `∂Φ/∂n_y = ∇_yΦ(x, y) · n_y`, the double layer kernel.
pub fn dphi_dny(k: WaveNumber, x: &Point3, y: &Point3, n_y: &Point3) -> Result<Complex64> {
    let (d, r) = separation(x, y)?;
    Ok(-sample(k.value(), k.is_laplace(), r).grad_factor * d.dot(n_y))
}

/// `∂Φ/∂n_x = ∇ₓΦ(x, y) · n_x`, the adjoint double layer kernel.
pub fn dphi_dnx(k: WaveNumber, x: &Point3, y: &Point3, n_x: &Point3) -> Result<Complex64> {
    let (d, r) = separation(x, y)?;
    Ok(sample(k.value(), k.is_laplace(), r).grad_factor * d.dot(n_x))
}

/// `∇ₓ (∂Φ/∂n_y)(x, y)`, gradient of the double layer kernel in the
/// evaluation point.
pub fn grad_dphi_dny(k: WaveNumber, x: &Point3, y: &Point3, n_y: &Point3) -> Result<[Complex64; 3]> {
    let (d, r) = separation(x, y)?;
    let g = sample(k.value(), k.is_laplace(), r).grad_factor;
    let h = grad_factor_derivative_over_r(k.value(), k.is_laplace(), r);
    let dn = d.dot(n_y);
    Ok([
        -(g * n_y.x + h * dn * d.x),
        -(g * n_y.y + h * dn * d.y),
        -(g * n_y.z + h * dn * d.z),
    ])
}
