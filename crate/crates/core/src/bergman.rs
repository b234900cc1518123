//! Orthonormal bases of the Bergman spaces `A²(𝔻⁺)` and `A²(𝔻⁻)`, the
//! reflection `R̂`, and a tensor quadrature rule on the unit disk.
//!
//! One-forms `h(z) dz` are stored through their coefficient function `h`.
//! The bases are
//!
//! * `e_k(z)  = √((k+1)/π) z^k` on `𝔻⁺`,
//! * `ẽ_k(z) = √((k+1)/π) z^{−k−2}` on `𝔻⁻`,
//!
//! both indexed from `k = 0`. The exponent `−k−2` is the decay at `∞`
//! required for square integrability in the chart `w = 1/z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RADIAL: usize = 48;
pub const DEFAULT_ANGULAR: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    Plus,
    Minus,
}

/// `√((k+1)/π)`.
#[inline]
pub fn basis_scale(k: usize) -> f64 {
    ((k + 1) as f64 / PI).sqrt()
}

/// Value of the plus-space basis function `e_k` at `z`.
pub fn plus_basis(k: usize, z: Complex64) -> Complex64 {
    z.powu(k as u32) * basis_scale(k)
}

/// Value of the minus-space basis function `ẽ_k` at `z`.
pub fn minus_basis(k: usize, z: Complex64) -> Complex64 {
    z.inv().powu(k as u32 + 2) * basis_scale(k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BergmanElement {
    pub space: Space,
    pub coeffs: Vec<Complex64>,
}

impl BergmanElement {
    pub fn new(space: Space, coeffs: Vec<Complex64>) -> Self {
        Self { space, coeffs }
    }

    /// The `k`-th basis vector in a space truncated at `len` coefficients.
    pub fn unit(space: Space, k: usize, len: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        coeffs[k] = Complex64::new(1.0, 0.0);
        Self { space, coeffs }
    }

    /// Parseval norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Pointwise value of the coefficient function.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let basis = match self.space {
            Space::Plus => plus_basis,
            Space::Minus => minus_basis,
        };
        self.coeffs.iter().enumerate().map(|(k, &c)| c * basis(k, z)).sum()
    }

    /// For the minus space, the function `w^{−2} h(1/w)` representing the
    /// form in the chart at infinity; for the plus space, `h` itself.
    pub fn chart_value(&self, w: Complex64) -> Complex64 {
        match self.space {
            Space::Plus => self.evaluate(w),
            // w^{−2} ẽ_k(1/w) = e_k(w)
            Space::Minus => self.coeffs.iter().enumerate().map(|(k, &c)| c * plus_basis(k, w)).sum(),
        }
    }
}

/// An anti-holomorphic form `conj(u(z)) dz̄` on `𝔻⁺`, stored through the
/// plus-space coefficients of `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateElement {
    pub coeffs: Vec<Complex64>,
}

impl ConjugateElement {
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Value of `conj(u(z))`.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.holomorphic_part().evaluate(z).conj()
    }

    /// `u` as an element of `A²(𝔻⁺)`.
    pub fn holomorphic_part(&self) -> BergmanElement {
        BergmanElement::new(Space::Plus, self.coeffs.clone())
    }
}

/// `R̂ : h(z) dz ↦ −z̄^{−2} h(1/z̄) dz̄`. In coefficients, `R̂ ẽ_k = −conj(e_k)`
/// and `Σ c_k ẽ_k ↦ conj(Σ −conj(c_k) e_k)`.
pub fn reflect(h: &BergmanElement) -> Result<ConjugateElement> {
    if h.space != Space::Minus {
        return Err(Error::WrongSpace);
    }
    Ok(ConjugateElement {
        coeffs: h.coeffs.iter().map(|c| -c.conj()).collect(),
    })
}

/// Inverse change of variables, taking `R̂h` back to `h`.
pub fn unreflect(u: &ConjugateElement) -> BergmanElement {
    BergmanElement::new(Space::Minus, u.coeffs.iter().map(|c| -c.conj()).collect())
}

/// `(a, b) = Σ a_k conj(b_k)`.
pub fn inner_product(a: &BergmanElement, b: &BergmanElement) -> Result<Complex64> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y.conj()).sum())
}

/// Quadrature evaluation of `∬ h_a conj(h_b) dA`, using the chart at
/// infinity for the minus space.
pub fn inner_product_quadrature(a: &BergmanElement, b: &BergmanElement, quad: &DiskQuadrature) -> Result<Complex64> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(quad.integrate(|w| a.chart_value(w) * b.chart_value(w).conj()))
}

/// Tensor rule on the unit disk: Gauss–Legendre in `r ∈ [0, 1]` with the
/// Jacobian `r` folded into the weights, trapezoid in `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskQuadrature {
    radial: usize,
    angular: usize,
    phase: f64,
    radii: Vec<f64>,
    radial_weights: Vec<f64>,
    nodes: Vec<Complex64>,
    weights: Vec<f64>,
}

pub fn build_quadrature(radial: usize, angular: usize) -> Result<DiskQuadrature> {
    DiskQuadrature::new(radial, angular, 0.0)
}

impl DiskQuadrature {
    /// Rule whose angular grid is rotated by `phase` radians.
    pub fn new(radial: usize, angular: usize, phase: f64) -> Result<Self> {
        if radial < 4 || angular < 8 {
            return Err(Error::ResolutionTooLow { radial, angular });
        }
        let (x, w) = gauss_legendre(radial);
        let radii: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let radial_weights: Vec<f64> = w.iter().zip(&radii).map(|(wi, r)| 0.5 * wi * r).collect();
        let dtheta = 2.0 * PI / angular as f64;
        let mut nodes = Vec::with_capacity(radial * angular);
        let mut weights = Vec::with_capacity(radial * angular);
        for (r, wr) in radii.iter().zip(&radial_weights) {
            for k in 0..angular {
                nodes.push(Complex64::from_polar(*r, phase + dtheta * k as f64));
                weights.push(wr * dtheta);
            }
        }
        Ok(Self {
            radial,
            angular,
            phase,
            radii,
            radial_weights,
            nodes,
            weights,
        })
    }

    pub fn radial(&self) -> usize {
        self.radial
    }

    pub fn angular(&self) -> usize {
        self.angular
    }

    /// Rotation of the angular grid: node `k` of a ring sits at
    /// `phase + 2πk/angular`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// Ring radii, ascending.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Radial weights including the Jacobian `r` (no angular factor).
    pub fn radial_weights(&self) -> &[f64] {
        &self.radial_weights
    }

    /// Nodes ring by ring; within a ring, by increasing angle.
    pub fn nodes(&self) -> &[Complex64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&z, &w)| f(z) * w).sum()
    }
}

impl Default for DiskQuadrature {
    fn default() -> Self {
        build_quadrature(DEFAULT_RADIAL, DEFAULT_ANGULAR).expect("default resolution is valid")
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`, by Newton iteration on
/// `P_n` from Chebyshev initial guesses. Nodes ascend.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, t);
        dp = if d != 0.0 { d } else { dp };
        let weight = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, t: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = t;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}
