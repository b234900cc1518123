//! Truncated power series over a commutative coefficient ring.
//!
//! A `PowerSeries<C>` stores the coefficients `c_0..=c_N` of a Taylor
//! expansion truncated at order `N`. Every binary operation truncates at the
//! smaller of the two operand orders, so results are exact to truncation.
//!
//! The coefficient ring is abstracted by [`Coefficient`]. It is implemented
//! for `Complex64` and, recursively, for `PowerSeries<C>` itself, which gives
//! bivariate series `PowerSeries<PowerSeries<Complex64>>`: the outer variable
//! is conventionally `z`, the inner one `ζ`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Default truncation order for computations that do not specify one.
pub const DEFAULT_ORDER: usize = 32;

/// Pivot threshold used by [`PowerSeries::reciprocal`].
pub const DEFAULT_PIVOT_EPS: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("constant term {magnitude:e} is below the pivot threshold {eps:e}")]
    ZeroConstantTerm { magnitude: f64, eps: f64 },
    #[error("inner series has nonzero constant term {magnitude:e}")]
    CompositionDomain { magnitude: f64 },
    #[error("exponential requires a zero constant term, found magnitude {magnitude:e}")]
    NonzeroConstant { magnitude: f64 },
}

/// Operations a coefficient ring must provide.
///
/// `zero_like`/`one_like` take a template so that nested series can carry
/// their inner truncation order along.
pub trait Coefficient: Clone + fmt::Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negated(&self) -> Self;
    fn scaled(&self, s: f64) -> Self;
    fn scaled_complex(&self, s: Complex64) -> Self;
    /// Multiplicative inverse; fails when the leading scalar is below `eps`.
    fn inverse(&self, eps: f64) -> Result<Self, SeriesError>;
    /// Largest scalar magnitude contained in the value.
    fn magnitude(&self) -> f64;
    /// Magnitude of the innermost constant scalar.
    fn lead_magnitude(&self) -> f64;
}

impl Coefficient for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }
    #[inline]
    fn minus(&self, rhs: &Self) -> Self {
        self - rhs
    }
    #[inline]
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn negated(&self) -> Self {
        -self
    }
    fn scaled(&self, s: f64) -> Self {
        self * s
    }
    fn scaled_complex(&self, s: Complex64) -> Self {
        self * s
    }
    fn inverse(&self, eps: f64) -> Result<Self, SeriesError> {
        let magnitude = self.norm();
        if magnitude < eps || !magnitude.is_finite() {
            return Err(SeriesError::ZeroConstantTerm { magnitude, eps });
        }
        Ok(self.inv())
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn lead_magnitude(&self) -> f64 {
        self.norm()
    }
}

/// Which term-wise calculus operation to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Calculus {
    Derivative,
    Antiderivative,
}

/// How [`PowerSeries::compose_with`] treats an inner series with a nonzero
/// constant term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComposeMode {
    /// Inner constant term must vanish.
    Strict,
    /// The caller asserts the outer series is a polynomial (entire to
    /// truncation), so plain Horner substitution is exact.
    OuterPolynomial,
}

#[derive(Clone, PartialEq)]
pub struct PowerSeries<C = Complex64> {
    coeffs: Vec<C>,
}

pub type Bivariate = PowerSeries<PowerSeries<Complex64>>;

impl<C: Coefficient> PowerSeries<C> {
    /// Builds a series from `c_0..=c_N`.
    ///
    /// # Panics
    /// If `coeffs` is empty.
    pub fn new(coeffs: Vec<C>) -> Self {
        assert!(!coeffs.is_empty(), "a power series needs at least c_0");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    /// Constant series `value` at the given order, zero elsewhere.
    pub fn constant_like(value: C, order: usize) -> Self {
        let zero = value.zero_like();
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    pub fn zero_like(&self) -> Self {
        let z = self.coeffs[0].zero_like();
        Self {
            coeffs: vec![z; self.coeffs.len()],
        }
    }

    pub fn one_like(&self) -> Self {
        let mut s = self.zero_like();
        s.coeffs[0] = self.coeffs[0].one_like();
        s
    }

    /// Drops coefficients above `order`. Requesting a higher order than
    /// stored returns the series unchanged.
    pub fn truncate(&self, order: usize) -> Self {
        let len = (order + 1).min(self.coeffs.len());
        Self {
            coeffs: self.coeffs[..len].to_vec(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().min(rhs.coeffs.len());
        Self {
            coeffs: (0..len).map(|k| self.coeffs[k].plus(&rhs.coeffs[k])).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().min(rhs.coeffs.len());
        Self {
            coeffs: (0..len).map(|k| self.coeffs[k].minus(&rhs.coeffs[k])).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(Coefficient::negated).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scaled(s)).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.scaled_complex(s)).collect(),
        }
    }

    /// Multiplies every coefficient by the ring element `c`.
    pub fn scale_by(&self, c: &C) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|x| x.times(c)).collect(),
        }
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, rhs: &Self) -> Self {
        let len = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|k| {
                let mut acc = self.coeffs[0].times(&rhs.coeffs[k]);
                for j in 1..=k {
                    acc = acc.plus(&self.coeffs[j].times(&rhs.coeffs[k - j]));
                }
                acc
            })
            .collect();
        Self { coeffs }
    }

    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        self.reciprocal_with(DEFAULT_PIVOT_EPS)
    }

    /// Reciprocal by forward substitution:
    /// `b_0 = 1/c_0`, `b_k = -b_0 * Σ_{j=1..k} c_j b_{k-j}`.
    pub fn reciprocal_with(&self, eps: f64) -> Result<Self, SeriesError> {
        let inv0 = self.coeffs[0].inverse(eps)?;
        let mut out: Vec<C> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = self.coeffs[1].times(&out[k - 1]);
            for j in 2..=k {
                acc = acc.plus(&self.coeffs[j].times(&out[k - j]));
            }
            out.push(acc.times(&inv0).negated());
        }
        Ok(Self { coeffs: out })
    }

    /// `self / rhs` to truncation.
    pub fn div(&self, rhs: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&rhs.reciprocal()?))
    }

    /// Term-wise derivative; the order drops by one (order 0 stays 0).
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return self.zero_like();
        }
        Self {
            coeffs: self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c.scaled((k + 1) as f64))
                .collect(),
        }
    }

    /// Term-wise antiderivative with zero constant; the order grows by one.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(self.coeffs[0].zero_like());
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.scaled(1.0 / (k + 1) as f64)),
        );
        Self { coeffs }
    }

    pub fn calculus(&self, mode: Calculus) -> Self {
        match mode {
            Calculus::Derivative => self.derivative(),
            Calculus::Antiderivative => self.antiderivative(),
        }
    }

    /// `exp(self)` for a series with vanishing constant term, from the
    /// recurrence `k e_k = Σ_{j=1..k} j a_j e_{k-j}`.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        let magnitude = self.coeffs[0].magnitude();
        if magnitude > 0.0 {
            return Err(SeriesError::NonzeroConstant { magnitude });
        }
        let mut out: Vec<C> = Vec::with_capacity(self.coeffs.len());
        out.push(self.coeffs[0].one_like());
        for k in 1..self.coeffs.len() {
            let mut acc = self.coeffs[1].times(&out[k - 1]);
            for j in 2..=k {
                acc = acc.plus(&self.coeffs[j].scaled(j as f64).times(&out[k - j]));
            }
            out.push(acc.scaled(1.0 / k as f64));
        }
        Ok(Self { coeffs: out })
    }

    /// `self ∘ inner`; the inner constant term must vanish.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.compose_with(inner, ComposeMode::Strict)
    }

    /// Horner substitution of `inner` into `self`, truncated at the smaller
    /// order.
    pub fn compose_with(&self, inner: &Self, mode: ComposeMode) -> Result<Self, SeriesError> {
        let magnitude = inner.coeffs[0].magnitude();
        if mode == ComposeMode::Strict && magnitude > 0.0 {
            return Err(SeriesError::CompositionDomain { magnitude });
        }
        let order = self.order().min(inner.order());
        let inner = inner.truncate(order);
        let top = if mode == ComposeMode::Strict {
            // Terms above the order contribute nothing when inner(0) = 0.
            order
        } else {
            self.order()
        };
        let mut acc = Self::constant_like(self.coeffs[top].clone(), order);
        for k in (0..top).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].plus(&self.coeffs[k]);
        }
        Ok(acc)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(Coefficient::magnitude).fold(0.0, f64::max)
    }

    /// Largest coefficient-wise difference over the common orders.
    pub fn max_diff(&self, rhs: &Self) -> f64 {
        self.sub(rhs).max_abs()
    }
}

impl PowerSeries<Complex64> {
    pub fn from_slice(coeffs: &[Complex64]) -> Self {
        Self::new(coeffs.to_vec())
    }

    /// Series with real coefficients, convenient in tests and catalogs.
    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0); order + 1])
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Complex64::new(1.0, 0.0), order)
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        Self::constant_like(value, order)
    }

    /// The identity series `z`.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    /// Lifts a series in `ζ` into the `z⁰` slot of a bivariate series whose
    /// outer order is `outer_order`.
    pub fn lift_inner(&self, outer_order: usize) -> Bivariate {
        PowerSeries::constant_like(self.clone(), outer_order)
    }

    /// Treats `self` as a series in the outer variable `z`, each coefficient
    /// a constant series in `ζ` of order `inner_order`.
    pub fn lift_outer(&self, inner_order: usize) -> Bivariate {
        PowerSeries::new(
            self.coeffs
                .iter()
                .map(|&c| PowerSeries::constant(c, inner_order))
                .collect(),
        )
    }
}

impl<C: Coefficient> Coefficient for PowerSeries<C> {
    fn zero_like(&self) -> Self {
        PowerSeries::zero_like(self)
    }
    fn one_like(&self) -> Self {
        PowerSeries::one_like(self)
    }
    fn plus(&self, rhs: &Self) -> Self {
        self.add(rhs)
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.sub(rhs)
    }
    fn times(&self, rhs: &Self) -> Self {
        self.mul(rhs)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
    fn scaled(&self, s: f64) -> Self {
        self.scale(s)
    }
    fn scaled_complex(&self, s: Complex64) -> Self {
        self.scale_complex(s)
    }
    fn inverse(&self, eps: f64) -> Result<Self, SeriesError> {
        self.reciprocal_with(eps)
    }
    fn magnitude(&self) -> f64 {
        self.max_abs()
    }
    fn lead_magnitude(&self) -> f64 {
        self.coeffs[0].lead_magnitude()
    }
}

impl<C: Coefficient> fmt::Debug for PowerSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerSeries")
            .field("order", &self.order())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<C: Coefficient> Add for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn add(self, rhs: Self) -> PowerSeries<C> {
        PowerSeries::add(self, rhs)
    }
}

impl<C: Coefficient> Sub for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn sub(self, rhs: Self) -> PowerSeries<C> {
        PowerSeries::sub(self, rhs)
    }
}

impl<C: Coefficient> Mul for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn mul(self, rhs: Self) -> PowerSeries<C> {
        PowerSeries::mul(self, rhs)
    }
}

impl<C: Coefficient> Neg for &PowerSeries<C> {
    type Output = PowerSeries<C>;
    fn neg(self) -> PowerSeries<C> {
        PowerSeries::neg(self)
    }
}
