use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinants below this modulus are rejected.
pub const DETERMINANT_EPS: f64 = 1e-12;

/// Moebius transformation `z ↦ (a z + b) / (c z + d)`, normalized so that
/// `a d − b c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusTransform {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl MobiusTransform {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let det = a * d - b * c;
        if det.norm() < DETERMINANT_EPS || !det.norm().is_finite() {
            return Err(Error::DegenerateMobius(det.norm()));
        }
        let k = det.sqrt().inv();
        Ok(Self {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        })
    }

    pub fn identity() -> Self {
        Self {
            a: cx(1.0, 0.0),
            b: cx(0.0, 0.0),
            c: cx(0.0, 0.0),
            d: cx(1.0, 0.0),
        }
    }

    /// `z ↦ k z`.
    pub fn dilation(k: Complex64) -> Result<Self> {
        Self::new(k, cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0))
    }

    /// `z ↦ z + b`.
    pub fn translation(b: Complex64) -> Self {
        Self {
            a: cx(1.0, 0.0),
            b,
            c: cx(0.0, 0.0),
            d: cx(1.0, 0.0),
        }
    }

    /// `z ↦ 1/z`.
    pub fn inversion() -> Self {
        Self::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0))
            .expect("inversion is nondegenerate")
    }

    /// The unique transform sending `z[k]` to `w[k]` for k = 0, 1, 2.
    pub fn from_three_points(z: [Complex64; 3], w: [Complex64; 3]) -> Result<Self> {
        let sz = Self::to_zero_one_infinity(z)?;
        let sw = Self::to_zero_one_infinity(w)?;
        Ok(sw.inverse().compose(&sz))
    }

    /// Sends `p[0] ↦ 0`, `p[1] ↦ 1`, `p[2] ↦ ∞`.
    fn to_zero_one_infinity(p: [Complex64; 3]) -> Result<Self> {
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            if (p[i] - p[j]).norm() < DETERMINANT_EPS {
                return Err(Error::DegenerateCenters(i, j));
            }
        }
        let [z1, z2, z3] = p;
        Self::new(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        // Product of unimodular matrices stays unimodular.
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Image of `z`; `None` at the pole.
    pub fn apply(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        if den == cx(0.0, 0.0) {
            None
        } else {
            Some((self.a * z + self.b) / den)
        }
    }

    /// `T'(z) = 1 / (c z + d)²`.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.c * z + self.d;
        (den * den).inv()
    }

    /// Finite pole `−d/c`, if any.
    pub fn pole(&self) -> Option<Complex64> {
        if self.c.norm() <= DETERMINANT_EPS * (self.a.norm() + self.d.norm()) {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    pub fn is_identity(&self) -> bool {
        let one = cx(1.0, 0.0);
        let zero = cx(0.0, 0.0);
        self.a == one && self.b == zero && self.c == zero && self.d == one
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_determinant() {
        let t = MobiusTransform::new(cx(2.0, 1.0), cx(0.5, 0.0), cx(1.0, -1.0), cx(3.0, 0.0)).unwrap();
        let [a, b, c, d] = t.coefficients();
        assert!((a * d - b * c - cx(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_degenerate() {
        let e = MobiusTransform::new(cx(1.0, 0.0), cx(2.0, 0.0), cx(2.0, 0.0), cx(4.0, 0.0));
        assert!(matches!(e, Err(Error::DegenerateMobius(_))));
    }

    #[test]
    fn three_point_map() {
        let z = [cx(0.0, 0.0), cx(2.0, 0.0), cx(-2.0, 0.0)];
        let w = [cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0)];
        let t = MobiusTransform::from_three_points(z, w).unwrap();
        for k in 0..3 {
            assert!((t.apply(z[k]).unwrap() - w[k]).norm() < 1e-14);
        }
        // Symmetric configuration: the map is z/2.
        assert!(t.pole().is_none());
        assert!((t.apply(cx(0.7, 0.3)).unwrap() - cx(0.35, 0.15)).norm() < 1e-14);

        let z = [cx(0.3, 1.0), cx(-2.0, 0.5), cx(4.0, -1.0)];
        let t = MobiusTransform::from_three_points(z, w).unwrap();
        for k in 0..3 {
            assert!((t.apply(z[k]).unwrap() - w[k]).norm() < 1e-13);
        }
    }

    #[test]
    fn compose_and_inverse() {
        let s = MobiusTransform::new(cx(1.0, 1.0), cx(0.0, 2.0), cx(0.5, 0.0), cx(1.0, 0.0)).unwrap();
        let t = MobiusTransform::inversion().compose(&MobiusTransform::translation(cx(-5.0, 0.0)));
        let z = cx(0.2, -0.4);
        let direct = s.apply(t.apply(z).unwrap()).unwrap();
        assert!((s.compose(&t).apply(z).unwrap() - direct).norm() < 1e-14);
        assert!((s.inverse().apply(s.apply(z).unwrap()).unwrap() - z).norm() < 1e-14);
        assert_eq!(t.pole().map(|p| (p - cx(5.0, 0.0)).norm() < 1e-14), Some(true));
        assert!(t.apply(cx(5.0, 0.0)).is_none());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let t = MobiusTransform::new(cx(1.0, 1.0), cx(0.0, 2.0), cx(0.5, 0.0), cx(1.0, 0.0)).unwrap();
        let z = cx(0.3, 0.1);
        let h = 1e-6;
        let fd = (t.apply(z + h).unwrap() - t.apply(z - h).unwrap()) / (2.0 * h);
        assert!((fd - t.derivative(z)).norm() < 1e-8);
    }
}
