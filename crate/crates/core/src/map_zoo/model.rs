use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::power_series::PowerSeries;

/// Order at which zoo maps store their series.
pub const DEFAULT_MAP_ORDER: usize = 160;

/// Slack allowed when evaluating on the closed disk.
pub const DISK_EPS: f64 = 1e-12;

/// Smallest admissible `|f'(0)|`.
pub const DERIVATIVE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    /// `f(z) = p + r z`.
    AffineDisk { radius: f64 },
    /// `f(z) = p + z + c z²`, `|c| < 1/2`.
    Quadratic { c: Complex64 },
    /// `f(z) = p + z / (1 − c z²)`, `|c| < 1`: the inversion of the exterior
    /// of the ellipse traced by `1/z − c z` on the unit circle.
    JoukowskiEllipse { c: Complex64 },
    /// Only the Taylor series of `f − p` is known.
    RawSeries,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::AffineDisk { .. } => "affine_disk",
            MapKind::Quadratic { .. } => "quadratic",
            MapKind::JoukowskiEllipse { .. } => "joukowski_ellipse",
            MapKind::RawSeries => "raw_series",
        }
    }
}

/// One row of the zoo catalog.
#[derive(Debug, Clone, Copy)]
pub struct ZooEntry {
    pub kind: &'static str,
    pub formula: &'static str,
    pub parameters: &'static str,
    pub constraint: &'static str,
}

pub const ZOO_CATALOG: [ZooEntry; 4] = [
    ZooEntry {
        kind: "affine_disk",
        formula: "p + r z",
        parameters: "center, radius",
        constraint: "r > 0",
    },
    ZooEntry {
        kind: "quadratic",
        formula: "p + z + c z^2",
        parameters: "center, c",
        constraint: "|c| < 1/2",
    },
    ZooEntry {
        kind: "joukowski_ellipse",
        formula: "p + z / (1 - c z^2)",
        parameters: "center, c",
        constraint: "|c| < 1",
    },
    ZooEntry {
        kind: "raw_series",
        formula: "p + sum_k a_k z^k",
        parameters: "center, coeffs",
        constraint: "a_0 = 0, a_1 != 0; univalence assumed",
    },
];

/// An injective holomorphic map of the unit disk with `f(0) = center`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMapModel {
    center: Complex64,
    kind: MapKind,
    /// Series of `f − center`; its constant term is zero.
    series: PowerSeries,
    univalence_certified: bool,
}

impl ConformalMapModel {
    pub fn affine_disk(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidMap(format!("affine_disk radius must be positive, got {radius}")));
        }
        let kind = MapKind::AffineDisk { radius };
        Ok(Self::closed_form(center, kind))
    }

    pub fn quadratic(center: Complex64, c: Complex64) -> Result<Self> {
        if !(c.norm() < 0.5) {
            return Err(Error::InvalidMap(format!("quadratic needs |c| < 1/2, got |c| = {}", c.norm())));
        }
        Ok(Self::closed_form(center, MapKind::Quadratic { c }))
    }

    pub fn joukowski_ellipse(center: Complex64, c: Complex64) -> Result<Self> {
        if !(c.norm() < 1.0) {
            return Err(Error::InvalidMap(format!(
                "joukowski_ellipse needs |c| < 1, got |c| = {}",
                c.norm()
            )));
        }
        Ok(Self::closed_form(center, MapKind::JoukowskiEllipse { c }))
    }

    /// A map known only through its series. `series` is the expansion of
    /// `f − center`; a constant term up to `1e-12` in size is discarded.
    pub fn raw_series(center: Complex64, series: PowerSeries, univalence_certified: bool) -> Result<Self> {
        if series.order() < 1 {
            return Err(Error::InvalidMap("raw_series needs at least a linear term".into()));
        }
        let c0 = series.coeff(0).norm();
        if c0 > 1e-12 {
            return Err(Error::InvalidMap(format!("raw_series constant term must vanish, got {c0:e}")));
        }
        let d = series.coeff(1).norm();
        if d < DERIVATIVE_EPS || !d.is_finite() {
            return Err(Error::DegenerateDerivative(d));
        }
        let mut coeffs = series.into_coeffs();
        coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(Self {
            center,
            kind: MapKind::RawSeries,
            series: PowerSeries::new(coeffs),
            univalence_certified,
        })
    }

    fn closed_form(center: Complex64, kind: MapKind) -> Self {
        Self {
            center,
            kind,
            series: closed_form_series(&kind, DEFAULT_MAP_ORDER),
            univalence_certified: true,
        }
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Stored series of `f − center`.
    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    pub fn univalence_certified(&self) -> bool {
        self.univalence_certified
    }

    /// Highest series order available; `None` for closed forms.
    pub fn max_order(&self) -> Option<usize> {
        match self.kind {
            MapKind::RawSeries => Some(self.series.order()),
            _ => None,
        }
    }

    /// Series of `f − center` at exactly `order`, or `None` when a raw map
    /// does not carry enough coefficients.
    pub fn series_to(&self, order: usize) -> Option<PowerSeries> {
        match self.kind {
            MapKind::RawSeries if order > self.series.order() => None,
            MapKind::RawSeries => Some(self.series.truncate(order)),
            kind => Some(closed_form_series(&kind, order)),
        }
    }

    /// `f'(0)`.
    pub fn dprime0(&self) -> Complex64 {
        *self.series.coeff(1)
    }

    /// `f''(0)`.
    pub fn dsecond0(&self) -> Complex64 {
        if self.series.order() >= 2 {
            self.series.coeff(2) * 2.0
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Same map with a different center.
    pub fn translated_to(&self, center: Complex64) -> Self {
        Self { center, ..self.clone() }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.value_unchecked(z))
    }

    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        check_disk(z)?;
        Ok(self.derivative_unchecked(z))
    }

    pub(crate) fn value_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        self.center
            + match self.kind {
                MapKind::AffineDisk { radius } => z * radius,
                MapKind::Quadratic { c } => z + c * z * z,
                MapKind::JoukowskiEllipse { c } => z / (one - c * z * z),
                MapKind::RawSeries => self.series.evaluate(z),
            }
    }

    pub(crate) fn derivative_unchecked(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self.kind {
            MapKind::AffineDisk { radius } => Complex64::new(radius, 0.0),
            MapKind::Quadratic { c } => one + c * z * 2.0,
            MapKind::JoukowskiEllipse { c } => {
                let w = one - c * z * z;
                (one + c * z * z) / (w * w)
            }
            MapKind::RawSeries => self.series.derivative().evaluate(z),
        }
    }

    /// Boundary curve `f(e^{iθ_k})` at `samples` uniform angles.
    pub fn boundary_samples(&self, samples: usize) -> Vec<Complex64> {
        (0..samples)
            .map(|k| self.value_unchecked(Complex64::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64)))
            .collect()
    }

    /// Pre-Schwarzian `f''/f'` as a series of order `order − 2` of the
    /// stored series.
    pub fn pre_schwarzian(&self) -> Result<PowerSeries> {
        pre_schwarzian_of(&self.series)
    }

    /// Schwarzian derivative `(f''/f')' − ½ (f''/f')²`, truncated at the
    /// stored order minus three.
    pub fn schwarzian(&self) -> Result<PowerSeries> {
        schwarzian_of(&self.series)
    }
}

fn check_disk(z: Complex64) -> Result<()> {
    if z.norm() > 1.0 + DISK_EPS || !z.norm().is_finite() {
        return Err(Error::OutsideDisk { z });
    }
    Ok(())
}

fn closed_form_series(kind: &MapKind, order: usize) -> PowerSeries {
    let zero = Complex64::new(0.0, 0.0);
    let mut coeffs = vec![zero; order + 1];
    match *kind {
        MapKind::AffineDisk { radius } => {
            if order >= 1 {
                coeffs[1] = Complex64::new(radius, 0.0);
            }
        }
        MapKind::Quadratic { c } => {
            if order >= 1 {
                coeffs[1] = Complex64::new(1.0, 0.0);
            }
            if order >= 2 {
                coeffs[2] = c;
            }
        }
        MapKind::JoukowskiEllipse { c } => {
            let mut power = Complex64::new(1.0, 0.0);
            for k in (1..=order).step_by(2) {
                coeffs[k] = power;
                power *= c;
            }
        }
        MapKind::RawSeries => unreachable!("raw series have no closed form"),
    }
    PowerSeries::new(coeffs)
}

pub(crate) fn pre_schwarzian_of(series: &PowerSeries) -> Result<PowerSeries> {
    if series.order() < 2 {
        return Err(Error::InvalidMap("series too short for a pre-Schwarzian".into()));
    }
    let d1 = series.derivative();
    let lead = d1.coeff(0).norm();
    if lead < DERIVATIVE_EPS {
        return Err(Error::DegenerateDerivative(lead));
    }
    let d2 = d1.derivative();
    Ok(d2.mul(&d1.reciprocal_with(DERIVATIVE_EPS)?))
}

pub(crate) fn schwarzian_of(series: &PowerSeries) -> Result<PowerSeries> {
    if series.order() < 3 {
        return Err(Error::InvalidMap("series too short for a Schwarzian".into()));
    }
    let psi = pre_schwarzian_of(series)?;
    Ok(psi.derivative().sub(&psi.mul(&psi).scale(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let f = ConformalMapModel::affine_disk(cx(0.0, 0.0), 1.0).unwrap();
        assert_eq!(f.evaluate(cx(0.5, 0.0)).unwrap(), cx(0.5, 0.0));
        let f = ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.1, 0.0)).unwrap();
        assert!((f.evaluate(cx(1.0, 0.0)).unwrap() - cx(1.1, 0.0)).norm() < 1e-15);
        let f = ConformalMapModel::quadratic(cx(2.0, 0.0), cx(0.25, 0.0)).unwrap();
        assert!((f.evaluate(cx(0.0, 1.0)).unwrap() - cx(1.75, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_outside_disk_fails() {
        let f = ConformalMapModel::affine_disk(cx(0.0, 0.0), 1.0).unwrap();
        assert!(matches!(f.evaluate(cx(1.1, 0.0)), Err(Error::OutsideDisk { .. })));
        assert!(f.evaluate(cx(1.0 + 1e-13, 0.0)).is_ok());
    }

    #[test]
    fn parameter_ranges_enforced() {
        assert!(ConformalMapModel::affine_disk(cx(0.0, 0.0), 0.0).is_err());
        assert!(ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.5, 0.0)).is_err());
        assert!(ConformalMapModel::joukowski_ellipse(cx(0.0, 0.0), cx(0.0, 1.0)).is_err());
        let bad = PowerSeries::from_real(&[1.0, 1.0]);
        assert!(ConformalMapModel::raw_series(cx(0.0, 0.0), bad, false).is_err());
        let flat = PowerSeries::from_real(&[0.0, 0.0, 1.0]);
        assert!(matches!(
            ConformalMapModel::raw_series(cx(0.0, 0.0), flat, false),
            Err(Error::DegenerateDerivative(_))
        ));
    }

    #[test]
    fn closed_forms_agree_with_series() {
        let maps = [
            ConformalMapModel::affine_disk(cx(1.0, -1.0), 0.7).unwrap(),
            ConformalMapModel::quadratic(cx(0.0, 2.0), cx(0.2, 0.1)).unwrap(),
            ConformalMapModel::joukowski_ellipse(cx(-1.0, 0.0), cx(0.3, -0.2)).unwrap(),
        ];
        for f in &maps {
            for &z in &[cx(0.3, 0.4), cx(-0.9, 0.1), cx(0.0, -0.95)] {
                let series_value = f.center() + f.series().evaluate(z);
                assert!((series_value - f.evaluate(z).unwrap()).norm() < 1e-13, "{:?}", f.kind());
                let series_deriv = f.series().derivative().evaluate(z);
                assert!((series_deriv - f.derivative_at(z).unwrap()).norm() < 1e-12, "{:?}", f.kind());
            }
        }
    }

    #[test]
    fn schwarzian_examples() {
        let f = ConformalMapModel::affine_disk(cx(3.0, 0.0), 2.0).unwrap();
        assert!(f.schwarzian().unwrap().max_abs() == 0.0);
        let c = cx(0.2, -0.1);
        let f = ConformalMapModel::quadratic(cx(0.0, 0.0), c).unwrap();
        let s = f.schwarzian().unwrap();
        assert!((s.coeff(0) - c * c * -6.0).norm() < 1e-15);
        assert_eq!(s.order(), DEFAULT_MAP_ORDER - 3);
    }

    #[test]
    fn schwarzian_rejects_flat_series() {
        assert!(matches!(
            schwarzian_of(&PowerSeries::from_real(&[0.0, 0.0, 1.0, 1.0])),
            Err(Error::DegenerateDerivative(_))
        ));
    }

    #[test]
    fn joukowski_boundary_is_an_inverted_ellipse() {
        let c = 0.4;
        let f = ConformalMapModel::joukowski_ellipse(cx(0.0, 0.0), cx(c, 0.0)).unwrap();
        for w in f.boundary_samples(64) {
            let e = w.inv();
            let lhs = (e.re / (1.0 - c)).powi(2) + (e.im / (1.0 + c)).powi(2);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }
}
