use num_complex::Complex64;

use super::model::ConformalMapModel;
use crate::error::Result;
use crate::power_series::PowerSeries;

/// Complex line `t ↦ (q0 + q_slope·t, ψ⁰ + t φ)` in pre-Schwarzian
/// coordinates `g ↦ (g'(0), g''/g')`, translated to `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct PreSchwarzianFamily {
    pub base_psi: PowerSeries,
    pub direction_phi: PowerSeries,
    pub q0: Complex64,
    pub q_slope: Complex64,
    pub center: Complex64,
}

impl PreSchwarzianFamily {
    /// Family through `base`; `phi` is read as a polynomial and padded to
    /// the order of the base pre-Schwarzian.
    pub fn through(base: &ConformalMapModel, phi: &[Complex64], q_slope: Complex64) -> Result<Self> {
        let base_psi = base.pre_schwarzian()?;
        let order = base_psi.order();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        for (slot, &c) in coeffs.iter_mut().zip(phi) {
            *slot = c;
        }
        Ok(Self {
            base_psi,
            direction_phi: PowerSeries::new(coeffs),
            q0: base.dprime0(),
            q_slope,
            center: base.center(),
        })
    }

    pub fn q(&self, t: Complex64) -> Complex64 {
        self.q0 + self.q_slope * t
    }

    pub fn psi(&self, t: Complex64) -> PowerSeries {
        self.base_psi.add(&self.direction_phi.scale_complex(t))
    }
}

/// Solves `g''/g' = ψ⁰ + tφ`, `g(0) = 0`, `g'(0) = q(t)` as
/// `g' = q(t)·exp(∫ψ)`, `g = ∫g'`, and returns `center + g`.
///
/// Univalence is not certified; callers revalidate the rigging.
pub fn solve_pre_schwarzian(family: &PreSchwarzianFamily, t: Complex64) -> Result<ConformalMapModel> {
    let psi = family.psi(t);
    let dg = psi.antiderivative().exp()?.scale_complex(family.q(t));
    ConformalMapModel::raw_series(family.center, dg.antiderivative(), false)
}
