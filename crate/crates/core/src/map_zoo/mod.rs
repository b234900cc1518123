//! Disk maps, riggings, Moebius transforms and pre-Schwarzian families.

mod family;
mod mobius;
mod model;
mod rigging;

pub use family::{solve_pre_schwarzian, PreSchwarzianFamily};
pub use mobius::MobiusTransform;
pub use model::{ConformalMapModel, MapKind, ZooEntry, DEFAULT_MAP_ORDER, ZOO_CATALOG};
pub use rigging::{
    post_compose_mobius, validate_rigging, validate_rigging_with, Rigging, DEFAULT_MARGIN_THRESHOLD,
    DEFAULT_SAMPLES,
};

use crate::error::Result;
use crate::power_series::PowerSeries;

/// Schwarzian derivative series of `map`.
pub fn schwarzian(map: &ConformalMapModel) -> Result<PowerSeries> {
    map.schwarzian()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zoo() -> Vec<ConformalMapModel> {
        vec![
            ConformalMapModel::affine_disk(cx(0.5, -0.2), 0.8).unwrap(),
            ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.25, 0.1)).unwrap(),
            ConformalMapModel::joukowski_ellipse(cx(-0.3, 0.4), cx(0.4, -0.3)).unwrap(),
        ]
    }

    #[test]
    fn identity_mobius_is_coefficient_noop() {
        for f in zoo() {
            let r = Rigging::uncertified(vec![f.clone()]);
            let out = post_compose_mobius(&r, &MobiusTransform::identity()).unwrap();
            assert!(out.map(0).series().max_diff(f.series()) <= 1e-14);
            // −I is the identity on the sphere but takes the series path.
            let t = MobiusTransform::new(cx(-1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0)).unwrap();
            assert!(!t.is_identity());
            let out = post_compose_mobius(&r, &t).unwrap();
            assert!(out.map(0).series().max_diff(f.series()) <= 1e-14);
        }
    }

    #[test]
    fn schwarzian_is_mobius_invariant() {
        let transforms = [
            MobiusTransform::dilation(cx(2.0, 1.0)).unwrap(),
            MobiusTransform::translation(cx(-4.0, 3.0)),
            MobiusTransform::inversion().compose(&MobiusTransform::translation(cx(-5.0, 0.0))),
            MobiusTransform::new(cx(1.0, 0.5), cx(0.2, 0.0), cx(0.1, -0.1), cx(1.0, 0.0)).unwrap(),
        ];
        for f in zoo() {
            let s = schwarzian(&f).unwrap();
            for t in &transforms {
                let r = Rigging::uncertified(vec![f.clone()]);
                let g = post_compose_mobius(&r, t).unwrap();
                let sg = schwarzian(g.map(0)).unwrap();
                let d = sg.max_diff(&s);
                assert!(d <= 1e-10, "{:?} under {:?}: {d:e}", f.kind(), t);
            }
        }
    }
}
