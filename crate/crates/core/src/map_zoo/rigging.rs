use std::f64::consts::PI;

use num_complex::Complex64;

use super::mobius::MobiusTransform;
use super::model::{ConformalMapModel, MapKind, DEFAULT_MAP_ORDER};
use crate::error::{Error, Result};
use crate::power_series::PowerSeries;

/// Certified margins must exceed this.
pub const DEFAULT_MARGIN_THRESHOLD: f64 = 1e-3;

pub const DEFAULT_SAMPLES: usize = 256;

/// Boundary samples used for the pole-in-image test.
pub const POLE_SAMPLES: usize = 256;

/// Interior sample radii, shared across sample counts so that refining the
/// angular grid only adds points.
const INTERIOR_RADII: [f64; 8] = [0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875];

/// An ordered tuple of maps with disjoint image closures.
#[derive(Debug, Clone, PartialEq)]
pub struct Rigging {
    maps: Vec<ConformalMapModel>,
    disjointness_margin: f64,
    certified: bool,
}

impl Rigging {
    /// A rigging that has not been checked; blocks refuse to use it.
    pub fn uncertified(maps: Vec<ConformalMapModel>) -> Self {
        Self {
            maps,
            disjointness_margin: 0.0,
            certified: false,
        }
    }

    /// Same margin and certification, with map centers overwritten.
    /// Used to remove round-off from centers fixed by convention.
    pub(crate) fn with_centers(&self, centers: &[Complex64]) -> Self {
        let maps = self
            .maps
            .iter()
            .zip(centers)
            .map(|(f, &p)| f.translated_to(p))
            .collect();
        Self { maps, ..self.clone() }
    }

    pub fn maps(&self) -> &[ConformalMapModel] {
        &self.maps
    }

    pub fn map(&self, k: usize) -> &ConformalMapModel {
        &self.maps[k]
    }

    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn centers(&self) -> Vec<Complex64> {
        self.maps.iter().map(ConformalMapModel::center).collect()
    }

    /// Minimum sampled distance between images; infinite for a single map.
    pub fn disjointness_margin(&self) -> f64 {
        self.disjointness_margin
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// Replaces map `k` and revalidates with `samples` boundary points.
    pub fn with_map(&self, k: usize, map: ConformalMapModel, samples: usize) -> Result<Self> {
        if k >= self.n() {
            return Err(Error::IndexOutOfRange { index: k, n: self.n() });
        }
        let mut maps = self.maps.clone();
        maps[k] = map;
        validate_rigging(maps, samples)
    }
}

pub fn validate_rigging(maps: Vec<ConformalMapModel>, samples: usize) -> Result<Rigging> {
    validate_rigging_with(maps, samples, DEFAULT_MARGIN_THRESHOLD)
}

/// Certifies disjointness by sampling each boundary curve and a polar grid
/// of interior points, rejecting containment with an even-odd test.
pub fn validate_rigging_with(maps: Vec<ConformalMapModel>, samples: usize, threshold: f64) -> Result<Rigging> {
    if samples < 64 {
        return Err(Error::TooFewSamples(samples));
    }
    if maps.is_empty() {
        return Err(Error::TooFewMaps { needed: 1, found: 0 });
    }
    let n = maps.len();
    for i in 0..n {
        for j in i + 1..n {
            if (maps[i].center() - maps[j].center()).norm() < 1e-12 {
                return Err(Error::DegenerateCenters(i, j));
            }
        }
    }
    let boundaries: Vec<Vec<Complex64>> = maps.iter().map(|f| f.boundary_samples(samples)).collect();
    let interiors: Vec<Vec<Complex64>> = maps.iter().map(|f| interior_samples(f, samples)).collect();

    let mut margin = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let contained = boundaries[j].iter().any(|&q| inside(&boundaries[i], q))
                || boundaries[i].iter().any(|&q| inside(&boundaries[j], q))
                || inside(&boundaries[i], maps[j].center())
                || inside(&boundaries[j], maps[i].center());
            let pair = if contained {
                0.0
            } else {
                min_distance(&boundaries[i], &boundaries[j])
                    .min(min_distance(&boundaries[i], &interiors[j]))
                    .min(min_distance(&boundaries[j], &interiors[i]))
            };
            if pair <= threshold {
                return Err(Error::OverlappingImages { i, j, margin: pair });
            }
            margin = margin.min(pair);
        }
    }
    Ok(Rigging {
        maps,
        disjointness_margin: margin,
        certified: true,
    })
}

/// Replaces every map by `T ∘ f_i`. The result carries raw series; the
/// margin is re-measured, and certification carries over because a
/// Moebius map is a bijection of the sphere.
pub fn post_compose_mobius(rigging: &Rigging, t: &MobiusTransform) -> Result<Rigging> {
    if t.is_identity() {
        return Ok(rigging.clone());
    }
    let maps = rigging
        .maps
        .iter()
        .enumerate()
        .map(|(k, f)| compose_map(k, f, t))
        .collect::<Result<Vec<_>>>()?;
    let margin = if rigging.n() > 1 {
        match validate_rigging_with(maps.clone(), DEFAULT_SAMPLES, 0.0) {
            Ok(r) => r.disjointness_margin,
            Err(Error::OverlappingImages { .. }) => 0.0,
            Err(e) => return Err(e),
        }
    } else {
        f64::INFINITY
    };
    Ok(Rigging {
        maps,
        disjointness_margin: margin,
        certified: rigging.certified,
    })
}

fn compose_map(index: usize, f: &ConformalMapModel, t: &MobiusTransform) -> Result<ConformalMapModel> {
    if let Some(pole) = t.pole() {
        let boundary = f.boundary_samples(POLE_SAMPLES);
        let near = boundary.iter().any(|&b| (b - pole).norm() <= DEFAULT_MARGIN_THRESHOLD);
        if near || winding_number(&boundary, pole) != 0 {
            return Err(Error::PoleInImage(index));
        }
    }
    let order = match f.kind() {
        MapKind::RawSeries => f.series().order(),
        _ => DEFAULT_MAP_ORDER,
    };
    let g = f.series_to(order).expect("order within stored range");
    let [_, _, c, d] = t.coefficients();
    let p = f.center();
    let s = c * p + d;
    // T(p + g) − T(p) = g / (s (s + c g)) when ad − bc = 1.
    let denom = g.scale_complex(s * c).add(&PowerSeries::constant(s * s, order));
    let h = g.mul(&denom.reciprocal()?);
    let new_center = t.apply(p).ok_or(Error::PoleInImage(index))?;
    ConformalMapModel::raw_series(new_center, h, f.univalence_certified())
}

fn interior_samples(f: &ConformalMapModel, samples: usize) -> Vec<Complex64> {
    let mut out = vec![f.center()];
    for &r in &INTERIOR_RADII[1..] {
        out.extend(
            (0..samples).map(|k| f.value_unchecked(Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64))),
        );
    }
    out
}

fn min_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| (x - y).norm_sqr()))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

/// Even-odd ray casting against a closed polygon.
fn inside(polygon: &[Complex64], q: Complex64) -> bool {
    let mut crossings = false;
    let m = polygon.len();
    for k in 0..m {
        let a = polygon[k];
        let b = polygon[(k + 1) % m];
        if (a.im > q.im) != (b.im > q.im) {
            let x = a.re + (q.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if x > q.re {
                crossings = !crossings;
            }
        }
    }
    crossings
}

/// Winding number of a closed polygon around `q`.
pub(crate) fn winding_number(polygon: &[Complex64], q: Complex64) -> i64 {
    let m = polygon.len();
    let total: f64 = (0..m)
        .map(|k| ((polygon[(k + 1) % m] - q) / (polygon[k] - q)).arg())
        .sum();
    (total / (2.0 * PI)).round() as i64
}
