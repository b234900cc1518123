//! Normalized period data, Moebius invariance, holomorphic dependence on a
//! pre-Schwarzian line, and recovery of 2-jets from kernel data.
//!
//! Normalization conventions, by number of maps:
//!
//! * `n ≥ 3`: `p₁ = 0`, `p₂ = 1`, `p₃ = −1`;
//! * `n = 2`: `p₁ = 0`, `p₂ = 1`, `f₁'(0) = 1`;
//! * `n = 1`: `p₁ = 0`, `f₁'(0) = 1`, `f₁''(0) = 0`.
//!
//! Each fixes the three complex parameters of a Moebius map.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grunsky::{assemble, GrunskyOperator, OperatorEnvelope, Route};
use crate::map_zoo::{
    post_compose_mobius, solve_pre_schwarzian, MobiusTransform, PreSchwarzianFamily, Rigging, DEFAULT_SAMPLES,
};

pub const DEFAULT_DELTA: f64 = 1e-2;

/// Relative tolerance on `x_i x_j = P_ij` for pairs not used to solve for `x`.
pub const PRODUCT_TOLERANCE: f64 = 1e-6;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Centers fixed by the normalization for `n` maps.
pub fn conventional_centers(n: usize) -> Vec<Complex64> {
    [cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0)].into_iter().take(n.min(3)).collect()
}

/// Moebius map realizing the normalization, followed by the post-composed
/// rigging.
pub fn normalize_rigging(rigging: &Rigging) -> Result<(Rigging, MobiusTransform)> {
    let p = rigging.centers();
    let target = conventional_centers(p.len());
    let t = match p.len() {
        0 => return Err(Error::TooFewMaps { needed: 1, found: 0 }),
        1 => {
            // A(z) = (z − p₁)/f'(0) gives g = A∘f with g'(0) = 1; then
            // w ↦ w/(1 + αw) subtracts α from the z² coefficient.
            let f = rigging.map(0);
            let a = MobiusTransform::new(cx(1.0, 0.0), -p[0], cx(0.0, 0.0), f.dprime0())?;
            let alpha = f.dsecond0() / (f.dprime0() * 2.0);
            let l = MobiusTransform::new(cx(1.0, 0.0), cx(0.0, 0.0), alpha, cx(1.0, 0.0))?;
            l.compose(&a)
        }
        2 => {
            if (p[1] - p[0]).norm() < 1e-12 {
                return Err(Error::DegenerateCenters(0, 1));
            }
            // S(z) = (z − p₁)/(p₂ − p₁), then w ↦ w / (λ + (1 − λ) w) keeps 0
            // and 1 fixed and rescales the derivative at 0 by 1/λ.
            let s = MobiusTransform::new(cx(1.0, 0.0), -p[0], cx(0.0, 0.0), p[1] - p[0])?;
            let lambda = rigging.map(0).dprime0() / (p[1] - p[0]);
            let l = MobiusTransform::new(cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0) - lambda, lambda)?;
            l.compose(&s)
        }
        _ => {
            if p[..3] == target[..] {
                MobiusTransform::identity()
            } else {
                MobiusTransform::from_three_points([p[0], p[1], p[2]], [target[0], target[1], target[2]])?
            }
        }
    };
    let moved = post_compose_mobius(rigging, &t)?;
    let mut centers = moved.centers();
    centers[..target.len()].copy_from_slice(&target);
    Ok((moved.with_centers(&centers), t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodDatum {
    /// Centers `p₄, …, pₙ` of the normalized rigging.
    pub normalized_centers: Vec<Complex64>,
    pub grunsky: GrunskyOperator,
    /// The normalizing transform applied to the input rigging.
    pub normalization: MobiusTransform,
}

impl PeriodDatum {
    /// All centers of the normalized rigging.
    pub fn centers(&self) -> Vec<Complex64> {
        let mut c = conventional_centers(self.grunsky.n());
        c.extend_from_slice(&self.normalized_centers);
        c
    }

    /// Largest difference in any center or matrix entry.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.normalized_centers.len() != other.normalized_centers.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} centers", self.normalized_centers.len()),
                found: format!("{} centers", other.normalized_centers.len()),
            });
        }
        let centers = self
            .normalized_centers
            .iter()
            .zip(&other.normalized_centers)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Ok(centers.max(self.grunsky.max_entry_diff(&other.grunsky)?))
    }

    pub fn to_json(&self, norm: Option<f64>) -> String {
        let env = PeriodEnvelope {
            normalized_centers: self.normalized_centers.clone(),
            operator: OperatorEnvelope::new(&self.grunsky, norm),
        };
        serde_json::to_string_pretty(&env).expect("envelope serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodEnvelope {
    pub normalized_centers: Vec<Complex64>,
    pub operator: OperatorEnvelope,
}

/// Normalizes `rigging` and assembles the operator of the result.
pub fn period(rigging: &Rigging, order: usize, route: Route) -> Result<PeriodDatum> {
    if !rigging.is_certified() {
        return Err(Error::RiggingNotCertified);
    }
    let (normalized, t) = normalize_rigging(rigging)?;
    let grunsky = assemble(&normalized, order, route)?;
    let normalized_centers = normalized.centers().into_iter().skip(3).collect();
    Ok(PeriodDatum {
        normalized_centers,
        grunsky,
        normalization: t,
    })
}

/// Largest entry-wise deviation between the series-route operators of
/// `rigging` and `T ∘ rigging`.
pub fn check_mobius_invariance(rigging: &Rigging, t: &MobiusTransform, order: usize) -> Result<f64> {
    let moved = post_compose_mobius(rigging, t)?;
    let a = assemble(rigging, order, Route::Series)?;
    let b = assemble(&moved, order, Route::Series)?;
    a.max_entry_diff(&b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResiduals {
    pub dprime: f64,
    pub dsecond: f64,
    pub schwarzian: f64,
}

/// Recovered jets. Values fixed by the normalization are reported as such.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub dprime: Vec<Complex64>,
    pub dsecond: Vec<Complex64>,
    pub schwarzian_at_zero: Vec<Complex64>,
    pub residuals: Option<RecoveryResiduals>,
}

/// Jet data read directly off the maps of a rigging.
#[derive(Debug, Clone, PartialEq)]
pub struct JetData {
    pub dprime: Vec<Complex64>,
    pub dsecond: Vec<Complex64>,
    pub schwarzian_at_zero: Vec<Complex64>,
}

impl JetData {
    pub fn of(rigging: &Rigging) -> Result<Self> {
        Ok(Self {
            dprime: rigging.maps().iter().map(|f| f.dprime0()).collect(),
            dsecond: rigging.maps().iter().map(|f| f.dsecond0()).collect(),
            schwarzian_at_zero: rigging
                .maps()
                .iter()
                .map(|f| f.schwarzian().map(|s| *s.coeff(0)))
                .collect::<Result<_>>()?,
        })
    }
}

fn max_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

impl RecoveryReport {
    /// Fills `residuals` against the jets of `normalized`.
    pub fn with_ground_truth(mut self, normalized: &Rigging) -> Result<Self> {
        let truth = JetData::of(normalized)?;
        if truth.dprime.len() != self.dprime.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} maps", self.dprime.len()),
                found: format!("{} maps", truth.dprime.len()),
            });
        }
        self.residuals = Some(RecoveryResiduals {
            dprime: max_gap(&self.dprime, &truth.dprime),
            dsecond: max_gap(&self.dsecond, &truth.dsecond),
            schwarzian: max_gap(&self.schwarzian_at_zero, &truth.schwarzian_at_zero),
        });
        Ok(self)
    }
}

/// Reconstructs `f_i'(0)`, `f_i''(0)` and `S(f_i)(0)` of the normalized
/// rigging from its operator and the centers `p₄, …, pₙ`.
pub fn recover_jets(op: &GrunskyOperator, normalized_centers: &[Complex64]) -> Result<RecoveryReport> {
    let n = op.n();
    let expected = n.saturating_sub(3);
    if normalized_centers.len() != expected {
        return Err(Error::ShapeMismatch {
            expected: format!("{expected} normalized centers"),
            found: format!("{}", normalized_centers.len()),
        });
    }
    let mut p = conventional_centers(n);
    p.extend_from_slice(normalized_centers);

    // k_{nm} = −√((n+1)(m+1)) M[n, m]
    let k = |j: usize, i: usize, a: usize, b: usize| -> Complex64 {
        -op.block(j, i).matrix[(a, b)] * (((a + 1) * (b + 1)) as f64).sqrt()
    };
    let schwarzian_at_zero: Vec<Complex64> = (0..n).map(|i| k(i, i, 0, 0) * 6.0).collect();
    if n == 1 {
        return Ok(RecoveryReport {
            dprime: vec![cx(1.0, 0.0)],
            dsecond: vec![cx(0.0, 0.0)],
            schwarzian_at_zero,
            residuals: None,
        });
    }
    if op.order() < 2 {
        return Err(Error::OrderTooSmall {
            min: 2,
            got: op.order(),
        });
    }

    // P_ij = k^{(ji)}_{00} (p_i − p_j)² = f_i'(0) f_j'(0)
    let product = |i: usize, j: usize| {
        let d = p[i] - p[j];
        k(j, i, 0, 0) * d * d
    };
    // f_j''(0) from block (j, i):
    // k^{(ji)}_{10} = x_i [f_j''/Δ² + 2 x_j²/Δ³], Δ = p_i − p_j
    let second = |x: &[Complex64], j: usize, i: usize| {
        let d = p[i] - p[j];
        d * d * k(j, i, 1, 0) / x[i] - x[j] * x[j] * 2.0 / d
    };
    let estimates = |x: &[Complex64]| -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|j| (0..n).filter(|&i| i != j).map(|i| second(x, j, i)).collect())
            .collect()
    };

    let x: Vec<Complex64> = if n == 2 {
        vec![cx(1.0, 0.0), product(0, 1)]
    } else {
        let x1 = (product(0, 1) * product(0, 2) / product(1, 2)).sqrt();
        let mut x = vec![x1];
        x.extend((1..n).map(|i| product(0, i) / x1));
        let mut worst: f64 = 0.0;
        for i in 1..n {
            for j in i + 1..n {
                let pij = product(i, j);
                let scale = pij.norm().max((x[i] * x[j]).norm()).max(f64::MIN_POSITIVE);
                worst = worst.max((x[i] * x[j] - pij).norm() / scale);
            }
        }
        if !worst.is_finite() || worst > PRODUCT_TOLERANCE {
            return Err(Error::InconsistentProducts(worst));
        }
        // The common sign of x is the one for which every source block
        // yields the same f_j''(0); the other sign gives −f'' − 4x_j²/Δ,
        // which depends on the source through Δ.
        let flipped: Vec<Complex64> = x.iter().map(|v| -v).collect();
        if spread(&estimates(&flipped)) < spread(&estimates(&x)) {
            flipped
        } else {
            x
        }
    };
    let dsecond = estimates(&x)
        .iter()
        .map(|e| e.iter().sum::<Complex64>() / e.len() as f64)
        .collect();
    Ok(RecoveryReport {
        dprime: x,
        dsecond,
        schwarzian_at_zero,
        residuals: None,
    })
}

fn spread(estimates: &[Vec<Complex64>]) -> f64 {
    estimates
        .iter()
        .flat_map(|e| e.iter().map(move |a| (a - e[0]).norm()))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub h: f64,
    /// Largest entry-wise Cauchy–Riemann defect.
    pub residual: f64,
    /// Largest entry of the real-direction difference quotient.
    pub scale: f64,
    /// Defect per block, target-major.
    pub per_block: Vec<f64>,
}

/// Cauchy–Riemann defect of `t ↦ G(t)` at `t = 0`, where map `j` of
/// `rigging` is replaced by the family member at `t`. Steps are
/// `h = delta/2` in the real and imaginary directions; every member with
/// `|t| = delta` along those directions is revalidated first.
pub fn holomorphy_probe(
    j: usize,
    rigging: &Rigging,
    family: &PreSchwarzianFamily,
    delta: f64,
    order: usize,
) -> Result<ProbeResult> {
    if j >= rigging.n() {
        return Err(Error::IndexOutOfRange { index: j, n: rigging.n() });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let member = |t: Complex64| -> Result<Rigging> { rigging.with_map(j, solve_pre_schwarzian(family, t)?, DEFAULT_SAMPLES) };
    let directions = [cx(1.0, 0.0), cx(-1.0, 0.0), cx(0.0, 1.0), cx(0.0, -1.0)];
    for dir in directions {
        member(dir * delta)?;
    }
    let h = delta / 2.0;
    let ops = directions
        .par_iter()
        .map(|&dir| member(dir * h).and_then(|r| assemble(&r, order, Route::Series)))
        .collect::<Result<Vec<_>>>()?;

    let n = rigging.n();
    let two_h = cx(2.0 * h, 0.0);
    let two_ih = cx(0.0, 2.0 * h);
    let mut per_block = Vec::with_capacity(n * n);
    let mut scale: f64 = 0.0;
    for b in 0..n * n {
        let (bj, bi) = (b / n, b % n);
        let [gp, gm, gip, gim] = [0, 1, 2, 3].map(|k| &ops[k].block(bj, bi).matrix);
        let real = (gp - gm).map(|c| c / two_h);
        let imag = (gip - gim).map(|c| c / two_ih);
        scale = real.iter().map(|c| c.norm()).fold(scale, f64::max);
        per_block.push((real - imag).iter().map(|c| c.norm()).fold(0.0, f64::max));
    }
    Ok(ProbeResult {
        h,
        residual: per_block.iter().copied().fold(0.0, f64::max),
        scale,
        per_block,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeStudy {
    pub coarse: ProbeResult,
    pub fine: ProbeResult,
    /// `coarse.residual / fine.residual`.
    pub ratio: f64,
    /// `log₂ ratio`; close to 2 for holomorphic dependence.
    pub observed_order: f64,
}

/// Runs the probe at `delta` and `delta/2`.
pub fn holomorphy_study(
    j: usize,
    rigging: &Rigging,
    family: &PreSchwarzianFamily,
    delta: f64,
    order: usize,
) -> Result<ProbeStudy> {
    let coarse = holomorphy_probe(j, rigging, family, delta, order)?;
    let fine = holomorphy_probe(j, rigging, family, delta / 2.0, order)?;
    let ratio = coarse.residual / fine.residual;
    Ok(ProbeStudy {
        observed_order: ratio.log2(),
        coarse,
        fine,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map_zoo::{validate_rigging, ConformalMapModel};

    fn rig(maps: Vec<ConformalMapModel>) -> Rigging {
        validate_rigging(maps, 256).unwrap()
    }

    fn affine(p: Complex64, r: f64) -> ConformalMapModel {
        ConformalMapModel::affine_disk(p, r).unwrap()
    }

    #[test]
    fn already_normalized_triple_is_fixed() {
        let r = rig(vec![
            affine(cx(0.0, 0.0), 0.3),
            affine(cx(1.0, 0.0), 0.3),
            affine(cx(-1.0, 0.0), 0.3),
        ]);
        let (out, t) = normalize_rigging(&r).unwrap();
        assert!(t.is_identity());
        assert_eq!(out, r);
    }

    #[test]
    fn symmetric_triple_normalizes_by_scaling() {
        let r = rig(vec![
            affine(cx(0.0, 0.0), 1.0),
            affine(cx(2.0, 0.0), 0.5),
            affine(cx(-2.0, 0.0), 0.5),
        ]);
        let (out, t) = normalize_rigging(&r).unwrap();
        assert_eq!(out.centers(), conventional_centers(3));
        // T(z) = z/2
        assert!((t.apply(cx(0.6, 0.2)).unwrap() - cx(0.3, 0.1)).norm() < 1e-15);
        assert!((out.map(0).dprime0() - cx(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn two_map_normalization() {
        let r = rig(vec![
            ConformalMapModel::quadratic(cx(1.0, 1.0), cx(0.2, 0.0)).unwrap(),
            affine(cx(5.0, -2.0), 1.0),
        ]);
        let (out, _) = normalize_rigging(&r).unwrap();
        assert_eq!(out.centers(), conventional_centers(2));
        assert!((out.map(0).dprime0() - cx(1.0, 0.0)).norm() < 1e-14);


        // z/(1 + z²/2) reaches only 2/3 along the positive axis.
        let already = rig(vec![
            ConformalMapModel::joukowski_ellipse(cx(0.0, 0.0), cx(-0.5, 0.0)).unwrap(),
            affine(cx(1.0, 0.0), 0.2),
        ]);
        let (out, t) = normalize_rigging(&already).unwrap();
        assert!(t.is_identity());
        assert_eq!(out, already);
    }

    #[test]
    fn single_map_normalization_fixes_two_jet() {
        let r = rig(vec![ConformalMapModel::joukowski_ellipse(cx(1.0, -1.0), cx(0.2, 0.1)).unwrap()]);
        let (out, _) = normalize_rigging(&r).unwrap();
        let f = out.map(0);
        assert_eq!(f.center(), cx(0.0, 0.0));
        assert!((f.dprime0() - cx(1.0, 0.0)).norm() < 1e-15);
        assert!(f.dsecond0().norm() < 1e-15);

        let q = rig(vec![ConformalMapModel::quadratic(cx(2.0, 0.0), cx(0.3, 0.0)).unwrap()]);
        let datum = period(&q, 8, Route::Series).unwrap();
        let (normalized, _) = normalize_rigging(&q).unwrap();
        let report = recover_jets(&datum.grunsky, &[]).unwrap().with_ground_truth(&normalized).unwrap();
        let res = report.residuals.unwrap();
        assert!(res.dprime < 1e-14 && res.dsecond < 1e-14 && res.schwarzian < 1e-12, "{res:?}");
        assert!((report.schwarzian_at_zero[0] + cx(6.0 * 0.09, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn affine_pair_products() {
        let r = rig(vec![affine(cx(0.0, 0.0), 1.0), affine(cx(3.0, 0.0), 1.0)]);
        let op = assemble(&r, 4, Route::Series).unwrap();
        // Read the pair product directly, without normalizing.
        let k00 = -op.block(1, 0).matrix[(0, 0)];
        assert!((k00 * 9.0 - cx(1.0, 0.0)).norm() < 1e-15);
        let report = recover_jets(&op, &[]).unwrap();
        assert!(report.schwarzian_at_zero.iter().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn round_trip_on_triple_with_quadratic() {
        let r = rig(vec![
            ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.2, 0.0)).unwrap(),
            affine(cx(3.0, 0.0), 1.0),
            ConformalMapModel::joukowski_ellipse(cx(-3.0, 0.0), cx(0.2, 0.1)).unwrap(),
            affine(cx(0.0, 3.0), 0.7),
        ]);
        let datum = period(&r, 16, Route::Series).unwrap();
        assert_eq!(datum.normalized_centers.len(), 1);
        let (normalized, _) = normalize_rigging(&r).unwrap();
        let report = recover_jets(&datum.grunsky, &datum.normalized_centers)
            .unwrap()
            .with_ground_truth(&normalized)
            .unwrap();
        let res = report.residuals.unwrap();
        assert!(res.dprime < 1e-10, "{res:?}");
        assert!(res.dsecond < 1e-10, "{res:?}");
        assert!(res.schwarzian < 1e-10, "{res:?}");
        // Normalization here is z/3: f''(0) scales by 1/3.
        let d2 = report.dsecond[0];
        assert!((d2 - cx(0.4 / 3.0, 0.0)).norm() < 1e-10);
        assert!((report.schwarzian_at_zero[0] + cx(0.24, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn corrupted_products_are_rejected() {
        let r = rig(vec![
            affine(cx(0.0, 0.0), 1.0),
            affine(cx(3.0, 0.0), 1.0),
            affine(cx(-3.0, 0.0), 1.0),
            affine(cx(0.0, 3.0), 1.0),
        ]);
        let datum = period(&r, 4, Route::Series).unwrap();
        let mut blocks = datum.grunsky.blocks().to_vec();
        blocks[3 * 4 + 2].matrix[(0, 0)] *= 1.5;
        blocks[2 * 4 + 3].matrix[(0, 0)] *= 1.5;
        let bad = GrunskyOperator::from_blocks(4, 4, Route::Series, blocks).unwrap();
        assert!(matches!(
            recover_jets(&bad, &datum.normalized_centers),
            Err(Error::InconsistentProducts(_))
        ));
    }

    #[test]
    fn invariance_under_identity_is_exact() {
        let r = rig(vec![affine(cx(0.0, 0.0), 1.0), affine(cx(3.0, 0.0), 1.0)]);
        assert_eq!(check_mobius_invariance(&r, &MobiusTransform::identity(), 8).unwrap(), 0.0);
    }

    #[test]
    fn constant_family_has_zero_residual() {
        let base = ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.2, 0.0)).unwrap();
        let r = rig(vec![base.clone(), affine(cx(3.0, 0.0), 1.0)]);
        let family = PreSchwarzianFamily::through(&base, &[], cx(0.0, 0.0)).unwrap();
        let probe = holomorphy_probe(0, &r, &family, DEFAULT_DELTA, 8).unwrap();
        assert_eq!(probe.residual, 0.0);
    }

    #[test]
    fn scaling_family_leaves_diagonal_blocks_fixed() {
        let base = ConformalMapModel::quadratic(cx(0.0, 0.0), cx(0.2, 0.0)).unwrap();
        let r = rig(vec![base.clone(), affine(cx(3.0, 0.0), 1.0)]);
        let family = PreSchwarzianFamily::through(&base, &[], cx(0.5, 0.0)).unwrap();
        let probe = holomorphy_probe(0, &r, &family, DEFAULT_DELTA, 8).unwrap();
        assert!(probe.per_block[0] <= 1e-10);
        assert!(probe.per_block[3] <= 1e-10);
    }
}
