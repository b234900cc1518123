//! Independent route: evaluate the defining integrals numerically.
//!
//! For each outer node `z_q`, `u_m(z_q) = (1/π) ∬ K(z_q, ζ) R̂ẽ_m(ζ) dA_ζ`
//! with `R̂ẽ_m(ζ) = −√((m+1)/π) conj(ζ)^m`. The angular sum over each ring
//! of the inner rule is an FFT. The result is then projected onto `e_n`
//! with a second disk rule whose angular grid is rotated by half a step.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::GrunskyBlock;
use crate::bergman::{basis_scale, DiskQuadrature};
use crate::error::{Error, Result};
use crate::map_zoo::{ConformalMapModel, MapKind, Rigging};

/// Bessel-inequality slack before the projection is declared diverged.
pub const PROJECTION_TOLERANCE: f64 = 1e-6;

/// Pointwise kernel of one block, evaluated from closed forms where the
/// diagonal singularity can be removed by hand.
enum PointKernel<'a> {
    Off {
        source: &'a ConformalMapModel,
        target: &'a ConformalMapModel,
    },
    Zero,
    /// `−c² / (1 + c(z + ζ))²`
    Quadratic(Complex64),
    /// `c / (1 + c z ζ)²`
    Joukowski(Complex64),
    /// `f'(ζ) f'(z) / (f(ζ) − f(z))² − 1/(ζ − z)²`
    Generic(&'a ConformalMapModel),
}

/// Per-node data cached ahead of the double loop.
#[derive(Clone, Copy)]
struct NodeData {
    value: Complex64,
    deriv: Complex64,
    point: Complex64,
}

impl PointKernel<'_> {
    fn source_data(&self, zeta: Complex64) -> NodeData {
        let map = match self {
            PointKernel::Off { source, .. } => Some(*source),
            PointKernel::Generic(f) => Some(*f),
            _ => None,
        };
        node_data(map, zeta)
    }

    fn target_data(&self, z: Complex64) -> NodeData {
        let map = match self {
            PointKernel::Off { target, .. } => Some(*target),
            PointKernel::Generic(f) => Some(*f),
            _ => None,
        };
        node_data(map, z)
    }

    #[inline]
    fn eval(&self, z: &NodeData, zeta: &NodeData) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match self {
            PointKernel::Off { .. } => {
                let d = zeta.value - z.value;
                zeta.deriv * z.deriv / (d * d)
            }
            PointKernel::Zero => Complex64::new(0.0, 0.0),
            PointKernel::Quadratic(c) => {
                let w = one + c * (z.point + zeta.point);
                -(c * c) / (w * w)
            }
            PointKernel::Joukowski(c) => {
                let w = one + c * z.point * zeta.point;
                c / (w * w)
            }
            PointKernel::Generic(_) => {
                let d = zeta.value - z.value;
                let s = zeta.point - z.point;
                zeta.deriv * z.deriv / (d * d) - one / (s * s)
            }
        }
    }
}

fn node_data(map: Option<&ConformalMapModel>, p: Complex64) -> NodeData {
    match map {
        Some(f) => NodeData {
            value: f.value_unchecked(p),
            deriv: f.derivative_unchecked(p),
            point: p,
        },
        None => NodeData {
            value: p,
            deriv: Complex64::new(1.0, 0.0),
            point: p,
        },
    }
}

fn point_kernel<'a>(rigging: &'a Rigging, j: usize, i: usize) -> PointKernel<'a> {
    if i != j {
        return PointKernel::Off {
            source: rigging.map(i),
            target: rigging.map(j),
        };
    }
    let f = rigging.map(i);
    match *f.kind() {
        MapKind::AffineDisk { .. } => PointKernel::Zero,
        MapKind::Quadratic { c } => PointKernel::Quadratic(c),
        MapKind::JoukowskiEllipse { c } => PointKernel::Joukowski(c),
        MapKind::RawSeries => PointKernel::Generic(f),
    }
}

/// Block `(j, i)` by quadrature, with `quad` as the inner (`ζ`) rule.
pub fn block_quadrature(
    rigging: &Rigging,
    j: usize,
    i: usize,
    order: usize,
    quad: &DiskQuadrature,
) -> Result<GrunskyBlock> {
    if !rigging.is_certified() {
        return Err(Error::RiggingNotCertified);
    }
    let n = rigging.n();
    for index in [j, i] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if order == 0 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let kernel = point_kernel(rigging, j, i);
    if let PointKernel::Zero = kernel {
        return Ok(GrunskyBlock {
            j,
            i,
            matrix: DMatrix::zeros(order, order),
        });
    }

    let angular = quad.angular();
    if angular < 2 * order {
        return Err(Error::ResolutionTooLow {
            radial: quad.radial(),
            angular,
        });
    }
    let dtheta = 2.0 * PI / angular as f64;
    let zeta_data: Vec<NodeData> = quad.nodes().iter().map(|&p| kernel.source_data(p)).collect();

    // Outer rule: exact in r for degrees ≤ 2·order − 1, same angular count.
    let outer = DiskQuadrature::new(order.max(4), angular, PI / angular as f64)?;
    let z_data: Vec<NodeData> = outer.nodes().iter().map(|&p| kernel.target_data(p)).collect();

    // ring_factor[l][m] = −(1/π) √((m+1)/π) · w_l dθ · r_l^m · e^{−imφ}
    let ring_factor: Vec<Vec<Complex64>> = quad
        .radii()
        .iter()
        .zip(quad.radial_weights())
        .map(|(&r, &w)| {
            (0..order)
                .map(|m| {
                    Complex64::from_polar(1.0, -(m as f64) * quad.phase())
                        * (-basis_scale(m) / PI * w * dtheta * r.powi(m as i32))
                })
                .collect()
        })
        .collect();

    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(angular);

    // u[q][m] for every outer node.
    let columns: Vec<Vec<Complex64>> = z_data
        .par_iter()
        .map_init(
            || vec![Complex64::new(0.0, 0.0); angular],
            |buf, zq| {
                let mut u = vec![Complex64::new(0.0, 0.0); order];
                for (l, factors) in ring_factor.iter().enumerate() {
                    let ring = &zeta_data[l * angular..(l + 1) * angular];
                    for (slot, zeta) in buf.iter_mut().zip(ring) {
                        *slot = kernel.eval(zq, zeta);
                    }
                    fft.process(buf);
                    // buf[m] = Σ_k K(z, r e^{iθ_k}) e^{−i m θ_k}
                    for m in 0..order {
                        u[m] += buf[m] * factors[m];
                    }
                }
                u
            },
        )
        .collect();

    let mut matrix = DMatrix::<Complex64>::zeros(order, order);
    let mut column_norm_sq = vec![0.0; order];
    for ((zq, &w), u) in z_data.iter().zip(outer.weights()).zip(&columns) {
        let zbar = zq.point.conj();
        let mut power = Complex64::new(1.0, 0.0);
        for n in 0..order {
            let test = power * (basis_scale(n) * w);
            for m in 0..order {
                matrix[(n, m)] += test * u[m];
            }
            power *= zbar;
        }
        for m in 0..order {
            column_norm_sq[m] += w * u[m].norm_sqr();
        }
    }

    let mut residual: f64 = 0.0;
    for m in 0..order {
        let projected: f64 = (0..order).map(|n| matrix[(n, m)].norm_sqr()).sum();
        if !projected.is_finite() || !column_norm_sq[m].is_finite() {
            residual = f64::INFINITY;
            break;
        }
        residual = residual
            .max(projected - column_norm_sq[m])
            .max(column_norm_sq[m] - 1.0);
    }
    if residual > PROJECTION_TOLERANCE {
        return Err(Error::QuadratureDiverged { j, i, residual });
    }
    Ok(GrunskyBlock { j, i, matrix })
}
