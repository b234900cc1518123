//! Taylor coefficients of the block kernels by nested series arithmetic.
//!
//! For `i ≠ j` the kernel of block `(j, i)` is
//! `K(z, ζ) = f_i'(ζ) f_j'(z) / (f_i(ζ) − f_j(z))²`; for `i = j` it is
//! `∂²/∂z∂ζ log[(f(ζ) − f(z)) / (ζ − z)]`, i.e. the same expression with
//! the `1/(ζ − z)²` singularity removed. Both are holomorphic on a
//! neighbourhood of the closed bidisk.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::map_zoo::{ConformalMapModel, Rigging};
use crate::power_series::{Bivariate, PowerSeries, SeriesError};

/// `table[n][m]` is the coefficient of `zⁿ ζᵐ`.
pub type KernelTable = Vec<Vec<Complex64>>;

/// Kernel coefficients `k_{nm}` for `n, m < order`.
pub fn kernel_coefficients(rigging: &Rigging, j: usize, i: usize, order: usize) -> Result<KernelTable> {
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
    let ill = |source: SeriesError| Error::SeriesIllConditioned { j, i, source };
    if i == j {
        diagonal_kernel(rigging.map(i), i, order).map_err(|e| match e {
            Error::Series(s) => ill(s),
            other => other,
        })
    } else {
        off_diagonal_kernel(rigging.map(j), j, rigging.map(i), i, order).map_err(|e| match e {
            Error::Series(s) => ill(s),
            other => other,
        })
    }
}

fn series_of(map: &ConformalMapModel, index: usize, order: usize) -> Result<PowerSeries> {
    map.series_to(order).ok_or(Error::InsufficientSeriesOrder {
        index,
        needed: order,
        available: map.max_order().unwrap_or(0),
    })
}

fn off_diagonal_kernel(
    target: &ConformalMapModel,
    j: usize,
    source: &ConformalMapModel,
    i: usize,
    order: usize,
) -> Result<KernelTable> {
    let deg = order - 1;
    let gj = series_of(target, j, order)?;
    let gi = series_of(source, i, order)?;

    // D(z, ζ) = (p_i − p_j) + g_i(ζ) − g_j(z), outer variable z.
    let mut outer: Vec<PowerSeries> = Vec::with_capacity(deg + 1);
    let mut d0 = gi.truncate(deg).into_coeffs();
    d0[0] += source.center() - target.center();
    outer.push(PowerSeries::new(d0));
    for k in 1..=deg {
        outer.push(PowerSeries::constant(-gj.coeff(k), deg));
    }
    let d: Bivariate = PowerSeries::new(outer);
    let r = d.reciprocal()?;

    let dj = gj.derivative().lift_outer(deg);
    let di = gi.derivative().lift_inner(deg);
    let k = dj.mul(&di).mul(&r.mul(&r));
    Ok(table_of(&k, order))
}

fn diagonal_kernel(map: &ConformalMapModel, index: usize, order: usize) -> Result<KernelTable> {
    // Q(z, ζ) = (f(ζ) − f(z)) / (ζ − z) = Σ_k a_k Σ_{l+m=k−1} z^l ζ^m,
    // so q_{lm} = a_{l+m+1}. ∂_z∂_ζ log Q needs Q through degree `order`.
    let a = series_of(map, index, 2 * order + 1)?;
    let q: Bivariate = PowerSeries::new(
        (0..=order)
            .map(|l| PowerSeries::new((0..=order).map(|m| *a.coeff(l + m + 1)).collect()))
            .collect(),
    );
    let qz = q.derivative();
    let log_z = qz.mul(&q.truncate(order - 1).reciprocal()?);
    let k: Bivariate = PowerSeries::new(log_z.coeffs().iter().map(PowerSeries::derivative).collect());
    Ok(table_of(&k, order))
}

fn table_of(k: &Bivariate, order: usize) -> KernelTable {
    (0..order)
        .map(|n| (0..order).map(|m| *k.coeff(n).coeff(m)).collect())
        .collect()
}
