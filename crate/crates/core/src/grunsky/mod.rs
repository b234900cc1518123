//! Block matrices of the Grunsky operator in the orthonormal Bergman bases.
//!
//! Block `(j, i)` maps the source space of map `i` to the target space of
//! map `j`. Its entry `M[n, m]` is the coefficient of `e_n` in the image of
//! `ẽ_m`, for `n, m < N`. The flattened matrix places block `(j, i)` at rows
//! `j·N..(j+1)·N` and columns `i·N..(i+1)·N`.

mod export;
mod kernel;
mod quadrature;

pub use export::{operator_from_json, to_csv, to_json, BlockRecord, OperatorEnvelope};
pub use kernel::{kernel_coefficients, KernelTable};
pub use quadrature::{block_quadrature, PROJECTION_TOLERANCE};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::{build_quadrature, DiskQuadrature, DEFAULT_ANGULAR, DEFAULT_RADIAL};
use crate::error::{Error, Result};
use crate::map_zoo::Rigging;

/// Largest flattened dimension handled by a full singular value decomposition.
pub const SVD_LIMIT: usize = 512;
pub const POWER_ITERATION_CAP: usize = 20_000;
pub const POWER_ITERATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    #[default]
    Series,
    Quadrature,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::Quadrature => "quadrature",
        }
    }
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Route::Series),
            "quadrature" => Ok(Route::Quadrature),
            other => Err(Error::InvalidArgument(format!("unknown route `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyBlock {
    /// Target index.
    pub j: usize,
    /// Source index.
    pub i: usize,
    pub matrix: DMatrix<Complex64>,
}

impl GrunskyBlock {
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyOperator {
    n: usize,
    order: usize,
    route: Route,
    blocks: Vec<GrunskyBlock>,
}

impl GrunskyOperator {
    /// Builds an operator from blocks listed target-major. Shapes are checked.
    pub fn from_blocks(n: usize, order: usize, route: Route, blocks: Vec<GrunskyBlock>) -> Result<Self> {
        if blocks.len() != n * n {
            return Err(Error::ShapeMismatch {
                expected: format!("{} blocks", n * n),
                found: format!("{} blocks", blocks.len()),
            });
        }
        for (k, b) in blocks.iter().enumerate() {
            if (b.j, b.i) != (k / n, k % n) {
                return Err(Error::ShapeMismatch {
                    expected: format!("block ({}, {})", k / n, k % n),
                    found: format!("block ({}, {})", b.j, b.i),
                });
            }
            if b.matrix.shape() != (order, order) {
                return Err(Error::ShapeMismatch {
                    expected: format!("{order}x{order}"),
                    found: format!("{}x{}", b.matrix.nrows(), b.matrix.ncols()),
                });
            }
        }
        Ok(Self {
            n,
            order,
            route,
            blocks,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn blocks(&self) -> &[GrunskyBlock] {
        &self.blocks
    }

    pub fn block(&self, j: usize, i: usize) -> &GrunskyBlock {
        &self.blocks[j * self.n + i]
    }

    pub fn dimension(&self) -> usize {
        self.n * self.order
    }

    pub fn flatten(&self) -> DMatrix<Complex64> {
        let big = self.dimension();
        let mut m = DMatrix::zeros(big, big);
        for b in &self.blocks {
            m.view_mut((b.j * self.order, b.i * self.order), (self.order, self.order))
                .copy_from(&b.matrix);
        }
        m
    }

    /// The leading `order × order` sub-block of every block.
    pub fn compress(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order {
            return Err(Error::InvalidArgument(format!(
                "cannot compress order {} to {order}",
                self.order
            )));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| GrunskyBlock {
                j: b.j,
                i: b.i,
                matrix: b.matrix.view((0, 0), (order, order)).into_owned(),
            })
            .collect();
        Ok(Self {
            n: self.n,
            order,
            route: self.route,
            blocks,
        })
    }

    /// `max |M − Mᵀ|` over the flattened matrix.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.flatten();
        let t = m.transpose();
        (m - t).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise modulus of the difference with `other`.
    pub fn max_entry_diff(&self, other: &Self) -> Result<f64> {
        if (self.n, self.order) != (other.n, other.order) {
            return Err(Error::ShapeMismatch {
                expected: format!("n={}, N={}", self.n, self.order),
                found: format!("n={}, N={}", other.n, other.order),
            });
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .flat_map(|(a, b)| a.matrix.iter().zip(b.matrix.iter()).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(GrunskyBlock::max_abs).fold(0.0, f64::max)
    }
}

/// Block `(j, i)` from the kernel's Taylor coefficients:
/// `M[n, m] = −k_{nm} / √((n+1)(m+1))`.
pub fn block_series(rigging: &Rigging, j: usize, i: usize, order: usize) -> Result<GrunskyBlock> {
    let k = kernel_coefficients(rigging, j, i, order)?;
    let matrix = DMatrix::from_fn(order, order, |n, m| -k[n][m] / (((n + 1) * (m + 1)) as f64).sqrt());
    Ok(GrunskyBlock { j, i, matrix })
}

/// Assembles all `n²` blocks; the quadrature route uses the default rule.
pub fn assemble(rigging: &Rigging, order: usize, route: Route) -> Result<GrunskyOperator> {
    assemble_with(rigging, order, route, None)
}

/// As [`assemble`], with an explicit inner rule for the quadrature route.
pub fn assemble_with(
    rigging: &Rigging,
    order: usize,
    route: Route,
    quad: Option<&DiskQuadrature>,
) -> Result<GrunskyOperator> {
    if !rigging.is_certified() {
        return Err(Error::RiggingNotCertified);
    }
    let n = rigging.n();
    let default_quad;
    let quad = match (route, quad) {
        (Route::Quadrature, None) => {
            default_quad = build_quadrature(DEFAULT_RADIAL, DEFAULT_ANGULAR)?;
            Some(&default_quad)
        }
        (_, q) => q,
    };
    let blocks = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (j, i) = (k / n, k % n);
            match route {
                Route::Series => block_series(rigging, j, i, order),
                Route::Quadrature => block_quadrature(rigging, j, i, order, quad.expect("rule selected above")),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GrunskyOperator::from_blocks(n, order, route, blocks)
}

/// Largest singular value of the flattened matrix.
pub fn operator_norm(op: &GrunskyOperator) -> Result<f64> {
    let m = op.flatten();
    if m.nrows() <= SVD_LIMIT {
        Ok(m.singular_values().iter().copied().fold(0.0, f64::max))
    } else {
        power_iteration_norm(&m)
    }
}

/// Largest singular value by power iteration on `M*M`.
pub fn power_iteration_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    let cols = m.ncols();
    if cols == 0 {
        return Ok(0.0);
    }
    let adjoint = m.adjoint();
    // Deterministic start with no special alignment to any basis vector.
    let mut v = nalgebra::DVector::from_fn(cols, |k, _| Complex64::new(1.0, (k as f64 * 0.618_033_988_75).fract()));
    v /= Complex64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    let mut change = f64::INFINITY;
    for _ in 0..POWER_ITERATION_CAP {
        let w = &adjoint * (m * &v);
        let next = w.norm();
        if next == 0.0 {
            return Ok(0.0);
        }
        change = (next - lambda).abs() / next;
        lambda = next;
        v = w / Complex64::new(next, 0.0);
        if change <= 1e-14 {
            break;
        }
    }
    if change > POWER_ITERATION_TOL {
        return Err(Error::PowerIterationStalled(change));
    }
    Ok(lambda.sqrt())
}

/// Norm of the operator at each order in `orders`, which must ascend.
/// The operator is assembled once at the largest order; smaller orders are
/// its leading compressions.
pub fn truncation_sweep(rigging: &Rigging, orders: &[usize]) -> Result<Vec<(usize, f64)>> {
    if orders.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("sweep orders must ascend".into()));
    }
    let Some(&max) = orders.last() else {
        return Ok(Vec::new());
    };
    if orders[0] == 0 {
        return Err(Error::OrderTooSmall { min: 1, got: 0 });
    }
    let full = assemble(rigging, max, Route::Series)?;
    orders
        .iter()
        .map(|&order| Ok((order, operator_norm(&full.compress(order)?)?)))
        .collect()
}
