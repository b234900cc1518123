//! JSON envelope and CSV layouts of an assembled operator.
//!
//! JSON: `{"n", "N", "route", "blocks": [{"j", "i", "entries"}], "norm"}` with
//! 0-based block indices, `entries[n][m] = [re, im]`, blocks target-major.
//!
//! CSV: the flattened matrix, one row per line, each entry written as two
//! columns `re,im`. No header.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GrunskyBlock, GrunskyOperator, Route};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockRecord {
    pub j: usize,
    pub i: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEnvelope {
    pub n: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub route: Route,
    pub blocks: Vec<BlockRecord>,
    pub norm: Option<f64>,
}

impl OperatorEnvelope {
    pub fn new(op: &GrunskyOperator, norm: Option<f64>) -> Self {
        let blocks = op
            .blocks()
            .iter()
            .map(|b| BlockRecord {
                j: b.j,
                i: b.i,
                entries: b
                    .matrix
                    .row_iter()
                    .map(|row| row.iter().map(|c| [c.re, c.im]).collect())
                    .collect(),
            })
            .collect();
        Self {
            n: op.n(),
            order: op.order(),
            route: op.route(),
            blocks,
            norm,
        }
    }

    pub fn to_operator(&self) -> Result<GrunskyOperator> {
        let order = self.order;
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                if b.entries.len() != order || b.entries.iter().any(|row| row.len() != order) {
                    return Err(Error::ShapeMismatch {
                        expected: format!("{order}x{order} entries"),
                        found: format!("ragged entries in block ({}, {})", b.j, b.i),
                    });
                }
                Ok(GrunskyBlock {
                    j: b.j,
                    i: b.i,
                    matrix: DMatrix::from_fn(order, order, |n, m| {
                        let [re, im] = b.entries[n][m];
                        Complex64::new(re, im)
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        GrunskyOperator::from_blocks(self.n, order, self.route, blocks)
    }
}

/// Pretty-printed JSON envelope. Output is a pure function of the operator.
pub fn to_json(op: &GrunskyOperator, norm: Option<f64>) -> String {
    serde_json::to_string_pretty(&OperatorEnvelope::new(op, norm)).expect("envelope serializes")
}

pub fn operator_from_json(text: &str) -> Result<(GrunskyOperator, Option<f64>)> {
    let env: OperatorEnvelope =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("operator JSON: {e}")))?;
    Ok((env.to_operator()?, env.norm))
}

pub fn to_csv(op: &GrunskyOperator) -> String {
    let m = op.flatten();
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|c| format!("{},{}", fmt(c.re), fmt(c.im))).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip decimal, identical to the JSON number format.
fn fmt(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}
