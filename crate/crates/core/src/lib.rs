//! Generalized Grunsky operators of non-overlapping conformal maps of the
//! unit disk, computed as truncated block matrices on Bergman spaces.

pub mod bergman;
pub mod cli;
pub mod error;
pub mod grunsky;
pub mod map_zoo;
pub mod period_map;
pub mod power_series;

pub use error::{Error, Result};
