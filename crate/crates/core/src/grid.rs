//! Uniform one-dimensional sample grids.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// len samples at origin + i·spacing, i = 0..len.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: f64,
    pub spacing: f64,
    pub len: usize,
}

impl Grid {
    pub fn new(origin: f64, spacing: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2 samples, got {len}")));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::InvalidInput(format!("grid spacing must be positive, got {spacing}")));
        }
        if !origin.is_finite() {
            return Err(Error::InvalidInput(format!("grid origin must be finite, got {origin}")));
        }
        Ok(Self { origin, spacing, len })
    }

    /// Grid of `len` samples placed symmetrically around `center`.
    pub fn centered(center: f64, spacing: f64, len: usize) -> Result<Self> {
        Self::new(center - 0.5 * (len as f64 - 1.0) * spacing, spacing, len)
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.spacing
    }

    pub fn last_coordinate(&self) -> f64 {
        self.coordinate(self.len - 1)
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.coordinate(i))
    }

    /// Geometric extent from first to last sample.
    pub fn span(&self) -> f64 {
        (self.len - 1) as f64 * self.spacing
    }
}
