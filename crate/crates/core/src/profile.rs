//! Radial profiles sampled on a grid.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl Profile {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "profile has {} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("profile values must be finite".into()));
        }
        Ok(Profile { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Profile { grid, values: vec![0.0; n] }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same grid, new values (lengths must agree).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Profile { grid: self.grid.clone(), values: self.values.iter().map(|v| c * v).collect() }
    }

    pub fn same_grid(&self, other: &Profile) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid
    }

    pub fn add(&self, other: &Profile) -> Result<Self> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Profile { grid: self.grid.clone(), values })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}
