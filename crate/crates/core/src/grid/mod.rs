//! Nonnegative functions sampled on a centered square grid, and the
//! symmetrizations acting on them.
//!
//! A [`GridFunction`] of resolution `n` and half-width `L` samples the square
//! `[−L, L]²` at the centers of an `n × n` array of cells of side `h = 2L/n`.
//! Rows run upward in `y`, columns rightward in `x`, stored row-major. Cell
//! centers are computed as `(2k + 1 − n)·h/2`, so mirror-image cells have
//! coordinates that are exact negatives of each other.

mod io;
mod ops;
mod spectral;

use rayon::prelude::*;
use thiserror::Error;

use crate::exact_sum::{self, ExactSum};
use crate::rearrange::{self, RearrangeError};

pub use io::{read_grid, write_grid, write_pgm, write_profile_csv};
pub(crate) use ops::clip_to_rotatable_disk;
pub use ops::{rearrange_radial, rotate, steiner_direction, steiner_vertical, RadialProfile};
pub use spectral::{angular_energy, nonradial_energy, AngularEnergy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("resolution must be positive")]
    ZeroResolution,
    #[error("half-width must be positive and finite, got {0}")]
    BadHalfWidth(f64),
    #[error("expected {expected} values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("invalid sample {value} at row {row}, column {col}")]
    InvalidSample { row: usize, col: usize, value: f64 },
    #[error("grids are incompatible: {0}×{0} on [−{1}, {1}]² vs {2}×{2} on [−{3}, {3}]²")]
    Incompatible(usize, f64, usize, f64),
    #[error(
        "support reaches cell (row {row}, column {col}) at radius {radius:.6}, \
         beyond L/√2 = {limit:.6}; rotations would clip it"
    )]
    SupportViolation {
        row: usize,
        col: usize,
        radius: f64,
        limit: f64,
    },
    #[error("angular sampling needs a power of two ≥ 8 samples and at least one ring (got {n_samples} samples, {n_rings} rings)")]
    SpectralParams { n_rings: usize, n_samples: usize },
    #[error("grid file: {0}")]
    Parse(String),
}

/// A nonnegative function sampled at the cell centers of `[−L, L]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    resolution: usize,
    half_width: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(resolution: usize, half_width: f64) -> Result<Self, GridError> {
        check_shape(resolution, half_width)?;
        Ok(GridFunction {
            resolution,
            half_width,
            values: vec![0.0; resolution * resolution],
        })
    }

    /// Wraps row-major samples, rejecting negative or non-finite values.
    pub fn from_values(
        resolution: usize,
        half_width: f64,
        mut values: Vec<f64>,
    ) -> Result<Self, GridError> {
        check_shape(resolution, half_width)?;
        let expected = resolution * resolution;
        if values.len() != expected {
            return Err(GridError::WrongLength {
                expected,
                got: values.len(),
            });
        }
        rearrange::validate(&mut values).map_err(|e| {
            let (index, value) = match e {
                RearrangeError::Negative { index, value } => (index, value),
                RearrangeError::NonFinite { index } => (index, values[index]),
            };
            GridError::InvalidSample {
                row: index / resolution,
                col: index % resolution,
                value,
            }
        })?;
        Ok(GridFunction {
            resolution,
            half_width,
            values,
        })
    }

    /// Internal constructor for operations whose output is nonnegative by
    /// construction.
    pub(crate) fn from_parts(resolution: usize, half_width: f64, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), resolution * resolution);
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        GridFunction {
            resolution,
            half_width,
            values,
        }
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Cell side `h = 2L/n`.
    pub fn cell_size(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.resolution + col]
    }

    /// Center coordinate of cell index `k` along either axis.
    pub fn coordinate(&self, k: usize) -> f64 {
        cell_coordinate(k, self.resolution, self.half_width)
    }

    /// `(x, y)` of the center of cell `(row, col)`.
    pub fn center(&self, row: usize, col: usize) -> (f64, f64) {
        (self.coordinate(col), self.coordinate(row))
    }

    /// Squared distance of a cell center from the origin in units of
    /// `(h/2)²`; an exact integer.
    pub fn radius_key(&self, row: usize, col: usize) -> u64 {
        radius_key(row, col, self.resolution)
    }

    pub fn is_compatible(&self, other: &GridFunction) -> bool {
        self.resolution == other.resolution
            && self.half_width.to_bits() == other.half_width.to_bits()
    }

    pub fn check_compatible(&self, other: &GridFunction) -> Result<(), GridError> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(GridError::Incompatible(
                self.resolution,
                self.half_width,
                other.resolution,
                other.half_width,
            ))
        }
    }

    /// `h² Σ values`, correctly rounded and independent of cell order.
    pub fn mass(&self) -> f64 {
        let h = self.cell_size();
        h * h * exact_sum::sum(self.values.iter().copied())
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every value so that the mass equals `target`. A zero grid is
    /// returned unchanged.
    pub fn renormalized(&self, target: f64) -> GridFunction {
        let m = self.mass();
        if m == 0.0 {
            return self.clone();
        }
        let s = target / m;
        GridFunction::from_parts(
            self.resolution,
            self.half_width,
            self.values.iter().map(|v| v * s).collect(),
        )
    }

    /// Fails if any nonzero cell lies outside the centered disk of radius
    /// `L/√2`, the largest disk that stays inside the square under every
    /// rotation.
    pub fn check_rotatable_support(&self) -> Result<(), GridError> {
        let n = self.resolution;
        let limit = (n * n) as u64;
        for row in 0..n {
            for col in 0..n {
                if self.get(row, col) != 0.0 && 2 * self.radius_key(row, col) > limit {
                    let (x, y) = self.center(row, col);
                    return Err(GridError::SupportViolation {
                        row,
                        col,
                        radius: x.hypot(y),
                        limit: self.half_width / std::f64::consts::SQRT_2,
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest cell-center radius carrying a nonzero value.
    pub fn support_radius(&self) -> f64 {
        let n = self.resolution;
        let key = (0..n * n)
            .filter(|&k| self.values[k] != 0.0)
            .map(|k| self.radius_key(k / n, k % n))
            .max();
        match key {
            Some(k) => (k as f64).sqrt() * self.half_width / n as f64,
            None => 0.0,
        }
    }

    /// Bilinear interpolation of the samples at `(x, y)`, treating the grid as
    /// zero outside `[−L, L]²`. The weights are nonnegative and sum to one.
    pub fn interpolate(&self, x: f64, y: f64) -> f64 {
        let n = self.resolution;
        let inv_h = self.resolution as f64 / (2.0 * self.half_width);
        let offset = (n as f64 - 1.0) / 2.0;
        let u = x * inv_h + offset;
        let v = y * inv_h + offset;
        if !(u > -1.0 && v > -1.0 && u < n as f64 && v < n as f64) {
            return 0.0;
        }
        let c0 = u.floor();
        let r0 = v.floor();
        let fx = u - c0;
        let fy = v - r0;
        let (c0, r0) = (c0 as isize, r0 as isize);
        let at = |r: isize, c: isize| -> f64 {
            if r < 0 || c < 0 || r >= n as isize || c >= n as isize {
                0.0
            } else {
                self.values[r as usize * n + c as usize]
            }
        };
        let bottom = (1.0 - fx) * at(r0, c0) + fx * at(r0, c0 + 1);
        let top = (1.0 - fx) * at(r0 + 1, c0) + fx * at(r0 + 1, c0 + 1);
        (1.0 - fy) * bottom + fy * top
    }
}

fn check_shape(resolution: usize, half_width: f64) -> Result<(), GridError> {
    if resolution == 0 {
        return Err(GridError::ZeroResolution);
    }
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(GridError::BadHalfWidth(half_width));
    }
    Ok(())
}

pub(crate) fn cell_coordinate(k: usize, n: usize, half_width: f64) -> f64 {
    (2 * k as i64 + 1 - n as i64) as f64 * (half_width / n as f64)
}

pub(crate) fn radius_key(row: usize, col: usize, n: usize) -> u64 {
    let a = (2 * row as i64 + 1 - n as i64).unsigned_abs();
    let b = (2 * col as i64 + 1 - n as i64).unsigned_abs();
    a * a + b * b
}

/// Evaluates `func` at every cell center.
pub fn sample<F>(func: F, resolution: usize, half_width: f64) -> Result<GridFunction, GridError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    check_shape(resolution, half_width)?;
    let n = resolution;
    let mut values = vec![0.0; n * n];
    values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
        let y = cell_coordinate(row, n, half_width);
        for (col, slot) in out.iter_mut().enumerate() {
            *slot = func(cell_coordinate(col, n, half_width), y);
        }
    });
    GridFunction::from_values(n, half_width, values)
}

/// `max |f − g|` over cells.
pub fn sup_distance(f: &GridFunction, g: &GridFunction) -> Result<f64, GridError> {
    f.check_compatible(g)?;
    Ok(f.values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// `e^{−|z|²}` at every cell center, row-major.
pub fn gauss_weights(resolution: usize, half_width: f64) -> Vec<f64> {
    let n = resolution;
    let mut w = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = cell_coordinate(row, n, half_width);
        for col in 0..n {
            let x = cell_coordinate(col, n, half_width);
            w.push((-(x * x + y * y)).exp());
        }
    }
    w
}

/// Midpoint quadrature of `∫ f(z) e^{−|z|²} d²z`.
///
/// The weighted sum is accumulated exactly, so the result is the same for
/// any summation order and never decreases when the values in a column are
/// rearranged toward the `x`-axis.
pub fn gauss_functional(f: &GridFunction) -> f64 {
    let w = gauss_weights(f.resolution, f.half_width);
    let mut acc = ExactSum::new();
    for (v, u) in f.values.iter().zip(&w) {
        if *v != 0.0 {
            acc.add_product(*v, *u);
        }
    }
    let h = f.cell_size();
    h * h * acc.value()
}
