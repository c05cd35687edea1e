use std::ops::Range;

use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::quadrature::simpson;
use crate::error::{Error, Result};

/// Uniform sample axis with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("bounds", "grid bounds must be finite"));
        }
        if n_points < 3 {
            return Err(Error::invalid(
                "n_points",
                format!("need at least 3 points, got {n_points}"),
            ));
        }
        if x_max <= x_min {
            return Err(Error::invalid(
                "bounds",
                format!("x_max ({x_max}) must exceed x_min ({x_min})"),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric grid `[-half_width, half_width]`.
    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::new(-half_width, half_width, n_points)
    }

    /// Symmetric grid with `2 * shells + 1` points and the given spacing, centred on 0.
    pub fn centered(spacing: f64, shells: usize) -> Result<Self> {
        let half = spacing * shells as f64;
        Self::new(-half, half, 2 * shells + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    /// Sample `i`; the last sample is exactly `x_max`.
    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_points).map(move |i| self.point(i))
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.points().collect()
    }

    /// Index of the sample closest to `x` (clamped to the grid).
    pub fn nearest_index(&self, x: f64) -> usize {
        let t = ((x - self.x_min) / self.spacing()).round();
        t.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// True when the axis is centred on zero with an odd number of points.
    pub fn is_symmetric_about_zero(&self) -> bool {
        let scale = self.x_max.abs().max(self.x_min.abs());
        self.n_points % 2 == 1 && (self.x_min + self.x_max).abs() <= 1e-12 * scale
    }

    /// Sub-grid covering the index range `range` of this grid.
    pub fn sub_grid(&self, range: Range<usize>) -> Result<Self> {
        if range.end > self.n_points || range.len() < 3 {
            return Err(Error::invalid(
                "range",
                format!("sub-grid {range:?} invalid for {} points", self.n_points),
            ));
        }
        Self::new(self.point(range.start), self.point(range.end - 1), range.len())
    }

    pub(crate) fn same_as(&self, other: &Grid1D) -> bool {
        let tol = 1e-12 * (self.x_max - self.x_min).abs().max(1.0);
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= tol
            && (self.x_max - other.x_max).abs() <= tol
    }
}

/// Samples of a function on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T = f64> {
    grid: Grid1D,
    values: Vec<T>,
}

impl<T: Copy> Field<T> {
    pub fn new(grid: Grid1D, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!("{} samples for a {}-point grid", values.len(), grid.len()),
            ));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> T) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map<U: Copy, W: Copy>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> W,
    ) -> Result<Field<W>> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::invalid("grid", "fields live on different grids"));
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Restriction to the sub-grid `range`.
    pub fn window(&self, range: Range<usize>) -> Result<Self> {
        let grid = self.grid.sub_grid(range.clone())?;
        Ok(Self {
            grid,
            values: self.values[range].to_vec(),
        })
    }
}

impl Field<f64> {
    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A field reported on an interior index window of a parent grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedField {
    pub grid: Grid1D,
    /// Index of the first reported sample in the parent grid.
    pub start: usize,
    pub values: Vec<f64>,
}

impl WindowedField {
    pub fn from_interior(grid: Grid1D, values: &[f64], margin: usize) -> Self {
        let end = values.len().saturating_sub(margin);
        let start = margin.min(end);
        Self {
            grid,
            start,
            values: values[start..end].to_vec(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn rms(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64).sqrt()
    }

    /// Iterator of `(x, value)` pairs.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.grid.point(self.start + i), v))
    }
}

/// A 2-D field reported on an interior window of an `x × y` grid, indexed `[x, y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedField2D {
    pub x_grid: Grid1D,
    pub y_grid: Grid1D,
    pub x_start: usize,
    pub y_start: usize,
    pub values: Array2<f64>,
}

impl WindowedField2D {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Integral over the second axis for every reported x.
    pub fn integrate_y(&self) -> Vec<f64> {
        let h = self.y_grid.spacing();
        self.values
            .axis_iter(Axis(0))
            .map(|row| simpson(&row.to_vec(), h))
            .collect()
    }

    /// Row of the parent x index `i`, if reported.
    pub fn row_at(&self, i: usize) -> Option<Vec<f64>> {
        let k = i.checked_sub(self.x_start)?;
        (k < self.values.nrows()).then(|| self.values.row(k).to_vec())
    }
}

/// Maximal runs of indices where `keep` holds, shrunk by `exclusion` points
/// next to every excluded index. Runs shorter than `min_len` are dropped.
pub fn segments_where(
    len: usize,
    keep: impl Fn(usize) -> bool,
    exclusion: usize,
    min_len: usize,
) -> Vec<Range<usize>> {
    let mut runs = Vec::new();
    let mut i = 0;
    while i < len {
        if !keep(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i < len && keep(i) {
            i += 1;
        }
        let lo = if start == 0 { 0 } else { start + exclusion };
        let hi = if i == len { len } else { i.saturating_sub(exclusion) };
        if hi > lo && hi - lo >= min_len {
            runs.push(lo..hi);
        }
    }
    runs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_examples() {
        assert_eq!(Grid1D::new(-1.0, 1.0, 3).unwrap().spacing(), 1.0);
        assert_eq!(Grid1D::new(0.0, 10.0, 11).unwrap().spacing(), 1.0);
    }

    #[test]
    fn degenerate_interval_rejected() {
        assert!(matches!(
            Grid1D::new(1.0, 1.0, 5),
            Err(Error::InvalidArgument { .. })
        ));
        assert!(Grid1D::new(0.0, 1.0, 2).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 5).is_err());
        assert!(Grid1D::new(0.0, f64::INFINITY, 5).is_err());
    }

    #[test]
    fn endpoints_are_exact_and_increasing() {
        let g = Grid1D::new(-3.3, 7.1, 1001).unwrap();
        assert_eq!(g.point(0), -3.3);
        assert_eq!(g.point(1000), 7.1);
        let pts = g.to_vec();
        assert!(pts.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn segments_skip_excluded_points() {
        let keep = |i: usize| i != 10 && i != 11;
        let runs = segments_where(30, keep, 3, 3);
        assert_eq!(runs, vec![0..7, 15..30]);
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let g = Grid1D::centered(0.01, 3).unwrap();
        assert!(g.is_symmetric_about_zero());
        assert_eq!(g.len(), 7);
        assert!(g.point(3).abs() < 1e-15);
    }
}
