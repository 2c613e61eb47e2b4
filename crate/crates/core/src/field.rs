//! Sampled fields on uniform grids.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{quad, Error, Grid1D, Result};

/// Complex samples, one per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        check_len(grid.count(), values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: alloc::vec![Complex64::new(0.0, 0.0); grid.count()] }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// `|values|²` as a real field.
    pub fn norm_sqr(&self) -> RealField {
        RealField { grid: self.grid, values: self.values.iter().map(|v| v.norm_sqr()).collect() }
    }

    /// Trapezoid integral of `|values|²`.
    pub fn norm_sqr_integral(&self) -> f64 {
        quad::trapezoid_with(&self.grid, |i| self.values[i].norm_sqr())
    }
}

/// Real samples, one per grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        check_len(grid.count(), values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn integral(&self) -> f64 {
        quad::trapezoid(&self.values, &self.grid)
    }

    /// First moment `∫ x f(x) dx`.
    pub fn first_moment(&self) -> f64 {
        quad::trapezoid_with(&self.grid, |i| self.grid.point(i) * self.values[i])
    }

    /// Index of the largest sample (first one on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    /// Trapezoid integral of `|self - other|` on a shared grid.
    pub fn l1_distance(&self, other: &RealField) -> Result<f64> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::InvalidArgument("L1 distance needs identical grids".into()));
        }
        Ok(quad::trapezoid_with(&self.grid, |i| (self.values[i] - other.values[i]).abs()))
    }
}

/// Samples on a product grid. Rows follow the first axis (x or p), columns
/// the second (t or ε); storage is row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2<T> {
    rows: Grid1D,
    cols: Grid1D,
    values: Vec<T>,
}

impl<T: Copy> Field2<T> {
    pub fn new(rows: Grid1D, cols: Grid1D, values: Vec<T>) -> Result<Self> {
        check_len(rows.count() * cols.count(), values.len())?;
        Ok(Self { rows, cols, values })
    }

    pub fn from_fn(rows: Grid1D, cols: Grid1D, f: impl Fn(f64, f64) -> T) -> Self {
        let mut values = Vec::with_capacity(rows.count() * cols.count());
        for r in rows.points() {
            for c in cols.points() {
                values.push(f(r, c));
            }
        }
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> &Grid1D {
        &self.rows
    }

    pub fn cols(&self) -> &Grid1D {
        &self.cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols.count() + col]
    }

    /// One row (all columns at a fixed first coordinate).
    pub fn row(&self, row: usize) -> &[T] {
        let n = self.cols.count();
        &self.values[row * n..(row + 1) * n]
    }

    /// One column copied out (all rows at a fixed second coordinate).
    pub fn col(&self, col: usize) -> Vec<T> {
        (0..self.rows.count()).map(|r| self.get(r, col)).collect()
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Field2<U> {
        Field2 { rows: self.rows, cols: self.cols, values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

impl Field2<f64> {
    /// Trapezoid integral over both axes.
    pub fn integral(&self) -> f64 {
        quad::trapezoid_2d(self.values(), &self.rows, &self.cols)
    }

    /// Integral over columns for every row: a field on the row grid.
    pub fn integrate_cols(&self) -> RealField {
        let v = (0..self.rows.count()).map(|r| quad::trapezoid(self.row(r), &self.cols)).collect();
        RealField { grid: self.rows, values: v }
    }

    /// Integral over rows for every column: a field on the column grid.
    pub fn integrate_rows(&self) -> RealField {
        let nc = self.cols.count();
        let mut acc = alloc::vec![0.0; nc];
        for r in 0..self.rows.count() {
            let w = self.rows.weight(r);
            for (a, &v) in acc.iter_mut().zip(self.row(r)) {
                *a += w * v;
            }
        }
        RealField { grid: self.cols, values: acc }
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ShapeMismatch { expected, found });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_grid;

    #[test]
    fn rejects_length_mismatch() {
        let g = make_grid(0.0, 1.0, 5).unwrap();
        assert!(RealField::new(g, alloc::vec![0.0; 4]).is_err());
        assert!(Field2::new(g, g, alloc::vec![0.0; 24]).is_err());
    }

    #[test]
    fn separable_field_marginals() {
        let x = make_grid(0.0, 1.0, 11).unwrap();
        let t = make_grid(0.0, 2.0, 21).unwrap();
        let f = Field2::from_fn(x, t, |_, _| 0.5);
        assert!((f.integral() - 1.0).abs() < 1e-14);
        let over_t = f.integrate_cols();
        assert!(over_t.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let over_x = f.integrate_rows();
        assert!(over_x.values().iter().all(|v| (v - 0.5).abs() < 1e-14));
    }
}
