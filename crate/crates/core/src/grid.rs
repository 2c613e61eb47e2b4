use alloc::format;

#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{Error, Result};

/// Reduced Planck constant and particle mass. Natural units by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    hbar: f64,
    mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        Ok(Self { hbar, mass })
    }

    pub const fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0 }
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Free-particle kinetic energy `P²/2m`.
    pub fn kinetic_energy(&self, p: f64) -> f64 {
        p * p / (2.0 * self.mass)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::natural()
    }
}

/// Uniform sampling of one coordinate: `point(i) = start + i * step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    start: f64,
    step: f64,
    count: usize,
}

/// Uniform grid from `start` to `stop` with both endpoints included.
pub fn make_grid(start: f64, stop: f64, count: usize) -> Result<Grid1D> {
    if !start.is_finite() || !stop.is_finite() {
        return Err(Error::InvalidGrid(format!("non-finite bounds [{start}, {stop}]")));
    }
    if count < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {count}")));
    }
    if stop <= start {
        return Err(Error::InvalidGrid(format!("stop {stop} must exceed start {start}")));
    }
    Grid1D::new(start, (stop - start) / (count - 1) as f64, count)
}

impl Grid1D {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !step.is_finite() {
            return Err(Error::InvalidGrid(format!("non-finite start {start} or step {step}")));
        }
        if step <= 0.0 {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {count}")));
        }
        Ok(Self { start, step, count })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Last grid point.
    pub fn stop(&self) -> f64 {
        self.point(self.count - 1)
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.point(i))
    }

    /// Index of the grid point nearest to `x`, or `None` when `x` lies more
    /// than half a step outside the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let r = ((x - self.start) / self.step).round();
        if r.is_nan() || r < 0.0 || r > (self.count - 1) as f64 {
            return None;
        }
        Some(r as usize)
    }

    /// Index of `x` when it coincides with a grid point to within
    /// `1e-9` steps.
    pub fn exact_index_of(&self, x: f64) -> Option<usize> {
        let i = self.index_of(x)?;
        let off = (x - self.point(i)).abs() / self.step;
        (off < 1e-9).then_some(i)
    }

    /// Trapezoid weight of sample `i` (half a step at the endpoints).
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            0.5 * self.step
        } else {
            self.step
        }
    }

    /// Lower and upper edge of the quadrature cell owned by sample `i`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let x = self.point(i);
        let lo = if i == 0 { x } else { x - 0.5 * self.step };
        let hi = if i + 1 == self.count { x } else { x + 0.5 * self.step };
        (lo, hi)
    }

    /// Cell index containing `x`, for `x` within `[start, stop]`.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if !(x >= self.start && x <= self.stop()) {
            return None;
        }
        self.index_of(x)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.count == other.count
            && (self.start - other.start).abs() <= 1e-12 * self.step
            && (self.step - other.step).abs() <= 1e-12 * self.step
    }

    /// Same grid translated by `offset`.
    pub fn shifted(&self, offset: f64) -> Grid1D {
        Grid1D { start: self.start + offset, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_endpoint_grid() {
        let g = make_grid(0.0, 1.0, 2).unwrap();
        assert_eq!(g.point(0), 0.0);
        assert_eq!(g.point(1), 1.0);
    }

    #[test]
    fn integer_lattice() {
        let g = make_grid(0.0, 10.0, 11).unwrap();
        assert_eq!(g.step(), 1.0);
        for (i, x) in g.points().enumerate() {
            assert_eq!(x, i as f64);
        }
    }

    #[test]
    fn symmetric_grid_has_zero_at_center() {
        let g = make_grid(-5.0, 5.0, 101).unwrap();
        assert!((g.step() - 0.1).abs() < 1e-15);
        assert!(g.point(50).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_grid(0.0, 1.0, 1).is_err());
        assert!(make_grid(1.0, 0.0, 10).is_err());
        assert!(make_grid(f64::NAN, 1.0, 10).is_err());
        assert!(make_grid(0.0, f64::INFINITY, 10).is_err());
        assert!(Grid1D::new(0.0, -1.0, 4).is_err());
    }

    #[test]
    fn weights_sum_to_span() {
        let g = make_grid(-2.0, 3.0, 51).unwrap();
        let total: f64 = (0..g.count()).map(|i| g.weight(i)).sum();
        assert!((total - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constants_validate() {
        assert!(PhysicalConstants::new(0.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0).is_err());
        assert_eq!(PhysicalConstants::default(), PhysicalConstants::natural());
    }

    proptest! {
        #[test]
        fn index_round_trip(start in -1e3f64..1e3, span in 1e-3f64..1e3, count in 2usize..5000) {
            let g = make_grid(start, start + span, count).unwrap();
            for i in [0, count / 3, count / 2, count - 1] {
                prop_assert_eq!(g.index_of(g.point(i)), Some(i));
            }
        }
    }
}
