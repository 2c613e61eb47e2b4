//! Momentum amplitudes `C±(P)` on a strictly positive momentum grid.

use alloc::{format, vec::Vec};
use num_complex::Complex64;

#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{quad, Error, Grid1D, Result};

/// Largest fraction of Gaussian mass allowed outside a spectrum grid.
pub const MAX_TRUNCATED_MASS: f64 = 0.01;

/// Which momentum branch (direction of arrival) an amplitude belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    Both,
}

impl Branch {
    pub fn includes_plus(self) -> bool {
        matches!(self, Branch::Plus | Branch::Both)
    }

    pub fn includes_minus(self) -> bool {
        matches!(self, Branch::Minus | Branch::Both)
    }
}

/// Paired amplitudes `C⁺(P)` and `C⁻(P)` for `P > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSpectrum {
    grid: Grid1D,
    c_plus: Vec<Complex64>,
    c_minus: Vec<Complex64>,
}

impl MomentumSpectrum {
    pub fn new(grid: Grid1D, c_plus: Vec<Complex64>, c_minus: Vec<Complex64>) -> Result<Self> {
        if grid.start() <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "momentum grid must lie in P > 0, starts at {}",
                grid.start()
            )));
        }
        for len in [c_plus.len(), c_minus.len()] {
            if len != grid.count() {
                return Err(Error::ShapeMismatch { expected: grid.count(), found: len });
            }
        }
        Ok(Self { grid, c_plus, c_minus })
    }

    /// Single nonzero sample at `index` on the selected branch(es), scaled
    /// to unit weight.
    pub fn delta(grid: Grid1D, index: usize, branch: Branch) -> Result<Self> {
        if index >= grid.count() {
            return Err(Error::InvalidArgument(format!("index {index} outside grid")));
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut plus = alloc::vec![zero; grid.count()];
        let mut minus = plus.clone();
        if branch.includes_plus() {
            plus[index] = Complex64::new(1.0, 0.0);
        }
        if branch.includes_minus() {
            minus[index] = Complex64::new(1.0, 0.0);
        }
        normalize_spectrum(&Self::new(grid, plus, minus)?)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn c_plus(&self) -> &[Complex64] {
        &self.c_plus
    }

    pub fn c_minus(&self) -> &[Complex64] {
        &self.c_minus
    }

    pub fn amplitudes(&self, branch: Branch) -> &[Complex64] {
        match branch {
            Branch::Minus => &self.c_minus,
            _ => &self.c_plus,
        }
    }

    /// `∫ |C⁺|² dP` or `∫ |C⁻|² dP` (trapezoid); `Both` gives the sum.
    pub fn weight(&self, branch: Branch) -> f64 {
        let plus = || quad::trapezoid_with(&self.grid, |i| self.c_plus[i].norm_sqr());
        let minus = || quad::trapezoid_with(&self.grid, |i| self.c_minus[i].norm_sqr());
        match branch {
            Branch::Plus => plus(),
            Branch::Minus => minus(),
            Branch::Both => quad::trapezoid_with(&self.grid, |i| {
                self.c_plus[i].norm_sqr() + self.c_minus[i].norm_sqr()
            }),
        }
    }

    pub fn is_zero(&self, branch: Branch) -> bool {
        let zero = |c: &[Complex64]| c.iter().all(|v| v.re == 0.0 && v.im == 0.0);
        match branch {
            Branch::Plus => zero(&self.c_plus),
            Branch::Minus => zero(&self.c_minus),
            Branch::Both => zero(&self.c_plus) && zero(&self.c_minus),
        }
    }

    /// Multiplies both branches by `e^{i θ(P)}`.
    pub fn with_phase(&self, theta: impl Fn(f64) -> f64) -> Self {
        let rot = |c: &[Complex64]| -> Vec<Complex64> {
            c.iter()
                .enumerate()
                .map(|(i, &v)| v * Complex64::from_polar(1.0, theta(self.grid.point(i))))
                .collect()
        };
        Self { grid: self.grid, c_plus: rot(&self.c_plus), c_minus: rot(&self.c_minus) }
    }

    /// Copy with one branch set to zero.
    pub fn without(&self, branch: Branch) -> Self {
        let mut out = self.clone();
        let zero = Complex64::new(0.0, 0.0);
        if branch.includes_plus() {
            out.c_plus.iter_mut().for_each(|v| *v = zero);
        }
        if branch.includes_minus() {
            out.c_minus.iter_mut().for_each(|v| *v = zero);
        }
        out
    }
}

/// Gaussian amplitude `C(P) ∝ exp[-(P - P0)² / (4σ²)]` on the selected
/// branch(es), normalized so that `∫ (|C⁺|² + |C⁻|²) dP = 1`. With
/// `Branch::Both` each branch carries probability 1/2.
pub fn gaussian_spectrum(p0: f64, sigma: f64, grid: Grid1D, branch: Branch) -> Result<MomentumSpectrum> {
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(Error::InvalidArgument(format!("P0 must be positive, got {p0}")));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if grid.start() <= 0.0 {
        return Err(Error::InvalidGrid(format!(
            "momentum grid must lie in P > 0, starts at {}",
            grid.start()
        )));
    }
    // |C|² is a normal density with standard deviation σ
    let z = |p: f64| (p - p0) / (sigma * core::f64::consts::SQRT_2);
    let lost = 0.5 * libm::erfc(-z(grid.start())) + 0.5 * libm::erfc(z(grid.stop()));
    if lost > MAX_TRUNCATED_MASS {
        return Err(Error::Truncation { lost_fraction: lost });
    }
    let zero = Complex64::new(0.0, 0.0);
    let shape: Vec<Complex64> = grid
        .points()
        .map(|p| Complex64::new((-(p - p0) * (p - p0) / (4.0 * sigma * sigma)).exp(), 0.0))
        .collect();
    let plus = if branch.includes_plus() { shape.clone() } else { alloc::vec![zero; grid.count()] };
    let minus = if branch.includes_minus() { shape } else { alloc::vec![zero; grid.count()] };
    normalize_spectrum(&MomentumSpectrum::new(grid, plus, minus)?)
}

/// Rescales both branches so the total trapezoid weight is one.
pub fn normalize_spectrum(spec: &MomentumSpectrum) -> Result<MomentumSpectrum> {
    let total = spec.weight(Branch::Both);
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::ZeroSpectrum);
    }
    let s = 1.0 / total.sqrt();
    Ok(MomentumSpectrum {
        grid: spec.grid,
        c_plus: spec.c_plus.iter().map(|v| v * s).collect(),
        c_minus: spec.c_minus.iter().map(|v| v * s).collect(),
    })
}
