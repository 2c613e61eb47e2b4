//! Quadrature: the trapezoid rule used throughout the toolkit, and an
//! adaptive Gauss–Kronrod integrator that serves as an independent oracle.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Grid1D, Result};

/// Trapezoid rule over samples on `grid`.
pub fn trapezoid(values: &[f64], grid: &Grid1D) -> f64 {
    debug_assert_eq!(values.len(), grid.count());
    trapezoid_with(grid, |i| values[i])
}

/// Trapezoid rule with the integrand given per sample index. Summation runs
/// in index order so results do not depend on the caller.
pub fn trapezoid_with(grid: &Grid1D, f: impl Fn(usize) -> f64) -> f64 {
    let n = grid.count();
    let mut acc = 0.5 * (f(0) + f(n - 1));
    for i in 1..n - 1 {
        acc += f(i);
    }
    acc * grid.step()
}

pub fn trapezoid_complex(values: &[Complex64], grid: &Grid1D) -> Complex64 {
    let n = grid.count();
    debug_assert_eq!(values.len(), n);
    let mut acc = (values[0] + values[n - 1]) * 0.5;
    for v in &values[1..n - 1] {
        acc += v;
    }
    acc * grid.step()
}

/// Trapezoid rule over a row-major product grid.
pub fn trapezoid_2d(values: &[f64], rows: &Grid1D, cols: &Grid1D) -> f64 {
    let nc = cols.count();
    debug_assert_eq!(values.len(), rows.count() * nc);
    let mut acc = 0.0;
    for r in 0..rows.count() {
        let row = &values[r * nc..(r + 1) * nc];
        acc += rows.weight(r) * trapezoid(row, cols);
    }
    acc
}

// Kronrod 15-point abscissae (non-negative half) and weights; the Gauss
// 7-point rule uses the odd-indexed abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15(f: &impl Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let kron = kron * h;
    let gauss = gauss * h;
    (kron, (kron - gauss).norm())
}

/// Globally adaptive G7–K15 integration of a complex integrand over
/// `[a, b]`. Bisects the interval with the largest error estimate until the
/// summed estimate is below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_gauss_kronrod(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite() && b > a) {
        return Err(Error::InvalidArgument(alloc::format!("bad interval [{a}, {b}]")));
    }
    let mut segs: Vec<(f64, f64, Complex64, f64)> = Vec::new();
    let (v, e) = gk15(&f, a, b);
    segs.push((a, b, v, e));
    let mut evaluations = 15;
    loop {
        let total: Complex64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(Integral { value: total, error: err, evaluations });
        }
        if segs.len() >= max_intervals {
            return Err(Error::Singular(alloc::format!(
                "adaptive quadrature did not converge: error {err} after {evaluations} evaluations"
            )));
        }
        let worst = segs
            .iter()
            .enumerate()
            .fold(0, |best, (i, s)| if s.3 > segs[best].3 { i } else { best });
        let (lo, hi, _, _) = segs.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_grid;
    use core::f64::consts::PI;

    #[test]
    fn trapezoid_exact_for_linear() {
        let g = make_grid(0.0, 2.0, 5).unwrap();
        let v: Vec<f64> = g.points().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&v, &g) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_kronrod_polynomial_and_oscillatory() {
        let r = adaptive_gauss_kronrod(|x| Complex64::new(x.powi(5), 0.0), 0.0, 1.0, 1e-14, 1e-14, 100)
            .unwrap();
        assert!((r.value.re - 1.0 / 6.0).abs() < 1e-15);

        // ∫_0^{10} e^{i 40 x} dx = (e^{400 i} - 1) / (40 i)
        let r = adaptive_gauss_kronrod(
            |x| Complex64::new(0.0, 40.0 * x).exp(),
            0.0,
            10.0,
            1e-13,
            1e-12,
            10_000,
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 400.0).exp() - 1.0) / Complex64::new(0.0, 40.0);
        assert!((r.value - exact).norm() < 1e-11);
    }

    #[test]
    fn gauss_kronrod_gaussian() {
        let r = adaptive_gauss_kronrod(|x| Complex64::new((-x * x).exp(), 0.0), -10.0, 10.0, 1e-14, 1e-13, 1000)
            .unwrap();
        assert!((r.value.re - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_interval() {
        assert!(adaptive_gauss_kronrod(|_| Complex64::new(1.0, 0.0), 1.0, 1.0, 1e-10, 1e-10, 10).is_err());
    }
}
