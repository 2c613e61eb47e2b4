//! Spectral operators: the half-derivative `D^{1/2}` realized as the Fourier
//! multiplier `√(-iw)` on modes `e^{-iwt}`, and the joint transform
//! `Ψ(x & t) -> Ψ̃(p & ε)`.
//!
//! The discrete operators treat the sample window as one period. Signals
//! must decay or be periodic at the window edges; otherwise the caller has
//! to taper them, and values near the edges are not meaningful.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};
use num_complex::Complex64;

use crate::fft::{fft, signed_index, Direction};
#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{ComplexField, Edge, Error, Field2, Grid1D, PhysicalConstants, RealField, Result};

/// Largest `|Ψ|` allowed on the sample boundary, relative to the peak.
pub const BOUNDARY_DECAY: f64 = 1e-6;

/// Branch of `√(-iw)`. `Principal` is the operator; `Conjugate` flips the
/// sign of the phase and exists to check that tests notice the difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SqrtBranch {
    #[default]
    Principal,
    Conjugate,
}

/// `√(-iw)` with the cut on the negative real axis:
/// `√|w| e^{-iπ/4 sign(w)}`, and zero at `w = 0`.
pub fn half_derivative_multiplier(w: f64, branch: SqrtBranch) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = match branch {
        SqrtBranch::Principal => -FRAC_PI_4 * w.signum(),
        SqrtBranch::Conjugate => FRAC_PI_4 * w.signum(),
    };
    Complex64::from_polar(w.abs().sqrt(), phase)
}

/// Multiplies every discrete Fourier mode `e^{-iwt}` of `field` by
/// `multiplier(w)`.
pub fn apply_time_multiplier(field: &ComplexField, multiplier: impl Fn(f64) -> Complex64) -> ComplexField {
    let grid = *field.grid();
    let n = grid.count();
    let mut data = field.values().to_vec();
    fft(&mut data, Direction::Forward);
    let dw = 2.0 * PI / (n as f64 * grid.step());
    for (k, v) in data.iter_mut().enumerate() {
        // bin k evolves as e^{+iνt}, i.e. w = -ν
        let w = -(signed_index(k, n) as f64) * dw;
        *v *= multiplier(w) / n as f64;
    }
    fft(&mut data, Direction::Inverse);
    ComplexField::new(grid, data).expect("length preserved")
}

/// Riemann–Liouville half-derivative with lower limit −∞, evaluated
/// spectrally on the periodic extension of `field`.
pub fn half_derivative(field: &ComplexField) -> ComplexField {
    half_derivative_with(field, SqrtBranch::Principal)
}

pub fn half_derivative_with(field: &ComplexField, branch: SqrtBranch) -> ComplexField {
    apply_time_multiplier(field, |w| half_derivative_multiplier(w, branch))
}

/// Spectral `d/dt` (multiplier `-iw`).
pub fn time_derivative(field: &ComplexField) -> ComplexField {
    apply_time_multiplier(field, |w| Complex64::new(0.0, -w))
}

/// `Ψ̃(p & ε)` on a momentum (rows) by energy (columns) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpectrum {
    values: Field2<Complex64>,
}

impl JointSpectrum {
    pub fn p_grid(&self) -> &Grid1D {
        self.values.rows()
    }

    pub fn eps_grid(&self) -> &Grid1D {
        self.values.cols()
    }

    pub fn values(&self) -> &Field2<Complex64> {
        &self.values
    }

    /// `|Ψ̃|²` on the spectral grid.
    pub fn density(&self) -> Field2<f64> {
        self.values.map(|v| v.norm_sqr())
    }

    /// `∫ |Ψ̃|² dp` as a function of ε.
    pub fn energy_marginal(&self) -> RealField {
        self.density().integrate_rows()
    }

    /// `∫ |Ψ̃|² dε` as a function of p.
    pub fn momentum_marginal(&self) -> RealField {
        self.density().integrate_cols()
    }

    pub fn squared_norm(&self) -> f64 {
        self.density().integral()
    }
}

/// Trapezoid `∫∫ |Ψ|² dx dt`.
pub fn squared_norm(amp: &Field2<Complex64>) -> f64 {
    amp.map(|v| v.norm_sqr()).integral()
}

/// Joint transform with grids centred on `p = 0`, `ε = 0`.
pub fn joint_fourier(amp: &Field2<Complex64>, consts: &PhysicalConstants) -> Result<JointSpectrum> {
    joint_fourier_centered(amp, consts, 0.0, 0.0)
}

/// `Ψ̃(p & ε) = (2πħ)⁻¹ ∫∫ e^{-i(px - εt)/ħ} Ψ(x & t) dx dt` on the
/// conjugate grids `dp = 2πħ/(Nx dx)`, `dε = 2πħ/(Nt dt)`, centred on
/// `(p_center, eps_center)`. Parseval holds with unit constant.
///
/// The rows of `amp` are x, the columns t. Returns
/// [`Error::BoundaryDecay`] naming the worst edge when `|Ψ|` on the
/// boundary exceeds [`BOUNDARY_DECAY`] times its peak.
pub fn joint_fourier_centered(
    amp: &Field2<Complex64>,
    consts: &PhysicalConstants,
    p_center: f64,
    eps_center: f64,
) -> Result<JointSpectrum> {
    check_boundary_decay(amp)?;
    let hbar = consts.hbar();
    let (xg, tg) = (*amp.rows(), *amp.cols());
    let (nx, nt) = (xg.count(), tg.count());
    let dp = 2.0 * PI * hbar / (nx as f64 * xg.step());
    let de = 2.0 * PI * hbar / (nt as f64 * tg.step());
    let (kx0, kt0) = ((nx / 2) as i64, (nt / 2) as i64);
    let p_grid = Grid1D::new(p_center - kx0 as f64 * dp, dp, nx)?;
    let eps_grid = Grid1D::new(eps_center - kt0 as f64 * de, de, nt)?;

    let x_shift: Vec<Complex64> = xg.points().map(|x| Complex64::from_polar(1.0, -p_center * x / hbar)).collect();
    let t_shift: Vec<Complex64> = tg.points().map(|t| Complex64::from_polar(1.0, eps_center * t / hbar)).collect();
    let mut work: Vec<Complex64> = amp.values().to_vec();
    for j in 0..nx {
        for n in 0..nt {
            work[j * nt + n] *= x_shift[j] * t_shift[n];
        }
    }
    // t axis: exponent +iεt, i.e. the inverse-sign DFT, row by row
    for row in work.chunks_mut(nt) {
        fft(row, Direction::Inverse);
    }
    // x axis: exponent -ipx, column by column
    let mut col = alloc::vec![Complex64::new(0.0, 0.0); nx];
    for n in 0..nt {
        for j in 0..nx {
            col[j] = work[j * nt + n];
        }
        fft(&mut col, Direction::Forward);
        for j in 0..nx {
            work[j * nt + n] = col[j];
        }
    }

    let scale = xg.step() * tg.step() / (2.0 * PI * hbar);
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); nx * nt];
    for i in 0..nx {
        let kappa = i as i64 - kx0;
        let kx = kappa.rem_euclid(nx as i64) as usize;
        let px = Complex64::from_polar(scale, -(kappa as f64) * dp * xg.start() / hbar);
        for l in 0..nt {
            let lambda = l as i64 - kt0;
            let kt = lambda.rem_euclid(nt as i64) as usize;
            let pt = Complex64::from_polar(1.0, lambda as f64 * de * tg.start() / hbar);
            out[i * nt + l] = work[kx * nt + kt] * px * pt;
        }
    }
    Ok(JointSpectrum { values: Field2::new(p_grid, eps_grid, out)? })
}

fn check_boundary_decay(amp: &Field2<Complex64>) -> Result<()> {
    let peak = amp.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
    if peak == 0.0 {
        return Ok(());
    }
    let (nx, nt) = (amp.rows().count(), amp.cols().count());
    let edge_max = |edge: Edge| -> f64 {
        let vals: Vec<Complex64> = match edge {
            Edge::XStart => amp.row(0).to_vec(),
            Edge::XEnd => amp.row(nx - 1).to_vec(),
            Edge::TStart => amp.col(0),
            Edge::TEnd => amp.col(nt - 1),
        };
        vals.iter().fold(0.0f64, |m, v| m.max(v.norm())) / peak
    };
    let worst = [Edge::XStart, Edge::XEnd, Edge::TStart, Edge::TEnd]
        .into_iter()
        .map(|e| (e, edge_max(e)))
        .fold((Edge::XStart, -1.0), |b, c| if c.1 > b.1 { c } else { b });
    if worst.1 >= BOUNDARY_DECAY {
        return Err(Error::BoundaryDecay { edge: worst.0, ratio: worst.1 });
    }
    Ok(())
}

/// `⟨h⟩ = ∫∫ |Ψ̃|² ε dp dε`.
///
/// A Lorentzian ε-marginal has no absolutely convergent mean; the value is a
/// principal value only when `eps_grid` is symmetric about the peak (use
/// [`joint_fourier_centered`] with `eps_center` at the line centre).
pub fn mean_energy(spec: &JointSpectrum) -> f64 {
    spec.energy_marginal().first_moment()
}

/// `⟨p⟩ = ∫∫ |Ψ̃|² p dp dε`.
pub fn mean_momentum(spec: &JointSpectrum) -> f64 {
    spec.momentum_marginal().first_moment()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_grid;

    /// t-grid on which `e^{-iwt}` is exactly periodic.
    fn periodic_grid(w: f64, n: usize, periods: usize) -> Grid1D {
        let dt = 2.0 * PI * periods as f64 / (w * n as f64);
        Grid1D::new(-0.5 * n as f64 * dt, dt, n).unwrap()
    }

    #[test]
    fn eigenrelation_on_periodic_grid() {
        for w in [0.5, 1.0, 4.0] {
            let g = periodic_grid(w, 1024, 7);
            let f = ComplexField::from_fn(g, |t| Complex64::from_polar(1.0, -w * t));
            let d = half_derivative(&f);
            let m = Complex64::from_polar(w.sqrt(), -FRAC_PI_4);
            for (a, b) in d.values().iter().zip(f.values()) {
                assert!((a - m * b).norm() < 1e-11, "w = {w}");
            }
        }
    }

    #[test]
    fn eigenvalue_at_w4() {
        let m = half_derivative_multiplier(4.0, SqrtBranch::Principal);
        assert!((m - Complex64::from_polar(2.0, -FRAC_PI_4)).norm() < 1e-15);
        assert!((m * m - Complex64::new(0.0, -4.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = make_grid(-1.0, 1.0, 64).unwrap();
        let d = half_derivative(&ComplexField::zeros(g));
        assert!(d.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn conjugate_branch_differs() {
        let m = half_derivative_multiplier(1.0, SqrtBranch::Conjugate);
        assert!((m - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
    }

    fn packet(g: Grid1D, w0: f64, s: f64, t0: f64) -> ComplexField {
        ComplexField::from_fn(g, |t| {
            Complex64::from_polar((-(t - t0) * (t - t0) / (2.0 * s * s)).exp(), -w0 * t)
        })
    }

    #[test]
    fn semigroup_gives_first_derivative() {
        let g = make_grid(-40.0, 40.0, 2048).unwrap();
        let f = packet(g, 3.0, 2.0, 0.0);
        let twice = half_derivative(&half_derivative(&f));
        let once = time_derivative(&f);
        let scale = once.values().iter().fold(0.0f64, |m, v| m.max(v.norm()));
        for (a, b) in twice.values().iter().zip(once.values()) {
            assert!((a - b).norm() < 1e-5 * scale);
        }
        // d/dt of the packet analytically
        for (i, t) in g.points().enumerate() {
            let exact = f.values()[i] * Complex64::new(-t / 4.0, -3.0);
            assert!((once.values()[i] - exact).norm() < 1e-8);
        }
    }

    #[test]
    fn linearity() {
        let g = make_grid(-30.0, 30.0, 1000).unwrap();
        let f = packet(g, 2.0, 2.5, -3.0);
        let h = packet(g, 5.0, 1.5, 4.0);
        let (a, b) = (Complex64::new(0.3, -1.2), Complex64::new(-2.0, 0.5));
        let combo =
            ComplexField::new(g, f.values().iter().zip(h.values()).map(|(x, y)| a * x + b * y).collect()).unwrap();
        let lhs = half_derivative(&combo);
        let (df, dh) = (half_derivative(&f), half_derivative(&h));
        for i in 0..g.count() {
            let rhs = a * df.values()[i] + b * dh.values()[i];
            assert!((lhs.values()[i] - rhs).norm() < 1e-12);
        }
    }

    fn gaussian_2d(nx: usize, nt: usize) -> (Field2<Complex64>, f64, f64) {
        let (sx, st) = (0.7, 1.3);
        let x = make_grid(-10.0, 10.0, nx).unwrap();
        let t = make_grid(-15.0, 15.0, nt).unwrap();
        let amp = Field2::from_fn(x, t, |x, t| {
            let env = (-(x - 1.0) * (x - 1.0) / (4.0 * sx * sx) - (t + 2.0) * (t + 2.0) / (4.0 * st * st)).exp();
            Complex64::from_polar(env, 1.5 * x - 2.0 * t)
        });
        (amp, sx, st)
    }

    #[test]
    fn parseval_holds() {
        let (amp, _, _) = gaussian_2d(64, 96);
        let s = joint_fourier(&amp, &PhysicalConstants::natural()).unwrap();
        let a = squared_norm(&amp);
        assert!((s.squared_norm() - a).abs() < 1e-6 * a);
    }

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // |Ψ|² has widths sx, st; |Ψ̃|² is Gaussian in p about 1.5 with width
        // ħ/(2 sx) and in ε about 2.0 (sign of εt in the kernel) with ħ/(2 st).
        let (amp, sx, st) = gaussian_2d(64, 95);
        let s = joint_fourier(&amp, &PhysicalConstants::natural()).unwrap();
        let norm = squared_norm(&amp);
        let (sp, se) = (0.5 / sx, 0.5 / st);
        let closed = |p: f64, e: f64| {
            norm * (-(p - 1.5) * (p - 1.5) / (2.0 * sp * sp) - (e - 2.0) * (e - 2.0) / (2.0 * se * se)).exp()
                / (2.0 * PI * sp * se)
        };
        let dens = s.density();
        let peak = dens.values().iter().fold(0.0f64, |m, &v| m.max(v));
        for (i, p) in s.p_grid().points().enumerate() {
            for (l, e) in s.eps_grid().points().enumerate() {
                assert!((dens.get(i, l) - closed(p, e)).abs() < 1e-8 * peak);
            }
        }
        assert!((mean_momentum(&s) - 1.5 * norm).abs() < 1e-8);
        assert!((mean_energy(&s) - 2.0 * norm).abs() < 1e-8);
    }

    #[test]
    fn point_mass_energy_and_even_momentum() {
        let p = make_grid(-4.0, 4.0, 81).unwrap();
        let e = make_grid(-2.0, 2.0, 41).unwrap();
        let l0 = 27;
        let eps0 = e.point(l0);
        let amp = Field2::from_fn(p, e, |pp, ee| {
            if (ee - eps0).abs() < 1e-9 {
                Complex64::new((-pp * pp).exp(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let spec = JointSpectrum { values: amp };
        let norm = spec.squared_norm();
        assert!((mean_energy(&spec) / norm - eps0).abs() < 1e-12);
        assert!(mean_momentum(&spec).abs() < 1e-10);
    }

    #[test]
    fn boundary_decay_violation_names_edge() {
        let x = make_grid(-5.0, 5.0, 32).unwrap();
        let t = make_grid(0.0, 10.0, 32).unwrap();
        let amp = Field2::from_fn(x, t, |x, t| Complex64::new((-x * x).exp() * (-0.1 * t).exp(), 0.0));
        match joint_fourier(&amp, &PhysicalConstants::natural()) {
            Err(Error::BoundaryDecay { edge, .. }) => assert_eq!(edge, Edge::TStart),
            other => panic!("expected boundary error, got {other:?}"),
        }
    }
}
