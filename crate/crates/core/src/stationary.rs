//! Poisson detection of a confined stationary state.
//!
//! A detector that fires with probability `q` per interval `δt` gives the
//! exponential waiting-time density `f(t) = Λe^{-Λt}`, `Λ = q/δt`. The full
//! state `Ψ(x & t) = ψ_n(x) √Λ e^{-Λt/2 - iE_n t/ħ}` then has a Lorentzian
//! energy profile of full width `ħΛ` around `E_n`.

use alloc::{format, vec::Vec};
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_complex::Complex64;

use crate::spectral::joint_fourier_centered;
#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{quad, ComplexField, Error, Field2, Grid1D, PhysicalConstants, RealField, Result};

/// Survival probability allowed beyond the end of a time window.
pub const MAX_SURVIVAL: f64 = 1e-8;

/// Tolerance on `∫|ψ_n|² dx = 1`.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Memoryless detection with rate `Λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonDetection {
    lambda: f64,
}

impl PoissonDetection {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("detection rate must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `f(t) = Λe^{-Λt}` for `t ≥ 0`, zero before.
    pub fn pdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            self.lambda * (-self.lambda * t).exp()
        }
    }

    /// `P(T > t)`.
    pub fn survival(&self, t: f64) -> f64 {
        if t < 0.0 {
            1.0
        } else {
            (-self.lambda * t).exp()
        }
    }

    /// `P(T ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t < 0.0 {
            0.0
        } else {
            -(-self.lambda * t).exp_m1()
        }
    }

    /// Default end of a time window, `20/Λ`.
    pub fn default_t_max(&self) -> f64 {
        20.0 / self.lambda
    }
}

/// Samples of `f(t)` on `t_grid`.
pub fn detection_pdf(model: &PoissonDetection, t_grid: Grid1D) -> RealField {
    RealField::from_fn(t_grid, |t| model.pdf(t))
}

/// `(⟨T⟩, ΔT) = (1/Λ, 1/Λ)`.
pub fn detection_time_stats(model: &PoissonDetection) -> (f64, f64) {
    let tau = 1.0 / model.lambda();
    (tau, tau)
}

/// Mean and standard deviation of `T` by trapezoid quadrature of
/// [`detection_pdf`] on `t_grid`, without renormalization.
pub fn detection_time_stats_numeric(model: &PoissonDetection, t_grid: Grid1D) -> (f64, f64) {
    let f = detection_pdf(model, t_grid);
    let m1 = quad::trapezoid_with(&t_grid, |i| t_grid.point(i) * f.values()[i]);
    let m2 = quad::trapezoid_with(&t_grid, |i| t_grid.point(i).powi(2) * f.values()[i]);
    (m1, (m2 - m1 * m1).max(0.0).sqrt())
}

/// `Ψ(x & t) = ψ_n(x) √Λ e^{-Λt/2 - iE_n t/ħ}`, rows x and columns t.
///
/// Points with `t < 0` are zero, so the window may be padded before the
/// detector is switched on. The survival probability at the end of the
/// window must be below [`MAX_SURVIVAL`].
pub fn full_stationary_state(
    psi_n: &ComplexField,
    e_n: f64,
    model: &PoissonDetection,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<Field2<Complex64>> {
    let norm = psi_n.norm_sqr_integral();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized { what: "psi_n".into(), integral: norm, tolerance: NORM_TOLERANCE });
    }
    let survival = model.survival(t_grid.stop());
    if survival >= MAX_SURVIVAL {
        return Err(Error::TimeWindow { survival });
    }
    let lam = model.lambda();
    let snap = 1e-9 * t_grid.step();
    let chi: Vec<Complex64> = t_grid
        .points()
        .map(|t| {
            let t = if t.abs() < snap { 0.0 } else { t };
            if t < 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(lam.sqrt() * (-0.5 * lam * t).exp(), -e_n * t / consts.hbar())
            }
        })
        .collect();
    let values = psi_n.values().iter().flat_map(|&p| chi.iter().map(move |&c| p * c)).collect();
    Field2::new(*psi_n.grid(), t_grid, values)
}

/// Cauchy profile `(1/π) γ / ((ε - center)² + γ²)` with half width `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianProfile {
    center: f64,
    half_width: f64,
}

impl LorentzianProfile {
    pub fn new(center: f64, half_width: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::InvalidArgument(format!("line centre must be finite, got {center}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidArgument(format!("half width must be positive, got {half_width}")));
        }
        Ok(Self { center, half_width })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn fwhm(&self) -> f64 {
        2.0 * self.half_width
    }

    /// Value at the centre, `1/(πγ)`.
    pub fn peak(&self) -> f64 {
        1.0 / (PI * self.half_width)
    }

    pub fn density(&self, eps: f64) -> f64 {
        let d = eps - self.center;
        self.half_width / (PI * (d * d + self.half_width * self.half_width))
    }

    pub fn sample(&self, eps_grid: Grid1D) -> RealField {
        RealField::from_fn(eps_grid, |e| self.density(e))
    }
}

/// Width of a sampled peak at half its largest value, with linear
/// interpolation between samples. `None` if a half-maximum crossing lies
/// outside the grid.
pub fn sampled_fwhm(samples: &RealField) -> Option<f64> {
    let v = samples.values();
    let g = samples.grid();
    let top = samples.argmax();
    let half = 0.5 * v[top];
    let cross = |i: usize, j: usize| {
        let (a, b) = (v[i] - half, v[j] - half);
        g.point(i) + (g.point(j) - g.point(i)) * a / (a - b)
    };
    let left = (1..=top).rev().find(|&i| v[i - 1] < half).map(|i| cross(i, i - 1))?;
    let right = (top..v.len() - 1).find(|&i| v[i + 1] < half).map(|i| cross(i, i + 1))?;
    Some(right - left)
}

/// Analytic energy profile of the Poisson-detected state:
/// centre `E_n`, half width `ħΛ/2`, with samples on `eps_grid`.
pub fn energy_distribution(
    e_n: f64,
    model: &PoissonDetection,
    eps_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<(LorentzianProfile, RealField)> {
    let profile = LorentzianProfile::new(e_n, 0.5 * consts.hbar() * model.lambda())?;
    Ok((profile, profile.sample(eps_grid)))
}

/// ε-marginal of `|Ψ̃(p & ε)|²` computed numerically: the full state on
/// `x_grid × t_grid` is passed through the joint transform, with the energy
/// axis centred on `E_n`.
///
/// The sample at `t = 0` sits on the detector switch-on jump and is given
/// the mean of its one-sided limits. `t_grid` needs padding below zero for
/// the boundary-decay check to pass.
pub fn energy_marginal_numeric(
    psi_n: &ComplexField,
    e_n: f64,
    model: &PoissonDetection,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    let mut state = full_stationary_state(psi_n, e_n, model, t_grid, consts)?;
    if t_grid.start() < 0.0 {
        if let Some(c0) = t_grid.exact_index_of(0.0) {
            let nt = t_grid.count();
            for r in 0..psi_n.grid().count() {
                state.values_mut()[r * nt + c0] *= FRAC_1_SQRT_2;
            }
        }
    }
    Ok(joint_fourier_centered(&state, consts, 0.0, e_n)?.energy_marginal())
}

/// Profile of a line of natural width `ħΓ` observed through Poisson
/// detection at rate `Λ`: a Lorentzian of full width `ħ(Λ + Γ)` about
/// `center`.
pub fn convolve_lorentzians(lambda: f64, gamma: f64, center: f64, consts: &PhysicalConstants) -> Result<LorentzianProfile> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("detection rate must be positive, got {lambda}")));
    }
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("natural linewidth must be non-negative, got {gamma}")));
    }
    LorentzianProfile::new(center, 0.5 * consts.hbar() * (lambda + gamma))
}

/// Direct numerical convolution of `profile`, sampled on `eps_grid`, with a
/// centred Lorentzian kernel of full width `ħΓ`. With `Γ = 0` the kernel is
/// a delta and the samples are returned unchanged.
pub fn convolve_numeric(
    profile: &LorentzianProfile,
    gamma: f64,
    eps_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("natural linewidth must be non-negative, got {gamma}")));
    }
    let samples = profile.sample(eps_grid);
    if gamma == 0.0 {
        return Ok(samples);
    }
    let kernel = LorentzianProfile::new(0.0, 0.5 * consts.hbar() * gamma)?;
    let a = samples.values();
    let out = eps_grid.points().map(|e| {
        quad::trapezoid_with(&eps_grid, |j| a[j] * kernel.density(e - eps_grid.point(j)))
    });
    RealField::new(eps_grid, out.collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_grid;
    use std::f64::consts::LN_2;

    fn ground_state(x_grid: Grid1D) -> ComplexField {
        ComplexField::from_fn(x_grid, |x| Complex64::new(PI.powf(-0.25) * (-0.5 * x * x).exp(), 0.0))
    }

    #[test]
    fn pdf_examples() {
        let m = PoissonDetection::new(1.0).unwrap();
        assert_eq!(m.pdf(0.0), 1.0);
        assert!((PoissonDetection::new(2.0).unwrap().pdf(LN_2 / 2.0) - 1.0).abs() < 1e-15);
        assert_eq!(m.pdf(-0.1), 0.0);
        assert!(PoissonDetection::new(0.0).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        for lam in [0.5, 1.0, 10.0] {
            let m = PoissonDetection::new(lam).unwrap();
            let g = make_grid(0.0, m.default_t_max(), 200_001).unwrap();
            assert!((detection_pdf(&m, g).integral() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn stats_examples() {
        for (lam, tau) in [(2.0, 0.5), (1.0, 1.0), (10.0, 0.1)] {
            let m = PoissonDetection::new(lam).unwrap();
            assert_eq!(detection_time_stats(&m), (tau, tau));
            let (mu, sd) = detection_time_stats_numeric(&m, make_grid(0.0, 30.0 / lam, 60_001).unwrap());
            assert!((mu - tau).abs() < 1e-4 * tau);
            assert!((sd - tau).abs() < 1e-4 * tau);
        }
    }

    #[test]
    fn memoryless() {
        let m = PoissonDetection::new(0.7).unwrap();
        for s in [0.3, 1.0, 4.5] {
            for t in [0.0, 0.25, 2.0, 9.0] {
                let conditional = m.pdf(t + s) / m.survival(s);
                assert!((conditional - m.pdf(t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn stationary_state_factorizes() {
        let xg = make_grid(-8.0, 8.0, 161).unwrap();
        let psi = ground_state(xg);
        let m = PoissonDetection::new(1.0).unwrap();
        let tg = make_grid(0.0, 20.0, 4001).unwrap();
        let state = full_stationary_state(&psi, 0.5, &m, tg, &PhysicalConstants::natural()).unwrap();
        for r in (0..161).step_by(10) {
            for c in (0..4001).step_by(250) {
                let t = tg.point(c);
                let expect = psi.values()[r].norm_sqr() * m.pdf(t);
                assert!((state.get(r, c).norm_sqr() - expect).abs() < 1e-14);
            }
            assert!((state.get(r, 0) - psi.values()[r]).norm() < 1e-15);
        }
        assert!((crate::spectral::squared_norm(&state) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn stationary_state_guards() {
        let xg = make_grid(-8.0, 8.0, 161).unwrap();
        let psi = ground_state(xg);
        let m = PoissonDetection::new(1.0).unwrap();
        let nat = PhysicalConstants::natural();
        let twice = psi.map(|v| v * 2.0);
        assert!(matches!(
            full_stationary_state(&twice, 0.5, &m, make_grid(0.0, 20.0, 11).unwrap(), &nat),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            full_stationary_state(&psi, 0.5, &m, make_grid(0.0, 5.0, 11).unwrap(), &nat),
            Err(Error::TimeWindow { .. })
        ));
    }

    #[test]
    fn lorentzian_shape() {
        let nat = PhysicalConstants::natural();
        let m = PoissonDetection::new(0.5).unwrap();
        let g = make_grid(-9.0, 11.0, 20_001).unwrap();
        let (p, s) = energy_distribution(1.0, &m, g, &nat).unwrap();
        assert!((p.peak() - 2.0 / (PI * 0.5)).abs() < 1e-15);
        assert_eq!(p.fwhm(), 0.5);
        assert!((sampled_fwhm(&s).unwrap() - 0.5).abs() < g.step());
        let v = s.values();
        for i in 0..v.len() {
            assert!((v[i] - v[v.len() - 1 - i]).abs() < 1e-12);
        }
        let (_, dt) = detection_time_stats(&m);
        assert_eq!(dt * p.fwhm(), nat.hbar());
    }

    #[test]
    fn convolution_examples() {
        let nat = PhysicalConstants::natural();
        assert_eq!(convolve_lorentzians(1.0, 2.0, 0.0, &nat).unwrap().fwhm(), 3.0);
        let single = convolve_lorentzians(1.0, 0.0, 0.0, &nat).unwrap();
        let double = convolve_lorentzians(1.0, 1.0, 0.0, &nat).unwrap();
        assert_eq!(double.fwhm(), 2.0);
        assert_eq!(double.peak(), 0.5 * single.peak());
        assert_eq!(convolve_lorentzians(1.0, 2.0, 3.0, &nat), convolve_lorentzians(2.0, 1.0, 3.0, &nat));

        let g = make_grid(-5.0, 5.0, 101).unwrap();
        assert_eq!(convolve_numeric(&single, 0.0, g, &nat).unwrap(), single.sample(g));
    }

    #[test]
    fn numeric_convolution_matches() {
        let nat = PhysicalConstants::natural();
        let base = LorentzianProfile::new(0.0, 0.5).unwrap();
        let g = make_grid(-20.0, 20.0, 4001).unwrap();
        let num = convolve_numeric(&base, 1.0, g, &nat).unwrap();
        let exact = convolve_lorentzians(1.0, 1.0, 0.0, &nat).unwrap().sample(g);
        assert!(num.l1_distance(&exact).unwrap() < 0.01);
    }

    #[test]
    fn sampled_fwhm_needs_both_crossings() {
        let g = make_grid(0.0, 1.0, 11).unwrap();
        let p = LorentzianProfile::new(0.0, 0.5).unwrap();
        assert!(sampled_fwhm(&p.sample(g)).is_none());
    }
}
