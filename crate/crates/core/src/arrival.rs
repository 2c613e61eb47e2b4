//! Free-particle mirror dynamics (V = 0).
//!
//! The mirror wave function is a pseudospinor `(φ⁺, φ⁻)(t|x)`:
//!
//! ```text
//! φ±(t|x) = (2πmħ)^{-1/2} ∫₀^∞ C±(P) √P e^{±iPx/ħ} e^{-iE_P t/ħ} dP,   E_P = P²/2m
//! ```
//!
//! and the arrival-time density is `ρ(t|x) = |φ⁺|² + |φ⁻|²`. The momentum
//! integrals use the trapezoid rule behind a phase-resolution guard; the
//! [`oracle`] submodule evaluates the same integrals by adaptive
//! Gauss–Kronrod quadrature for validation.

use alloc::{format, vec::Vec};
use core::f64::consts::{FRAC_PI_4, PI};
use num_complex::Complex64;

use crate::spectral::half_derivative;
#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{quad, Branch, ComplexField, Error, Grid1D, MomentumSpectrum, PhysicalConstants, RealField, Result};

/// Central-difference step in x used by the current density and the
/// mirror-equation residual (natural units).
pub const FD_STEP: f64 = 1e-4;

/// Largest allowed phase advance between neighbouring momentum samples.
pub const MAX_PHASE_STEP: f64 = FRAC_PI_4;

/// Fraction of samples dropped at each end of the time window when comparing
/// spectral and finite-difference evaluations.
pub const EDGE_FRACTION: f64 = 0.05;

/// `φ_P(t) = √(P/2πmħ) e^{-iE_P t/ħ}`, the temporal eigenfunction of the
/// mirror momentum operator.
pub fn phi_eigenfunction(p: f64, t_grid: Grid1D, consts: &PhysicalConstants) -> Result<ComplexField> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "momentum eigenfunctions need P > 0 (negative energies are excluded), got {p}"
        )));
    }
    let amp = (p / (2.0 * PI * consts.mass() * consts.hbar())).sqrt();
    let e = consts.kinetic_energy(p);
    Ok(ComplexField::from_fn(t_grid, |t| Complex64::from_polar(amp, -e * t / consts.hbar())))
}

/// Dispersion relation `P = ±√(2mħw)`.
pub fn dispersion(w: f64, consts: &PhysicalConstants) -> Result<(f64, f64)> {
    if !(w.is_finite() && w >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "angular frequency must be non-negative (w < 0 gives imaginary P), got {w}"
        )));
    }
    let p = (2.0 * consts.mass() * consts.hbar() * w).sqrt();
    Ok((p, -p))
}

/// Two-component mirror wave function on a time grid at fixed `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSpinorField {
    grid: Grid1D,
    x: f64,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
}

impl PseudoSpinorField {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn plus(&self) -> &[Complex64] {
        &self.plus
    }

    pub fn minus(&self) -> &[Complex64] {
        &self.minus
    }

    pub fn component(&self, branch: Branch) -> ComplexField {
        let v = match branch {
            Branch::Minus => self.minus.clone(),
            _ => self.plus.clone(),
        };
        ComplexField::new(self.grid, v).expect("component length matches grid")
    }

    /// `φ†φ` at every time sample.
    pub fn density(&self) -> Vec<f64> {
        self.plus.iter().zip(&self.minus).map(|(p, m)| p.norm_sqr() + m.norm_sqr()).collect()
    }
}

/// `ρ(t|x)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalDensity {
    t_grid: Grid1D,
    x: f64,
    values: Vec<f64>,
}

impl ArrivalDensity {
    pub fn t_grid(&self) -> &Grid1D {
        &self.t_grid
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `∫ ρ dt` over the window.
    pub fn total(&self) -> f64 {
        quad::trapezoid(&self.values, &self.t_grid)
    }

    /// Time of the largest sample.
    pub fn peak_time(&self) -> f64 {
        self.t_grid.point(self.as_field().argmax())
    }

    pub fn as_field(&self) -> RealField {
        RealField::new(self.t_grid, self.values.clone()).expect("density length matches grid")
    }
}

fn sign_of(branch: Branch) -> f64 {
    match branch {
        Branch::Minus => -1.0,
        _ => 1.0,
    }
}

/// Checks `step · max|dΦ/dP| < π/4` for `Φ(P) = (s·P·x - E_P t)/ħ` over
/// the given x and t ranges, where `s = ±1`.
fn check_phase_resolution(
    p_grid: &Grid1D,
    s: f64,
    x_range: (f64, f64),
    t_range: (f64, f64),
    consts: &PhysicalConstants,
) -> Result<()> {
    let mut rate = 0.0f64;
    for p in [p_grid.start(), p_grid.stop()] {
        for x in [x_range.0, x_range.1] {
            for t in [t_range.0, t_range.1] {
                rate = rate.max((s * x - p * t / consts.mass()).abs() / consts.hbar());
            }
        }
    }
    if p_grid.step() * rate >= MAX_PHASE_STEP {
        let span = p_grid.stop() - p_grid.start();
        let required = (span * rate / MAX_PHASE_STEP).floor() as usize + 2;
        return Err(Error::PhaseResolution { step: p_grid.step(), phase_rate: rate, required_count: required });
    }
    Ok(())
}

/// Trapezoid-weighted factors `w_P C(P) √P e^{isPx/ħ} / √(2πmħ)`.
fn mirror_weights(spec: &MomentumSpectrum, branch: Branch, x: f64, consts: &PhysicalConstants) -> Vec<Complex64> {
    let g = spec.grid();
    let s = sign_of(branch);
    let norm = 1.0 / (2.0 * PI * consts.mass() * consts.hbar()).sqrt();
    spec.amplitudes(branch)
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let p = g.point(i);
            c * Complex64::from_polar(g.weight(i) * norm * p.sqrt(), s * p * x / consts.hbar())
        })
        .collect()
}

/// `Σ_P a_P e^{-iE_P t/ħ}` summed in grid order.
fn evolve(weights: &[Complex64], p_grid: &Grid1D, t: f64, consts: &PhysicalConstants) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, a) in weights.iter().enumerate() {
        let e = consts.kinetic_energy(p_grid.point(i));
        acc += a * Complex64::from_polar(1.0, -e * t / consts.hbar());
    }
    acc
}

fn branch_component(
    spec: &MomentumSpectrum,
    branch: Branch,
    x: f64,
    t_grid: &Grid1D,
    consts: &PhysicalConstants,
) -> Result<Vec<Complex64>> {
    if spec.is_zero(branch) {
        return Ok(alloc::vec![Complex64::new(0.0, 0.0); t_grid.count()]);
    }
    check_phase_resolution(spec.grid(), sign_of(branch), (x, x), (t_grid.start(), t_grid.stop()), consts)?;
    let w = mirror_weights(spec, branch, x, consts);
    Ok(t_grid.points().map(|t| evolve(&w, spec.grid(), t, consts)).collect())
}

/// Evaluates `φ±(t|x)` on `t_grid` by trapezoid quadrature over the
/// momentum grid.
///
/// Fails with [`Error::PhaseResolution`] when the grid under-resolves the
/// phase `(±Px - E_P t)/ħ` over the requested range. A branch whose
/// amplitudes are all zero is returned as zeros without being checked.
pub fn mirror_solution(
    spec: &MomentumSpectrum,
    x: f64,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<PseudoSpinorField> {
    let plus = branch_component(spec, Branch::Plus, x, &t_grid, consts)?;
    let minus = branch_component(spec, Branch::Minus, x, &t_grid, consts)?;
    Ok(PseudoSpinorField { grid: t_grid, x, plus, minus })
}

/// `(φ⁺, φ⁻)` at a single `(t, x)`.
pub fn mirror_amplitude_at(
    spec: &MomentumSpectrum,
    x: f64,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<(Complex64, Complex64)> {
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, branch) in out.iter_mut().zip([Branch::Plus, Branch::Minus]) {
        if spec.is_zero(branch) {
            continue;
        }
        check_phase_resolution(spec.grid(), sign_of(branch), (x, x), (t, t), consts)?;
        *slot = evolve(&mirror_weights(spec, branch, x, consts), spec.grid(), t, consts);
    }
    Ok((out[0], out[1]))
}

/// `ρ(t|x) = |φ⁺(t|x)|² + |φ⁻(t|x)|²`.
pub fn arrival_density(
    spec: &MomentumSpectrum,
    x: f64,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<ArrivalDensity> {
    let phi = mirror_solution(spec, x, t_grid, consts)?;
    Ok(ArrivalDensity { t_grid, x, values: phi.density() })
}

fn require_right_movers(spec: &MomentumSpectrum) -> Result<()> {
    if !spec.is_zero(Branch::Minus) {
        return Err(Error::InvalidArgument(
            "Schrödinger packet comparison is defined only for spectra with C⁻ = 0".into(),
        ));
    }
    Ok(())
}

/// Trapezoid-weighted factors `w_P C⁺(P) e^{iPx/ħ} / √(2πħ)`.
fn packet_weights(spec: &MomentumSpectrum, x: f64, consts: &PhysicalConstants) -> Vec<Complex64> {
    let g = spec.grid();
    let norm = 1.0 / (2.0 * PI * consts.hbar()).sqrt();
    spec.c_plus()
        .iter()
        .enumerate()
        .map(|(i, &c)| c * Complex64::from_polar(g.weight(i) * norm, g.point(i) * x / consts.hbar()))
        .collect()
}

/// Conventional free wave packet
/// `ψ(x|t) = (2πħ)^{-1/2} ∫ C⁺(P) e^{i(Px - E_P t)/ħ} dP` on `x_grid`.
pub fn schrodinger_packet(
    spec: &MomentumSpectrum,
    x_grid: Grid1D,
    t: f64,
    consts: &PhysicalConstants,
) -> Result<ComplexField> {
    require_right_movers(spec)?;
    check_phase_resolution(spec.grid(), 1.0, (x_grid.start(), x_grid.stop()), (t, t), consts)?;
    let g = spec.grid();
    // time factor first, then one pass per x
    let timed: Vec<Complex64> = packet_weights(spec, 0.0, consts)
        .iter()
        .enumerate()
        .map(|(i, a)| a * Complex64::from_polar(1.0, -consts.kinetic_energy(g.point(i)) * t / consts.hbar()))
        .collect();
    Ok(ComplexField::from_fn(x_grid, |x| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in timed.iter().enumerate() {
            acc += a * Complex64::from_polar(1.0, g.point(i) * x / consts.hbar());
        }
        acc
    }))
}

/// Probability current `J(x,t) = (ħ/m) Im(ψ* ∂ψ/∂x)` at fixed `x`, with
/// the derivative taken by central difference with step [`FD_STEP`].
pub fn current_density(
    spec: &MomentumSpectrum,
    x: f64,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<RealField> {
    require_right_movers(spec)?;
    let dx = FD_STEP;
    check_phase_resolution(spec.grid(), 1.0, (x - dx, x + dx), (t_grid.start(), t_grid.stop()), consts)?;
    let w0 = packet_weights(spec, x, consts);
    let wl = packet_weights(spec, x - dx, consts);
    let wr = packet_weights(spec, x + dx, consts);
    let j = t_grid.points().map(|t| {
        let psi = evolve(&w0, spec.grid(), t, consts);
        let dpsi = (evolve(&wr, spec.grid(), t, consts) - evolve(&wl, spec.grid(), t, consts)) / (2.0 * dx);
        consts.hbar() / consts.mass() * (psi.conj() * dpsi).im
    });
    Ok(RealField::new(t_grid, j.collect()).expect("length matches grid"))
}

/// L1 distance between `ρ(t|x)` and the current normalized to unit flux
/// over the same window.
pub fn current_l1_distance(rho: &ArrivalDensity, current: &RealField) -> Result<f64> {
    let flux = current.integral();
    if !(flux.is_finite() && flux > 0.0) {
        return Err(Error::Singular(format!("current carries no net flux ({flux})")));
    }
    let scaled = RealField::new(*current.grid(), current.values().iter().map(|j| j / flux).collect())?;
    rho.as_field().l1_distance(&scaled)
}

/// Outcome of [`mirror_residual`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorResidual {
    /// Relative L2 mismatch over the interior of the window.
    pub residual: f64,
    /// Both sides vanish identically (zero spectrum); `residual` is 0.
    pub degenerate: bool,
    /// Residual recomputed with half the finite-difference step.
    pub residual_half_step: f64,
    /// `|residual - residual_half_step| < 0.1 · residual`.
    pub converged: bool,
}

/// Compares the two sides of the free mirror equation at `x`:
///
/// ```text
/// σ_z √(2miħ) D^{1/2} φ(t|x)    vs    -iħ ∂φ(t|x)/∂x
/// ```
///
/// The left side uses the spectral half-derivative on `t_grid`, the right a
/// central difference of [`mirror_solution`] with step `dx`. The generator
/// sign follows from `φ± ∝ e^{±iPx/ħ}`: both sides equal `±P φ±` for a
/// single momentum component.
pub fn mirror_residual(
    spec: &MomentumSpectrum,
    x: f64,
    dx: f64,
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<MirrorResidual> {
    if !(dx.is_finite() && dx > 0.0) {
        return Err(Error::InvalidArgument(format!("finite-difference step must be positive, got {dx}")));
    }
    let centre = mirror_solution(spec, x, t_grid, consts)?;
    let lhs = mirror_lhs(&centre, consts);
    let (r, degenerate) = residual_for_step(spec, x, dx, &lhs, t_grid, consts)?;
    let (r_half, _) = residual_for_step(spec, x, 0.5 * dx, &lhs, t_grid, consts)?;
    Ok(MirrorResidual {
        residual: r,
        degenerate,
        residual_half_step: r_half,
        converged: degenerate || (r - r_half).abs() < 0.1 * r,
    })
}

fn mirror_lhs(phi: &PseudoSpinorField, consts: &PhysicalConstants) -> [Vec<Complex64>; 2] {
    // √(2miħ) = √(2mħ) e^{iπ/4}
    let k = Complex64::from_polar((2.0 * consts.mass() * consts.hbar()).sqrt(), FRAC_PI_4);
    let side = |branch: Branch| {
        let d = half_derivative(&phi.component(branch));
        let s = sign_of(branch);
        d.values().iter().map(|v| v * k * s).collect::<Vec<_>>()
    };
    [side(Branch::Plus), side(Branch::Minus)]
}

fn residual_for_step(
    spec: &MomentumSpectrum,
    x: f64,
    dx: f64,
    lhs: &[Vec<Complex64>; 2],
    t_grid: Grid1D,
    consts: &PhysicalConstants,
) -> Result<(f64, bool)> {
    let right = mirror_solution(spec, x + dx, t_grid, consts)?;
    let left = mirror_solution(spec, x - dx, t_grid, consts)?;
    let n = t_grid.count();
    let skip = (EDGE_FRACTION * n as f64).floor() as usize;
    let factor = Complex64::new(0.0, -consts.hbar() / (2.0 * dx));
    let (mut num, mut den) = (0.0, 0.0);
    for (b, (r, l)) in [(right.plus(), left.plus()), (right.minus(), left.minus())].into_iter().enumerate() {
        for i in skip..n - skip {
            let rhs = factor * (r[i] - l[i]);
            num += (lhs[b][i] - rhs).norm_sqr();
            den += rhs.norm_sqr();
        }
    }
    if den == 0.0 {
        return Ok(if num == 0.0 { (0.0, true) } else { (f64::INFINITY, false) });
    }
    Ok(((num / den).sqrt(), false))
}

/// Independent evaluation of the mirror integrals by adaptive
/// Gauss–Kronrod quadrature of a continuous amplitude function.
pub mod oracle {
    use super::*;
    use crate::quad::adaptive_gauss_kronrod;

    /// Relative tolerance requested from the adaptive integrator.
    pub const REL_TOL: f64 = 1e-12;

    /// `φ±(t|x)` with `C±` given as a function of `P` on `[p_lo, p_hi]`.
    pub fn mirror_amplitude(
        amplitude: impl Fn(f64) -> Complex64,
        branch: Branch,
        (p_lo, p_hi): (f64, f64),
        x: f64,
        t: f64,
        consts: &PhysicalConstants,
    ) -> Result<Complex64> {
        let s = sign_of(branch);
        let (m, hbar) = (consts.mass(), consts.hbar());
        let norm = 1.0 / (2.0 * PI * m * hbar).sqrt();
        let integrand = |p: f64| {
            let phase = (s * p * x - consts.kinetic_energy(p) * t) / hbar;
            amplitude(p) * Complex64::from_polar(norm * p.sqrt(), phase)
        };
        Ok(adaptive_gauss_kronrod(integrand, p_lo, p_hi, 1e-15, REL_TOL, 1 << 16)?.value)
    }

    /// `ρ(t|x)` from the two branch amplitudes.
    pub fn arrival_density(
        c_plus: impl Fn(f64) -> Complex64,
        c_minus: impl Fn(f64) -> Complex64,
        p_range: (f64, f64),
        x: f64,
        t: f64,
        consts: &PhysicalConstants,
    ) -> Result<f64> {
        let a = mirror_amplitude(c_plus, Branch::Plus, p_range, x, t, consts)?;
        let b = mirror_amplitude(c_minus, Branch::Minus, p_range, x, t, consts)?;
        Ok(a.norm_sqr() + b.norm_sqr())
    }
}
