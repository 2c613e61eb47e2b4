//! Adaptive-quadrature values for the reference Gaussian packet
//! (P0 = 5, σ = 0.25, plus branch, ħ = m = 1), computed once and frozen.
//! Both the oracle and the production trapezoid path are held to them.

use std::f64::consts::PI;

use stqm_core::arrival::{mirror_amplitude_at, oracle};
use stqm_core::{gaussian_spectrum, make_grid, Branch, Complex64, PhysicalConstants};

/// `(x, t, ρ(t|x), φ⁺(t|x))`
const FROZEN: [(f64, f64, f64, (f64, f64)); 5] = [
    (20.0, 3.5, 0.4853424678316531, (0.6578138440072535, -0.22939793910158357)),
    (20.0, 4.0, 0.8911677594889855, (0.8297823166385624, -0.4501433843598349)),
    (20.0, 4.5, 0.4674294288978134, (0.643236460570966, -0.23168142931609684)),
    (10.0, 2.0, 0.9664344267622784, (0.951264235841769, -0.2480539868066097)),
    (40.0, 8.3, 0.5928512499044293, (-0.06989467096896661, 0.7667894006013445)),
];

fn amplitude(p: f64) -> Complex64 {
    let s = 0.25;
    let norm = (2.0 * PI * s * s).powf(-0.25);
    Complex64::new(norm * (-(p - 5.0) * (p - 5.0) / (4.0 * s * s)).exp(), 0.0)
}

fn zero(_: f64) -> Complex64 {
    Complex64::new(0.0, 0.0)
}

#[test]
fn oracle_reproduces_frozen_values() {
    let c = PhysicalConstants::natural();
    for (x, t, rho, (re, im)) in FROZEN {
        let r = oracle::arrival_density(amplitude, zero, (0.01, 10.0), x, t, &c).unwrap();
        assert!((r - rho).abs() <= 1e-12 * rho, "rho({t}|{x}) = {r}");
        let a = oracle::mirror_amplitude(amplitude, Branch::Plus, (0.01, 10.0), x, t, &c).unwrap();
        assert!((a - Complex64::new(re, im)).norm() <= 1e-12, "phi+({t}|{x}) = {a}");
    }
}

#[test]
fn trapezoid_matches_frozen_values() {
    let c = PhysicalConstants::natural();
    let spec = gaussian_spectrum(5.0, 0.25, make_grid(0.01, 10.0, 2048).unwrap(), Branch::Plus).unwrap();
    for (x, t, rho, (re, im)) in FROZEN {
        let (a, b) = mirror_amplitude_at(&spec, x, t, &c).unwrap();
        assert_eq!(b, Complex64::new(0.0, 0.0));
        assert!((a.norm_sqr() - rho).abs() <= 1e-9 * rho, "rho({t}|{x}) = {}", a.norm_sqr());
        assert!((a - Complex64::new(re, im)).norm() <= 1e-9, "phi+({t}|{x}) = {a}");
    }
}
