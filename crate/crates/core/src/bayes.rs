//! Detection-event densities `P(x, t) = f(t) |ψ(x|t)|² = g(x) |φ(t|x)|²`.
//!
//! Everything here works at the level of densities, so the phases of the
//! amplitude factorization never enter. Joint densities are stored with x
//! along rows and t along columns.

use alloc::{format, string::String, vec::Vec};
use core::ops::Range;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

#[allow(unused_imports)] // f64 math when std is absent
use num_traits::Float;
use crate::{quad, Error, Field2, Grid1D, RealField, Result};

/// Tolerance on the normalization of `f` and of every `|ψ(x|t)|²` slice.
pub const INPUT_TOLERANCE: f64 = 1e-6;

/// Tolerance on the normalization of a joint density.
pub const JOINT_TOLERANCE: f64 = 1e-4;

/// Marginal values below this fraction of their peak leave the matching
/// conditional slice undefined.
pub const DEFINED_THRESHOLD: f64 = 1e-12;

/// Smallest `|φ(t|x)|²` usable as a divisor.
pub const SINGULAR_FLOOR: f64 = 1e-300;

/// Words of ChaCha20 keystream reserved per event.
const WORDS_PER_EVENT: u128 = 8;

/// Non-negative `P(x, t)` on an x (rows) by t (columns) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDensity {
    values: Field2<f64>,
}

impl JointDensity {
    /// Wraps samples that are non-negative and integrate to one within
    /// [`JOINT_TOLERANCE`].
    pub fn new(values: Field2<f64>) -> Result<Self> {
        if let Some(v) = values.values().iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidArgument(format!("joint density has invalid sample {v}")));
        }
        let total = values.integral();
        if (total - 1.0).abs() > JOINT_TOLERANCE {
            return Err(Error::NotNormalized { what: "joint density".into(), integral: total, tolerance: JOINT_TOLERANCE });
        }
        Ok(Self { values })
    }

    pub fn x_grid(&self) -> &Grid1D {
        self.values.rows()
    }

    pub fn t_grid(&self) -> &Grid1D {
        self.values.cols()
    }

    pub fn values(&self) -> &Field2<f64> {
        &self.values
    }

    pub fn get(&self, ix: usize, it: usize) -> f64 {
        self.values.get(ix, it)
    }
}

/// `P(x, t) = f(t) |ψ(x|t)|²`.
///
/// `f` must be non-negative with unit integral, and every slice of `psi_sq`
/// at a time where `f > 0` must integrate to one over x.
pub fn joint_density(f: &RealField, psi_sq: &Field2<f64>) -> Result<JointDensity> {
    if !f.grid().same_as(psi_sq.cols()) {
        return Err(Error::InvalidArgument("f and psi_sq must share the time grid".into()));
    }
    if f.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("f must be finite and non-negative".into()));
    }
    let fi = f.integral();
    if (fi - 1.0).abs() > INPUT_TOLERANCE {
        return Err(Error::NotNormalized { what: "f".into(), integral: fi, tolerance: INPUT_TOLERANCE });
    }
    let xg = *psi_sq.rows();
    for (c, &fc) in f.values().iter().enumerate() {
        if fc == 0.0 {
            continue;
        }
        let s = quad::trapezoid_with(&xg, |r| psi_sq.get(r, c));
        if (s - 1.0).abs() > INPUT_TOLERANCE {
            return Err(Error::NotNormalized {
                what: format!("psi_sq slice at t = {}", f.grid().point(c)),
                integral: s,
                tolerance: INPUT_TOLERANCE,
            });
        }
    }
    let nt = f.grid().count();
    let values = psi_sq.values().iter().enumerate().map(|(k, &v)| v * f.values()[k % nt]).collect();
    JointDensity::new(Field2::new(xg, *f.grid(), values)?)
}

/// `(f(t), g(x)) = (∫P dx, ∫P dt)`.
pub fn marginals(joint: &JointDensity) -> (RealField, RealField) {
    (joint.values.integrate_rows(), joint.values.integrate_cols())
}

/// Which variable a conditional density is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Given {
    /// `|ψ(x|t)|²`: one slice per time sample.
    Time,
    /// `|φ(t|x)|²`: one slice per position sample.
    Position,
}

/// Conditional density on the joint grid, with a flag per slice. Undefined
/// slices hold zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalDensity {
    given: Given,
    values: Field2<f64>,
    defined: Vec<bool>,
}

impl ConditionalDensity {
    pub fn new(given: Given, values: Field2<f64>, defined: Vec<bool>) -> Result<Self> {
        let n = match given {
            Given::Time => values.cols().count(),
            Given::Position => values.rows().count(),
        };
        if defined.len() != n {
            return Err(Error::ShapeMismatch { expected: n, found: defined.len() });
        }
        Ok(Self { given, values, defined })
    }

    /// Every slice marked defined.
    pub fn fully_defined(given: Given, values: Field2<f64>) -> Self {
        let n = match given {
            Given::Time => values.cols().count(),
            Given::Position => values.rows().count(),
        };
        Self { given, values, defined: alloc::vec![true; n] }
    }

    pub fn given(&self) -> Given {
        self.given
    }

    pub fn values(&self) -> &Field2<f64> {
        &self.values
    }

    pub fn defined(&self) -> &[bool] {
        &self.defined
    }

    pub fn is_defined(&self, slice: usize) -> bool {
        self.defined[slice]
    }

    /// Samples of slice `i`, or `None` if it is undefined.
    pub fn slice(&self, i: usize) -> Option<Vec<f64>> {
        if !self.defined[i] {
            return None;
        }
        Some(match self.given {
            Given::Time => self.values.col(i),
            Given::Position => self.values.row(i).to_vec(),
        })
    }

    /// Copy with every undefined slice replaced by the uniform density, so
    /// the result can be fed back into [`joint_density`].
    pub fn filled_uniform(&self) -> Field2<f64> {
        let mut out = self.values.clone();
        let (xg, tg) = (*self.values.rows(), *self.values.cols());
        let nt = tg.count();
        for (i, _) in self.defined.iter().enumerate().filter(|(_, d)| !**d) {
            match self.given {
                Given::Time => {
                    let u = 1.0 / (xg.stop() - xg.start());
                    for r in 0..xg.count() {
                        out.values_mut()[r * nt + i] = u;
                    }
                }
                Given::Position => {
                    let u = 1.0 / (tg.stop() - tg.start());
                    out.values_mut()[i * nt..(i + 1) * nt].iter_mut().for_each(|v| *v = u);
                }
            }
        }
        out
    }
}

/// `(|ψ(x|t)|², |φ(t|x)|²) = (P/f(t), P/g(x))`.
///
/// Slices whose marginal is below [`DEFINED_THRESHOLD`] times the marginal's
/// peak are flagged undefined. Defined slices are renormalized to unit
/// integral.
pub fn conditionals(joint: &JointDensity) -> (ConditionalDensity, ConditionalDensity) {
    let (f, g) = marginals(joint);
    let (xg, tg) = (*joint.x_grid(), *joint.t_grid());
    let (nx, nt) = (xg.count(), tg.count());
    let mask = |m: &RealField| {
        let peak = m.values().iter().fold(0.0f64, |a, &b| a.max(b));
        m.values().iter().map(|&v| peak > 0.0 && v > DEFINED_THRESHOLD * peak).collect::<Vec<_>>()
    };

    let f_ok = mask(&f);
    let mut psi = alloc::vec![0.0; nx * nt];
    for c in (0..nt).filter(|&c| f_ok[c]) {
        let s = quad::trapezoid_with(&xg, |r| joint.get(r, c) / f.values()[c]);
        for r in 0..nx {
            psi[r * nt + c] = joint.get(r, c) / f.values()[c] / s;
        }
    }

    let g_ok = mask(&g);
    let mut phi = alloc::vec![0.0; nx * nt];
    for r in (0..nx).filter(|&r| g_ok[r]) {
        let row = joint.values.row(r);
        let s = quad::trapezoid_with(&tg, |c| row[c] / g.values()[r]);
        for c in 0..nt {
            phi[r * nt + c] = row[c] / g.values()[r] / s;
        }
    }

    let field = |v| Field2::new(xg, tg, v).expect("joint shape");
    (
        ConditionalDensity { given: Given::Time, values: field(psi), defined: f_ok },
        ConditionalDensity { given: Given::Position, values: field(phi), defined: g_ok },
    )
}

/// `f(t) = [∫ |ψ(x|t)|² / |φ(t|x)|² dx]⁻¹` at a time sample `t`.
///
/// Positions whose `φ` slice is undefined are left out of the integral.
/// Fails with [`Error::Singular`] when the `ψ` slice at `t` is undefined or
/// when a non-zero `ψ` meets a `φ` below [`SINGULAR_FLOOR`].
pub fn reconstruct_f(psi_sq: &ConditionalDensity, phi_sq: &ConditionalDensity, t: f64) -> Result<f64> {
    if psi_sq.given != Given::Time || phi_sq.given != Given::Position {
        return Err(Error::InvalidArgument("expected |ψ(x|t)|² and |φ(t|x)|² in that order".into()));
    }
    let (xg, tg) = (*psi_sq.values.rows(), *psi_sq.values.cols());
    if !(xg.same_as(phi_sq.values.rows()) && tg.same_as(phi_sq.values.cols())) {
        return Err(Error::InvalidArgument("conditionals must share one grid".into()));
    }
    let c = tg
        .exact_index_of(t)
        .ok_or_else(|| Error::InvalidArgument(format!("t = {t} is not a grid point")))?;
    if !psi_sq.defined[c] {
        return Err(Error::Singular(format!("f vanishes at t = {t}")));
    }
    let mut acc = 0.0;
    for r in 0..xg.count() {
        let num = psi_sq.values.get(r, c);
        if num == 0.0 || !phi_sq.defined[r] {
            continue;
        }
        let den = phi_sq.values.get(r, c);
        if den < SINGULAR_FLOOR {
            return Err(Error::Singular(format!(
                "|φ(t|x)|² = {den} at x = {}, t = {t} with non-zero |ψ(x|t)|²",
                xg.point(r)
            )));
        }
        acc += xg.weight(r) * num / den;
    }
    if acc == 0.0 {
        return Err(Error::Singular(format!("no usable positions at t = {t}")));
    }
    Ok(1.0 / acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionEvent {
    pub x: f64,
    pub t: f64,
}

/// Events from one seeded run, in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub events: Vec<DetectionEvent>,
    pub seed: u64,
    pub model: String,
}

/// Cumulative cell masses `Σ w_i p_i`, where `w_i` is the trapezoid weight.
fn cumulative(grid: &Grid1D, p: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..grid.count())
        .map(|i| {
            acc += grid.weight(i) * p(i);
            acc
        })
        .collect()
}

/// Draws from a cumulative table: the cell index, then a uniform point
/// inside that cell.
fn draw(grid: &Grid1D, cdf: &[f64], u_cell: f64, u_jitter: f64) -> f64 {
    let total = cdf[cdf.len() - 1];
    let target = u_cell * total;
    let i = cdf.partition_point(|&c| c <= target).min(cdf.len() - 1);
    let (lo, hi) = grid.cell(i);
    lo + u_jitter * (hi - lo)
}

fn uniform(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// `n` independent detection events drawn from `joint`.
///
/// Time comes first from the marginal `f`, then position from the column of
/// `P` at that time; both are exact on the grid cells with uniform jitter
/// inside each cell.
pub fn sample_events(joint: &JointDensity, n: usize, seed: u64, model: &str) -> Result<EventLog> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one event".into()));
    }
    Ok(EventLog { events: sample_events_range(joint, 0..n, seed), seed, model: model.into() })
}

/// Events with indices in `range` of the stream defined by `seed`. Event `k`
/// reads its own block of keystream, so splitting the index range across
/// calls gives the same events as one call.
pub fn sample_events_range(joint: &JointDensity, range: Range<usize>, seed: u64) -> Vec<DetectionEvent> {
    let (xg, tg) = (*joint.x_grid(), *joint.t_grid());
    let (f, _) = marginals(joint);
    let t_cdf = cumulative(&tg, |c| f.values()[c]);
    let x_cdfs: Vec<Vec<f64>> = (0..tg.count()).map(|c| cumulative(&xg, |r| joint.get(r, c))).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    range
        .map(|k| {
            rng.set_word_pos(k as u128 * WORDS_PER_EVENT);
            let (a, b, c, d) = (uniform(&mut rng), uniform(&mut rng), uniform(&mut rng), uniform(&mut rng));
            let t = draw(&tg, &t_cdf, a, b);
            let col = tg.cell_of(t).expect("drawn inside grid");
            let x = draw(&xg, &x_cdfs[col], c, d);
            DetectionEvent { x, t }
        })
        .collect()
}

/// Cumulative distribution of a sampled density, integrating its linear
/// interpolant exactly and normalizing to one at the top of the grid.
#[derive(Debug, Clone)]
pub struct DensityCdf {
    grid: Grid1D,
    values: Vec<f64>,
    nodes: Vec<f64>,
}

impl DensityCdf {
    pub fn new(density: &RealField) -> Result<Self> {
        let g = *density.grid();
        let v = density.values().to_vec();
        let mut nodes = alloc::vec![0.0; v.len()];
        for i in 1..v.len() {
            nodes[i] = nodes[i - 1] + 0.5 * g.step() * (v[i - 1] + v[i]);
        }
        let total = nodes[v.len() - 1];
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidArgument("reference density has no mass".into()));
        }
        nodes.iter_mut().for_each(|c| *c /= total);
        let values = v.iter().map(|d| d / total).collect();
        Ok(Self { grid: g, values, nodes })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let g = &self.grid;
        if x <= g.start() {
            return 0.0;
        }
        if x >= g.stop() {
            return 1.0;
        }
        let s = (x - g.start()) / g.step();
        let i = (s.floor() as usize).min(g.count() - 2);
        let h = x - g.point(i);
        let slope = (self.values[i + 1] - self.values[i]) / g.step();
        self.nodes[i] + self.values[i] * h + 0.5 * slope * h * h
    }
}

/// Kolmogorov–Smirnov distance `sup |F_n - F|` between a sample and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    s.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    })
}

/// Normalized histogram on the cells of `grid`, and the number of samples
/// that fell outside it.
pub fn histogram(samples: &[f64], grid: Grid1D) -> (RealField, usize) {
    let mut counts = alloc::vec![0usize; grid.count()];
    let mut outside = 0;
    for &v in samples {
        match grid.cell_of(v) {
            Some(i) => counts[i] += 1,
            None => outside += 1,
        }
    }
    let inside = (samples.len() - outside).max(1) as f64;
    let dens = counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let (lo, hi) = grid.cell(i);
            c as f64 / (inside * (hi - lo))
        })
        .collect();
    (RealField::new(grid, dens).expect("length matches grid"), outside)
}

/// Histograms and KS statistics of an event log against reference
/// marginals.
#[derive(Debug, Clone)]
pub struct EmpiricalMarginals {
    pub t_histogram: RealField,
    pub x_histogram: RealField,
    pub ks_t: f64,
    pub ks_x: f64,
    pub t_outside: usize,
    pub x_outside: usize,
}

pub fn empirical_marginals(
    log: &EventLog,
    t_grid: Grid1D,
    x_grid: Grid1D,
    t_cdf: impl Fn(f64) -> f64,
    x_cdf: impl Fn(f64) -> f64,
) -> Result<EmpiricalMarginals> {
    if log.events.is_empty() {
        return Err(Error::InvalidArgument("event log is empty".into()));
    }
    let ts: Vec<f64> = log.events.iter().map(|e| e.t).collect();
    let xs: Vec<f64> = log.events.iter().map(|e| e.x).collect();
    let (t_histogram, t_outside) = histogram(&ts, t_grid);
    let (x_histogram, x_outside) = histogram(&xs, x_grid);
    Ok(EmpiricalMarginals {
        t_histogram,
        x_histogram,
        ks_t: ks_statistic(&ts, t_cdf),
        ks_x: ks_statistic(&xs, x_cdf),
        t_outside,
        x_outside,
    })
}
