//! Scenario runners behind the `arrival`, `stationary` and `bayes-demo`
//! commands. Each writes its CSV output and returns a report whose
//! `Display` is the standard-output summary.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use stqm_core::arrival::mirror_solution;
use stqm_core::bayes::{
    conditionals, joint_density, marginals, reconstruct_f, sample_events, DensityCdf, EventLog, JointDensity,
};
use stqm_core::stationary::{
    convolve_lorentzians, convolve_numeric, detection_time_stats, energy_distribution, PoissonDetection,
    MAX_SURVIVAL,
};
use stqm_core::{gaussian_spectrum, ComplexField, Complex64, Field2, Grid1D, PhysicalConstants, RealField};

use crate::config::{Scenario, ScenarioConfig};
use crate::csv::{fmt_f64, CsvWriter};
use crate::error::CliError;

fn require(cfg: &ScenarioConfig, scenario: Scenario) -> Result<(), CliError> {
    if cfg.scenario != scenario {
        return Err(CliError::Config(format!(
            "config describes scenario '{}', not '{}'",
            cfg.scenario.name(),
            scenario.name()
        )));
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalReport {
    /// `(x, ∫ρ dt, time of the largest ρ sample)` per detector position.
    pub positions: Vec<(f64, f64, f64)>,
}

impl fmt::Display for ArrivalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "x,integral_rho,peak_t")?;
        for &(x, n, p) in &self.positions {
            writeln!(f, "{},{},{}", fmt_f64(x), fmt_f64(n), fmt_f64(p))?;
        }
        Ok(())
    }
}

/// `ρ(t|x)` and both mirror components for every position in `x_list`.
pub fn run_arrival(cfg: &ScenarioConfig) -> Result<ArrivalReport, CliError> {
    require(cfg, Scenario::Arrival)?;
    let consts = cfg.constants()?;
    let spec = gaussian_spectrum(cfg.p0, cfg.sigma, cfg.p.grid()?, cfg.branch)?;
    let t_grid = cfg.t.grid()?;
    // evaluate everything before touching the output file
    let fields = cfg
        .x_list
        .iter()
        .map(|&x| mirror_solution(&spec, x, t_grid, &consts))
        .collect::<Result<Vec<_>, _>>()?;

    let header = ["t", "x", "rho", "phi_plus_re", "phi_plus_im", "phi_minus_re", "phi_minus_im"];
    let mut w = CsvWriter::new(create(Path::new(&cfg.output))?, &header)?;
    let mut positions = Vec::new();
    for phi in &fields {
        let rho = phi.density();
        for (i, t) in t_grid.points().enumerate() {
            let (a, b) = (phi.plus()[i], phi.minus()[i]);
            w.row(&[t, phi.x(), rho[i], a.re, a.im, b.re, b.im])?;
        }
        let field = RealField::new(t_grid, rho)?;
        positions.push((phi.x(), field.integral(), t_grid.point(field.argmax())));
    }
    w.finish()?;
    Ok(ArrivalReport { positions })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryReport {
    pub t_mean: f64,
    pub t_std: f64,
    pub fwhm: f64,
    pub fwhm_convolved: f64,
    pub uncertainty_product: f64,
}

impl fmt::Display for StationaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "T_mean,T_std,fwhm,fwhm_convolved,uncertainty_product")?;
        let v = [self.t_mean, self.t_std, self.fwhm, self.fwhm_convolved, self.uncertainty_product];
        writeln!(f, "{}", v.map(fmt_f64).join(","))
    }
}

/// Lorentzian energy profile of a Poisson-detected stationary state, and
/// the same profile broadened by a natural linewidth `Γ`.
pub fn run_stationary(cfg: &ScenarioConfig) -> Result<StationaryReport, CliError> {
    require(cfg, Scenario::Stationary)?;
    let consts = cfg.constants()?;
    let model = PoissonDetection::new(cfg.lambda)?;
    let eps_grid = cfg.eps.grid()?;
    let (profile, chi_sq) = energy_distribution(cfg.e_n, &model, eps_grid, &consts)?;
    let convolved = convolve_numeric(&profile, cfg.gamma, eps_grid, &consts)?;

    let mut w = CsvWriter::new(create(Path::new(&cfg.output))?, &["epsilon", "chi_sq", "chi_sq_convolved"])?;
    for (i, e) in eps_grid.points().enumerate() {
        w.row(&[e, chi_sq.values()[i], convolved.values()[i]])?;
    }
    w.finish()?;

    let (t_mean, t_std) = detection_time_stats(&model);
    let fwhm = profile.fwhm();
    Ok(StationaryReport {
        t_mean,
        t_std,
        fwhm,
        fwhm_convolved: convolve_lorentzians(cfg.lambda, cfg.gamma, cfg.e_n, &consts)?.fwhm(),
        uncertainty_product: t_std * fwhm,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BayesReport {
    pub n_events: usize,
    pub seed: u64,
    pub ks_t: f64,
    pub ks_x: f64,
    pub t_outside: usize,
    pub x_outside: usize,
    /// Largest `|f_reconstructed - f_marginal|` over times where the
    /// reconstruction is defined.
    pub reconstruct_max_abs_diff: f64,
    pub events_path: PathBuf,
}

impl fmt::Display for BayesReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n_events,seed,ks_t,ks_x,t_outside,x_outside,reconstruct_f_max_abs_diff")?;
        writeln!(
            f,
            "{},{},{},{},{},{},{}",
            self.n_events,
            self.seed,
            fmt_f64(self.ks_t),
            fmt_f64(self.ks_x),
            self.t_outside,
            self.x_outside,
            fmt_f64(self.reconstruct_max_abs_diff)
        )?;
        writeln!(f, "events written to {}", self.events_path.display())
    }
}

/// `<stem>_events.csv` next to the density file.
pub fn events_path(density_path: &Path) -> PathBuf {
    let stem = density_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    density_path.with_file_name(format!("{stem}_events.csv"))
}

/// Ground state of a harmonic trap of frequency `omega`.
pub fn oscillator_ground_state(x_grid: Grid1D, omega: f64, consts: &PhysicalConstants) -> ComplexField {
    let a = consts.mass() * omega / consts.hbar();
    let norm = (a / std::f64::consts::PI).powf(0.25);
    ComplexField::from_fn(x_grid, |x| Complex64::new(norm * (-0.5 * a * x * x).exp(), 0.0))
}

/// `P(x, t) = Λe^{-Λt} |ψ₀(x)|²` for the oscillator ground state, with both
/// factors rescaled to unit trapezoid integral on their grids. The time
/// window must hold all but [`MAX_SURVIVAL`] of the detections.
pub fn stationary_poisson_joint(cfg: &ScenarioConfig) -> Result<JointDensity, CliError> {
    let consts = cfg.constants()?;
    let model = PoissonDetection::new(cfg.lambda)?;
    let (x_grid, t_grid) = (cfg.x.grid()?, cfg.t.grid()?);
    let survival = model.survival(t_grid.stop());
    if survival >= MAX_SURVIVAL {
        return Err(stqm_core::Error::TimeWindow { survival }.into());
    }
    let psi_sq = oscillator_ground_state(x_grid, cfg.omega, &consts).norm_sqr();
    let psi_norm = psi_sq.integral();
    let f_raw = RealField::from_fn(t_grid, |t| model.pdf(t));
    let f_norm = f_raw.integral();
    let f = RealField::new(t_grid, f_raw.values().iter().map(|v| v / f_norm).collect())?;
    let psi = Field2::from_fn(x_grid, t_grid, |x, _| {
        psi_sq.values()[x_grid.index_of(x).expect("grid point")] / psi_norm
    });
    Ok(joint_density(&f, &psi)?)
}

pub fn write_events_csv<W: Write>(out: W, log: &EventLog) -> std::io::Result<W> {
    let mut w = CsvWriter::new(out, &["event_index", "x", "t"])?;
    for (k, e) in log.events.iter().enumerate() {
        w.indexed_row(k, &[e.x, e.t])?;
    }
    w.finish()
}

/// Detector-array protocol for a trapped particle under Poisson detection:
/// joint density, marginals, seeded events and their KS statistics.
pub fn run_bayes_demo(cfg: &ScenarioConfig) -> Result<BayesReport, CliError> {
    require(cfg, Scenario::BayesDemo)?;
    let joint = stationary_poisson_joint(cfg)?;
    let model = PoissonDetection::new(cfg.lambda)?;
    let (x_grid, t_grid) = (*joint.x_grid(), *joint.t_grid());
    let (f, g) = marginals(&joint);
    let (psi_c, phi_c) = conditionals(&joint);
    let mut max_diff = 0.0f64;
    for (c, t) in t_grid.points().enumerate() {
        if psi_c.is_defined(c) {
            max_diff = max_diff.max((reconstruct_f(&psi_c, &phi_c, t)? - f.values()[c]).abs());
        }
    }

    let model_name = format!("stationary-poisson lambda={} omega={}", fmt_f64(cfg.lambda), fmt_f64(cfg.omega));
    let log = sample_events(&joint, cfg.n_events, cfg.seed, &model_name)?;
    let g_cdf = DensityCdf::new(&g)?;
    let m = stqm_core::bayes::empirical_marginals(&log, t_grid, x_grid, |t| model.cdf(t), |x| g_cdf.cdf(x))?;

    let density_path = PathBuf::from(&cfg.output);
    let header = ["x", "t", "p_joint", "f_marginal", "g_marginal"];
    let mut w = CsvWriter::new(create(&density_path)?, &header)?;
    for (r, x) in x_grid.points().enumerate() {
        for (c, t) in t_grid.points().enumerate() {
            w.row(&[x, t, joint.get(r, c), f.values()[c], g.values()[r]])?;
        }
    }
    w.finish()?;
    let ev_path = events_path(&density_path);
    write_events_csv(create(&ev_path)?, &log)?;

    Ok(BayesReport {
        n_events: cfg.n_events,
        seed: cfg.seed,
        ks_t: m.ks_t,
        ks_x: m.ks_x,
        t_outside: m.t_outside,
        x_outside: m.x_outside,
        reconstruct_max_abs_diff: max_diff,
        events_path: ev_path,
    })
}
