//! Flat `key = value` scenario files.
//!
//! Blank lines and anything after `#` are ignored. Unknown or repeated keys
//! are errors. Keys left out take the defaults of the chosen scenario.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use stqm_core::{make_grid, Branch, Grid1D, PhysicalConstants};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Arrival,
    Stationary,
    BayesDemo,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Arrival => "arrival",
            Scenario::Stationary => "stationary",
            Scenario::BayesDemo => "bayes-demo",
        }
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "arrival" => Ok(Scenario::Arrival),
            "stationary" => Ok(Scenario::Stationary),
            "bayes-demo" => Ok(Scenario::BayesDemo),
            _ => Err(CliError::Config(format!("unknown scenario '{s}'"))),
        }
    }
}

/// Start, stop and point count of a uniform axis (both ends included).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub const fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn grid(&self) -> Result<Grid1D, CliError> {
        make_grid(self.start, self.stop, self.count).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub hbar: f64,
    pub mass: f64,
    pub p0: f64,
    pub sigma: f64,
    pub branch: Branch,
    pub p: GridSpec,
    pub t: GridSpec,
    pub x: GridSpec,
    pub eps: GridSpec,
    pub e_n: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Oscillator frequency of the confined ground state.
    pub omega: f64,
    pub x_list: Vec<f64>,
    pub seed: u64,
    pub n_events: usize,
    pub output: String,
}

const KEYS: &[&str] = &[
    "scenario", "hbar", "mass", "p0", "sigma", "branch", "p_start", "p_stop", "p_count", "t_start", "t_stop",
    "t_count", "x_start", "x_stop", "x_count", "eps_start", "eps_stop", "eps_count", "e_n", "lambda", "gamma",
    "omega", "x_list", "seed", "n_events", "output",
];

impl ScenarioConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let base = Self {
            scenario,
            hbar: 1.0,
            mass: 1.0,
            p0: 5.0,
            sigma: 0.25,
            branch: Branch::Plus,
            p: GridSpec::new(0.01, 10.0, 2048),
            t: GridSpec::new(0.0, 12.0, 2401),
            x: GridSpec::new(-8.0, 8.0, 161),
            eps: GridSpec::new(-19.0, 21.0, 4001),
            e_n: 1.0,
            lambda: 1.0,
            gamma: 0.0,
            omega: 1.0,
            x_list: vec![10.0, 20.0, 40.0],
            seed: 42,
            n_events: 100_000,
            output: String::new(),
        };
        match scenario {
            Scenario::Arrival => Self { output: "arrival.csv".into(), ..base },
            Scenario::Stationary => Self { output: "stationary.csv".into(), ..base },
            Scenario::BayesDemo => {
                Self { t: GridSpec::new(0.0, 20.0, 401), output: "bayes.csv".into(), ..base }
            }
        }
    }

    pub fn constants(&self) -> Result<PhysicalConstants, CliError> {
        PhysicalConstants::new(self.hbar, self.mass).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parses a config file. `fallback` picks the scenario when the file has
    /// no `scenario` key.
    pub fn parse(text: &str, fallback: Scenario) -> Result<Self, CliError> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected 'key = value'", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(CliError::Config(format!("line {}: unknown key '{k}'", n + 1)));
            }
            if pairs.iter().any(|(seen, _)| seen == k) {
                return Err(CliError::Config(format!("line {}: duplicate key '{k}'", n + 1)));
            }
            pairs.push((k.to_string(), v.to_string()));
        }
        let scenario = match pairs.iter().find(|(k, _)| k == "scenario") {
            Some((_, v)) => v.parse()?,
            None => fallback,
        };
        let mut cfg = Self::defaults(scenario);
        for (k, v) in &pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "scenario" => self.scenario = v.parse()?,
            "hbar" => self.hbar = num(key, v)?,
            "mass" => self.mass = num(key, v)?,
            "p0" => self.p0 = num(key, v)?,
            "sigma" => self.sigma = num(key, v)?,
            "branch" => {
                self.branch = match v {
                    "plus" => Branch::Plus,
                    "minus" => Branch::Minus,
                    "both" => Branch::Both,
                    _ => return Err(CliError::Config(format!("branch must be plus, minus or both, got '{v}'"))),
                }
            }
            "p_start" => self.p.start = num(key, v)?,
            "p_stop" => self.p.stop = num(key, v)?,
            "p_count" => self.p.count = num(key, v)?,
            "t_start" => self.t.start = num(key, v)?,
            "t_stop" => self.t.stop = num(key, v)?,
            "t_count" => self.t.count = num(key, v)?,
            "x_start" => self.x.start = num(key, v)?,
            "x_stop" => self.x.stop = num(key, v)?,
            "x_count" => self.x.count = num(key, v)?,
            "eps_start" => self.eps.start = num(key, v)?,
            "eps_stop" => self.eps.stop = num(key, v)?,
            "eps_count" => self.eps.count = num(key, v)?,
            "e_n" => self.e_n = num(key, v)?,
            "lambda" => self.lambda = num(key, v)?,
            "gamma" => self.gamma = num(key, v)?,
            "omega" => self.omega = num(key, v)?,
            "x_list" => {
                self.x_list = if v.is_empty() {
                    Vec::new()
                } else {
                    v.split(',').map(|s| num(key, s.trim())).collect::<Result<_, _>>()?
                }
            }
            "seed" => self.seed = num(key, v)?,
            "n_events" => self.n_events = num(key, v)?,
            "output" => self.output = v.to_string(),
            _ => unreachable!("keys are checked against KEYS"),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.constants()?;
        let positive = [("p0", self.p0), ("sigma", self.sigma), ("lambda", self.lambda), ("omega", self.omega)];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("{k} must be positive, got {v}")));
            }
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(CliError::Config(format!("gamma must be non-negative, got {}", self.gamma)));
        }
        if !self.e_n.is_finite() {
            return Err(CliError::Config("e_n must be finite".into()));
        }
        for g in [&self.p, &self.t, &self.x, &self.eps] {
            g.grid()?;
        }
        if self.scenario == Scenario::Arrival && self.x_list.is_empty() {
            return Err(CliError::Config("x_list must name at least one detector position".into()));
        }
        if self.x_list.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("x_list entries must be finite".into()));
        }
        if self.scenario == Scenario::BayesDemo && self.n_events == 0 {
            return Err(CliError::Config("n_events must be at least 1".into()));
        }
        if self.output.is_empty() {
            return Err(CliError::Config("output path is empty".into()));
        }
        Ok(())
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse '{v}'")))
}

impl fmt::Display for ScenarioConfig {
    /// Every key in a fixed order; numbers use the shortest round-trip
    /// form, so the output parses back to an identical config.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let branch = match self.branch {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
            Branch::Both => "both",
        };
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}");
        kv("scenario", self.scenario.name().into())?;
        kv("hbar", format!("{:?}", self.hbar))?;
        kv("mass", format!("{:?}", self.mass))?;
        kv("p0", format!("{:?}", self.p0))?;
        kv("sigma", format!("{:?}", self.sigma))?;
        kv("branch", branch.into())?;
        for (name, g) in [("p", &self.p), ("t", &self.t), ("x", &self.x), ("eps", &self.eps)] {
            kv(&format!("{name}_start"), format!("{:?}", g.start))?;
            kv(&format!("{name}_stop"), format!("{:?}", g.stop))?;
            kv(&format!("{name}_count"), g.count.to_string())?;
        }
        kv("e_n", format!("{:?}", self.e_n))?;
        kv("lambda", format!("{:?}", self.lambda))?;
        kv("gamma", format!("{:?}", self.gamma))?;
        kv("omega", format!("{:?}", self.omega))?;
        kv("x_list", self.x_list.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", "))?;
        kv("seed", self.seed.to_string())?;
        kv("n_events", self.n_events.to_string())?;
        kv("output", self.output.clone())?;
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        for s in [Scenario::Arrival, Scenario::Stationary, Scenario::BayesDemo] {
            ScenarioConfig::defaults(s).validate().unwrap();
        }
    }

    #[test]
    fn comments_and_overrides() {
        let text = "# arrival run\nscenario = arrival\np0 = 4.5   # slower\n\nx_list = 5, 7.5\n";
        let c = ScenarioConfig::parse(text, Scenario::Stationary).unwrap();
        assert_eq!(c.scenario, Scenario::Arrival);
        assert_eq!(c.p0, 4.5);
        assert_eq!(c.x_list, vec![5.0, 7.5]);
        assert_eq!(c.sigma, 0.25);
    }

    #[test]
    fn rejects_bad_files() {
        let bad = [
            "colour = red",
            "p0 = 1\np0 = 2",
            "p0 1",
            "p0 = fast",
            "x_list =",
            "t_count = 1",
            "sigma = -1",
            "scenario = orbit",
            "branch = up",
        ];
        for text in bad {
            assert!(
                matches!(ScenarioConfig::parse(text, Scenario::Arrival), Err(CliError::Config(_))),
                "accepted {text:?}"
            );
        }
    }
}
