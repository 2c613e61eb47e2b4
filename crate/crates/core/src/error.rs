use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Boundary of a two-dimensional sample array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    XStart,
    XEnd,
    TStart,
    TEnd,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Edge::XStart => "x-start",
            Edge::XEnd => "x-end",
            Edge::TStart => "t-start",
            Edge::TEnd => "t-end",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: expected {expected} samples, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("{what} is not normalized: integral {integral} outside 1 ± {tolerance}")]
    NotNormalized {
        what: String,
        integral: f64,
        tolerance: f64,
    },

    #[error("cannot normalize a spectrum with zero total weight")]
    ZeroSpectrum,

    #[error(
        "momentum grid too coarse: step {step} times phase rate {phase_rate} exceeds pi/4; \
         use at least {required_count} points"
    )]
    PhaseResolution {
        step: f64,
        phase_rate: f64,
        required_count: usize,
    },

    #[error("{lost_fraction} of the spectrum mass lies outside the grid (limit 0.01)")]
    Truncation { lost_fraction: f64 },

    #[error("samples do not decay at the {edge} edge: |edge|/max = {ratio} (limit 1e-6)")]
    BoundaryDecay { edge: Edge, ratio: f64 },

    #[error("time window too short: exp(-lambda * t_max) = {survival} (limit 1e-8)")]
    TimeWindow { survival: f64 },

    #[error("singular configuration: {0}")]
    Singular(String),
}

impl Error {
    /// True for failures raised by numerical guards (resolution, truncation,
    /// decay, singularity), as opposed to malformed input.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(
            self,
            Error::PhaseResolution { .. }
                | Error::Truncation { .. }
                | Error::BoundaryDecay { .. }
                | Error::TimeWindow { .. }
                | Error::Singular(_)
                | Error::NotNormalized { .. }
                | Error::ZeroSpectrum
        )
    }
}
