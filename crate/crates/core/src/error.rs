use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("EP_DEGENERATE: |w|^2 + z^2 = {magnitude:e} at s = {s} (eigenvalues coalesce)")]
    EpDegenerate { s: f64, magnitude: f64 },
    #[error("ZERO_DENOMINATOR: v(v{sign}z) vanishes at s = {s}")]
    ZeroDenominator { s: f64, sign: char },
    #[error("AMBIGUOUS_BRANCH: matching margin {margin:.3} below 2 at s = {s}")]
    AmbiguousBranch { s: f64, margin: f64 },
    #[error("STEP_TOO_COARSE: finite-difference generators disagree by {discrepancy:e} at s = {s}")]
    StepTooCoarse { s: f64, discrepancy: f64 },
    #[error("SAMPLING_ERROR: phase quadrature changes by {change:e} under refinement")]
    SamplingError { change: f64 },
    #[error("ZERO_GAUGE: gauge factor of branch {branch} vanishes at s = {s}")]
    ZeroGauge { s: f64, branch: usize },
    #[error("GAUGE_NOT_NORMALIZED: gauge factor of branch {branch} is {value} at s = 0, expected 1")]
    GaugeNotNormalized { branch: usize, value: f64 },
    #[error("NONFINITE_STATE: wavefunction became non-finite at s = {s}")]
    NonfiniteState { s: f64 },
    #[error("OVERFLOW_GUARD: |Re ∫A_{branch}{branch}| = {value:.1} exceeds 700 at s = {s}")]
    OverflowGuard { s: f64, branch: usize, value: f64 },
    #[error("NOT_SYMMETRIC: Im(w) = {im_w:e} at s = {s}; c-product normalization requires H = H^T")]
    NotSymmetric { s: f64, im_w: f64 },
    #[error("SELF_ORTHOGONAL: r^T r of branch {branch} vanishes at s = {s}")]
    SelfOrthogonal { s: f64, branch: usize },
    #[error("ZERO_STATE: D^†D vanishes at s = {s}")]
    ZeroState { s: f64 },
    #[error("GAP_COLLAPSE: |E1 - E2| = {gap:e} at s = {s}")]
    GapCollapse { s: f64, gap: f64 },
    #[error("NOT_CLOSED: path endpoints differ, holonomy requires a closed loop")]
    NotClosed,
    #[error("config error: {0}")]
    Config(String),
    #[error("{operation} failed in scenario '{scenario}': {source}")]
    Scenario {
        scenario: String,
        operation: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Stable identifier for the failure class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EpDegenerate { .. } => "EP_DEGENERATE",
            Error::ZeroDenominator { .. } => "ZERO_DENOMINATOR",
            Error::AmbiguousBranch { .. } => "AMBIGUOUS_BRANCH",
            Error::StepTooCoarse { .. } => "STEP_TOO_COARSE",
            Error::SamplingError { .. } => "SAMPLING_ERROR",
            Error::ZeroGauge { .. } => "ZERO_GAUGE",
            Error::GaugeNotNormalized { .. } => "GAUGE_NOT_NORMALIZED",
            Error::NonfiniteState { .. } => "NONFINITE_STATE",
            Error::OverflowGuard { .. } => "OVERFLOW_GUARD",
            Error::NotSymmetric { .. } => "NOT_SYMMETRIC",
            Error::SelfOrthogonal { .. } => "SELF_ORTHOGONAL",
            Error::ZeroState { .. } => "ZERO_STATE",
            Error::GapCollapse { .. } => "GAP_COLLAPSE",
            Error::NotClosed => "NOT_CLOSED",
            Error::Config(_) => "CONFIG",
            Error::Scenario { source, .. } => source.code(),
        }
    }

    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::NotClosed | Error::GaugeNotNormalized { .. } => true,
            Error::Scenario { source, .. } => source.is_config(),
            _ => false,
        }
    }

    pub(crate) fn in_scenario(self, scenario: &str, operation: &'static str) -> Error {
        match self {
            e @ Error::Scenario { .. } => e,
            e => Error::Scenario {
                scenario: scenario.to_string(),
                operation,
                source: Box::new(e),
            },
        }
    }
}
