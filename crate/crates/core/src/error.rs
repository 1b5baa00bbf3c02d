use thiserror::Error;

/// Errors produced by the simulation layers.
///
/// Variants are split between configuration problems (bad parameters, bad
/// input data) and numerical-gate failures (an integration or search that ran
/// but did not meet its quality bound). The CLI maps the two groups onto
/// distinct exit codes.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cutoff_epsilon must lie in (0, 1e-6], got {0:e}")]
    InvalidCutoff(f64),
    #[error(
        "|alpha|^2 = {0} exceeds the exact-diagonalization guard of 1e4; \
         use the classical trajectory path (twigner) for photon numbers this large"
    )]
    AmplitudeTooLarge(f64),
    #[error("state blocks are invalid: {0}")]
    InvalidBlocks(String),
    #[error("evolution time gt must be finite, got {0}")]
    NonFiniteTime(f64),
    #[error("time grid must be non-empty, strictly increasing and start at 0")]
    BadTimeGrid,
    #[error("mean photon number of mode {0} is undefined: state has no blocks")]
    EmptyState(usize),
    #[error("density matrix is invalid: {0}")]
    InvalidDensityMatrix(String),
    #[error("axis must be strictly increasing with uniform spacing")]
    NonUniformAxis,
    #[error("trajectory count must be at least 1")]
    NoTrajectories,
    #[error(
        "integration step dt = {dt:e} exceeds the bound {bound:e} \
         (min of 1e-3 and 0.1/sqrt(|a1|^2 + 2|a2|^2))"
    )]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("trajectory state became non-finite at gt = {0}")]
    NonFiniteState(f64),
    #[error(
        "invariant |a1|^2 + 2|a2|^2 drifted by {drift:e} (> 1e-8) on {count} trajectories \
         (first offender: trajectory {first}); reduce dt"
    )]
    DriftGate { drift: f64, count: usize, first: usize },
    #[error("requested time gt = {0} is outside the recorded range")]
    TimeOutOfRange(f64),
    #[error("no depletion-revival cycle in range: series has no interior minimum followed by a maximum")]
    NoExtremum,
    #[error("smoothing window {window} does not fit a series of length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("power-law fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("power-law fit requires strictly positive (n, gt_max) pairs")]
    NonPositivePoint,
    #[error("series length {series} does not match time grid length {times}")]
    LengthMismatch { times: usize, series: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for failures of a numerical quality gate (as opposed to bad
    /// configuration or input).
    pub fn is_numerical_gate(&self) -> bool {
        matches!(
            self,
            Error::DriftGate { .. } | Error::NonFiniteState(_) | Error::NoExtremum
        )
    }
}
