use std::fmt;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operator dimension too small to be meaningful (needs >= 2).
    InvalidDimension(usize),
    /// Two operands (or an operator and a layout slot) disagree in dimension.
    DimensionMismatch { expected: usize, found: usize },
    /// Non-finite entry fed to a numeric routine.
    NonFiniteInput,
    /// A denominator of a closed-form expression vanished (resonant point).
    ResonantDenominator(&'static str),
    /// Bisection bracket did not contain the calibration target.
    CalibrationFailed { target_mhz: f64, reached_mhz: f64 },
    /// Spectrum quantity did not stabilize under cutoff growth.
    CutoffNotConverged { n_max: usize, rel_change: f64 },
    /// Trace left the unit value beyond the allowed drift during integration.
    TraceDrift { t: f64, drift: f64 },
    /// Exponential fit rejected the input series.
    FitError(&'static str),
    /// Pulse parameter out of its admissible range.
    InvalidPulse(&'static str),
    /// Gate-protocol precondition violated (detuning margin, zero coupling).
    ProtocolViolation(&'static str),
    /// Axis pair not expressible with the native gate set.
    UnsupportedAxisPair(char, char),
    /// State vector is not normalized.
    UnnormalizedState(f64),
    /// Configuration text failed to parse or validate.
    Config { line: usize, col: usize, message: String },
    /// Experiment name not present in the registry.
    UnknownExperiment { name: String, registry: Vec<String> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(d) => write!(f, "operator dimension {d} is below 2"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFiniteInput => write!(f, "non-finite entry in numeric input"),
            Error::ResonantDenominator(what) => {
                write!(f, "resonant denominator in {what}")
            }
            Error::CalibrationFailed { target_mhz, reached_mhz } => write!(
                f,
                "calibration bracket exhausted: target {target_mhz} MHz, best {reached_mhz} MHz"
            ),
            Error::CutoffNotConverged { n_max, rel_change } => write!(
                f,
                "spectrum not converged at cutoff {n_max} (relative change {rel_change:.2e})"
            ),
            Error::TraceDrift { t, drift } => {
                write!(f, "trace drifted by {drift:.2e} at t = {t} us")
            }
            Error::FitError(why) => write!(f, "decay fit failed: {why}"),
            Error::InvalidPulse(why) => write!(f, "invalid pulse: {why}"),
            Error::ProtocolViolation(why) => write!(f, "gate protocol violation: {why}"),
            Error::UnsupportedAxisPair(a, b) => {
                write!(f, "axis pair {a}{b} not supported by the compiler")
            }
            Error::UnnormalizedState(n) => {
                write!(f, "state vector norm {n} differs from 1 beyond tolerance")
            }
            Error::Config { line, col, message } => {
                write!(f, "config error at line {line}, column {col}: {message}")
            }
            Error::UnknownExperiment { name, registry } => write!(
                f,
                "unknown experiment '{name}'; available: {}",
                registry.join(", ")
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
