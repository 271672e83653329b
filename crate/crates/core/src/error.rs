use std::fmt;

/// Errors produced by the analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain an operation accepts.
    Domain {
        param: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A waveform with no segments was passed where a period is required.
    EmptyWaveform,
    /// THD or a relative spectrum was requested for a signal with no fundamental.
    ZeroFundamental,
    /// The k scan found no sign change of the target harmonic on (0, 1).
    NoEliminationSolution {
        m: f64,
        target: u32,
        /// Smallest |c_target| / |c_1| seen during the scan.
        scan_min: f64,
        /// k at which the scan minimum was observed.
        scan_min_k: f64,
    },
    /// The machine state diverged during integration.
    Unstable { dt: f64, t: f64 },
    /// The measurement window does not contain a whole fundamental cycle.
    WindowTooShort { available: f64, required: f64 },
}

impl Error {
    pub(crate) fn domain(param: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            param,
            value,
            expected,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain {
                param,
                value,
                expected,
            } => write!(f, "domain error: {param} = {value} (expected {expected})"),
            Error::EmptyWaveform => write!(f, "waveform has no segments"),
            Error::ZeroFundamental => write!(f, "fundamental component is zero"),
            Error::NoEliminationSolution {
                m,
                target,
                scan_min,
                scan_min_k,
            } => write!(
                f,
                "no elimination solution at this m: m = {m}, harmonic {target}, \
                 scan minimum |c_{target}|/|c_1| = {scan_min:.3e} at k = {scan_min_k:.4}"
            ),
            Error::Unstable { dt, t } => {
                write!(f, "integration diverged at t = {t:.6e} s with dt = {dt:.3e} s")
            }
            Error::WindowTooShort {
                available,
                required,
            } => write!(
                f,
                "measurement window too short: {available:.6e} s available, {required:.6e} s required"
            ),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoEliminationSolution { .. } | Error::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
