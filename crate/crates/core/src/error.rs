use thiserror::Error;

/// Errors raised anywhere in the analysis pipeline.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`])
/// and a process exit status used by the `harmderate` binary.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("harmonic order {order} at {frequency_hz} Hz is at or above the Nyquist limit of {nyquist_hz} Hz")]
    Aliasing {
        order: u32,
        frequency_hz: f64,
        nyquist_hz: f64,
    },

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("FFT length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("diode state iteration did not converge at t = {time_s} s (timestep {timestep_s} s) after {iterations} iterations")]
    NonConvergent {
        time_s: f64,
        timestep_s: f64,
        iterations: usize,
    },

    #[error("solver diverged at t = {time_s} s: |i| = {current_a} A")]
    Diverged { time_s: f64, current_a: f64 },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Stable code printed as a prefix on the error stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "E_ARG",
            Error::Aliasing { .. } => "E_NYQUIST",
            Error::InsufficientResolution(_) => "E_RESOLUTION",
            Error::NotPowerOfTwo(_) => "E_FFT_LEN",
            Error::Undefined(_) => "E_UNDEFINED",
            Error::Csv { .. } => "E_CSV",
            Error::Config(_) | Error::Json { .. } => "E_CONFIG",
            Error::NonConvergent { .. } | Error::Diverged { .. } => "E_SOLVER",
            Error::Io { .. } => "E_IO",
        }
    }

    /// Process exit status for this error. `0` is never returned.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::Csv { .. } => 3,
            Error::Aliasing { .. } => 4,
            Error::InsufficientResolution(_) | Error::NotPowerOfTwo(_) | Error::Undefined(_) => 5,
            Error::Config(_) | Error::Json { .. } => 6,
            Error::NonConvergent { .. } | Error::Diverged { .. } => 7,
            Error::Io { .. } => 8,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
