use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("density of states diverges at the band edge (omega = omega_e = {0})")]
    Singularity(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "inconsistent discretization: omega_N = {omega_last} overshoots omega_u = {omega_u} \
         beyond the allowed {allowed}; (N, omega_u, k) do not describe the same band"
    )]
    Consistency {
        omega_last: f64,
        omega_u: f64,
        allowed: f64,
    },

    #[error("unsupported excitation sector p = {0} (only p = 1 and p = 2 are implemented)")]
    UnsupportedSector(usize),

    #[error("basis lookup failed: {0}")]
    Lookup(String),

    #[error("state has zero norm and cannot be normalized")]
    ZeroNorm,

    #[error("shape mismatch: expected {expected} amplitudes, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("basis has no defect mode")]
    MissingDefect,

    #[error(
        "time step too large: dt * max_frequency = {product:.4} exceeds 0.1 \
         (dt = {dt}, max_frequency = {max_frequency}); reduce dt"
    )]
    StepTooLarge {
        dt: f64,
        max_frequency: f64,
        product: f64,
    },

    #[error("norm drift {drift:e} at t = {time} exceeds 1e-8; reduce dt")]
    NormDrift { time: f64, drift: f64 },

    #[error("non-finite amplitude at t = {0}")]
    NonFinite(f64),

    #[error(
        "state size {size} exceeds the cap of {cap} amplitudes \
         (the basis grows like N^p for p excitations); lower --modes or raise --max-states"
    )]
    MemoryCap { size: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Singularity(_)
            | Error::NormDrift { .. }
            | Error::NonFinite(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
