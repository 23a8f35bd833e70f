use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` is invalid: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("initial state is not normalized: squared norm is {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("time grid too coarse: dt = {dt} but the fastest rate {f_max} requires dt <= {required}")]
    GridTooCoarse { dt: f64, f_max: f64, required: f64 },

    #[error("time {t} is not on the grid (dt = {dt})")]
    OffGrid { t: f64, dt: f64 },

    #[error("window [{start}, {end}] contains no grid points or lies outside [0, {t_max}]")]
    EmptyWindow { start: f64, end: f64, t_max: f64 },

    #[error("window length {window} exceeds the simulated span {t_max}")]
    WindowTooLarge { window: f64, t_max: f64 },

    #[error("closed-system evolution requires lambda1 = lambda2 = 0, got ({0}, {1})")]
    OpenSystem(f64, f64),

    #[error("propagator failed: {0}")]
    Propagator(String),

    #[error("scenario file: {0}")]
    Config(String),
}
