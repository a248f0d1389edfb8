use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    Model(String),

    #[error("invalid initial data: {0}")]
    InitialData(String),

    #[error("non-finite reaction value at t={t}, x={x}, u={u}, v={v}")]
    NonFiniteReaction { t: f64, x: f64, u: f64, v: f64 },

    #[error("position {x} outside the moving domain [{g}, {h}]")]
    OutOfDomain { x: f64, g: f64, h: f64 },

    #[error("front path is not monotone; entry times undefined")]
    NonMonotoneFronts,

    #[error("characteristic line coverage gap of {gap} exceeds {limit} near x={x}")]
    CoverageGap { x: f64, gap: f64, limit: f64 },

    #[error("time step underflow: dt={dt} below {floor} at t={t}")]
    DtUnderflow { dt: f64, floor: f64, t: f64 },

    #[error("solver window [{t0}, {t1}] rejected: {reason}")]
    WindowRejected { t0: f64, t1: f64, reason: String },

    #[error("fixed-point window underflow at t={t}: window {window} below {floor}")]
    WindowUnderflow { t: f64, window: f64, floor: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("bound audit failed in strict mode: {0} violation(s)")]
    BoundViolation(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
