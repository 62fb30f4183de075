use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("register layouts do not match: {0}")]
    LayoutMismatch(String),

    #[error("degenerate projection: ancilla-zero probability {prob:.3e} below threshold")]
    DegenerateProjection { prob: f64 },

    #[error(
        "spectrum not sparse enough for a {q}-bit enhancer: frequencies {omega_a} and {omega_b} \
         collide in cell {cell}"
    )]
    SpectrumNotSparse {
        q: u32,
        cell: u64,
        omega_a: f64,
        omega_b: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("time horizon exceeded: |t| = {t} > t_max = {t_max}")]
    Horizon { t: i64, t_max: i64 },

    #[error("capacity guard exceeded: {0}")]
    Capacity(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
