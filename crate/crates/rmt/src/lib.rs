//! Monte Carlo for the Haar-conjugated models
//!
//! * weak B′: `UᵢAᵢUᵢ* + Fᵢ`
//! * B′: `UᵢAᵢUᵢ* + VᵢFᵢVᵢ*`
//! * principal minor: `P UᵢAᵢUᵢ* P` with `P = diag(1, …, 1, 0)`, `Q = I − P`
//!
//! with `tr_N` and `Tr_N` statistics compared against the exact `(φ, φ′)`
//! of the limiting type-B′ scenario.

mod cmat;
mod ensemble;
mod haar;
mod sim;
mod spec;

pub use cmat::{CMat, Op};
pub use ensemble::Ensemble;
pub use haar::{haar_columns, sample_haar};
pub use sim::{convergence_study, run, tolerance_report, write_csv, Anomaly, ConvergenceTable, SimResult, Stats, WordResult};
pub use spec::{EnsembleSpec, Experiment, MainSpec, Model, PertSpec, Spectrum};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ncprob_core::Error),
    #[error("invalid ensemble: {0}")]
    Config(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
