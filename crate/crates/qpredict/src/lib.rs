//! Numerical simulation of spectral evolution prediction.
//!
//! The library models a unitary U through its eigendecomposition (frequencies
//! in [0, 1) plus an eigenbasis), simulates phase-estimation style frequency
//! readout into an ancilla register, and implements prediction and history
//! restoration of U^t at a conditional-application cost that is independent
//! of t. Every bound the algorithms rely on is finite-dimensional, so the
//! test suites check them exactly against oracles rather than statistically.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, singular values;
//! - [`state`]: composite main/ancilla statevectors, distances, projection;
//! - [`spectral`]: spectra (random sparse, banded, modular-arithmetic,
//!   search-iterate) and the evolution oracle;
//! - [`circuit`]: ancilla-register transforms and cost accounting;
//! - [`wizard`]: the frequency estimator, its idealized reference, and tail
//!   classification;
//! - [`enhancer`]: the classical q-to-n bit refinement table;
//! - [`predictor`]: the prediction/restoration pipelines and speedup
//!   accounting.
//!
//! The `parallel` feature (default on) runs row-local kernels through rayon;
//! disabling it yields a fully sequential build with identical output.

pub mod circuit;
pub mod enhancer;
pub mod error;
pub mod linalg;
mod par;
pub mod predictor;
pub mod spectral;
pub mod state;
pub mod wizard;

pub use circuit::{kernel_h, CostCounter, PhaseRule};
pub use enhancer::EnhancerTable;
pub use error::{Error, Result};
pub use predictor::{
    derive_params, predict_exact_eigenvalue, predict_general, predict_general_report,
    predict_naive_exact, restore_history, speedup_summary, PredictionParams, RunReport,
    SpeedupSummary,
};
pub use spectral::{FrequencyBits, SpectralUnitary, SpectrumSpec};
pub use state::{Distances, MainState, RegisterLayout, StateVector};
pub use wizard::{
    classify_type, exact_wizard, simulate_wizard, simulate_wizard_reversed, TailReport,
    WizardOutput,
};
