//! Eigenvalue counting and location, semiboundedness classification,
//! essential-spectrum bounds and m-function endpoints.

mod asymptotics;
mod classify;
mod count;
mod mfunc;
mod window;

use thiserror::Error;

use crate::hamiltonian::HamiltonianError;
use crate::pruefer::PrueferError;

pub use asymptotics::{
    cos2_integral, ess_spectrum_bounds, zero_eigenvalue_check, EssBounds, EssVerdict, TailModel,
    ZeroEigReport, TAIL_SAMPLES,
};
pub use classify::{
    classify_profile, classify_semibounded, classify_wholeline, Classification, WholeLine, Witness,
    RANGE_TOL,
};
pub use count::{count_bounded, halfline_count, locate_eigenvalues, Count, CountResult, HalflineParams};
pub use mfunc::{angle_floor_check, m_endpoints, m_halfline_real, AngleFloorReport};
pub use window::{SpectralWindow, WindowError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error(transparent)]
    Pruefer(#[from] PrueferError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Window(#[from] WindowError),
    #[error("half-line count did not stabilise along the schedule (last F = {:?})", .trace.last())]
    Inconclusive { trace: Vec<(f64, f64)> },
    #[error("theta is flat at level {level}; no unique eigenvalue")]
    NoUniqueRoot { level: f64 },
    #[error("profile increases between {a:?} and {b:?}")]
    NotMonotone { a: (f64, f64), b: (f64, f64) },
    #[error("{0}")]
    BadParameter(String),
}
