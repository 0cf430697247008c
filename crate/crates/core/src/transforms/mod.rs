//! Schrödinger import, Molchanov criteria and the diagonal-system transform.

mod diagonal;
mod molchanov;
mod schrodinger;

use thiserror::Error;

use crate::hamiltonian::HamiltonianError;
use crate::ode::OdeError;

pub use diagonal::{
    canonical_to_diagonal, debranges_type, DiagSegment, DiagonalOptions, DiagonalSystem,
};
pub use molchanov::{
    geometric_grid, molchanov_classic, molchanov_new, MolchanovNew, MolchanovTable, TrendVerdict,
    WindowVerdict, TREND_FACTOR,
};
pub use schrodinger::{schrodinger_to_canonical, CanonicalImport, Potential, SchrodingerProblem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("bad potential: {0}")]
    BadPotential(String),
    #[error("evaluation grid must be increasing and inside the potential's domain")]
    BadGrid,
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("solutions overflowed; shorten the domain")]
    Overflow,
    #[error("angle drop {drop} is at least pi; split the profile first")]
    SplitRequired { drop: f64 },
    #[error("profile increases between {a:?} and {b:?}")]
    NotMonotone { a: (f64, f64), b: (f64, f64) },
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}
