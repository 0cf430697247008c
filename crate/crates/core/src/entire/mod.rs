//! Complex transfer matrices, growth (order and type) estimation and the
//! Hadamard-product family `A`, `C`.

mod growth;
mod hadamard;
mod transfer;

use thiserror::Error;

use crate::hamiltonian::HamiltonianError;
use crate::ode::OdeError;

pub use growth::{
    order_bound_check, order_fit, type_fit, FitParams, GrowthFit, OrderBoundReport, TypeFit,
    ORDER_LOWER, ORDER_UPPER,
};
pub use hadamard::{
    choose_terms, h2_membership_integral, hadamard_a, hadamard_c, H2Report, H2Verdict,
    HadamardFamily, H2_REL_CHANGE,
};
pub use transfer::{
    diagonal_transfer_matrix, transfer_matrix, transfer_matrix_rk, TransferMatrix, C64,
    DET_DRIFT_LIMIT, DET_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntireError {
    #[error("x = {x} outside [0, {x_max}]")]
    LengthOutOfRange { x: f64, x_max: f64 },
    #[error("determinant drifted by {defect:e} (limit {DET_DRIFT_LIMIT:e})")]
    DetDrift { defect: f64 },
    #[error("log M(r) = {log_m} at r = {r}: no growth to fit")]
    NoGrowth { r: f64, log_m: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}
