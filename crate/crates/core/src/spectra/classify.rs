use std::f64::consts::{FRAC_PI_2, PI};

use crate::hamiltonian::{branch_shift, Hamiltonian, HamiltonianError, PhiProfile};

use super::SpectraError;

/// Tolerance on the range conditions for `phi(infinity)` and the total drop.
pub const RANGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// A segment with `det H > tol`.
    Determinant { segment: usize, det: f64 },
    /// `phi(x_a) < phi(x_b)` with `x_a <= x_b`.
    Increasing { a: (f64, f64), b: (f64, f64) },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    /// No negative spectrum.
    InCPlus(PhiProfile),
    /// At most `n` negative eigenvalues.
    NegEigsAtMost { n: u64, phi: PhiProfile },
    NotSemibounded(Witness),
}

impl Classification {
    pub fn profile(&self) -> Option<&PhiProfile> {
        match self {
            Classification::InCPlus(p) | Classification::NegEigsAtMost { phi: p, .. } => Some(p),
            Classification::NotSemibounded(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Classification::InCPlus(_) => "InCPlus",
            Classification::NegEigsAtMost { .. } => "NegEigsAtMost",
            Classification::NotSemibounded(_) => "NotSemibounded",
        }
    }
}

/// Semiboundedness from the angle profile: `H = P_phi` with `phi`
/// nonincreasing, normalised to `phi(0+) in (-pi/2, pi/2]`. With
/// `phi(infinity) >= -pi/2` the spectrum is nonnegative, otherwise there are
/// at most `ceil((-phi(infinity) - pi/2)/pi)` negative eigenvalues.
pub fn classify_semibounded(h: &Hamiltonian, tol: f64) -> Result<Classification, SpectraError> {
    let phi = match h.extract_phi(tol) {
        Ok(p) => p,
        Err(HamiltonianError::NotRankOne { segment, det }) => {
            return Ok(Classification::NotSemibounded(Witness::Determinant { segment, det }))
        }
        Err(e) => return Err(e.into()),
    };
    Ok(classify_profile(&phi))
}

pub fn classify_profile(phi: &PhiProfile) -> Classification {
    if let Some((a, b)) = phi.first_increase() {
        return Classification::NotSemibounded(Witness::Increasing { a, b });
    }
    let phi = phi.normalized();
    let inf = phi.phi_infinity();
    if inf >= -FRAC_PI_2 - RANGE_TOL {
        return Classification::InCPlus(phi);
    }
    let n = ((-inf - FRAC_PI_2) / PI - RANGE_TOL).ceil().max(1.0) as u64;
    Classification::NegEigsAtMost { n, phi }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WholeLine {
    pub total_drop: f64,
    pub semibounded: bool,
}

/// Whole-line criterion `phi(-infinity) - phi(infinity) <= pi`.
///
/// `left` describes `phi` on `(-infinity, 0]` with its first value standing
/// for `phi(-infinity)`; `right` is the half-line profile. The joint at 0 is
/// glued with a drop in `[0, pi)`.
pub fn classify_wholeline(left: &PhiProfile, right: &PhiProfile) -> Result<WholeLine, SpectraError> {
    for p in [left, right] {
        if let Some((a, b)) = p.first_increase() {
            return Err(SpectraError::NotMonotone { a, b });
        }
    }
    let shift = branch_shift(left.end_value(), right.start());
    let total_drop = left.start() - (right.phi_infinity() + shift);
    Ok(WholeLine {
        total_drop,
        semibounded: total_drop <= PI + RANGE_TOL,
    })
}
