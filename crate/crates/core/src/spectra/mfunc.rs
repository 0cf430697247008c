use std::f64::consts::{FRAC_PI_2, PI};

use crate::hamiltonian::{Hamiltonian, PhiProfile, RANK_ONE_TOL};
use crate::pruefer::walk;

use super::SpectraError;

const POLE_TOL: f64 = 1e-12;

/// `-tan(phi)` with `phi = pi/2` mapped to `-infinity` and `phi = -pi/2` to
/// `+infinity`.
fn minus_tan(phi: f64) -> f64 {
    if (phi - FRAC_PI_2).abs() < POLE_TOL {
        f64::NEG_INFINITY
    } else if (phi + FRAC_PI_2).abs() < POLE_TOL {
        f64::INFINITY
    } else {
        -phi.tan()
    }
}

/// `(m(-infinity), m(0-)) = (-tan phi(0+), -tan phi(infinity))`.
pub fn m_endpoints(phi: &PhiProfile) -> (f64, f64) {
    (minus_tan(phi.start()), minus_tan(phi.phi_infinity()))
}

/// Angle of the square-integrable solution along `[0, l]`, obtained by
/// running the Prüfer equation backward from `f(l) = e_{phi(l) + pi/2}`.
/// Returns `(x, theta)` samples in decreasing `x`.
fn backward_angles(
    h: &Hamiltonian,
    minus_t: f64,
    l: f64,
    tol: f64,
    record: bool,
) -> Result<(f64, Vec<(f64, f64)>), SpectraError> {
    if !(minus_t < 0.0) {
        return Err(SpectraError::BadParameter(format!(
            "spectral parameter must be negative, got {minus_t}"
        )));
    }
    let body = h.restrict(l)?;
    let phi_l = body.extract_phi(RANK_ONE_TOL)?.end_value();
    let rev = body.reversed();
    let w = walk(&rev, -minus_t, phi_l + FRAC_PI_2, rev.length(), &[rev.length()], tol, record)?;
    let samples = w.samples.iter().map(|&(s, th)| (l - s, th)).collect();
    Ok((w.at_stops[0], samples))
}

/// `m(minus_t) = f1(0)/f2(0)` for the truncated system with tail
/// `P_{phi(l)}`; `+infinity` stands for the point at infinity.
pub fn m_halfline_real(h: &Hamiltonian, minus_t: f64, l: f64, tol: f64) -> Result<f64, SpectraError> {
    let (theta0, _) = backward_angles(h, minus_t, l, tol, false)?;
    let (s, c) = theta0.sin_cos();
    if s.abs() < 1e-300 {
        return Ok(f64::INFINITY);
    }
    Ok(c / s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleFloorReport {
    /// Initial angle `arccot m` taken in `(-pi, 0]`.
    pub alpha: f64,
    pub min_theta: f64,
    pub holds: bool,
}

/// The Prüfer angle at `minus_t` started from the m-matched angle
/// `alpha in (-pi, 0]` stays at or above `-pi` on `[0, l]`.
pub fn angle_floor_check(
    h: &Hamiltonian,
    minus_t: f64,
    l: f64,
    tol: f64,
) -> Result<AngleFloorReport, SpectraError> {
    let (theta0, samples) = backward_angles(h, minus_t, l, tol, true)?;
    let k = (theta0 / PI).ceil();
    let alpha = theta0 - k * PI;
    let min_theta = samples
        .iter()
        .map(|s| s.1 - k * PI)
        .fold(f64::INFINITY, f64::min);
    Ok(AngleFloorReport {
        alpha,
        min_theta,
        holds: min_theta >= -PI - tol - 1e-12,
    })
}
