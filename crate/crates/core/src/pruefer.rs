//! Prüfer angle `theta' = t e_theta^T H e_theta` for real spectral parameter `t`.
//!
//! Singular pieces `H = P_alpha` are advanced in closed form; everything
//! else goes through the Dormand–Prince pair with per-unit-step error
//! control, so the summed local error estimates stay below the requested
//! tolerance. The angle is kept unwrapped.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::exec::Execution;
use crate::hamiltonian::{Hamiltonian, Piece, PieceKind};
use crate::ode::{Dopri5, ErrorControl, OdeError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrueferError {
    #[error("length {l} outside [0, {x_max}]")]
    LengthOutOfRange { l: f64, x_max: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("integrator failure: {0}")]
    Integrator(#[from] OdeError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrueferTrajectory {
    pub t: f64,
    pub theta0: f64,
    /// `(x, theta)` at `x = 0`, every piece boundary and every accepted
    /// Runge–Kutta step.
    pub samples: Vec<(f64, f64)>,
    /// Sum of local error estimates over all numerical steps.
    pub err_bound: f64,
}

impl PrueferTrajectory {
    pub fn final_theta(&self) -> f64 {
        self.samples.last().map(|s| s.1).unwrap_or(self.theta0)
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map(|s| s.0).unwrap_or(0.0)
    }
}

/// Closed-form solution of `theta' = t cos^2(theta - alpha)` over a length `len`.
pub fn step_singular(theta: f64, alpha: f64, len: f64, t: f64) -> f64 {
    let d = theta - alpha;
    if d.cos().abs() < 1e-15 {
        return theta;
    }
    let k = ((d + FRAC_PI_2) / PI).floor();
    let r = d - k * PI;
    alpha + k * PI + (r.tan() + t * len).atan()
}

/// Shared walker over pieces. Records `theta` at each requested stop.
pub(crate) struct Walk {
    pub at_stops: Vec<f64>,
    pub samples: Vec<(f64, f64)>,
    pub err: f64,
}

fn check_args(h: &Hamiltonian, l: f64, tol: f64) -> Result<(), PrueferError> {
    let x_max = h.length();
    if !(l >= 0.0 && l <= x_max * (1.0 + 1e-14)) {
        return Err(PrueferError::LengthOutOfRange { l, x_max });
    }
    if !(tol > 0.0) {
        return Err(PrueferError::BadTolerance(tol));
    }
    Ok(())
}

pub(crate) fn walk(
    h: &Hamiltonian,
    t: f64,
    theta0: f64,
    l: f64,
    stops: &[f64],
    tol: f64,
    record: bool,
) -> Result<Walk, PrueferError> {
    check_args(h, l, tol)?;
    let pieces = h.pieces_upto(l);
    let rk_len: f64 = pieces
        .iter()
        .filter(|p| !matches!(p.kind, PieceKind::Singular(_)))
        .map(Piece::length)
        .sum();
    let rk = Dopri5::new(ErrorControl::PerUnitStep {
        density: tol / rk_len.max(f64::MIN_POSITIVE),
    });

    let mut out = Walk {
        at_stops: Vec::with_capacity(stops.len()),
        samples: Vec::new(),
        err: 0.0,
    };
    let mut theta = theta0;
    if record {
        out.samples.push((0.0, theta0));
    }
    let mut si = 0;
    while si < stops.len() && stops[si] <= 0.0 {
        out.at_stops.push(theta0);
        si += 1;
    }
    let mut h_hint = 0.0;
    for piece in &pieces {
        let mut a = piece.x0;
        loop {
            let next_stop = stops.get(si).copied().filter(|&s| s < piece.x1);
            let b = next_stop.unwrap_or(piece.x1);
            if t != 0.0 && b > a {
                theta = advance(&rk, piece, a, b, theta, t, &mut h_hint, &mut out, record)?;
            }
            match next_stop {
                Some(_) => {
                    out.at_stops.push(theta);
                    si += 1;
                    a = b;
                }
                None => break,
            }
        }
        if record && out.samples.last().map(|s| s.0) != Some(piece.x1) {
            out.samples.push((piece.x1, theta));
        }
        while si < stops.len() && stops[si] <= piece.x1 {
            out.at_stops.push(theta);
            si += 1;
        }
    }
    while si < stops.len() {
        out.at_stops.push(theta);
        si += 1;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn advance(
    rk: &Dopri5,
    piece: &Piece,
    a: f64,
    b: f64,
    theta: f64,
    t: f64,
    h_hint: &mut f64,
    out: &mut Walk,
    record: bool,
) -> Result<f64, PrueferError> {
    let samples = &mut out.samples;
    let mut observe = |x: f64, y: &[f64; 1]| {
        if record {
            samples.push((x, y[0]));
        }
    };
    let (y, stats) = match piece.kind {
        PieceKind::Singular(alpha) => return Ok(step_singular(theta, alpha, b - a, t)),
        PieceKind::Ramp { .. } => rk.integrate(
            |x, y: &[f64; 1]| {
                let c = (y[0] - piece.ramp_phi(x)).cos();
                [t * c * c]
            },
            a,
            [theta],
            b,
            *h_hint,
            &mut observe,
        )?,
        PieceKind::Matrix(m) => rk.integrate(
            |_, y: &[f64; 1]| [t * m.quadratic(y[0])],
            a,
            [theta],
            b,
            *h_hint,
            &mut observe,
        )?,
    };
    *h_hint = stats.last_h;
    out.err += stats.err_sum;
    Ok(y[0])
}

/// Full trajectory on `[0, l]`.
pub fn integrate(
    h: &Hamiltonian,
    t: f64,
    theta0: f64,
    l: f64,
    tol: f64,
) -> Result<PrueferTrajectory, PrueferError> {
    let w = walk(h, t, theta0, l, &[], tol, true)?;
    Ok(PrueferTrajectory {
        t,
        theta0,
        samples: w.samples,
        err_bound: w.err,
    })
}

/// `(theta(l; t), error bound)` without storing the trajectory.
pub fn final_theta(
    h: &Hamiltonian,
    t: f64,
    theta0: f64,
    l: f64,
    tol: f64,
) -> Result<(f64, f64), PrueferError> {
    let w = walk(h, t, theta0, l, &[l], tol, false)?;
    Ok((w.at_stops[0], w.err))
}

/// `theta(l_i; t)` for a sorted list of lengths in one pass, plus the error
/// bound accumulated up to the last one.
pub fn theta_at(
    h: &Hamiltonian,
    t: f64,
    theta0: f64,
    ls: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64), PrueferError> {
    let l = ls.last().copied().unwrap_or(0.0);
    let w = walk(h, t, theta0, l, ls, tol, false)?;
    Ok((w.at_stops, w.err))
}

/// `(t, theta(l; t))` over a grid, evaluated independently per `t`.
pub fn theta_of_t_sweep(
    h: &Hamiltonian,
    theta0: f64,
    l: f64,
    t_grid: &[f64],
    tol: f64,
    exec: Execution,
) -> Result<Vec<(f64, f64)>, PrueferError> {
    exec.map(t_grid, |&t| final_theta(h, t, theta0, l, tol).map(|(th, _)| (t, th)))
        .into_iter()
        .collect()
}
