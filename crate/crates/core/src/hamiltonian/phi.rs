//! Angle profiles `phi(x)` with `H(x) = P_phi(x)`.

use std::f64::consts::PI;

use thiserror::Error;

use super::{canonical_shift, Hamiltonian, Segment, Tail, CONSTRUCTION_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhiError {
    #[error("profile has no pieces")]
    Empty,
    #[error("pieces must be contiguous from x = 0 with positive lengths (piece {0})")]
    Layout(usize),
    #[error("non-finite value in piece {0}")]
    NonFinite(usize),
    #[error("phi increases from {phi_a} at x = {x_a} to {phi_b} at x = {x_b}")]
    Increasing {
        x_a: f64,
        phi_a: f64,
        x_b: f64,
        phi_b: f64,
    },
    #[error("phi({x}) = {phi} lies below phi_infinity = {phi_infinity}")]
    BelowLimit { x: f64, phi: f64, phi_infinity: f64 },
}

/// `phi` is linear on `[x0, x1)`, from `phi0` to the left limit `phi1` at `x1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPiece {
    pub x0: f64,
    pub x1: f64,
    pub phi0: f64,
    pub phi1: f64,
}

impl PhiPiece {
    pub fn length(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn is_plateau(&self) -> bool {
        self.phi0 == self.phi1
    }

    fn at(&self, x: f64) -> f64 {
        if self.is_plateau() {
            return self.phi0;
        }
        let s = ((x - self.x0) / self.length()).clamp(0.0, 1.0);
        self.phi0 + (self.phi1 - self.phi0) * s
    }
}

/// Right-continuous, piecewise-linear angle function on `[0, X_max]` with a
/// declared limit at infinity. Jumps sit between pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiProfile {
    pieces: Vec<PhiPiece>,
    phi_infinity: f64,
    /// Number of `pi` added to the raw angles by normalization.
    normalization: i64,
}

impl PhiProfile {
    /// Checked constructor: contiguous pieces starting at 0, `phi`
    /// nonincreasing (including across jumps) and bounded below by
    /// `phi_infinity`.
    pub fn new(pieces: Vec<PhiPiece>, phi_infinity: f64) -> Result<Self, PhiError> {
        let p = Self::from_pieces_raw(pieces, phi_infinity);
        p.check_layout()?;
        if let Some((a, b)) = p.first_increase() {
            return Err(PhiError::Increasing {
                x_a: a.0,
                phi_a: a.1,
                x_b: b.0,
                phi_b: b.1,
            });
        }
        let end = p.end_value();
        if end < phi_infinity - CONSTRUCTION_TOL {
            return Err(PhiError::BelowLimit {
                x: p.length(),
                phi: end,
                phi_infinity,
            });
        }
        Ok(p)
    }

    /// Continuous piecewise-linear profile through `(x, phi)` breakpoints.
    pub fn from_breakpoints(points: &[(f64, f64)], phi_infinity: f64) -> Result<Self, PhiError> {
        if points.len() < 2 {
            return Err(PhiError::Empty);
        }
        let pieces = points
            .windows(2)
            .map(|w| PhiPiece {
                x0: w[0].0,
                x1: w[1].0,
                phi0: w[0].1,
                phi1: w[1].1,
            })
            .collect();
        Self::new(pieces, phi_infinity)
    }

    pub(crate) fn from_pieces_raw(pieces: Vec<PhiPiece>, phi_infinity: f64) -> Self {
        Self {
            pieces,
            phi_infinity,
            normalization: 0,
        }
    }

    fn check_layout(&self) -> Result<(), PhiError> {
        if self.pieces.is_empty() {
            return Err(PhiError::Empty);
        }
        let mut x = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            if ![p.x0, p.x1, p.phi0, p.phi1].iter().all(|v| v.is_finite()) {
                return Err(PhiError::NonFinite(i));
            }
            if (p.x0 - x).abs() > CONSTRUCTION_TOL * x.max(1.0) || p.x1 <= p.x0 {
                return Err(PhiError::Layout(i));
            }
            x = p.x1;
        }
        if !self.phi_infinity.is_finite() {
            return Err(PhiError::NonFinite(self.pieces.len()));
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[PhiPiece] {
        &self.pieces
    }

    pub fn phi_infinity(&self) -> f64 {
        self.phi_infinity
    }

    /// Multiple of `pi` added by `normalized`.
    pub fn normalization(&self) -> i64 {
        self.normalization
    }

    pub fn length(&self) -> f64 {
        self.pieces.last().map(|p| p.x1).unwrap_or(0.0)
    }

    /// `phi(0+)`.
    pub fn start(&self) -> f64 {
        self.pieces[0].phi0
    }

    /// Left limit `phi(X_max-)`.
    pub fn end_value(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].phi1
    }

    /// Right-continuous evaluation; beyond `X_max` the end value is held.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.x1 <= x);
        match self.pieces.get(i) {
            Some(p) => p.at(x),
            None => self.end_value(),
        }
    }

    /// Left limit `phi(x-)`.
    pub fn left_limit(&self, x: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.x1 < x);
        match self.pieces.get(i) {
            Some(p) if x > p.x0 => p.at(x),
            Some(p) if i == 0 => p.phi0,
            Some(_) => self.pieces[i - 1].phi1,
            None => self.end_value(),
        }
    }

    /// Breakpoint list `(x, phi(x))` with right values, closed by
    /// `(X_max, phi(X_max-))`. At a jump the same `x` appears with the left
    /// limit first.
    pub fn breakpoints(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 && self.pieces[i - 1].phi1 != p.phi0 {
                out.push((p.x0, self.pieces[i - 1].phi1));
            }
            out.push((p.x0, p.phi0));
        }
        out.push((self.length(), self.end_value()));
        out
    }

    /// Adds `n pi` to every angle; `P_phi` is unchanged.
    pub fn shifted_by_pi(&self, n: i64) -> Self {
        let s = n as f64 * PI;
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| PhiPiece {
                    phi0: p.phi0 + s,
                    phi1: p.phi1 + s,
                    ..*p
                })
                .collect(),
            phi_infinity: self.phi_infinity + s,
            normalization: self.normalization + n,
        }
    }

    /// Adds an arbitrary angle (rotation of the underlying system).
    pub fn rotated(&self, gamma: f64) -> Self {
        Self {
            pieces: self
                .pieces
                .iter()
                .map(|p| PhiPiece {
                    phi0: p.phi0 + gamma,
                    phi1: p.phi1 + gamma,
                    ..*p
                })
                .collect(),
            phi_infinity: self.phi_infinity + gamma,
            normalization: self.normalization,
        }
    }

    /// Shifted by a multiple of `pi` so that `phi(0+)` lies in `(-pi/2, pi/2]`.
    pub fn normalized(&self) -> Self {
        let n = (canonical_shift(self.start()) / PI).round() as i64;
        self.shifted_by_pi(n)
    }

    pub fn with_phi_infinity(&self, phi_infinity: f64) -> Result<Self, PhiError> {
        let mut p = self.clone();
        p.phi_infinity = phi_infinity;
        if p.end_value() < phi_infinity - CONSTRUCTION_TOL {
            return Err(PhiError::BelowLimit {
                x: p.length(),
                phi: p.end_value(),
                phi_infinity,
            });
        }
        Ok(p)
    }

    /// First pair of points `((x_a, phi_a), (x_b, phi_b))` with `x_a < x_b`
    /// (or a jump at one `x`) where `phi` increases beyond tolerance.
    pub fn first_increase(&self) -> Option<((f64, f64), (f64, f64))> {
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                let prev = self.pieces[i - 1].phi1;
                if p.phi0 > prev + CONSTRUCTION_TOL {
                    return Some(((p.x0, prev), (p.x0, p.phi0)));
                }
            }
            if p.phi1 > p.phi0 + CONSTRUCTION_TOL {
                return Some(((p.x0, p.phi0), (p.x1, p.phi1)));
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.first_increase().is_none()
    }

    /// `phi(0+) - phi(infinity)`.
    pub fn total_drop(&self) -> f64 {
        self.start() - self.phi_infinity
    }

    /// Encodes `H = P_phi` as one segment per piece plus a singular tail of
    /// type `phi_infinity` when it differs from the end value.
    pub fn to_hamiltonian(&self) -> Hamiltonian {
        let segments = self
            .pieces
            .iter()
            .map(|p| {
                if p.is_plateau() {
                    Segment::angle(p.length(), p.phi0)
                } else {
                    Segment::ramp(p.length(), p.phi0, p.phi1)
                }
            })
            .collect();
        let tail = if (self.phi_infinity - self.end_value()).abs() > CONSTRUCTION_TOL {
            Tail::SingularHalfLine(self.phi_infinity)
        } else {
            Tail::None
        };
        Hamiltonian::from_segments_unchecked(segments, tail)
    }
}
