use num_complex::Complex64;

use crate::hamiltonian::{Hamiltonian, MatrixH, PieceKind, Tail};
use crate::ode::{Dopri5, ErrorControl};
use crate::transforms::DiagonalSystem;

use super::EntireError;

pub type C64 = Complex64;
type M2 = [[C64; 2]; 2];

/// `|det T - 1|` bound expected of every computed transfer matrix.
pub const DET_TOL: f64 = 1e-9;
/// Beyond this determinant defect the computation is reported as failed.
pub const DET_DRIFT_LIMIT: f64 = 1e-6;

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);
const IDENTITY: M2 = [[ONE, ZERO], [ZERO, ONE]];

fn mul(a: &M2, b: &M2) -> M2 {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn max_abs(m: &M2) -> f64 {
    m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `z J M` for symmetric `M`.
fn generator(m: &MatrixH, z: C64) -> M2 {
    [[-z * m.h12, -z * m.h22], [z * m.h11, z * m.h12]]
}

/// `T(x; z)` stored as `exp(log_scale) * scaled` so that large `|z|` does
/// not overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    scaled: M2,
    log_scale: f64,
    pub x: f64,
    pub z: C64,
}

impl TransferMatrix {
    pub fn identity(z: C64) -> Self {
        Self {
            scaled: IDENTITY,
            log_scale: 0.0,
            x: 0.0,
            z,
        }
    }

    fn normalize(&mut self) {
        let m = max_abs(&self.scaled);
        if m > 0.0 && m.is_finite() {
            for c in self.scaled.iter_mut().flatten() {
                *c /= m;
            }
            self.log_scale += m.ln();
        }
    }

    fn push_factor(&mut self, factor: &M2, log: f64, dx: f64) {
        self.scaled = mul(factor, &self.scaled);
        self.log_scale += log;
        self.x += dx;
        self.normalize();
    }

    /// Unscaled entries; may overflow for large `|z|`.
    pub fn entries(&self) -> M2 {
        let s = self.log_scale.exp();
        self.scaled.map(|row| row.map(|c| c * s))
    }

    /// `(M, s)` with `T = exp(s) M` and `max |M_ij| = 1`.
    pub fn scaled(&self) -> (M2, f64) {
        (self.scaled, self.log_scale)
    }

    /// `ln max_ij |T_ij|`.
    pub fn log_norm(&self) -> f64 {
        self.log_scale + max_abs(&self.scaled).ln()
    }

    pub fn log_abs(&self, i: usize, j: usize) -> f64 {
        self.log_scale + self.scaled[i][j].norm().ln()
    }

    /// `(A, C) = (T_11, T_21)`, the solution with `u(0) = (1, 0)`.
    pub fn first_column(&self) -> (C64, C64) {
        let e = self.entries();
        (e[0][0], e[1][0])
    }

    /// `|det T - 1|` relative to the size of the two products in the
    /// determinant.
    pub fn det_defect(&self) -> f64 {
        let m = &self.scaled;
        let ad = m[0][0] * m[1][1];
        let bc = m[0][1] * m[1][0];
        let target = (-2.0 * self.log_scale).exp();
        (ad - bc - target).norm() / target.max(ad.norm() + bc.norm())
    }

    /// `later * self`: the transfer matrix over the concatenated interval.
    pub fn then(&self, later: &TransferMatrix) -> TransferMatrix {
        let mut out = *self;
        out.push_factor(&later.scaled, later.log_scale, later.x);
        out
    }
}

/// `exp(z l J M)` for constant `M` with determinant `det`, exact:
/// `(J M)^2 = -det I`.
fn exact_factor(m: &MatrixH, det: f64, len: f64, z: C64) -> (M2, f64) {
    let g = generator(m, z * len);
    let det = det.max(0.0);
    if det == 0.0 {
        return ([[ONE + g[0][0], g[0][1]], [g[1][0], ONE + g[1][1]]], 0.0);
    }
    let w = z * len * det.sqrt();
    let (c, sinc, s) = if w.norm() < 1e-4 {
        let w2 = w * w;
        (
            ONE - w2 / 2.0 + w2 * w2 / 24.0 - w2 * w2 * w2 / 720.0,
            ONE - w2 / 6.0 + w2 * w2 / 120.0,
            0.0,
        )
    } else {
        let s = w.im.abs();
        let i = C64::i();
        let e1 = (i * w - s).exp();
        let e2 = (-i * w - s).exp();
        ((e1 + e2) / 2.0, (e1 - e2) / (2.0 * i) / w, s)
    };
    (
        [
            [c + sinc * g[0][0], sinc * g[0][1]],
            [sinc * g[1][0], c + sinc * g[1][1]],
        ],
        s,
    )
}

fn pack(m: &M2) -> [f64; 8] {
    [
        m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im, m[1][1].re,
        m[1][1].im,
    ]
}

fn unpack(y: &[f64; 8]) -> M2 {
    [
        [C64::new(y[0], y[1]), C64::new(y[2], y[3])],
        [C64::new(y[4], y[5]), C64::new(y[6], y[7])],
    ]
}

/// Integrates `T' = z J H(x) T` across `[x0, x1]` in chunks short enough that
/// no chunk overflows, multiplying into `acc`.
fn rk_factor(
    acc: &mut TransferMatrix,
    h_of: impl Fn(f64) -> MatrixH,
    x0: f64,
    x1: f64,
    rate: f64,
    tol: f64,
) -> Result<(), EntireError> {
    let z = acc.z;
    let solver = Dopri5::new(ErrorControl::Mixed { atol: tol, rtol: tol });
    let chunk = 20.0 / (1.0 + rate);
    let n = ((x1 - x0) / chunk).ceil().max(1.0) as usize;
    let mut h_hint = 0.0;
    for k in 0..n {
        let a = x0 + (x1 - x0) * k as f64 / n as f64;
        let b = if k + 1 == n { x1 } else { x0 + (x1 - x0) * (k + 1) as f64 / n as f64 };
        let f = |x: f64, y: &[f64; 8]| {
            let g = generator(&h_of(x), z);
            let t = unpack(y);
            pack(&mul(&g, &t))
        };
        let (y, stats) = solver.integrate(f, a, pack(&IDENTITY), b, h_hint, |_, _| {})?;
        h_hint = stats.last_h;
        acc.push_factor(&unpack(&y), 0.0, b - a);
    }
    Ok(())
}

/// Joins consecutive singular pieces with the same angle into one, so their
/// nilpotent factors are not multiplied in floating point.
fn merge_singular(pieces: Vec<crate::hamiltonian::Piece>) -> Vec<crate::hamiltonian::Piece> {
    let mut out: Vec<crate::hamiltonian::Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let (Some(last), PieceKind::Singular(a)) = (out.last_mut(), p.kind) {
            if matches!(last.kind, PieceKind::Singular(b) if b == a) {
                last.x1 = p.x1;
                continue;
            }
        }
        out.push(p);
    }
    out
}

fn build(h: &Hamiltonian, x: f64, z: C64, tol: f64, all_rk: bool) -> Result<TransferMatrix, EntireError> {
    let len = h.length();
    let beyond = match h.tail() {
        Tail::None if x > len * (1.0 + 1e-12) => {
            return Err(EntireError::LengthOutOfRange { x, x_max: len })
        }
        Tail::SingularHalfLine(g) if x > len => Some((g, x - len)),
        _ => None,
    };
    if !(x >= 0.0) {
        return Err(EntireError::LengthOutOfRange { x, x_max: len });
    }
    if !(tol > 0.0) {
        return Err(EntireError::BadParameter(format!("tolerance {tol}")));
    }
    let mut t = TransferMatrix::identity(z);
    let mut pieces = h.pieces_upto(x.min(len));
    if let Some((g, l)) = beyond {
        pieces.push(crate::hamiltonian::Piece {
            x0: len,
            x1: len + l,
            kind: PieceKind::Singular(g),
        });
    }
    if !all_rk {
        pieces = merge_singular(pieces);
    }
    for p in &pieces {
        let exact = match p.kind {
            PieceKind::Singular(a) if !all_rk => Some((MatrixH::projection(a), 0.0)),
            PieceKind::Matrix(m) if !all_rk => Some((m, m.det())),
            _ => None,
        };
        match exact {
            Some((m, det)) => {
                let (f, s) = exact_factor(&m, det, p.length(), z);
                t.push_factor(&f, s, p.length());
            }
            None => {
                let slope = match p.kind {
                    PieceKind::Ramp { phi0, phi1 } => ((phi1 - phi0) / p.length()).abs(),
                    _ => 0.0,
                };
                let rate = match p.kind {
                    PieceKind::Matrix(m) => z.norm() * m.det().max(0.0).sqrt() + (z.norm() * slope).sqrt(),
                    _ => (z.norm() * slope).sqrt(),
                };
                rk_factor(&mut t, |s| p.matrix_at(s), p.x0, p.x1, rate, tol)?;
            }
        }
    }
    t.x = x;
    let defect = t.det_defect();
    if !(defect <= DET_DRIFT_LIMIT) {
        return Err(EntireError::DetDrift { defect });
    }
    Ok(t)
}

/// `T(x; z)` for `u' = z J H u`, `T(0; z) = I`. Singular and constant-matrix
/// pieces use the exact exponential; ramps are integrated by Runge–Kutta in
/// complex arithmetic with tolerance `tol`. The determinant is checked,
/// never renormalized.
pub fn transfer_matrix(h: &Hamiltonian, x: f64, z: C64, tol: f64) -> Result<TransferMatrix, EntireError> {
    build(h, x, z, tol, false)
}

/// As [`transfer_matrix`], with every piece integrated numerically.
pub fn transfer_matrix_rk(h: &Hamiltonian, x: f64, z: C64, tol: f64) -> Result<TransferMatrix, EntireError> {
    build(h, x, z, tol, true)
}

/// Transfer matrix of the diagonal system `H1 = diag(h, 1 - h)` over its
/// whole length at the parameter `zeta` (`z = zeta^2`). Each segment is
/// `cos(zeta dT w) I + sin(zeta dT w)/w J H1`, `w = sqrt(h (1 - h))`.
pub fn diagonal_transfer_matrix(d: &DiagonalSystem, zeta: C64) -> TransferMatrix {
    let mut t = TransferMatrix::identity(zeta);
    for s in &d.segments {
        let (f, log) = exact_factor(&MatrixH::diagonal(s.h), s.h * (1.0 - s.h), s.delta_t, zeta);
        t.push_factor(&f, log, s.delta_t);
    }
    t
}
