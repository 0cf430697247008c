//! Independent reference computations for tests and acceptance runs.
//!
//! Transfer matrices here come only from exact matrix exponentials of
//! constant pieces; nothing in this module touches the Prüfer integrator or
//! the Runge–Kutta code.

use num_complex::Complex64;
use thiserror::Error;

use crate::hamiltonian::{Hamiltonian, MatrixH, SegmentKind};
use crate::spectra::SpectralWindow;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("segment {0} is not constant; the product formula needs piecewise-constant H")]
    NotPiecewiseConstant(usize),
    #[error("length {l} outside [0, {x_max}]")]
    LengthOutOfRange { l: f64, x_max: f64 },
    #[error("grid step must be positive, got {0}")]
    BadStep(f64),
    #[error("comparison constant C = {0} must lie in (0, 1/4)")]
    BadConstant(f64),
    #[error("need x >= a > 0, got x = {x}, a = {a}")]
    BadPoint { x: f64, a: f64 },
}

pub type CMatrix = [[Complex64; 2]; 2];
pub type RMatrix = [[f64; 2]; 2];

fn constant_pieces(h: &Hamiltonian, l: f64) -> Result<Vec<(f64, MatrixH)>, OracleError> {
    let x_max = h.length();
    if !(l >= 0.0 && l <= x_max * (1.0 + 1e-14)) {
        return Err(OracleError::LengthOutOfRange { l, x_max });
    }
    let mut out = Vec::new();
    let mut x = 0.0;
    for (i, seg) in h.segments().iter().enumerate() {
        if x >= l {
            break;
        }
        let len = seg.length.min(l - x);
        let m = match &seg.kind {
            SegmentKind::ConstantAngle(a) => MatrixH::projection(*a),
            SegmentKind::ConstantMatrix(m) => *m,
            SegmentKind::PhiRamp { start, end } if start == end => MatrixH::projection(*start),
            _ => return Err(OracleError::NotPiecewiseConstant(i)),
        };
        out.push((len, m));
        x += seg.length;
    }
    Ok(out)
}

/// `J H` with `J = [[0, -1], [1, 0]]`.
fn jh(m: &MatrixH) -> RMatrix {
    [[-m.h12, -m.h22], [m.h11, m.h12]]
}

/// `sin(w)/w` and `cos(w)` for complex `w`, stable near 0.
fn sinc_cos(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 1e-4 {
        let w2 = w * w;
        (1.0 - w2 / 6.0 + w2 * w2 / 120.0, 1.0 - w2 / 2.0 + w2 * w2 / 24.0)
    } else {
        (w.sin() / w, w.cos())
    }
}

/// `exp(z len J H)`; `(J H)^2 = -det H`, so the series closes.
pub fn constant_factor(m: &MatrixH, len: f64, z: Complex64) -> CMatrix {
    let g = jh(m);
    let zl = z * len;
    let det = m.det().max(0.0);
    let (sinc, cos) = if det == 0.0 {
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0))
    } else {
        sinc_cos(zl * det.sqrt())
    };
    let s = sinc * zl;
    [
        [cos + s * g[0][0], s * g[0][1]],
        [s * g[1][0], cos + s * g[1][1]],
    ]
}

fn real_factor(m: &MatrixH, len: f64, lambda: f64) -> RMatrix {
    let g = jh(m);
    let zl = lambda * len;
    let det = m.det().max(0.0);
    let (sinc, cos) = if det == 0.0 {
        (1.0, 1.0)
    } else {
        let w = zl * det.sqrt();
        if w.abs() < 1e-4 {
            let w2 = w * w;
            (1.0 - w2 / 6.0, 1.0 - w2 / 2.0)
        } else {
            (w.sin() / w, w.cos())
        }
    };
    let s = sinc * zl;
    [
        [cos + s * g[0][0], s * g[0][1]],
        [s * g[1][0], cos + s * g[1][1]],
    ]
}

pub fn cmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
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

fn rmul(a: &RMatrix, b: &RMatrix) -> RMatrix {
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

/// `T(l; z)` as the ordered product of exact factors.
pub fn product_transfer_matrix(h: &Hamiltonian, l: f64, z: Complex64) -> Result<CMatrix, OracleError> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut t = [[one, zero], [zero, one]];
    for (len, m) in constant_pieces(h, l)? {
        t = cmul(&constant_factor(&m, len, z), &t);
    }
    Ok(t)
}

/// Real-`lambda` version of [`product_transfer_matrix`].
pub fn product_transfer_matrix_real(h: &Hamiltonian, l: f64, lambda: f64) -> Result<RMatrix, OracleError> {
    let mut t = [[1.0, 0.0], [0.0, 1.0]];
    for (len, m) in constant_pieces(h, l)? {
        t = rmul(&real_factor(&m, len, lambda), &t);
    }
    Ok(t)
}

/// Pre-flattened system for repeated real evaluations.
struct Factors(Vec<(f64, MatrixH)>);

impl Factors {
    fn functional(&self, beta: f64, lambda: f64) -> f64 {
        let (mut u1, mut u2) = (1.0, 0.0);
        for (len, m) in &self.0 {
            let f = real_factor(m, *len, lambda);
            let v1 = f[0][0] * u1 + f[0][1] * u2;
            let v2 = f[1][0] * u1 + f[1][1] * u2;
            u1 = v1;
            u2 = v2;
        }
        u1 * beta.sin() - u2 * beta.cos()
    }
}

/// `u1(l) sin(beta) - u2(l) cos(beta)` for `u = T(l; lambda) e_1`.
pub fn boundary_functional(h: &Hamiltonian, l: f64, beta: f64, lambda: f64) -> Result<f64, OracleError> {
    Ok(Factors(constant_pieces(h, l)?).functional(beta, lambda))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignChangeScan {
    pub lambda_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Brackets of width at most `1e-9` (relative for large roots), one per root.
    pub roots: Vec<(f64, f64)>,
    /// Near-zero local minima of `|f|` without a sign change that survived
    /// local refinement.
    pub suspicious: Vec<f64>,
}

impl SignChangeScan {
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    pub fn root_estimates(&self) -> Vec<f64> {
        self.roots.iter().map(|r| 0.5 * (r.0 + r.1)).collect()
    }
}

fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64) -> (f64, f64) {
    while b - a > 1e-9 * a.abs().max(b.abs()).max(1.0) {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return (m, m);
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Roots of the boundary functional inside the window, found by a grid
/// scan with bisection of every sign change and refinement of suspicious
/// near-touching minima.
pub fn count_by_sign_changes(
    h: &Hamiltonian,
    l: f64,
    beta: f64,
    w: &SpectralWindow,
    grid_step: f64,
) -> Result<SignChangeScan, OracleError> {
    if !(grid_step > 0.0) {
        return Err(OracleError::BadStep(grid_step));
    }
    let factors = Factors(constant_pieces(h, l)?);
    let f = |x: f64| factors.functional(beta, x);
    let n = ((w.t - w.s) / grid_step).ceil().max(1.0) as usize;
    let grid: Vec<f64> = (0..=n)
        .map(|i| if i == n { w.t } else { w.s + i as f64 * (w.t - w.s) / n as f64 })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();

    let mut roots = Vec::new();
    let mut suspicious = Vec::new();
    let scan_cell = |a: f64, b: f64, fa: f64, fb: f64, roots: &mut Vec<(f64, f64)>| {
        if fa == 0.0 {
            roots.push((a, a));
        } else if fb != 0.0 && (fa > 0.0) != (fb > 0.0) {
            roots.push(bisect(&f, a, b, fa));
        }
    };
    for i in 0..n {
        scan_cell(grid[i], grid[i + 1], values[i], values[i + 1], &mut roots);
    }
    if values[n] == 0.0 {
        roots.push((w.t, w.t));
    }
    // a parabola through three same-sign points dipping below zero hints at
    // a pair of close roots inside one cell
    for i in 1..n {
        let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
        let same = (y0 > 0.0) == (y1 > 0.0) && (y1 > 0.0) == (y2 > 0.0) && y1 != 0.0;
        if !(same && y1.abs() < y0.abs() && y1.abs() < y2.abs()) {
            continue;
        }
        let curv = y0 - 2.0 * y1 + y2;
        let slope = 0.5 * (y2 - y0);
        let vertex = y1 - slope * slope / (2.0 * curv);
        if (vertex > 0.0) == (y1 > 0.0) && vertex.abs() > 1e-3 * y1.abs() {
            continue;
        }
        let (a, b) = (grid[i - 1], grid[i + 1]);
        let sub = 256;
        let mut found = Vec::new();
        let mut xa = a;
        let mut fa = y0;
        for j in 1..=sub {
            let xb = a + (b - a) * j as f64 / sub as f64;
            let fb = f(xb);
            scan_cell(xa, xb, fa, fb, &mut found);
            xa = xb;
            fa = fb;
        }
        if found.is_empty() {
            suspicious.push(grid[i]);
        }
        roots.extend(found);
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    roots.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    roots.retain(|r| w.contains(0.5 * (r.0 + r.1)));
    Ok(SignChangeScan {
        lambda_grid: grid,
        values,
        roots,
        suspicious,
    })
}

/// Repeats the scan with halved steps until two successive counts agree.
pub fn count_by_sign_changes_stable(
    h: &Hamiltonian,
    l: f64,
    beta: f64,
    w: &SpectralWindow,
    initial_step: f64,
) -> Result<SignChangeScan, OracleError> {
    let mut step = initial_step;
    let mut prev = count_by_sign_changes(h, l, beta, w, step)?;
    for _ in 0..12 {
        step *= 0.5;
        let next = count_by_sign_changes(h, l, beta, w, step)?;
        if next.count() == prev.count() {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Solution of `alpha' = alpha^2 + C/x^2` with `alpha(a) = -infinity`:
/// `-(1/(a xi)) (p+ xi^d - p-)/(xi^d - 1)`, `xi = x/a`, `d = sqrt(1 - 4C)`.
pub fn euler_comparison_alpha(x: f64, a: f64, c: f64) -> Result<f64, OracleError> {
    if !(c > 0.0 && c < 0.25) {
        return Err(OracleError::BadConstant(c));
    }
    if !(a > 0.0 && x >= a) {
        return Err(OracleError::BadPoint { x, a });
    }
    let d = (1.0 - 4.0 * c).sqrt();
    let (pp, pm) = (0.5 * (1.0 + d), 0.5 * (1.0 - d));
    let xi = x / a;
    let y = xi.powf(d);
    if y == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-(pp * y - pm) / (a * xi * (y - 1.0)))
}

/// Solution of `theta' = k (theta - b/x)^2` with `theta(a) = theta0`, in
/// closed form through the Euler equation `-u'' - (b k / s^2) u = 0` in
/// `s = k x`. Returns `None` once the solution has blown up (the
/// linearised `u` vanished), i.e. `theta` has run through `+infinity`.
pub fn euler_riccati_theta(x: f64, a: f64, theta0: f64, b: f64, k: f64) -> Option<f64> {
    assert!(a > 0.0 && x >= a && k > 0.0);
    let c = b * k;
    let a_s = k * a;
    let alpha_a = theta0 - b / a;
    let xi = x / a;
    let lx = xi.ln();
    // u(xi) normalised so that u(1) = 1, du/dxi(1) = -alpha_a a_s
    let g = -alpha_a * a_s;
    let alpha = if (c - 0.25).abs() < 1e-12 {
        let c2 = g - 0.5;
        let den = 1.0 + c2 * lx;
        if den <= 0.0 {
            return None;
        }
        -(0.5 + c2 / den) / (a_s * xi)
    } else if c < 0.25 {
        let d = (1.0 - 4.0 * c).sqrt();
        let (pp, pm) = (0.5 * (1.0 + d), 0.5 * (1.0 - d));
        let cp = (g - pm) / d;
        let cm = 1.0 - cp;
        let y = (d * lx).exp();
        let den = cp * y + cm;
        if den <= 0.0 {
            return None;
        }
        -(cp * pp * y + cm * pm) / (a_s * xi * den)
    } else {
        let mu = 0.5 * (4.0 * c - 1.0).sqrt();
        let c2 = (g - 0.5) / mu;
        let delta = c2.atan();
        if mu * lx >= std::f64::consts::FRAC_PI_2 + delta {
            return None;
        }
        let (s, co) = (mu * lx).sin_cos();
        let u = co + c2 * s;
        let du = 0.5 * u + mu * (c2 * co - s);
        -du / (a_s * xi * u)
    };
    Some(alpha + b / x)
}

/// Solution of `theta' = k (theta - level)^2` with `theta(a) = theta0`;
/// `None` after blow-up.
pub fn frozen_riccati_theta(x: f64, a: f64, theta0: f64, level: f64, k: f64) -> Option<f64> {
    let a0 = theta0 - level;
    let den = 1.0 - a0 * k * (x - a);
    if den <= 0.0 {
        return None;
    }
    Some(level + a0 / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Segment, Tail};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn p0() -> Hamiltonian {
        Hamiltonian::new(vec![Segment::angle(1.0, 0.0)], Tail::None).unwrap()
    }

    #[test]
    fn boundary_functional_examples() {
        let h = p0();
        for beta in [0.0, 0.4, 2.0] {
            let f = boundary_functional(&h, 1.0, beta, 0.0).unwrap();
            assert!((f - beta.sin()).abs() < 1e-15);
        }
        for lambda in [-3.0, 0.5, 10.0] {
            let f = boundary_functional(&h, 1.0, FRAC_PI_2, lambda).unwrap();
            assert!((f - 1.0).abs() < 1e-15);
            let g = boundary_functional(&h, 1.0, FRAC_PI_4, lambda).unwrap();
            assert!((g - (1.0 - lambda) / 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn p0_factor_is_lower_triangular() {
        let t = product_transfer_matrix(&p0(), 1.0, Complex64::new(2.0, 0.0)).unwrap();
        assert_eq!(t[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(t[0][1], Complex64::new(0.0, 0.0));
        assert_eq!(t[1][0], Complex64::new(2.0, 0.0));
        assert_eq!(t[1][1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn matrix_factor_is_exponential() {
        // H = I/2: u' = (z/2) J u is a rotation by z len / 2
        let m = MatrixH::new(0.5, 0.0, 0.5).unwrap();
        let f = constant_factor(&m, 2.0, Complex64::new(0.7, 0.0));
        let w: f64 = 0.7;
        assert!((f[0][0].re - w.cos()).abs() < 1e-15);
        assert!((f[0][1].re + w.sin()).abs() < 1e-15);
        assert!((f[1][0].re - w.sin()).abs() < 1e-15);
    }

    #[test]
    fn sign_change_examples() {
        let h = p0();
        let w = SpectralWindow::half_open(0.5, 2.0).unwrap();
        let scan = count_by_sign_changes(&h, 1.0, FRAC_PI_4, &w, 0.01).unwrap();
        assert_eq!(scan.count(), 1);
        assert!((scan.root_estimates()[0] - 1.0).abs() < 1e-8);
        let below = SpectralWindow::half_open(-2.0, -0.5).unwrap();
        assert_eq!(count_by_sign_changes(&h, 1.0, FRAC_PI_4, &below, 0.01).unwrap().count(), 0);
    }

    #[test]
    fn sign_change_counts_rotation_zeros() {
        let m = MatrixH::new(0.5, 0.0, 0.5).unwrap();
        let h = Hamiltonian::new(vec![Segment::matrix(4.0, m)], Tail::None).unwrap();
        let w = SpectralWindow::half_open(0.1, 20.0).unwrap();
        let scan = count_by_sign_changes_stable(&h, 4.0, 0.0, &w, 1.0).unwrap();
        // u = (cos 2 lambda, sin 2 lambda), so beta = 0 gives lambda = n pi / 2
        let want = (1..).take_while(|n| (*n as f64) * FRAC_PI_2 < 20.0).count();
        assert_eq!(scan.count(), want);
    }

    #[test]
    fn rejects_ramps() {
        let h = Hamiltonian::new(vec![Segment::ramp(1.0, 0.5, 0.0)], Tail::None).unwrap();
        assert!(matches!(
            boundary_functional(&h, 1.0, 0.0, 1.0),
            Err(OracleError::NotPiecewiseConstant(0))
        ));
    }

    #[test]
    fn euler_alpha_below_minus_c_over_x() {
        for &c in &[0.05, 0.2, 0.249] {
            let a = 2.0;
            let mut x = a * 1.001;
            while x < 1e6 * a {
                let al = euler_comparison_alpha(x, a, c).unwrap();
                assert!(al < -c / x, "C = {c}, x = {x}");
                x *= 1.3;
            }
        }
        assert!(euler_comparison_alpha(2.0, 1.0, 0.25).is_err());
        assert!(euler_comparison_alpha(1.0 + 1e-13, 1.0, 0.1).unwrap() < -1e10);
    }

    #[test]
    fn euler_alpha_solves_riccati() {
        let (a, c) = (1.5, 0.15);
        for &x in &[1.7, 3.0, 10.0, 100.0] {
            let h = 1e-5 * x;
            let d = (euler_comparison_alpha(x + h, a, c).unwrap()
                - euler_comparison_alpha(x - h, a, c).unwrap())
                / (2.0 * h);
            let al = euler_comparison_alpha(x, a, c).unwrap();
            let res = d - (al * al + c / (x * x));
            assert!(res.abs() < 1e-8 * (1.0 + al * al), "x = {x}: {res}");
        }
    }

    #[test]
    fn general_euler_solution_solves_ode() {
        for &(b, k) in &[(0.5, 0.3), (1.0, 0.25), (1.0, 0.6)] {
            let (a, th0) = (1.0, -0.4);
            assert!((euler_riccati_theta(a, a, th0, b, k).unwrap() - th0).abs() < 1e-14);
            for &x in &[1.2, 2.0, 5.0] {
                let Some(th) = euler_riccati_theta(x, a, th0, b, k) else {
                    continue;
                };
                let h = 1e-5;
                let d = (euler_riccati_theta(x + h, a, th0, b, k).unwrap()
                    - euler_riccati_theta(x - h, a, th0, b, k).unwrap())
                    / (2.0 * h);
                let rhs = k * (th - b / x).powi(2);
                assert!((d - rhs).abs() < 1e-7, "b = {b}, k = {k}, x = {x}");
            }
        }
    }

    #[test]
    fn lower_branch_stays_negative_below_quarter() {
        for &c in &[0.1, 0.2, 0.24] {
            let a = 1.0;
            let mut x = a;
            while x <= 1e6 * a {
                let th = euler_riccati_theta(x, a, -0.5, c, 1.0).unwrap();
                assert!(th < 0.0, "C = {c}, x = {x}, theta = {th}");
                x *= 1.5;
            }
        }
    }

    #[test]
    fn upper_branch_crosses_zero() {
        let (b_const, eps) = (2.0, 0.3);
        assert!(b_const > 1.0 / (1.0 - eps));
        let (a, th0) = (10.0, -0.5);
        let b = 1e4;
        let th = frozen_riccati_theta(b, a, th0, b_const / b, 1.0 - eps).unwrap();
        assert!(th > 0.0);
    }

    #[test]
    fn small_c_reduces_to_pure_riccati() {
        let (a, th0) = (1.0, -0.8);
        for &x in &[1.5, 4.0, 30.0] {
            let e = euler_riccati_theta(x, a, th0, 1e-10, 1.0).unwrap();
            let f = frozen_riccati_theta(x, a, th0, 0.0, 1.0).unwrap();
            assert!((e - f).abs() < 1e-8);
        }
    }
}
