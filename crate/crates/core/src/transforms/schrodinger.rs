use std::f64::consts::FRAC_PI_2;

use crate::hamiltonian::{Hamiltonian, Segment, Tail};
use crate::ode::{Dopri5, ErrorControl};

use super::TransformError;

/// Piecewise-linear potential sampled on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    x: Vec<f64>,
    v: Vec<f64>,
}

impl Potential {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Result<Self, TransformError> {
        if x.len() != v.len() || x.len() < 2 {
            return Err(TransformError::BadPotential(
                "need at least two (x, V) samples".into(),
            ));
        }
        if let Some(i) = x.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(TransformError::BadPotential(format!(
                "grid not strictly increasing at sample {}",
                i + 1
            )));
        }
        if x.iter().chain(&v).any(|a| !a.is_finite()) {
            return Err(TransformError::BadPotential("non-finite sample".into()));
        }
        Ok(Self { x, v })
    }

    /// Samples `f` on `n + 1` equally spaced points of `[a, b]`.
    pub fn sample(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> Result<Self, TransformError> {
        let x: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let v = x.iter().map(|&t| f(t)).collect();
        Self::new(x, v)
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.v
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Linear interpolation, constant beyond the ends.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.x.partition_point(|&a| a <= t);
        if i == 0 {
            return self.v[0];
        }
        if i >= self.x.len() {
            return self.v[self.v.len() - 1];
        }
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        self.v[i - 1] + (self.v[i] - self.v[i - 1]) * (t - x0) / (x1 - x0)
    }

    /// `int_{x_min}^{t} V` of the interpolant.
    pub fn cumulative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for w in 0..self.x.len() - 1 {
            let (a, b) = (self.x[w], self.x[w + 1]);
            if t <= a {
                break;
            }
            let e = t.min(b);
            acc += 0.5 * (self.v[w] + self.eval(e)) * (e - a);
        }
        if t > self.x_max() {
            acc += self.v[self.v.len() - 1] * (t - self.x_max());
        }
        acc
    }
}

/// `-y'' + V y = E y` on `[x_min, x_max]`, taken at the reference energy
/// `e0`, which the caller asserts lies below the spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerProblem {
    pub potential: Potential,
    pub e0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalImport {
    /// `H = P_phi` as one angle table in the variable `X`.
    pub hamiltonian: Hamiltonian,
    /// `(x, X(x))` with `X = int (p^2 + q^2)`.
    pub x_map: Vec<(f64, f64)>,
    /// `(x, phi)` at the same points.
    pub phi: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

pub(crate) fn rk() -> Dopri5 {
    Dopri5::new(ErrorControl::Mixed {
        atol: 1e-14,
        rtol: 1e-12,
    })
}

/// Solutions `p` (`p = 1, p' = 0`) and `q` (`q = 0, q' = 1`) at the left
/// end, turned into `H = P_phi` with `phi = atan2(-q, p)` in the variable
/// `X = int (p^2 + q^2)`. Because `p q' - p' q = 1`, `phi' = -1/(p^2 + q^2)`:
/// the angle decreases and stays above `-pi/2` exactly when `p` has no zero.
pub fn schrodinger_to_canonical(problem: &SchrodingerProblem) -> Result<CanonicalImport, TransformError> {
    let pot = &problem.potential;
    let e0 = problem.e0;
    let grid = pot.grid();
    let f = |x: f64, y: &[f64; 5]| {
        let w = pot.eval(x) - e0;
        [y[1], w * y[0], y[3], w * y[2], y[0] * y[0] + y[2] * y[2]]
    };
    let solver = rk();
    let mut y = [1.0, 0.0, 0.0, 1.0, 0.0];
    let mut pts: Vec<(f64, [f64; 5])> = vec![(grid[0], y)];
    let mut h_hint = 0.0;
    for w in grid.windows(2) {
        let (y1, stats) = solver.integrate(f, w[0], y, w[1], h_hint, |x, s| pts.push((x, *s)))?;
        y = y1;
        h_hint = stats.last_h;
    }
    if pts.iter().any(|p| !p.1[4].is_finite() || !p.1[0].is_finite()) {
        return Err(TransformError::Overflow);
    }

    let mut x_map = Vec::with_capacity(pts.len());
    let mut phi = Vec::with_capacity(pts.len());
    let mut table: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &(x, s) in &pts {
        let angle = (-s[2]).atan2(s[0]);
        if angle < -FRAC_PI_2 {
            return Err(TransformError::AssumptionViolated(format!(
                "p changes sign near x = {x}: the reference energy is not below the spectrum"
            )));
        }
        if let Some(&(_, prev)) = table.last() {
            if angle > prev + 1e-12 {
                return Err(TransformError::AssumptionViolated(format!(
                    "angle increases near x = {x}"
                )));
            }
        }
        x_map.push((x, s[4]));
        phi.push((x, angle));
        match table.last() {
            Some(&(xl, _)) if s[4] <= xl => {}
            _ => table.push((s[4], angle)),
        }
    }
    let mut warnings = Vec::new();
    let (p_end, q_end) = (y[0], y[2]);
    if q_end != 0.0 && (p_end / q_end).abs() > 1e12 {
        warnings.push("p/q grows without bound; q may be the square-integrable solution".into());
    }
    let hamiltonian = Hamiltonian::new(vec![Segment::table(table)], Tail::None)?;
    Ok(CanonicalImport {
        hamiltonian,
        x_map,
        phi,
        warnings,
    })
}
