use crate::exec::Execution;

use super::schrodinger::{rk, Potential, SchrodingerProblem};
use super::TransformError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowVerdict {
    DivergesLikely,
    NotDiverging,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolchanovTable {
    pub x_grid: Vec<f64>,
    pub d_list: Vec<f64>,
    /// `rows[j][i] = int_{x_i}^{x_i + d_j} V`.
    pub rows: Vec<Vec<f64>>,
    pub verdict: WindowVerdict,
}

/// Window integrals of `V`, exact for the piecewise-linear interpolant.
/// Divergence is declared when every row increases strictly over the last
/// half of the grid.
pub fn molchanov_classic(
    v: &Potential,
    d_list: &[f64],
    x_grid: &[f64],
    exec: Execution,
) -> Result<MolchanovTable, TransformError> {
    let reach = x_grid.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        + d_list.iter().copied().fold(0.0, f64::max);
    if reach > v.x_max() * (1.0 + 1e-12) {
        return Err(TransformError::BadPotential(format!(
            "potential sampled up to {}, windows need {reach}",
            v.x_max()
        )));
    }
    let rows: Vec<Vec<f64>> = exec.map(d_list, |&d| {
        x_grid
            .iter()
            .map(|&x| v.cumulative(x + d) - v.cumulative(x))
            .collect()
    });
    let half = x_grid.len() / 2;
    let increasing = rows
        .iter()
        .all(|r| r.len() >= 2 && r[half.min(r.len() - 2)..].windows(2).all(|w| w[1] > w[0]));
    Ok(MolchanovTable {
        x_grid: x_grid.to_vec(),
        d_list: d_list.to_vec(),
        rows,
        verdict: if increasing {
            WindowVerdict::DivergesLikely
        } else {
            WindowVerdict::NotDiverging
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendVerdict {
    TrendsToZero,
    NotToZero,
}

/// Required decrease of `G` between the middle and the end of the grid.
pub const TREND_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct MolchanovNew {
    /// `(x, G(x))`.
    pub g: Vec<(f64, f64)>,
    /// `(x, int_0^x q^2)`.
    pub q_mass: Vec<(f64, f64)>,
    /// `int q^2` at least doubles over the final half of the grid.
    pub q_not_l2: bool,
    pub verdict: TrendVerdict,
}

/// `G(x) = int_0^x q^2 * int_x^inf q^-2`, where the tail integral is
/// `-f(x) / (W q(x))` for the decaying solution `f` and the Wronskian
/// `W = f' q - f q'`. `f` is integrated backward from the right end with a
/// WKB slope; `q` (`q = 0`, `q' = 1` at the left end) forward.
pub fn molchanov_new(problem: &SchrodingerProblem, x_grid: &[f64]) -> Result<MolchanovNew, TransformError> {
    let pot = &problem.potential;
    let e0 = problem.e0;
    if x_grid.is_empty() || x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(TransformError::BadGrid);
    }
    let (lo, hi) = (pot.x_min(), pot.x_max());
    if x_grid[0] <= lo || *x_grid.last().unwrap() > hi {
        return Err(TransformError::BadGrid);
    }
    let solver = rk();

    let fq = |x: f64, y: &[f64; 3]| [y[1], (pot.eval(x) - e0) * y[0], y[0] * y[0]];
    let mut q_vals = Vec::with_capacity(x_grid.len());
    let mut y = [0.0, 1.0, 0.0];
    let mut x = lo;
    for &xg in x_grid {
        y = solver.integrate(fq, x, y, xg, 0.0, |_, _| {})?.0;
        x = xg;
        q_vals.push(y);
    }

    // backward in s = hi - x
    let ff = |s: f64, y: &[f64; 2]| [-y[1], -(pot.eval(hi - s) - e0) * y[0]];
    let kappa = (pot.eval(hi) - e0).max(0.0).sqrt();
    let mut f_vals = vec![[0.0; 2]; x_grid.len()];
    let mut yf = [1.0, -kappa];
    let mut s = 0.0;
    for (i, &xg) in x_grid.iter().enumerate().rev() {
        yf = solver.integrate(ff, s, yf, hi - xg, 0.0, |_, _| {})?.0;
        s = hi - xg;
        f_vals[i] = yf;
    }

    let mut g = Vec::with_capacity(x_grid.len());
    for (i, &xg) in x_grid.iter().enumerate() {
        let [q, dq, mass] = q_vals[i];
        let [f, df] = f_vals[i];
        if q <= 0.0 {
            return Err(TransformError::AssumptionViolated(format!(
                "q vanishes near x = {xg}"
            )));
        }
        let w = df * q - f * dq;
        let tail = -f / (w * q);
        g.push((xg, mass * tail));
    }
    let n = g.len();
    let mid = n / 2;
    let verdict = if n >= 2 && g[mid].1 >= TREND_FACTOR * g[n - 1].1 {
        TrendVerdict::TrendsToZero
    } else {
        TrendVerdict::NotToZero
    };
    let q_mass: Vec<(f64, f64)> = x_grid.iter().zip(&q_vals).map(|(&x, y)| (x, y[2])).collect();
    let q_not_l2 = n >= 2 && q_mass[n - 1].1 >= 2.0 * q_mass[mid].1;
    Ok(MolchanovNew {
        g,
        q_mass,
        q_not_l2,
        verdict,
    })
}

/// Geometric grid of `n` points from `a` to `b`.
pub fn geometric_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let r = (b / a).powf(1.0 / (n - 1) as f64);
    (0..n).map(|i| if i + 1 == n { b } else { a * r.powi(i as i32) }).collect()
}
