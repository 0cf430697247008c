use std::f64::consts::FRAC_PI_2;

use crate::hamiltonian::PhiProfile;

use super::SpectraError;

/// Interior samples added to the breakpoints inside the tail window.
pub const TAIL_SAMPLES: usize = 1000;
/// Log-log slope of `g` below which it counts as vanishing.
pub const VANISHING_SLOPE: f64 = -0.5;
/// Log-log slope of `g` above which it counts as unbounded.
pub const UNBOUNDED_SLOPE: f64 = 0.1;
/// Slope magnitude above which a finite estimate is flagged as trending.
pub const TREND_SLOPE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EssVerdict {
    /// `g -> 0`: empty essential spectrum.
    Empty,
    /// `g -> infinity`: `0` lies in the essential spectrum.
    ContainsZero,
    /// Finite positive limits; the bounds apply.
    Bounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EssBounds {
    /// limsup estimate (0 or infinity after trend classification).
    pub a: f64,
    /// liminf estimate.
    pub b: f64,
    pub lower: f64,
    pub upper: f64,
    pub tail_window: (f64, f64),
    /// Raw window extrema of `g(x) = x (phi(x) - phi(infinity))`.
    pub sup_g: f64,
    pub inf_g: f64,
    /// Least-squares slope of `ln g` against `ln x` over the window.
    pub log_slope: f64,
    pub verdict: EssVerdict,
    pub warnings: Vec<String>,
}

fn window_samples(phi: &PhiProfile, lo: f64, hi: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = phi
        .breakpoints()
        .into_iter()
        .map(|b| b.0)
        .filter(|&x| x >= lo && x <= hi && x > 0.0)
        .collect();
    xs.extend((0..=TAIL_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / TAIL_SAMPLES as f64));
    xs.retain(|&x| x > 0.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn eval_left_at_end(phi: &PhiProfile, x: f64) -> f64 {
    if x >= phi.length() {
        phi.end_value()
    } else {
        phi.eval(x)
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Bounds `1/(4A) <= min ess spectrum <= min(1/A, 1/(4B))` with `A`, `B`
/// read off `g(x) = x (phi(x) - phi(infinity))` on the last
/// `1 - tail_fraction` of the domain.
pub fn ess_spectrum_bounds(phi: &PhiProfile, tail_fraction: f64) -> Result<EssBounds, SpectraError> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(SpectraError::BadParameter(format!(
            "tail fraction must lie in (0, 1), got {tail_fraction}"
        )));
    }
    let x_max = phi.length();
    let lo = tail_fraction * x_max;
    let inf = phi.phi_infinity();
    let g: Vec<(f64, f64)> = window_samples(phi, lo, x_max)
        .into_iter()
        .map(|x| (x, x * (eval_left_at_end(phi, x) - inf).max(0.0)))
        .collect();
    let sup_g = g.iter().map(|p| p.1).fold(0.0, f64::max);
    let inf_g = g.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let logs: Vec<(f64, f64)> = g
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let mut warnings = Vec::new();
    let (verdict, log_slope) = if sup_g == 0.0 {
        (EssVerdict::Empty, f64::NEG_INFINITY)
    } else if logs.len() < g.len() {
        // g touches zero inside the window: phi reached its limit
        (EssVerdict::Empty, slope(&logs))
    } else {
        let s = slope(&logs);
        if s < VANISHING_SLOPE {
            (EssVerdict::Empty, s)
        } else if s > UNBOUNDED_SLOPE {
            (EssVerdict::ContainsZero, s)
        } else {
            if s.abs() > TREND_SLOPE {
                warnings.push(format!(
                    "x (phi - phi_inf) still trending at the end of the data (log-log slope {s:.3})"
                ));
            }
            (EssVerdict::Bounded, s)
        }
    };
    warnings.push(format!(
        "limsup/liminf estimated on the finite window [{lo}, {x_max}]"
    ));
    let (a, b) = match verdict {
        EssVerdict::Empty => (0.0, 0.0),
        EssVerdict::ContainsZero => (f64::INFINITY, f64::INFINITY),
        EssVerdict::Bounded => (sup_g, inf_g),
    };
    let lower = 1.0 / (4.0 * a);
    let upper = (1.0 / a).min(1.0 / (4.0 * b));
    Ok(EssBounds {
        a,
        b,
        lower,
        upper,
        tail_window: (lo, x_max),
        sup_g,
        inf_g,
        log_slope,
        verdict,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailModel {
    /// Fit `phi + pi/2 ~ c x^(-p)` on the last half of the domain.
    Fitted,
    /// `phi = phi(infinity)` beyond the data.
    Flat,
    /// `phi + pi/2 = c x^(-p)` beyond the data.
    PowerLaw { c: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEigReport {
    pub body_integral: f64,
    pub tail_integral: f64,
    /// Fitted or declared decay exponent of `phi + pi/2`.
    pub exponent: Option<f64>,
    pub eigenvalue_at_zero: bool,
}

/// `0` is an eigenvalue iff `phi(infinity) = -pi/2` and `cos^2 phi` is
/// integrable; the integral over the data is exact for piecewise-linear
/// `phi`, the remainder comes from the tail model.
pub fn zero_eigenvalue_check(phi: &PhiProfile, tail: TailModel) -> ZeroEigReport {
    let not_limit = (phi.phi_infinity() + FRAC_PI_2).abs() > 1e-12;
    let body: f64 = phi.pieces().iter().map(|p| cos2_integral(p.phi0, p.phi1, p.length())).sum();
    if not_limit {
        return ZeroEigReport {
            body_integral: body,
            tail_integral: f64::INFINITY,
            exponent: None,
            eigenvalue_at_zero: false,
        };
    }
    let x_max = phi.length();
    let model = match tail {
        TailModel::Fitted => fit_power_tail(phi),
        other => other,
    };
    let (tail_integral, exponent) = match model {
        TailModel::Flat | TailModel::Fitted => (0.0, None),
        TailModel::PowerLaw { c, p } => {
            let v = if 2.0 * p > 1.0 {
                c * c * x_max.powf(1.0 - 2.0 * p) / (2.0 * p - 1.0)
            } else {
                f64::INFINITY
            };
            (v, Some(p))
        }
    };
    ZeroEigReport {
        body_integral: body,
        tail_integral,
        exponent,
        eigenvalue_at_zero: (body + tail_integral).is_finite(),
    }
}

/// `int cos^2(phi) dx` over a piece where `phi` runs linearly from `p0` to `p1`.
pub fn cos2_integral(p0: f64, p1: f64, len: f64) -> f64 {
    if (p1 - p0).abs() < 1e-9 {
        let m = 0.5 * (p0 + p1);
        let d = p1 - p0;
        // second-order expansion around the midpoint
        return len * (m.cos().powi(2) - (2.0 * m).cos() * d * d / 12.0);
    }
    let prim = |p: f64| 0.5 * p + 0.25 * (2.0 * p).sin();
    len * (prim(p1) - prim(p0)) / (p1 - p0)
}

fn fit_power_tail(phi: &PhiProfile) -> TailModel {
    let x_max = phi.length();
    let pts: Vec<(f64, f64)> = window_samples(phi, 0.5 * x_max, x_max)
        .into_iter()
        .map(|x| (x, eval_left_at_end(phi, x) + FRAC_PI_2))
        .filter(|p| p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    if pts.len() < 2 {
        return TailModel::Flat;
    }
    let p = -slope(&pts);
    let last = pts[pts.len() - 1];
    let c = (last.1 + p * last.0).exp();
    TailModel::PowerLaw { c, p }
}
