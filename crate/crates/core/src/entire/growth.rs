use std::f64::consts::PI;
use std::sync::Mutex;

use crate::exec::Execution;
use crate::hamiltonian::{Hamiltonian, PieceKind, RANK_ONE_TOL};
use crate::spectra::{classify_semibounded, Classification};

use super::transfer::{transfer_matrix, C64};
use super::EntireError;

/// Fitted order must not exceed this for systems with nonnegative spectrum.
pub const ORDER_UPPER: f64 = 0.55;
/// Fitted order must reach this when `phi` has a ramp.
pub const ORDER_LOWER: f64 = 0.45;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    pub r_min: f64,
    pub r_max: f64,
    pub n_radii: usize,
    pub n_phases: usize,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            r_min: 1.0,
            r_max: 1e6,
            n_radii: 16,
            n_phases: 16,
        }
    }
}

impl FitParams {
    fn check(&self) -> Result<(), EntireError> {
        if !(self.r_min > 0.0 && self.r_max / self.r_min >= 1e3) {
            return Err(EntireError::BadParameter(format!(
                "radius range [{}, {}] spans less than three decades",
                self.r_min, self.r_max
            )));
        }
        if self.n_radii < 8 || self.n_phases == 0 {
            return Err(EntireError::BadParameter(
                "need at least 8 radii and one phase".into(),
            ));
        }
        Ok(())
    }

    pub fn radii(&self) -> Vec<f64> {
        let q = (self.r_max / self.r_min).ln() / (self.n_radii - 1) as f64;
        (0..self.n_radii)
            .map(|i| {
                if i + 1 == self.n_radii {
                    self.r_max
                } else {
                    self.r_min * (q * i as f64).exp()
                }
            })
            .collect()
    }
}

/// Growth of an entire function from samples of `ln |F|` on circles.
///
/// `order` is a least-squares slope of `ln ln M(r)` against `ln r` over the
/// upper half of the radii: an estimate at finite radius, not the infimum
/// in the definition of the order.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub radii: Vec<f64>,
    /// `(r, ln M(r))`, `M(r)` the maximum over the sampled phases.
    pub log_max: Vec<(f64, f64)>,
    pub order: f64,
    /// RMS residual of the order regression.
    pub residual: f64,
    /// Slope of `ln M(r)` against `r` over the same radii.
    pub type_along_ray: f64,
    /// Radii used by the regression.
    pub fit_range: (f64, f64),
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Samples `log_abs(r e^{i 2 pi k / n_phases})` on the geometric radius grid
/// and fits the order. `log_abs` returns `ln |F(z)|`.
pub fn order_fit<F>(log_abs: F, params: &FitParams, exec: Execution) -> Result<GrowthFit, EntireError>
where
    F: Fn(C64) -> Result<f64, EntireError> + Sync,
{
    params.check()?;
    let radii = params.radii();
    let np = params.n_phases;
    let values = exec.map_range(radii.len() * np, |k| {
        let r = radii[k / np];
        let phase = 2.0 * PI * (k % np) as f64 / np as f64;
        log_abs(C64::from_polar(r, phase))
    });
    let mut log_max = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        let mut m = f64::NEG_INFINITY;
        for v in &values[i * np..(i + 1) * np] {
            let v = v.clone()?;
            if v > m || m.is_nan() {
                m = v;
            }
        }
        log_max.push((r, m));
    }
    let upper = &log_max[radii.len() / 2..];
    let mut loglog = Vec::with_capacity(upper.len());
    for &(r, m) in upper {
        if !(m > 0.0) {
            return Err(EntireError::NoGrowth { r, log_m: m });
        }
        loglog.push((r.ln(), m.ln()));
    }
    let (order, _, residual) = linear_fit(&loglog);
    let (type_along_ray, _, _) = linear_fit(upper);
    Ok(GrowthFit {
        fit_range: (upper[0].0, upper[upper.len() - 1].0),
        radii,
        log_max,
        order,
        residual,
        type_along_ray,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypeFit {
    pub phase: f64,
    /// `(r, ln |F(r e^{i phase})|)`.
    pub samples: Vec<(f64, f64)>,
    /// Slope of `ln |F|` against `r`: the exponential type along the ray.
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

/// Exponential growth rate along one ray from `n` equally spaced radii.
pub fn type_fit<F>(
    log_abs: F,
    phase: f64,
    r_min: f64,
    r_max: f64,
    n: usize,
    exec: Execution,
) -> Result<TypeFit, EntireError>
where
    F: Fn(C64) -> Result<f64, EntireError> + Sync,
{
    if !(r_max > r_min && r_min >= 0.0) || n < 2 {
        return Err(EntireError::BadParameter(format!(
            "type fit over [{r_min}, {r_max}] with {n} radii"
        )));
    }
    let radii: Vec<f64> = (0..n)
        .map(|i| r_min + (r_max - r_min) * i as f64 / (n - 1) as f64)
        .collect();
    let vals = exec.map(&radii, |&r| log_abs(C64::from_polar(r, phase)));
    let mut samples = Vec::with_capacity(n);
    for (r, v) in radii.into_iter().zip(vals) {
        samples.push((r, v?));
    }
    let (slope, intercept, residual) = linear_fit(&samples);
    Ok(TypeFit {
        phase,
        samples,
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderBoundReport {
    pub in_c_plus: bool,
    pub has_ramp: bool,
    pub fit: GrowthFit,
    pub upper_ok: bool,
    /// Checked only when `phi` has a ramp.
    pub lower_ok: Option<bool>,
    pub max_det_defect: f64,
}

impl OrderBoundReport {
    pub fn holds(&self) -> bool {
        self.in_c_plus && self.upper_ok && self.lower_ok.unwrap_or(true)
    }
}

/// Order of `z -> max_ij |T_ij(l; z)|`: at most `ORDER_UPPER` for systems
/// with nonnegative spectrum, and at least `ORDER_LOWER` when `phi` has a
/// ramp on `(0, l)`.
pub fn order_bound_check(
    h: &Hamiltonian,
    l: f64,
    params: &FitParams,
    tol: f64,
    exec: Execution,
) -> Result<OrderBoundReport, EntireError> {
    let in_c_plus = matches!(
        classify_semibounded(h, RANK_ONE_TOL),
        Ok(Classification::InCPlus(_))
    );
    let has_ramp = h
        .pieces_upto(l)
        .iter()
        .any(|p| matches!(p.kind, PieceKind::Ramp { .. }));
    let defect = Mutex::new(0.0f64);
    let fit = order_fit(
        |z| {
            let t = transfer_matrix(h, l, z, tol)?;
            let d = t.det_defect();
            let mut m = defect.lock().unwrap();
            *m = m.max(d);
            Ok(t.log_norm())
        },
        params,
        exec,
    )?;
    let upper_ok = fit.order <= ORDER_UPPER;
    let lower_ok = has_ramp.then_some(fit.order >= ORDER_LOWER);
    Ok(OrderBoundReport {
        in_c_plus,
        has_ramp,
        upper_ok,
        lower_ok,
        max_det_defect: defect.into_inner().unwrap(),
        fit,
    })
}
