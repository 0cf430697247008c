use crate::quad;

use super::transfer::C64;
use super::EntireError;

/// Relative change between `R` and `2R` below which the integral is taken
/// as convergent.
pub const H2_REL_CHANGE: f64 = 0.01;

/// `A(z) = prod (1 - z/n^alpha)` and `C(z) = z prod (1 - z/z_n)` with
/// `z_n = (n^alpha + (n+1)^alpha)/2`, truncated after `n_terms` factors and
/// corrected by `exp(-z sum_{n > N} 1/a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HadamardFamily {
    pub alpha: f64,
    pub n_terms: usize,
    tail_a: f64,
    tail_c: f64,
}

/// Snap distance to a retained zero, relative to the zero.
const ZERO_SNAP: f64 = 1e-12;

fn zero_a(n: f64, alpha: f64) -> f64 {
    n.powf(alpha)
}

fn zero_c(n: f64, alpha: f64) -> f64 {
    0.5 * (n.powf(alpha) + (n + 1.0).powf(alpha))
}

/// `sum_{n > N} f(n)` by Euler–Maclaurin from `N`.
fn em_tail(integral: f64, f_n: f64, df_n: f64) -> f64 {
    integral - 0.5 * f_n - df_n / 12.0
}

impl HadamardFamily {
    pub fn new(alpha: f64, n_terms: usize) -> Result<Self, EntireError> {
        if !(alpha > 2.0) || n_terms == 0 {
            return Err(EntireError::BadParameter(format!(
                "Hadamard family needs alpha > 2 and N >= 1 (alpha = {alpha}, N = {n_terms})"
            )));
        }
        let n = n_terms as f64;
        let tail_a = em_tail(
            n.powf(1.0 - alpha) / (alpha - 1.0),
            n.powf(-alpha),
            -alpha * n.powf(-alpha - 1.0),
        );
        // f(x) = 2/(x^a + (x+1)^a); integral over [N, inf) with u = 1/x
        let g = |x: f64| x.powf(alpha) + (x + 1.0).powf(alpha);
        let dg = |x: f64| alpha * (x.powf(alpha - 1.0) + (x + 1.0).powf(alpha - 1.0));
        let q = quad::integrate(
            |u: f64| {
                if u <= 0.0 {
                    0.0
                } else {
                    let x = 1.0 / u;
                    2.0 / g(x) / (u * u)
                }
            },
            0.0,
            1.0 / n,
            0.0,
            1e-14,
        );
        let tail_c = em_tail(q.value, 2.0 / g(n), -2.0 * dg(n) / g(n).powi(2));
        Ok(Self {
            alpha,
            n_terms,
            tail_a,
            tail_c,
        })
    }

    /// Family with enough factors for `|z| <= z_abs`; see [`choose_terms`].
    pub fn for_radius(alpha: f64, z_abs: f64) -> Result<Self, EntireError> {
        Self::new(alpha, choose_terms(z_abs, alpha, 1e-12))
    }

    /// Bound on the error of `ln A` or `ln C` at `|z| = z_abs` left after the
    /// first-order tail correction: `sum_{n > N} |z / n^alpha|^2`.
    pub fn tail_bound(&self, z_abs: f64) -> f64 {
        tail_bound(z_abs, self.alpha, self.n_terms)
    }

    pub fn zeros_a(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n_terms).map(|n| zero_a(n as f64, self.alpha))
    }

    /// Zeros of `C` after `0`.
    pub fn zeros_c(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n_terms).map(|n| zero_c(n as f64, self.alpha))
    }

    fn log_product(&self, z: C64, zero: fn(f64, f64) -> f64, tail: f64) -> C64 {
        let mut acc = -z * tail;
        for n in 1..=self.n_terms {
            let w = C64::new(1.0, 0.0) - z / zero(n as f64, self.alpha);
            if w.norm() <= ZERO_SNAP {
                return C64::new(f64::NEG_INFINITY, 0.0);
            }
            acc += w.ln();
        }
        acc
    }

    /// `ln A(z)`; the real part is `ln |A(z)|`, `-inf` at a retained zero.
    pub fn log_a(&self, z: C64) -> C64 {
        self.log_product(z, zero_a, self.tail_a)
    }

    /// `ln C(z)`.
    pub fn log_c(&self, z: C64) -> C64 {
        if z.norm() == 0.0 {
            return C64::new(f64::NEG_INFINITY, 0.0);
        }
        z.ln() + self.log_product(z, zero_c, self.tail_c)
    }

    pub fn a(&self, z: C64) -> C64 {
        let l = self.log_a(z);
        if l.re == f64::NEG_INFINITY {
            C64::new(0.0, 0.0)
        } else {
            l.exp()
        }
    }

    pub fn c(&self, z: C64) -> C64 {
        let l = self.log_c(z);
        if l.re == f64::NEG_INFINITY {
            C64::new(0.0, 0.0)
        } else {
            l.exp()
        }
    }
}

fn tail_bound(z_abs: f64, alpha: f64, n: usize) -> f64 {
    let n = n as f64;
    z_abs * z_abs * n.powf(1.0 - 2.0 * alpha) / (2.0 * alpha - 1.0)
}

/// Smallest `N` with tail bound at most `tol` and `|z|/N^alpha <= 1/2`.
pub fn choose_terms(z_abs: f64, alpha: f64, tol: f64) -> usize {
    let by_tail = (z_abs * z_abs / ((2.0 * alpha - 1.0) * tol)).powf(1.0 / (2.0 * alpha - 1.0));
    let by_ratio = (2.0 * z_abs).powf(1.0 / alpha);
    let mut n = by_tail.max(by_ratio).ceil().max(8.0) as usize;
    while n > 8 && tail_bound(z_abs, alpha, n - 1) <= tol && (2.0 * z_abs).powf(1.0 / alpha) <= (n - 1) as f64 {
        n -= 1;
    }
    n
}

pub fn hadamard_a(z: C64, alpha: f64, n_terms: usize) -> Result<C64, EntireError> {
    Ok(HadamardFamily::new(alpha, n_terms)?.a(z))
}

pub fn hadamard_c(z: C64, alpha: f64, n_terms: usize) -> Result<C64, EntireError> {
    Ok(HadamardFamily::new(alpha, n_terms)?.c(z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum H2Verdict {
    ConvergesLikely,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct H2Report {
    pub r: f64,
    /// Integral over `[-R, R]`.
    pub value: f64,
    /// Integral over `[-2R, 2R]`.
    pub value_doubled: f64,
    pub rel_change: f64,
    /// `(R_k, integral over [-R_k, R_k])` for dyadic `R_k <= 2R`.
    pub trend: Vec<(f64, f64)>,
    pub monotone: bool,
    pub quadrature_error: f64,
    pub verdict: H2Verdict,
}

/// `int dt / ((1 + t^2)(A(t)^2 + C(t)^2))` over `[-R, R]` and `[-2R, 2R]`,
/// with the quadrature split at the zeros of `A` and `C`.
pub fn h2_membership_integral(alpha: f64, n_terms: usize, r: f64) -> Result<H2Report, EntireError> {
    if !(r >= 1.0) {
        return Err(EntireError::BadParameter(format!("R = {r}")));
    }
    let fam = HadamardFamily::new(alpha, n_terms)?;
    let integrand = |t: f64| {
        let z = C64::new(t, 0.0);
        let la = fam.log_a(z).re;
        let lc = fam.log_c(z).re;
        let hi = la.max(lc);
        let lo = la.min(lc);
        let log_den = 2.0 * hi + (2.0 * (lo - hi)).exp().ln_1p();
        (-(t * t).ln_1p() - log_den).exp()
    };

    let r2 = 2.0 * r;
    let mut radii = vec![r2];
    while radii.last().unwrap() / 2.0 >= 1.0 {
        let next = radii.last().unwrap() / 2.0;
        radii.push(next);
    }
    radii.reverse();
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(radii.iter().flat_map(|&x| [x, -x]));
    cuts.extend(fam.zeros_a().take_while(|&z| z < r2));
    cuts.extend(fam.zeros_c().take_while(|&z| z < r2));
    cuts.push(r);
    cuts.push(-r);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut cells = Vec::with_capacity(cuts.len());
    let mut err = 0.0;
    for w in cuts.windows(2) {
        let q = quad::integrate(integrand, w[0], w[1], 1e-15, 1e-10);
        err += q.error;
        cells.push((w[0], w[1], q.value));
    }
    let within = |rad: f64| -> f64 {
        cells
            .iter()
            .filter(|c| c.0 >= -rad && c.1 <= rad)
            .map(|c| c.2)
            .sum()
    };
    let trend: Vec<(f64, f64)> = radii.iter().map(|&x| (x, within(x))).collect();
    let monotone = trend.windows(2).all(|w| w[1].1 >= w[0].1);
    let value = within(r);
    let value_doubled = within(r2);
    let rel_change = (value_doubled - value).abs() / value.abs();
    Ok(H2Report {
        r,
        value,
        value_doubled,
        rel_change,
        trend,
        monotone,
        quadrature_error: err,
        verdict: if rel_change < H2_REL_CHANGE {
            H2Verdict::ConvergesLikely
        } else {
            H2Verdict::Undecided
        },
    })
}
