//! Embedded Runge–Kutta 4(5) pair (Dormand–Prince) with step-size control.
//!
//! State vectors are fixed-size `[f64; N]`; complex systems are packed into
//! real/imaginary pairs by the caller. The 5th-order solution is propagated
//! (local extrapolation) while the embedded 4th-order solution only feeds
//! the error estimate, so the accumulated estimate is an upper-side figure.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("non-finite state at x = {x}")]
    NonFinite { x: f64 },
    #[error("step size underflow at x = {x} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },
    #[error("exceeded {0} steps")]
    TooManySteps(usize),
}

/// How the local error estimate is compared against the tolerance.
#[derive(Debug, Clone, Copy)]
pub enum ErrorControl {
    /// Accept a step of size `h` when its local error is at most
    /// `density * h` (or at rounding level); the sum of accepted estimates
    /// is reported either way.
    PerUnitStep { density: f64 },
    /// Classic mixed control: `|err_i| <= atol + rtol * |y_i|`.
    Mixed { atol: f64, rtol: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub control: ErrorControl,
    /// Upper bound on a single step; `f64::INFINITY` disables it.
    pub max_step: f64,
    pub max_steps: usize,
}

/// Running statistics of one `integrate` call.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Sum of the accepted local error estimates (max-norm).
    pub err_sum: f64,
    /// Step size that would have been tried next; reusable as a hint.
    pub last_h: f64,
}

/// Per-step error floor relative to the state, below which local error
/// estimates are rounding noise.
const ROUNDOFF: f64 = 64.0 * f64::EPSILON;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        let hc = h * c;
        for i in 0..N {
            out[i] += hc * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn new(control: ErrorControl) -> Self {
        Self {
            control,
            max_step: f64::INFINITY,
            max_steps: 50_000_000,
        }
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    /// Integrate `y' = f(x, y)` from `x0` to `x1` (`x1 >= x0`), returning the
    /// state at `x1`. `observe` is called after every accepted step with
    /// `(x, &y)`. `h_hint` seeds the first step (pass 0 for automatic).
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        h_hint: f64,
        mut observe: O,
    ) -> Result<([f64; N], StepStats), OdeError>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]),
    {
        let mut stats = StepStats::default();
        let span = x1 - x0;
        if span <= 0.0 {
            stats.last_h = h_hint;
            return Ok((y0, stats));
        }
        let mut x = x0;
        let mut y = y0;
        let mut k1 = f(x, &y);
        let mut h = if h_hint > 0.0 {
            h_hint
        } else {
            self.initial_step(&y, &k1, span)
        };
        h = h.min(self.max_step).min(span);
        let (order_exp, min_h) = match self.control {
            ErrorControl::PerUnitStep { .. } => (0.25, span * 1e-14),
            ErrorControl::Mixed { .. } => (0.2, span * 1e-14),
        };

        loop {
            let remaining = x1 - x;
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }

            let k2 = f(x + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f(x + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                x + C4 * h,
                &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                x + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                x + h,
                &axpy(
                    &y,
                    h,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(x + h, &y_new);

            let mut err_abs = 0.0f64;
            let mut ratio = 0.0f64;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                if !e.is_finite() || !y_new[i].is_finite() {
                    return Err(OdeError::NonFinite { x });
                }
                let e = e.abs();
                err_abs = err_abs.max(e);
                let scale = match self.control {
                    ErrorControl::PerUnitStep { density } => (density * h)
                        .max(ROUNDOFF * y[i].abs().max(y_new[i].abs()).max(1.0)),
                    ErrorControl::Mixed { atol, rtol } => {
                        atol + rtol * y[i].abs().max(y_new[i].abs())
                    }
                };
                ratio = ratio.max(e / scale);
            }

            if ratio <= 1.0 {
                x = if last { x1 } else { x + h };
                y = y_new;
                k1 = k7;
                stats.accepted += 1;
                stats.err_sum += err_abs;
                observe(x, &y);
                let grow = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-order_exp)).clamp(0.2, 5.0)
                };
                let h_next = (h * grow).min(self.max_step);
                if last {
                    stats.last_h = h_next;
                    return Ok((y, stats));
                }
                h = h_next;
            } else {
                stats.rejected += 1;
                h *= (0.9 * ratio.powf(-order_exp)).clamp(0.1, 0.9);
                if h < min_h {
                    return Err(OdeError::StepUnderflow { x, h });
                }
            }
            if stats.accepted + stats.rejected > self.max_steps {
                return Err(OdeError::TooManySteps(self.max_steps));
            }
        }
    }

    fn initial_step<const N: usize>(&self, y: &[f64; N], dy: &[f64; N], span: f64) -> f64 {
        let dnorm = dy.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = match self.control {
            ErrorControl::PerUnitStep { density } => density,
            ErrorControl::Mixed { atol, rtol } => {
                atol + rtol * y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        };
        if dnorm == 0.0 {
            return span;
        }
        (tol.powf(0.2) / dnorm).clamp(span * 1e-8, span)
    }
}
