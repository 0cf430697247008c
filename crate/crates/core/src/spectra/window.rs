use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("window needs finite s < t, got ({s}, {t})")]
pub struct WindowError {
    pub s: f64,
    pub t: f64,
}

/// Spectral window between `s < t` with per-endpoint closure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindow {
    pub s: f64,
    pub t: f64,
    pub include_s: bool,
    pub include_t: bool,
}

impl SpectralWindow {
    pub fn new(s: f64, t: f64, include_s: bool, include_t: bool) -> Result<Self, WindowError> {
        if !(s.is_finite() && t.is_finite() && s < t) {
            return Err(WindowError { s, t });
        }
        Ok(Self {
            s,
            t,
            include_s,
            include_t,
        })
    }

    /// `[s, t)`.
    pub fn half_open(s: f64, t: f64) -> Result<Self, WindowError> {
        Self::new(s, t, true, false)
    }

    /// `(s, t)`.
    pub fn open(s: f64, t: f64) -> Result<Self, WindowError> {
        Self::new(s, t, false, false)
    }

    pub fn contains(&self, x: f64) -> bool {
        let lower = if self.include_s { x >= self.s } else { x > self.s };
        let upper = if self.include_t { x <= self.t } else { x < self.t };
        lower && upper
    }

    /// Number of integers `n` with `y(lambda) = n` for `lambda` in the window,
    /// given the values `y_s = y(s)`, `y_t = y(t)` of a strictly increasing `y`.
    pub fn integers_crossed(&self, y_s: f64, y_t: f64) -> i64 {
        let hi = if self.include_t { y_t.floor() } else { y_t.ceil() - 1.0 };
        let lo = if self.include_s { y_s.ceil() } else { y_s.floor() + 1.0 };
        ((hi - lo + 1.0) as i64).max(0)
    }
}
