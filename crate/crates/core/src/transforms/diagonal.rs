use std::f64::consts::{FRAC_PI_2, PI};

use crate::hamiltonian::{Hamiltonian, MatrixH, PhiProfile, Segment, Tail};
use crate::spectra::cos2_integral;

use super::TransformError;

/// One piece of `H1(T) = diag(h, 1 - h)` with constant `h` over `delta_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagSegment {
    pub delta_t: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSystem {
    pub segments: Vec<DiagSegment>,
    /// Left end of the `t = -tan(phi)` range.
    pub t0: f64,
    /// Rotation applied to `phi` before the transformation.
    pub rotation: f64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalOptions {
    /// Standing margin: `phi <= pi/2 - delta`.
    pub delta: f64,
    /// Cells per linear ramp piece; `h` is constant per cell.
    pub cells_per_ramp: usize,
}

impl Default for DiagonalOptions {
    fn default() -> Self {
        Self {
            delta: 1e-6,
            cells_per_ramp: 64,
        }
    }
}

impl DiagonalSystem {
    pub fn from_segments(segments: Vec<DiagSegment>) -> Self {
        Self {
            segments,
            t0: 0.0,
            rotation: 0.0,
            notes: Vec::new(),
        }
    }

    /// Total length `T` of the diagonal system.
    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.delta_t).sum()
    }

    /// Total `w`-mass, `sum h dT`.
    pub fn w_mass(&self) -> f64 {
        self.segments.iter().map(|s| s.h * s.delta_t).sum()
    }

    /// Length of the `t` range, `sum (1 - h) dT`.
    pub fn t_range(&self) -> f64 {
        self.segments.iter().map(|s| (1.0 - s.h) * s.delta_t).sum()
    }

    /// `t` at every segment boundary.
    pub fn t_values(&self) -> Vec<f64> {
        let mut t = self.t0;
        let mut out = vec![t];
        for s in &self.segments {
            t += (1.0 - s.h) * s.delta_t;
            out.push(t);
        }
        out
    }

    /// de Branges type `sum dT sqrt(h (1 - h))`.
    pub fn debranges_type(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.delta_t * (s.h * (1.0 - s.h)).max(0.0).sqrt())
            .sum()
    }

    pub fn concat(&self, other: &DiagonalSystem) -> DiagonalSystem {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        let mut notes = self.notes.clone();
        notes.extend(other.notes.iter().cloned());
        DiagonalSystem {
            segments,
            t0: self.t0,
            rotation: self.rotation,
            notes,
        }
    }

    /// As a canonical system with constant-matrix segments.
    pub fn to_hamiltonian(&self) -> Hamiltonian {
        Hamiltonian::from_segments_unchecked(
            self.segments
                .iter()
                .map(|s| Segment::matrix(s.delta_t, MatrixH::diagonal(s.h)))
                .collect(),
            Tail::None,
        )
    }
}

/// `de Branges type` of a diagonal system.
pub fn debranges_type(d: &DiagonalSystem) -> f64 {
    d.debranges_type()
}

/// Change of variable `t = -tan(phi(x))` with the image measure
/// `(1 + t^2) dw = dx`, giving `dT = dw + dt` and `h = dw/dT`.
///
/// Plateaus become `h = 1` point masses of length `l cos^2(alpha)`; jump
/// gaps in the `t` range become `h = 0` stretches; ramps are cut into
/// cells with exact `w` and `t` increments. A profile outside
/// `(-pi/2, pi/2 - delta]` whose drop is below `pi - delta` is rotated
/// first.
pub fn canonical_to_diagonal(phi: &PhiProfile, opts: &DiagonalOptions) -> Result<DiagonalSystem, TransformError> {
    if let Some((a, b)) = phi.first_increase() {
        return Err(TransformError::NotMonotone { a, b });
    }
    let top = phi.start();
    let bottom = phi.end_value();
    let drop = top - bottom;
    let upper = FRAC_PI_2 - opts.delta;
    let mut notes = Vec::new();
    let rotation = if top <= upper && bottom > -FRAC_PI_2 {
        0.0
    } else if drop < PI - opts.delta {
        let gamma = -0.5 * (top + bottom) - 0.5 * opts.delta;
        notes.push(format!("rotated by {gamma} to fit (-pi/2, pi/2 - delta]"));
        gamma
    } else {
        return Err(TransformError::SplitRequired { drop });
    };
    let phi = if rotation != 0.0 { phi.rotated(rotation) } else { phi.clone() };
    if drop == 0.0 {
        notes.push("constant angle: the system is a single point mass".into());
    }

    let mut segments = Vec::new();
    let mut prev_end: Option<f64> = None;
    let cells = opts.cells_per_ramp.max(1);
    for p in phi.pieces() {
        if let Some(pe) = prev_end {
            if p.phi0 < pe {
                let gap = pe.tan() - p.phi0.tan();
                if gap > 0.0 {
                    segments.push(DiagSegment { delta_t: gap, h: 0.0 });
                }
            }
        }
        if p.is_plateau() {
            let mass = p.length() * p.phi0.cos().powi(2);
            if mass > 0.0 {
                segments.push(DiagSegment { delta_t: mass, h: 1.0 });
            }
        } else {
            let dl = p.length() / cells as f64;
            let dphi = (p.phi1 - p.phi0) / cells as f64;
            for k in 0..cells {
                let a = p.phi0 + dphi * k as f64;
                let b = if k + 1 == cells { p.phi1 } else { a + dphi };
                let w = cos2_integral(a, b, dl);
                let dt = a.tan() - b.tan();
                let total = w + dt;
                if total > 0.0 {
                    segments.push(DiagSegment {
                        delta_t: total,
                        h: w / total,
                    });
                }
            }
        }
        prev_end = Some(p.phi1);
    }
    Ok(DiagonalSystem {
        segments,
        t0: -phi.start().tan(),
        rotation,
        notes,
    })
}
