//! Trace-normed coefficient functions `H(x) >= 0`, `tr H = 1`, described as a
//! finite list of segments on `[0, X_max]` plus an optional singular tail.

mod phi;

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use thiserror::Error;

pub use phi::{PhiError, PhiPiece, PhiProfile};

/// Tolerance applied to trace and positivity checks at construction.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Default threshold below which `det H` counts as zero.
pub const RANK_ONE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("invalid Hamiltonian: {0}")]
    Invalid(ValidationReport),
    #[error("matrix entries violate trace/positivity: {0}")]
    BadMatrix(IssueKind),
    #[error("truncation point {l} outside (0, {x_max}]")]
    TruncationOutOfRange { l: f64, x_max: f64 },
    #[error("segment {segment} is not rank one (det H = {det:e})")]
    NotRankOne { segment: usize, det: f64 },
}

/// Symmetric 2x2 matrix `[[h11, h12], [h12, h22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixH {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl MatrixH {
    /// Checked constructor: `h11, h22 >= 0`, `h11 + h22 = 1`, `h12^2 <= h11 h22`.
    pub fn new(h11: f64, h12: f64, h22: f64) -> Result<Self, HamiltonianError> {
        let m = Self { h11, h12, h22 };
        match m.issue(CONSTRUCTION_TOL) {
            Some(kind) => Err(HamiltonianError::BadMatrix(kind)),
            None => Ok(m),
        }
    }

    /// The projection `P_alpha = e_alpha e_alpha^T`.
    pub fn projection(alpha: f64) -> Self {
        let (s, c) = alpha.sin_cos();
        Self {
            h11: c * c,
            h12: s * c,
            h22: s * s,
        }
    }

    pub fn diagonal(h: f64) -> Self {
        Self {
            h11: h,
            h12: 0.0,
            h22: 1.0 - h,
        }
    }

    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    pub fn trace(&self) -> f64 {
        self.h11 + self.h22
    }

    /// `e_theta^T H e_theta`.
    #[inline]
    pub fn quadratic(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.h11 * c * c + 2.0 * self.h12 * s * c + self.h22 * s * s
    }

    /// `R_gamma H R_{-gamma}`.
    pub fn rotated(&self, gamma: f64) -> Self {
        let (s, c) = gamma.sin_cos();
        // R H R^T with R = [[c, -s], [s, c]]
        let a11 = c * self.h11 - s * self.h12;
        let a12 = c * self.h12 - s * self.h22;
        let a21 = s * self.h11 + c * self.h12;
        let a22 = s * self.h12 + c * self.h22;
        Self {
            h11: a11 * c - a12 * s,
            h12: a11 * s + a12 * c,
            h22: a21 * s + a22 * c,
        }
    }

    /// Angle `alpha` of the dominant eigenvector; for rank-one matrices this
    /// is the `alpha` with `H = P_alpha`.
    pub fn rank_one_angle(&self) -> f64 {
        0.5 * (2.0 * self.h12).atan2(self.h11 - self.h22)
    }

    fn issue(&self, tol: f64) -> Option<IssueKind> {
        let Self { h11, h12, h22 } = *self;
        if !(h11.is_finite() && h12.is_finite() && h22.is_finite()) {
            return Some(IssueKind::NonFinite);
        }
        if h11 < -tol || h22 < -tol {
            return Some(IssueKind::NegativeDiagonal { h11, h22 });
        }
        if ((h11 + h22) - 1.0).abs() > tol {
            return Some(IssueKind::TraceNotOne { trace: h11 + h22 });
        }
        if h12 * h12 > h11 * h22 + tol {
            return Some(IssueKind::NotPositive {
                h12_sq: h12 * h12,
                h11_h22: h11 * h22,
            });
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SegmentKind {
    ConstantMatrix(MatrixH),
    /// `H = P_alpha` throughout the segment.
    ConstantAngle(f64),
    /// `H = P_phi(x)` with `phi` linear from `start` to `end <= start`.
    PhiRamp { start: f64, end: f64 },
    /// `H = P_phi(x)`, `phi` piecewise linear through `(offset, phi)` samples
    /// with offsets running from 0 to the segment length.
    PhiTable(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub length: f64,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn angle(length: f64, alpha: f64) -> Self {
        Self {
            length,
            kind: SegmentKind::ConstantAngle(alpha),
        }
    }

    pub fn matrix(length: f64, m: MatrixH) -> Self {
        Self {
            length,
            kind: SegmentKind::ConstantMatrix(m),
        }
    }

    pub fn ramp(length: f64, start: f64, end: f64) -> Self {
        Self {
            length,
            kind: SegmentKind::PhiRamp { start, end },
        }
    }

    pub fn table(samples: Vec<(f64, f64)>) -> Self {
        let length = samples.last().map(|s| s.0).unwrap_or(0.0);
        Self {
            length,
            kind: SegmentKind::PhiTable(samples),
        }
    }

    /// `phi(offset)` for the angle-described kinds; `None` for a general matrix.
    pub fn phi_at(&self, offset: f64) -> Option<f64> {
        match &self.kind {
            SegmentKind::ConstantMatrix(_) => None,
            SegmentKind::ConstantAngle(a) => Some(*a),
            SegmentKind::PhiRamp { start, end } => {
                let s = (offset / self.length).clamp(0.0, 1.0);
                Some(start + (end - start) * s)
            }
            SegmentKind::PhiTable(samples) => Some(table_eval(samples, offset)),
        }
    }

    pub fn matrix_at(&self, offset: f64) -> MatrixH {
        match &self.kind {
            SegmentKind::ConstantMatrix(m) => *m,
            _ => MatrixH::projection(self.phi_at(offset).unwrap()),
        }
    }

    /// Offsets (including 0 and `length`) between which `H` is smooth.
    pub fn knots(&self) -> Vec<f64> {
        match &self.kind {
            SegmentKind::PhiTable(samples) => {
                let mut k: Vec<f64> = samples.iter().map(|s| s.0).collect();
                if let Some(last) = k.last_mut() {
                    *last = self.length;
                }
                k
            }
            _ => vec![0.0, self.length],
        }
    }

    /// Linear pieces `(off0, off1, phi0, phi1)` of an angle-described
    /// segment, or `None` for a general matrix.
    pub(crate) fn phi_pieces(&self) -> Option<Vec<(f64, f64, f64, f64)>> {
        match &self.kind {
            SegmentKind::ConstantMatrix(_) => None,
            SegmentKind::ConstantAngle(a) => Some(vec![(0.0, self.length, *a, *a)]),
            SegmentKind::PhiRamp { start, end } => {
                Some(vec![(0.0, self.length, *start, *end)])
            }
            SegmentKind::PhiTable(samples) => Some(
                samples
                    .windows(2)
                    .map(|w| (w[0].0, w[1].0, w[0].1, w[1].1))
                    .collect(),
            ),
        }
    }

    fn shifted_by(&self, gamma: f64) -> Self {
        let kind = match &self.kind {
            SegmentKind::ConstantMatrix(m) => SegmentKind::ConstantMatrix(m.rotated(gamma)),
            SegmentKind::ConstantAngle(a) => SegmentKind::ConstantAngle(a + gamma),
            SegmentKind::PhiRamp { start, end } => SegmentKind::PhiRamp {
                start: start + gamma,
                end: end + gamma,
            },
            SegmentKind::PhiTable(s) => {
                SegmentKind::PhiTable(s.iter().map(|&(o, p)| (o, p + gamma)).collect())
            }
        };
        Self {
            length: self.length,
            kind,
        }
    }

    /// The part of the segment on `[a, b]` (offsets), re-based to start at 0.
    fn slice(&self, a: f64, b: f64) -> Self {
        let length = b - a;
        let kind = match &self.kind {
            SegmentKind::ConstantMatrix(_) | SegmentKind::ConstantAngle(_) => self.kind.clone(),
            SegmentKind::PhiRamp { .. } => SegmentKind::PhiRamp {
                start: self.phi_at(a).unwrap(),
                end: self.phi_at(b).unwrap(),
            },
            SegmentKind::PhiTable(samples) => {
                let mut out = vec![(0.0, table_eval(samples, a))];
                out.extend(
                    samples
                        .iter()
                        .filter(|s| s.0 > a && s.0 < b)
                        .map(|&(o, p)| (o - a, p)),
                );
                out.push((length, table_eval(samples, b)));
                SegmentKind::PhiTable(out)
            }
        };
        Self { length, kind }
    }

    fn reversed(&self) -> Self {
        let kind = match &self.kind {
            SegmentKind::PhiRamp { start, end } => SegmentKind::PhiRamp {
                start: *end,
                end: *start,
            },
            SegmentKind::PhiTable(samples) => SegmentKind::PhiTable(
                samples
                    .iter()
                    .rev()
                    .map(|&(o, p)| (self.length - o, p))
                    .collect(),
            ),
            k => k.clone(),
        };
        Self {
            length: self.length,
            kind,
        }
    }
}

fn table_eval(samples: &[(f64, f64)], offset: f64) -> f64 {
    let i = samples.partition_point(|s| s.0 <= offset);
    if i == 0 {
        return samples[0].1;
    }
    if i >= samples.len() {
        return samples[samples.len() - 1].1;
    }
    let (x0, p0) = samples[i - 1];
    let (x1, p1) = samples[i];
    p0 + (p1 - p0) * (offset - x0) / (x1 - x0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    None,
    /// `H = P_gamma` on `(X_max, infinity)`.
    SingularHalfLine(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum IssueKind {
    NonPositiveLength(f64),
    NonFinite,
    NegativeDiagonal { h11: f64, h22: f64 },
    TraceNotOne { trace: f64 },
    NotPositive { h12_sq: f64, h11_h22: f64 },
    RampIncreasing { start: f64, end: f64 },
    TableTooShort,
    TableOffsets,
    TableIncreasing { offset: f64 },
    NoSegments,
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IssueKind::NonPositiveLength(l) => write!(f, "length {l} is not positive"),
            IssueKind::NonFinite => write!(f, "non-finite value"),
            IssueKind::NegativeDiagonal { h11, h22 } => {
                write!(f, "negative diagonal entry (h11 = {h11}, h22 = {h22})")
            }
            IssueKind::TraceNotOne { trace } => write!(f, "trace {trace} != 1"),
            IssueKind::NotPositive { h12_sq, h11_h22 } => {
                write!(f, "not positive semidefinite: h12^2 = {h12_sq} > h11 h22 = {h11_h22}")
            }
            IssueKind::RampIncreasing { start, end } => {
                write!(f, "ramp increases from {start} to {end}")
            }
            IssueKind::TableTooShort => write!(f, "table needs at least two samples"),
            IssueKind::TableOffsets => {
                write!(f, "table offsets must increase strictly from 0 to the segment length")
            }
            IssueKind::TableIncreasing { offset } => {
                write!(f, "table angle increases at offset {offset}")
            }
            IssueKind::NoSegments => write!(f, "no segments"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Issue {
    /// Offending segment, `None` for whole-system or tail issues.
    pub segment: Option<usize>,
    pub kind: IssueKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "valid");
        }
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            match issue.segment {
                Some(s) => write!(f, "segment {s}: {}", issue.kind)?,
                None => write!(f, "{}", issue.kind)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    segments: Vec<Segment>,
    tail: Tail,
}

/// Equal modulo pi, i.e. the same projection.
pub(crate) fn same_projection(a: f64, b: f64) -> bool {
    (a - b).sin().abs() < CONSTRUCTION_TOL
}

impl Hamiltonian {
    /// Validates the segments and merges adjacent singular intervals of
    /// equal type.
    pub fn new(segments: Vec<Segment>, tail: Tail) -> Result<Self, HamiltonianError> {
        let h = Self::from_segments_unchecked(segments, tail);
        let report = h.validate();
        if !report.is_valid() {
            return Err(HamiltonianError::Invalid(report));
        }
        Ok(h.merged())
    }

    /// Builds without any checks; `validate` reports what is wrong.
    pub fn from_segments_unchecked(segments: Vec<Segment>, tail: Tail) -> Self {
        Self { segments, tail }
    }

    fn merged(self) -> Self {
        let mut out: Vec<Segment> = Vec::with_capacity(self.segments.len());
        for seg in self.segments {
            if let (Some(prev), SegmentKind::ConstantAngle(b)) = (out.last_mut(), &seg.kind) {
                if let SegmentKind::ConstantAngle(a) = prev.kind {
                    if same_projection(a, *b) {
                        prev.length += seg.length;
                        continue;
                    }
                }
            }
            out.push(seg);
        }
        Self {
            segments: out,
            tail: self.tail,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// `X_max`, the total length of the segment list.
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    /// Start offsets of every segment.
    pub fn segment_starts(&self) -> Vec<f64> {
        let mut x = 0.0;
        self.segments
            .iter()
            .map(|s| {
                let start = x;
                x += s.length;
                start
            })
            .collect()
    }

    /// Segment index and offset for `x` (right-continuous; `x = X_max` maps
    /// to the end of the last segment).
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let mut start = 0.0;
        for (i, s) in self.segments.iter().enumerate() {
            if x < start + s.length || i + 1 == self.segments.len() {
                return (i, (x - start).clamp(0.0, s.length));
            }
            start += s.length;
        }
        (0, 0.0)
    }

    pub fn matrix_at(&self, x: f64) -> MatrixH {
        if x > self.length() {
            if let Tail::SingularHalfLine(g) = self.tail {
                return MatrixH::projection(g);
            }
        }
        let (i, off) = self.locate(x);
        self.segments[i].matrix_at(off)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if self.segments.is_empty() {
            issues.push(Issue {
                segment: None,
                kind: IssueKind::NoSegments,
            });
        }
        for (i, seg) in self.segments.iter().enumerate() {
            let mut push = |kind| {
                issues.push(Issue {
                    segment: Some(i),
                    kind,
                })
            };
            if !seg.length.is_finite() {
                push(IssueKind::NonFinite);
                continue;
            }
            if seg.length <= 0.0 {
                push(IssueKind::NonPositiveLength(seg.length));
            }
            match &seg.kind {
                SegmentKind::ConstantMatrix(m) => {
                    if let Some(kind) = m.issue(CONSTRUCTION_TOL) {
                        push(kind);
                    }
                }
                SegmentKind::ConstantAngle(a) => {
                    if !a.is_finite() {
                        push(IssueKind::NonFinite);
                    }
                }
                SegmentKind::PhiRamp { start, end } => {
                    if !(start.is_finite() && end.is_finite()) {
                        push(IssueKind::NonFinite);
                    } else if end > start {
                        push(IssueKind::RampIncreasing {
                            start: *start,
                            end: *end,
                        });
                    }
                }
                SegmentKind::PhiTable(samples) => {
                    if samples.len() < 2 {
                        push(IssueKind::TableTooShort);
                        continue;
                    }
                    if samples.iter().any(|s| !(s.0.is_finite() && s.1.is_finite())) {
                        push(IssueKind::NonFinite);
                        continue;
                    }
                    let span_tol = CONSTRUCTION_TOL * seg.length.max(1.0);
                    let offsets_ok = samples[0].0 == 0.0
                        && (samples[samples.len() - 1].0 - seg.length).abs() <= span_tol
                        && samples.windows(2).all(|w| w[1].0 > w[0].0);
                    if !offsets_ok {
                        push(IssueKind::TableOffsets);
                    }
                    if let Some(w) = samples
                        .windows(2)
                        .find(|w| w[1].1 > w[0].1 + CONSTRUCTION_TOL)
                    {
                        push(IssueKind::TableIncreasing { offset: w[1].0 });
                    }
                }
            }
        }
        if let Tail::SingularHalfLine(g) = self.tail {
            if !g.is_finite() {
                issues.push(Issue {
                    segment: None,
                    kind: IssueKind::NonFinite,
                });
            }
        }
        ValidationReport { issues }
    }

    /// Writes `H = P_phi` with `phi` nonincreasing and right-continuous.
    ///
    /// Across segment boundaries the branch is chosen so that each jump lies
    /// in `[0, pi)`; the result is normalized to `phi(0+) in (-pi/2, pi/2]`.
    /// The declared `phi(infinity)` is the tail angle (on the same branch
    /// rule) or, without a tail, the last value.
    pub fn extract_phi(&self, tol: f64) -> Result<PhiProfile, HamiltonianError> {
        let mut pieces: Vec<PhiPiece> = Vec::new();
        let mut x = 0.0;
        let mut prev_end: Option<f64> = None;
        for (i, seg) in self.segments.iter().enumerate() {
            let local = match seg.phi_pieces() {
                Some(p) => p,
                None => {
                    let SegmentKind::ConstantMatrix(m) = &seg.kind else {
                        unreachable!()
                    };
                    let det = m.det();
                    if det > tol {
                        return Err(HamiltonianError::NotRankOne { segment: i, det });
                    }
                    let a = m.rank_one_angle();
                    vec![(0.0, seg.length, a, a)]
                }
            };
            let shift = match prev_end {
                Some(pe) => branch_shift(pe, local[0].2),
                None => 0.0,
            };
            for (o0, o1, p0, p1) in local {
                pieces.push(PhiPiece {
                    x0: x + o0,
                    x1: x + o1,
                    phi0: p0 + shift,
                    phi1: p1 + shift,
                });
            }
            if let Some(last) = pieces.last_mut() {
                // guard against offset rounding so pieces stay contiguous
                last.x1 = x + seg.length;
            }
            x += seg.length;
            prev_end = pieces.last().map(|p| p.phi1);
        }
        let end = prev_end.unwrap_or(0.0);
        let phi_inf = match self.tail {
            Tail::SingularHalfLine(g) => g + branch_shift(end, g),
            Tail::None => end,
        };
        Ok(PhiProfile::from_pieces_raw(pieces, phi_inf.min(end)).normalized())
    }

    /// Conjugation by the rotation `R_gamma`; angles shift by `gamma`.
    pub fn rotate(&self, gamma: f64) -> Hamiltonian {
        Hamiltonian {
            segments: self.segments.iter().map(|s| s.shifted_by(gamma)).collect(),
            tail: match self.tail {
                Tail::SingularHalfLine(g) => Tail::SingularHalfLine(g + gamma),
                Tail::None => Tail::None,
            },
        }
    }

    /// `H` on `(0, l)` followed by the singular half line `P_gamma`.
    pub fn truncate_with_tail(&self, l: f64, gamma: f64) -> Result<Hamiltonian, HamiltonianError> {
        let mut h = self.restrict(l)?;
        h.tail = Tail::SingularHalfLine(gamma);
        Ok(h)
    }

    /// The body on `[0, l]`, without a tail.
    pub fn restrict(&self, l: f64) -> Result<Hamiltonian, HamiltonianError> {
        let x_max = self.length();
        if !(l > 0.0 && l <= x_max * (1.0 + 1e-15)) {
            return Err(HamiltonianError::TruncationOutOfRange { l, x_max });
        }
        let mut segments = Vec::new();
        let mut start = 0.0;
        for s in &self.segments {
            let end = start + s.length;
            if end <= l || (l - end).abs() <= 1e-14 * x_max {
                segments.push(s.clone());
            } else {
                if l > start {
                    segments.push(s.slice(0.0, l - start));
                }
                break;
            }
            start = end;
        }
        Ok(Hamiltonian {
            segments,
            tail: Tail::None,
        })
    }

    /// The body traversed from `X_max` back to 0 (tail dropped).
    pub fn reversed(&self) -> Hamiltonian {
        Hamiltonian {
            segments: self.segments.iter().rev().map(Segment::reversed).collect(),
            tail: Tail::None,
        }
    }

    /// The body on `[0, l]` flattened into pieces on which `H` is either
    /// constant or `P_phi` with `phi` linear.
    pub(crate) fn pieces_upto(&self, l: f64) -> Vec<Piece> {
        let mut out = Vec::new();
        let mut start = 0.0;
        for seg in &self.segments {
            if start >= l {
                break;
            }
            let local = match seg.phi_pieces() {
                Some(p) => p
                    .into_iter()
                    .map(|(o0, o1, p0, p1)| (o0, o1, Some((p0, p1))))
                    .collect(),
                None => vec![(0.0, seg.length, None)],
            };
            let n = local.len();
            for (j, (o0, o1, phis)) in local.into_iter().enumerate() {
                let x0 = start + o0;
                let mut x1 = if j + 1 == n { start + seg.length } else { start + o1 };
                if x0 >= l {
                    break;
                }
                let mut kind = match (phis, &seg.kind) {
                    (Some((p0, p1)), _) if p0 == p1 => PieceKind::Singular(p0),
                    (Some((p0, p1)), _) => PieceKind::Ramp { phi0: p0, phi1: p1 },
                    (None, SegmentKind::ConstantMatrix(m)) => PieceKind::Matrix(*m),
                    (None, _) => unreachable!(),
                };
                if x1 > l {
                    if let PieceKind::Ramp { phi0, phi1 } = kind {
                        let s = (l - x0) / (x1 - x0);
                        kind = PieceKind::Ramp {
                            phi0,
                            phi1: phi0 + (phi1 - phi0) * s,
                        };
                    }
                    x1 = l;
                }
                if x1 > x0 {
                    out.push(Piece { x0, x1, kind });
                }
            }
            start += seg.length;
        }
        out
    }

    /// True when every segment has constant `H` (closed-form transfer
    /// matrices exist).
    pub fn is_piecewise_constant(&self) -> bool {
        self.segments.iter().all(|s| match &s.kind {
            SegmentKind::ConstantAngle(_) | SegmentKind::ConstantMatrix(_) => true,
            SegmentKind::PhiRamp { start, end } => start == end,
            SegmentKind::PhiTable(_) => false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PieceKind {
    Singular(f64),
    Ramp { phi0: f64, phi1: f64 },
    Matrix(MatrixH),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub x0: f64,
    pub x1: f64,
    pub kind: PieceKind,
}

impl Piece {
    pub fn length(&self) -> f64 {
        self.x1 - self.x0
    }

    /// `phi` at `x` for ramp pieces.
    #[inline]
    pub fn ramp_phi(&self, x: f64) -> f64 {
        match self.kind {
            PieceKind::Ramp { phi0, phi1 } => {
                phi0 + (phi1 - phi0) * ((x - self.x0) / (self.x1 - self.x0))
            }
            PieceKind::Singular(a) => a,
            PieceKind::Matrix(m) => m.rank_one_angle(),
        }
    }

    #[inline]
    pub fn matrix_at(&self, x: f64) -> MatrixH {
        match self.kind {
            PieceKind::Matrix(m) => m,
            _ => MatrixH::projection(self.ramp_phi(x)),
        }
    }
}

/// Multiple of pi to add to `next` so that `prev - next` lies in `[0, pi)`,
/// with near-pi drops resolved toward the smaller drop.
pub(crate) fn branch_shift(prev: f64, next: f64) -> f64 {
    let d = prev - next;
    let mut n = (d / PI).floor();
    if PI - (d - n * PI) < CONSTRUCTION_TOL {
        n += 1.0;
    }
    n * PI
}

/// Shift bringing `phi` into `(-pi/2, pi/2]`.
pub(crate) fn canonical_shift(phi: f64) -> f64 {
    let mut n = ((FRAC_PI_2 - phi) / PI).floor();
    // phi + n*pi in (-pi/2, pi/2]; guard the boundary against rounding
    if phi + n * PI <= -FRAC_PI_2 + 1e-15 {
        n += 1.0;
    }
    n * PI
}
