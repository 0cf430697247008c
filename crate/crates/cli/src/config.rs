//! System and potential files.

use std::fmt;
use std::path::Path;

use canosc::hamiltonian::RANK_ONE_TOL;
use canosc::transforms::Potential;
use canosc::{Hamiltonian, MatrixH, PhiProfile, Segment, Tail};
use serde::Deserialize;
use toml::Spanned;

/// Input that fails to parse or validate; reported with exit code 2.
#[derive(Debug)]
pub struct Invalid(pub String);

impl fmt::Display for Invalid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    segments: Vec<Spanned<RawSegment>>,
    tail: Option<Spanned<RawTail>>,
    phi_infinity: Option<f64>,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    normalization: Normalization,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawSegment {
    Angle { length: f64, alpha: f64 },
    Matrix { length: f64, h11: f64, h12: f64, h22: f64 },
    Ramp { length: f64, start: f64, end: f64 },
    Table { length: Option<f64>, samples: Vec<[f64; 2]> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum RawTail {
    Singular { gamma: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub integration: f64,
    pub rank_one: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integration: 1e-9,
            rank_one: RANK_ONE_TOL,
        }
    }
}

/// Normalization applied while loading.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Normalization {
    /// Divide matrix segments by their trace and stretch their length by it.
    pub rescale_trace: bool,
}

#[derive(Debug, Clone)]
pub struct SystemConfig {
    pub hamiltonian: Hamiltonian,
    pub phi_infinity: Option<f64>,
    pub tolerances: Tolerances,
    pub normalization: Normalization,
}

impl SystemConfig {
    /// `phi` of the system with the declared `phi(infinity)` if one is set.
    pub fn phi(&self) -> anyhow::Result<PhiProfile> {
        let phi = self.hamiltonian.extract_phi(self.tolerances.rank_one)?;
        Ok(match self.phi_infinity {
            Some(v) => phi.with_phi_infinity(v)?,
            None => phi,
        })
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

pub fn load_system(path: &Path, degrees: bool) -> anyhow::Result<SystemConfig> {
    parse_system(&read(path)?, degrees).map_err(|e| match e.downcast::<Invalid>() {
        Ok(Invalid(m)) => invalid(format!("{}: {m}", path.display())),
        Err(e) => e,
    })
}

pub fn parse_system(text: &str, degrees: bool) -> anyhow::Result<SystemConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        invalid(format!("line {line}: {}", e.message()))
    })?;
    let angle = |a: f64| if degrees { a.to_radians() } else { a };
    let mut segments = Vec::with_capacity(raw.segments.len());
    let mut lines = Vec::with_capacity(raw.segments.len());
    for s in &raw.segments {
        let line = line_of(text, s.span().start);
        let seg = match s.get_ref() {
            RawSegment::Angle { length, alpha } => Segment::angle(*length, angle(*alpha)),
            RawSegment::Matrix { length, h11, h12, h22 } => {
                let tr = h11 + h22;
                let (len, scale) = if raw.normalization.rescale_trace && tr > 0.0 && tr.is_finite() {
                    (length * tr, tr)
                } else {
                    (*length, 1.0)
                };
                Segment::matrix(len, MatrixH { h11: h11 / scale, h12: h12 / scale, h22: h22 / scale })
            }
            RawSegment::Ramp { length, start, end } => Segment::ramp(*length, angle(*start), angle(*end)),
            RawSegment::Table { length, samples } => {
                let seg = Segment::table(samples.iter().map(|p| (p[0], angle(p[1]))).collect());
                if let Some(l) = length {
                    if *l != seg.length {
                        return Err(invalid(format!(
                            "line {line}: table length {l} differs from its last offset {}",
                            seg.length
                        )));
                    }
                }
                seg
            }
        };
        segments.push(seg);
        lines.push(line);
    }
    let tail = match &raw.tail {
        Some(t) => match t.get_ref() {
            RawTail::Singular { gamma } => Tail::SingularHalfLine(angle(*gamma)),
        },
        None => Tail::None,
    };
    let tail_line = raw.tail.as_ref().map(|t| line_of(text, t.span().start));
    let h = Hamiltonian::from_segments_unchecked(segments, tail);
    let report = h.validate();
    if let Some(issue) = report.issues.first() {
        let (line, what) = match issue.segment {
            Some(i) => (lines[i], format!("segment {i}: {}", issue.kind)),
            None => (tail_line.unwrap_or(1), issue.kind.to_string()),
        };
        return Err(invalid(format!("line {line}: {what}")));
    }
    let tol = raw.tolerances;
    if !(tol.integration > 0.0 && tol.rank_one > 0.0) {
        return Err(invalid("tolerances must be positive"));
    }
    if raw.phi_infinity.is_some_and(|v| !v.is_finite()) {
        return Err(invalid("phi_infinity must be finite"));
    }
    Ok(SystemConfig {
        hamiltonian: h,
        phi_infinity: raw.phi_infinity.map(angle),
        tolerances: tol,
        normalization: raw.normalization,
    })
}

/// Two whitespace- or comma-separated columns `x V(x)`; `#` starts a comment.
pub fn parse_potential(text: &str) -> anyhow::Result<Potential> {
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parsed: Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(p) if p.len() == 2 => {
                x.push(p[0]);
                v.push(p[1]);
            }
            _ => return Err(invalid(format!("line {}: expected two numbers, got {line:?}", i + 1))),
        }
    }
    Potential::new(x, v).map_err(|e| invalid(e.to_string()))
}

pub fn load_potential(path: &Path) -> anyhow::Result<Potential> {
    parse_potential(&read(path)?).map_err(|e| match e.downcast::<Invalid>() {
        Ok(Invalid(m)) => invalid(format!("{}: {m}", path.display())),
        Err(e) => e,
    })
}
