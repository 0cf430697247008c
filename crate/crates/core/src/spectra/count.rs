use std::f64::consts::PI;

use crate::exec::Execution;
use crate::hamiltonian::{Hamiltonian, PieceKind, Tail};
use crate::pruefer::{final_theta, theta_at};

use super::{SpectraError, SpectralWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(u64),
    Divergent,
}

impl Count {
    pub fn finite(&self) -> Option<u64> {
        match self {
            Count::Finite(n) => Some(*n),
            Count::Divergent => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub count: Count,
    pub l_used: f64,
    /// Every angle entering the count is farther from a counting level
    /// than its error bound.
    pub certified: bool,
    pub theta_s: f64,
    pub theta_t: f64,
    pub err_bound: f64,
    /// `(L, F(L))` along a half-line schedule; empty for bounded counts.
    pub trace: Vec<(f64, f64)>,
}

/// Floating-point slack added to every error bound.
const ROUNDING: f64 = 1e-13;

/// `theta` exact (no computation happened) or at least `err` away from
/// every level `beta + n pi`.
fn clear_of_levels(theta: f64, beta: f64, err: f64, exact: bool) -> bool {
    if exact {
        return true;
    }
    let y = (theta - beta) / PI;
    let dist = (y - y.round()).abs() * PI;
    dist > err + ROUNDING * (1.0 + theta.abs())
}

/// `(0, l)` is one singular interval of type `pi/2`.
fn vertical_singular(h: &Hamiltonian, l: f64) -> bool {
    let pieces = h.pieces_upto(l);
    !pieces.is_empty()
        && pieces.iter().all(|p| match p.kind {
            PieceKind::Singular(a) => a.cos().abs() < 1e-12,
            PieceKind::Matrix(m) => m.h11.abs() < 1e-12,
            PieceKind::Ramp { .. } => false,
        })
}

/// Eigenvalues of the problem on `[0, l]` with `u2(0) = 0` and boundary
/// condition `beta` at `l`, counted in `w` through the Prüfer angle.
pub fn count_bounded(
    h: &Hamiltonian,
    l: f64,
    beta: f64,
    w: &SpectralWindow,
    tol: f64,
) -> Result<CountResult, SpectraError> {
    if vertical_singular(h, l) {
        return Ok(CountResult {
            count: Count::Finite(0),
            l_used: l,
            certified: true,
            theta_s: 0.0,
            theta_t: 0.0,
            err_bound: 0.0,
            trace: Vec::new(),
        });
    }
    let (theta_s, err_s) = final_theta(h, w.s, 0.0, l, tol)?;
    let (theta_t, err_t) = final_theta(h, w.t, 0.0, l, tol)?;
    let n = w.integers_crossed((theta_s - beta) / PI, (theta_t - beta) / PI);
    let err = err_s.max(err_t);
    let certified = err < PI / 4.0
        && clear_of_levels(theta_s, beta, err_s, w.s == 0.0)
        && clear_of_levels(theta_t, beta, err_t, w.t == 0.0);
    Ok(CountResult {
        count: Count::Finite(n as u64),
        l_used: l,
        certified,
        theta_s,
        theta_t,
        err_bound: err,
        trace: Vec::new(),
    })
}

/// Eigenvalues in the window located by bisection on `lambda -> theta(l; lambda)`.
pub fn locate_eigenvalues(
    h: &Hamiltonian,
    l: f64,
    beta: f64,
    w: &SpectralWindow,
    tol: f64,
    exec: Execution,
) -> Result<Vec<f64>, SpectraError> {
    if vertical_singular(h, l) {
        return Ok(Vec::new());
    }
    let theta = |lambda: f64| final_theta(h, lambda, 0.0, l, tol).map(|r| r.0);
    let th_s = theta(w.s)?;
    let th_t = theta(w.t)?;
    let y_s = (th_s - beta) / PI;
    let y_t = (th_t - beta) / PI;
    let lo = if w.include_s { y_s.ceil() } else { y_s.floor() + 1.0 };
    let hi = if w.include_t { y_t.floor() } else { y_t.ceil() - 1.0 };
    if hi < lo {
        return Ok(Vec::new());
    }
    let levels: Vec<f64> = (lo as i64..=hi as i64).map(|n| beta + n as f64 * PI).collect();
    let found = exec.map(&levels, |&target| -> Result<f64, SpectraError> {
        let (mut a, mut b) = (w.s, w.t);
        let (mut ta, mut tb) = (th_s, th_t);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b || b - a <= 1e-13 * m.abs().max(1.0) {
                break;
            }
            let tm = theta(m)?;
            if (tm - target).abs() < 0.5 * tol && b - a <= 1e-9 * m.abs().max(1.0) {
                return Ok(m);
            }
            if tm < target {
                a = m;
                ta = tm;
            } else {
                b = m;
                tb = tm;
            }
        }
        if (ta - target).abs() < tol && (tb - target).abs() < tol && b - a > 1e-6 * (1.0 + a.abs()) {
            return Err(SpectraError::NoUniqueRoot { level: target });
        }
        Ok(0.5 * (a + b))
    });
    found.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalflineParams {
    /// Increasing truncation lengths.
    pub schedule: Vec<f64>,
    pub tol: f64,
    /// `F(L)` at or above this value at the end of the schedule counts as
    /// divergence.
    pub divergence_threshold: f64,
}

/// `dim E(s, t) = lim floor((theta(L; t) - theta(L; s)) / pi)` estimated
/// along the schedule. A singular tail reduces the problem to a bounded one
/// with `beta = gamma + pi/2`.
pub fn halfline_count(
    h: &Hamiltonian,
    s: f64,
    t: f64,
    params: &HalflineParams,
) -> Result<CountResult, SpectraError> {
    let w = SpectralWindow::half_open(s, t)?;
    if let Tail::SingularHalfLine(gamma) = h.tail() {
        let beta = (gamma + PI / 2.0).rem_euclid(PI);
        return count_bounded(h, h.length(), beta, &w, params.tol);
    }
    let sched = &params.schedule;
    if sched.is_empty() || sched.windows(2).any(|p| p[1] <= p[0]) {
        return Err(SpectraError::BadParameter(
            "schedule must be nonempty and strictly increasing".into(),
        ));
    }
    let runs = Execution::default().map(&[s, t], |&lambda| theta_at(h, lambda, 0.0, sched, params.tol));
    let mut runs = runs.into_iter();
    let (th_s, err_s) = runs.next().unwrap()?;
    let (th_t, err_t) = runs.next().unwrap()?;
    let trace: Vec<(f64, f64)> = sched
        .iter()
        .zip(th_s.iter().zip(&th_t))
        .map(|(&l, (a, b))| (l, (b - a) / PI))
        .collect();
    let err = err_s + err_t;
    let last = trace.last().unwrap().1;
    let (theta_s, theta_t) = (*th_s.last().unwrap(), *th_t.last().unwrap());
    let l_used = *sched.last().unwrap();
    if last >= params.divergence_threshold {
        return Ok(CountResult {
            count: Count::Divergent,
            l_used,
            certified: false,
            theta_s,
            theta_t,
            err_bound: err,
            trace,
        });
    }
    let floors: Vec<f64> = trace.iter().map(|p| p.1.floor().max(0.0)).collect();
    let k = floors.len();
    if k >= 3 && floors[k - 1] == floors[k - 2] && floors[k - 2] == floors[k - 3] {
        let slack = err / PI + ROUNDING;
        let certified = trace[k - 3..]
            .iter()
            .all(|p| (p.1 - p.1.round()).abs() > slack || p.1.abs() <= slack);
        return Ok(CountResult {
            count: Count::Finite(floors[k - 1] as u64),
            l_used,
            certified,
            theta_s,
            theta_t,
            err_bound: err,
            trace,
        });
    }
    Err(SpectraError::Inconclusive { trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Segment;
    use crate::oracle::count_by_sign_changes_stable;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn p0() -> Hamiltonian {
        Hamiltonian::new(vec![Segment::angle(1.0, 0.0)], Tail::None).unwrap()
    }

    #[test]
    fn p0_counts() {
        let h = p0();
        let w = SpectralWindow::half_open(0.5, 2.0).unwrap();
        let r = count_bounded(&h, 1.0, FRAC_PI_4, &w, 1e-10).unwrap();
        assert_eq!(r.count, Count::Finite(1));
        assert!(r.certified);
        let w = SpectralWindow::half_open(-2.0, -0.5).unwrap();
        let r = count_bounded(&h, 1.0, FRAC_PI_4, &w, 1e-10).unwrap();
        assert_eq!(r.count, Count::Finite(0));
    }

    #[test]
    fn vertical_interval_has_no_spectrum() {
        let h = Hamiltonian::new(vec![Segment::angle(3.0, FRAC_PI_2)], Tail::None).unwrap();
        for beta in [0.0, 1.0, 3.0] {
            let w = SpectralWindow::half_open(-100.0, 100.0).unwrap();
            let r = count_bounded(&h, 3.0, beta, &w, 1e-10).unwrap();
            assert_eq!(r.count, Count::Finite(0));
        }
    }

    #[test]
    fn locate_p0() {
        let h = p0();
        let w = SpectralWindow::half_open(0.0, 10.0).unwrap();
        let ev = locate_eigenvalues(&h, 1.0, FRAC_PI_4, &w, 1e-12, Execution::default()).unwrap();
        assert_eq!(ev.len(), 1);
        assert!((ev[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn locate_two_segment_matches_oracle() {
        let h = Hamiltonian::new(
            vec![Segment::angle(1.0, 0.0), Segment::angle(1.0, -FRAC_PI_2)],
            Tail::None,
        )
        .unwrap();
        let w = SpectralWindow::half_open(0.0, 50.0).unwrap();
        let ev = locate_eigenvalues(&h, 2.0, 0.0, &w, 1e-12, Execution::default()).unwrap();
        let scan = count_by_sign_changes_stable(&h, 2.0, 0.0, &w, 0.05).unwrap();
        let roots = scan.root_estimates();
        assert_eq!(ev.len(), roots.len());
        for (a, b) in ev.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn count_is_additive() {
        let h = Hamiltonian::new(
            vec![
                Segment::angle(0.8, 1.1),
                Segment::ramp(1.5, 0.4, -0.7),
                Segment::angle(0.6, -1.4),
            ],
            Tail::None,
        )
        .unwrap();
        let c = |s, t| {
            let w = SpectralWindow::half_open(s, t).unwrap();
            count_bounded(&h, 2.9, 0.3, &w, 1e-10).unwrap().count.finite().unwrap()
        };
        assert_eq!(c(-20.0, 40.0), c(-20.0, 3.3) + c(3.3, 40.0));
    }

    #[test]
    fn tail_delegates_to_bounded() {
        let body = vec![Segment::angle(1.0, 0.0), Segment::ramp(1.0, -0.2, -0.9)];
        let gamma = -1.2;
        let h = Hamiltonian::new(body, Tail::SingularHalfLine(gamma)).unwrap();
        let params = HalflineParams {
            schedule: vec![1.0],
            tol: 1e-10,
            divergence_threshold: 10.0,
        };
        let a = halfline_count(&h, 0.5, 30.0, &params).unwrap();
        let w = SpectralWindow::half_open(0.5, 30.0).unwrap();
        let beta = (gamma + FRAC_PI_2).rem_euclid(PI);
        let b = count_bounded(&h, 2.0, beta, &w, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn short_schedule_is_inconclusive() {
        let h = Hamiltonian::new(vec![Segment::ramp(10.0, 0.0, -0.5)], Tail::None).unwrap();
        let params = HalflineParams {
            schedule: vec![5.0, 10.0],
            tol: 1e-9,
            divergence_threshold: 1e6,
        };
        assert!(matches!(
            halfline_count(&h, 0.0, 1.0, &params),
            Err(SpectraError::Inconclusive { .. })
        ));
    }
}
