//! Random system generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI};

use canosc::{Hamiltonian, PhiPiece, PhiProfile, Segment, Tail};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Piecewise-constant `phi`: up to `max_segments` singular intervals with
/// lengths in `[0.1, 2]` and angles uniform in `[0, pi)`.
pub fn piecewise_constant(rng: &mut ChaCha8Rng, max_segments: usize) -> Hamiltonian {
    let n = rng.random_range(1..=max_segments);
    let segs = (0..n)
        .map(|_| Segment::angle(rng.random_range(0.1..=2.0), rng.random_range(0.0..PI)))
        .collect();
    Hamiltonian::new(segs, Tail::None).unwrap()
}

/// Nonincreasing profile with `n` pieces (plateaus, ramps and jumps) from
/// `start` down to `end`. Without ramps the first piece is a plateau at
/// `start` and the remaining drop is spread over jumps.
fn profile_between(rng: &mut ChaCha8Rng, n: usize, start: f64, end: f64, ramps: bool) -> Vec<PhiPiece> {
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            if (!ramps && i == 0) || rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.1..1.0)
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let drop = start - end;
    let mut pieces = Vec::with_capacity(n);
    let (mut x, mut cur) = (0.0, start);
    for (i, w) in weights.iter().enumerate() {
        let last = i + 1 == n && (ramps || n > 1);
        let next = if last {
            end
        } else if total > 0.0 {
            cur - drop * w / total
        } else {
            cur
        };
        let next = if (cur - next).abs() < 1e-9 { cur } else { next };
        let jump = if ramps { i > 0 && rng.random_bool(0.5) } else { true };
        let (p0, p1) = if next == cur {
            (cur, cur)
        } else if jump {
            (next, next)
        } else {
            (cur, next)
        };
        let len = rng.random_range(0.1..=2.0);
        pieces.push(PhiPiece {
            x0: x,
            x1: x + len,
            phi0: p0,
            phi1: p1,
        });
        x += len;
        cur = p1;
    }
    pieces
}

/// Random profile with nonnegative spectrum: `phi(0+)` in `(-pi/2, pi/2]`,
/// `phi(infinity) >= -pi/2`. With `ramps = false` every piece is a plateau.
pub fn cplus_profile(rng: &mut ChaCha8Rng, n: usize, ramps: bool) -> PhiProfile {
    let start = rng.random_range(-FRAC_PI_2 + 0.1..=FRAC_PI_2 - 1e-3);
    let budget = start + FRAC_PI_2 - 0.02;
    let drop = rng.random_range(0.0..=budget);
    let pieces = profile_between(rng, n, start, start - drop, ramps);
    let end = pieces.last().unwrap().phi1;
    let inf = if rng.random_bool(0.5) {
        end
    } else {
        end - rng.random_range(0.0..=(end + FRAC_PI_2 - 0.01).max(0.0))
    };
    PhiProfile::new(pieces, inf).unwrap()
}

/// Random profile with `phi(infinity)` in `(-N pi - pi/2, -(N-1) pi - pi/2]`,
/// reached at the end of the data.
pub fn negative_profile(rng: &mut ChaCha8Rng, n_bound: u64, n: usize) -> PhiProfile {
    let start = rng.random_range(-FRAC_PI_2 + 0.1..=FRAC_PI_2 - 1e-3);
    let hi = -((n_bound - 1) as f64) * PI - FRAC_PI_2;
    let inf = hi - rng.random_range(0.0..PI - 1e-3);
    let pieces = loop {
        let p = profile_between(rng, n.max(4 * n_bound as usize), start, inf, true);
        if p.windows(2).all(|w| w[0].phi1 - w[1].phi0 < PI - 0.05) {
            break p;
        }
    };
    PhiProfile::new(pieces, inf).unwrap()
}

/// Profile `phi_inf + c / x` on `[x0, x1]` sampled on a geometric grid of
/// `n` points, preceded by the plateau `phi_inf + c / x0` on `[0, x0]`.
pub fn power_tail(phi_inf: f64, c: f64, p: f64, x0: f64, x1: f64, n: usize) -> PhiProfile {
    let mut pts = vec![(0.0, phi_inf + c / x0.powf(p))];
    let q = (x1 / x0).ln() / (n - 1) as f64;
    for i in 0..n {
        let x = if i + 1 == n { x1 } else { x0 * (q * i as f64).exp() };
        pts.push((x, phi_inf + c / x.powf(p)));
    }
    PhiProfile::from_breakpoints(&pts, phi_inf).unwrap()
}

/// Arbitrary system mixing singular intervals, constant matrices and
/// ramps; `phi` need not be monotone.
pub fn general_system(rng: &mut ChaCha8Rng, max_segments: usize) -> Hamiltonian {
    let n = rng.random_range(1..=max_segments);
    let segs = (0..n)
        .map(|_| {
            let len = rng.random_range(0.1..=2.0);
            match rng.random_range(0..3) {
                0 => Segment::angle(len, rng.random_range(-PI..PI)),
                1 => {
                    let a: f64 = rng.random_range(0.0..=1.0);
                    let s: f64 = rng.random_range(-1.0..=1.0);
                    Segment::matrix(
                        len,
                        canosc::MatrixH {
                            h11: a,
                            h12: s * (a * (1.0 - a)).sqrt(),
                            h22: 1.0 - a,
                        },
                    )
                }
                _ => Segment::ramp(len, rng.random_range(-PI..PI), rng.random_range(-PI..PI)),
            }
        })
        .collect();
    Hamiltonian::from_segments_unchecked(segs, Tail::None)
}
