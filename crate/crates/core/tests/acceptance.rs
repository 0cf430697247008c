//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits non-zero on a failing criterion only when `CANOSC_ACCEPTANCE_STRICT`
//! is set; otherwise failures are reported and the run completes.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Mutex;
use std::time::Instant;

use canosc::entire::{
    diagonal_transfer_matrix, order_bound_check, order_fit, transfer_matrix, type_fit,
    FitParams, HadamardFamily, TransferMatrix, C64, DET_TOL, ORDER_LOWER, ORDER_UPPER,
};
use canosc::oracle::count_by_sign_changes_stable;
use canosc::pruefer::theta_of_t_sweep;
use canosc::quad;
use canosc::spectra::{
    angle_floor_check, classify_profile, count_bounded, ess_spectrum_bounds, halfline_count,
    m_halfline_real, Classification, Count, HalflineParams, SpectraError, SpectralWindow,
};
use canosc::transforms::{
    canonical_to_diagonal, molchanov_new, DiagSegment, DiagonalOptions, DiagonalSystem,
    Potential, SchrodingerProblem, TrendVerdict,
};
use canosc::{Execution, Hamiltonian, PhiPiece, PhiProfile, Segment, Tail};
use rand::Rng;

// pinned tolerances
const COUNT_TOL: f64 = 1e-9;
const WINDOW_MARGIN: f64 = 1e-3;
const MONOTONE_TOL: f64 = 1e-8;
const FLOOR_TOL: f64 = 1e-6;
const NEG_WINDOW: f64 = -1e7;
const M_TOL: f64 = 1e-2;
const ESS_LOW: f64 = 0.8;
const ESS_HIGH: f64 = 1.25;
const DIVERGENCE_THRESHOLD: f64 = 10.0;
const DISCRETE_MIN_COUNT: u64 = 10;
const G_LIMIT: f64 = 0.5;
const G_REL_TOL: f64 = 0.05;
const AIRY_DECREASE: f64 = 10.0;
const POINT_MASS_ULPS: f64 = 4.0 * f64::EPSILON;
const JUMP_TOL: f64 = 1e-10;
const MEASURE_TOL: f64 = 1e-8;
const HADAMARD_ORDER_TOL: f64 = 0.1;
const POLY_ORDER_MAX: f64 = 0.1;
const TYPE_REL_TOL: f64 = 0.05;
const TRANSFER_TOL: f64 = 1e-12;

static DET: Mutex<(f64, usize)> = Mutex::new((0.0, 0));

fn det_record(d: f64, n: usize) {
    let mut g = DET.lock().unwrap();
    g.0 = g.0.max(d);
    g.1 += n;
}

fn tm(t: TransferMatrix) -> TransferMatrix {
    det_record(t.det_defect(), 1);
    t
}

/// Certified counts re-run at half the tolerance: `(checked, changed)`.
static HALVING: Mutex<(usize, usize)> = Mutex::new((0, 0));

fn halving_record(same: bool) {
    let mut g = HALVING.lock().unwrap();
    g.0 += 1;
    if !same {
        g.1 += 1;
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Outcome, results: &mut Vec<(u32, bool)>) {
    let t0 = Instant::now();
    let o = f();
    println!(
        "{} {:>2} {}: {} [{:.1} s]",
        if o.pass { "PASS" } else { "FAIL" },
        id,
        name,
        o.detail,
        t0.elapsed().as_secs_f64()
    );
    results.push((id, o.pass));
}

fn bounded_count(h: &Hamiltonian, l: f64, beta: f64, w: &SpectralWindow, tol: f64) -> (u64, bool) {
    let r = count_bounded(h, l, beta, w, tol).unwrap();
    let n = r.count.finite().unwrap();
    if r.certified {
        let again = count_bounded(h, l, beta, w, tol / 2.0).unwrap();
        halving_record(again.count.finite() == Some(n));
    }
    (n, r.certified)
}

fn halfline(h: &Hamiltonian, s: f64, t: f64, params: &HalflineParams) -> Result<Count, SpectraError> {
    let r = halfline_count(h, s, t, params)?;
    if r.certified {
        let half = HalflineParams {
            tol: params.tol / 2.0,
            ..params.clone()
        };
        let same = halfline_count(h, s, t, &half).map(|a| a.count == r.count).unwrap_or(false);
        halving_record(same);
    }
    Ok(r.count)
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    let q = (b / a).ln() / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { b } else { a * (q * i as f64).exp() }).collect()
}

fn oracle_equivalence() -> Outcome {
    let mut rng = common::rng(1);
    let (mut equal, mut uncertified) = (0, 0);
    let mut mismatches = Vec::new();
    for k in 0..200 {
        let h = common::piecewise_constant(&mut rng, 20);
        let beta = rng.random_range(0.0..PI);
        let l = h.length();
        let (w, oracle) = loop {
            let s = rng.random_range(-50.0..40.0);
            let t = s + rng.random_range(1.0..50.0);
            let wide = SpectralWindow::half_open(s - 0.01, t + 0.01).unwrap();
            let scan = count_by_sign_changes_stable(&h, l, beta, &wide, 0.05).unwrap();
            let roots = scan.root_estimates();
            if roots.iter().all(|r| (r - s).abs() >= WINDOW_MARGIN && (r - t).abs() >= WINDOW_MARGIN) {
                let inside = roots.iter().filter(|&&r| r >= s && r < t).count() as u64;
                break (SpectralWindow::half_open(s, t).unwrap(), inside);
            }
        };
        let (n, cert) = bounded_count(&h, l, beta, &w, COUNT_TOL);
        if !cert {
            uncertified += 1;
        }
        if n == oracle {
            equal += 1;
        } else {
            mismatches.push(format!("#{k}: {n} vs {oracle}"));
        }
    }
    Outcome {
        pass: equal == 200,
        detail: format!(
            "{equal}/200 counts equal the sign-change oracle, {uncertified} uncertified{}",
            if mismatches.is_empty() { String::new() } else { format!("; {}", mismatches.join(", ")) }
        ),
    }
}

fn monotonicity() -> Outcome {
    let mut rng = common::rng(2);
    let grid: Vec<f64> = (0..20).map(|i| -50.0 + 100.0 * i as f64 / 19.0).collect();
    let mut violations = 0;
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let h = common::general_system(&mut rng, 8);
        let theta0 = rng.random_range(-PI..PI);
        let l = rng.random_range(0.0..=h.length());
        let sweep = theta_of_t_sweep(&h, theta0, l, &grid, MONOTONE_TOL, Execution::default()).unwrap();
        for w in sweep.windows(2) {
            let drop = w[0].1 - w[1].1;
            worst = worst.max(drop);
            if drop > 2.0 * MONOTONE_TOL {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!("{violations} violations over 1000 triples x 20 t-values (largest decrease {worst:.2e})"),
    }
}

fn schedule(l: f64) -> Vec<f64> {
    (1..=8).map(|k| l * k as f64 / 8.0).collect()
}

fn cplus_nonnegativity() -> Outcome {
    let mut rng = common::rng(3);
    let (mut nonzero, mut errors, mut floor_bad) = (0, 0, 0);
    let mut min_floor = f64::INFINITY;
    for _ in 0..50 {
        let n = rng.random_range(1..8);
        let phi = common::cplus_profile(&mut rng, n, true);
        assert!(matches!(classify_profile(&phi), Classification::InCPlus(_)));
        let h = phi.to_hamiltonian();
        let params = HalflineParams {
            schedule: schedule(h.length()),
            tol: COUNT_TOL,
            divergence_threshold: DIVERGENCE_THRESHOLD,
        };
        for t in [1.0, 10.0, 100.0] {
            match halfline(&h, -t, 0.0, &params) {
                Ok(Count::Finite(0)) => {}
                Ok(_) => nonzero += 1,
                Err(_) => errors += 1,
            }
            let rep = angle_floor_check(&h, -t, h.length(), COUNT_TOL).unwrap();
            min_floor = min_floor.min(rep.min_theta + PI);
            if rep.min_theta < -PI - FLOOR_TOL {
                floor_bad += 1;
            }
        }
    }
    Outcome {
        pass: nonzero == 0 && errors == 0 && floor_bad == 0,
        detail: format!(
            "{nonzero} nonzero counts, {errors} inconclusive, {floor_bad} floor crossings (min theta + pi = {min_floor:.2e})"
        ),
    }
}

fn negative_bound() -> Outcome {
    let mut rng = common::rng(4);
    let mut violations = 0;
    let mut max_seen = [0u64; 3];
    for k in 0..50 {
        let bound = (k % 3 + 1) as u64;
        let phi = common::negative_profile(&mut rng, bound, 6);
        let n = match classify_profile(&phi) {
            Classification::NegEigsAtMost { n, .. } => n,
            _ => u64::MAX,
        };
        let h = phi.to_hamiltonian();
        let w = SpectralWindow::half_open(NEG_WINDOW, 0.0).unwrap();
        for l in schedule(h.length()) {
            let beta = (phi.left_limit(l) + FRAC_PI_2).rem_euclid(PI);
            let (c, _) = bounded_count(&h, l, beta, &w, COUNT_TOL);
            max_seen[(bound - 1) as usize] = max_seen[(bound - 1) as usize].max(c);
            if c > n || n != bound {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: violations == 0,
        detail: format!(
            "{violations} violations; largest negative count seen for N = 1, 2, 3: {max_seen:?}"
        ),
    }
}

fn m_endpoints() -> Outcome {
    let mut rng = common::rng(5);
    let (mut worst0, mut worst_inf) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let a1 = rng.random_range(-1.0..1.2);
        let a2 = rng.random_range(-1.2..a1 - 0.05);
        let (l1, l2) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let h = Hamiltonian::new(vec![Segment::angle(l1, a1), Segment::angle(l2, a2)], Tail::None).unwrap();
        let x = l1 + l2;
        let big = m_halfline_real(&h, -1e6, x, 1e-10).unwrap();
        let small = m_halfline_real(&h, -1e-6, x, 1e-10).unwrap();
        worst0 = worst0.max((big + a1.tan()).abs());
        worst_inf = worst_inf.max((small + a2.tan()).abs());
    }
    Outcome {
        pass: worst0 <= M_TOL && worst_inf <= M_TOL,
        detail: format!(
            "max |m(-1e6) + tan phi(0+)| = {worst0:.2e}, max |m(-1e-6) + tan phi(inf)| = {worst_inf:.2e}"
        ),
    }
}

fn tail_params(x0: f64, x1: f64) -> HalflineParams {
    HalflineParams {
        schedule: geometric(x0.max(10.0), x1, 24),
        tol: 1e-8,
        divergence_threshold: DIVERGENCE_THRESHOLD,
    }
}

fn describe(c: &Result<Count, SpectraError>) -> String {
    match c {
        Ok(Count::Finite(n)) => format!("{n}"),
        Ok(Count::Divergent) => "divergent".into(),
        Err(SpectraError::Inconclusive { trace }) => {
            format!("inconclusive (F = {:.3})", trace.last().map(|p| p.1).unwrap_or(f64::NAN))
        }
        Err(e) => format!("error {e}"),
    }
}

fn essential_constant() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for c in [0.5, 1.0, 2.0] {
        let phi = common::power_tail(-FRAC_PI_2, c, 1.0, 1.0, 1e4, 4000);
        let h = phi.to_hamiltonian();
        let params = tail_params(1.0, 1e4);
        let below = halfline(&h, 0.0, ESS_LOW / (4.0 * c), &params);
        let above = halfline(&h, 0.0, ESS_HIGH / (4.0 * c), &params);
        let bounds = ess_spectrum_bounds(&phi, 0.5).unwrap();
        let pass = matches!(below, Ok(Count::Finite(_))) && matches!(above, Ok(Count::Divergent));
        ok &= pass;
        parts.push(format!(
            "C = {c}: below {} / above {} (bounds [{:.4}, {:.4}] vs 1/(4C) = {:.4})",
            describe(&below),
            describe(&above),
            bounds.lower,
            bounds.upper,
            0.25 / c
        ));
    }
    Outcome {
        pass: ok,
        detail: parts.join("; "),
    }
}

fn discrete_criterion() -> Outcome {
    let pts: Vec<(f64, f64)> = (0..=2000)
        .map(|i| {
            let x = 50.0 * i as f64 / 2000.0;
            (x, -FRAC_PI_2 + (-x).exp())
        })
        .collect();
    let exp_tail = PhiProfile::from_breakpoints(&pts, -FRAC_PI_2).unwrap().to_hamiltonian();
    let params = HalflineParams {
        schedule: (1..=10).map(|k| 5.0 * k as f64).collect(),
        tol: 1e-8,
        divergence_threshold: DIVERGENCE_THRESHOLD,
    };
    let mut parts = Vec::new();
    let mut ok_a = true;
    for t in [1.0, 10.0, 100.0] {
        let c = halfline(&exp_tail, 0.0, t, &params);
        ok_a &= matches!(c, Ok(Count::Finite(_)));
        parts.push(format!("e^-x, t = {t}: {}", describe(&c)));
    }
    let sqrt_tail = common::power_tail(-FRAC_PI_2, 1.0, 0.5, 1.0, 1e4, 4000).to_hamiltonian();
    let c = halfline(&sqrt_tail, 0.0, 0.01, &tail_params(1.0, 1e4));
    let ok_b = match c {
        Ok(Count::Divergent) => true,
        Ok(Count::Finite(n)) => n > DISCRETE_MIN_COUNT,
        Err(_) => false,
    };
    parts.push(format!("x^-1/2 count of (0, 0.01): {}", describe(&c)));
    Outcome {
        pass: ok_a && ok_b,
        detail: parts.join("; "),
    }
}

fn molchanov() -> Outcome {
    let free = SchrodingerProblem {
        potential: Potential::sample(|_| 0.0, 0.0, 30.0, 300).unwrap(),
        e0: -1.0,
    };
    let g = molchanov_new(&free, &[10.0]).unwrap().g[0].1;
    let closed = (0.25 * 20f64.sinh() - 5.0) * (1.0 / 10f64.tanh() - 1.0);
    let ok_free = (g - G_LIMIT).abs() <= G_REL_TOL * G_LIMIT;

    let airy = SchrodingerProblem {
        potential: Potential::sample(|x| x, 0.0, 30.0, 3000).unwrap(),
        e0: -1.0,
    };
    let grid: Vec<f64> = (0..=38).map(|i| 1.0 + 0.5 * i as f64).collect();
    let out = molchanov_new(&airy, &grid).unwrap();
    let ratio = out.g[0].1 / out.g.last().unwrap().1;
    let ok_airy = ratio >= AIRY_DECREASE && out.verdict == TrendVerdict::TrendsToZero;
    Outcome {
        pass: ok_free && ok_airy,
        detail: format!(
            "V = 0: G(10) = {g:.6} (target {G_LIMIT}, closed form {closed:.6}); V = x: G(1)/G(20) = {ratio:.3} (need >= {AIRY_DECREASE}), verdict {:?}",
            out.verdict
        ),
    }
}

fn diagonal_transform() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    // single plateau
    let (alpha, len) = (0.9, 1.7);
    let phi = PhiProfile::new(vec![PhiPiece { x0: 0.0, x1: len, phi0: alpha, phi1: alpha }], alpha).unwrap();
    let d = canonical_to_diagonal(&phi, &DiagonalOptions::default()).unwrap();
    let want = len / (1.0 + alpha.tan().powi(2));
    let single = d.segments.len() == 1
        && d.segments[0].h == 1.0
        && (d.segments[0].delta_t - want).abs() <= POINT_MASS_ULPS * want;
    ok &= single;
    // jump between plateaus
    let (a1, a2) = (0.5, -0.8);
    let phi = PhiProfile::new(
        vec![
            PhiPiece { x0: 0.0, x1: 1.0, phi0: a1, phi1: a1 },
            PhiPiece { x0: 1.0, x1: 2.5, phi0: a2, phi1: a2 },
        ],
        a2,
    )
    .unwrap();
    let d = canonical_to_diagonal(&phi, &DiagonalOptions::default()).unwrap();
    let masses: Vec<_> = d.segments.iter().filter(|s| s.h > 0.0).collect();
    let jump = masses.len() == 2
        && masses.iter().all(|s| s.h == 1.0)
        && (masses[0].delta_t - 1.0 / (1.0 + a1.tan().powi(2))).abs() <= POINT_MASS_ULPS
        && (masses[1].delta_t - 1.5 / (1.0 + a2.tan().powi(2))).abs() <= POINT_MASS_ULPS * 1.5
        && d.w_mass() == masses[0].delta_t + masses[1].delta_t;
    ok &= jump;
    notes.push(format!("point-mass rules {}", if single && jump { "exact" } else { "violated" }));

    // jump formula through the diagonal system
    let mut worst_jump = 0.0f64;
    for &(alpha, len) in &[(0.9, 1.7), (-0.3, 0.6), (1.3, 2.2)] {
        let phi = PhiProfile::new(vec![PhiPiece { x0: 0.0, x1: len, phi0: alpha, phi1: alpha }], alpha).unwrap();
        let d = canonical_to_diagonal(&phi, &DiagonalOptions::default()).unwrap();
        let t = -f64::tan(alpha);
        let h = Hamiltonian::new(vec![Segment::angle(len, alpha)], Tail::None).unwrap();
        for z in [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-2.0, 0.0)] {
            let m = tm(diagonal_transfer_matrix(&d, z)).entries();
            // conjugate back with the shear taking e_0 to (1, -t)
            let a = [[m[0][0] + t * m[1][0], m[0][1] + t * m[1][1]], [m[1][0], m[1][1]]];
            let back = [[a[0][0], a[0][1] - t * a[0][0]], [a[1][0], a[1][1] - t * a[1][0]]];
            let g = C64::new(len, 0.0) * z;
            let (s, c) = alpha.sin_cos();
            // 1 + z l J P_alpha
            let one = C64::new(1.0, 0.0);
            let formula = [[one - g * s * c, -g * s * s], [g * c * c, one + g * s * c]];
            let direct = tm(transfer_matrix(&h, len, z, 1e-12).unwrap()).entries();
            for i in 0..2 {
                for j in 0..2 {
                    worst_jump = worst_jump.max((back[i][j] - formula[i][j]).norm());
                    worst_jump = worst_jump.max((direct[i][j] - formula[i][j]).norm());
                }
            }
        }
    }
    ok &= worst_jump <= JUMP_TOL;
    notes.push(format!("jump formula max deviation {worst_jump:.1e}"));

    // image-measure conservation
    let mut rng = common::rng(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(1..8);
        let phi = common::cplus_profile(&mut rng, n, true);
        let d = canonical_to_diagonal(&phi, &DiagonalOptions::default()).unwrap();
        let total = d.total_length();
        worst = worst.max((total - d.w_mass() - d.t_range()).abs() / total.max(1.0));
        let rot = phi.rotated(d.rotation);
        let direct: f64 = rot
            .pieces()
            .iter()
            .map(|p| {
                quad::integrate(
                    |x| (p.phi0 + (p.phi1 - p.phi0) * (x - p.x0) / p.length()).cos().powi(2),
                    p.x0,
                    p.x1,
                    1e-14,
                    1e-13,
                )
                .value
            })
            .sum();
        worst = worst.max((d.w_mass() - direct).abs() / direct.max(1.0));
        // x-length carried by dw: sum (1 + t^2) dw over point masses and cells
        let t = d.t_values();
        let plateau_x: f64 = d
            .segments
            .iter()
            .zip(&t)
            .filter(|(s, _)| s.h == 1.0)
            .map(|(s, &t)| s.delta_t * (1.0 + t * t))
            .sum();
        let plateau_len: f64 = phi.pieces().iter().filter(|p| p.is_plateau()).map(|p| p.length()).sum();
        worst = worst.max((plateau_x - plateau_len).abs() / plateau_len.max(1.0));
    }
    ok &= worst <= MEASURE_TOL;
    notes.push(format!("image measure max relative defect {worst:.1e}"));
    Outcome {
        pass: ok,
        detail: notes.join("; "),
    }
}

fn type_and_order() -> Outcome {
    let exec = Execution::default();
    let mut notes = Vec::new();
    let mut ok = true;

    // (a) random systems with nonnegative spectrum
    let mut rng = common::rng(10);
    let ode_params = FitParams {
        r_min: 1.0,
        r_max: 1e5,
        n_radii: 12,
        n_phases: 16,
    };
    let mut max_order = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(1..6);
        let phi = common::cplus_profile(&mut rng, n, true);
        let h = phi.to_hamiltonian();
        let rep = order_bound_check(&h, h.length(), &ode_params, TRANSFER_TOL, exec).unwrap();
        det_record(rep.max_det_defect, ode_params.n_radii * ode_params.n_phases);
        max_order = max_order.max(rep.fit.order);
        ok &= rep.in_c_plus && rep.upper_ok;
    }
    notes.push(format!("(a) max fitted order {max_order:.3} (<= {ORDER_UPPER})"));

    // (b) Hadamard family, singular and ramp systems
    let closed_params = FitParams::default();
    for alpha in [3.0, 4.0] {
        let fam = HadamardFamily::for_radius(alpha, closed_params.r_max).unwrap();
        let fit = order_fit(|z| Ok(fam.log_a(z).re), &closed_params, exec).unwrap();
        ok &= (fit.order - 1.0 / alpha).abs() <= HADAMARD_ORDER_TOL;
        notes.push(format!("(b) A, alpha = {alpha}: order {:.3}", fit.order));
    }
    let poly_params = FitParams {
        r_min: 1.0,
        r_max: 1e12,
        n_radii: 16,
        n_phases: 16,
    };
    let mut worst_poly = 0.0f64;
    for _ in 0..5 {
        let h = common::cplus_profile(&mut rng, 6, false).to_hamiltonian();
        let rep = order_bound_check(&h, h.length(), &poly_params, TRANSFER_TOL, exec).unwrap();
        det_record(rep.max_det_defect, poly_params.n_radii * poly_params.n_phases);
        worst_poly = worst_poly.max(rep.fit.order);
    }
    ok &= worst_poly <= POLY_ORDER_MAX;
    notes.push(format!("piecewise-constant max order {worst_poly:.3}"));
    let ramp = Hamiltonian::new(vec![Segment::ramp(1.0, 1.2, -1.2)], Tail::None).unwrap();
    let rep = order_bound_check(&ramp, 1.0, &ode_params, TRANSFER_TOL, exec).unwrap();
    det_record(rep.max_det_defect, ode_params.n_radii * ode_params.n_phases);
    ok &= rep.fit.order >= ORDER_LOWER && rep.fit.order <= ORDER_UPPER;
    notes.push(format!("ramp order {:.3}", rep.fit.order));

    // (c) type of h = 1/2 systems against imaginary-axis growth
    let mut worst_type = 0.0f64;
    for _ in 0..5 {
        let k = rng.random_range(1..6);
        let d = DiagonalSystem::from_segments(
            (0..k)
                .map(|_| DiagSegment {
                    delta_t: rng.random_range(0.2..2.0),
                    h: 0.5,
                })
                .collect(),
        );
        let tau = d.debranges_type();
        let fit = type_fit(
            |z| Ok(tm(diagonal_transfer_matrix(&d, z)).log_norm()),
            FRAC_PI_2,
            50.0,
            500.0,
            32,
            exec,
        )
        .unwrap();
        worst_type = worst_type.max((fit.slope - tau).abs() / tau);
    }
    ok &= worst_type <= TYPE_REL_TOL;
    notes.push(format!("(c) type vs growth max relative gap {worst_type:.1e}"));
    Outcome {
        pass: ok,
        detail: notes.join("; "),
    }
}

fn hygiene() -> Outcome {
    let (det, n) = *DET.lock().unwrap();
    let (checked, changed) = *HALVING.lock().unwrap();
    Outcome {
        pass: det <= DET_TOL && changed == 0,
        detail: format!(
            "max det defect {det:.1e} over {n} transfer matrices; {changed} of {checked} certified counts changed at half tolerance"
        ),
    }
}

fn main() {
    let mut results = Vec::new();
    run(1, "oracle equivalence", oracle_equivalence, &mut results);
    run(2, "monotonicity in t", monotonicity, &mut results);
    run(3, "nonnegative spectrum", cplus_nonnegativity, &mut results);
    run(4, "negative-eigenvalue bound", negative_bound, &mut results);
    run(5, "m-function endpoints", m_endpoints, &mut results);
    run(6, "essential-spectrum constant", essential_constant, &mut results);
    run(7, "discrete-spectrum criterion", discrete_criterion, &mut results);
    run(8, "Molchanov consistency", molchanov, &mut results);
    run(9, "diagonal transform", diagonal_transform, &mut results);
    run(10, "type and order", type_and_order, &mut results);
    run(11, "numerical hygiene", hygiene, &mut results);
    let failed: Vec<u32> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria pass{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failing: {failed:?}") }
    );
    if !failed.is_empty() && std::env::var_os("CANOSC_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
