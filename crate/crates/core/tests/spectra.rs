mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use canosc::hamiltonian::RANK_ONE_TOL;
use canosc::oracle::count_by_sign_changes_stable;
use canosc::spectra::{
    classify_profile, classify_semibounded, count_bounded, halfline_count, locate_eigenvalues,
    m_halfline_real, Classification, Count, HalflineParams, SpectralWindow,
};
use canosc::{Execution, Hamiltonian, Segment, Tail};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn count(h: &Hamiltonian, beta: f64, s: f64, t: f64) -> u64 {
    let w = SpectralWindow::half_open(s, t).unwrap();
    count_bounded(h, h.length(), beta, &w, TOL).unwrap().count.finite().unwrap()
}

fn schedule(l: f64) -> HalflineParams {
    HalflineParams {
        schedule: vec![0.25 * l, 0.5 * l, 0.75 * l, l],
        tol: TOL,
        divergence_threshold: 10.0,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn counts_are_additive(
        seed in any::<u64>(),
        beta in 0.0..PI,
        s in -60.0..0.0f64,
        d1 in 0.0..40.0f64,
        d2 in 0.0..40.0f64,
    ) {
        let mut rng = common::rng(seed);
        let h = common::cplus_profile(&mut rng, 6, true).to_hamiltonian();
        let (t, u) = (s + d1, s + d1 + d2);
        prop_assume!(t > s && u > t);
        prop_assert_eq!(count(&h, beta, s, u), count(&h, beta, s, t) + count(&h, beta, t, u));
    }

    #[test]
    fn cplus_has_no_negative_eigenvalues(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = common::rng(seed);
        let phi = common::cplus_profile(&mut rng, n, true);
        let h = phi.to_hamiltonian();
        prop_assert!(matches!(classify_semibounded(&h, RANK_ONE_TOL).unwrap(), Classification::InCPlus(_)));
        for t in [1.0, 10.0, 100.0] {
            let r = halfline_count(&h, -t, 0.0, &schedule(h.length())).unwrap();
            prop_assert_eq!(r.count, Count::Finite(0));
        }
    }

    #[test]
    fn negative_count_bounded_by_classification(seed in any::<u64>(), bound in 1u64..=3) {
        let mut rng = common::rng(seed);
        let phi = common::negative_profile(&mut rng, bound, 6);
        let n = match classify_profile(&phi) {
            Classification::NegEigsAtMost { n, .. } => n,
            other => panic!("{}", other.label()),
        };
        prop_assert_eq!(n, bound);
        let h = phi.to_hamiltonian();
        for k in 1..=8 {
            let l = h.length() * k as f64 / 8.0;
            let beta = (phi.left_limit(l) + FRAC_PI_2).rem_euclid(PI);
            let w = SpectralWindow::half_open(-1e7, 0.0).unwrap();
            let c = count_bounded(&h, l, beta, &w, TOL).unwrap();
            prop_assert!(c.count.finite().unwrap() <= n, "L = {l}: {:?}", c.count);
        }
    }
}

#[test]
fn counts_match_sign_changes_on_random_systems() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let h = common::piecewise_constant(&mut rng, 12);
        let beta = 1.1;
        let w = SpectralWindow::half_open(-20.0, 30.0).unwrap();
        let scan = count_by_sign_changes_stable(&h, h.length(), beta, &w, 0.05).unwrap();
        let roots = scan.root_estimates();
        if roots.iter().any(|r| (r - w.s).abs() < 1e-3 || (r - w.t).abs() < 1e-3) {
            continue;
        }
        let c = count_bounded(&h, h.length(), beta, &w, TOL).unwrap();
        assert_eq!(c.count.finite().unwrap(), scan.count() as u64);
        let located = locate_eigenvalues(&h, h.length(), beta, &w, 1e-11, Execution::default()).unwrap();
        assert_eq!(located.len(), roots.len());
        for (a, b) in located.iter().zip(&roots) {
            assert!((a - b).abs() < 1e-6 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn m_endpoint_error_shrinks() {
    let (a1, a2) = (0.9, -0.6);
    let h = Hamiltonian::new(vec![Segment::angle(1.0, a1), Segment::angle(1.5, a2)], Tail::None).unwrap();
    let mut prev = f64::INFINITY;
    for t in [1e2, 1e3, 1e4, 1e5, 1e6] {
        let m = m_halfline_real(&h, -t, 2.5, 1e-10).unwrap();
        let err = (m + a1.tan()).abs();
        assert!(err < prev, "t = {t}: {err} after {prev}");
        prev = err;
    }
    assert!(prev < 1e-2);
}
