use gicb_core::channel::{build_gaussian_system, standardize, GenieSpec, GenieSpec2, InterferenceNetwork};
use gicb_core::gaussian::{markov_algebraic, markov_test, SystemBuilder};
use gicb_core::network::{
    build_vector_genie, m_user_tin_sum_rate, network_outer_bound, vector_genie_sum_bound, OrderingFunction,
};
use gicb_core::two_user::{
    broadcast_outer_constraint, epi_outer_region, etw_halfplanes, hk_gaussian_inner_region, inr_threshold,
    region_grid, tin_rates, tin_sum_rate, GenieSearch, HkSplits, TwoUser,
};
use gicb_core::CovMatrix64;
use proptest::prelude::*;

fn weak_pair() -> impl Strategy<Value = InterferenceNetwork<f64>> {
    (0.1..50.0_f64, 0.1..50.0_f64, 0.0..1.0_f64, 0.0..1.0_f64)
        .prop_map(|(p1, p2, a, b)| InterferenceNetwork::two_user(p1, p2, a, b).unwrap())
}

fn network(m: usize) -> impl Strategy<Value = InterferenceNetwork<f64>> {
    (
        prop::collection::vec(-1.5..1.5_f64, m * m),
        prop::collection::vec(0.1..20.0_f64, m),
    )
        .prop_map(move |(g, p)| {
            let h = (0..m)
                .map(|r| (0..m).map(|t| if r == t { 1.0 } else { g[r * m + t] }).collect())
                .collect();
            InterferenceNetwork::new(h, p).unwrap()
        })
}

/// A single cycle through all users, from a shuffled visiting order.
fn cycle(m: usize) -> impl Strategy<Value = OrderingFunction> {
    Just((0..m).collect::<Vec<usize>>()).prop_shuffle().prop_map(move |order| {
        let mut pi = vec![0; m];
        for k in 0..m {
            pi[order[k]] = order[(k + 1) % m];
        }
        OrderingFunction::new(pi).unwrap()
    })
}

proptest! {
    #[test]
    fn standardize_is_idempotent(net in network(3)) {
        let h: Vec<Vec<f64>> = net.gains().to_vec();
        let again = standardize(&h, net.powers(), &[1.0; 3]).unwrap();
        prop_assert_eq!(again, net);
    }

    #[test]
    fn standardize_keeps_ratios(
        raw in prop::collection::vec(0.1..3.0_f64, 4),
        p in prop::collection::vec(0.1..10.0_f64, 2),
        n in prop::collection::vec(0.2..5.0_f64, 2),
    ) {
        let h = vec![vec![raw[0], raw[1]], vec![raw[2], raw[3]]];
        let s = standardize(&h, &p, &n).unwrap();
        for r in 0..2 {
            for t in 0..2 {
                let raw_inr = h[r][t] * h[r][t] * p[t] / n[r];
                prop_assert!((s.inr(r, t) - raw_inr).abs() <= 1e-10 * raw_inr.max(1.0));
            }
        }
    }

    #[test]
    fn joint_covariance_is_psd(
        net in weak_pair(),
        eta in (0.0..3.0_f64, 0.0..3.0_f64),
        rho in (-0.99..0.99_f64, -0.99..0.99_f64),
    ) {
        let g = GenieSpec2::new(eta.0, eta.1, rho.0, rho.1).unwrap();
        let sys = build_gaussian_system(&net, Some(&GenieSpec::TwoUser(g))).unwrap();
        let cov = sys.cov();
        prop_assert!(cov.min_eigenvalue() >= -1e-9 * cov.eigen().max_abs_value().max(1.0));
    }

    #[test]
    fn markov_tests_agree(
        p in 0.1..10.0_f64,
        ezz in 0.1..3.0_f64,
        extra in 0.0..3.0_f64,
        holds in any::<bool>(),
        frac in -0.95..0.95_f64,
    ) {
        let (enz, enn) = if holds { (ezz, ezz + extra) } else { (frac * (ezz * (ezz + extra + 0.1)).sqrt(), ezz + extra + 0.1) };
        prop_assume!(holds || (enz - ezz).abs() > 1e-3);
        let noise = CovMatrix64::from_rows(&[vec![ezz, enz], vec![enz, enn]]).unwrap();
        let mut b = SystemBuilder::new();
        b.source("X", p).correlated_sources(&["Z", "N"], noise);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        b.combine("S", &[("X", 1.0), ("N", 1.0)]);
        let sys = b.build().unwrap();
        prop_assert_eq!(markov_test(&sys, &["X"], &["Y"], &["S"]).unwrap(), markov_algebraic(enz, ezz));
    }

    #[test]
    fn tin_point_lies_inside_etw(net in weak_pair()) {
        let (r1, r2) = tin_rates(&net).unwrap();
        for h in etw_halfplanes(&net).unwrap() {
            prop_assert!(h.slack(r1, r2) >= -1e-9, "{} violated", h.name);
        }
    }

    #[test]
    fn broadcast_bound_is_nonincreasing(net in weak_pair(), a in 0.0..1.0_f64, b in 0.0..1.0_f64) {
        let c2 = TwoUser::of(&net).unwrap().c2();
        let (lo, hi) = if a <= b { (a * c2, b * c2) } else { (b * c2, a * c2) };
        let f = |r2| broadcast_outer_constraint(&net, r2).unwrap();
        prop_assert!(f(hi) <= f(lo) + 1e-12);
    }

    #[test]
    fn inr_threshold_grows_with_snr(db in -10.0..70.0_f64, step in 0.1..10.0_f64) {
        let a = inr_threshold(10f64.powf(db / 10.0)).unwrap();
        let b = inr_threshold(10f64.powf((db + step) / 10.0)).unwrap();
        prop_assert!(b.inr > a.inr);
        prop_assert!(b.h < a.h);
    }

    #[test]
    fn orderings_are_single_cycles(m in 2..7usize, seed in any::<u64>()) {
        let all = OrderingFunction::all(m);
        let pi = &all[(seed % all.len() as u64) as usize];
        for r in 0..m {
            prop_assert_eq!(pi.pow(r, m), r);
            let orbit: std::collections::BTreeSet<usize> = (0..m).map(|k| pi.pow(r, k)).collect();
            prop_assert_eq!(orbit.len(), m);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn vector_genie_structure(m in 2..7usize, seed in any::<u64>()) {
        let gains: Vec<f64> = (0..m * m).map(|k| ((seed >> (k % 60)) & 7) as f64 / 8.0 - 0.4).collect();
        let h = (0..m)
            .map(|r| (0..m).map(|t| if r == t { 1.0 } else { gains[r * m + t] }).collect())
            .collect();
        let net = InterferenceNetwork::new(h, vec![2.0; m]).unwrap();
        let all = OrderingFunction::all(m);
        let pi = &all[(seed % all.len() as u64) as usize];
        let g = build_vector_genie(&net, pi).unwrap();
        prop_assert!(g.last_signal_interference_free());
        prop_assert!(g.stacking_identity(&net));
        prop_assert_eq!(g.signals(0).len(), m - 1);
    }

    #[test]
    fn vector_genie_bounds_tin(net in network(3), pi in cycle(3)) {
        let v = vector_genie_sum_bound(&net, &pi).unwrap();
        prop_assert!(v >= m_user_tin_sum_rate(&net) - 1e-9);
        prop_assert!(network_outer_bound(&net).unwrap() <= v + 1e-12);
    }

    #[test]
    fn regions_are_ordered(net in weak_pair()) {
        let search = GenieSearch { rho_step: 0.1, eta_points: 9, points: 48, refine: None, ..GenieSearch::default() };
        let epi = epi_outer_region(&net, &search).unwrap();
        let hk = hk_gaussian_inner_region(&net, HkSplits { n1: 9, n2: 9 }).unwrap();
        let etw = etw_halfplanes(&net).unwrap();
        prop_assert!(hk.max_sum >= tin_sum_rate(&net).unwrap() - 1e-12);
        prop_assert!(epi.max_sum() >= hk.max_sum - 1e-9);
        let grid = region_grid(&net, 512).unwrap();
        for (i, &r1) in grid.iter().enumerate().step_by(16) {
            let outer = epi.r2_at(r1);
            if hk.region.r2[i].is_finite() {
                prop_assert!(hk.region.r2[i] <= outer + 1e-9, "HK above EPI at {}", r1);
            }
            let etw_r2 = etw.iter().fold(f64::INFINITY, |m, h| m.min(h.max_r2(r1)));
            if outer.is_finite() {
                prop_assert!(outer <= etw_r2 + 1e-9, "EPI above ETW at {}", r1);
            }
        }
    }
}
