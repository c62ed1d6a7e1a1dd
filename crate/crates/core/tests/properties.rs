use num_complex::Complex64;
use proptest::prelude::*;

use sharkovsky_core::cache::{canonical, format_record, parse_cache, parse_record, HEADER};
use sharkovsky_core::mandelbrot::{
    critical_orbit, complex_centers, trace_parameter_ray, CenterConfig, CenterRecord, CenterTags, RaySchedule,
};
use sharkovsky_core::orderings::{compare2, down_set_k, KOrder, Verdict};
use sharkovsky_core::star::{brute_force_periods, make_spiral_cycle, periods_from_markov};
use sharkovsky_core::vein::{
    chain_violations, explicit_chain, forced_order, spiral_sets_non_nested, ChainOutcome, Forcing, VeinSpec,
};

proptest! {
    #[test]
    fn sharkovsky_is_a_total_order(a in 1u64..5000, b in 1u64..5000, c in 1u64..5000) {
        let ab = compare2(a, b).unwrap();
        prop_assert_eq!(compare2(b, a).unwrap(), ab.reverse());
        prop_assert_ne!(ab, Verdict::Incomparable);
        prop_assert_eq!(ab == Verdict::Equal, a == b);
        if ab == Verdict::Greater && compare2(b, c).unwrap() == Verdict::Greater {
            prop_assert_eq!(compare2(a, c).unwrap(), Verdict::Greater);
        }
    }

    #[test]
    fn star_orders_are_strict_partial_orders(k in 2u64..9, a in 1u64..300, b in 1u64..300, c in 1u64..300) {
        let order = KOrder::new(k).unwrap();
        prop_assert!(!order.greater(a, a).unwrap());
        let ab = order.greater(a, b).unwrap();
        prop_assert!(!(ab && order.greater(b, a).unwrap()));
        if ab && order.greater(b, c).unwrap() {
            prop_assert!(order.greater(a, c).unwrap());
        }
    }

    #[test]
    fn down_sets_are_closed_and_monotone(k in 2u64..8, n in 1u64..80, m in 1u64..80) {
        let horizon = 100;
        let dn = down_set_k(k, n, horizon).unwrap();
        prop_assert!(dn.contains(n) && dn.contains(1));
        if dn.contains(m) {
            let dm = down_set_k(k, m, horizon).unwrap();
            prop_assert!(dm.is_subset(&dn));
        }
    }

    #[test]
    fn forcing_agrees_with_the_star_order(k in 2u64..8, l_seed in 0u64..7, n1 in 1u64..60, n2 in 1u64..60) {
        let l = 1 + l_seed % (k - 1);
        let v = VeinSpec::new(k, l, None).unwrap();
        prop_assume!(v.is_admissible(n1) && v.is_admissible(n2));
        let order = KOrder::new(k).unwrap();
        match forced_order(&v, n1, n2).unwrap() {
            Forcing::First => prop_assert!(order.greater(n1, n2).unwrap()),
            Forcing::Second => prop_assert!(order.greater(n2, n1).unwrap()),
            Forcing::Undetermined => prop_assert!(
                !v.is_principal() || matches!(order.compare(n1, n2).unwrap(), Verdict::Incomparable | Verdict::Equal)
            ),
        }
        prop_assert_eq!(forced_order(&v, n1, n2).unwrap() == Forcing::First, forced_order(&v, n2, n1).unwrap() == Forcing::Second);
    }

    #[test]
    fn cache_lines_round_trip(
        period in 1u32..13,
        re in -2.0f64..0.5,
        im in -1.5f64..1.5,
        residual in 0.0f64..1e-6,
        real_vein in any::<bool>(),
        limb in proptest::option::of((1u64..10, 2u64..11)),
        wake_tested in any::<bool>(),
    ) {
        let rec = CenterRecord { period, value: Complex64::new(re, im), residual_bound: residual, tags: CenterTags { real_vein, limb, wake_tested } };
        let line = format_record(&rec);
        let back = parse_record(&line).unwrap();
        prop_assert_eq!(format_record(&back), line.clone());
        prop_assert_eq!(canonical(&back), back);
        prop_assert!((back.value - rec.value).norm() <= 1e-14 * rec.value.norm().max(1e-300) * 4.0);
        let file = parse_cache(&format!("{HEADER}\n{line}\n"));
        prop_assert_eq!(file.records, vec![back]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spiral_period_sets_follow_the_star_order(k in 3usize..7, i in 1usize..4, l_seed in 0usize..5) {
        let l = 1 + l_seed % (k - 1);
        let n = i * k + l;
        let t = make_spiral_cycle(k, n).unwrap();
        prop_assert!(t.is_spiral_graph());
        let down = down_set_k(k as u64, n as u64, 40).unwrap();
        prop_assert_eq!(periods_from_markov(&t.markov_graph(), 40).unwrap().periods, down.clone());
        prop_assert_eq!(brute_force_periods(&t, 40).unwrap().periods, down);
    }

    #[test]
    fn distinct_veins_do_not_nest(k in 3u64..8, i in 1u64..4, l1 in 1u64..7, l2 in 1u64..7) {
        prop_assume!(l1 < k && l2 < k && l1 != l2);
        prop_assert!(spiral_sets_non_nested(k, i, l1, l2, 60).unwrap());
    }
}

#[test]
fn chains_extend_the_forcing_order() {
    let mut supported = 0;
    for k in 2..=8u64 {
        for l in 1..k {
            let v = VeinSpec::new(k, l, None).unwrap();
            if let ChainOutcome::Supported(chain) = explicit_chain(&v, 60).unwrap() {
                supported += 1;
                assert_eq!(chain_violations(&v, &chain).unwrap(), vec![], "({k}, {l})");
            }
        }
    }
    assert_eq!(supported, 8);
}

#[test]
fn chain_steps_are_realised_by_loops() {
    for (k, l) in [(4u64, 2u64), (3, 1), (6, 2)] {
        let v = VeinSpec::new(k, l, None).unwrap();
        let ChainOutcome::Supported(chain) = explicit_chain(&v, 60).unwrap() else { panic!() };
        let mut silent = Vec::new();
        for w in chain.periods().windows(2) {
            let (n1, n2) = (w[0], w[1]);
            if n2 % k == 0 || n1 % k == 0 {
                continue;
            }
            let t = make_spiral_cycle(k as usize, n1 as usize).unwrap();
            let periods = periods_from_markov(&t.markov_graph(), 60).unwrap().periods;
            if KOrder::new(k).unwrap().greater(n1, n2).unwrap() {
                assert!(periods.contains(n2), "({k}, {l}): {n2} missing below {n1}");
            } else {
                assert!(!periods.contains(n2));
                silent.push((n1 % k, n2 % k));
            }
        }
        // steps the star order leaves open: from the residue 2l triple back to the residue l chain
        assert!(silent.iter().all(|&r| r == (2 * l % k, l)), "({k}, {l}): {silent:?}");
        assert_eq!(silent.is_empty(), k == 2 * l);
    }
}

#[test]
fn centers_meet_residual_and_symmetry_bounds() {
    let cfg = CenterConfig::default();
    let digits = -cfg.precision.log10();
    for n in 1..=9 {
        let s = complex_centers(n, &cfg).unwrap();
        for r in &s.centers {
            assert!(r.residual_bound < 10f64.powf(-digits + 2.0), "period {n}: residual {}", r.residual_bound);
            let lower = (1..n).filter(|d| n % d == 0).map(|d| critical_orbit(r.value, d).0.norm()).fold(f64::INFINITY, f64::min);
            assert!(lower > cfg.separation);
            let mirrored = s.centers.iter().any(|q| (q.value - r.value.conj()).norm() < 1e-9);
            assert!(mirrored, "period {n}: {} has no conjugate", r.value);
        }
        assert_eq!(s, complex_centers(n, &cfg).unwrap());
    }
}

#[test]
fn traced_rays_descend_and_settle() {
    for (a, b) in [(1u64, 7u64), (2, 7), (1, 3), (9, 31), (5, 16)] {
        let t = trace_parameter_ray(num_rational::Ratio::new(a, b), &RaySchedule::default()).unwrap();
        assert!(t.landing_estimate.is_some(), "{a}/{b}: {:?}", t.diagnostic);
        assert!(t.potentials.windows(2).all(|w| w[1] < w[0]));
        assert!(t.final_step().unwrap() < 1e-3, "{a}/{b}: final step {:?}", t.final_step());
    }
}
