//! Property tests over seeded random instances.

use endowed::equilibrium::{
    demand_set, is_maximal, profit, verify_endowed_equilibrium, welfare,
};
use endowed::instances::{gen_random_graph, gen_random_subadditive, gen_random_submodular};
use endowed::local_search::{
    is_local_optimum, local_search, marginal_prices, second_highest_marginal_prices,
};
use endowed::lp::{
    endowment_gap_instance, find_supporting_prices, integral_opt, is_supported_lp, min_supporting_alpha,
    solve_config_lp, PriceSearch,
};
use endowed::rational::q;
use endowed::valuations::Valuation;
use endowed::{Allocation, Bundle, Instance, PriceVector, Rational};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn instance(seed: u64, n: usize, m: usize) -> Instance {
    if seed.is_multiple_of(2) {
        gen_random_submodular(seed, n, m).unwrap()
    } else {
        gen_random_subadditive(seed, n, m).unwrap()
    }
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (0i64..40, 1i64..9).prop_map(|(a, b)| q(a, b))
}

fn alpha_at_least_one() -> impl Strategy<Value = Rational> {
    (0i64..24, 1i64..7).prop_map(|(a, b)| Rational::one() + q(a, b))
}

fn allocation_from(owners: &[u8], n: usize) -> Allocation {
    Allocation::new(owners.iter().map(|&o| ((o as usize) < n).then_some(o as usize)).collect()).unwrap()
}

fn endowed_instance(inst: &Instance, a: &Allocation, alpha: &Rational) -> Instance {
    inst.endowed(a, alpha).unwrap()
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn endow_matches_its_formula(seed in any::<u64>(), m in 1usize..=6, s in any::<u32>(), alpha in small_rational()) {
        let inst = instance(seed, 1, m);
        let v = inst.player(0);
        let s = Bundle::from_bits(s).intersection(Bundle::full(m));
        let e = v.endow(s, alpha.clone()).unwrap();
        for t in Bundle::all(m) {
            let expect = v.eval(t).unwrap() + (&alpha - Rational::one()) * v.eval(s.intersection(t)).unwrap();
            prop_assert_eq!(e.eval(t).unwrap(), expect);
        }
    }

    #[test]
    fn endow_at_one_or_empty_is_identity(seed in any::<u64>(), m in 1usize..=6, s in any::<u32>(), alpha in small_rational()) {
        let v = instance(seed, 1, m).player(0).clone();
        let s = Bundle::from_bits(s).intersection(Bundle::full(m));
        prop_assert_eq!(v.endow(s, Rational::one()).unwrap().table(), v.table());
        prop_assert_eq!(v.endow(Bundle::EMPTY, alpha).unwrap().table(), v.table());
    }

    #[test]
    fn endowed_submodular_stays_submodular(seed in any::<u64>(), m in 1usize..=8, s in any::<u32>(), alpha in alpha_at_least_one()) {
        let v = gen_random_submodular(seed, 1, m).unwrap().player(0).clone();
        let s = Bundle::from_bits(s).intersection(Bundle::full(m));
        let e = v.endow(s, alpha).unwrap();
        prop_assert!(e.is_monotone().unwrap().holds());
        prop_assert!(e.is_submodular().unwrap().holds());
    }

    #[test]
    fn class_hierarchy(values in proptest::collection::vec(small_rational(), 1..=6), budget in small_rational(), seed in any::<u64>()) {
        let m = values.len();
        prop_assert!(Valuation::additive(values.clone()).unwrap().is_submodular().unwrap().holds());
        prop_assert!(Valuation::budget_additive(values.clone(), budget).unwrap().is_submodular().unwrap().holds());
        let graph = gen_random_graph(seed, m).unwrap();
        prop_assert!(Valuation::graph_cut(graph).unwrap().is_submodular().unwrap().holds());
        let clauses = vec![values.clone(), values.iter().rev().cloned().collect()];
        prop_assert!(Valuation::xos(m, clauses).unwrap().is_subadditive().unwrap().holds());
        prop_assert!(Valuation::unit_demand(values).unwrap().is_submodular().unwrap().holds());
    }

    #[test]
    fn perturbing_keeps_subadditivity(seed in any::<u64>(), m in 1usize..=6, bonus in small_rational()) {
        let v = gen_random_subadditive(seed | 1, 1, m).unwrap().player(0).clone();
        prop_assert!(v.is_subadditive().unwrap().holds());
        prop_assert!(v.perturb(bonus).unwrap().is_subadditive().unwrap().holds());
    }

    #[test]
    fn json_round_trip_is_byte_identical(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=5) {
        let inst = instance(seed, n, m);
        let text = serde_json::to_string(&inst).unwrap();
        let back: Instance = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn routes_agree(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=4, owners in proptest::collection::vec(0u8..4, 4), alpha in alpha_at_least_one()) {
        let inst = instance(seed, n, m);
        let a = allocation_from(&owners[..m], n);
        let lp = is_supported_lp(&inst, &a, &alpha).unwrap();
        match find_supporting_prices(&inst, &a, &alpha).unwrap() {
            PriceSearch::Feasible(p) => {
                prop_assert!(lp);
                let cert = verify_endowed_equilibrium(&inst, &a, &p, &alpha).unwrap();
                prop_assert!(cert.is_valid());
                // A certificate survives any larger intensity.
                let cert = verify_endowed_equilibrium(&inst, &a, &p, &(&alpha + Rational::one())).unwrap();
                prop_assert!(cert.is_valid());
            }
            PriceSearch::Infeasible => prop_assert!(!lp),
        }
        if lp {
            prop_assert!(is_supported_lp(&inst, &a, &(&alpha + q(1, 2))).unwrap());
            // Supported allocations approximate the fractional optimum.
            let lp_value = solve_config_lp(&inst).unwrap();
            prop_assert!(&alpha * welfare(&inst, &a).unwrap() >= *lp_value.objective());
        }
    }

    #[test]
    fn non_maximal_is_never_supported(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=5, owners in proptest::collection::vec(0u8..4, 5), alpha in alpha_at_least_one()) {
        let inst = instance(seed, n, m);
        let a = allocation_from(&owners[..m], n);
        if !is_maximal(&inst, &a).unwrap() {
            prop_assert!(!is_supported_lp(&inst, &a, &alpha).unwrap());
            prop_assert!(!min_supporting_alpha(&inst, &a).unwrap().is_supportable());
        }
    }

    #[test]
    fn valid_allocations_maximize_endowed_welfare(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=5, owners in proptest::collection::vec(0u8..4, 5), alpha in alpha_at_least_one()) {
        let inst = instance(seed, n, m);
        let a = allocation_from(&owners[..m], n);
        if let PriceSearch::Feasible(_) = find_supporting_prices(&inst, &a, &alpha).unwrap() {
            let endowed = endowed_instance(&inst, &a, &alpha);
            let (best, _) = integral_opt(&endowed).unwrap();
            prop_assert_eq!(welfare(&endowed, &a).unwrap(), best);
        }
    }

    #[test]
    fn weak_endowment_supports_only_welfare_maxima(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=4, owners in proptest::collection::vec(0u8..4, 4), num in 1i64..=4) {
        let inst = instance(seed, n, m);
        let a = allocation_from(&owners[..m], n);
        let alpha = q(num, 4);
        if let PriceSearch::Feasible(_) = find_supporting_prices(&inst, &a, &alpha).unwrap() {
            let (best, _) = integral_opt(&inst).unwrap();
            prop_assert_eq!(welfare(&inst, &a).unwrap(), best);
        }
    }

    #[test]
    fn zero_endowment_forces_free_items(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=4, owners in proptest::collection::vec(0u8..4, 4)) {
        let inst = instance(seed, n, m);
        let a = allocation_from(&owners[..m], n);
        if let PriceSearch::Feasible(p) = find_supporting_prices(&inst, &a, &Rational::zero()).unwrap() {
            prop_assert!(p.as_slice().iter().all(Rational::is_zero));
            let full = Bundle::full(m);
            for (i, s) in a.bundles(n).into_iter().enumerate() {
                prop_assert_eq!(inst.player(i).value(full), inst.player(i).value(s));
            }
        }
    }

    #[test]
    fn lp_bounds_integral_and_walrasian_iff_no_gap(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=4) {
        let inst = instance(seed, n, m);
        let lp = solve_config_lp(&inst).unwrap();
        let (opt, a) = integral_opt(&inst).unwrap();
        prop_assert!(*lp.objective() >= opt);
        let walrasian = matches!(find_supporting_prices(&inst, &a, &Rational::one()).unwrap(), PriceSearch::Feasible(_));
        prop_assert_eq!(walrasian, *lp.objective() == opt);
    }

    #[test]
    fn endowment_gap_dominates_integrality_gap(seed in any::<u64>(), n in 1usize..=2, m in 1usize..=4) {
        let inst = instance(seed, n, m);
        let report = endowment_gap_instance(&inst).unwrap();
        prop_assert!(report.endowment_gap.at_least(&report.integrality_gap));
    }
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn local_optima_are_supported_by_marginal_prices(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=6) {
        let inst = gen_random_submodular(seed & !1, n, m).unwrap();
        let (o, trace) = local_search(&inst, &Allocation::empty(m)).unwrap();
        prop_assert!(is_local_optimum(&inst, &o).unwrap().holds());
        let p = marginal_prices(&inst, &o).unwrap();
        prop_assert!(verify_endowed_equilibrium(&inst, &o, &p, &q(2, 1)).unwrap().is_valid());

        let lp = solve_config_lp(&inst).unwrap();
        prop_assert!(q(2, 1) * welfare(&inst, &o).unwrap() >= *lp.objective());

        let mut a = trace.initial.clone();
        let mut w = welfare(&inst, &a).unwrap();
        for mv in &trace.moves {
            a.set_owner(mv.item, Some(mv.to));
            let next = welfare(&inst, &a).unwrap();
            prop_assert!(next > w);
            prop_assert_eq!(&next - &w, mv.delta.clone());
            w = next;
        }
        prop_assert_eq!(a, o);
    }

    #[test]
    fn price_sandwich(seed in any::<u64>(), n in 2usize..=3, m in 1usize..=6, mix in proptest::collection::vec(0i64..=4, 6)) {
        let inst = gen_random_submodular(seed & !1, n, m).unwrap();
        let (o, _) = local_search(&inst, &Allocation::empty(m)).unwrap();
        let hi = marginal_prices(&inst, &o).unwrap();
        let lo = second_highest_marginal_prices(&inst, &o).unwrap();
        prop_assert!(lo.dominated_by(&hi));
        let mid: Vec<Rational> = (0..m)
            .map(|j| lo.get(j) + (hi.get(j) - lo.get(j)) * q(mix[j], 4))
            .collect();
        let mid = PriceVector::new(mid).unwrap();
        prop_assert!(verify_endowed_equilibrium(&inst, &o, &mid, &q(2, 1)).unwrap().is_valid());
    }

    #[test]
    fn keeping_items_beats_discarding(seed in any::<u64>(), m in 1usize..=6, s in any::<u32>(), alpha in alpha_at_least_one()) {
        let v = gen_random_submodular(seed & !1, 1, m).unwrap().player(0).clone();
        let s = Bundle::from_bits(s).intersection(Bundle::full(m));
        let alpha = alpha + Rational::one();
        let mut p = vec![Rational::zero(); m];
        for j in s.items() {
            p[j] = v.marginal(Bundle::singleton(j), s.without(j)).unwrap();
        }
        let p = PriceVector::new(p).unwrap();
        let e = v.endow(s, alpha).unwrap();
        for t in Bundle::all(m) {
            prop_assert!(profit(&e, t, &p).unwrap() <= profit(&e, t.union(s), &p).unwrap());
        }
    }

    #[test]
    fn local_optimum_never_gains_by_adding(seed in any::<u64>(), n in 2usize..=3, m in 1usize..=6, alpha in alpha_at_least_one()) {
        let inst = gen_random_submodular(seed & !1, n, m).unwrap();
        let (o, _) = local_search(&inst, &Allocation::empty(m)).unwrap();
        let p = marginal_prices(&inst, &o).unwrap();
        for (i, own) in o.bundles(n).into_iter().enumerate() {
            let e = inst.player(i).endow(own, alpha.clone()).unwrap();
            let base = profit(&e, own, &p).unwrap();
            for t in Bundle::all(m) {
                prop_assert!(profit(&e, own.union(t), &p).unwrap() <= base);
            }
        }
    }

    #[test]
    fn demand_set_holds_exactly_the_maximizers(seed in any::<u64>(), m in 1usize..=6, prices in proptest::collection::vec(small_rational(), 6)) {
        let v = instance(seed, 1, m).player(0).clone();
        let p = PriceVector::new(prices[..m].to_vec()).unwrap();
        let profits: Vec<Rational> = Bundle::all(m).map(|t| profit(&v, t, &p).unwrap()).collect();
        let best = profits.iter().max().unwrap();
        let expect: Vec<Bundle> = Bundle::all(m).zip(&profits).filter(|(_, x)| *x == best).map(|(t, _)| t).collect();
        prop_assert_eq!(demand_set(&v, &p).unwrap(), expect);
    }
}
