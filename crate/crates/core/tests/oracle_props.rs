mod common;

use common::{brute_g, brute_valid_states, random_graph, random_model};
use fairres_core::environment::{generate_instance, CorrelationModel, ExperimentConfig};
use fairres_core::oracle::{
    best_state_exact, best_state_local_search, local_search_from, lp_best_state_m1, random_valid_state,
    MeanFunction, VertexCosts,
};
use fairres_core::CriteriaState;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest value and the lexicographically first state attaining it.
fn brute_best(g: &fairres_core::IncompatibilityGraph, model: &CorrelationModel) -> (f64, CriteriaState) {
    let mut states = brute_valid_states(g);
    states.sort();
    let mut best = (f64::INFINITY, CriteriaState::zeros(g.k()));
    for s in states {
        let v = brute_g(model, &s);
        if v < best.0 {
            best = (v, s);
        }
    }
    best
}

fn m1_instance(seed: u64, k: usize) -> (fairres_core::IncompatibilityGraph, CorrelationModel) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(k, rng.random_range(0.1..0.6), &mut rng);
    (g, random_model(k, 1, 0, &mut rng))
}

#[test]
fn exact_agrees_with_brute_force() {
    for seed in 0..40 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=10);
        let g = random_graph(k, 0.3, &mut rng);
        let model = random_model(k, 3, k, &mut rng);
        let (value, state) = brute_best(&g, &model);
        let got = best_state_exact(&g, &model).unwrap();
        assert_eq!(got, state, "seed {seed}");
        assert!((brute_g(&model, &got) - value).abs() < 1e-12);
    }
}

#[test]
fn lp_properties_on_random_m1_instances() {
    for seed in 0..200 {
        let k = 1 + (seed as usize % 18);
        let (g, model) = m1_instance(seed, k);
        let (costs, offset) = VertexCosts::from_separable(&model).unwrap();
        assert_eq!(offset, 0.0);
        let lp = lp_best_state_m1(&g, &costs).unwrap();
        for &y in &lp.y {
            assert!([0.0, 0.5, 1.0].iter().any(|h| (y - h).abs() < 1e-9), "y = {y}");
        }
        for &(a, b) in g.edges() {
            assert!(lp.y[a] + lp.y[b] >= 1.0 - 1e-9);
        }
        assert!(fairres_core::model::validate_state(&g, &lp.state).unwrap());
        let (opt, _) = brute_best(&g, &model);
        let rounded = brute_g(&model, &lp.state);
        assert!(lp.lp_value <= opt + 1e-9, "seed {seed}: LP {} > opt {opt}", lp.lp_value);
        assert!(rounded <= 2.0 * opt + 1e-9, "seed {seed}: rounded {rounded} > 2 opt {opt}");
        assert!(rounded <= 2.0 * lp.lp_value + 1e-9);
    }
}

#[test]
fn lp_with_fixing_costs_bounds_its_own_objective() {
    for seed in 0..50 {
        let (g, model) = m1_instance(500 + seed, 10);
        let (costs, _) = VertexCosts::from_separable(&model).unwrap();
        let costs = costs.with_fixing_costs(&g);
        let lp = lp_best_state_m1(&g, &costs).unwrap();
        let opt = brute_valid_states(&g).iter().map(|s| costs.objective(s)).fold(f64::INFINITY, f64::min);
        assert!(lp.lp_value <= opt + 1e-9);
        assert!(costs.objective(&lp.state) <= 2.0 * lp.lp_value + 1e-9);
    }
}

#[test]
fn lp_triangle_rounding_within_factor_two() {
    let g = fairres_core::IncompatibilityGraph::new(3, vec![1.0; 3], &[(0, 1), (0, 2), (1, 2)]).unwrap();
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_model(3, 1, 0, &mut rng);
        let (costs, _) = VertexCosts::from_separable(&model).unwrap();
        let lp = lp_best_state_m1(&g, &costs).unwrap();
        let exact = best_state_exact(&g, &model).unwrap();
        assert!(brute_g(&model, &lp.state) <= 2.0 * brute_g(&model, &exact) + 1e-9);
    }
}

#[test]
fn local_search_quality_bar() {
    let mut good = 0;
    for seed in 0..100 {
        let k = 6 + (seed as usize % 7);
        let inst = generate_instance(&ExperimentConfig::new(k, 1.0, 10.0, seed)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let local = best_state_local_search(&inst.graph, &inst.model, 16, &mut rng).unwrap();
        let exact = best_state_exact(&inst.graph, &inst.model).unwrap();
        let (lv, ev) = (brute_g(&inst.model, &local), brute_g(&inst.model, &exact));
        assert!(lv >= ev - 1e-9);
        if lv <= 1.05 * ev + 1e-12 {
            good += 1;
        }
    }
    assert!(good >= 90, "only {good}/100 within 5%");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn descent_is_monotone_and_locally_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=10);
        let g = random_graph(k, 0.3, &mut rng);
        let model = random_model(k, 3, k, &mut rng);
        let start = random_valid_state(&g, &mut rng);
        let d = local_search_from(&g, &model, start).unwrap();
        prop_assert!(d.trace.windows(2).all(|w| w[1] < w[0]));
        prop_assert!((d.value - model.total(&d.state)).abs() < 1e-9);
        prop_assert!(fairres_core::model::validate_state(&g, &d.state).unwrap());
        // No single move improves.
        for v in 0..k {
            let mut s = d.state.clone();
            if s.get(v) {
                s.set(v, false);
            } else {
                s.set(v, true);
                for &w in g.neighbors(v) {
                    s.set(w, false);
                }
            }
            prop_assert!(brute_g(&model, &s) >= d.value - 1e-9 * (1.0 + d.value.abs()));
        }
    }

    #[test]
    fn local_search_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(9, 0.3, &mut rng);
        let model = random_model(9, 2, 6, &mut rng);
        let a = best_state_local_search(&g, &model, 5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let b = best_state_local_search(&g, &model, 5, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(a, b);
    }
}
