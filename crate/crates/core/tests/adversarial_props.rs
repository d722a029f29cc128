mod common;

use common::{brute_valid_states, random_graph};
use fairres_core::adversarial::{
    competitive_ratio, flatten, offline_opt, run_barrier, run_naive_ski_rental, singleton_steps, star, Complaint,
};
use fairres_core::model::validate_state;
use fairres_core::{CriteriaState, IncompatibilityGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_steps<R: Rng>(k: usize, len: usize, b: f64, per_step: usize, rng: &mut R) -> Vec<Vec<Complaint>> {
    (0..len)
        .map(|_| {
            (0..rng.random_range(0..=per_step))
                .map(|_| Complaint::new(rng.random_range(0..k), rng.random_range(0.0..=b)))
                .collect()
        })
        .collect()
}

/// Minimum over every sequence of valid states, by exhaustive recursion.
fn brute_opt(g: &IncompatibilityGraph, steps: &[Vec<Complaint>]) -> f64 {
    let states = brute_valid_states(g);
    fn go(g: &IncompatibilityGraph, states: &[CriteriaState], steps: &[Vec<Complaint>], cur: &CriteriaState) -> f64 {
        let Some((step, rest)) = steps.split_first() else { return 0.0 };
        states
            .iter()
            .map(|next| {
                let fix: f64 = (0..g.k()).filter(|&v| next.get(v) && !cur.get(v)).map(|v| g.cost(v)).sum();
                let loss: f64 = step.iter().filter(|c| !next.get(c.vertex)).map(|c| c.loss).sum();
                fix + loss + go(g, states, rest, next)
            })
            .fold(f64::INFINITY, f64::min)
    }
    go(g, &states, steps, &CriteriaState::zeros(g.k()))
}

#[test]
fn dp_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let k = rng.random_range(1..=3);
        let g = random_graph(k, 0.5, &mut rng);
        let steps = random_steps(k, rng.random_range(0..=5), 3.0, 2, &mut rng);
        let dp = offline_opt(&g, &steps).unwrap();
        assert!((dp - brute_opt(&g, &steps)).abs() < 1e-9);
    }
}

#[test]
fn barrier_within_bound_on_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..200 {
        let b = if trial % 2 == 0 { 1.0 } else { 5.0 };
        let k = rng.random_range(1..=8);
        let g = random_graph(k, rng.random_range(0.0..0.6), &mut rng);
        let seq = flatten(&random_steps(k, rng.random_range(1..=60), b, 1, &mut rng));
        let run = run_barrier(&g, &seq).unwrap();
        let opt = offline_opt(&g, &singleton_steps(&seq)).unwrap();
        let ratio = competitive_ratio(run.total_loss, opt);
        assert!(ratio <= 2.0 * b + 4.0 + 1e-9, "trial {trial}: {} vs opt {opt}", run.total_loss);
    }
}

#[test]
fn edgeless_barrier_is_ski_rental() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let k = rng.random_range(1..=6);
        let costs: Vec<f64> = (0..k).map(|_| rng.random_range(1..=5) as f64).collect();
        let g = IncompatibilityGraph::edgeless(costs).unwrap();
        let seq: Vec<Complaint> =
            (0..rng.random_range(0..60)).map(|_| Complaint::new(rng.random_range(0..k), 1.0)).collect();
        let barrier = run_barrier(&g, &seq).unwrap().total_loss;
        assert_eq!(barrier, run_naive_ski_rental(&g, &seq).unwrap());
        let opt = offline_opt(&g, &singleton_steps(&seq)).unwrap();
        assert!(barrier <= 2.0 * opt + 1e-9);
    }
}

#[test]
fn star_stays_within_bound() {
    for (leaves, c) in [(3usize, 4.0), (5, 10.0), (8, 6.0)] {
        let g = star(leaves, c).unwrap();
        let mut seq = vec![Complaint::new(0, 1.0); c as usize];
        for leaf in 1..=leaves {
            seq.extend(vec![Complaint::new(leaf, 1.0); c as usize]);
        }
        let run = run_barrier(&g, &seq).unwrap();
        if leaves + 1 <= 12 {
            let opt = offline_opt(&g, &singleton_steps(&seq)).unwrap();
            assert!(run.total_loss <= 6.0 * opt);
        }
        // After the first leaf, the remaining barrier is small and each later leaf pays little.
        let first_leaf_end = 2 * c as usize;
        let later = run.total_loss - run.history[first_leaf_end - 1].cumulative;
        assert!(later <= (leaves - 1) as f64 * (c / 2.0 + 2.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn barrier_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=7);
        let g = random_graph(k, 0.5, &mut rng);
        let seq = flatten(&random_steps(k, 50, 2.0, 1, &mut rng));
        let run = run_barrier(&g, &seq).unwrap();
        let mut ever_fixed = vec![false; k];
        let mut state = CriteriaState::zeros(k);
        let mut prev = vec![0.0; k];
        for step in &run.history {
            if step.fixed {
                let i = step.complaint.vertex;
                ever_fixed[i] = true;
                prop_assert_eq!(step.kappa[i], g.cost(i));
                state.set(i, true);
                for &j in g.neighbors(i) {
                    state.set(j, false);
                }
            }
            prop_assert!(validate_state(&g, &state).unwrap());
            for v in 0..k {
                prop_assert!(step.kappa[v] >= 0.0 && step.kappa[v] <= g.cost(v));
                prop_assert!(step.kappa[v] == 0.0 || ever_fixed[v]);
                let refixed = step.fixed && step.complaint.vertex == v;
                prop_assert!(refixed || step.kappa[v] <= prev[v]);
            }
            prev = step.kappa.clone();
        }
        prop_assert_eq!(state, run.state);
        prop_assert!(run.tau.iter().all(|&t| t >= 0.0));
    }

    #[test]
    fn flattening_never_hurts_opt(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(1..=6);
        let g = random_graph(k, 0.4, &mut rng);
        let grouped = random_steps(k, 20, 3.0, 4, &mut rng);
        let flat = singleton_steps(&flatten(&grouped));
        prop_assert!(offline_opt(&g, &flat).unwrap() <= offline_opt(&g, &grouped).unwrap() + 1e-9);
    }
}
