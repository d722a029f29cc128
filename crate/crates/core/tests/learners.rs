mod common;

use common::{brute_g, brute_valid_states};
use fairres_core::cover::build_cover;
use fairres_core::environment::{generate_instance, CorrelationModel, ExperimentConfig, Instance, LossFamily};
use fairres_core::model::validate_state;
use fairres_core::oracle::Oracle;
use fairres_core::stochastic::{
    comparator, pseudo_regret, run_explore_exploit, run_ucb_general, run_ucb_m1, trace_csv, ExploreExploitParams,
    InitialPass, RunTrace, UcbParams,
};
use fairres_core::{Action, CriteriaState, IncompatibilityGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn brute_opt(inst: &Instance) -> (f64, CriteriaState) {
    let mut states = brute_valid_states(&inst.graph);
    states.sort();
    let mut best = (f64::INFINITY, CriteriaState::zeros(inst.graph.k()));
    for s in states {
        let v = brute_g(&inst.model, &s);
        if v < best.0 {
            best = (v, s);
        }
    }
    best
}

fn ee(horizon: usize) -> ExploreExploitParams {
    let mut p = ExploreExploitParams::new(horizon, 1.0);
    p.scale = 1.0;
    p
}

fn assert_valid(g: &IncompatibilityGraph, trace: &RunTrace) {
    for s in trace.distinct_states() {
        assert!(validate_state(g, s).unwrap());
    }
}

#[test]
fn explore_exploit_noiseless_picks_true_optimum() {
    for seed in 0..8 {
        let alpha = if seed % 2 == 0 { 0.0 } else { 0.5 };
        let inst = generate_instance(&ExperimentConfig::new(8 + seed as usize % 3, alpha, 10.0, seed)).unwrap();
        let cover = build_cover(&inst.graph, &inst.model).unwrap();
        let trace =
            run_explore_exploit(&inst.graph, &inst.model, LossFamily::Constant, &cover, &ee(20_000), &mut rng(seed))
                .unwrap();
        let (_, best) = brute_opt(&inst);
        assert_eq!(trace.meta.final_choice.as_deref(), Some(best.to_string().as_str()), "seed {seed}");
        assert_eq!(trace.state(trace.len() - 1), &best);
        // Flat regret once the exploit walk is done.
        let cmp = comparator(&inst.graph, &inst.model, 0).unwrap();
        let reg = pseudo_regret(&trace, &cmp);
        let settle = trace.meta.exploit_start.unwrap() + inst.graph.k();
        assert!(reg[settle..].windows(2).all(|w| (w[1] - w[0]).abs() < 1e-9));
        assert_valid(&inst.graph, &trace);
    }
}

#[test]
fn explore_phase_length() {
    let inst = generate_instance(&ExperimentConfig::new(10, 0.5, 10.0, 3)).unwrap();
    let cover = build_cover(&inst.graph, &inst.model).unwrap();
    let trace =
        run_explore_exploit(&inst.graph, &inst.model, LossFamily::Exponential, &cover, &ee(30_000), &mut rng(1)).unwrap();
    let (n, r) = (trace.meta.explore_steps.unwrap(), cover.len());
    let start = trace.meta.exploit_start.unwrap();
    let moves = (0..start).filter(|&t| trace.action(t) != Action::Null).count();
    assert_eq!(start, r * n + moves);
    assert!(moves <= r * inst.graph.k());
    assert_eq!(trace.len(), 30_000);
}

#[test]
fn single_vertex_explore_exploit_compares_both_states() {
    let g = IncompatibilityGraph::edgeless(vec![2.0]).unwrap();
    for (unfixed, fixed, want) in [(3.0, 1.0, "1"), (1.0, 3.0, "0")] {
        let model = CorrelationModel::singletons(&[unfixed], &[fixed]).unwrap();
        let cover = build_cover(&g, &model).unwrap();
        assert_eq!(cover.len(), 2);
        let trace = run_explore_exploit(&g, &model, LossFamily::Constant, &cover, &ee(2_000), &mut rng(0)).unwrap();
        assert_eq!(trace.state(trace.len() - 1).to_string(), want);
    }
}

#[test]
fn ucb_noiseless_settles_on_first_call() {
    for seed in 0..6 {
        let inst = generate_instance(&ExperimentConfig::new(9, 0.0, 10.0, seed)).unwrap();
        let mut p = UcbParams::new(5_000, 1.0);
        p.conf_scale = 0.0;
        let trace = run_ucb_m1(&inst.graph, &inst.model, LossFamily::Constant, &p, &mut rng(seed)).unwrap();
        let (_, best) = brute_opt(&inst);
        let start = trace.meta.exploit_start.unwrap();
        let arrive = (start..trace.len()).find(|&t| trace.state(t) == &best).unwrap();
        assert!((arrive..trace.len()).all(|t| trace.state(t) == &best), "seed {seed} switched away");
        assert!(arrive - start <= inst.graph.k());
    }
}

#[test]
fn ucb_general_noiseless_converges() {
    for seed in 0..6 {
        let inst = generate_instance(&ExperimentConfig::new(8, 1.0, 10.0, seed)).unwrap();
        let (_, best) = brute_opt(&inst);
        for initial in [InitialPass::Eager, InitialPass::Lazy] {
            let mut p = UcbParams::new(5_000, 1.0);
            p.conf_scale = 0.0;
            p.initial = initial;
            let trace = run_ucb_general(&inst.graph, &inst.model, LossFamily::Constant, &p, &mut rng(seed)).unwrap();
            if initial == InitialPass::Eager {
                assert_eq!(trace.state(trace.len() - 1), &best, "seed {seed}");
                let last = (0..trace.len()).rev().find(|&t| trace.action(t) != Action::Null).unwrap();
                assert!(last < trace.len() / 2, "still switching at {last}");
            }
            assert_valid(&inst.graph, &trace);
        }
    }
}

#[test]
fn oracle_call_bound_and_optimism() {
    for seed in 0..5 {
        let inst = generate_instance(&ExperimentConfig::new(10, 0.0, 10.0, seed)).unwrap();
        let horizon = 20_000;
        let mut p = UcbParams::new(horizon, 1.0);
        p.audit = true;
        let trace = run_ucb_m1(&inst.graph, &inst.model, LossFamily::Constant, &p, &mut rng(seed)).unwrap();
        let k = 10.0;
        assert!(trace.meta.oracle_calls as f64 <= k + 1.0 + 2.0 * k * (horizon as f64).log2());
        assert!(trace.meta.optimism_checks > 0);
        assert_eq!(trace.meta.optimism_violations, 0);
        assert_eq!(trace.len(), horizon);
    }
}

#[test]
fn runs_are_deterministic() {
    let inst = generate_instance(&ExperimentConfig::new(10, 0.5, 10.0, 2)).unwrap();
    let cover = build_cover(&inst.graph, &inst.model).unwrap();
    let p = UcbParams::new(4_000, 1.0);
    let a = run_ucb_general(&inst.graph, &inst.model, LossFamily::Exponential, &p, &mut rng(5)).unwrap();
    let b = run_ucb_general(&inst.graph, &inst.model, LossFamily::Exponential, &p, &mut rng(5)).unwrap();
    assert_eq!(trace_csv(&a, &[]), trace_csv(&b, &[]));
    let c = run_explore_exploit(&inst.graph, &inst.model, LossFamily::Exponential, &cover, &ee(8_000), &mut rng(5)).unwrap();
    let d = run_explore_exploit(&inst.graph, &inst.model, LossFamily::Exponential, &cover, &ee(8_000), &mut rng(5)).unwrap();
    assert_eq!(trace_csv(&c, &[]), trace_csv(&d, &[]));
}

#[test]
fn m1_engines_agree_across_oracles() {
    let inst = generate_instance(&ExperimentConfig::new(7, 0.0, 10.0, 8)).unwrap();
    for oracle in [Oracle::Exact, Oracle::Lp, Oracle::Local] {
        let mut p = UcbParams::new(3_000, 1.0);
        p.oracle = oracle;
        let a = run_ucb_m1(&inst.graph, &inst.model, LossFamily::Exponential, &p, &mut rng(1)).unwrap();
        let b = run_ucb_general(&inst.graph, &inst.model, LossFamily::Exponential, &p, &mut rng(1)).unwrap();
        assert_eq!(trace_csv(&a, &[]), trace_csv(&b, &[]));
    }
}

#[test]
fn regret_is_flat_once_settled() {
    let g = IncompatibilityGraph::edgeless(vec![1.0, 1.0]).unwrap();
    let model = CorrelationModel::singletons(&[1.5, 1.0], &[1.0, 1.0]).unwrap();
    let cmp = comparator(&g, &model, 0).unwrap();
    assert_eq!(cmp.state.to_string(), "10");
    assert!(!cmp.approximate);
    let mut p = UcbParams::new(50, 1.0);
    p.conf_scale = 0.0;
    let trace = run_ucb_m1(&g, &model, LossFamily::Constant, &p, &mut rng(0)).unwrap();
    let reg = pseudo_regret(&trace, &cmp);
    let start = trace.meta.exploit_start.unwrap() + 2;
    assert!(reg[start..].windows(2).all(|w| (w[1] - w[0]).abs() < 1e-12));
}
