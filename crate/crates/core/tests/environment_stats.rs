mod common;

use common::{brute_mean, random_graph, random_model};
use fairres_core::environment::{
    generate_instance, sample_losses, CorrelationModel, ExperimentConfig, Instance, LossFamily,
};
use fairres_core::CriteriaState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sum of squared per-draw standard deviations for vertex `i` at `s`.
fn variance(model: &CorrelationModel, s: &CriteriaState, i: usize) -> f64 {
    model
        .sets()
        .iter()
        .filter(|set| set.members().contains(&i))
        .map(|set| set.theta_at(s).powi(2))
        .sum()
}

#[test]
fn empirical_means_within_three_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_graph(6, 0.3, &mut rng);
    let model = random_model(6, 3, 4, &mut rng);
    let states = fairres_core::model::enumerate_valid_states(&g, 22).unwrap();
    let draws = 100_000;
    for s in states.iter().take(4) {
        let mut sum = vec![0.0; 6];
        for _ in 0..draws {
            for (a, l) in sum.iter_mut().zip(sample_losses(&model, LossFamily::Exponential, s, &mut rng)) {
                *a += l;
            }
        }
        for i in 0..6 {
            let mean = sum[i] / draws as f64;
            let sigma = (variance(&model, s, i) / draws as f64).sqrt();
            let truth = brute_mean(&model, s, i);
            assert!((mean - truth).abs() <= 3.0 * sigma + 1e-12, "state {s} vertex {i}: {mean} vs {truth}");
        }
    }
}

#[test]
fn constant_family_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let model = random_model(5, 2, 3, &mut rng);
    let s = CriteriaState::from_fixed(5, &[1, 3]);
    let losses = sample_losses(&model, LossFamily::Constant, &s, &mut rng);
    for (i, l) in losses.iter().enumerate() {
        assert_eq!(*l, brute_mean(&model, &s, i));
    }
}

#[test]
fn generator_follows_protocol() {
    for (k, alpha, seed) in [(50, 0.5, 7), (100, 2.0, 1), (20, 0.0, 3)] {
        let cfg = ExperimentConfig::new(k, alpha, 10.0, seed);
        let inst = generate_instance(&cfg).unwrap();
        let pairs: Vec<_> = inst.model.sets().iter().filter(|s| s.members().len() == 2).collect();
        assert_eq!(pairs.len(), (alpha * k as f64).floor() as usize);
        assert_eq!(inst.model.sets().len(), k + pairs.len());
        let mut seen = std::collections::BTreeSet::new();
        for p in &pairs {
            assert!(seen.insert(p.members().to_vec()), "duplicate pair");
            let t = p.theta();
            assert!(t[1] == t[2] && t[1] > t[3]);
            assert!((t[0] - 10.0 * t[1]).abs() < 1e-12);
        }
        for s in inst.model.sets().iter().filter(|s| s.members().len() == 1) {
            let t = s.theta();
            assert!((0.0..=1.0).contains(&t[1]));
            assert!((t[0] - 10.0 * t[1]).abs() < 1e-12);
        }
        assert!(inst.graph.costs().iter().all(|c| (1.0..=5.0).contains(c)));
        assert_eq!(inst.model.m(), if alpha == 0.0 { 1 } else { 2 });
        let again = generate_instance(&cfg).unwrap();
        assert_eq!(inst.to_text(), again.to_text());
        assert_eq!(Instance::parse(&inst.to_text()).unwrap().to_text(), inst.to_text());
    }
}

#[test]
fn edge_density_near_target() {
    let k = 100;
    let mut edges = 0usize;
    for seed in 0..10 {
        edges += generate_instance(&ExperimentConfig::new(k, 0.0, 10.0, seed)).unwrap().graph.edges().len();
    }
    let p = 2.0 * (k as f64).ln() / k as f64;
    let n = 10.0 * (k * (k - 1) / 2) as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    assert!((edges as f64 - n * p).abs() < 4.0 * sd);
}
