//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use fairres_core::environment::{CorrelationModel, CorrelationSet};
use fairres_core::{CriteriaState, IncompatibilityGraph};
use rand::Rng;

pub fn random_graph<R: Rng>(k: usize, p: f64, rng: &mut R) -> IncompatibilityGraph {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let costs = (0..k).map(|_| rng.random_range(1.0..=5.0)).collect();
    IncompatibilityGraph::new(k, costs, &edges).unwrap()
}

/// Singletons for every vertex plus `extra` random sets of size 2..=m.
pub fn random_model<R: Rng>(k: usize, m: usize, extra: usize, rng: &mut R) -> CorrelationModel {
    let mut sets: Vec<CorrelationSet> = (0..k)
        .map(|i| CorrelationSet::new(vec![i], vec![rng.random_range(0.0..5.0), rng.random_range(0.0..2.0)]).unwrap())
        .collect();
    if m >= 2 && k >= 2 {
        for _ in 0..extra {
            let size = rng.random_range(2..=m.min(k));
            let mut members: Vec<usize> = Vec::new();
            while members.len() < size {
                let v = rng.random_range(0..k);
                if !members.contains(&v) {
                    members.push(v);
                }
            }
            let theta = (0..1usize << size).map(|_| rng.random_range(0.0..3.0)).collect();
            sets.push(CorrelationSet::new(members, theta).unwrap());
        }
    }
    CorrelationModel::new(k, sets).unwrap()
}

/// Every bit mask whose fixed vertices avoid all edges, ascending by mask value.
pub fn brute_valid_states(g: &IncompatibilityGraph) -> Vec<CriteriaState> {
    let k = g.k();
    (0u64..1 << k)
        .filter(|mask| g.edges().iter().all(|&(a, b)| !(mask >> a & 1 == 1 && mask >> b & 1 == 1)))
        .map(|mask| CriteriaState::from_bits((0..k).map(|v| mask >> v & 1 == 1).collect()))
        .collect()
}

/// `μ_i^s` straight from the θ tables.
pub fn brute_mean(model: &CorrelationModel, s: &CriteriaState, i: usize) -> f64 {
    let mut total = 0.0;
    for set in model.sets() {
        if !set.members().contains(&i) {
            continue;
        }
        let mut row = 0;
        for (t, &v) in set.members().iter().enumerate() {
            if s.get(v) {
                row |= 1 << t;
            }
        }
        total += set.theta()[row];
    }
    total
}

pub fn brute_g(model: &CorrelationModel, s: &CriteriaState) -> f64 {
    (0..model.k()).map(|i| brute_mean(model, s, i)).sum()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}
