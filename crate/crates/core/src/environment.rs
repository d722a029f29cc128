//! Correlation-set loss model, loss sampling and synthetic instance generation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{parse_err, Error, Result};
use crate::model::{join_reals, CriteriaState, IncompatibilityGraph};

/// Sets with more members than this are rejected (their tables would have 2^m rows).
pub const MAX_SET_SIZE: usize = 16;

/// One correlation set and its per-configuration mean table.
///
/// Row `u` of `theta` is the per-vertex mean when `members[t]` is fixed exactly
/// for the bits `t` set in `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    members: Vec<usize>,
    theta: Vec<f64>,
}

impl CorrelationSet {
    pub fn new(mut members: Vec<usize>, theta: Vec<f64>) -> Result<Self> {
        members.sort_unstable();
        let before = members.len();
        members.dedup();
        if members.is_empty() || members.len() != before {
            return Err(Error::InvalidModel("sets must be nonempty with distinct members".into()));
        }
        if members.len() > MAX_SET_SIZE {
            return Err(Error::Capacity {
                what: "correlation set size",
                got: members.len(),
                limit: MAX_SET_SIZE,
            });
        }
        if theta.len() != 1 << members.len() {
            return Err(Error::InvalidModel(format!(
                "set of size {} needs {} theta entries, got {}",
                members.len(),
                1usize << members.len(),
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidModel("theta entries must be finite and non-negative".into()));
        }
        Ok(Self { members, theta })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// The mean this set contributes to each member in state `s`.
    pub fn theta_at(&self, s: &CriteriaState) -> f64 {
        self.theta[s.config_of(&self.members)]
    }
}

/// Collection of correlation sets over `k` criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationModel {
    k: usize,
    sets: Vec<CorrelationSet>,
    /// Indices of the sets containing each vertex.
    by_vertex: Vec<Vec<usize>>,
    /// Vertices sharing at least one set with each vertex, the vertex itself included.
    dependents: Vec<Vec<usize>>,
}

impl CorrelationModel {
    pub fn new(k: usize, sets: Vec<CorrelationSet>) -> Result<Self> {
        let mut by_vertex = vec![Vec::new(); k];
        for (idx, set) in sets.iter().enumerate() {
            for &v in set.members() {
                if v >= k {
                    return Err(Error::InvalidModel(format!(
                        "set {} references vertex {} > k = {k}",
                        idx + 1,
                        v + 1
                    )));
                }
                by_vertex[v].push(idx);
            }
        }
        let dependents = (0..k)
            .map(|v| {
                let mut deps: BTreeSet<usize> = BTreeSet::from([v]);
                for &idx in &by_vertex[v] {
                    deps.extend(sets[idx].members().iter().copied());
                }
                deps.into_iter().collect()
            })
            .collect();
        Ok(Self {
            k,
            sets,
            by_vertex,
            dependents,
        })
    }

    /// One singleton set per vertex with `theta = [unfixed, fixed]`.
    pub fn singletons(unfixed: &[f64], fixed: &[f64]) -> Result<Self> {
        let sets = unfixed
            .iter()
            .zip(fixed)
            .enumerate()
            .map(|(i, (&u, &f))| CorrelationSet::new(vec![i], vec![u, f]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(unfixed.len(), sets)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sets(&self) -> &[CorrelationSet] {
        &self.sets
    }

    /// Number of sets.
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Largest set size; 1 for a model with no sets.
    pub fn m(&self) -> usize {
        self.sets.iter().map(|s| s.members().len()).max().unwrap_or(1)
    }

    pub fn sets_containing(&self, v: usize) -> impl Iterator<Item = &CorrelationSet> {
        self.by_vertex[v].iter().map(move |&idx| &self.sets[idx])
    }

    /// Whether `v` belongs to any set.
    pub fn touches(&self, v: usize) -> bool {
        !self.by_vertex[v].is_empty()
    }

    /// `v` together with every vertex it shares a set with, ascending.
    pub fn local_vertices(&self, v: usize) -> &[usize] {
        &self.dependents[v]
    }

    pub fn is_singleton_only(&self) -> bool {
        self.sets.iter().all(|s| s.members().len() == 1)
    }

    /// Expected loss of vertex `i` in state `s`.
    pub fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        self.sets_containing(i).map(|set| set.theta_at(s)).sum()
    }
}

/// Per-vertex expected losses in state `s`.
pub fn mean_loss_vector(model: &CorrelationModel, s: &CriteriaState) -> Vec<f64> {
    let mut mu = vec![0.0; model.k()];
    for set in model.sets() {
        let theta = set.theta_at(s);
        for &v in set.members() {
            mu[v] += theta;
        }
    }
    mu
}

/// Expected per-step total loss of staying in `s`.
pub fn g(model: &CorrelationModel, s: &CriteriaState) -> f64 {
    mean_loss_vector(model, s).iter().sum()
}

/// Distribution of a single (vertex, set) loss draw with mean `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum LossFamily {
    #[default]
    Exponential,
    /// Exponential draws truncated at `cap`; the mean shifts down slightly.
    ClippedExponential { cap: f64 },
    Constant,
}

impl LossFamily {
    fn draw<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        if theta == 0.0 {
            return 0.0;
        }
        match *self {
            LossFamily::Constant => theta,
            LossFamily::Exponential => {
                let x: f64 = Exp1.sample(rng);
                theta * x
            }
            LossFamily::ClippedExponential { cap } => {
                let x: f64 = Exp1.sample(rng);
                (theta * x).min(cap)
            }
        }
    }
}

/// Draws one loss per vertex: for each set containing the vertex, one
/// independent draw with the set's configuration mean, summed.
pub fn sample_losses<R: Rng + ?Sized>(
    model: &CorrelationModel,
    family: LossFamily,
    s: &CriteriaState,
    rng: &mut R,
) -> Vec<f64> {
    let mut losses = vec![0.0; model.k()];
    sample_losses_into(model, family, s, rng, &mut losses);
    losses
}

pub(crate) fn sample_losses_into<R: Rng + ?Sized>(
    model: &CorrelationModel,
    family: LossFamily,
    s: &CriteriaState,
    rng: &mut R,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for set in model.sets() {
        let theta = set.theta_at(s);
        for &v in set.members() {
            out[v] += family.draw(theta, rng);
        }
    }
}

/// Parameters of the synthetic Erdős–Rényi instance generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub k: usize,
    /// Pair sets per vertex on average; `floor(alpha * k)` pairs are drawn.
    #[serde(default)]
    pub alpha: f64,
    /// Multiplier applied to the all-unfixed configuration, must exceed 1.
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "default_cost_range")]
    pub cost_range: (f64, f64),
    /// Edge probability; defaults to `2 ln k / k` (capped at 1).
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_lambda() -> f64 {
    10.0
}

fn default_cost_range() -> (f64, f64) {
    (1.0, 5.0)
}

impl ExperimentConfig {
    pub fn new(k: usize, alpha: f64, lambda: f64, seed: u64) -> Self {
        Self {
            k,
            alpha,
            lambda,
            cost_range: default_cost_range(),
            p: None,
            seed,
        }
    }

    pub fn edge_probability(&self) -> f64 {
        self.p.unwrap_or_else(|| {
            if self.k <= 2 {
                1.0
            } else {
                (2.0 * (self.k as f64).ln() / self.k as f64).min(1.0)
            }
        })
    }

    pub fn pair_count(&self) -> usize {
        (self.alpha * self.k as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.lambda > 1.0) {
            return Err(Error::Config(format!("lambda must be > 1, got {}", self.lambda)));
        }
        let p = self.edge_probability();
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Config(format!("edge probability must be in (0, 1], got {p}")));
        }
        let (lo, hi) = self.cost_range;
        if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Config(format!("bad cost range [{lo}, {hi}]")));
        }
        let available = self.k * (self.k - 1) / 2;
        if self.pair_count() > available {
            return Err(Error::Config(format!(
                "alpha * k = {} pairs requested but only {available} distinct pairs exist",
                self.pair_count()
            )));
        }
        Ok(())
    }
}

/// Provenance recorded alongside a generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub config: Option<ExperimentConfig>,
    pub connected: bool,
}

/// A graph plus its correlation model.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: IncompatibilityGraph,
    pub model: CorrelationModel,
    pub meta: InstanceMeta,
}

impl Instance {
    pub fn new(graph: IncompatibilityGraph, model: CorrelationModel) -> Result<Self> {
        if graph.k() != model.k() {
            return Err(Error::Dimension {
                expected: graph.k(),
                got: model.k(),
            });
        }
        let connected = graph.is_connected();
        Ok(Self {
            graph,
            model,
            meta: InstanceMeta {
                config: None,
                connected,
            },
        })
    }
}

/// Samples a synthetic instance; a pure function of `cfg` (seed included).
///
/// Edges are i.i.d. with probability `p`, costs uniform on `cost_range`. Every
/// vertex gets a singleton set with fixed mean `γ ~ Beta(½,½)` and unfixed
/// mean `λγ`. Then `⌊αk⌋` distinct random pairs get tables
/// `(1,1) → γ¹¹`, `(1,0),(0,1) → γ¹⁰`, `(0,0) → λγ¹⁰` with `γ¹⁰ > γ¹¹`.
pub fn generate_instance(cfg: &ExperimentConfig) -> Result<Instance> {
    cfg.validate()?;
    let k = cfg.k;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let p = cfg.edge_probability();

    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let (lo, hi) = cfg.cost_range;
    let costs: Vec<f64> = (0..k)
        .map(|_| if hi > lo { rng.random_range(lo..=hi) } else { lo })
        .collect();
    let graph = IncompatibilityGraph::new(k, costs, &edges)?;

    let beta = Beta::new(0.5, 0.5).expect("valid beta parameters");
    let mut sets = Vec::with_capacity(k + cfg.pair_count());
    for i in 0..k {
        let gamma: f64 = beta.sample(&mut rng);
        sets.push(CorrelationSet::new(vec![i], vec![cfg.lambda * gamma, gamma])?);
    }

    let mut chosen = BTreeSet::new();
    let mut pairs = Vec::with_capacity(cfg.pair_count());
    while pairs.len() < cfg.pair_count() {
        let picked = sample_indices(&mut rng, k, 2);
        let (a, b) = (picked.index(0), picked.index(1));
        let pair = (a.min(b), a.max(b));
        if chosen.insert(pair) {
            pairs.push(pair);
        }
    }
    for (i, j) in pairs {
        let (one_fixed, both_fixed) = loop {
            let x: f64 = beta.sample(&mut rng);
            let y: f64 = beta.sample(&mut rng);
            if x != y {
                break (x.max(y), x.min(y));
            }
        };
        // Row index: bit 0 = i fixed, bit 1 = j fixed.
        let theta = vec![cfg.lambda * one_fixed, one_fixed, one_fixed, both_fixed];
        sets.push(CorrelationSet::new(vec![i, j], theta)?);
    }
    let model = CorrelationModel::new(k, sets)?;
    let connected = graph.is_connected();
    Ok(Instance {
        graph,
        model,
        meta: InstanceMeta {
            config: Some(cfg.clone()),
            connected,
        },
    })
}

impl Instance {
    /// Renders the instance file: `[graph]`, `[sets]` and `[meta]` sections.
    ///
    /// Set lines read `members : theta...` with 1-indexed members and theta
    /// rows ordered by configuration index. Reals use shortest round-trip form.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# fairres instance\n[graph]\n");
        out.push_str(&self.graph.to_text());
        out.push_str("[sets]\n");
        for set in self.model.sets() {
            let members: Vec<String> = set.members().iter().map(|v| (v + 1).to_string()).collect();
            let _ = writeln!(out, "{} : {}", members.join(" "), join_reals(set.theta()));
        }
        out.push_str("[meta]\n");
        let _ = writeln!(out, "connected = {}", self.meta.connected);
        if let Some(cfg) = &self.meta.config {
            let _ = writeln!(out, "seed = {}", cfg.seed);
            let _ = writeln!(out, "k = {}", cfg.k);
            let _ = writeln!(out, "alpha = {}", cfg.alpha);
            let _ = writeln!(out, "lambda = {}", cfg.lambda);
            let _ = writeln!(out, "cost_range = {} {}", cfg.cost_range.0, cfg.cost_range.1);
            if let Some(p) = cfg.p {
                let _ = writeln!(out, "p = {p}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Graph,
            Sets,
            Meta,
        }
        let mut section = Section::None;
        let mut graph_lines = Vec::new();
        let mut set_lines = Vec::new();
        let mut meta = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let n = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            match line {
                "" => continue,
                "[graph]" => section = Section::Graph,
                "[sets]" => section = Section::Sets,
                "[meta]" => section = Section::Meta,
                _ => match section {
                    Section::Graph => graph_lines.push((n, line)),
                    Section::Sets => set_lines.push((n, line)),
                    Section::Meta => {
                        let (key, value) = line
                            .split_once('=')
                            .ok_or_else(|| parse_err(n, format!("expected `key = value`, got {line:?}")))?;
                        meta.push((n, key.trim(), value.trim()));
                    }
                    Section::None => return Err(parse_err(n, "content before the first section")),
                },
            }
        }
        let graph = IncompatibilityGraph::parse_lines(graph_lines.into_iter())?;
        let mut sets = Vec::with_capacity(set_lines.len());
        for (n, line) in set_lines {
            let (lhs, rhs) = line
                .split_once(':')
                .ok_or_else(|| parse_err(n, "expected `members : theta...`"))?;
            let members = lhs
                .split_whitespace()
                .map(|t| match t.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(parse_err(n, format!("bad member {t:?}"))),
                })
                .collect::<Result<Vec<_>>>()?;
            let theta = rhs
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| parse_err(n, format!("bad theta {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            // Rows are keyed by member order as written; sorting must not reorder them.
            let mut sorted = members.clone();
            sorted.sort_unstable();
            if sorted != members {
                return Err(parse_err(n, "set members must be listed in ascending order"));
            }
            sets.push(CorrelationSet::new(members, theta).map_err(|e| parse_err(n, e.to_string()))?);
        }
        let model = CorrelationModel::new(graph.k(), sets)?;
        let mut instance = Instance::new(graph, model)?;

        let mut cfg = ExperimentConfig::new(instance.graph.k(), 0.0, default_lambda(), 0);
        let mut has_cfg = false;
        for (n, key, value) in meta {
            let bad = || parse_err(n, format!("bad value for {key}: {value:?}"));
            match key {
                "connected" => {
                    instance.meta.connected = value.parse().map_err(|_| bad())?;
                }
                "seed" => cfg.seed = value.parse().map_err(|_| bad())?,
                "k" => cfg.k = value.parse().map_err(|_| bad())?,
                "alpha" => cfg.alpha = value.parse().map_err(|_| bad())?,
                "lambda" => cfg.lambda = value.parse().map_err(|_| bad())?,
                "p" => cfg.p = Some(value.parse().map_err(|_| bad())?),
                "cost_range" => {
                    let parts: Vec<f64> = value
                        .split_whitespace()
                        .map(|t| t.parse().map_err(|_| bad()))
                        .collect::<Result<_>>()?;
                    if parts.len() != 2 {
                        return Err(bad());
                    }
                    cfg.cost_range = (parts[0], parts[1]);
                }
                _ => return Err(parse_err(n, format!("unknown meta key {key:?}"))),
            }
            has_cfg |= key != "connected";
        }
        if has_cfg {
            instance.meta.config = Some(cfg);
        }
        Ok(instance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> CriteriaState {
        s.parse().unwrap()
    }

    #[test]
    fn zero_theta_gives_zero_means() {
        let model = CorrelationModel::singletons(&[0.0; 4], &[0.0; 4]).unwrap();
        assert_eq!(mean_loss_vector(&model, &st("1010")), vec![0.0; 4]);
        assert_eq!(g(&model, &st("0000")), 0.0);
    }

    #[test]
    fn single_vertex_table_read() {
        let model = CorrelationModel::singletons(&[2.0], &[0.5]).unwrap();
        assert_eq!(mean_loss_vector(&model, &st("0")), vec![2.0]);
        assert_eq!(mean_loss_vector(&model, &st("1")), vec![0.5]);
    }

    #[test]
    fn decomposition_by_hand() {
        // Sets {1},{2},{3},{1,2} on k=3.
        let sets = vec![
            CorrelationSet::new(vec![0], vec![1.0, 0.1]).unwrap(),
            CorrelationSet::new(vec![1], vec![2.0, 0.2]).unwrap(),
            CorrelationSet::new(vec![2], vec![3.0, 0.3]).unwrap(),
            // rows: 00, 10 (vertex 1 fixed), 01 (vertex 2 fixed), 11
            CorrelationSet::new(vec![0, 1], vec![4.0, 5.0, 6.0, 7.0]).unwrap(),
        ];
        let model = CorrelationModel::new(3, sets).unwrap();
        let mu = mean_loss_vector(&model, &st("100"));
        assert_eq!(mu, vec![0.1 + 5.0, 2.0 + 5.0, 3.0]);
        let mu = mean_loss_vector(&model, &st("011"));
        assert_eq!(mu, vec![1.0 + 6.0, 0.2 + 6.0, 0.3]);
        assert_eq!(g(&model, &st("011")), mu.iter().sum::<f64>());
        assert_eq!(model.m(), 2);
        assert_eq!(model.local_vertices(0), &[0, 1]);
        assert_eq!(model.local_vertices(2), &[2]);
    }

    #[test]
    fn uniform_singletons_sum_to_k() {
        let model = CorrelationModel::singletons(&[1.0; 5], &[1.0; 5]).unwrap();
        assert_eq!(g(&model, &st("00000")), 5.0);
    }

    #[test]
    fn configuration_locality() {
        let set = CorrelationSet::new(vec![1, 3], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // States agreeing on {2,4} (1-indexed) contribute the same theta.
        assert_eq!(set.theta_at(&st("0101")), set.theta_at(&st("1111")));
        assert_eq!(set.theta_at(&st("0100")), set.theta_at(&st("1110")));
        assert_ne!(set.theta_at(&st("0100")), set.theta_at(&st("0001")));
    }

    #[test]
    fn constant_and_zero_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = generate_instance(&ExperimentConfig::new(8, 1.0, 3.0, 5)).unwrap();
        let s = CriteriaState::zeros(8);
        assert_eq!(
            sample_losses(&inst.model, LossFamily::Constant, &s, &mut rng),
            mean_loss_vector(&inst.model, &s)
        );
        let zero = CorrelationModel::singletons(&[0.0; 3], &[0.0; 3]).unwrap();
        for _ in 0..100 {
            let l = sample_losses(&zero, LossFamily::Exponential, &st("010"), &mut rng);
            assert_eq!(l, vec![0.0; 3]);
        }
    }

    #[test]
    fn clipped_draws_respect_cap() {
        let model = CorrelationModel::singletons(&[5.0], &[5.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let family = LossFamily::ClippedExponential { cap: 2.0 };
        for _ in 0..1000 {
            let l = sample_losses(&model, family, &st("0"), &mut rng)[0];
            assert!((0.0..=2.0).contains(&l));
        }
    }

    #[test]
    fn generator_structure() {
        let inst = generate_instance(&ExperimentConfig::new(6, 0.0, 2.0, 1)).unwrap();
        assert_eq!(inst.model.n(), 6);
        assert!(inst.model.is_singleton_only());
        assert_eq!(inst.model.m(), 1);

        let cfg = ExperimentConfig::new(50, 1.0, 10.0, 42);
        let inst = generate_instance(&cfg).unwrap();
        assert_eq!(inst.model.n(), 100);
        let mut seen = BTreeSet::new();
        for set in inst.model.sets() {
            let t = set.theta();
            match set.members().len() {
                1 => assert!((t[0] - 10.0 * t[1]).abs() < 1e-12),
                2 => {
                    assert!(seen.insert(set.members().to_vec()), "duplicate pair");
                    assert_eq!(t[1], t[2]);
                    assert_eq!(t[0], 10.0 * t[1]);
                    assert!(t[0] > t[1] && t[1] > t[3]);
                }
                _ => unreachable!(),
            }
        }
        assert!(inst.graph.costs().iter().all(|c| (1.0..=5.0).contains(c)));
        assert_eq!(generate_instance(&cfg).unwrap(), inst);
        assert_eq!(generate_instance(&cfg).unwrap().to_text(), inst.to_text());
    }

    #[test]
    fn generator_rejects_bad_configs() {
        assert!(generate_instance(&ExperimentConfig::new(4, 2.0, 2.0, 0)).is_err());
        assert!(generate_instance(&ExperimentConfig::new(4, 0.5, 1.0, 0)).is_err());
        assert!(generate_instance(&ExperimentConfig::new(4, -0.5, 2.0, 0)).is_err());
        let mut cfg = ExperimentConfig::new(4, 0.5, 2.0, 0);
        cfg.p = Some(0.0);
        assert!(generate_instance(&cfg).is_err());
        // All 6 pairs of k=4 is still feasible.
        assert!(generate_instance(&ExperimentConfig::new(4, 1.5, 2.0, 0)).is_ok());
    }

    #[test]
    fn instance_file_round_trip() {
        let mut cfg = ExperimentConfig::new(12, 0.75, 4.5, 99);
        cfg.p = Some(0.3);
        let inst = generate_instance(&cfg).unwrap();
        let text = inst.to_text();
        let back = Instance::parse(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn instance_parse_errors() {
        let bad_theta = "[graph]\n2\n1 1\n[sets]\n1 2 : 1 2 3\n";
        assert!(Instance::parse(bad_theta).is_err());
        let unsorted = "[graph]\n2\n1 1\n[sets]\n2 1 : 1 2 3 4\n";
        assert!(Instance::parse(unsorted).is_err());
        let ok = "[graph]\n2\n1 1\n1 2\n[sets]\n1 : 2 1\n1 2 : 1 2 3 4\n";
        let inst = Instance::parse(ok).unwrap();
        assert_eq!(inst.model.m(), 2);
        assert!(inst.meta.config.is_none());
    }
}
