//! Online learners for the stochastic setting and pseudo-regret accounting.
//!
//! Every run is a sequence of steps: the learner picks an action, the state
//! changes, and one loss per vertex is drawn at the post-action state.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cover::{reconstruct_mean, x_values, Cover, CoverKind, XTable};
use crate::environment::{g as expected_total, sample_losses_into, CorrelationModel, LossFamily};
use crate::error::{Error, Result};
use crate::model::{
    apply_action, move_path, validate_state, Action, CriteriaState, IncompatibilityGraph, TransitionMode,
    DEFAULT_ENUMERATION_CAP,
};
use crate::oracle::{
    best_state_exact, local_search_with_hint, lp_best_state_m1, local_search_from, MeanFunction, Oracle, VertexCosts,
};

/// Largest `|{i} ∪ corr(i)|` for which eager UCB enumerates local configurations.
pub const MAX_EAGER_LOCAL_BITS: usize = 12;

/// Facts about a run that are not per-step data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RunMeta {
    pub algorithm: String,
    pub horizon: usize,
    pub b: f64,
    pub oracle: Oracle,
    pub oracle_calls: usize,
    /// Steps idled per cover state (explore-then-exploit only).
    pub explore_steps: Option<usize>,
    pub explore_scale: Option<f64>,
    pub cover_size: Option<usize>,
    /// Steps taken before the first oracle call.
    pub exploit_start: Option<usize>,
    pub delta: Option<f64>,
    pub conf_scale: Option<f64>,
    pub episodes: usize,
    /// Optimistic values checked against the truth, and how many exceeded it.
    pub optimism_checks: u64,
    pub optimism_violations: u64,
    /// State chosen by the last oracle call.
    pub final_choice: Option<String>,
}

/// Per-step record of a run. States are interned; `state_ids[t]` is the
/// state after step `t`'s action.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunTrace {
    pub meta: RunMeta,
    states: Vec<CriteriaState>,
    expected_at: Vec<f64>,
    state_ids: Vec<u32>,
    actions: Vec<Action>,
    fix_costs: Vec<f64>,
    /// Sum over vertices of the losses drawn at the step.
    realized: Vec<f64>,
}

impl RunTrace {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn state(&self, t: usize) -> &CriteriaState {
        &self.states[self.state_ids[t] as usize]
    }

    pub fn action(&self, t: usize) -> Action {
        self.actions[t]
    }

    pub fn fix_cost(&self, t: usize) -> f64 {
        self.fix_costs[t]
    }

    pub fn realized_loss(&self, t: usize) -> f64 {
        self.realized[t]
    }

    /// `g` of the post-action state.
    pub fn expected_loss(&self, t: usize) -> f64 {
        self.expected_at[self.state_ids[t] as usize]
    }

    pub fn distinct_states(&self) -> &[CriteriaState] {
        &self.states
    }

    /// Running total of fixing costs plus realized losses.
    pub fn cumulative_loss(&self) -> Vec<f64> {
        let mut acc = 0.0;
        (0..self.len())
            .map(|t| {
                acc += self.fix_costs[t] + self.realized[t];
                acc
            })
            .collect()
    }

    pub fn total_loss(&self) -> f64 {
        self.cumulative_loss().last().copied().unwrap_or(0.0)
    }

    /// Number of steps whose action changed the state.
    pub fn switches(&self) -> usize {
        self.actions.iter().filter(|a| **a != Action::Null).count()
    }
}

/// Steps the environment and records the trace.
struct Simulator<'a, R: Rng + ?Sized> {
    g: &'a IncompatibilityGraph,
    model: &'a CorrelationModel,
    family: LossFamily,
    rng: &'a mut R,
    horizon: usize,
    state: CriteriaState,
    state_id: u32,
    lookup: HashMap<CriteriaState, u32>,
    losses: Vec<f64>,
    trace: RunTrace,
}

impl<'a, R: Rng + ?Sized> Simulator<'a, R> {
    fn new(
        g: &'a IncompatibilityGraph,
        model: &'a CorrelationModel,
        family: LossFamily,
        horizon: usize,
        rng: &'a mut R,
    ) -> Result<Self> {
        if g.k() != model.k() {
            return Err(Error::Dimension {
                expected: g.k(),
                got: model.k(),
            });
        }
        let mut sim = Self {
            g,
            model,
            family,
            rng,
            horizon,
            state: CriteriaState::zeros(g.k()),
            state_id: 0,
            lookup: HashMap::new(),
            losses: vec![0.0; g.k()],
            trace: RunTrace::default(),
        };
        sim.trace.actions.reserve(horizon);
        sim.state_id = sim.intern();
        Ok(sim)
    }

    fn intern(&mut self) -> u32 {
        if let Some(&id) = self.lookup.get(&self.state) {
            return id;
        }
        let id = self.trace.states.len() as u32;
        self.trace.states.push(self.state.clone());
        self.trace.expected_at.push(expected_total(self.model, &self.state));
        self.lookup.insert(self.state.clone(), id);
        id
    }

    fn done(&self) -> bool {
        self.trace.len() >= self.horizon
    }

    fn remaining(&self) -> usize {
        self.horizon - self.trace.len()
    }

    /// Plays `a` and draws this step's losses into `self.losses`; false once
    /// the horizon is reached.
    fn step(&mut self, a: Action) -> bool {
        if self.done() {
            return false;
        }
        let mut cost = 0.0;
        if a != Action::Null {
            let (next, c) = apply_action(self.g, &self.state, a).expect("actions stay in range");
            cost = c;
            self.state = next;
            self.state_id = self.intern();
        }
        sample_losses_into(self.model, self.family, &self.state, self.rng, &mut self.losses);
        let t = &mut self.trace;
        t.state_ids.push(self.state_id);
        t.actions.push(a);
        t.fix_costs.push(cost);
        t.realized.push(self.losses.iter().sum());
        true
    }

    fn finish(self, meta: RunMeta) -> RunTrace {
        let mut trace = self.trace;
        trace.meta = meta;
        trace
    }
}

/// Expected losses rebuilt from per-cover-state averages.
pub struct ReconstructedMeans<'c> {
    cover: &'c Cover,
    x: XTable,
    means: Vec<Vec<f64>>,
    deps: Vec<Vec<usize>>,
}

impl<'c> ReconstructedMeans<'c> {
    pub fn new(cover: &'c Cover, means_at_cover: Vec<Vec<f64>>) -> Result<Self> {
        let x = x_values(cover, &means_at_cover)?;
        let k = cover.k();
        let mut deps: Vec<Vec<usize>> = (0..k).map(|v| vec![v]).collect();
        for i in 0..k {
            for &j in cover.partners(i) {
                deps[j].push(i);
            }
            for block in cover.blocks().of(i) {
                for &j in block {
                    deps[j].push(i);
                }
            }
        }
        for d in &mut deps {
            d.sort_unstable();
            d.dedup();
        }
        Ok(Self {
            cover,
            x,
            means: means_at_cover,
            deps,
        })
    }
}

impl MeanFunction for ReconstructedMeans<'_> {
    fn k(&self) -> usize {
        self.cover.k()
    }

    fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        reconstruct_mean(self.cover, &self.x, &self.means, s, i).expect("cover spans every valid state")
    }

    fn dependents(&self, v: usize) -> &[usize] {
        &self.deps[v]
    }

    fn separable(&self) -> bool {
        self.cover.kind() == CoverKind::Singleton
    }
}

/// Tunables of explore-then-exploit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExploreExploitParams {
    pub horizon: usize,
    pub b: f64,
    /// Multiplier in `N = scale · T^{2/3} (ln rkT)^{1/3} / r^{2/3}`.
    pub scale: f64,
    pub oracle: Oracle,
}

impl ExploreExploitParams {
    pub fn new(horizon: usize, b: f64) -> Self {
        Self {
            horizon,
            b,
            scale: 10.0,
            oracle: Oracle::Auto,
        }
    }

    /// Idle steps per cover state for a cover of size `r` on `k` vertices.
    pub fn explore_steps(&self, r: usize, k: usize) -> usize {
        let (t, r, k) = (self.horizon as f64, r as f64, k.max(1) as f64);
        let log = (r * k * t).ln().max(0.0);
        (self.scale * t.powf(2.0 / 3.0) * log.cbrt() / r.powf(2.0 / 3.0)).ceil() as usize
    }
}

/// Visits each cover state and idles `N` steps there, reconstructs all means,
/// asks the oracle once and stays at its answer until the horizon.
pub fn run_explore_exploit<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    model: &CorrelationModel,
    family: LossFamily,
    cover: &Cover,
    params: &ExploreExploitParams,
    rng: &mut R,
) -> Result<RunTrace> {
    if !(params.b > 0.0) || !(params.scale > 0.0) {
        return Err(Error::Config("B and the exploration scale must be positive".into()));
    }
    let (k, r) = (g.k(), cover.len());
    let n = params.explore_steps(r, k).max(1);
    if params.horizon < r * (n + k) {
        return Err(Error::Config(format!(
            "horizon {} is below r(N + k) = {} (r = {r}, N = {n}); lower the exploration scale or raise T",
            params.horizon,
            r * (n + k)
        )));
    }
    let mut oracle_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let mut sim = Simulator::new(g, model, family, params.horizon, rng)?;
    let mut means = Vec::with_capacity(r);
    for target in cover.states() {
        walk(&mut sim, target)?;
        let mut sum = vec![0.0; k];
        for _ in 0..n {
            assert!(sim.step(Action::Null), "horizon checked above");
            sum.iter_mut().zip(&sim.losses).for_each(|(a, l)| *a += l);
        }
        means.push(sum.into_iter().map(|x| x / n as f64).collect());
    }
    let exploit_start = sim.trace.len();
    let estimate = ReconstructedMeans::new(cover, means)?;
    let choice = params.oracle.solve(g, &estimate, Some(&sim.state.clone()), &mut oracle_rng)?;
    walk(&mut sim, &choice)?;
    while sim.step(Action::Null) {}
    let meta = RunMeta {
        algorithm: "explore_exploit".into(),
        horizon: params.horizon,
        b: params.b,
        oracle: params.oracle,
        oracle_calls: 1,
        explore_steps: Some(n),
        explore_scale: Some(params.scale),
        cover_size: Some(r),
        exploit_start: Some(exploit_start),
        final_choice: Some(choice.to_string()),
        ..RunMeta::default()
    };
    Ok(sim.finish(meta))
}

/// Moves to `target`, one step per action; returns false if the horizon cut it short.
fn walk<R: Rng + ?Sized>(sim: &mut Simulator<'_, R>, target: &CriteriaState) -> Result<bool> {
    let plan = move_path(sim.g, &sim.state, target, TransitionMode::WithUnfix)?;
    for a in plan.actions {
        if !sim.step(a) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which states UCB visits before its first oracle call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialPass {
    /// All-zeros and the `k` indicator states; unseen local configurations are
    /// valued at 0 (losses are nonnegative).
    #[default]
    Lazy,
    /// One state per realizable local configuration of every vertex.
    Eager,
}

/// Tunables of the episodic UCB learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UcbParams {
    pub horizon: usize,
    pub b: f64,
    /// Confidence level; `None` means `1 / T^4`.
    pub delta: Option<f64>,
    /// Multiplier of the confidence width `B √(m ln(kT/δ) / τ)`.
    pub conf_scale: f64,
    pub oracle: Oracle,
    pub initial: InitialPass,
    /// Compare optimistic values with true means at every episode start.
    pub audit: bool,
}

impl UcbParams {
    pub fn new(horizon: usize, b: f64) -> Self {
        Self {
            horizon,
            b,
            delta: None,
            conf_scale: 10.0,
            oracle: Oracle::Auto,
            initial: InitialPass::Lazy,
            audit: false,
        }
    }

    pub fn delta_value(&self) -> f64 {
        self.delta.unwrap_or_else(|| (self.horizon as f64).powi(-4))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Stat {
    count: u64,
    sum: f64,
}

/// Local configurations up to this many bits get a direct-indexed slot table.
const DENSE_LOCAL_BITS: usize = 12;

/// Configuration → slot lookup for one vertex.
#[derive(Debug, Clone, PartialEq)]
enum SlotIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<usize, u32>),
}

const NO_SLOT: u32 = u32::MAX;

impl SlotIndex {
    fn new(bits: usize) -> Self {
        if bits <= DENSE_LOCAL_BITS {
            SlotIndex::Dense(vec![NO_SLOT; 1 << bits])
        } else {
            SlotIndex::Sparse(HashMap::new())
        }
    }

    fn get(&self, key: usize) -> Option<usize> {
        match self {
            SlotIndex::Dense(v) => Some(v[key]).filter(|&p| p != NO_SLOT).map(|p| p as usize),
            SlotIndex::Sparse(m) => m.get(&key).map(|&p| p as usize),
        }
    }

    fn insert(&mut self, key: usize, slot: usize) {
        match self {
            SlotIndex::Dense(v) => v[key] = slot as u32,
            SlotIndex::Sparse(m) => {
                m.insert(key, slot as u32);
            }
        }
    }
}

/// Visit counts and empirical means per vertex and local configuration, where
/// the local configuration of `i` in `s` is `s` restricted to `{i} ∪ corr(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbEstimates {
    local: Vec<Vec<usize>>,
    index: Vec<SlotIndex>,
    stats: Vec<Vec<(usize, Stat)>>,
}

impl UcbEstimates {
    pub fn new(model: &CorrelationModel) -> Self {
        let k = model.k();
        let local: Vec<Vec<usize>> = (0..k).map(|i| model.local_vertices(i).to_vec()).collect();
        Self {
            index: local.iter().map(|l| SlotIndex::new(l.len())).collect(),
            local,
            stats: vec![Vec::new(); k],
        }
    }

    pub fn k(&self) -> usize {
        self.local.len()
    }

    pub fn local_vertices(&self, i: usize) -> &[usize] {
        &self.local[i]
    }

    /// Local configuration of `i` in `s`.
    pub fn key(&self, i: usize, s: &CriteriaState) -> usize {
        s.config_of(&self.local[i])
    }

    fn slot(&mut self, i: usize, key: usize) -> usize {
        if let Some(p) = self.index[i].get(key) {
            return p;
        }
        let p = self.stats[i].len();
        self.stats[i].push((key, Stat::default()));
        self.index[i].insert(key, p);
        p
    }

    fn stat(&self, i: usize, key: usize) -> Option<Stat> {
        self.index[i].get(key).map(|p| self.stats[i][p].1).filter(|st| st.count > 0)
    }

    /// Adds one observation of every vertex at state `s`.
    pub fn observe(&mut self, s: &CriteriaState, losses: &[f64]) {
        for (i, &l) in losses.iter().enumerate() {
            let slot = self.slot(i, self.key(i, s));
            Self::record(&mut self.stats[i][slot].1, l);
        }
    }

    fn record(stat: &mut Stat, loss: f64) {
        stat.count += 1;
        stat.sum += loss;
    }

    pub fn count(&self, i: usize, s: &CriteriaState) -> u64 {
        self.count_key(i, self.key(i, s))
    }

    pub fn count_key(&self, i: usize, key: usize) -> u64 {
        self.stat(i, key).map_or(0, |st| st.count)
    }

    pub fn empirical_mean(&self, i: usize, key: usize) -> Option<f64> {
        self.stat(i, key).map(|st| st.sum / st.count as f64)
    }

    /// `γ̂ − width_coeff / √τ`; 0 for a configuration never observed.
    pub fn optimistic(&self, i: usize, key: usize, width_coeff: f64) -> f64 {
        match self.stat(i, key) {
            None => 0.0,
            Some(st) => st.sum / st.count as f64 - width_coeff / (st.count as f64).sqrt(),
        }
    }

    /// Episode length `max(1, min_i τ_i(s))`.
    pub fn episode_length(&self, s: &CriteriaState) -> u64 {
        (0..self.k()).map(|i| self.count(i, s)).min().unwrap_or(0).max(1)
    }

    /// Observed `(configuration, count)` pairs of vertex `i`, in first-seen order.
    pub fn observed(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.stats[i].iter().map(|(key, st)| (*key, st.count))
    }
}

/// Optimistic means handed to the oracle.
struct OptimisticMeans<'e> {
    est: &'e UcbEstimates,
    width_coeff: f64,
    separable: bool,
}

impl MeanFunction for OptimisticMeans<'_> {
    fn k(&self) -> usize {
        self.est.k()
    }

    fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        self.est.optimistic(i, self.est.key(i, s), self.width_coeff)
    }

    fn dependents(&self, v: usize) -> &[usize] {
        // Sharing a set is symmetric, so the vertices reading bit v are v's own locals.
        self.est.local_vertices(v)
    }

    fn separable(&self) -> bool {
        self.separable
    }
}

/// Episodic UCB restricted to singleton correlation sets.
pub fn run_ucb_m1<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    model: &CorrelationModel,
    family: LossFamily,
    params: &UcbParams,
    rng: &mut R,
) -> Result<RunTrace> {
    if !model.is_singleton_only() {
        return Err(Error::Mode("ucb_m1 needs every correlation set to be a singleton".into()));
    }
    let mut trace = ucb_engine(g, model, family, params, rng)?;
    trace.meta.algorithm = "ucb_m1".into();
    Ok(trace)
}

/// Episodic UCB over local configurations; reduces to [`run_ucb_m1`] when `m = 1`.
pub fn run_ucb_general<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    model: &CorrelationModel,
    family: LossFamily,
    params: &UcbParams,
    rng: &mut R,
) -> Result<RunTrace> {
    let mut trace = ucb_engine(g, model, family, params, rng)?;
    trace.meta.algorithm = "ucb_general".into();
    Ok(trace)
}

/// States realizing every independent local configuration, everything else unfixed.
fn eager_states(g: &IncompatibilityGraph, model: &CorrelationModel) -> Result<Vec<CriteriaState>> {
    let k = g.k();
    let mut out = vec![CriteriaState::zeros(k)];
    let mut seen: std::collections::HashSet<CriteriaState> = out.iter().cloned().collect();
    for i in 0..k {
        let local = model.local_vertices(i);
        if local.len() > MAX_EAGER_LOCAL_BITS {
            return Err(Error::Capacity {
                what: "local configuration bits",
                got: local.len(),
                limit: MAX_EAGER_LOCAL_BITS,
            });
        }
        for u in 0..1usize << local.len() {
            let mut s = CriteriaState::zeros(k);
            for (t, &v) in local.iter().enumerate() {
                s.set(v, (u >> t) & 1 == 1);
            }
            if validate_state(g, &s)? && seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn ucb_engine<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    model: &CorrelationModel,
    family: LossFamily,
    params: &UcbParams,
    rng: &mut R,
) -> Result<RunTrace> {
    let delta = params.delta_value();
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Config(format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(params.b > 0.0) || !(params.conf_scale >= 0.0) || params.horizon == 0 {
        return Err(Error::Config("need B > 0, conf_scale >= 0 and T >= 1".into()));
    }
    let k = g.k();
    let initial = match params.initial {
        InitialPass::Lazy => std::iter::once(CriteriaState::zeros(k))
            .chain((0..k).map(|i| CriteriaState::indicator(k, i)))
            .collect(),
        InitialPass::Eager => eager_states(g, model)?,
    };
    let mut oracle_rng = ChaCha8Rng::seed_from_u64(rng.next_u64());
    let mut sim = Simulator::new(g, model, family, params.horizon, rng)?;
    let mut est = UcbEstimates::new(model);
    let m = model.m() as f64;
    let log_term = ((k.max(1) as f64) * params.horizon as f64 / delta).ln();
    let width_coeff = params.conf_scale * params.b * (m * log_term).sqrt();
    let mut meta = RunMeta {
        algorithm: String::new(),
        horizon: params.horizon,
        b: params.b,
        oracle: params.oracle,
        delta: Some(delta),
        conf_scale: Some(params.conf_scale),
        cover_size: Some(initial.len()),
        ..RunMeta::default()
    };

    // Cached local-configuration slots of the current state, refreshed on every move.
    let mut slots = vec![0usize; k];
    let refresh = |est: &mut UcbEstimates, s: &CriteriaState, slots: &mut [usize]| {
        for (i, slot) in slots.iter_mut().enumerate() {
            let key = est.key(i, s);
            *slot = est.slot(i, key);
        }
    };
    refresh(&mut est, &sim.state, &mut slots);
    let play = |sim: &mut Simulator<'_, R>, est: &mut UcbEstimates, slots: &mut Vec<usize>, a: Action| -> bool {
        if !sim.step(a) {
            return false;
        }
        if a != Action::Null {
            refresh(est, &sim.state, slots);
        }
        for (i, &l) in sim.losses.iter().enumerate() {
            UcbEstimates::record(&mut est.stats[i][slots[i]].1, l);
        }
        true
    };
    let go_to = |sim: &mut Simulator<'_, R>, est: &mut UcbEstimates, slots: &mut Vec<usize>, target: &CriteriaState| -> Result<bool> {
        let plan = move_path(g, &sim.state, target, TransitionMode::WithUnfix)?;
        for a in plan.actions {
            if !play(sim, est, slots, a) {
                return Ok(false);
            }
        }
        Ok(true)
    };

    // Initial pass: observe each listed state for one step (the arrival step, or a
    // Null step for the starting state).
    for target in &initial {
        if &sim.state == target {
            if !play(&mut sim, &mut est, &mut slots, Action::Null) {
                break;
            }
        } else if !go_to(&mut sim, &mut est, &mut slots, target)? {
            break;
        }
    }

    meta.exploit_start = Some(sim.trace.len());
    let mut truth_cache: HashMap<(usize, usize), f64> = HashMap::new();
    while !sim.done() {
        if params.audit {
            audit(&est, model, width_coeff, &mut truth_cache, &mut meta);
        }
        let f = OptimisticMeans {
            est: &est,
            width_coeff,
            separable: model.is_singleton_only(),
        };
        let hint = sim.state.clone();
        let choice = params.oracle.solve(g, &f, Some(&hint), &mut oracle_rng)?;
        meta.oracle_calls += 1;
        meta.episodes += 1;
        let length = est.episode_length(&choice);
        meta.final_choice = Some(choice.to_string());
        if !go_to(&mut sim, &mut est, &mut slots, &choice)? {
            break;
        }
        let stay = (length as usize).min(sim.remaining());
        for _ in 0..stay {
            play(&mut sim, &mut est, &mut slots, Action::Null);
        }
    }
    if params.audit {
        audit(&est, model, width_coeff, &mut truth_cache, &mut meta);
    }
    Ok(sim.finish(meta))
}

/// Counts optimistic values above the true local mean.
fn audit(
    est: &UcbEstimates,
    model: &CorrelationModel,
    width_coeff: f64,
    truth: &mut HashMap<(usize, usize), f64>,
    meta: &mut RunMeta,
) {
    let k = est.k();
    for i in 0..k {
        for (key, count) in est.observed(i) {
            if count == 0 {
                continue;
            }
            let mu = *truth.entry((i, key)).or_insert_with(|| {
                let mut s = CriteriaState::zeros(k);
                for (t, &v) in est.local_vertices(i).iter().enumerate() {
                    s.set(v, (key >> t) & 1 == 1);
                }
                model.mean(&s, i)
            });
            meta.optimism_checks += 1;
            if est.optimistic(i, key, width_coeff) > mu + 1e-9 {
                meta.optimism_violations += 1;
            }
        }
    }
}

/// The best stay-put state used by pseudo-regret.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparator {
    pub state: CriteriaState,
    pub value: f64,
    /// True when the state came from a heuristic rather than enumeration.
    pub approximate: bool,
}

/// Restarts used when the comparator falls back to local search.
pub const COMPARATOR_RESTARTS: usize = 32;

/// `s* = argmin g`: exact up to the enumeration cap, otherwise the better of
/// local search and (for singleton sets) the LP-rounded state, flagged approximate.
pub fn comparator(g: &IncompatibilityGraph, model: &CorrelationModel, seed: u64) -> Result<Comparator> {
    if g.k() <= DEFAULT_ENUMERATION_CAP {
        let state = best_state_exact(g, model)?;
        let value = expected_total(model, &state);
        return Ok(Comparator {
            state,
            value,
            approximate: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = local_search_with_hint(g, model, COMPARATOR_RESTARTS, None, &mut rng)?;
    if model.is_singleton_only() {
        let (costs, _) = VertexCosts::from_separable(model)?;
        let lp = lp_best_state_m1(g, &costs)?;
        let polished = local_search_from(g, model, lp.state)?;
        if polished.value < best.value {
            best = polished;
        }
    }
    Ok(Comparator {
        value: expected_total(model, &best.state),
        state: best.state,
        approximate: true,
    })
}

/// `Reg(t) = Σ_{τ≤t} [c_{a_τ} + g(s_τ)] − t · g(s*)`, with `s_τ` the post-action state.
pub fn pseudo_regret(trace: &RunTrace, comparator: &Comparator) -> Vec<f64> {
    let mut acc = 0.0;
    (0..trace.len())
        .map(|t| {
            acc += trace.fix_cost(t) + trace.expected_loss(t) - comparator.value;
            acc
        })
        .collect()
}

/// Trace as CSV with a header row; `regret` must come from [`pseudo_regret`].
pub fn trace_csv(trace: &RunTrace, regret: &[f64]) -> String {
    let mut out = String::from("step,state_bits,action,fix_cost,realized_loss,expected_loss,cum_loss,cum_pseudo_regret\n");
    let mut cum = 0.0;
    for t in 0..trace.len() {
        cum += trace.fix_cost(t) + trace.realized_loss(t);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            t + 1,
            trace.state(t),
            trace.action(t),
            trace.fix_cost(t),
            trace.realized_loss(t),
            trace.expected_loss(t),
            cum,
            regret.get(t).copied().unwrap_or(f64::NAN)
        );
    }
    out
}
