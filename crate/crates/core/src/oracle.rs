//! Best-state solvers: given expected losses, find a valid state minimizing
//! the per-step total.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::CorrelationModel;
use crate::error::{Error, Result};
use crate::model::{for_each_valid_state, CriteriaState, IncompatibilityGraph, DEFAULT_ENUMERATION_CAP};

/// Expected per-vertex loss `μ_i^s` as seen by an algorithm.
pub trait MeanFunction {
    fn k(&self) -> usize;

    fn mean(&self, s: &CriteriaState, i: usize) -> f64;

    fn total(&self, s: &CriteriaState) -> f64 {
        (0..self.k()).map(|i| self.mean(s, i)).sum()
    }

    /// Vertices whose mean can change when bit `v` flips (including `v`).
    fn dependents(&self, v: usize) -> &[usize];

    /// True when `μ_i^s` depends on `s(i)` only.
    fn separable(&self) -> bool {
        false
    }
}

impl MeanFunction for CorrelationModel {
    fn k(&self) -> usize {
        CorrelationModel::k(self)
    }

    fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        CorrelationModel::mean(self, s, i)
    }

    fn dependents(&self, v: usize) -> &[usize] {
        self.local_vertices(v)
    }

    fn separable(&self) -> bool {
        self.is_singleton_only()
    }
}

/// Per-vertex table `[unfixed, fixed]`: the shape of every separable mean function.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableMeans {
    values: Vec<[f64; 2]>,
    own: Vec<usize>,
}

impl SeparableMeans {
    pub fn new(values: Vec<[f64; 2]>) -> Self {
        let own = (0..values.len()).collect();
        Self { values, own }
    }

    pub fn values(&self) -> &[[f64; 2]] {
        &self.values
    }
}

impl MeanFunction for SeparableMeans {
    fn k(&self) -> usize {
        self.values.len()
    }

    fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        self.values[i][s.bit(i) as usize]
    }

    fn dependents(&self, v: usize) -> &[usize] {
        std::slice::from_ref(&self.own[v])
    }

    fn separable(&self) -> bool {
        true
    }
}

/// Wraps an arbitrary closure; every vertex is treated as dependent on every bit.
pub struct FnMeans<F> {
    k: usize,
    f: F,
    all: Vec<usize>,
}

impl<F: Fn(&CriteriaState, usize) -> f64> FnMeans<F> {
    pub fn new(k: usize, f: F) -> Self {
        Self {
            k,
            f,
            all: (0..k).collect(),
        }
    }
}

impl<F: Fn(&CriteriaState, usize) -> f64> MeanFunction for FnMeans<F> {
    fn k(&self) -> usize {
        self.k
    }

    fn mean(&self, s: &CriteriaState, i: usize) -> f64 {
        (self.f)(s, i)
    }

    fn dependents(&self, _v: usize) -> &[usize] {
        &self.all
    }
}

/// Per-vertex costs of leaving a vertex unfixed (`Λ¹`) or fixed (`Λ²`).
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCosts {
    unfixed: Vec<f64>,
    fixed: Vec<f64>,
}

impl VertexCosts {
    pub fn new(unfixed: Vec<f64>, fixed: Vec<f64>) -> Result<Self> {
        if unfixed.len() != fixed.len() {
            return Err(Error::Dimension {
                expected: unfixed.len(),
                got: fixed.len(),
            });
        }
        if let Some(x) = unfixed.iter().chain(&fixed).find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidModel(format!("vertex cost {x} is not finite and nonnegative")));
        }
        Ok(Self { unfixed, fixed })
    }

    /// Reads `Λ¹_i = μ_i(0)` and `Λ²_i = μ_i(e_i)` from a separable mean function.
    /// Negative entries are lifted per vertex (both sides by the same amount), which
    /// leaves the argmin unchanged; the returned offset is the total lift.
    pub fn from_separable(f: &dyn MeanFunction) -> Result<(Self, f64)> {
        if !f.separable() {
            return Err(Error::Mode("LP oracle needs separable (singleton-set) means".into()));
        }
        let k = f.k();
        let zero = CriteriaState::zeros(k);
        let mut unfixed = Vec::with_capacity(k);
        let mut fixed = Vec::with_capacity(k);
        let mut offset = 0.0;
        for i in 0..k {
            let (u, x) = (f.mean(&zero, i), f.mean(&CriteriaState::indicator(k, i), i));
            let lift = (-u.min(x)).max(0.0);
            offset += lift;
            unfixed.push(u + lift);
            fixed.push(x + lift);
        }
        Ok((Self::new(unfixed, fixed)?, offset))
    }

    /// Adds the fixing cost `c_i` to every `Λ²_i`.
    pub fn with_fixing_costs(mut self, g: &IncompatibilityGraph) -> Self {
        for (x, c) in self.fixed.iter_mut().zip(g.costs()) {
            *x += c;
        }
        self
    }

    pub fn k(&self) -> usize {
        self.unfixed.len()
    }

    pub fn unfixed(&self) -> &[f64] {
        &self.unfixed
    }

    pub fn fixed(&self) -> &[f64] {
        &self.fixed
    }

    pub fn objective(&self, s: &CriteriaState) -> f64 {
        (0..self.k())
            .map(|i| if s.get(i) { self.fixed[i] } else { self.unfixed[i] })
            .sum()
    }
}

/// Valid state minimizing `Σ_i f(s, i)` by enumeration; ties go to the
/// lexicographically smallest state.
pub fn best_state_exact(g: &IncompatibilityGraph, f: &dyn MeanFunction) -> Result<CriteriaState> {
    best_state_exact_capped(g, f, DEFAULT_ENUMERATION_CAP)
}

pub fn best_state_exact_capped(g: &IncompatibilityGraph, f: &dyn MeanFunction, cap: usize) -> Result<CriteriaState> {
    check_k(g, f)?;
    let mut best: Option<(f64, CriteriaState)> = None;
    for_each_valid_state(g, cap, |s| {
        let value = f.total(s);
        // Enumeration is lexicographic, so keeping the first of equal values is the tie rule.
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, s.clone()));
        }
    })?;
    Ok(best.expect("the all-zeros state is always valid").1)
}

fn check_k(g: &IncompatibilityGraph, f: &dyn MeanFunction) -> Result<()> {
    if g.k() != f.k() {
        return Err(Error::Dimension {
            expected: g.k(),
            got: f.k(),
        });
    }
    Ok(())
}

/// Output of the vertex-cover LP for separable costs.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// `y_i = 1` means unfixed; every entry is 0, 1/2 or 1.
    pub y: Vec<f64>,
    pub lp_value: f64,
    /// Fixes exactly the vertices with `y_i < 1/2`.
    pub state: CriteriaState,
}

/// Solves `min Σ y_i γ_i + Σ Λ²_i` subject to `y_i + y_j ≥ 1` on edges and
/// `0 ≤ y ≤ 1`, where `γ_i = Λ¹_i − Λ²_i`, then rounds.
pub fn lp_best_state_m1(g: &IncompatibilityGraph, costs: &VertexCosts) -> Result<LpSolution> {
    let k = g.k();
    if costs.k() != k {
        return Err(Error::Dimension {
            expected: k,
            got: costs.k(),
        });
    }
    let gamma: Vec<f64> = (0..k).map(|i| costs.unfixed[i] - costs.fixed[i]).collect();
    let mut y = vec![1.0; k];
    // Vertices with γ_i ≤ 0 never gain from fixing and stay at y = 1.
    let active: Vec<usize> = (0..k).filter(|&i| gamma[i] > 0.0).collect();
    let mut slot = vec![usize::MAX; k];
    for (p, &v) in active.iter().enumerate() {
        slot[v] = p;
    }
    // Bipartite double cover: source -> L_v -> R_w -> sink for every active edge {v, w}.
    let n = active.len();
    let (source, sink) = (2 * n, 2 * n + 1);
    let mut net = FlowNetwork::new(2 * n + 2);
    let scale = active.iter().map(|&v| gamma[v]).fold(0.0, f64::max);
    for (p, &v) in active.iter().enumerate() {
        net.add_edge(source, p, gamma[v]);
        net.add_edge(n + p, sink, gamma[v]);
    }
    for &(a, b) in g.edges() {
        if slot[a] != usize::MAX && slot[b] != usize::MAX {
            net.add_edge(slot[a], n + slot[b], f64::INFINITY);
            net.add_edge(slot[b], n + slot[a], f64::INFINITY);
        }
    }
    net.max_flow(source, sink, scale * 1e-12);
    let reach = net.reachable(source, scale * 1e-12);
    for (p, &v) in active.iter().enumerate() {
        let left = !reach[p];
        let right = reach[n + p];
        y[v] = (left as u8 + right as u8) as f64 / 2.0;
    }
    let lp_value = (0..k).map(|i| costs.fixed[i] + y[i] * gamma[i]).sum();
    let state = CriteriaState::from_bits(y.iter().map(|&v| v < 0.5).collect());
    Ok(LpSolution { y, lp_value, state })
}

/// Dinic's max-flow over real capacities.
struct FlowNetwork {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        Self {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    fn add_edge(&mut self, a: usize, b: usize, c: f64) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0.0);
    }

    fn levels(&self, source: usize, eps: f64) -> Vec<usize> {
        let mut level = vec![usize::MAX; self.head.len()];
        level[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.head[v] {
                let w = self.to[e];
                if self.cap[e] > eps && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        level
    }

    fn reachable(&self, source: usize, eps: f64) -> Vec<bool> {
        self.levels(source, eps).into_iter().map(|l| l != usize::MAX).collect()
    }

    fn push(&mut self, v: usize, sink: usize, limit: f64, level: &[usize], next: &mut [usize], eps: f64) -> f64 {
        if v == sink {
            return limit;
        }
        while next[v] < self.head[v].len() {
            let e = self.head[v][next[v]];
            let w = self.to[e];
            if self.cap[e] > eps && level[w] == level[v] + 1 {
                let sent = self.push(w, sink, limit.min(self.cap[e]), level, next, eps);
                if sent > 0.0 {
                    self.cap[e] -= sent;
                    self.cap[e ^ 1] += sent;
                    return sent;
                }
            }
            next[v] += 1;
        }
        0.0
    }

    fn max_flow(&mut self, source: usize, sink: usize, eps: f64) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(source, eps);
            if level[sink] == usize::MAX {
                return total;
            }
            let mut next = vec![0; self.head.len()];
            loop {
                let sent = self.push(source, sink, f64::INFINITY, &level, &mut next, eps);
                if sent <= 0.0 {
                    break;
                }
                total += sent;
            }
        }
    }
}

/// One hill-climbing run.
#[derive(Debug, Clone, PartialEq)]
pub struct Descent {
    pub state: CriteriaState,
    pub value: f64,
    /// Objective after each accepted move, starting with the start value.
    pub trace: Vec<f64>,
}

/// Best-improvement descent over single-vertex moves: fix `v` (unfixing its
/// fixed neighbors) or unfix `v`.
pub fn local_search_from(g: &IncompatibilityGraph, f: &dyn MeanFunction, start: CriteriaState) -> Result<Descent> {
    check_k(g, f)?;
    if start.len() != g.k() {
        return Err(Error::Dimension {
            expected: g.k(),
            got: start.len(),
        });
    }
    if !crate::model::validate_state(g, &start)? {
        return Err(Error::InvalidState(format!("start state {start} is not independent")));
    }
    let k = g.k();
    let mut s = start;
    let mut value = f.total(&s);
    let mut trace = vec![value];
    let mut mark = vec![false; k];
    let mut affected = Vec::new();
    let tol = 1e-12;
    loop {
        let mut best: Option<(f64, usize)> = None;
        for v in 0..k {
            let flipped = move_bits(g, &s, v);
            affected.clear();
            for &u in &flipped {
                for &d in f.dependents(u) {
                    if !mark[d] {
                        mark[d] = true;
                        affected.push(d);
                    }
                }
            }
            let before: f64 = affected.iter().map(|&i| f.mean(&s, i)).sum();
            toggle(&mut s, &flipped);
            let after: f64 = affected.iter().map(|&i| f.mean(&s, i)).sum();
            toggle(&mut s, &flipped);
            for &d in &affected {
                mark[d] = false;
            }
            let delta = after - before;
            if delta < -tol * (1.0 + value.abs()) && best.is_none_or(|(b, _)| delta < b) {
                best = Some((delta, v));
            }
        }
        let Some((_, v)) = best else { break };
        let flipped = move_bits(g, &s, v);
        toggle(&mut s, &flipped);
        // Recompute rather than accumulate to keep the trace free of drift.
        let next = f.total(&s);
        if next >= value {
            toggle(&mut s, &flipped);
            break;
        }
        value = next;
        trace.push(value);
    }
    Ok(Descent { state: s, value, trace })
}

/// Bits changed by the single-vertex move at `v`.
fn move_bits(g: &IncompatibilityGraph, s: &CriteriaState, v: usize) -> Vec<usize> {
    let mut out = vec![v];
    if !s.get(v) {
        out.extend(g.neighbors(v).iter().copied().filter(|&w| s.get(w)));
    }
    out
}

fn toggle(s: &mut CriteriaState, bits: &[usize]) {
    for &b in bits {
        s.set(b, !s.get(b));
    }
}

/// Uniformly ordered greedy fill: each vertex in a random order is fixed with
/// probability 1/2 when none of its neighbors is fixed yet.
pub fn random_valid_state<R: Rng + ?Sized>(g: &IncompatibilityGraph, rng: &mut R) -> CriteriaState {
    let mut order: Vec<usize> = (0..g.k()).collect();
    order.shuffle(rng);
    let mut s = CriteriaState::zeros(g.k());
    for v in order {
        let free = g.neighbors(v).iter().all(|&w| !s.get(w));
        if rng.random_bool(0.5) && free {
            s.set(v, true);
        }
    }
    s
}

/// Best local optimum over `restarts` descents (at least one); the first
/// starts from all-zeros, the rest from random valid states.
pub fn best_state_local_search<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    f: &dyn MeanFunction,
    restarts: usize,
    rng: &mut R,
) -> Result<CriteriaState> {
    Ok(local_search_with_hint(g, f, restarts, None, rng)?.state)
}

/// As [`best_state_local_search`] but the first descent starts at `hint` when given.
pub fn local_search_with_hint<R: Rng + ?Sized>(
    g: &IncompatibilityGraph,
    f: &dyn MeanFunction,
    restarts: usize,
    hint: Option<&CriteriaState>,
    rng: &mut R,
) -> Result<Descent> {
    let mut best: Option<Descent> = None;
    for r in 0..restarts.max(1) {
        let start = match (r, hint) {
            (0, Some(h)) => h.clone(),
            (0, None) => CriteriaState::zeros(g.k()),
            _ => random_valid_state(g, rng),
        };
        let d = local_search_from(g, f, start)?;
        let better = match &best {
            None => true,
            Some(b) => d.value < b.value || (d.value == b.value && d.state < b.state),
        };
        if better {
            best = Some(d);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Oracle selection for the online algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Exact,
    /// Vertex-cover LP with rounding, polished by local search; separable means only.
    Lp,
    Local,
    /// Exact up to [`AUTO_EXACT_CAP`] vertices, otherwise LP (separable) or local search.
    #[default]
    Auto,
}

/// Largest `k` for which [`Oracle::Auto`] enumerates.
pub const AUTO_EXACT_CAP: usize = 16;

/// Restarts used by the local-search oracle; the first starts from the hint.
pub const LOCAL_RESTARTS: usize = 4;

impl Oracle {
    /// Whether the returned state is guaranteed optimal for `k` vertices.
    pub fn is_exact_for(self, k: usize) -> bool {
        match self {
            Oracle::Exact => true,
            Oracle::Auto => k <= AUTO_EXACT_CAP,
            Oracle::Lp | Oracle::Local => false,
        }
    }

    pub fn solve<R: Rng + ?Sized>(
        self,
        g: &IncompatibilityGraph,
        f: &dyn MeanFunction,
        hint: Option<&CriteriaState>,
        rng: &mut R,
    ) -> Result<CriteriaState> {
        match self {
            Oracle::Exact => best_state_exact(g, f),
            Oracle::Auto if g.k() <= AUTO_EXACT_CAP => best_state_exact(g, f),
            Oracle::Lp => lp_polished(g, f),
            Oracle::Auto if f.separable() => lp_polished(g, f),
            Oracle::Local | Oracle::Auto => Ok(local_search_with_hint(g, f, LOCAL_RESTARTS, hint, rng)?.state),
        }
    }
}

fn lp_polished(g: &IncompatibilityGraph, f: &dyn MeanFunction) -> Result<CriteriaState> {
    let (costs, _) = VertexCosts::from_separable(f)?;
    let lp = lp_best_state_m1(g, &costs)?;
    Ok(local_search_from(g, f, lp.state)?.state)
}
