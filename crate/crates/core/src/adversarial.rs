//! Adversarial complaints: the barrier algorithm, the per-vertex ski-rental
//! baseline and the offline optimum.
//!
//! A complaint `(i, ℓ)` costs `ℓ` when criterion `i` is unfixed at that moment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{parse_err, Error, Result};
use crate::model::{apply_in_place, for_each_valid_state, Action, CriteriaState, IncompatibilityGraph};

/// Largest `k` accepted by [`offline_opt`].
pub const OFFLINE_OPT_CAP: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Complaint {
    pub vertex: usize,
    pub loss: f64,
}

impl Complaint {
    pub fn new(vertex: usize, loss: f64) -> Self {
        Self { vertex, loss }
    }
}

/// Checks vertex range and `0 ≤ ℓ ≤ b` for every complaint.
pub fn validate_complaints<'a>(k: usize, b: f64, complaints: impl IntoIterator<Item = &'a Complaint>) -> Result<()> {
    for c in complaints {
        if c.vertex >= k {
            return Err(Error::InvalidState(format!("complaint on vertex {} but k = {k}", c.vertex + 1)));
        }
        if !(c.loss >= 0.0 && c.loss <= b) {
            return Err(Error::InvalidState(format!("complaint loss {} outside [0, {b}]", c.loss)));
        }
    }
    Ok(())
}

/// One complaint per step: events of a step in ascending vertex order, empty steps dropped.
pub fn flatten(steps: &[Vec<Complaint>]) -> Vec<Complaint> {
    let mut out = Vec::with_capacity(steps.iter().map(Vec::len).sum());
    for step in steps {
        let mut step = step.clone();
        step.sort_by_key(|c| c.vertex);
        out.extend(step);
    }
    out
}

/// Wraps a flat sequence as one complaint per step.
pub fn singleton_steps(seq: &[Complaint]) -> Vec<Vec<Complaint>> {
    seq.iter().map(|&c| vec![c]).collect()
}

/// Snapshot after one complaint of a barrier run.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierStep {
    pub complaint: Complaint,
    /// Loss charged for the complaint itself (0 if the vertex was fixed).
    pub charged: f64,
    pub fixed: bool,
    pub cumulative: f64,
    pub kappa: Vec<f64>,
}

/// Final state of a barrier run plus the per-complaint history.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarialRun {
    pub total_loss: f64,
    pub state: CriteriaState,
    /// Accumulated loss per vertex since its last reset.
    pub tau: Vec<f64>,
    /// Remaining barrier per vertex.
    pub kappa: Vec<f64>,
    pub fixes: usize,
    pub history: Vec<BarrierStep>,
}

/// Barrier algorithm. For each complaint on an unfixed vertex `i`: pay `ℓ`,
/// add it to `τ_i`, burn the residual against neighbors' barriers in ascending
/// order, then fix `i` if `τ_i ≥ max(c_i, Σ_{j∈N(i)} κ_j)`.
pub fn run_barrier(g: &IncompatibilityGraph, seq: &[Complaint]) -> Result<AdversarialRun> {
    g.validate_adversarial()?;
    validate_complaints(g.k(), f64::INFINITY, seq)?;
    let k = g.k();
    let mut state = CriteriaState::zeros(k);
    let mut tau = vec![0.0; k];
    let mut kappa = vec![0.0; k];
    let mut total = 0.0;
    let mut fixes = 0;
    let mut history = Vec::with_capacity(seq.len());
    for &c in seq {
        let i = c.vertex;
        let mut charged = 0.0;
        let mut fixed = false;
        if !state.get(i) {
            charged = c.loss;
            total += c.loss;
            tau[i] += c.loss;
            let mut residual = c.loss;
            for &j in g.neighbors(i) {
                if residual <= 0.0 {
                    break;
                }
                let d = residual.min(kappa[j]);
                kappa[j] -= d;
                residual -= d;
            }
            let barrier: f64 = g.neighbors(i).iter().map(|&j| kappa[j]).sum();
            if tau[i] >= g.cost(i).max(barrier) {
                apply_in_place(g, &mut state, Action::Fix(i));
                total += g.cost(i);
                tau[i] = 0.0;
                kappa[i] = g.cost(i);
                for &j in g.neighbors(i) {
                    tau[j] = 0.0;
                }
                fixes += 1;
                fixed = true;
            }
        }
        history.push(BarrierStep {
            complaint: c,
            charged,
            fixed,
            cumulative: total,
            kappa: kappa.clone(),
        });
    }
    Ok(AdversarialRun {
        total_loss: total,
        state,
        tau,
        kappa,
        fixes,
        history,
    })
}

/// Per-vertex ski rental: fix `i` once its loss since the last fix reaches `c_i`.
/// Fixing still unfixes neighbors.
pub fn run_naive_ski_rental(g: &IncompatibilityGraph, seq: &[Complaint]) -> Result<f64> {
    validate_complaints(g.k(), f64::INFINITY, seq)?;
    let mut state = CriteriaState::zeros(g.k());
    let mut tau = vec![0.0; g.k()];
    let mut total = 0.0;
    for &Complaint { vertex: i, loss } in seq {
        if state.get(i) {
            continue;
        }
        total += loss;
        tau[i] += loss;
        if tau[i] >= g.cost(i) {
            apply_in_place(g, &mut state, Action::Fix(i));
            total += g.cost(i);
            tau[i] = 0.0;
        }
    }
    Ok(total)
}

/// Minimum total of fixing costs plus charged losses over all state sequences
/// starting from all-unfixed. Each step may change several bits (unfixing is
/// free) and its complaints are charged after the change.
pub fn offline_opt(g: &IncompatibilityGraph, steps: &[Vec<Complaint>]) -> Result<f64> {
    let k = g.k();
    if k > OFFLINE_OPT_CAP {
        return Err(Error::Capacity {
            what: "vertex count for offline optimum",
            got: k,
            limit: OFFLINE_OPT_CAP,
        });
    }
    validate_complaints(k, f64::INFINITY, steps.iter().flatten())?;
    let full = 1usize << k;
    let mut valid = vec![false; full];
    let all: Vec<usize> = (0..k).collect();
    for_each_valid_state(g, OFFLINE_OPT_CAP, |s| valid[s.config_of(&all)] = true)?;
    let cost: Vec<f64> = (0..full)
        .map(|mask| (0..k).filter(|&v| mask >> v & 1 == 1).map(|v| g.cost(v)).sum())
        .collect();
    let mut dp = vec![f64::INFINITY; full];
    dp[0] = 0.0;
    let mut h = vec![0.0; full];
    for step in steps {
        // h(u) = min over valid supersets s of u of dp(s): unfixing is free.
        h.copy_from_slice(&dp);
        for v in 0..k {
            for mask in 0..full {
                if mask >> v & 1 == 0 {
                    h[mask] = h[mask].min(h[mask | 1 << v]);
                }
            }
        }
        // dp'(s) = c(s) + min over u ⊆ s of (h(u) − c(u)): pay for the newly fixed bits.
        for mask in 0..full {
            h[mask] -= cost[mask];
        }
        for v in 0..k {
            for mask in 0..full {
                if mask >> v & 1 == 1 {
                    h[mask] = h[mask].min(h[mask ^ 1 << v]);
                }
            }
        }
        for mask in 0..full {
            dp[mask] = if valid[mask] { h[mask] + cost[mask] } else { f64::INFINITY };
            if dp[mask].is_finite() {
                dp[mask] += step.iter().filter(|c| mask >> c.vertex & 1 == 0).map(|c| c.loss).sum::<f64>();
            }
        }
    }
    Ok(dp.into_iter().fold(f64::INFINITY, f64::min))
}

/// `alg / opt`; infinite when only the optimum is zero, 1 when both are.
pub fn competitive_ratio(alg_loss: f64, opt_loss: f64) -> f64 {
    if opt_loss > 0.0 {
        alg_loss / opt_loss
    } else if alg_loss > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

/// Parses `t i loss` lines (1-indexed vertex); `#` starts a comment. Lines
/// sharing `t` form one step; steps come out in ascending `t`.
pub fn parse_sequence(text: &str) -> Result<Vec<Vec<Complaint>>> {
    let mut steps: BTreeMap<u64, Vec<Complaint>> = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(n + 1, format!("expected `t i loss`, got {line:?}")));
        }
        let t: u64 = fields[0].parse().map_err(|_| parse_err(n + 1, format!("bad step {:?}", fields[0])))?;
        let i: usize = fields[1].parse().map_err(|_| parse_err(n + 1, format!("bad vertex {:?}", fields[1])))?;
        let loss: f64 = fields[2].parse().map_err(|_| parse_err(n + 1, format!("bad loss {:?}", fields[2])))?;
        if i == 0 {
            return Err(parse_err(n + 1, "vertices are numbered from 1"));
        }
        if !loss.is_finite() || loss < 0.0 {
            return Err(parse_err(n + 1, format!("loss {loss} must be finite and nonnegative")));
        }
        steps.entry(t).or_default().push(Complaint::new(i - 1, loss));
    }
    Ok(steps.into_values().collect())
}

pub fn sequence_to_text(steps: &[Vec<Complaint>]) -> String {
    let mut out = String::new();
    for (t, step) in steps.iter().enumerate() {
        for c in step {
            let _ = writeln!(out, "{} {} {}", t + 1, c.vertex + 1, c.loss);
        }
    }
    out
}

/// Two criteria joined by an edge with costs `1` and `c`.
pub fn path2(c: f64) -> Result<IncompatibilityGraph> {
    IncompatibilityGraph::new(2, vec![1.0, c], &[(0, 1)])
}

/// `reps` rounds of `c` unit complaints on the expensive vertex followed by one on the cheap one.
pub fn path2_sequence(c: usize, reps: usize) -> Vec<Vec<Complaint>> {
    let round = std::iter::repeat_n(Complaint::new(1, 1.0), c).chain(std::iter::once(Complaint::new(0, 1.0)));
    (0..reps).flat_map(|_| round.clone()).map(|c| vec![c]).collect()
}

/// Center `0` with cost `c` joined to `leaves` leaves of cost 1.
pub fn star(leaves: usize, c: f64) -> Result<IncompatibilityGraph> {
    let mut costs = vec![1.0; leaves + 1];
    costs[0] = c;
    let edges: Vec<(usize, usize)> = (1..=leaves).map(|l| (0, l)).collect();
    IncompatibilityGraph::new(leaves + 1, costs, &edges)
}
