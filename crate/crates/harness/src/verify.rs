//! `verify`: fixed-seed property suites with a machine-readable report.
//!
//! The report is JSON holding only seeds, counts and computed values, so two
//! runs with the same master seed produce identical bytes. Elapsed times go
//! to stderr as `verify: suite <name> elapsed_ms=<n>`.

use std::str::FromStr;
use std::time::Instant;

use fairres_core::adversarial::{
    competitive_ratio, flatten, offline_opt, path2, path2_sequence, run_barrier, run_naive_ski_rental, singleton_steps,
    Complaint,
};
use fairres_core::cover::{build_cover, reconstruct_mean, x_values};
use fairres_core::environment::{mean_loss_vector, CorrelationModel, CorrelationSet, ExperimentConfig, LossFamily};
use fairres_core::oracle::{lp_best_state_m1, Oracle, VertexCosts};
use fairres_core::stochastic::InitialPass;
use fairres_core::{CriteriaState, IncompatibilityGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{AdversarialSpec, Algorithm, InstanceSource, RunSpec};
use crate::error::Result;
use crate::seeds::{child, trial_seeds};
use crate::trial::{load_instance, run_stochastic, trial_comparator};

pub const DEFAULT_MASTER_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Reconstruction,
    Lp,
    RegretScaling,
    AdversarialRatio,
    All,
}

impl Suite {
    const EACH: [Suite; 4] = [Suite::Reconstruction, Suite::Lp, Suite::RegretScaling, Suite::AdversarialRatio];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Reconstruction => "reconstruction",
            Suite::Lp => "lp",
            Suite::RegretScaling => "regret_scaling",
            Suite::AdversarialRatio => "adversarial_ratio",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.id() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; expected reconstruction, lp, regret_scaling, adversarial_ratio or all"))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub details: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub master_seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

pub fn cmd_verify(suite: Suite, master: u64) -> Result<Report> {
    let chosen: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut suites = Vec::new();
    for s in chosen {
        // Each suite draws from its own stream, so running one alone gives the same numbers.
        let seed = child(master, Suite::EACH.iter().position(|&x| x == s).expect("listed") as u64);
        let start = Instant::now();
        let criteria = match s {
            Suite::Reconstruction => vec![reconstruction(seed)?],
            Suite::Lp => vec![lp(seed)?],
            Suite::RegretScaling => regret_scaling(seed)?,
            Suite::AdversarialRatio => adversarial_ratio(seed)?,
            Suite::All => unreachable!(),
        };
        eprintln!("verify: suite {} elapsed_ms={}", s.id(), start.elapsed().as_millis());
        suites.push(SuiteReport {
            name: s.id().into(),
            passed: criteria.iter().all(|c| c.passed),
            criteria,
        });
    }
    Ok(Report {
        master_seed: master,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn random_graph<R: Rng>(k: usize, p: f64, rng: &mut R) -> Result<IncompatibilityGraph> {
    let mut edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    let costs = (0..k).map(|_| rng.random_range(1.0..=5.0)).collect();
    Ok(IncompatibilityGraph::new(k, costs, &edges)?)
}

/// Singletons for every vertex plus up to `k` random sets of size `2..=m`.
fn random_model<R: Rng>(k: usize, m: usize, rng: &mut R) -> Result<CorrelationModel> {
    let mut sets = Vec::new();
    for i in 0..k {
        sets.push(CorrelationSet::new(vec![i], vec![rng.random_range(0.0..5.0), rng.random_range(0.0..2.0)])?);
    }
    if m >= 2 && k >= 2 {
        for _ in 0..rng.random_range(1..=k) {
            let size = rng.random_range(2..=m.min(k));
            let mut members = Vec::new();
            while members.len() < size {
                let v = rng.random_range(0..k);
                if !members.contains(&v) {
                    members.push(v);
                }
            }
            let theta = (0..1usize << size).map(|_| rng.random_range(0.0..3.0)).collect();
            sets.push(CorrelationSet::new(members, theta)?);
        }
    }
    Ok(CorrelationModel::new(k, sets)?)
}

/// Bit masks of every independent set, ascending.
fn valid_masks(g: &IncompatibilityGraph) -> Vec<u64> {
    (0u64..1 << g.k())
        .filter(|mask| g.edges().iter().all(|&(a, b)| mask >> a & 1 == 0 || mask >> b & 1 == 0))
        .collect()
}

fn state_of(k: usize, mask: u64) -> CriteriaState {
    CriteriaState::from_bits((0..k).map(|v| mask >> v & 1 == 1).collect())
}

/// `μ_i` read straight off the θ tables.
fn table_mean(model: &CorrelationModel, mask: u64, i: usize) -> f64 {
    model
        .sets()
        .iter()
        .filter(|set| set.members().contains(&i))
        .map(|set| {
            let row = set
                .members()
                .iter()
                .enumerate()
                .filter(|&(_, &v)| mask >> v & 1 == 1)
                .fold(0usize, |acc, (t, _)| acc | 1 << t);
            set.theta()[row]
        })
        .sum()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

const RECON_INSTANCES: usize = 100;
const RECON_TOL: f64 = 1e-9;

fn reconstruction(seed: u64) -> Result<Criterion> {
    let mut per_m = Vec::new();
    let mut passed = true;
    for m in 1..=3usize {
        let mut rng = ChaCha8Rng::seed_from_u64(child(seed, m as u64));
        let (mut checks, mut failures, mut worst, mut max_k) = (0u64, 0u64, 0.0f64, 0);
        for _ in 0..RECON_INSTANCES {
            let k = rng.random_range(1..=12);
            max_k = max_k.max(k);
            let p = rng.random_range(0.0..0.5);
            let g = random_graph(k, p, &mut rng)?;
            let model = random_model(k, m, &mut rng)?;
            let cover = build_cover(&g, &model)?;
            let at_cover: Vec<Vec<f64>> = cover.states().iter().map(|s| mean_loss_vector(&model, s)).collect();
            let x = x_values(&cover, &at_cover)?;
            for mask in valid_masks(&g) {
                let s = state_of(k, mask);
                let truth = mean_loss_vector(&model, &s);
                for i in 0..k {
                    let rec = reconstruct_mean(&cover, &x, &at_cover, &s, i)?;
                    let err = rel_err(rec, truth[i]).max(rel_err(rec, table_mean(&model, mask, i)));
                    worst = worst.max(err);
                    checks += 1;
                    if !(err <= RECON_TOL) {
                        failures += 1;
                    }
                }
            }
        }
        passed &= failures == 0;
        per_m.push(json!({
            "m": m,
            "instances": RECON_INSTANCES,
            "max_k": max_k,
            "checks": checks,
            "failures": failures,
            "max_rel_error": worst,
        }));
    }
    Ok(Criterion {
        id: 1,
        name: "reconstruction exactness".into(),
        passed,
        details: json!({ "tolerance": RECON_TOL, "by_m": per_m }),
    })
}

const LP_INSTANCES: usize = 200;
const LP_TOL: f64 = 1e-9;

fn lp(seed: u64) -> Result<Criterion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bad_ratio, mut bad_lower, mut bad_half, mut bad_valid) = (0, 0, 0, 0);
    let (mut worst_ratio, mut max_k) = (0.0f64, 0);
    for n in 0..LP_INSTANCES {
        let k = rng.random_range(2..=18);
        max_k = max_k.max(k);
        let p = rng.random_range(0.1..0.6);
        let g = random_graph(k, p, &mut rng)?;
        let unfixed: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..10.0)).collect();
        let fixed: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..10.0)).collect();
        let mut costs = VertexCosts::new(unfixed, fixed)?;
        // Every other instance also charges the fixing cost once.
        if n % 2 == 1 {
            costs = costs.with_fixing_costs(&g);
        }
        let value = |mask: u64| -> f64 {
            (0..k)
                .map(|i| if mask >> i & 1 == 1 { costs.fixed()[i] } else { costs.unfixed()[i] })
                .sum()
        };
        let opt = valid_masks(&g).into_iter().map(value).fold(f64::INFINITY, f64::min);
        let sol = lp_best_state_m1(&g, &costs)?;
        let mask = sol.state.fixed().fold(0u64, |acc, v| acc | 1 << v);
        let rounded = value(mask);
        let tol = LP_TOL * opt.abs().max(1.0);
        worst_ratio = worst_ratio.max(if opt > 0.0 { rounded / opt } else { 1.0 });
        if rounded > 2.0 * opt + tol {
            bad_ratio += 1;
        }
        if sol.lp_value > opt + tol {
            bad_lower += 1;
        }
        if sol.y.iter().any(|&y| [0.0, 0.5, 1.0].iter().all(|h| (y - h).abs() > LP_TOL)) {
            bad_half += 1;
        }
        if g.edges().iter().any(|&(a, b)| mask >> a & 1 == 1 && mask >> b & 1 == 1) {
            bad_valid += 1;
        }
    }
    Ok(Criterion {
        id: 2,
        name: "LP 2-approximation".into(),
        passed: bad_ratio + bad_lower + bad_half + bad_valid == 0,
        details: json!({
            "instances": LP_INSTANCES,
            "max_k": max_k,
            "max_rounded_over_opt": worst_ratio,
            "ratio_violations": bad_ratio,
            "lp_above_opt": bad_lower,
            "not_half_integral": bad_half,
            "invalid_states": bad_valid,
        }),
    })
}

const REGRET_SEEDS: usize = 20;

fn stochastic_spec(k: usize, alpha: f64, alg: Algorithm, horizon: usize, seeds: &[u64]) -> RunSpec {
    RunSpec {
        source: InstanceSource::Generated(ExperimentConfig::new(k, alpha, 10.0, 0)),
        algorithm: alg,
        horizon,
        b: 1.0,
        delta: None,
        oracle: Oracle::Auto,
        seeds: seeds.to_vec(),
        loss: LossFamily::Exponential,
        explore_scale: crate::config::DEFAULT_EXPLORE_SCALE,
        conf_scale: 10.0,
        initial: InitialPass::Lazy,
        traces: false,
        checkpoints: 1,
        adversarial: AdversarialSpec {
            crafted: None,
            c: 10.0,
            reps: 5,
            leaves: 4,
            graph: None,
            sequence: None,
            per_step: 1,
        },
        out: Default::default(),
    }
}

struct TrialResult {
    total_loss: f64,
    regret: f64,
    oracle_calls: usize,
}

/// Runs each algorithm on every seed's instance; `out[a][s]`.
fn run_all(k: usize, alpha: f64, algs: &[Algorithm], horizon: usize, seeds: &[u64]) -> Result<Vec<Vec<TrialResult>>> {
    let mut out: Vec<Vec<TrialResult>> = algs.iter().map(|_| Vec::new()).collect();
    for &seed in seeds {
        let base = stochastic_spec(k, alpha, algs[0], horizon, seeds);
        let inst = load_instance(&base, seed)?;
        let cmp = trial_comparator(&inst, seed)?;
        for (a, &alg) in algs.iter().enumerate() {
            let spec = RunSpec { algorithm: alg, ..base.clone() };
            let o = run_stochastic(alg, &inst, &cmp, &spec, seed)?;
            out[a].push(TrialResult {
                total_loss: o.trace.total_loss(),
                regret: o.regret.last().copied().unwrap_or(0.0),
                oracle_calls: o.trace.meta.oracle_calls,
            });
        }
    }
    Ok(out)
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

const SCALING_T: [usize; 3] = [20_000, 40_000, 80_000];

fn regret_scaling(seed: u64) -> Result<Vec<Criterion>> {
    let seeds = |n: u64| trial_seeds(child(seed, n), REGRET_SEEDS);
    let mut out = Vec::new();

    // Explore-then-exploit, k = 10, pairs at alpha = 0.5.
    let s3 = seeds(3);
    let mut regrets = Vec::new();
    for &t in &SCALING_T {
        let runs = run_all(10, 0.5, &[Algorithm::ExploreExploit], t, &s3)?;
        regrets.push(mean(runs[0].iter().map(|r| r.regret)));
    }
    let bound = 4f64.powf(2.0 / 3.0) * 1.5 * regrets[0];
    let per_step: Vec<f64> = regrets.iter().zip(SCALING_T).map(|(r, t)| r / t as f64).collect();
    let decreasing = per_step.windows(2).all(|w| w[1] < w[0]);
    out.push(Criterion {
        id: 3,
        name: "explore-then-exploit T^(2/3) scaling".into(),
        passed: regrets[2] <= bound && decreasing,
        details: json!({
            "k": 10, "alpha": 0.5, "lambda": 10.0, "seeds": REGRET_SEEDS,
            "T": SCALING_T, "mean_regret": regrets, "regret_over_T": per_step,
            "bound_at_80000": bound, "regret_over_T_decreasing": decreasing,
        }),
    });

    // UCB, k = 10, singleton sets only.
    let s4 = seeds(4);
    let (mut regrets, mut worst_calls, mut call_violations) = (Vec::new(), Vec::new(), 0);
    for &t in &SCALING_T {
        let runs = run_all(10, 0.0, &[Algorithm::UcbM1], t, &s4)?;
        regrets.push(mean(runs[0].iter().map(|r| r.regret)));
        let cap = 11.0 + 20.0 * (t as f64).log2();
        call_violations += runs[0].iter().filter(|r| r.oracle_calls as f64 > cap).count();
        worst_calls.push(json!({
            "T": t,
            "max_oracle_calls": runs[0].iter().map(|r| r.oracle_calls).max(),
            "bound": cap,
        }));
    }
    let bound = 2.0 * 1.5 * regrets[0];
    out.push(Criterion {
        id: 4,
        name: "UCB sqrt(T) scaling and oracle calls".into(),
        passed: regrets[2] <= bound && call_violations == 0,
        details: json!({
            "k": 10, "alpha": 0.0, "seeds": REGRET_SEEDS,
            "T": SCALING_T, "mean_regret": regrets, "bound_at_80000": bound,
            "oracle_calls": worst_calls, "call_bound_violations": call_violations,
        }),
    });

    // m = 1 head-to-head at T = 10^5.
    let mut by_k = Vec::new();
    let mut passed = true;
    for (n, k) in [(5u64, 10usize), (6, 50)] {
        let runs = run_all(k, 0.0, &[Algorithm::UcbM1, Algorithm::ExploreExploit], 100_000, &seeds(n))?;
        let wins = runs[0].iter().zip(&runs[1]).filter(|(u, e)| u.total_loss < e.total_loss).count();
        let frac = wins as f64 / REGRET_SEEDS as f64;
        passed &= frac >= 0.7;
        by_k.push(json!({
            "k": k, "ucb_wins": wins, "win_fraction": frac,
            "mean_loss_ucb_m1": mean(runs[0].iter().map(|r| r.total_loss)),
            "mean_loss_explore_exploit": mean(runs[1].iter().map(|r| r.total_loss)),
        }));
    }
    out.push(Criterion {
        id: 5,
        name: "m=1 comparison".into(),
        passed,
        details: json!({ "T": 100_000, "seeds": REGRET_SEEDS, "required_fraction": 0.7, "by_k": by_k }),
    });

    // Few pair sets: the sqrt(T) learner should win.
    let runs = run_all(50, 0.1, &[Algorithm::UcbGeneral, Algorithm::ExploreExploit], 100_000, &seeds(7))?;
    let wins = runs[0].iter().zip(&runs[1]).filter(|(u, e)| u.total_loss < e.total_loss).count();
    out.push(Criterion {
        id: 6,
        name: "alpha tradeoff at alpha=0.1".into(),
        passed: 2 * wins > REGRET_SEEDS,
        details: json!({
            "k": 50, "alpha": 0.1, "T": 100_000, "seeds": REGRET_SEEDS, "ucb_wins": wins,
            "mean_loss_ucb_general": mean(runs[0].iter().map(|r| r.total_loss)),
            "mean_loss_explore_exploit": mean(runs[1].iter().map(|r| r.total_loss)),
        }),
    });
    Ok(out)
}

const FUZZ_SEQUENCES: usize = 500;
const EDGELESS_SEQUENCES: usize = 200;

fn adversarial_ratio(seed: u64) -> Result<Vec<Criterion>> {
    let c = 10usize;
    let reps = 5usize;
    let g = path2(c as f64)?;
    let steps = path2_sequence(c, reps);
    let flat = flatten(&steps);
    let opt = offline_opt(&g, &steps)?;
    let naive = run_naive_ski_rental(&g, &flat)?;
    let run = run_barrier(&g, &flat)?;
    let first = &run.history[c - 1];
    let crafted = Criterion {
        id: 7,
        name: "PATH2 crafted instance".into(),
        passed: opt == (c + reps) as f64
            && naive == ((2 * c + 2) * reps) as f64
            && first.cumulative == (2 * c) as f64
            && first.fixed,
        details: json!({
            "C": c, "T": reps,
            "offline_opt": opt, "expected_opt": c + reps,
            "naive_ski_rental": naive, "expected_naive": (2 * c + 2) * reps,
            "barrier_first_phase": first.cumulative, "expected_first_phase": 2 * c,
            "barrier_fixes_after_first_phase": first.fixed,
            "barrier_total": run.total_loss,
        }),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(child(seed, 8));
    let mut by_b = Vec::new();
    let mut violations = 0;
    for (n, b) in [1.0, 5.0].into_iter().enumerate() {
        let (mut worst, mut count) = (0.0f64, 0);
        for _ in (n..FUZZ_SEQUENCES).step_by(2) {
            let k = rng.random_range(1..=8);
            let p = rng.random_range(0.0..0.6);
            let g = random_graph(k, p, &mut rng)?;
            let len = rng.random_range(1..=60);
            let steps: Vec<Vec<Complaint>> = (0..len)
                .map(|_| {
                    (0..rng.random_range(0..=2))
                        .map(|_| Complaint::new(rng.random_range(0..k), rng.random_range(0.0..=b)))
                        .collect()
                })
                .collect();
            let flat = flatten(&steps);
            let alg = run_barrier(&g, &flat)?.total_loss;
            let opt = offline_opt(&g, &singleton_steps(&flat))?;
            let ratio = competitive_ratio(alg, opt);
            worst = worst.max(ratio);
            count += 1;
            if alg > (2.0 * b + 4.0) * opt + 1e-9 {
                violations += 1;
            }
        }
        by_b.push(json!({ "B": b, "sequences": count, "bound": 2.0 * b + 4.0, "max_ratio": worst }));
    }

    let (mut edgeless_worst, mut edgeless_bad) = (0.0f64, 0);
    for _ in 0..EDGELESS_SEQUENCES {
        let k = rng.random_range(1..=6);
        let costs: Vec<f64> = (0..k).map(|_| rng.random_range(1..=5) as f64).collect();
        let g = IncompatibilityGraph::edgeless(costs)?;
        let seq: Vec<Complaint> = (0..rng.random_range(0..=60)).map(|_| Complaint::new(rng.random_range(0..k), 1.0)).collect();
        let alg = run_barrier(&g, &seq)?.total_loss;
        let opt = offline_opt(&g, &singleton_steps(&seq))?;
        edgeless_worst = edgeless_worst.max(competitive_ratio(alg, opt));
        if alg > 2.0 * opt + 1e-9 {
            edgeless_bad += 1;
        }
    }
    let fuzz = Criterion {
        id: 8,
        name: "competitive-ratio fuzz".into(),
        passed: violations == 0 && edgeless_bad == 0,
        details: json!({
            "sequences": FUZZ_SEQUENCES,
            "max_k": 8, "max_T": 60,
            "by_B": by_b,
            "violations": violations,
            "edgeless_sequences": EDGELESS_SEQUENCES,
            "edgeless_max_ratio": edgeless_worst,
            "edgeless_violations": edgeless_bad,
        }),
    };
    Ok(vec![crafted, fuzz])
}
