//! `run`: one algorithm over a list of seeds.
//!
//! Stochastic learners write `summary.csv` with columns
//! `seed,algorithm,k,m,T,total_loss,final_pseudo_regret,oracle_calls,switches,comparator_exact`
//! and one `trace_<alg>_<seed>.csv` per seed. Adversarial algorithms write
//! `summary.csv` as `seed,k,T,B,alg_loss,opt_loss,ratio` (T counts complaint
//! steps) and, for the barrier algorithm, a per-complaint
//! `trace_barrier_<seed>.csv`. Both summaries end with `mean` and `stddev`
//! rows; `meta.json` records the resolved `RunSpec` and per-trial metadata.

use std::fmt::Write as _;

use fairres_core::adversarial::competitive_ratio;
use fairres_core::stochastic::{trace_csv, Comparator, RunMeta};
use serde::Serialize;

use crate::config::RunSpec;
use crate::error::{write_file, Result};
use crate::seeds::{instance_seed, run_seed};
use crate::trial::{adversarial_problem, load_instance, run_adversarial, run_stochastic, trial_comparator};

pub const STOCHASTIC_HEADER: &str =
    "seed,algorithm,k,m,T,total_loss,final_pseudo_regret,oracle_calls,switches,comparator_exact";
pub const ADVERSARIAL_HEADER: &str = "seed,k,T,B,alg_loss,opt_loss,ratio";

#[derive(Serialize)]
struct StochasticTrial {
    seed: u64,
    instance_seed: Option<u64>,
    run_seed: u64,
    comparator: Comparator,
    meta: RunMeta,
}

#[derive(Serialize)]
struct AdversarialTrial {
    seed: u64,
    k: usize,
    steps: usize,
    complaints: usize,
    alg_loss: f64,
    opt_loss: Option<f64>,
    fixes: Option<usize>,
}

#[derive(Serialize)]
struct RunMetaFile<'a, T> {
    spec: &'a RunSpec,
    trials: Vec<T>,
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Appends `mean` and `stddev` rows; `rows[r][c]` are the numeric columns after the label columns.
fn aggregate_rows(out: &mut String, labels: &str, rows: &[Vec<f64>]) {
    let cols = rows.first().map_or(0, Vec::len);
    let stats: Vec<(f64, f64)> = (0..cols)
        .map(|c| mean_std(&rows.iter().map(|r| r[c]).collect::<Vec<_>>()))
        .collect();
    for (name, pick) in [("mean", 0), ("stddev", 1)] {
        let vals: Vec<String> = stats.iter().map(|s| if pick == 0 { s.0 } else { s.1 }.to_string()).collect();
        let _ = writeln!(out, "{name}{labels},{}", vals.join(","));
    }
}

/// Executes a `RunSpec` and writes its outputs; returns the summary CSV text.
pub fn cmd_run(spec: &RunSpec) -> Result<String> {
    if spec.algorithm.is_adversarial() {
        run_adversarial_spec(spec)
    } else {
        run_stochastic_spec(spec)
    }
}

fn run_stochastic_spec(spec: &RunSpec) -> Result<String> {
    let alg = spec.algorithm;
    let mut summary = format!("{STOCHASTIC_HEADER}\n");
    let mut numeric = Vec::new();
    let mut trials = Vec::new();
    let generated = matches!(spec.source, crate::config::InstanceSource::Generated(_));
    for &seed in &spec.seeds {
        let inst = load_instance(spec, seed)?;
        let cmp = trial_comparator(&inst, seed)?;
        let outcome = run_stochastic(alg, &inst, &cmp, spec, seed)?;
        let trace = &outcome.trace;
        if spec.traces {
            write_file(&spec.out.join(format!("trace_{alg}_{seed}.csv")), &trace_csv(trace, &outcome.regret))?;
        }
        let row = vec![
            inst.graph.k() as f64,
            inst.model.m() as f64,
            spec.horizon as f64,
            trace.total_loss(),
            outcome.regret.last().copied().unwrap_or(0.0),
            trace.meta.oracle_calls as f64,
            trace.switches() as f64,
            if cmp.approximate { 0.0 } else { 1.0 },
        ];
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(summary, "{seed},{alg},{}", cells.join(","));
        numeric.push(row);
        trials.push(StochasticTrial {
            seed,
            instance_seed: generated.then(|| instance_seed(seed)),
            run_seed: run_seed(seed),
            comparator: cmp,
            meta: outcome.trace.meta,
        });
    }
    aggregate_rows(&mut summary, &format!(",{alg}"), &numeric);
    write_file(&spec.out.join("summary.csv"), &summary)?;
    write_meta(spec, trials)?;
    Ok(summary)
}

fn run_adversarial_spec(spec: &RunSpec) -> Result<String> {
    let alg = spec.algorithm;
    let mut summary = format!("{ADVERSARIAL_HEADER}\n");
    let mut numeric = Vec::new();
    let mut trials = Vec::new();
    for &seed in &spec.seeds {
        let problem = adversarial_problem(spec, seed)?;
        let outcome = run_adversarial(alg, &problem)?;
        let opt = outcome.opt_loss.unwrap_or(f64::NAN);
        let ratio = outcome.opt_loss.map_or(f64::NAN, |o| competitive_ratio(outcome.alg_loss, o));
        let k = problem.graph.k();
        let row = vec![
            k as f64,
            problem.steps.len() as f64,
            spec.b,
            outcome.alg_loss,
            opt,
            ratio,
        ];
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        let _ = writeln!(summary, "{seed},{}", cells.join(","));
        numeric.push(row);
        if let (Some(run), true) = (&outcome.barrier, spec.traces) {
            let mut trace = String::from("index,vertex,loss,charged,fixed,cumulative,kappa\n");
            for (n, step) in run.history.iter().enumerate() {
                let kappa: Vec<String> = step.kappa.iter().map(f64::to_string).collect();
                let _ = writeln!(
                    trace,
                    "{},{},{},{},{},{},{}",
                    n + 1,
                    step.complaint.vertex + 1,
                    step.complaint.loss,
                    step.charged,
                    u8::from(step.fixed),
                    step.cumulative,
                    kappa.join(";")
                );
            }
            write_file(&spec.out.join(format!("trace_barrier_{seed}.csv")), &trace)?;
        }
        trials.push(AdversarialTrial {
            seed,
            k,
            steps: problem.steps.len(),
            complaints: problem.steps.iter().map(Vec::len).sum(),
            alg_loss: outcome.alg_loss,
            opt_loss: outcome.opt_loss,
            fixes: outcome.barrier.as_ref().map(|r| r.fixes),
        });
    }
    aggregate_rows(&mut summary, "", &numeric);
    write_file(&spec.out.join("summary.csv"), &summary)?;
    write_meta(spec, trials)?;
    Ok(summary)
}

fn write_meta<T: Serialize>(spec: &RunSpec, trials: Vec<T>) -> Result<()> {
    let json = serde_json::to_string_pretty(&RunMetaFile { spec, trials }).expect("metadata serializes");
    write_file(&spec.out.join("meta.json"), &(json + "\n"))
}
