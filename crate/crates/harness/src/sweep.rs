//! `sweep`: one parameter over a value list, several learners per instance.
//!
//! Writes `sweep.csv` with columns
//! `param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret`, ordered by
//! value, seed, algorithm and checkpoint; `sweep_errors.csv`
//! (`param_value,algorithm,seed,error`) for runs that could not start, e.g. an
//! exploration phase longer than T; one chart per value; and `meta.json`.
//! Every learner of a trial sees the same instance and the same loss seed.

use std::fmt::Write as _;

use serde::Serialize;

use crate::config::{InstanceSource, RunSpec, SweepParam, SweepSpec};
use crate::error::{write_file, HarnessError, Result};
use crate::svg::render_charts;
use crate::trial::{load_instance, run_stochastic, trial_comparator};

pub const SWEEP_HEADER: &str = "param_value,algorithm,seed,T_checkpoint,cum_loss,cum_regret";
pub const ERRORS_HEADER: &str = "param_value,algorithm,seed,error";

/// About `count` log-spaced steps in `1..=horizon`, always ending at `horizon`.
pub fn checkpoints(horizon: usize, count: usize) -> Vec<usize> {
    let top = (horizon as f64).log10();
    let mut out: Vec<usize> = (1..=count)
        .map(|j| 10f64.powf(top * j as f64 / count as f64).round() as usize)
        .map(|t| t.clamp(1, horizon))
        .collect();
    out.push(horizon);
    out.dedup();
    out
}

/// The base `RunSpec` with the swept parameter set to `value`.
pub fn spec_for(sweep: &SweepSpec, value: f64) -> Result<RunSpec> {
    let mut spec = sweep.base.clone();
    match (sweep.param, &mut spec.source) {
        (SweepParam::T, _) => spec.horizon = value as usize,
        (SweepParam::Alpha, InstanceSource::Generated(cfg)) => cfg.alpha = value,
        (SweepParam::Lambda, InstanceSource::Generated(cfg)) => cfg.lambda = value,
        (SweepParam::K, InstanceSource::Generated(cfg)) => cfg.k = value as usize,
        _ => return Err(HarnessError::usage("swept parameter needs a generated instance")),
    }
    if let InstanceSource::Generated(cfg) = &spec.source {
        cfg.validate()?;
    }
    Ok(spec)
}

#[derive(Serialize)]
struct SweepMeta<'a> {
    spec: &'a SweepSpec,
    checkpoints: Vec<(String, Vec<usize>)>,
}

pub struct SweepOutput {
    pub csv: String,
    pub errors: String,
    pub charts: Vec<String>,
}

pub fn cmd_sweep(sweep: &SweepSpec) -> Result<SweepOutput> {
    let mut csv = format!("{SWEEP_HEADER}\n");
    let mut errors = format!("{ERRORS_HEADER}\n");
    let mut marks = Vec::new();
    for &value in &sweep.values {
        let spec = spec_for(sweep, value)?;
        let cps = checkpoints(spec.horizon, spec.checkpoints);
        for &seed in &spec.seeds {
            let inst = load_instance(&spec, seed)?;
            let cmp = trial_comparator(&inst, seed)?;
            for &alg in &sweep.algorithms {
                let outcome = match run_stochastic(alg, &inst, &cmp, &spec, seed) {
                    Ok(o) => o,
                    Err(HarnessError::Core(e)) => {
                        eprintln!("sweep: {}={value} {alg} seed {seed}: {e}", sweep.param.id());
                        let _ = writeln!(errors, "{value},{alg},{seed},\"{}\"", e.to_string().replace('"', "\"\""));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let cum = outcome.trace.cumulative_loss();
                for &t in &cps {
                    let _ = writeln!(csv, "{value},{alg},{seed},{t},{},{}", cum[t - 1], outcome.regret[t - 1]);
                }
            }
        }
        marks.push((value.to_string(), cps));
    }
    let out = &sweep.base.out;
    write_file(&out.join("sweep.csv"), &csv)?;
    write_file(&out.join("sweep_errors.csv"), &errors)?;
    let mut names = Vec::new();
    for (name, svg) in render_charts(&csv, sweep.param.id())? {
        write_file(&out.join(&name), &svg)?;
        names.push(name);
    }
    let meta = SweepMeta {
        spec: sweep,
        checkpoints: marks,
    };
    let json = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    write_file(&out.join("meta.json"), &(json + "\n"))?;
    Ok(SweepOutput {
        csv,
        errors,
        charts: names,
    })
}
