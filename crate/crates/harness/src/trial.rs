//! One trial: build the instance for a seed and run one algorithm on it.

use fairres_core::adversarial::{
    flatten, offline_opt, parse_sequence, path2, path2_sequence, run_barrier, run_naive_ski_rental, singleton_steps,
    star, validate_complaints, AdversarialRun, Complaint, OFFLINE_OPT_CAP,
};
use fairres_core::cover::build_cover;
use fairres_core::environment::{generate_instance, Instance};
use fairres_core::stochastic::{
    comparator, pseudo_regret, run_explore_exploit, run_ucb_general, run_ucb_m1, Comparator, ExploreExploitParams,
    RunTrace, UcbParams,
};
use fairres_core::IncompatibilityGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Algorithm, CraftedKind, InstanceSource, RunSpec};
use crate::error::{read_file, HarnessError, Result};
use crate::seeds::{comparator_seed, instance_seed, run_seed};

pub fn load_instance(spec: &RunSpec, trial: u64) -> Result<Instance> {
    match &spec.source {
        InstanceSource::Generated(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = instance_seed(trial);
            Ok(generate_instance(&cfg)?)
        }
        InstanceSource::File(path) => Instance::parse(&read_file(path)?).map_err(|source| HarnessError::Input {
            path: path.clone(),
            source,
        }),
    }
}

pub fn trial_comparator(inst: &Instance, trial: u64) -> Result<Comparator> {
    Ok(comparator(&inst.graph, &inst.model, comparator_seed(trial))?)
}

pub struct StochasticOutcome {
    pub trace: RunTrace,
    pub regret: Vec<f64>,
}

pub fn run_stochastic(
    alg: Algorithm,
    inst: &Instance,
    cmp: &Comparator,
    spec: &RunSpec,
    trial: u64,
) -> Result<StochasticOutcome> {
    let (g, model) = (&inst.graph, &inst.model);
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed(trial));
    let ucb = || UcbParams {
        delta: spec.delta,
        conf_scale: spec.conf_scale,
        oracle: spec.oracle,
        initial: spec.initial,
        ..UcbParams::new(spec.horizon, spec.b)
    };
    let trace = match alg {
        Algorithm::ExploreExploit => {
            let cover = build_cover(g, model)?;
            let params = ExploreExploitParams {
                scale: spec.explore_scale,
                oracle: spec.oracle,
                ..ExploreExploitParams::new(spec.horizon, spec.b)
            };
            run_explore_exploit(g, model, spec.loss, &cover, &params, &mut rng)?
        }
        Algorithm::UcbM1 => run_ucb_m1(g, model, spec.loss, &ucb(), &mut rng)?,
        Algorithm::UcbGeneral => run_ucb_general(g, model, spec.loss, &ucb(), &mut rng)?,
        Algorithm::Barrier | Algorithm::NaiveSki => {
            return Err(HarnessError::usage(format!("{alg} runs on complaint sequences, not a loss model")))
        }
    };
    let regret = pseudo_regret(&trace, cmp);
    Ok(StochasticOutcome { trace, regret })
}

/// A graph plus the complaint steps presented to it.
pub struct AdversarialProblem {
    pub graph: IncompatibilityGraph,
    pub steps: Vec<Vec<Complaint>>,
}

pub fn adversarial_problem(spec: &RunSpec, trial: u64) -> Result<AdversarialProblem> {
    let adv = &spec.adversarial;
    let c = adv.c;
    let graph = match adv.crafted {
        Some(CraftedKind::Path2) => path2(c)?,
        Some(CraftedKind::Star) => star(adv.leaves, c)?,
        None => match &adv.graph {
            Some(path) => IncompatibilityGraph::parse(&read_file(path)?).map_err(|source| HarnessError::Input {
                path: path.clone(),
                source,
            })?,
            None => load_instance(spec, trial)?.graph,
        },
    };
    graph.validate_adversarial()?;
    let k = graph.k();
    let whole = |what: &str| {
        if c.fract() != 0.0 || c < 1.0 {
            Err(HarnessError::usage(format!("{what} needs a positive integer C, got {c}")))
        } else {
            Ok(c as usize)
        }
    };
    let steps = match (&adv.sequence, adv.crafted) {
        (Some(path), _) => parse_sequence(&read_file(path)?).map_err(|source| HarnessError::Input {
            path: path.clone(),
            source,
        })?,
        (None, Some(CraftedKind::Path2)) => path2_sequence(whole("path2")?, adv.reps),
        (None, Some(CraftedKind::Star)) => {
            // C unit complaints on the center, then C on each leaf in turn.
            let c = whole("star")?;
            (0..=adv.leaves)
                .flat_map(|v| std::iter::repeat_n(vec![Complaint::new(v, 1.0)], c))
                .collect()
        }
        (None, None) => {
            let mut rng = ChaCha8Rng::seed_from_u64(run_seed(trial));
            random_steps(k, spec.horizon, spec.b, spec.adversarial.per_step, &mut rng)
        }
    };
    validate_complaints(k, spec.b, steps.iter().flatten())?;
    Ok(AdversarialProblem { graph, steps })
}

/// `len` steps of exactly `per_step` complaints, vertices uniform, losses uniform on `[0, b]`.
pub fn random_steps<R: Rng + ?Sized>(k: usize, len: usize, b: f64, per_step: usize, rng: &mut R) -> Vec<Vec<Complaint>> {
    (0..len)
        .map(|_| {
            (0..per_step)
                .map(|_| Complaint::new(rng.random_range(0..k), rng.random_range(0.0..=b)))
                .collect()
        })
        .collect()
}

pub struct AdversarialOutcome {
    pub alg_loss: f64,
    /// `None` when the graph is too large for the exact offline optimum.
    pub opt_loss: Option<f64>,
    pub barrier: Option<AdversarialRun>,
}

/// Runs on the flattened sequence; the offline optimum sees the same flattened steps.
pub fn run_adversarial(alg: Algorithm, problem: &AdversarialProblem) -> Result<AdversarialOutcome> {
    let g = &problem.graph;
    let flat = flatten(&problem.steps);
    let (alg_loss, barrier) = match alg {
        Algorithm::Barrier => {
            let run = run_barrier(g, &flat)?;
            (run.total_loss, Some(run))
        }
        Algorithm::NaiveSki => (run_naive_ski_rental(g, &flat)?, None),
        _ => return Err(HarnessError::usage(format!("{alg} needs a loss model, not a complaint sequence"))),
    };
    let opt_loss = if g.k() <= OFFLINE_OPT_CAP {
        Some(offline_opt(g, &singleton_steps(&flat))?)
    } else {
        None
    };
    Ok(AdversarialOutcome {
        alg_loss,
        opt_loss,
        barrier,
    })
}
