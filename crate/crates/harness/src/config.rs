//! Config files and the resolved `RunSpec` / `SweepSpec`.
//!
//! A config file is TOML with up to four tables; every key is optional and
//! command-line flags win over the file:
//!
//! ```toml
//! [instance]          # synthetic generator, or `file` to load an instance
//! k = 50
//! alpha = 0.5
//! lambda = 10.0
//! cost_range = [1.0, 5.0]
//! p = 0.15            # edge probability, default 2 ln k / k
//! file = "inst.txt"
//!
//! [run]
//! alg = "ucb_general" # explore_exploit | ucb_m1 | ucb_general | barrier | naive_ski
//! T = 100000
//! B = 1.0
//! delta = 1e-20       # default 1/T^4
//! oracle = "auto"     # auto | exact | lp | local
//! seed = 0            # master seed
//! seeds = 1           # number of trials, or an explicit `seed_list`
//! loss = "exponential"  # exponential | constant | clipped (with `clip`)
//! explore_scale = 1.0
//! conf_scale = 10.0
//! initial = "lazy"    # lazy | eager
//! traces = true       # per-seed trace CSVs
//! checkpoints = 24    # log-spaced sweep checkpoints
//! out = "out"
//!
//! [sweep]
//! param = "alpha"     # alpha | lambda | k | T
//! values = [0.1, 0.5, 1.0, 2.0, 4.0]
//! algorithms = ["explore_exploit", "ucb_general"]
//!
//! [adversarial]
//! crafted = "path2"   # path2 | star; otherwise a random sequence
//! c = 10.0
//! reps = 5
//! leaves = 4
//! graph = "graph.txt"
//! sequence = "seq.txt"
//! per_step = 1        # complaints per step of a random sequence
//! ```
//!
//! Relative paths are taken relative to the working directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fairres_core::environment::{ExperimentConfig, LossFamily};
use fairres_core::oracle::Oracle;
use fairres_core::stochastic::InitialPass;
use serde::{Deserialize, Serialize};

use crate::error::{read_file, HarnessError, Result};
use crate::seeds::trial_seeds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ExploreExploit,
    UcbM1,
    UcbGeneral,
    Barrier,
    NaiveSki,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::ExploreExploit,
        Algorithm::UcbM1,
        Algorithm::UcbGeneral,
        Algorithm::Barrier,
        Algorithm::NaiveSki,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::ExploreExploit => "explore_exploit",
            Algorithm::UcbM1 => "ucb_m1",
            Algorithm::UcbGeneral => "ucb_general",
            Algorithm::Barrier => "barrier",
            Algorithm::NaiveSki => "naive_ski",
        }
    }

    pub fn is_adversarial(self) -> bool {
        matches!(self, Algorithm::Barrier | Algorithm::NaiveSki)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}; expected one of {}", ids(&Algorithm::ALL)))
    }
}

fn ids(algs: &[Algorithm]) -> String {
    algs.iter().map(|a| a.id()).collect::<Vec<_>>().join(", ")
}

pub fn parse_oracle(s: &str) -> std::result::Result<Oracle, String> {
    match s {
        "auto" => Ok(Oracle::Auto),
        "exact" => Ok(Oracle::Exact),
        "lp" => Ok(Oracle::Lp),
        "local" => Ok(Oracle::Local),
        _ => Err(format!("unknown oracle {s:?}; expected auto, exact, lp or local")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha,
    Lambda,
    K,
    T,
}

impl SweepParam {
    pub fn id(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Lambda => "lambda",
            SweepParam::K => "k",
            SweepParam::T => "T",
        }
    }
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(SweepParam::Alpha),
            "lambda" => Ok(SweepParam::Lambda),
            "k" => Ok(SweepParam::K),
            "T" | "t" => Ok(SweepParam::T),
            _ => Err(format!("unknown sweep parameter {s:?}; expected alpha, lambda, k or T")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CraftedKind {
    Path2,
    Star,
}

impl FromStr for CraftedKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "path2" => Ok(CraftedKind::Path2),
            "star" => Ok(CraftedKind::Star),
            _ => Err(format!("unknown crafted instance {s:?}; expected path2 or star")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Exponential,
    Constant,
    Clipped,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub instance: InstanceSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub adversarial: AdversarialSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSection {
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub cost_range: Option<(f64, f64)>,
    pub p: Option<f64>,
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub alg: Option<Algorithm>,
    #[serde(rename = "T")]
    pub horizon: Option<usize>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    pub delta: Option<f64>,
    pub oracle: Option<Oracle>,
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub seed_list: Option<Vec<u64>>,
    pub loss: Option<LossKind>,
    pub clip: Option<f64>,
    pub explore_scale: Option<f64>,
    pub conf_scale: Option<f64>,
    pub initial: Option<InitialPass>,
    pub traces: Option<bool>,
    pub checkpoints: Option<usize>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: Option<SweepParam>,
    pub values: Option<Vec<f64>>,
    pub algorithms: Option<Vec<Algorithm>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarialSection {
    pub crafted: Option<CraftedKind>,
    pub c: Option<f64>,
    pub reps: Option<usize>,
    pub leaves: Option<usize>,
    pub graph: Option<PathBuf>,
    pub sequence: Option<PathBuf>,
    pub per_step: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_file(path)?;
        toml::from_str(&text).map_err(|e| HarnessError::usage(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line; each one overrides the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub seeds: Option<usize>,
    pub horizon: Option<usize>,
    pub b: Option<f64>,
    pub delta: Option<f64>,
    pub alg: Option<Algorithm>,
    pub oracle: Option<Oracle>,
    pub out: Option<PathBuf>,
    pub k: Option<usize>,
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub instance: Option<PathBuf>,
    pub explore_scale: Option<f64>,
    pub conf_scale: Option<f64>,
    pub traces: Option<bool>,
    pub param: Option<SweepParam>,
    pub values: Option<Vec<f64>>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub crafted: Option<CraftedKind>,
    pub c: Option<f64>,
    pub reps: Option<usize>,
    pub graph: Option<PathBuf>,
    pub sequence: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceSource {
    Generated(ExperimentConfig),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialSpec {
    pub crafted: Option<CraftedKind>,
    pub c: f64,
    pub reps: usize,
    pub leaves: usize,
    pub graph: Option<PathBuf>,
    pub sequence: Option<PathBuf>,
    pub per_step: usize,
}

/// Everything a `run` needs, after defaults and overrides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSpec {
    pub source: InstanceSource,
    pub algorithm: Algorithm,
    pub horizon: usize,
    pub b: f64,
    pub delta: Option<f64>,
    pub oracle: Oracle,
    pub seeds: Vec<u64>,
    pub loss: LossFamily,
    pub explore_scale: f64,
    pub conf_scale: f64,
    pub initial: InitialPass,
    pub traces: bool,
    pub checkpoints: usize,
    pub adversarial: AdversarialSpec,
    /// Not serialized, so outputs do not depend on where they are written.
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub base: RunSpec,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

pub const DEFAULT_HORIZON: usize = 100_000;
/// Exploration multiplier used by the harness; see the README for why it is not 10.
pub const DEFAULT_EXPLORE_SCALE: f64 = 1.0;
pub const DEFAULT_CHECKPOINTS: usize = 24;

impl ConfigFile {
    /// Resolves the `[instance]` table into a generator config (seed left at 0).
    pub fn experiment_config(&self, ov: &Overrides) -> ExperimentConfig {
        let inst = &self.instance;
        let mut cfg = ExperimentConfig::new(
            ov.k.or(inst.k).unwrap_or(50),
            ov.alpha.or(inst.alpha).unwrap_or(0.5),
            ov.lambda.or(inst.lambda).unwrap_or(10.0),
            0,
        );
        if let Some(range) = inst.cost_range {
            cfg.cost_range = range;
        }
        cfg.p = inst.p;
        cfg
    }

    pub fn run_spec(&self, ov: &Overrides, default_seeds: usize) -> Result<RunSpec> {
        let run = &self.run;
        let source = match ov.instance.clone().or_else(|| self.instance.file.clone()) {
            Some(path) => {
                if !path.exists() {
                    return Err(HarnessError::usage(format!("instance file {} does not exist", path.display())));
                }
                InstanceSource::File(path)
            }
            None => {
                let cfg = self.experiment_config(ov);
                cfg.validate()?;
                InstanceSource::Generated(cfg)
            }
        };
        let seeds = match (&run.seed_list, ov.seed.or(run.seed), ov.seeds.or(run.seeds)) {
            (Some(list), None, None) => list.clone(),
            (_, master, n) => trial_seeds(master.unwrap_or(0), n.unwrap_or(default_seeds)),
        };
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if seeds.is_empty() || sorted.len() != seeds.len() {
            return Err(HarnessError::usage("seed list must be nonempty with distinct entries"));
        }
        let horizon = ov.horizon.or(run.horizon).unwrap_or(DEFAULT_HORIZON);
        if horizon == 0 {
            return Err(HarnessError::usage("T must be at least 1"));
        }
        let b = ov.b.or(run.b).unwrap_or(1.0);
        if !(b > 0.0 && b.is_finite()) {
            return Err(HarnessError::usage("B must be positive"));
        }
        let delta = ov.delta.or(run.delta);
        if let Some(d) = delta.filter(|d| !(*d > 0.0 && *d < 1.0)) {
            return Err(HarnessError::usage(format!("delta {d} must lie in (0, 1)")));
        }
        let loss = match run.loss.unwrap_or(LossKind::Exponential) {
            LossKind::Exponential => LossFamily::Exponential,
            LossKind::Constant => LossFamily::Constant,
            LossKind::Clipped => LossFamily::ClippedExponential {
                cap: run.clip.ok_or_else(|| HarnessError::usage("loss = \"clipped\" needs `clip`"))?,
            },
        };
        let adv = &self.adversarial;
        let adversarial = AdversarialSpec {
            crafted: ov.crafted.or(adv.crafted),
            c: ov.c.or(adv.c).unwrap_or(10.0),
            reps: ov.reps.or(adv.reps).unwrap_or(5),
            leaves: adv.leaves.unwrap_or(4),
            graph: ov.graph.clone().or_else(|| adv.graph.clone()),
            sequence: ov.sequence.clone().or_else(|| adv.sequence.clone()),
            per_step: adv.per_step.unwrap_or(1),
        };
        for path in adversarial.graph.iter().chain(&adversarial.sequence) {
            if !path.exists() {
                return Err(HarnessError::usage(format!("{} does not exist", path.display())));
            }
        }
        Ok(RunSpec {
            source,
            algorithm: ov.alg.or(run.alg).unwrap_or(Algorithm::UcbGeneral),
            horizon,
            b,
            delta,
            oracle: ov.oracle.or(run.oracle).unwrap_or_default(),
            seeds,
            loss,
            explore_scale: ov.explore_scale.or(run.explore_scale).unwrap_or(DEFAULT_EXPLORE_SCALE),
            conf_scale: ov.conf_scale.or(run.conf_scale).unwrap_or(10.0),
            initial: run.initial.unwrap_or_default(),
            traces: ov.traces.or(run.traces).unwrap_or(true),
            checkpoints: run.checkpoints.unwrap_or(DEFAULT_CHECKPOINTS).max(1),
            adversarial,
            out: ov.out.clone().or_else(|| run.out.clone()).unwrap_or_else(|| PathBuf::from("out")),
        })
    }

    pub fn sweep_spec(&self, ov: &Overrides) -> Result<SweepSpec> {
        let base = self.run_spec(ov, 20)?;
        let param = ov
            .param
            .or(self.sweep.param)
            .ok_or_else(|| HarnessError::usage("sweep needs a parameter (--param)"))?;
        let values = ov
            .values
            .clone()
            .or_else(|| self.sweep.values.clone())
            .unwrap_or_else(|| match param {
                SweepParam::Alpha => vec![0.1, 0.5, 1.0, 2.0, 4.0],
                SweepParam::Lambda => vec![2.0, 10.0],
                SweepParam::K => vec![10.0, 50.0],
                SweepParam::T => vec![1e4, 1e5],
            });
        if values.is_empty() {
            return Err(HarnessError::usage("sweep value list is empty"));
        }
        if param != SweepParam::T && param != SweepParam::K && !matches!(base.source, InstanceSource::Generated(_)) {
            return Err(HarnessError::usage("sweeping alpha or lambda needs a generated instance"));
        }
        if param == SweepParam::K && !matches!(base.source, InstanceSource::Generated(_)) {
            return Err(HarnessError::usage("sweeping k needs a generated instance"));
        }
        if matches!(param, SweepParam::K | SweepParam::T) && values.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(HarnessError::usage(format!("{} values must be positive integers", param.id())));
        }
        let algorithms = ov
            .algorithms
            .clone()
            .or_else(|| self.sweep.algorithms.clone())
            .unwrap_or_else(|| vec![Algorithm::ExploreExploit, Algorithm::UcbGeneral]);
        if algorithms.is_empty() {
            return Err(HarnessError::usage("sweep needs at least one algorithm"));
        }
        if let Some(a) = algorithms.iter().find(|a| a.is_adversarial()) {
            return Err(HarnessError::usage(format!("sweeps compare stochastic learners; {a} is adversarial")));
        }
        Ok(SweepSpec {
            base,
            param,
            values,
            algorithms,
        })
    }
}
