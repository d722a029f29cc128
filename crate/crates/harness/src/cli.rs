//! Command-line parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fairres_core::oracle::Oracle;

use crate::config::{parse_oracle, Algorithm, ConfigFile, CraftedKind, Overrides, SweepParam};
use crate::error::{read_file, write_file, HarnessError, Result};
use crate::gen::cmd_gen;
use crate::run::cmd_run;
use crate::svg::render_charts;
use crate::sweep::cmd_sweep;
use crate::verify::{cmd_verify, Suite, DEFAULT_MASTER_SEED};

#[derive(Debug, Parser)]
#[command(name = "fairres", version, about = "Simulate online fairness-criteria resolution under complaints")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic instance file.
    Gen(CommonArgs),
    /// Run one algorithm over a list of seeds.
    Run(CommonArgs),
    /// Sweep one parameter and chart mean cumulative loss.
    Sweep(SweepArgs),
    /// Run the fixed-seed property suites.
    Verify(VerifyArgs),
    /// Re-render sweep charts from a sweep CSV.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (the generator seed for `gen`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of trials.
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Horizon.
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    /// Bound on per-step losses.
    #[arg(long = "B")]
    pub b: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// explore_exploit | ucb_m1 | ucb_general | barrier | naive_ski
    #[arg(long)]
    pub alg: Option<Algorithm>,
    /// auto | exact | lp | local
    #[arg(long, value_parser = parse_oracle)]
    pub oracle: Option<Oracle>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Instance file instead of a generated instance.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub explore_scale: Option<f64>,
    #[arg(long)]
    pub conf_scale: Option<f64>,
    /// Skip the per-seed trace CSVs.
    #[arg(long)]
    pub no_traces: bool,
    /// Crafted adversarial instance: path2 | star.
    #[arg(long)]
    pub crafted: Option<CraftedKind>,
    /// Expensive fixing cost of a crafted instance.
    #[arg(long)]
    pub c: Option<f64>,
    /// Rounds of the crafted PATH2 sequence.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Graph file for adversarial runs.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Complaint sequence file (`t i loss` lines).
    #[arg(long)]
    pub sequence: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// alpha | lambda | k | T
    #[arg(long)]
    pub param: Option<SweepParam>,
    /// Comma-separated values.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    /// Comma-separated algorithm ids.
    #[arg(long, value_delimiter = ',')]
    pub algs: Option<Vec<Algorithm>>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// reconstruction | lp | regret_scaling | adversarial_ratio | all
    pub suite: Suite,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for report.json; the report goes to stdout otherwise.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Sweep CSV to chart.
    pub csv: PathBuf,
    /// Parameter name used in chart titles and file names.
    #[arg(long, default_value = "alpha")]
    pub param: String,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl CommonArgs {
    fn load(&self) -> Result<(ConfigFile, Overrides)> {
        let file = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let ov = Overrides {
            seed: self.seed,
            seeds: self.seeds,
            horizon: self.horizon,
            b: self.b,
            delta: self.delta,
            alg: self.alg,
            oracle: self.oracle,
            out: self.out.clone(),
            k: self.k,
            alpha: self.alpha,
            lambda: self.lambda,
            instance: self.instance.clone(),
            explore_scale: self.explore_scale,
            conf_scale: self.conf_scale,
            traces: self.no_traces.then_some(false),
            crafted: self.crafted,
            c: self.c,
            reps: self.reps,
            graph: self.graph.clone(),
            sequence: self.sequence.clone(),
            ..Overrides::default()
        };
        Ok((file, ov))
    }
}

/// Runs a parsed command; the caller maps errors to exit codes.
pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let (file, ov) = args.load()?;
            let cfg = file.experiment_config(&ov);
            let seed = ov.seed.or(file.run.seed).unwrap_or(0);
            let out = ov.out.or(file.run.out).unwrap_or_else(|| PathBuf::from("."));
            let (path, summary) = cmd_gen(&cfg, seed, &out)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        Command::Run(args) => {
            let (file, ov) = args.load()?;
            let spec = file.run_spec(&ov, 1)?;
            print!("{}", cmd_run(&spec)?);
        }
        Command::Sweep(args) => {
            let (file, mut ov) = args.common.load()?;
            ov.param = args.param;
            ov.values = args.values;
            ov.algorithms = args.algs;
            let spec = file.sweep_spec(&ov)?;
            let out = cmd_sweep(&spec)?;
            println!("wrote {} rows and {} charts to {}", out.csv.lines().count() - 1, out.charts.len(), spec.base.out.display());
        }
        Command::Verify(args) => {
            let report = cmd_verify(args.suite, args.seed.unwrap_or(DEFAULT_MASTER_SEED))?;
            let json = report.to_json();
            match &args.out {
                Some(dir) => write_file(&dir.join("report.json"), &json)?,
                None => print!("{json}"),
            }
            for suite in &report.suites {
                for c in &suite.criteria {
                    eprintln!("verify: criterion {} {}: {}", c.id, c.name, if c.passed { "PASS" } else { "FAIL" });
                }
            }
            if !report.passed {
                let failed: Vec<String> = report
                    .suites
                    .iter()
                    .flat_map(|s| &s.criteria)
                    .filter(|c| !c.passed)
                    .map(|c| c.id.to_string())
                    .collect();
                return Err(HarnessError::Verification(format!("criteria {} failed", failed.join(", "))));
            }
        }
        Command::Render(args) => {
            let csv = read_file(&args.csv)?;
            for (name, svg) in render_charts(&csv, &args.param)? {
                write_file(&args.out.join(name), &svg)?;
            }
        }
    }
    Ok(())
}
