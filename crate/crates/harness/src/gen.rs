//! `gen`: sample a synthetic instance and write it to `<out>/instance.txt`.

use std::path::{Path, PathBuf};

use fairres_core::environment::{generate_instance, ExperimentConfig, Instance};

use crate::error::{write_file, Result};

/// Counts shown after generation.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub k: usize,
    pub edges: usize,
    pub sets: usize,
    pub pairs: usize,
    pub m: usize,
    pub connected: bool,
}

impl InstanceSummary {
    pub fn of(inst: &Instance) -> Self {
        Self {
            k: inst.graph.k(),
            edges: inst.graph.edges().len(),
            sets: inst.model.n(),
            pairs: inst.model.sets().iter().filter(|s| s.members().len() == 2).count(),
            m: inst.model.m(),
            connected: inst.meta.connected,
        }
    }
}

impl std::fmt::Display for InstanceSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "k={} edges={} sets={} pairs={} m={} connected={}",
            self.k, self.edges, self.sets, self.pairs, self.m, self.connected
        )
    }
}

/// The seed is used as the generator seed directly.
pub fn cmd_gen(cfg: &ExperimentConfig, seed: u64, out: &Path) -> Result<(PathBuf, InstanceSummary)> {
    let cfg = ExperimentConfig { seed, ..cfg.clone() };
    let inst = generate_instance(&cfg)?;
    let path = out.join("instance.txt");
    write_file(&path, &inst.to_text())?;
    Ok((path, InstanceSummary::of(&inst)))
}
