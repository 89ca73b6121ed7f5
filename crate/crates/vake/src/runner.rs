use rayon::prelude::*;
use vake_core::adversary::{run_trial, AttackerModel, ConfigError, ScenarioConfig, ScenarioReport};
use vake_core::crypto::{Concrete, Symbolic};

use crate::scenario_file::ScenarioFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Symbolic,
    Concrete,
    Both,
}

/// Runs a scenario's trials in parallel. Each trial depends only on the
/// configuration and its index, so the report does not depend on how the
/// work is scheduled.
pub fn run_parallel<S: AttackerModel + Sync>(suite: &S, cfg: &ScenarioConfig) -> Result<ScenarioReport, ConfigError> {
    cfg.validate()?;
    let trials = (0..cfg.trials).into_par_iter().map(|i| run_trial(suite, cfg, i)).collect();
    Ok(ScenarioReport::from_trials(cfg.clone(), S::MODE, trials))
}

/// Every scenario of `file` in the requested backends, symbolic first.
pub fn run_file(file: &ScenarioFile, mode: Mode) -> Result<Vec<ScenarioReport>, ConfigError> {
    let mut out = Vec::new();
    if mode != Mode::Concrete {
        for cfg in &file.scenarios {
            out.push(run_parallel(&Symbolic, cfg)?);
        }
    }
    if mode != Mode::Symbolic {
        for cfg in &file.scenarios {
            out.push(run_parallel(&Concrete, cfg)?);
        }
    }
    Ok(out)
}

/// Applies command-line overrides to every scenario.
pub fn override_all(file: &mut ScenarioFile, seed: Option<u64>, trials: Option<u32>) {
    for s in &mut file.scenarios {
        if let Some(seed) = seed {
            s.seed = seed;
        }
        if let Some(t) = trials {
            s.trials = t;
        }
    }
}
