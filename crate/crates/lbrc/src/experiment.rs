//! Parallel driver for Monte-Carlo rate experiments.

use lbrc_core::simulation::{check_design, Experiment, RateReport, ReplicateValue};
use rayon::prelude::*;

use crate::config::RateConfig;
use crate::error::CliError;

/// Runs every `(n, rep)` replication on a pool of `threads` workers (0 means
/// one per core). Each replication draws from its own derived seed and the
/// results are gathered in task order, so the report does not depend on the
/// thread count.
pub fn run_rate_experiment(cfg: &RateConfig, threads: usize) -> Result<RateReport, CliError> {
    check_design(&cfg.sizes, cfg.reps)?;
    let model = cfg.model.build()?;
    let grid = cfg.grid.resolve(&model)?;
    let exp = Experiment::new(&model, cfg.which, grid, cfg.seed, cfg.cap)?;
    let tasks: Vec<(usize, usize)> =
        cfg.sizes.iter().flat_map(|&n| (0..cfg.reps).map(move |rep| (n, rep))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Compute(format!("cannot start worker pool: {e}")))?;
    let results: Vec<lbrc_core::Result<ReplicateValue>> =
        pool.install(|| tasks.par_iter().map(|&(n, rep)| exp.replicate(n, rep)).collect());
    let mut flat = Vec::with_capacity(results.len());
    for r in results {
        flat.push(r?);
    }
    let values: Vec<Vec<ReplicateValue>> = flat.chunks(cfg.reps).map(<[_]>::to_vec).collect();
    Ok(RateReport::assemble(cfg.which, &cfg.sizes, values)?)
}
