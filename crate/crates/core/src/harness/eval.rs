use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::derive_seed;

use super::config::RunConfig;
use super::episode::{run_episode, Controller, EpisodeLog};
use super::metrics::{compute_metrics, MetricsTable};
use super::nav_env::NavEnv;
use super::render::write_run_outputs;

/// Seed of evaluation episode `index` under master seed `master`.
pub fn episode_seed(master: u64, index: usize) -> u64 {
    derive_seed(master, index as u64)
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub logs: Vec<EpisodeLog>,
    pub metrics: MetricsTable,
}

/// Run `episodes` independent episodes in parallel (one world per worker).
///
/// On failure every finished or partial log is returned alongside the
/// first error, in episode order.
pub fn evaluate(
    cfg: &RunConfig,
    controller: &Controller,
    episodes: usize,
) -> std::result::Result<Vec<EpisodeLog>, (Vec<EpisodeLog>, Error)> {
    let map = cfg.load_map().map_err(|e| (Vec::new(), e))?;
    let results: Vec<(EpisodeLog, Option<Error>)> = (0..episodes)
        .into_par_iter()
        .map(|i| {
            let mut log = EpisodeLog::default();
            let res = NavEnv::with_map(cfg, map.clone()).and_then(|mut env| {
                let mut ctrl = controller.clone();
                run_episode(&mut env, &mut ctrl, episode_seed(cfg.seed, i), &mut log)
            });
            (log, res.err())
        })
        .collect();
    let mut logs = Vec::with_capacity(episodes);
    let mut first_err = None;
    for (log, err) in results {
        logs.push(log);
        if first_err.is_none() {
            first_err = err;
        }
    }
    match first_err {
        None => Ok(logs),
        Some(e) => Err((logs, e)),
    }
}

/// Evaluate and, when `out` is given, write the run directory
/// (`config.echo.json`, `episodes/`, `metrics.json`, `plots/`).
pub fn run_eval(cfg: &RunConfig, controller: &Controller, episodes: usize, out: Option<&Path>) -> Result<EvalReport> {
    if let Some(dir) = out {
        cfg.echo(dir)?;
    }
    let logs = match evaluate(cfg, controller, episodes) {
        Ok(logs) => logs,
        Err((logs, e)) => {
            if let Some(dir) = out {
                let eps = dir.join("episodes");
                std::fs::create_dir_all(&eps).map_err(|e| Error::io(&eps, e))?;
                for (i, log) in logs.iter().enumerate() {
                    log.write_csv(&eps.join(format!("ep{i:03}.csv")))?;
                }
            }
            return Err(e);
        }
    };
    let metrics = compute_metrics(&logs)?;
    if let Some(dir) = out {
        let map = cfg.load_map()?;
        let env = NavEnv::with_map(cfg, map)?;
        write_run_outputs(dir, env.map(), env.path(), &logs, &metrics)?;
    }
    Ok(EvalReport { logs, metrics })
}
