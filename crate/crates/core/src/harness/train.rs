use std::path::Path;

use rayon::prelude::*;

use crate::control::{bc_train, ddpg_train, BcReport, DdpgAgent, DdpgOutcome, Environment, PdController};
use crate::error::{Error, Result};
use crate::neural::Mlp;
use crate::perception::STATE_DIM;
use crate::rng::{derive_seed, rng_from_seed};
use crate::world::TerminationStatus;

use super::config::RunConfig;
use super::nav_env::{NavEnv, CONTROL_PERIOD_US};

const BC_STREAM: u64 = 0xB0;
const DDPG_STREAM: u64 = 0xD0;
const EXPERT_STREAM: u64 = 0xE0;

/// Normalized states paired with the expert's velocity increments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExpertDataset {
    pub states: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
}

impl ExpertDataset {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{other:?}")),
        })?;
        w.write_record(["s1", "s2", "s3", "s4", "s5", "s6", "a1", "a2"])?;
        for (s, a) in self.states.iter().zip(&self.actions) {
            w.write_record(s.iter().chain(a).map(|v| v.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{other:?}")),
        })?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.join(",") != "s1,s2,s3,s4,s5,s6,a1,a2" {
            return Err(Error::Config(format!(
                "{}: expected header s1..s6,a1,a2",
                path.display()
            )));
        }
        let mut out = Self::default();
        for (line, rec) in rdr.records().enumerate() {
            let vals = rec?
                .iter()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Config(format!("{} row {}: {e}", path.display(), line + 1)))?;
            out.states.push(vals[..STATE_DIM].to_vec());
            out.actions.push(vals[STATE_DIM..].to_vec());
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollectReport {
    pub attempted: usize,
    pub kept: usize,
    pub pairs: usize,
    pub terminations: Vec<TerminationStatus>,
}

type ExpertEpisode = (TerminationStatus, Vec<(Vec<f64>, Vec<f64>)>);

fn expert_episode(cfg: &RunConfig, seed: u64) -> Result<ExpertEpisode> {
    let mut env = NavEnv::new(cfg)?;
    let mut pd = PdController::new(cfg.pd);
    let mut state = env.reset(seed)?;
    let mut pairs = Vec::new();
    loop {
        let raw = env.raw_state();
        let a = pd.action(
            env.command(),
            env.detection().map(|b| b.x_box),
            raw.d_ped(),
            CONTROL_PERIOD_US as f64 / 1e6,
        )?;
        pairs.push((state, a.to_array().to_vec()));
        let out = env.step_action(a)?;
        if out.done() {
            return Ok((env.status(), pairs));
        }
        state = out.state;
    }
}

/// Roll out the PD expert and keep only episodes that end in `GoalReached`.
pub fn collect_expert(cfg: &RunConfig, episodes: usize) -> Result<(ExpertDataset, CollectReport)> {
    let runs = (0..episodes)
        .into_par_iter()
        .map(|i| expert_episode(cfg, derive_seed(cfg.seed ^ EXPERT_STREAM, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let mut data = ExpertDataset::default();
    let mut report = CollectReport {
        attempted: episodes,
        kept: 0,
        pairs: 0,
        terminations: Vec::with_capacity(episodes),
    };
    for (status, pairs) in runs {
        report.terminations.push(status);
        if status != TerminationStatus::GoalReached {
            continue;
        }
        report.kept += 1;
        for (s, a) in pairs {
            data.states.push(s);
            data.actions.push(a);
        }
    }
    report.pairs = data.len();
    Ok((data, report))
}

/// Fresh actor sized by the DDPG settings.
pub fn new_actor(cfg: &RunConfig, stream: u64) -> Result<Mlp> {
    let mut rng = rng_from_seed(derive_seed(cfg.seed, stream));
    Mlp::actor(STATE_DIM, &cfg.ddpg.hidden, &crate::control::ACTION_BOUNDS, &mut rng)
}

pub fn train_bc(cfg: &RunConfig, data: &ExpertDataset) -> Result<(Mlp, BcReport)> {
    let actor = new_actor(cfg, BC_STREAM)?;
    let mut rng = rng_from_seed(derive_seed(cfg.seed, BC_STREAM + 1));
    bc_train(&data.states, &data.actions, actor, &cfg.bc, &mut rng)
}

/// DDPG on the navigation environment, optionally warm-started from a
/// behavior-cloned actor.
pub fn train_ddpg(cfg: &RunConfig, init_actor: Option<Mlp>, out: Option<&Path>) -> Result<DdpgOutcome> {
    let mut env = NavEnv::new(cfg)?;
    let mut rng = rng_from_seed(derive_seed(cfg.seed, DDPG_STREAM));
    let mut agent = DdpgAgent::new(env.state_dim(), &env.action_bounds(), &cfg.ddpg, &mut rng)?;
    if let Some(actor) = init_actor {
        agent = agent.with_actor(actor)?;
    }
    if let Some(dir) = out {
        cfg.echo(dir)?;
    }
    ddpg_train(&mut env, agent, &cfg.ddpg, derive_seed(cfg.seed, DDPG_STREAM + 1), out)
}
