use std::path::Path;

use crate::control::{Action, Environment, PdController};
use crate::error::{Error, Result};
use crate::neural::{load_weights, Mlp};
use crate::world::{TerminationStatus, VelocityCommand};

use super::config::{ControllerKind, RunConfig};
use super::nav_env::{NavEnv, StepRecord, CONTROL_PERIOD_US};

/// Decision rule that maps the environment's current observation to a
/// velocity increment.
#[derive(Debug, Clone)]
pub enum Controller {
    Pd(PdController),
    /// Actor network over normalized states (behavior-cloned or DDPG).
    Policy(Mlp),
    /// Steer toward a fixed velocity command regardless of perception.
    Constant(VelocityCommand),
}

impl Controller {
    /// Controller described by the config, loading weights when needed.
    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        match cfg.controller {
            ControllerKind::Pd => Ok(Controller::Pd(PdController::new(cfg.pd))),
            ControllerKind::Bc | ControllerKind::Ddpg => {
                let path = cfg.checkpoint.as_deref().ok_or_else(|| {
                    Error::Config(format!(
                        "controller {:?} needs a checkpoint path",
                        cfg.controller
                    ))
                })?;
                Self::policy_from_file(path)
            }
        }
    }

    pub fn policy_from_file(path: &Path) -> Result<Self> {
        let net = load_weights(path)?;
        if net.input_dim() != crate::perception::STATE_DIM || net.output_dim() != 2 {
            return Err(Error::Config(format!(
                "{} is not a 6-input 2-output actor (sizes {:?})",
                path.display(),
                net.sizes()
            )));
        }
        Ok(Controller::Policy(net))
    }

    pub fn reset(&mut self) {
        if let Controller::Pd(pd) = self {
            pd.reset();
        }
    }

    pub fn act(&mut self, env: &NavEnv, state: &[f64]) -> Result<Action> {
        match self {
            Controller::Pd(pd) => {
                let raw = env.raw_state();
                pd.action(
                    env.command(),
                    env.detection().map(|b| b.x_box),
                    raw.d_ped(),
                    CONTROL_PERIOD_US as f64 / 1e6,
                )
            }
            Controller::Policy(net) => Ok(Action::from_slice(&net.forward(state)?).clamped()),
            Controller::Constant(target) => {
                let cur = env.command();
                Ok(Action::new(target.v - cur.v, target.omega - cur.omega).clamped())
            }
        }
    }
}

/// Rows of one episode, one per control tick.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EpisodeLog {
    pub seed: u64,
    pub rows: Vec<StepRecord>,
}

pub const TRAJECTORY_HEADER: &str = "t,x_r,y_r,theta,v_r,omega_r,x_box,d_ped,d_obs,theta_obs,reward,status";

impl EpisodeLog {
    pub fn status(&self) -> TerminationStatus {
        self.rows.last().map_or(TerminationStatus::Running, |r| r.status)
    }

    pub fn total_reward(&self) -> f64 {
        self.rows.iter().map(|r| r.reward).sum()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(TRAJECTORY_HEADER.split(','))?;
        for r in &self.rows {
            w.write_record(&[
                r.t.to_string(),
                r.x_r.to_string(),
                r.y_r.to_string(),
                r.theta.to_string(),
                r.v_r.to_string(),
                r.omega_r.to_string(),
                r.x_box.to_string(),
                r.d_ped.to_string(),
                r.d_obs.to_string(),
                r.theta_obs.to_string(),
                r.reward.to_string(),
                r.status.as_str().to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Contract(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        if header.join(",") != TRAJECTORY_HEADER {
            return Err(Error::Config(format!(
                "{} does not have the trajectory header",
                path.display()
            )));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let f = |i: usize| -> Result<f64> {
                rec[i].parse().map_err(|_| {
                    Error::Config(format!("{}: bad number {:?}", path.display(), &rec[i]))
                })
            };
            let status = TerminationStatus::parse(&rec[11]).ok_or_else(|| {
                Error::Config(format!("{}: unknown status {:?}", path.display(), &rec[11]))
            })?;
            rows.push(StepRecord {
                t: f(0)?,
                x_r: f(1)?,
                y_r: f(2)?,
                theta: f(3)?,
                v_r: f(4)?,
                omega_r: f(5)?,
                x_box: f(6)?,
                d_ped: f(7)?,
                d_obs: f(8)?,
                theta_obs: f(9)?,
                reward: f(10)?,
                status,
            });
        }
        Ok(Self { seed: 0, rows })
    }
}

/// Run `controller` in `env` from `reset(seed)` until termination, appending
/// rows to `log` as they happen so a failed run keeps its partial trace.
pub fn run_episode(env: &mut NavEnv, controller: &mut Controller, seed: u64, log: &mut EpisodeLog) -> Result<()> {
    log.seed = seed;
    log.rows.clear();
    controller.reset();
    let mut state = env.reset(seed)?;
    loop {
        let action = controller.act(env, &state)?;
        let out = env.step_action(action)?;
        log.rows.push(env.last_record().expect("step records a row"));
        if out.done() {
            return Ok(());
        }
        state = out.state;
    }
}

/// Convenience wrapper returning the finished log.
pub fn simulate(env: &mut NavEnv, controller: &mut Controller, seed: u64) -> Result<EpisodeLog> {
    let mut log = EpisodeLog::default();
    run_episode(env, controller, seed, &mut log)?;
    Ok(log)
}
