//! Controllers and learning machinery: PD expert, reward, exploration noise,
//! replay memory, behavior cloning and DDPG.

mod action;
mod bc;
mod ddpg;
mod env;
mod ou;
mod pd;
mod replay;
mod reward;
mod toy;

pub use action::{Action, ACTION_BOUNDS};
pub use bc::{bc_train, BcConfig, BcReport};
pub use ddpg::{
    actor_objective_and_grad, ddpg_train, soft_update, DdpgAgent, DdpgConfig, DdpgOutcome,
    EpisodeRecord, EvalRecord, TrainingLog,
};
pub use env::{Environment, StepOutcome};
pub use ou::{ou_step, OuNoise, OuParams};
pub use pd::{pd_raw, PdController, PdGains};
pub use replay::{Batch, ReplayBuffer, Transition};
pub use reward::{compute_reward, reward_branch, RewardBranch, RewardParams};
pub use toy::ToyDistanceEnv;
