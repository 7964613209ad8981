//! Run configuration, the navigation environment, episode execution,
//! metrics, plotting and training orchestration.

mod config;
mod episode;
mod eval;
mod metrics;
mod nav_env;
mod render;
mod train;

pub use config::{
    ControllerKind, DetectorKind, EpisodeConfig, RobotConfig, RunConfig, SensorConfig,
};
pub use episode::{run_episode, simulate, Controller, EpisodeLog, TRAJECTORY_HEADER};
pub use eval::{episode_seed, evaluate, run_eval, EvalReport};
pub use metrics::{compute_metrics, MetricsTable, Stats};
pub use nav_env::{
    NavEnv, SensingCapture, StepRecord, CONTROL_PERIOD_US, EVENT_CLOCK_LEAD_US, PHYSICS_DT_US,
};
pub use render::{
    pedestrian_polyline, timeseries_svg, trajectory_svg, world_to_px, write_plots,
    write_run_outputs, CANVAS_HEIGHT, CANVAS_WIDTH, MARGIN, PX_PER_M,
};
pub use train::{collect_expert, new_actor, train_bc, train_ddpg, CollectReport, ExpertDataset};
