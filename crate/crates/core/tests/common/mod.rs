#![allow(dead_code)]

use evnav::harness::{Controller, EpisodeLog, NavEnv, RunConfig};
use evnav::world::{PedestrianPath, Rect, SpawnPose, TerminationStatus, VelocityCommand, WorldMap};

/// Default run with sensor noise and spawn jitter switched off.
pub fn quiet_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.sensor.noise_rate = 0.0;
    cfg.sensor.depth_sigma = 0.0;
    cfg.episode.spawn_jitter_xy = 0.0;
    cfg.episode.spawn_jitter_theta = 0.0;
    cfg
}

/// Pedestrian start point and walking direction on the default map.
pub fn path_start() -> (f64, f64, f64) {
    let map = WorldMap::default_scenario();
    PedestrianPath::from_spec(&map.path, 0.7, 100.0)
        .unwrap()
        .point_at_arc(0.0)
}

/// Robot `back` meters behind the path start, facing along the path
/// rotated by `turn`.
pub fn spawn_behind(back: f64, turn: f64) -> SpawnPose {
    let (x, y, h) = path_start();
    SpawnPose {
        x: x - back * h.cos(),
        y: y - back * h.sin(),
        theta: h + turn,
    }
}

pub fn env_with(cfg: &RunConfig, spawn: SpawnPose, extra: &[Rect]) -> NavEnv {
    let mut map = WorldMap::default_scenario();
    map.robot_spawn = spawn;
    map.obstacles.extend_from_slice(extra);
    NavEnv::with_map(cfg, map).unwrap()
}

pub fn run(env: &mut NavEnv, mut ctrl: Controller) -> EpisodeLog {
    evnav::harness::simulate(env, &mut ctrl, 1).unwrap()
}

pub fn still() -> Controller {
    Controller::Constant(VelocityCommand::new(0.0, 0.0))
}

/// Square obstacle of side `side` centered `ahead` meters in front of `spawn`.
pub fn block_ahead(spawn: SpawnPose, ahead: f64, side: f64) -> Rect {
    let (cx, cy) = (spawn.x + ahead * spawn.theta.cos(), spawn.y + ahead * spawn.theta.sin());
    Rect {
        x: cx - side / 2.0,
        y: cy - side / 2.0,
        w: side,
        h: side,
    }
}

/// Four constructed episodes, one per termination condition, with the
/// status each ended in and the expected one.
pub fn termination_scenarios() -> Vec<(&'static str, TerminationStatus, EpisodeLog)> {
    let mut out = Vec::new();

    let mut cfg = quiet_config();
    cfg.episode.pedestrian_speed = 0.0;
    cfg.episode.duration = 3.0;
    let mut env = env_with(&cfg, spawn_behind(2.0, 0.0), &[]);
    let log = run(&mut env, Controller::from_config(&cfg).unwrap());
    out.push(("pedestrian reaches the final position", TerminationStatus::GoalReached, log));

    let mut cfg = quiet_config();
    cfg.episode.pedestrian_speed = 0.0;
    let mut env = env_with(&cfg, spawn_behind(2.0, std::f64::consts::PI), &[]);
    let log = run(&mut env, still());
    out.push(("pedestrian out of view for over 4 s", TerminationStatus::FeatureLost, log));

    let cfg = quiet_config();
    let mut env = env_with(&cfg, spawn_behind(2.0, 0.0), &[]);
    let log = run(&mut env, still());
    out.push(("pedestrian walks beyond 3 m", TerminationStatus::DistanceBound, log));

    let mut cfg = quiet_config();
    cfg.episode.pedestrian_speed = 0.0;
    let spawn = spawn_behind(2.6, 0.0);
    let mut env = env_with(&cfg, spawn, &[block_ahead(spawn, 1.1, 0.4)]);
    let log = run(&mut env, Controller::Constant(VelocityCommand::new(0.3, 0.0)));
    out.push(("obstacle closer than 0.5 m", TerminationStatus::ObstacleTooClose, log));

    out
}
