use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::control::{compute_reward, Action, Environment, StepOutcome, ACTION_BOUNDS};
use crate::error::{Error, Result};
use crate::perception::{
    build_state, detect_pedestrian_sae, oracle_detect, BoundingBox, DetectorConfig, StateVector,
    VisibilityTracker,
};
use crate::rng::{derive_seed, rng_from_seed};
use crate::sensing::{
    render_textured_silhouette, synthesize_events, DepthSensor, Event, EventStream, Occupancy,
    SaeFrame,
};
use crate::world::{
    check_termination, clamp_increments, lidar_scan, step_kinematics, wrap_angle, PedestrianPath,
    RobotPose, TerminationStatus, VelocityCommand, WorldMap, WorldSnapshot,
};

use super::config::{DetectorKind, RunConfig};

/// Control period in microseconds.
pub const CONTROL_PERIOD_US: u64 = 100_000;
/// Physics and rendering substep in microseconds.
pub const PHYSICS_DT_US: u64 = 1_000;
/// Event timestamps are offset by one control period so the sensing window
/// preceding the first tick has non-negative stamps.
pub const EVENT_CLOCK_LEAD_US: u64 = CONTROL_PERIOD_US;

/// One logged control tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub x_r: f64,
    pub y_r: f64,
    pub theta: f64,
    pub v_r: f64,
    pub omega_r: f64,
    pub x_box: f64,
    pub d_ped: f64,
    pub d_obs: f64,
    pub theta_obs: f64,
    pub reward: f64,
    pub status: TerminationStatus,
}

/// Sensor products of the latest tick, kept only when capture is enabled.
#[derive(Debug, Clone)]
pub struct SensingCapture {
    pub events: Vec<Event>,
    pub sae: SaeFrame,
    pub detection: Option<BoundingBox>,
}

/// Person-following environment: the world at 1 ms, sensing over the last
/// SAE window of each 0.1 s control period.
#[derive(Debug, Clone)]
pub struct NavEnv {
    cfg: RunConfig,
    map: WorldMap,
    path: PedestrianPath,
    depth: DepthSensor,
    detector: DetectorConfig,
    pub capture: bool,

    rng: ChaCha8Rng,
    start_arc: f64,
    pose: RobotPose,
    cmd: VelocityCommand,
    clock_us: u64,
    stream: EventStream,
    visibility: VisibilityTracker,
    x_box: f64,
    d_ped: f64,
    d_obs: f64,
    theta_obs: f64,
    detection: Option<BoundingBox>,
    status: TerminationStatus,
    last: Option<StepRecord>,
    captured: Option<SensingCapture>,
}

impl NavEnv {
    pub fn new(cfg: &RunConfig) -> Result<Self> {
        let map = cfg.load_map()?;
        Self::with_map(cfg, map)
    }

    pub fn with_map(cfg: &RunConfig, map: WorldMap) -> Result<Self> {
        cfg.validate()?;
        let path = PedestrianPath::from_spec(&map.path, cfg.episode.pedestrian_speed, cfg.episode.duration)?;
        let cam = cfg.sensor.camera;
        let depth = DepthSensor {
            sigma: cfg.sensor.depth_sigma,
            homography: cfg.sensor.homography,
            width: cam.width,
            height: cam.height,
            ..Default::default()
        };
        let detector = DetectorConfig {
            threshold: cfg.sensor.threshold,
            min_area: cfg.sensor.min_area,
        };
        let spawn = map.robot_spawn;
        Ok(Self {
            cfg: cfg.clone(),
            path,
            depth,
            detector,
            capture: false,
            rng: rng_from_seed(0),
            start_arc: 0.0,
            pose: RobotPose::new(spawn.x, spawn.y, spawn.theta),
            cmd: VelocityCommand::default(),
            clock_us: 0,
            stream: EventStream::new(2 * CONTROL_PERIOD_US),
            visibility: VisibilityTracker::new(0.0),
            x_box: cfg.pd.x_target,
            d_ped: cfg.pd.d_target,
            d_obs: cfg.lidar.max_range,
            theta_obs: 0.0,
            detection: None,
            status: TerminationStatus::Running,
            last: None,
            captured: None,
            map,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn map(&self) -> &WorldMap {
        &self.map
    }

    pub fn path(&self) -> &PedestrianPath {
        &self.path
    }

    pub fn pose(&self) -> RobotPose {
        self.pose
    }

    pub fn command(&self) -> VelocityCommand {
        self.cmd
    }

    pub fn time(&self) -> f64 {
        self.clock_us as f64 / 1e6
    }

    pub fn status(&self) -> TerminationStatus {
        self.status
    }

    /// Detection from the latest tick, if the pedestrian was found.
    pub fn detection(&self) -> Option<BoundingBox> {
        self.detection
    }

    pub fn last_record(&self) -> Option<StepRecord> {
        self.last
    }

    pub fn captured(&self) -> Option<&SensingCapture> {
        self.captured.as_ref()
    }

    /// Unnormalized state.
    pub fn raw_state(&self) -> StateVector {
        build_state(self.cmd, self.x_box, self.d_ped, self.d_obs, self.theta_obs, false)
    }

    pub fn pedestrian_xy(&self, t: f64) -> (f64, f64) {
        let t = t.clamp(0.0, self.path.duration());
        let (x, y, _) = self.path.point_at_arc(self.start_arc + self.path.speed() * t);
        (x, y)
    }

    /// Arc length along the loop where the current walk began.
    pub fn start_arc(&self) -> f64 {
        self.start_arc
    }

    /// Place the robot explicitly (bypassing spawn jitter) with the walk
    /// starting at the path start, and re-sense.
    pub fn reset_at(&mut self, seed: u64, pose: RobotPose) -> Result<Vec<f64>> {
        self.start_arc = 0.0;
        self.reset_inner(seed, pose)
    }

    fn reset_inner(&mut self, seed: u64, pose: RobotPose) -> Result<Vec<f64>> {
        self.rng = rng_from_seed(derive_seed(seed, 1));
        self.pose = pose;
        self.cmd = VelocityCommand::default();
        self.clock_us = 0;
        self.stream.clear();
        self.visibility = VisibilityTracker::new(0.0);
        self.x_box = self.cfg.pd.x_target;
        self.d_ped = self.cfg.pd.d_target;
        self.status = TerminationStatus::Running;
        self.last = None;
        self.captured = None;
        if self.cfg.sensor.detector == DetectorKind::Sae {
            let window_ms = (self.cfg.sensor.sae_window_us / PHYSICS_DT_US) as i64;
            let mut prev = self.render(-window_ms * PHYSICS_DT_US as i64);
            for j in (-window_ms + 1)..=0 {
                prev = self.emit(prev, j * PHYSICS_DT_US as i64)?;
            }
        }
        self.perceive()?;
        self.scan()?;
        Ok(self.state())
    }

    /// Walk start arc and robot pose: the map spawn (or, with `random_start`,
    /// `d_target` behind a random point of the loop) plus uniform jitter.
    fn spawn<R: Rng>(&self, rng: &mut R) -> Result<(f64, RobotPose)> {
        let (jxy, jth) = (self.cfg.episode.spawn_jitter_xy, self.cfg.episode.spawn_jitter_theta);
        let clearance = self.cfg.episode.termination.min_obstacle_distance;
        for _ in 0..100 {
            let (arc, base) = if self.cfg.episode.random_start {
                let arc = rng.gen_range(0.0..self.path.perimeter());
                let (px, py, h) = self.path.point_at_arc(arc);
                let back = self.cfg.pd.d_target;
                (arc, RobotPose::new(px - back * h.cos(), py - back * h.sin(), h))
            } else {
                let s = self.map.robot_spawn;
                (0.0, RobotPose::new(s.x, s.y, s.theta))
            };
            let dx = if jxy > 0.0 { rng.gen_range(-jxy..=jxy) } else { 0.0 };
            let dy = if jxy > 0.0 { rng.gen_range(-jxy..=jxy) } else { 0.0 };
            let dth = if jth > 0.0 { rng.gen_range(-jth..=jth) } else { 0.0 };
            let (x, y) = (base.x + dx, base.y + dy);
            if self.map.in_free_space(x, y) && self.map.clearance(x, y) > clearance {
                return Ok((arc, RobotPose::new(x, y, wrap_angle(base.theta + dth))));
            }
        }
        let s = self.map.robot_spawn;
        Err(Error::Config(format!(
            "no collision-free spawn within {jxy} m of ({}, {})",
            s.x, s.y
        )))
    }

    /// Silhouette at time `t_us` (relative to episode start) from the
    /// current robot pose.
    fn render(&self, t_us: i64) -> Occupancy {
        let sensor = &self.cfg.sensor;
        let stamp = (t_us + EVENT_CLOCK_LEAD_US as i64) as u64;
        let parity = (sensor.flicker_period_us > 0).then(|| (stamp / sensor.flicker_period_us) % 2 == 0);
        let ped = self.pedestrian_xy(t_us as f64 / 1e6);
        render_textured_silhouette(
            &sensor.camera,
            &self.pose,
            ped,
            &self.cfg.episode.pedestrian_shape,
            parity,
        )
    }

    /// Render at `t_us`, emit events for the last substep, return the image.
    fn emit(&mut self, prev: Occupancy, t_us: i64) -> Result<Occupancy> {
        let curr = self.render(t_us);
        let t1 = (t_us + EVENT_CLOCK_LEAD_US as i64) as u64;
        let events = synthesize_events(
            &prev,
            &curr,
            t1 - PHYSICS_DT_US,
            t1,
            self.cfg.sensor.noise_rate,
            &mut self.rng,
        )?;
        self.stream.extend(&events)?;
        Ok(curr)
    }

    fn perceive(&mut self) -> Result<()> {
        let t = self.time();
        let ped = self.pedestrian_xy(t);
        let cam = &self.cfg.sensor.camera;
        let detection = match self.cfg.sensor.detector {
            DetectorKind::Oracle => {
                oracle_detect(cam, &self.pose, ped, &self.cfg.episode.pedestrian_shape)
            }
            DetectorKind::Sae => {
                let now = self.clock_us + EVENT_CLOCK_LEAD_US;
                let dt = self.cfg.sensor.sae_window_us;
                self.stream.prune(now);
                let window = self.stream.window_by_time(now, dt)?;
                let sae = SaeFrame::build(window, now - dt, dt, cam.width, cam.height)?;
                let det = detect_pedestrian_sae(&sae, &self.detector);
                if self.capture {
                    self.captured = Some(SensingCapture {
                        events: window.to_vec(),
                        sae,
                        detection: det,
                    });
                }
                det
            }
        };
        self.detection = detection;
        if let Some(b) = detection {
            self.x_box = b.x_box;
            let range = cam.range_to(&self.pose, ped.0, ped.1);
            if let Some(d) = self.depth.estimate(range, (b.x_box, b.y_box), &mut self.rng) {
                self.d_ped = d;
            }
        }
        self.visibility.update(detection.is_some(), t);
        Ok(())
    }

    /// Update `d_obs`/`theta_obs`; `false` when the robot is inside an obstacle.
    fn scan(&mut self) -> Result<bool> {
        match lidar_scan(&self.map, &self.pose, &self.cfg.lidar) {
            Ok(s) => {
                self.d_obs = s.d_obs;
                self.theta_obs = s.theta_obs;
                Ok(true)
            }
            Err(Error::Collision { .. }) => {
                self.d_obs = 0.0;
                self.theta_obs = 0.0;
                Ok(false)
            }
            Err(e) => Err(e),
        }
    }

    fn state(&self) -> Vec<f64> {
        self.raw_state().normalized().to_vec()
    }

    /// Advance one control period with velocity increment `action`.
    pub fn step_action(&mut self, action: Action) -> Result<StepOutcome> {
        if self.status != TerminationStatus::Running {
            return Err(Error::Contract(format!(
                "step after episode ended ({})",
                self.status
            )));
        }
        if !(action.delta_v.is_finite() && action.delta_w.is_finite()) {
            return Err(Error::Contract(format!("non-finite action {action:?}")));
        }
        self.cmd = clamp_increments(self.cmd, action);
        let substeps = (CONTROL_PERIOD_US / PHYSICS_DT_US) as i64;
        let sae = self.cfg.sensor.detector == DetectorKind::Sae;
        let window_start = substeps - (self.cfg.sensor.sae_window_us / PHYSICS_DT_US) as i64;
        let base = self.clock_us as i64;
        let mut prev = (sae && window_start == 0).then(|| self.render(base));
        let mut collided = false;
        for j in 1..=substeps {
            self.pose = step_kinematics(self.pose, self.cmd, PHYSICS_DT_US as f64 / 1e6);
            if !self.map.in_free_space(self.pose.x, self.pose.y) {
                collided = true;
            }
            if !sae || j < window_start {
                continue;
            }
            let t_us = base + j * PHYSICS_DT_US as i64;
            prev = Some(match prev.take() {
                None => self.render(t_us),
                Some(p) => self.emit(p, t_us)?,
            });
        }
        self.clock_us += CONTROL_PERIOD_US;

        self.perceive()?;
        let free = self.scan()?;
        if collided || !free {
            self.d_obs = 0.0;
        }
        let p = &self.cfg.reward;
        let e_x = p.x_target - self.x_box;
        let e_d = self.d_ped - p.d_target;
        let (reward, reward_terminal) = compute_reward(e_x, e_d, self.d_obs, self.d_ped, p);
        let snap = WorldSnapshot {
            ped_clock: self.time(),
            duration: self.cfg.episode.duration,
            lost_duration: self.visibility.lost_duration(),
            d_ped: self.d_ped,
            d_obs: self.d_obs,
        };
        let mut status = check_termination(&snap, &self.cfg.episode.termination);
        if status == TerminationStatus::Running && reward_terminal {
            status = if self.d_obs <= p.d_col_min {
                TerminationStatus::ObstacleTooClose
            } else {
                TerminationStatus::DistanceBound
            };
        }
        self.status = status;
        self.last = Some(StepRecord {
            t: self.time(),
            x_r: self.pose.x,
            y_r: self.pose.y,
            theta: self.pose.theta,
            v_r: self.cmd.v,
            omega_r: self.cmd.omega,
            x_box: self.x_box,
            d_ped: self.d_ped,
            d_obs: self.d_obs,
            theta_obs: self.theta_obs,
            reward,
            status,
        });
        let truncated = status == TerminationStatus::GoalReached;
        Ok(StepOutcome {
            state: self.state(),
            reward,
            terminal: reward_terminal || (status.is_terminal() && !truncated),
            truncated,
            label: status.as_str().to_string(),
        })
    }
}

impl Environment for NavEnv {
    fn state_dim(&self) -> usize {
        crate::perception::STATE_DIM
    }

    fn action_bounds(&self) -> Vec<f64> {
        ACTION_BOUNDS.to_vec()
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<f64>> {
        let mut rng = rng_from_seed(derive_seed(seed, 0));
        let (arc, pose) = self.spawn(&mut rng)?;
        self.start_arc = arc;
        self.reset_inner(seed, pose)
    }

    fn step(&mut self, action: &[f64]) -> Result<StepOutcome> {
        if action.len() != 2 {
            return Err(Error::Contract(format!("expected 2 action components, got {}", action.len())));
        }
        self.step_action(Action::from_slice(action))
    }
}
