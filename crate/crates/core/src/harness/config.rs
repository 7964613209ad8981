use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::control::{BcConfig, DdpgConfig, PdGains, RewardParams};
use crate::error::{Error, Result};
use crate::sensing::{CameraModel, Homography, PedestrianShape};
use crate::world::{LidarConfig, TerminationLimits, WorldMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerKind {
    Pd,
    Bc,
    Ddpg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectorKind {
    /// Blob detector on the SAE of synthesized events.
    Sae,
    /// Projected ground-truth box; skips event synthesis.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub detector: DetectorKind,
    /// Background events per pixel per second.
    pub noise_rate: f64,
    pub depth_sigma: f64,
    /// Period of the body texture flip that drives events on the whole
    /// silhouette; 0 renders a solid silhouette.
    pub flicker_period_us: u64,
    pub sae_window_us: u64,
    pub threshold: u8,
    pub min_area: usize,
    /// Event-camera pixel to depth-camera pixel mapping.
    pub homography: Homography,
    pub camera: CameraModel,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            detector: DetectorKind::Sae,
            noise_rate: 0.1,
            depth_sigma: 0.02,
            flicker_period_us: 5000,
            sae_window_us: 10_000,
            threshold: 50,
            min_area: 15,
            homography: Homography::identity(),
            camera: CameraModel::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotConfig {
    pub wheel_diameter: f64,
    pub track: f64,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self {
            wheel_diameter: 0.2,
            track: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EpisodeConfig {
    pub pedestrian_speed: f64,
    /// Pedestrian walking time, s.
    pub duration: f64,
    /// Half-width of the uniform spawn perturbation in x and y, m.
    pub spawn_jitter_xy: f64,
    /// Half-width of the uniform spawn heading perturbation, rad.
    pub spawn_jitter_theta: f64,
    /// Start the walk at a uniformly drawn point of the loop, with the robot
    /// spawned behind it, instead of at the map's path start.
    pub random_start: bool,
    pub pedestrian_shape: PedestrianShape,
    pub termination: TerminationLimits,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            pedestrian_speed: 0.7,
            duration: 100.0,
            spawn_jitter_xy: 0.3,
            spawn_jitter_theta: 0.1,
            random_start: false,
            pedestrian_shape: PedestrianShape::default(),
            termination: TerminationLimits::default(),
        }
    }
}

/// Everything a run needs. Missing JSON fields take these defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Map file; the bundled scenario when absent.
    pub scenario: Option<PathBuf>,
    pub controller: ControllerKind,
    /// Actor weights for the `bc` and `ddpg` controllers.
    pub checkpoint: Option<PathBuf>,
    pub episodes: usize,
    pub sensor: SensorConfig,
    pub episode: EpisodeConfig,
    pub robot: RobotConfig,
    pub lidar: LidarConfig,
    pub reward: RewardParams,
    pub pd: PdGains,
    pub ddpg: DdpgConfig,
    pub bc: BcConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            scenario: None,
            controller: ControllerKind::Pd,
            checkpoint: None,
            episodes: 5,
            sensor: SensorConfig::default(),
            episode: EpisodeConfig::default(),
            robot: RobotConfig::default(),
            lidar: LidarConfig::default(),
            reward: RewardParams::default(),
            pd: PdGains::default(),
            ddpg: DdpgConfig::default(),
            bc: BcConfig::default(),
        }
    }
}

/// Dotted paths of keys in `user` that have no counterpart in `reference`.
fn unknown_keys(user: &Value, reference: &Value, prefix: &str, out: &mut BTreeSet<String>) {
    match (user, reference) {
        (Value::Object(u), Value::Object(r)) => {
            for (k, v) in u {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                match r.get(k) {
                    Some(rv) => unknown_keys(v, rv, &path, out),
                    None => {
                        out.insert(path);
                    }
                }
            }
        }
        (Value::Array(u), Value::Array(r)) => {
            if let Some(r0) = r.first() {
                for (i, v) in u.iter().enumerate() {
                    unknown_keys(v, r0, &format!("{prefix}[{i}]"), out);
                }
            }
        }
        _ => {}
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

impl RunConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let user: Value = serde_json::from_str(text)?;
        if !user.is_object() {
            return Err(Error::Config("configuration must be a JSON object".into()));
        }
        let reference = serde_json::to_value(RunConfig::default())?;
        let mut unknown = BTreeSet::new();
        unknown_keys(&user, &reference, "", &mut unknown);
        if !unknown.is_empty() {
            let list: Vec<_> = unknown.into_iter().collect();
            return Err(Error::Config(format!("unknown keys: {}", list.join(", "))));
        }
        let cfg: RunConfig =
            serde_json::from_value(user).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse and validate a config file. Relative paths inside it are
    /// resolved against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.scenario, &mut cfg.checkpoint].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        cfg.check_files()?;
        Ok(cfg)
    }

    /// Referenced files must exist.
    pub fn check_files(&self) -> Result<()> {
        for p in [&self.scenario, &self.checkpoint].into_iter().flatten() {
            check(p.is_file(), || format!("referenced file {} does not exist", p.display()))?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| match e {
            Error::Parameter(m) => Error::Config(m),
            other => other,
        };
        self.reward.validate().map_err(wrap)?;
        self.pd.validate().map_err(wrap)?;
        self.ddpg.validate().map_err(wrap)?;
        self.bc.validate().map_err(wrap)?;

        let s = &self.sensor;
        check(s.noise_rate >= 0.0 && s.noise_rate.is_finite(), || {
            format!("sensor.noise_rate must be >= 0, got {}", s.noise_rate)
        })?;
        check(s.depth_sigma >= 0.0 && s.depth_sigma.is_finite(), || {
            format!("sensor.depth_sigma must be >= 0, got {}", s.depth_sigma)
        })?;
        check(
            s.sae_window_us >= 1000 && s.sae_window_us <= 100_000 && s.sae_window_us % 1000 == 0,
            || {
                format!(
                    "sensor.sae_window_us must be a multiple of 1000 in [1000, 100000], got {}",
                    s.sae_window_us
                )
            },
        )?;
        check(s.min_area >= 1, || "sensor.min_area must be >= 1".into())?;
        check(s.camera.is_valid(), || "sensor.camera has invalid intrinsics".into())?;

        let e = &self.episode;
        check(e.pedestrian_speed >= 0.0 && e.pedestrian_speed <= 3.0, || {
            format!("episode.pedestrian_speed must be in [0,3], got {}", e.pedestrian_speed)
        })?;
        check(e.duration > 0.0 && e.duration.is_finite(), || {
            format!("episode.duration must be > 0, got {}", e.duration)
        })?;
        check(e.spawn_jitter_xy >= 0.0 && e.spawn_jitter_theta >= 0.0, || {
            "episode spawn jitter must be >= 0".into()
        })?;
        check(e.pedestrian_shape.height > 0.0 && e.pedestrian_shape.width > 0.0, || {
            "episode.pedestrian_shape dimensions must be > 0".into()
        })?;
        let t = &e.termination;
        check(t.max_lost > 0.0, || "episode.termination.max_lost must be > 0".into())?;
        check(t.min_ped_distance < t.max_ped_distance, || {
            "episode.termination.min_ped_distance must be below max_ped_distance".into()
        })?;
        check(self.robot.wheel_diameter > 0.0 && self.robot.track > 0.0, || {
            "robot.wheel_diameter and robot.track must be > 0".into()
        })?;
        check(
            self.lidar.beams >= 1 && self.lidar.max_range > 0.0 && self.lidar.span > 0.0,
            || "lidar needs beams >= 1, max_range > 0, span > 0".into(),
        )?;
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Write `config.echo.json` into `dir`.
    pub fn echo(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("config.echo.json");
        std::fs::write(&path, self.to_json_pretty() + "\n").map_err(|e| Error::io(&path, e))
    }

    pub fn load_map(&self) -> Result<WorldMap> {
        match &self.scenario {
            Some(p) => WorldMap::load(p),
            None => Ok(WorldMap::default_scenario()),
        }
    }
}
