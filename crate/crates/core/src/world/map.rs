use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle given by its lower-left corner and size (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl Rect {
    pub fn contains(&self, px: f64, py: f64) -> bool {
        px >= self.x && px <= self.x + self.w && py >= self.y && py <= self.y + self.h
    }

    /// Euclidean distance from a point to the rectangle (0 inside).
    pub fn distance_to(&self, px: f64, py: f64) -> f64 {
        let dx = (self.x - px).max(0.0).max(px - (self.x + self.w));
        let dy = (self.y - py).max(0.0).max(py - (self.y + self.h));
        dx.hypot(dy)
    }
}

/// Pedestrian route description as stored in the map file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PathSpec {
    /// Gerono lemniscate `x = cx + a sin(s)`, `y = cy + b sin(s) cos(s)`.
    Lemniscate { cx: f64, cy: f64, a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpawnPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Scenario map: bounds, rectangular obstacles, pedestrian route and robot spawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldMap {
    pub width: f64,
    pub height: f64,
    pub obstacles: Vec<Rect>,
    pub path: PathSpec,
    pub robot_spawn: SpawnPose,
}

const DEFAULT_MAP_JSON: &str = include_str!("../../assets/default_map.json");

impl WorldMap {
    /// The bundled 21 x 12 m figure-eight scenario.
    pub fn default_scenario() -> Self {
        Self::from_json_str(DEFAULT_MAP_JSON).expect("bundled map is valid")
    }

    pub fn default_json() -> &'static str {
        DEFAULT_MAP_JSON
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let map: WorldMap = serde_json::from_str(s)?;
        map.validate()?;
        Ok(map)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
            .map_err(|e| Error::Config(format!("map {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::Config("map width and height must be positive".into()));
        }
        for (i, r) in self.obstacles.iter().enumerate() {
            let inside = r.w > 0.0
                && r.h > 0.0
                && r.x >= 0.0
                && r.y >= 0.0
                && r.x + r.w <= self.width
                && r.y + r.h <= self.height;
            if !inside {
                return Err(Error::Config(format!(
                    "obstacle {i} must have positive size and lie inside the map bounds"
                )));
            }
        }
        let s = self.robot_spawn;
        if !self.in_free_space(s.x, s.y) {
            return Err(Error::Config(format!(
                "robot spawn ({}, {}) is outside free space",
                s.x, s.y
            )));
        }
        let PathSpec::Lemniscate { cx, cy, a, b } = self.path;
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::Config("lemniscate radii must be positive".into()));
        }
        if cx - a < 0.0 || cx + a > self.width || cy - b / 2.0 < 0.0 || cy + b / 2.0 > self.height
        {
            return Err(Error::Config("pedestrian path leaves the map bounds".into()));
        }
        Ok(())
    }

    pub fn in_bounds(&self, x: f64, y: f64) -> bool {
        x > 0.0 && x < self.width && y > 0.0 && y < self.height
    }

    /// Inside the map and outside every obstacle.
    pub fn in_free_space(&self, x: f64, y: f64) -> bool {
        self.in_bounds(x, y) && !self.obstacles.iter().any(|r| r.contains(x, y))
    }

    /// Distance from a point to the nearest obstacle or boundary wall.
    pub fn clearance(&self, x: f64, y: f64) -> f64 {
        let walls = x.min(self.width - x).min(y).min(self.height - y);
        self.obstacles
            .iter()
            .map(|r| r.distance_to(x, y))
            .fold(walls, f64::min)
    }
}
