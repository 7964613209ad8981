use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::{Rect, RobotPose, WorldMap};

/// Planar scanner layout. Beams are spread evenly over `span`, centered on
/// the robot heading, ordered from right (negative bearing) to left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LidarConfig {
    pub beams: usize,
    pub span: f64,
    pub max_range: f64,
}

impl Default for LidarConfig {
    fn default() -> Self {
        Self {
            beams: 181,
            span: PI,
            max_range: 5.0,
        }
    }
}

impl LidarConfig {
    /// Body-frame bearing of beam `i`.
    pub fn bearing(&self, i: usize) -> f64 {
        if self.beams == 1 {
            return 0.0;
        }
        -self.span / 2.0 + self.span * i as f64 / (self.beams - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    pub ranges: Vec<f64>,
    pub bearings: Vec<f64>,
    pub max_range: f64,
    /// Shortest return (m).
    pub d_obs: f64,
    /// Body-frame bearing of the shortest return; 0 when nothing is in range.
    pub theta_obs: f64,
}

/// Distance along a unit ray to the first point of `rect`, if it is hit.
pub fn ray_rect_distance(ox: f64, oy: f64, dx: f64, dy: f64, rect: &Rect) -> Option<f64> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for (o, d, lo, hi) in [
        (ox, dx, rect.x, rect.x + rect.w),
        (oy, dy, rect.y, rect.y + rect.h),
    ] {
        if d.abs() < 1e-15 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let (mut t0, mut t1) = ((lo - o) / d, (hi - o) / d);
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
        }
    }
    if t_near > t_far || t_far < 0.0 {
        return None;
    }
    Some(t_near.max(0.0))
}

/// Distance from an interior point to the map boundary along a unit ray.
fn ray_boundary_distance(map: &WorldMap, ox: f64, oy: f64, dx: f64, dy: f64) -> f64 {
    let tx = if dx > 1e-15 {
        (map.width - ox) / dx
    } else if dx < -1e-15 {
        -ox / dx
    } else {
        f64::INFINITY
    };
    let ty = if dy > 1e-15 {
        (map.height - oy) / dy
    } else if dy < -1e-15 {
        -oy / dy
    } else {
        f64::INFINITY
    };
    tx.min(ty)
}

/// Raycast every beam against walls and obstacles, capped at `max_range`.
pub fn lidar_scan(map: &WorldMap, pose: &RobotPose, cfg: &LidarConfig) -> Result<LidarScan> {
    if !map.in_free_space(pose.x, pose.y) {
        return Err(Error::Collision {
            x: pose.x,
            y: pose.y,
        });
    }
    let mut ranges = Vec::with_capacity(cfg.beams);
    let mut bearings = Vec::with_capacity(cfg.beams);
    let (mut d_obs, mut theta_obs) = (cfg.max_range, 0.0);
    for i in 0..cfg.beams {
        let bearing = cfg.bearing(i);
        let (dy, dx) = (pose.theta + bearing).sin_cos();
        let mut r = ray_boundary_distance(map, pose.x, pose.y, dx, dy);
        for rect in &map.obstacles {
            if let Some(t) = ray_rect_distance(pose.x, pose.y, dx, dy, rect) {
                r = r.min(t);
            }
        }
        let r = r.min(cfg.max_range);
        if r < d_obs {
            d_obs = r;
            theta_obs = bearing;
        }
        ranges.push(r);
        bearings.push(bearing);
    }
    Ok(LidarScan {
        ranges,
        bearings,
        max_range: cfg.max_range,
        d_obs,
        theta_obs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{PathSpec, SpawnPose};

    fn open_map(obstacles: Vec<Rect>) -> WorldMap {
        WorldMap {
            width: 100.0,
            height: 100.0,
            obstacles,
            path: PathSpec::Lemniscate {
                cx: 50.0,
                cy: 50.0,
                a: 5.0,
                b: 5.0,
            },
            robot_spawn: SpawnPose {
                x: 50.0,
                y: 50.0,
                theta: 0.0,
            },
        }
    }

    #[test]
    fn empty_map_reads_max_range() {
        let map = open_map(vec![]);
        let scan = lidar_scan(&map, &RobotPose::new(50.0, 50.0, 0.7), &LidarConfig::default()).unwrap();
        assert_eq!(scan.ranges.len(), 181);
        assert!(scan.ranges.iter().all(|&r| r == 5.0));
        assert_eq!(scan.d_obs, 5.0);
        assert_eq!(scan.theta_obs, 0.0);
    }

    #[test]
    fn wall_ahead_and_oblique_beam() {
        // wall face at x = 51
        let map = open_map(vec![Rect {
            x: 51.0,
            y: 40.0,
            w: 1.0,
            h: 20.0,
        }]);
        let cfg = LidarConfig::default();
        let scan = lidar_scan(&map, &RobotPose::new(50.0, 50.0, 0.0), &cfg).unwrap();
        let ahead = (cfg.beams - 1) / 2;
        assert!((scan.ranges[ahead] - 1.0).abs() < 1e-6);
        // beam index 150 is +60 deg with one-degree spacing
        assert!((scan.bearings[150] - PI / 3.0).abs() < 1e-12);
        assert!((scan.ranges[150] - 2.0).abs() < 1e-6);
        assert!((scan.ranges[30] - 2.0).abs() < 1e-6);
        assert!((scan.d_obs - 1.0).abs() < 1e-6);
        assert!(scan.theta_obs.abs() < 1e-12);
    }

    #[test]
    fn inside_obstacle_is_collision() {
        let map = open_map(vec![Rect {
            x: 49.0,
            y: 49.0,
            w: 2.0,
            h: 2.0,
        }]);
        let r = lidar_scan(&map, &RobotPose::new(50.0, 50.0, 0.0), &LidarConfig::default());
        assert!(matches!(r, Err(Error::Collision { .. })));
    }

    #[test]
    fn boundary_walls_are_seen() {
        let map = open_map(vec![]);
        let scan = lidar_scan(&map, &RobotPose::new(98.0, 50.0, 0.0), &LidarConfig::default()).unwrap();
        assert!((scan.d_obs - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ray_misses_and_hits() {
        let r = Rect {
            x: 2.0,
            y: -1.0,
            w: 1.0,
            h: 2.0,
        };
        assert_eq!(ray_rect_distance(0.0, 0.0, 1.0, 0.0, &r), Some(2.0));
        assert_eq!(ray_rect_distance(0.0, 0.0, -1.0, 0.0, &r), None);
        assert_eq!(ray_rect_distance(0.0, 5.0, 1.0, 0.0, &r), None);
    }
}
