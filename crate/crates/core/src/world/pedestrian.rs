use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::world::PathSpec;

/// Number of segments in the cumulative arc-length table.
pub const ARC_TABLE_SAMPLES: usize = 2048;

/// Pedestrian position and walking direction at some instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PedestrianPose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

/// Closed figure-eight route walked at constant speed.
///
/// The curve is sampled into a polyline with [`ARC_TABLE_SAMPLES`] segments
/// and a cumulative length table; positions are interpolated linearly along
/// that polyline, so the walking speed is exact at every instant.
#[derive(Debug, Clone)]
pub struct PedestrianPath {
    points: Vec<(f64, f64)>,
    cumulative: Vec<f64>,
    speed: f64,
    duration: f64,
}

impl PedestrianPath {
    pub fn from_spec(spec: &PathSpec, speed: f64, duration: f64) -> Result<Self> {
        if !(speed >= 0.0) || !(duration > 0.0) {
            return Err(Error::Parameter(format!(
                "pedestrian speed must be >= 0 and duration > 0 (got {speed}, {duration})"
            )));
        }
        let PathSpec::Lemniscate { cx, cy, a, b } = *spec;
        let points: Vec<(f64, f64)> = (0..=ARC_TABLE_SAMPLES)
            .map(|k| {
                let s = 2.0 * PI * k as f64 / ARC_TABLE_SAMPLES as f64;
                (cx + a * s.sin(), cy + b * s.sin() * s.cos())
            })
            .collect();
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in points.windows(2) {
            acc += (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1);
            cumulative.push(acc);
        }
        Ok(Self {
            points,
            cumulative,
            speed,
            duration,
        })
    }

    pub fn perimeter(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Point and segment heading at arc length `s`, wrapping around the loop.
    pub fn point_at_arc(&self, s: f64) -> (f64, f64, f64) {
        let total = self.perimeter();
        let s = s.rem_euclid(total);
        let seg = self
            .cumulative
            .partition_point(|&c| c <= s)
            .clamp(1, self.points.len() - 1)
            - 1;
        let (s0, s1) = (self.cumulative[seg], self.cumulative[seg + 1]);
        let (p0, p1) = (self.points[seg], self.points[seg + 1]);
        let f = if s1 > s0 { (s - s0) / (s1 - s0) } else { 0.0 };
        let heading = (p1.1 - p0.1).atan2(p1.0 - p0.0);
        (p0.0 + f * (p1.0 - p0.0), p0.1 + f * (p1.1 - p0.1), heading)
    }

    /// Pose at time `t`; `None` once the walk is over or before it begins.
    pub fn position(&self, t: f64) -> Option<PedestrianPose> {
        if !(0.0..=self.duration).contains(&t) {
            return None;
        }
        Some(self.position_clamped(t))
    }

    /// Pose at `t` clamped into `[0, duration]`.
    pub fn position_clamped(&self, t: f64) -> PedestrianPose {
        let t = t.clamp(0.0, self.duration);
        let (x, y, heading) = self.point_at_arc(self.speed * t);
        PedestrianPose { x, y, heading }
    }

    pub fn start(&self) -> PedestrianPose {
        self.position_clamped(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> PedestrianPath {
        PedestrianPath::from_spec(
            &PathSpec::Lemniscate {
                cx: 10.5,
                cy: 6.0,
                a: 8.5,
                b: 9.0,
            },
            0.7,
            100.0,
        )
        .unwrap()
    }

    /// Dense arc length of the exact curve between two parameter values.
    fn dense_arc(a: f64, b: f64, p0: f64, p1: f64) -> f64 {
        let n = 200_000;
        let mut acc = 0.0;
        let f = |s: f64| (a * s.sin(), b * s.sin() * s.cos());
        let mut prev = f(p0);
        for k in 1..=n {
            let cur = f(p0 + (p1 - p0) * k as f64 / n as f64);
            acc += (cur.0 - prev.0).hypot(cur.1 - prev.1);
            prev = cur;
        }
        acc
    }

    fn param_of(p: &PedestrianPose, a: f64, b: f64, cx: f64, cy: f64) -> f64 {
        // invert by nearest dense sample
        let n = 400_000;
        (0..=n)
            .map(|k| 2.0 * PI * k as f64 / n as f64)
            .min_by(|&s, &r| {
                let d = |s: f64| {
                    (cx + a * s.sin() - p.x).hypot(cy + b * s.sin() * s.cos() - p.y)
                };
                d(s).partial_cmp(&d(r)).unwrap()
            })
            .unwrap()
    }

    #[test]
    fn starts_at_path_origin() {
        let p = path().position(0.0).unwrap();
        assert!((p.x - 10.5).abs() < 1e-12 && (p.y - 6.0).abs() < 1e-12);
    }

    #[test]
    fn seven_meters_between_ten_and_twenty_seconds() {
        let path = path();
        let p10 = path.position(10.0).unwrap();
        let p20 = path.position(20.0).unwrap();
        let s0 = param_of(&p10, 8.5, 9.0, 10.5, 6.0);
        let s1 = param_of(&p20, 8.5, 9.0, 10.5, 6.0);
        let d = dense_arc(8.5, 9.0, s0, s1);
        assert!((d - 7.0).abs() < 1e-3, "traveled {d}");
    }

    #[test]
    fn out_of_range_is_episode_over() {
        let path = path();
        assert!(path.position(100.0).is_some());
        assert!(path.position(100.05).is_none());
        assert!(path.position(-0.1).is_none());
    }

    #[test]
    fn finite_difference_speed() {
        let path = path();
        let h = 1e-3;
        for k in 0..2000 {
            let t = 0.01 + k as f64 * 0.0499;
            let a = path.position(t).unwrap();
            let b = path.position(t + h).unwrap();
            let v = (b.x - a.x).hypot(b.y - a.y) / h;
            assert!((v - 0.7).abs() <= 1e-3, "speed {v} at t={t}");
        }
    }

    #[test]
    fn zero_speed_stays_put() {
        let p = PedestrianPath::from_spec(
            &PathSpec::Lemniscate {
                cx: 5.0,
                cy: 5.0,
                a: 3.0,
                b: 3.0,
            },
            0.0,
            10.0,
        )
        .unwrap();
        assert_eq!(p.position(0.0), p.position(9.0));
    }
}
