use serde::{Deserialize, Serialize};

use crate::sensing::{silhouette_extent, CameraModel, PedestrianShape, PixelRect, SaeFrame};
use crate::world::RobotPose;

/// Axis-aligned detection box in sensor pixels (centers on integer pixels).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x_box: f64,
    pub y_box: f64,
    pub width: f64,
    pub height: f64,
    pub confidence: f64,
}

impl BoundingBox {
    fn from_rect(r: &PixelRect, confidence: f64) -> Self {
        let (x_box, y_box) = r.center();
        Self {
            x_box,
            y_box,
            width: r.width() as f64,
            height: r.height() as f64,
            confidence,
        }
    }
}

/// Blob detector parameters: binarization level and minimum component area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorConfig {
    pub threshold: u8,
    pub min_area: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            threshold: 50,
            min_area: 15,
        }
    }
}

/// Largest 4-connected component of the composite SAE at or above the threshold.
///
/// Stand-in for a learned detector. Ties on area keep the component found
/// first in row-major order.
pub fn detect_pedestrian_sae(frame: &SaeFrame, cfg: &DetectorConfig) -> Option<BoundingBox> {
    let (w, h) = (frame.width, frame.height);
    let on = |i: usize| frame.composite[i] >= cfg.threshold && frame.composite[i] > 0;
    let mut seen = vec![false; w * h];
    let mut stack = Vec::new();
    let mut best: Option<(usize, PixelRect)> = None;
    for start in 0..w * h {
        if seen[start] || !on(start) {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut area = 0usize;
        let mut rect = PixelRect {
            x0: start % w,
            y0: start / w,
            x1: start % w,
            y1: start / w,
        };
        while let Some(i) = stack.pop() {
            area += 1;
            let (x, y) = (i % w, i / w);
            rect.x0 = rect.x0.min(x);
            rect.x1 = rect.x1.max(x);
            rect.y0 = rect.y0.min(y);
            rect.y1 = rect.y1.max(y);
            let mut visit = |j: usize| {
                if !seen[j] && on(j) {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
        if area >= cfg.min_area && best.map_or(true, |(a, _)| area > a) {
            best = Some((area, rect));
        }
    }
    best.map(|(area, rect)| BoundingBox::from_rect(&rect, area as f64 / rect.area() as f64))
}

/// Ground-truth box of the projected silhouette, when any of it is on the sensor.
pub fn oracle_detect(
    cam: &CameraModel,
    robot: &RobotPose,
    ped: (f64, f64),
    shape: &PedestrianShape,
) -> Option<BoundingBox> {
    silhouette_extent(cam, robot, ped, shape).map(|r| BoundingBox::from_rect(&r, 1.0))
}

/// Copy of `image` with the outline of `b` drawn at value 255.
pub fn draw_box(image: &[u8], width: usize, height: usize, b: &BoundingBox) -> Vec<u8> {
    let mut out = image.to_vec();
    let half_w = (b.width - 1.0) / 2.0;
    let half_h = (b.height - 1.0) / 2.0;
    let clip = |v: f64, n: usize| v.round().clamp(0.0, n as f64 - 1.0) as usize;
    let (x0, x1) = (clip(b.x_box - half_w, width), clip(b.x_box + half_w, width));
    let (y0, y1) = (clip(b.y_box - half_h, height), clip(b.y_box + half_h, height));
    for x in x0..=x1 {
        out[y0 * width + x] = 255;
        out[y1 * width + x] = 255;
    }
    for y in y0..=y1 {
        out[y * width + x0] = 255;
        out[y * width + x1] = 255;
    }
    out
}
