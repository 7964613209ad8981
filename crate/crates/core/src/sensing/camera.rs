use serde::{Deserialize, Serialize};

use crate::world::RobotPose;

pub const SENSOR_WIDTH: usize = 346;
pub const SENSOR_HEIGHT: usize = 260;

/// Pinhole camera rigidly mounted on the robot, looking along its heading.
///
/// Pixel centers sit at integer coordinates: column `i` spans `[i - 0.5, i + 0.5)`.
/// The camera frame has X to the right, Y down and Z forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraModel {
    pub width: usize,
    pub height: usize,
    /// Focal length in pixels (square pixels).
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
    /// Height of the optical center above the floor (m).
    pub mount_height: f64,
    /// Forward offset of the optical center from the robot reference point (m).
    pub forward_offset: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            width: SENSOR_WIDTH,
            height: SENSOR_HEIGHT,
            focal: 250.0,
            cx: 173.0,
            cy: 130.0,
            mount_height: 0.8,
            forward_offset: 0.0,
        }
    }
}

/// Nearest depth at which anything is rendered (m).
const NEAR_PLANE: f64 = 0.05;

impl CameraModel {
    pub fn is_valid(&self) -> bool {
        self.focal > 0.0
            && self.width > 0
            && self.height > 0
            && self.cx >= 0.0
            && self.cx < self.width as f64
            && self.cy >= 0.0
            && self.cy < self.height as f64
    }

    /// Horizontal field of view (rad).
    pub fn horizontal_fov(&self) -> f64 {
        2.0 * (self.width as f64 / 2.0 / self.focal).atan()
    }

    /// World position of the optical center on the floor plane.
    pub fn center(&self, robot: &RobotPose) -> (f64, f64) {
        (
            robot.x + self.forward_offset * robot.theta.cos(),
            robot.y + self.forward_offset * robot.theta.sin(),
        )
    }

    /// World point `(x, y, z)` expressed in the camera frame.
    pub fn to_camera_frame(&self, robot: &RobotPose, p: [f64; 3]) -> [f64; 3] {
        let (ox, oy) = self.center(robot);
        let (s, c) = robot.theta.sin_cos();
        let (dx, dy) = (p[0] - ox, p[1] - oy);
        let forward = dx * c + dy * s;
        let left = -dx * s + dy * c;
        [-left, self.mount_height - p[2], forward]
    }

    /// Pinhole projection; `None` when behind the camera or off the sensor.
    pub fn project_point(&self, robot: &RobotPose, p: [f64; 3]) -> Option<(f64, f64)> {
        let [x, y, z] = self.to_camera_frame(robot, p);
        if z <= NEAR_PLANE {
            return None;
        }
        let u = self.cx + self.focal * x / z;
        let v = self.cy + self.focal * y / z;
        let inside = u >= -0.5
            && u < self.width as f64 - 0.5
            && v >= -0.5
            && v < self.height as f64 - 0.5;
        inside.then_some((u, v))
    }

    /// Horizontal distance from the optical center to a floor point.
    pub fn range_to(&self, robot: &RobotPose, x: f64, y: f64) -> f64 {
        let (ox, oy) = self.center(robot);
        (x - ox).hypot(y - oy)
    }
}

/// Upright planar pedestrian model, always facing the camera.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PedestrianShape {
    pub height: f64,
    pub width: f64,
}

impl Default for PedestrianShape {
    fn default() -> Self {
        Self {
            height: 1.7,
            width: 0.5,
        }
    }
}

/// Inclusive pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PixelRect {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

impl PixelRect {
    pub fn width(&self) -> usize {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0 + 1
    }

    pub fn area(&self) -> usize {
        self.width() * self.height()
    }

    pub fn union(&self, other: &PixelRect) -> PixelRect {
        PixelRect {
            x0: self.x0.min(other.x0),
            y0: self.y0.min(other.y0),
            x1: self.x1.max(other.x1),
            y1: self.y1.max(other.y1),
        }
    }

    pub fn center(&self) -> (f64, f64) {
        (
            (self.x0 + self.x1) as f64 / 2.0,
            (self.y0 + self.y1) as f64 / 2.0,
        )
    }
}

/// Binary image; also remembers a rectangle enclosing every set pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occupancy {
    width: usize,
    height: usize,
    data: Vec<u8>,
    bounds: Option<PixelRect>,
}

impl Occupancy {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
            bounds: None,
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut img = Self::empty(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    img.set(x, y, true);
                }
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x] != 0
    }

    pub fn set(&mut self, x: usize, y: usize, on: bool) {
        self.data[y * self.width + x] = on as u8;
        if on {
            let px = PixelRect {
                x0: x,
                y0: y,
                x1: x,
                y1: y,
            };
            self.bounds = Some(self.bounds.map_or(px, |b| b.union(&px)));
        }
    }

    /// A rectangle containing every set pixel (possibly loose after clears).
    pub fn bounds(&self) -> Option<PixelRect> {
        self.bounds
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }
}

/// Pixel rectangle covered by the projected pedestrian, clipped to the sensor.
pub fn silhouette_extent(
    cam: &CameraModel,
    robot: &RobotPose,
    ped: (f64, f64),
    shape: &PedestrianShape,
) -> Option<PixelRect> {
    let [xc, _, z] = cam.to_camera_frame(robot, [ped.0, ped.1, 0.0]);
    if z <= NEAR_PLANE {
        return None;
    }
    let f = cam.focal / z;
    let u_left = cam.cx + f * (xc - shape.width / 2.0);
    let u_right = cam.cx + f * (xc + shape.width / 2.0);
    let v_top = cam.cy + f * (cam.mount_height - shape.height);
    let v_bottom = cam.cy + f * cam.mount_height;
    let clip = |lo: f64, hi: f64, n: usize| -> Option<(usize, usize)> {
        let a = lo.ceil().max(0.0);
        let b = hi.floor().min(n as f64 - 1.0);
        (a <= b).then_some((a as usize, b as usize))
    };
    let (x0, x1) = clip(u_left, u_right, cam.width)?;
    let (y0, y1) = clip(v_top, v_bottom, cam.height)?;
    Some(PixelRect { x0, y0, x1, y1 })
}

/// Solid binary silhouette of the pedestrian as seen from `robot`.
pub fn render_silhouette(
    cam: &CameraModel,
    robot: &RobotPose,
    ped: (f64, f64),
    shape: &PedestrianShape,
) -> Occupancy {
    render_textured_silhouette(cam, robot, ped, shape, None)
}

/// Silhouette with an optional checkerboard texture of the given parity.
///
/// The texture stands in for limb and clothing motion: flipping its parity
/// turns every body pixel into an event source, not only the outline.
pub fn render_textured_silhouette(
    cam: &CameraModel,
    robot: &RobotPose,
    ped: (f64, f64),
    shape: &PedestrianShape,
    parity: Option<bool>,
) -> Occupancy {
    let mut img = Occupancy::empty(cam.width, cam.height);
    if let Some(r) = silhouette_extent(cam, robot, ped, shape) {
        let w = img.width;
        for y in r.y0..=r.y1 {
            let row = &mut img.data[y * w..(y + 1) * w];
            match parity {
                None => row[r.x0..=r.x1].fill(1),
                Some(p) => {
                    for (x, px) in row.iter_mut().enumerate().take(r.x1 + 1).skip(r.x0) {
                        *px = (((x + y) & 1 == 0) == p) as u8;
                    }
                }
            }
        }
        img.bounds = Some(r);
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam() -> CameraModel {
        CameraModel::default()
    }

    #[test]
    fn optical_axis_hits_principal_point() {
        let c = cam();
        let robot = RobotPose::new(1.0, 2.0, 0.3);
        for depth in [0.5, 2.0, 7.0] {
            let p = [1.0 + depth * 0.3f64.cos(), 2.0 + depth * 0.3f64.sin(), 0.8];
            let (u, v) = c.project_point(&robot, p).unwrap();
            assert!((u - c.cx).abs() < 1e-9 && (v - c.cy).abs() < 1e-9);
        }
    }

    #[test]
    fn lateral_offset_projects_right() {
        let c = CameraModel {
            focal: 300.0,
            ..cam()
        };
        // 0.5 m to the right of a robot facing +x is y = -0.5
        let (u, _) = c
            .project_point(&RobotPose::default(), [2.0, -0.5, 0.8])
            .unwrap();
        assert!((u - (c.cx + 75.0)).abs() < 1e-9);
    }

    #[test]
    fn behind_is_out_of_view() {
        assert!(cam()
            .project_point(&RobotPose::default(), [-2.0, 0.0, 0.8])
            .is_none());
    }

    #[test]
    fn out_of_fov_renders_nothing() {
        let img = render_silhouette(
            &cam(),
            &RobotPose::default(),
            (0.0, 5.0),
            &PedestrianShape::default(),
        );
        assert_eq!(img.count(), 0);
        assert!(img.bounds().is_none());
    }

    #[test]
    fn centered_silhouette() {
        let c = cam();
        let img = render_silhouette(&c, &RobotPose::default(), (2.0, 0.0), &PedestrianShape::default());
        let b = img.bounds().unwrap();
        let (xc, _) = b.center();
        assert!((xc - 173.0).abs() <= 1.0);
        assert_eq!(img.count(), b.area());
        // 0.5 m at 2 m with f = 250 spans 62.5 px
        assert!((b.width() as i64 - 62).abs() <= 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        let c = cam();
        let r = RobotPose::new(0.3, -0.2, 0.1);
        let a = render_silhouette(&c, &r, (2.5, 0.4), &PedestrianShape::default());
        let b = render_silhouette(&c, &r, (2.5, 0.4), &PedestrianShape::default());
        assert_eq!(a, b);
    }

    #[test]
    fn textures_are_complementary() {
        let c = cam();
        let r = RobotPose::default();
        let shape = PedestrianShape::default();
        let solid = render_silhouette(&c, &r, (2.0, 0.0), &shape);
        let even = render_textured_silhouette(&c, &r, (2.0, 0.0), &shape, Some(true));
        let odd = render_textured_silhouette(&c, &r, (2.0, 0.0), &shape, Some(false));
        assert_eq!(even.count() + odd.count(), solid.count());
    }
}
