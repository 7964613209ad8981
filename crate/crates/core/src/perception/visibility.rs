/// Time since the pedestrian was last detected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityTracker {
    last_detection: f64,
    now: f64,
    lost: f64,
}

impl VisibilityTracker {
    /// A tracker that counts the pedestrian as seen at `start`.
    pub fn new(start: f64) -> Self {
        Self {
            last_detection: start,
            now: start,
            lost: 0.0,
        }
    }

    /// Record a detection outcome at time `now` (s) and return the lost duration.
    pub fn update(&mut self, detected: bool, now: f64) -> f64 {
        debug_assert!(now >= self.now, "visibility clock went backwards");
        self.now = now;
        if detected {
            self.last_detection = now;
            self.lost = 0.0;
        } else {
            self.lost = now - self.last_detection;
        }
        self.lost
    }

    pub fn lost_duration(&self) -> f64 {
        self.lost
    }

    pub fn last_detection(&self) -> f64 {
        self.last_detection
    }
}
