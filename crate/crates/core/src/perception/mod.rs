//! Pedestrian detection, visibility tracking and state assembly.

mod detect;
mod state;
mod visibility;

pub use detect::{detect_pedestrian_sae, draw_box, oracle_detect, BoundingBox, DetectorConfig};
pub use state::{build_state, StateVector, STATE_DIM, STATE_SCALE};
pub use visibility::VisibilityTracker;
