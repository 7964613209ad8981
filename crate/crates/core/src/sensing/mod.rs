//! Synthetic event camera and depth sensor.
//!
//! The camera does not model photometry. The scene is a binary occupancy
//! image of the pedestrian silhouette, and every pixel that changes state
//! between two renders emits one event (0 -> 1 is a negative event, the
//! body being darker than the background; 1 -> 0 is positive).

mod camera;
mod depth;
mod events;
mod homography;
mod sae;

pub use camera::{
    render_silhouette, render_textured_silhouette, silhouette_extent, CameraModel, Occupancy,
    PedestrianShape, PixelRect, SENSOR_HEIGHT, SENSOR_WIDTH,
};
pub use depth::DepthSensor;
pub use events::{synthesize_events, write_events_csv, Event, EventStream};
pub use homography::Homography;
pub use sae::{build_sae, sae_value, write_pgm, SaeFrame};
