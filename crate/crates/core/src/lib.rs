//! Simulation and training stack for event-camera person following.
//!
//! The crate is split along the data flow of a single control tick:
//!
//! * [`world`]: map geometry, differential-drive kinematics, the pedestrian's
//!   figure-eight walk, LIDAR raycasting and episode termination.
//! * [`sensing`]: a synthetic event camera (silhouette rendering, event
//!   synthesis, time/count windows, surface-of-active-events frames) plus the
//!   homography-mapped depth sensor.
//! * [`perception`]: pedestrian detection, visibility tracking and the 6-D
//!   controller state.
//! * [`neural`]: a small dense MLP engine with exact backprop, Adam and a
//!   checksummed weight format.
//! * [`control`]: PD expert, reward, behavior cloning, OU exploration,
//!   replay buffer and the DDPG learner.
//! * [`harness`]: configuration, the navigation environment, episode runner,
//!   metrics and SVG/CSV export.

pub mod control;
pub mod error;
pub mod harness;
pub mod neural;
pub mod rng;
pub mod perception;
pub mod sensing;
pub mod world;

pub use error::{Error, Result};
