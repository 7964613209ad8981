use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sensing::{Event, SENSOR_HEIGHT, SENSOR_WIDTH};

/// Surface of active events over one window: per-polarity channels holding
/// the scaled time of the last event at each pixel, plus their composite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SaeFrame {
    pub width: usize,
    pub height: usize,
    pub neg: Vec<u8>,
    pub pos: Vec<u8>,
    /// Per-pixel maximum of the two channels.
    pub composite: Vec<u8>,
    pub t_init: u64,
    pub dt: u64,
}

/// `round(255 * (t_e - t_init) / dt)` with halves rounded up, in exact
/// integer arithmetic.
pub fn sae_value(t_e: u64, t_init: u64, dt: u64) -> u8 {
    let num = 2 * 255 * (t_e - t_init) as u128 + dt as u128;
    (num / (2 * dt as u128)) as u8
}

/// SAE frame for the standard 346 x 260 sensor.
pub fn build_sae(events: &[Event], t_init: u64, dt: u64) -> Result<SaeFrame> {
    SaeFrame::build(events, t_init, dt, SENSOR_WIDTH, SENSOR_HEIGHT)
}

impl SaeFrame {
    pub fn build(
        events: &[Event],
        t_init: u64,
        dt: u64,
        width: usize,
        height: usize,
    ) -> Result<Self> {
        if dt == 0 {
            return Err(Error::Contract("SAE window must be positive".into()));
        }
        let mut neg = vec![0u8; width * height];
        let mut pos = vec![0u8; width * height];
        // the value written last wins, so a stream in time order keeps the
        // most recent event per pixel
        for e in events {
            if e.t < t_init || e.t > t_init + dt {
                return Err(Error::Contract(format!(
                    "event at {} us lies outside the window [{}, {}]",
                    e.t,
                    t_init,
                    t_init + dt
                )));
            }
            let (x, y) = (e.x as usize, e.y as usize);
            if x >= width || y >= height {
                return Err(Error::Contract(format!("event pixel ({x}, {y}) off the sensor")));
            }
            let v = sae_value(e.t, t_init, dt);
            let i = y * width + x;
            if e.p > 0 {
                pos[i] = v;
            } else {
                neg[i] = v;
            }
        }
        let composite = neg.iter().zip(&pos).map(|(&a, &b)| a.max(b)).collect();
        Ok(Self {
            width,
            height,
            neg,
            pos,
            composite,
            t_init,
            dt,
        })
    }

    pub fn composite_at(&self, x: usize, y: usize) -> u8 {
        self.composite[y * self.width + x]
    }
}

/// Write an 8-bit grayscale image as binary PGM (P5).
pub fn write_pgm(path: impl AsRef<Path>, width: usize, height: usize, data: &[u8]) -> Result<()> {
    let path = path.as_ref();
    if data.len() != width * height {
        return Err(Error::Contract("PGM buffer does not match its size".into()));
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write!(f, "P5\n{width} {height}\n255\n").map_err(|e| Error::io(path, e))?;
    f.write_all(data).map_err(|e| Error::io(path, e))?;
    Ok(())
}
