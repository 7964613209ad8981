use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::sensing::Occupancy;

/// One brightness-change event. `t` is in microseconds, `p` is -1 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    pub t: u64,
    pub p: i8,
}

/// Events between two consecutive occupancy renders at `t0` and `t1` (us).
///
/// Every flipped pixel yields exactly one event with a timestamp drawn
/// uniformly from `(t0, t1]`. Background activity is added as a Poisson
/// process of `noise_rate` events per pixel per second with random
/// polarity. The result is sorted by timestamp (stable).
pub fn synthesize_events<R: Rng + ?Sized>(
    prev: &Occupancy,
    curr: &Occupancy,
    t0: u64,
    t1: u64,
    noise_rate: f64,
    rng: &mut R,
) -> Result<Vec<Event>> {
    if t1 <= t0 {
        return Err(Error::Contract(format!(
            "event interval must be increasing (t0={t0}, t1={t1})"
        )));
    }
    if prev.width() != curr.width() || prev.height() != curr.height() {
        return Err(Error::Contract("occupancy images differ in size".into()));
    }
    if !(noise_rate >= 0.0) {
        return Err(Error::Parameter(format!("noise rate must be >= 0, got {noise_rate}")));
    }
    let span = t1 - t0;
    let mut out = Vec::new();
    let region = match (prev.bounds(), curr.bounds()) {
        (Some(a), Some(b)) => Some(a.union(&b)),
        (a, b) => a.or(b),
    };
    if let Some(r) = region {
        for y in r.y0..=r.y1 {
            for x in r.x0..=r.x1 {
                let (was, is) = (prev.get(x, y), curr.get(x, y));
                if was != is {
                    out.push(Event {
                        x: x as u16,
                        y: y as u16,
                        t: t0 + 1 + rng.gen_range(0..span),
                        p: if is { -1 } else { 1 },
                    });
                }
            }
        }
    }
    let pixels = (curr.width() * curr.height()) as f64;
    let mean = noise_rate * pixels * span as f64 * 1e-6;
    if mean > 0.0 {
        let count = Poisson::new(mean)
            .map_err(|e| Error::Parameter(format!("noise rate: {e}")))?
            .sample(rng) as usize;
        for _ in 0..count {
            out.push(Event {
                x: rng.gen_range(0..curr.width()) as u16,
                y: rng.gen_range(0..curr.height()) as u16,
                t: t0 + 1 + rng.gen_range(0..span),
                p: if rng.gen::<bool>() { 1 } else { -1 },
            });
        }
    }
    out.sort_by_key(|e| e.t);
    Ok(out)
}

/// Time-ordered event buffer with a bounded retention horizon.
#[derive(Debug, Clone)]
pub struct EventStream {
    events: Vec<Event>,
    retention_us: u64,
}

impl EventStream {
    pub fn new(retention_us: u64) -> Self {
        Self {
            events: Vec::new(),
            retention_us,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn clear(&mut self) {
        self.events.clear();
    }

    /// Append a sorted batch that does not precede the buffered events.
    pub fn extend(&mut self, batch: &[Event]) -> Result<()> {
        let mut last = self.events.last().map_or(0, |e| e.t);
        for e in batch {
            if e.t < last {
                return Err(Error::Contract(format!(
                    "event at {} us arrives after {} us",
                    e.t, last
                )));
            }
            last = e.t;
        }
        self.events.extend_from_slice(batch);
        Ok(())
    }

    /// Drop events that fell out of the retention horizon ending at `now`.
    pub fn prune(&mut self, now: u64) {
        let cutoff = now.saturating_sub(self.retention_us);
        let keep_from = self.events.partition_point(|e| e.t <= cutoff);
        if keep_from > 0 {
            self.events.drain(..keep_from);
        }
    }

    /// Events with `t - dt < t_k <= t`, in stream order.
    pub fn window_by_time(&self, t: u64, dt: u64) -> Result<&[Event]> {
        if dt == 0 {
            return Err(Error::Contract("time window must be positive".into()));
        }
        let lo = self.events.partition_point(|e| e.t + dt <= t);
        let hi = self.events.partition_point(|e| e.t <= t);
        Ok(&self.events[lo..hi.max(lo)])
    }

    /// The latest `n` events at or before `t` (fewer if not available).
    pub fn window_by_count(&self, t: u64, n: usize) -> Result<&[Event]> {
        if n == 0 {
            return Err(Error::Contract("event count window must be positive".into()));
        }
        let hi = self.events.partition_point(|e| e.t <= t);
        Ok(&self.events[hi.saturating_sub(n)..hi])
    }
}

/// Dump events as `t_us,x,y,p` text.
pub fn write_events_csv(path: impl AsRef<Path>, events: &[Event]) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    w.write_record(["t_us", "x", "y", "p"])?;
    for e in events {
        w.write_record([
            e.t.to_string(),
            e.x.to_string(),
            e.y.to_string(),
            e.p.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
