use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::world::{PedestrianPath, WorldMap};

use super::episode::EpisodeLog;
use super::metrics::MetricsTable;

pub const CANVAS_WIDTH: f64 = 900.0;
pub const CANVAS_HEIGHT: f64 = 540.0;
pub const PX_PER_M: f64 = 40.0;
pub const MARGIN: f64 = 30.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// World meters to trajectory-canvas pixels (y axis flipped).
pub fn world_to_px(x: f64, y: f64) -> (f64, f64) {
    (MARGIN + PX_PER_M * x, CANVAS_HEIGHT - MARGIN - PX_PER_M * y)
}

fn points(pts: impl IntoIterator<Item = (f64, f64)>) -> String {
    pts.into_iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn svg_open(s: &mut String) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" viewBox="0 0 {CANVAS_WIDTH} {CANVAS_HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
}

/// Top-down view: map boundary, obstacles, the pedestrian path and one
/// polyline per robot trajectory.
pub fn trajectory_svg(map: &WorldMap, pedestrian: &[(f64, f64)], robots: &[Vec<(f64, f64)>]) -> String {
    let mut s = String::new();
    svg_open(&mut s);
    let (x0, y0) = world_to_px(0.0, map.height);
    let _ = writeln!(
        s,
        r#"<rect class="boundary" x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="2"/>"#,
        map.width * PX_PER_M,
        map.height * PX_PER_M
    );
    for r in &map.obstacles {
        let (x, y) = world_to_px(r.x, r.y + r.h);
        let _ = writeln!(
            s,
            r#"<rect class="obstacle" x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="gray"/>"#,
            r.w * PX_PER_M,
            r.h * PX_PER_M
        );
    }
    if !pedestrian.is_empty() {
        let _ = writeln!(
            s,
            r#"<polyline class="pedestrian" points="{}" fill="none" stroke="dimgray" stroke-dasharray="6 4" stroke-width="1.5"/>"#,
            points(pedestrian.iter().map(|&(x, y)| world_to_px(x, y)))
        );
    }
    for (i, path) in robots.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<polyline class="robot" points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
            points(path.iter().map(|&(x, y)| world_to_px(x, y))),
            PALETTE[i % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Line chart of one quantity over time, one series per episode.
pub fn timeseries_svg(title: &str, series: &[Vec<(f64, f64)>]) -> String {
    let all = series.iter().flatten();
    let (mut t_max, mut lo, mut hi) = (0.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for &(t, v) in all {
        t_max = t_max.max(t);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-9 {
        (lo, hi) = (lo - 0.5, hi + 0.5);
    }
    let t_max = if t_max > 0.0 { t_max } else { 1.0 };
    let (left, right, top, bottom) = (70.0, CANVAS_WIDTH - MARGIN, 40.0, CANVAS_HEIGHT - 50.0);
    let map = |t: f64, v: f64| {
        (
            left + (right - left) * t / t_max,
            bottom - (bottom - top) * (v - lo) / (hi - lo),
        )
    };
    let mut s = String::new();
    svg_open(&mut s);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="25" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        CANVAS_WIDTH / 2.0
    );
    let _ = writeln!(
        s,
        r#"<polyline class="axes" points="{left},{top} {left},{bottom} {right},{bottom}" fill="none" stroke="black"/>"#
    );
    for (v, y) in [(hi, top), (lo, bottom)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">{v:.3}</text>"#,
            left - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{right:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="end">t = {t_max:.1} s</text>"#,
        bottom + 20.0
    );
    for (i, ser) in series.iter().enumerate() {
        let _ = writeln!(
            s,
            r#"<polyline class="series" points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            points(ser.iter().map(|&(t, v)| map(t, v))),
            PALETTE[i % PALETTE.len()]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Pedestrian path sampled every 0.5 s over its walk.
pub fn pedestrian_polyline(path: &PedestrianPath) -> Vec<(f64, f64)> {
    let n = (path.duration() / 0.5).ceil() as usize;
    (0..=n)
        .map(|k| {
            let p = path.position_clamped(k as f64 * 0.5);
            (p.x, p.y)
        })
        .collect()
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Write `plots/` SVGs for the given logs.
pub fn write_plots(out: &Path, map: &WorldMap, path: &PedestrianPath, logs: &[EpisodeLog]) -> Result<()> {
    let dir = out.join("plots");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let robots: Vec<Vec<(f64, f64)>> = logs
        .iter()
        .map(|l| l.rows.iter().map(|r| (r.x_r, r.y_r)).collect())
        .collect();
    write(
        &dir.join("trajectory.svg"),
        &trajectory_svg(map, &pedestrian_polyline(path), &robots),
    )?;
    type Column = fn(&super::StepRecord) -> f64;
    let columns: [(&str, &str, Column); 4] = [
        ("v_r", "linear velocity v_r [m/s]", |r| r.v_r),
        ("omega_r", "angular velocity omega_r [rad/s]", |r| r.omega_r),
        ("x_box", "bounding box center x_box [px]", |r| r.x_box),
        ("d_ped", "distance to pedestrian d_ped [m]", |r| r.d_ped),
    ];
    for (name, title, f) in columns {
        let series: Vec<Vec<(f64, f64)>> = logs
            .iter()
            .map(|l| l.rows.iter().map(|r| (r.t, f(r))).collect())
            .collect();
        write(&dir.join(format!("{name}.svg")), &timeseries_svg(title, &series))?;
    }
    Ok(())
}

/// Run directory layout: `episodes/epNNN.csv`, `metrics.json`, `plots/`.
pub fn write_run_outputs(
    out: &Path,
    map: &WorldMap,
    path: &PedestrianPath,
    logs: &[EpisodeLog],
    metrics: &MetricsTable,
) -> Result<()> {
    let eps = out.join("episodes");
    std::fs::create_dir_all(&eps).map_err(|e| Error::io(&eps, e))?;
    for (i, log) in logs.iter().enumerate() {
        log.write_csv(&eps.join(format!("ep{i:03}.csv")))?;
    }
    metrics.write_json(&out.join("metrics.json"))?;
    write_plots(out, map, path, logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::{PathSpec, SpawnPose};

    #[test]
    fn scale_and_flip() {
        assert_eq!(world_to_px(0.0, 0.0), (30.0, 510.0));
        assert_eq!(world_to_px(21.0, 12.0), (870.0, 30.0));
    }

    #[test]
    fn empty_map_has_only_boundary() {
        let map = WorldMap {
            width: 21.0,
            height: 12.0,
            obstacles: vec![],
            path: PathSpec::Lemniscate {
                cx: 10.5,
                cy: 6.0,
                a: 8.5,
                b: 9.0,
            },
            robot_spawn: SpawnPose {
                x: 1.0,
                y: 1.0,
                theta: 0.0,
            },
        };
        let svg = trajectory_svg(&map, &[], &[]);
        assert_eq!(svg.matches("class=\"boundary\"").count(), 1);
        assert!(!svg.contains("obstacle") && !svg.contains("polyline"));
    }

    #[test]
    fn robot_polyline_vertices() {
        let map = WorldMap::default_scenario();
        let svg = trajectory_svg(&map, &[], &[vec![(0.0, 0.0), (1.0, 2.0), (10.5, 6.0)]]);
        let line = svg.lines().find(|l| l.contains("class=\"robot\"")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts, "30.00,510.00 70.00,430.00 450.00,270.00");
    }
}
