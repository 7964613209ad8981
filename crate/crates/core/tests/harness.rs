mod common;

use common::*;
use evnav::harness::{
    collect_expert, compute_metrics, run_eval, Controller, EpisodeLog, MetricsTable, NavEnv,
    RunConfig, StepRecord,
};
use evnav::control::Environment;
use evnav::rng::rng_from_seed;
use evnav::world::TerminationStatus;
use rand::Rng;

#[test]
fn each_termination_condition_is_reported() {
    for (name, want, log) in termination_scenarios() {
        assert_eq!(log.status(), want, "{name}");
        let (last, body) = log.rows.split_last().unwrap();
        assert_eq!(last.status, want, "{name}");
        assert!(body.iter().all(|r| r.status == TerminationStatus::Running), "{name}");
    }
}

#[test]
fn feature_lost_after_four_seconds() {
    let s = termination_scenarios();
    let log = &s[1].2;
    let t = log.rows.last().unwrap().t;
    assert!((t - 4.1).abs() < 1e-9, "ended at {t}");
}

#[test]
fn obstacle_stops_the_robot_inside_the_map() {
    let s = termination_scenarios();
    let last = s[3].2.rows.last().unwrap();
    assert!(last.d_obs < 0.5);
    assert!(last.x_r > 0.0 && last.x_r < 21.0 && last.y_r > 0.0 && last.y_r < 12.0);
    assert!(last.d_ped > 1.0);
}

#[test]
fn pd_at_equilibrium_stays_put() {
    let mut cfg = quiet_config();
    cfg.episode.pedestrian_speed = 0.0;
    cfg.episode.duration = 10.0;
    let mut env = env_with(&cfg, spawn_behind(2.0, 0.0), &[]);
    let log = run(&mut env, Controller::from_config(&cfg).unwrap());
    assert_eq!(log.rows.len(), 100);
    assert_eq!(log.status(), TerminationStatus::GoalReached);
    for (k, r) in log.rows.iter().enumerate() {
        assert!((r.t - 0.1 * (k + 1) as f64).abs() < 1e-9);
        assert!(r.v_r.abs() < 0.02 && r.omega_r.abs() < 0.02, "{r:?}");
        if k + 1 < log.rows.len() {
            assert_eq!(r.status, TerminationStatus::Running);
        }
    }
}

#[test]
fn episode_times_advance_in_control_periods() {
    let cfg = RunConfig::default();
    let mut env = NavEnv::new(&cfg).unwrap();
    let mut ctrl = Controller::from_config(&cfg).unwrap();
    let log = evnav::harness::simulate(&mut env, &mut ctrl, 3).unwrap();
    for w in log.rows.windows(2) {
        assert!(((w[1].t - w[0].t) - 0.1).abs() < 1e-9);
    }
}

#[test]
fn repeated_evaluation_is_byte_identical() {
    let mut cfg = RunConfig::default();
    cfg.episode.duration = 15.0;
    let ctrl = Controller::from_config(&cfg).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_eval(&cfg, &ctrl, 3, Some(a.path())).unwrap();
    run_eval(&cfg, &ctrl, 3, Some(b.path())).unwrap();
    for rel in [
        "episodes/ep000.csv",
        "episodes/ep001.csv",
        "episodes/ep002.csv",
        "metrics.json",
        "config.echo.json",
        "plots/trajectory.svg",
    ] {
        let x = std::fs::read(a.path().join(rel)).unwrap();
        let y = std::fs::read(b.path().join(rel)).unwrap();
        assert!(x == y, "{rel} differs");
    }
}

#[test]
fn run_directory_layout() {
    let mut cfg = RunConfig::default();
    cfg.episode.duration = 5.0;
    let ctrl = Controller::from_config(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_eval(&cfg, &ctrl, 2, Some(dir.path())).unwrap();
    for rel in [
        "config.echo.json",
        "episodes/ep000.csv",
        "episodes/ep001.csv",
        "metrics.json",
        "plots/trajectory.svg",
        "plots/v_r.svg",
        "plots/omega_r.svg",
        "plots/x_box.svg",
        "plots/d_ped.svg",
    ] {
        assert!(dir.path().join(rel).exists(), "{rel}");
    }
    let back = MetricsTable::read_json(&dir.path().join("metrics.json")).unwrap();
    assert_eq!(back, report.metrics);
    let logs: Vec<EpisodeLog> = (0..2)
        .map(|i| EpisodeLog::read_csv(&dir.path().join(format!("episodes/ep{i:03}.csv"))).unwrap())
        .collect();
    assert_eq!(compute_metrics(&logs).unwrap(), report.metrics);
}

fn naive_stats(v: &[f64]) -> [f64; 5] {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if s.len() % 2 == 1 {
        s[s.len() / 2]
    } else {
        0.5 * (s[s.len() / 2 - 1] + s[s.len() / 2])
    };
    [mean, median, var.sqrt(), s[0], s[s.len() - 1]]
}

fn random_row<R: Rng>(rng: &mut R, t: f64) -> StepRecord {
    StepRecord {
        t,
        x_r: rng.gen_range(0.0..21.0),
        y_r: rng.gen_range(0.0..12.0),
        theta: rng.gen_range(-3.0..3.0),
        v_r: rng.gen_range(0.0..1.0),
        omega_r: rng.gen_range(-0.5..0.5),
        x_box: rng.gen_range(0.0..346.0),
        d_ped: rng.gen_range(1.0..3.0),
        d_obs: rng.gen_range(0.5..5.0),
        theta_obs: rng.gen_range(-3.0..3.0),
        reward: rng.gen_range(-20.0..0.0),
        status: TerminationStatus::Running,
    }
}

#[test]
fn metrics_match_naive_reference() {
    let mut rng = rng_from_seed(12);
    for trial in 0..50 {
        let logs: Vec<EpisodeLog> = (0..1 + trial % 4)
            .map(|e| EpisodeLog {
                seed: e as u64,
                rows: (0..rng.gen_range(1..200))
                    .map(|k| random_row(&mut rng, 0.1 * (k + 1) as f64))
                    .collect(),
            })
            .collect();
        let m = compute_metrics(&logs).unwrap();
        let rows: Vec<&StepRecord> = logs.iter().flat_map(|l| &l.rows).collect();
        let cols: [(&evnav::harness::Stats, Vec<f64>); 4] = [
            (&m.v_r, rows.iter().map(|r| r.v_r).collect()),
            (&m.omega_r, rows.iter().map(|r| r.omega_r).collect()),
            (&m.x_box, rows.iter().map(|r| r.x_box).collect()),
            (&m.d_ped, rows.iter().map(|r| r.d_ped).collect()),
        ];
        for (stats, values) in cols {
            let want = naive_stats(&values);
            let got = [stats.mean, stats.median, stats.std, stats.min, stats.max];
            for (g, w) in got.iter().zip(want) {
                assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()), "{g} vs {w}");
            }
            assert!(stats.min <= stats.median && stats.median <= stats.max && stats.std >= 0.0);
        }
    }
}

#[test]
fn metrics_examples() {
    let mut rng = rng_from_seed(0);
    let rows: Vec<StepRecord> = [1.0, 2.0, 3.0]
        .iter()
        .enumerate()
        .map(|(k, &v)| StepRecord {
            v_r: v,
            x_box: 100.0,
            ..random_row(&mut rng, 0.1 * (k + 1) as f64)
        })
        .collect();
    let m = compute_metrics(&[EpisodeLog { seed: 0, rows }]).unwrap();
    assert!((m.v_r.mean - 2.0).abs() < 1e-15 && m.v_r.median == 2.0);
    assert!((m.v_r.std - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    assert_eq!((m.x_box.mean, m.x_box.median, m.x_box.std), (100.0, 100.0, 0.0));
    assert_eq!((m.x_box.min, m.x_box.max), (100.0, 100.0));
    assert!(compute_metrics(&[]).is_err());
}

#[test]
fn expert_collection_keeps_only_successful_episodes() {
    let mut cfg = RunConfig::default();
    cfg.sensor.detector = evnav::harness::DetectorKind::Oracle;
    cfg.episode.duration = 20.0;
    cfg.episode.pedestrian_speed = 1.2;
    let (data, report) = collect_expert(&cfg, 6).unwrap();
    let goals = report
        .terminations
        .iter()
        .filter(|&&t| t == TerminationStatus::GoalReached)
        .count();
    assert_eq!(report.attempted, 6);
    assert_eq!(report.kept, goals);
    assert!(goals < 6, "faster pedestrian should defeat some rollouts");
    assert_eq!(report.pairs, data.len());
    assert_eq!(data.len(), goals * 200);
    assert!(data.states.iter().all(|s| s.len() == 6));
    assert!(data.actions.iter().all(|a| a[0].abs() <= 0.2 && a[1].abs() <= 0.5));
}

#[test]
fn random_start_spawns_behind_the_walker() {
    let mut cfg = RunConfig::default();
    cfg.episode.random_start = true;
    cfg.sensor.detector = evnav::harness::DetectorKind::Oracle;
    let mut env = NavEnv::new(&cfg).unwrap();
    let mut arcs = Vec::new();
    for seed in 0..20 {
        env.reset(seed).unwrap();
        let (px, py) = env.pedestrian_xy(0.0);
        let p = env.pose();
        let d = (px - p.x).hypot(py - p.y);
        assert!((d - 2.0).abs() <= 0.3 * 2f64.sqrt() + 1e-9, "distance {d}");
        assert!(env.map().clearance(p.x, p.y) > 0.5);
        arcs.push(env.start_arc());
    }
    arcs.sort_by(f64::total_cmp);
    arcs.dedup();
    assert_eq!(arcs.len(), 20);
}
