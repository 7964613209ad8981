//! `evnav`: simulate, train and evaluate event-camera person following.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evnav::harness::{
    collect_expert, compute_metrics, run_eval, train_bc, train_ddpg, Controller, ControllerKind,
    EpisodeLog, NavEnv, RunConfig,
};
use evnav::neural::{load_weights, save_weights};
use evnav::perception::draw_box;
use evnav::sensing::{write_events_csv, write_pgm};
use evnav::{Error, Result};

#[derive(Parser)]
#[command(name = "evnav", version, about = "Event-camera person following: simulation, training and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run episodes with a controller and write the run directory.
    Sim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        episodes: Option<usize>,
        /// pd, bc or ddpg.
        #[arg(long)]
        controller: Option<String>,
        /// Actor weights for bc/ddpg.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Dump events, SAE frames and detection overlays for the first N
        /// ticks of episode 0 into `sensing/`.
        #[arg(long, default_value_t = 0)]
        dump_sensing: usize,
    },
    /// Roll out the PD expert and save successful episodes as a dataset.
    CollectExpert {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Behavior cloning on an expert dataset.
    TrainBc {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// DDPG training on the navigation environment.
    TrainDdpg {
        #[command(flatten)]
        common: Common,
        /// Pre-trained actor to start from.
        #[arg(long)]
        init_actor: Option<PathBuf>,
        #[arg(long)]
        episodes: Option<usize>,
    },
    /// Multi-seed evaluation with metrics and plots.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        controller: Option<String>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Recompute metrics and plots from a run directory's episode CSVs.
    Plot {
        #[command(flatten)]
        common: Common,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(common: &Common, default: &str) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn apply_controller(cfg: &mut RunConfig, controller: Option<String>, checkpoint: Option<PathBuf>) -> Result<()> {
    if let Some(c) = controller {
        cfg.controller = match c.as_str() {
            "pd" => ControllerKind::Pd,
            "bc" => ControllerKind::Bc,
            "ddpg" => ControllerKind::Ddpg,
            other => return Err(Error::Config(format!("unknown controller {other:?} (pd, bc, ddpg)"))),
        };
    }
    if checkpoint.is_some() {
        cfg.checkpoint = checkpoint;
    }
    cfg.check_files()
}

fn dump_sensing(cfg: &RunConfig, controller: &Controller, ticks: usize, out: &Path) -> Result<()> {
    let dir = out.join("sensing");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut env = NavEnv::new(cfg)?;
    env.capture = true;
    let mut ctrl = controller.clone();
    let mut state = evnav::control::Environment::reset(&mut env, evnav::harness::episode_seed(cfg.seed, 0))?;
    for k in 0..ticks {
        if let Some(c) = env.captured() {
            let stem = dir.join(format!("tick{k:04}"));
            write_events_csv(stem.with_extension("events.csv"), &c.events)?;
            write_pgm(stem.with_extension("sae.pgm"), c.sae.width, c.sae.height, &c.sae.composite)?;
            if let Some(b) = &c.detection {
                let img = draw_box(&c.sae.composite, c.sae.width, c.sae.height, b);
                write_pgm(stem.with_extension("overlay.pgm"), c.sae.width, c.sae.height, &img)?;
            }
        }
        let a = ctrl.act(&env, &state)?;
        let outcome = env.step_action(a)?;
        if outcome.done() {
            break;
        }
        state = outcome.state;
    }
    Ok(())
}

fn report_eval(cfg: &RunConfig, episodes: usize, out: &Path) -> Result<()> {
    let controller = Controller::from_config(cfg)?;
    let report = run_eval(cfg, &controller, episodes, Some(out))?;
    print!("{}", report.metrics.render_table());
    println!("wrote {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sim {
            common,
            episodes,
            controller,
            checkpoint,
            dump_sensing: ticks,
        } => {
            let mut cfg = load_config(&common)?;
            apply_controller(&mut cfg, controller, checkpoint)?;
            let episodes = episodes.unwrap_or(cfg.episodes);
            let out = out_dir(&common, "runs/sim");
            if ticks > 0 {
                dump_sensing(&cfg, &Controller::from_config(&cfg)?, ticks, &out)?;
            }
            report_eval(&cfg, episodes, &out)
        }
        Command::Eval {
            common,
            episodes,
            controller,
            checkpoint,
        } => {
            let mut cfg = load_config(&common)?;
            apply_controller(&mut cfg, controller, checkpoint)?;
            let episodes = episodes.unwrap_or(cfg.episodes);
            report_eval(&cfg, episodes, &out_dir(&common, "runs/eval"))
        }
        Command::CollectExpert { common, episodes } => {
            let cfg = load_config(&common)?;
            let out = out_dir(&common, "runs/expert");
            cfg.echo(&out)?;
            let (data, report) = collect_expert(&cfg, episodes.unwrap_or(20))?;
            let path = out.join("dataset.csv");
            data.write_csv(&path)?;
            println!(
                "kept {} of {} expert episodes, {} state-action pairs -> {}",
                report.kept,
                report.attempted,
                report.pairs,
                path.display()
            );
            Ok(())
        }
        Command::TrainBc {
            common,
            dataset,
            epochs,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(e) = epochs {
                cfg.bc.epochs = e;
            }
            let data = evnav::harness::ExpertDataset::read_csv(&dataset)?;
            if data.is_empty() {
                return Err(Error::Config(format!("{} holds no samples", dataset.display())));
            }
            let out = out_dir(&common, "runs/bc");
            cfg.echo(&out)?;
            let (actor, report) = train_bc(&cfg, &data)?;
            save_weights(&actor, &out.join("actor.wts"))?;
            let path = out.join("bc_report.json");
            std::fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")
                .map_err(|e| Error::io(&path, e))?;
            println!(
                "bc: train loss {:.3e} -> {:.3e}, best held-out {:.3e} at epoch {}",
                report.initial_train_loss,
                report.train_losses.last().copied().unwrap_or(report.initial_train_loss),
                report.best_val_loss,
                report.best_epoch
            );
            Ok(())
        }
        Command::TrainDdpg {
            common,
            init_actor,
            episodes,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(n) = episodes {
                cfg.ddpg.episodes = n;
            }
            let init = init_actor.as_deref().map(load_weights).transpose()?;
            let out = out_dir(&common, "runs/ddpg");
            let outcome = train_ddpg(&cfg, init, Some(&out))?;
            let goals = outcome
                .log
                .records
                .iter()
                .filter(|r| r.termination == "GoalReached")
                .count();
            println!(
                "ddpg: {} episodes ({} GoalReached){}, checkpoints in {}",
                outcome.log.records.len(),
                goals,
                if outcome.stopped_early { ", stopped early" } else { "" },
                out.display()
            );
            Ok(())
        }
        Command::Plot { common } => {
            let cfg = match &common.config {
                Some(_) => load_config(&common)?,
                None => {
                    let echo = out_dir(&common, "runs/eval").join("config.echo.json");
                    if echo.is_file() {
                        RunConfig::load(&echo)?
                    } else {
                        RunConfig::default()
                    }
                }
            };
            let out = out_dir(&common, "runs/eval");
            let eps = out.join("episodes");
            let mut files: Vec<PathBuf> = std::fs::read_dir(&eps)
                .map_err(|e| Error::io(&eps, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            files.sort();
            let logs = files.iter().map(|p| EpisodeLog::read_csv(p)).collect::<Result<Vec<_>>>()?;
            let metrics = compute_metrics(&logs)?;
            let env = NavEnv::new(&cfg)?;
            evnav::harness::write_plots(&out, env.map(), env.path(), &logs)?;
            metrics.write_json(&out.join("metrics.json"))?;
            print!("{}", metrics.render_table());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("EVNAV_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
