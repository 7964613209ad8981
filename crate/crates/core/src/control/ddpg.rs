use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neural::{save_weights, Adam, AdamConfig, Mlp};
use crate::rng::{derive_seed, rng_from_seed};

use super::{Batch, Environment, OuNoise, OuParams, ReplayBuffer, Transition};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub warmup: usize,
    pub hidden: Vec<usize>,
    pub episodes: usize,
    /// Stop after this many consecutive `GoalReached` episodes; 0 disables.
    pub early_stop: usize,
    /// Hard cap on steps per episode, guarding environments without a
    /// time limit.
    pub max_steps: usize,
    /// Exploration noise, one entry per action component.
    pub noise: Vec<OuParams>,
    /// Write checkpoints every this many episodes when an output directory
    /// is given; 0 writes only at the end.
    pub checkpoint_every: usize,
    /// Multiplier applied to rewards before they enter the replay buffer.
    /// Keeps critic targets near unit scale; logged returns are unscaled.
    pub reward_scale: f64,
    /// Score the noise-free actor every this many episodes and keep the best
    /// one; 0 ranks actors by their noisy training return instead.
    pub eval_every: usize,
    /// Rollouts per score, on fixed seeds.
    pub eval_episodes: usize,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            tau: 0.001,
            actor_lr: 1e-4,
            critic_lr: 1e-4,
            batch_size: 64,
            buffer_capacity: 1_000_000,
            warmup: 1000,
            hidden: vec![30, 30],
            episodes: 3000,
            early_stop: 50,
            max_steps: 2000,
            noise: vec![OuParams::new(0.0, 0.0, 0.2), OuParams::new(0.0, 0.2, 0.3)],
            checkpoint_every: 100,
            reward_scale: 0.002,
            eval_every: 50,
            eval_episodes: 3,
        }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::Parameter(format!("tau must be in (0,1], got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::Parameter(format!("gamma must be in [0,1], got {}", self.gamma)));
        }
        if !(self.actor_lr > 0.0) || !(self.critic_lr > 0.0) {
            return Err(Error::Parameter("actor_lr and critic_lr must be > 0".into()));
        }
        if self.batch_size == 0 || self.buffer_capacity == 0 || self.max_steps == 0 {
            return Err(Error::Parameter(
                "batch_size, buffer_capacity and max_steps must be > 0".into(),
            ));
        }
        if !(self.reward_scale > 0.0 && self.reward_scale.is_finite()) {
            return Err(Error::Parameter(format!(
                "reward_scale must be > 0, got {}",
                self.reward_scale
            )));
        }
        if self.eval_every > 0 && self.eval_episodes == 0 {
            return Err(Error::Parameter("eval_episodes must be > 0 when eval_every > 0".into()));
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::Parameter("hidden layer widths must be > 0".into()));
        }
        self.noise.iter().try_for_each(|p| p.validate())
    }
}

/// Elementwise `target <- tau * source + (1 - tau) * target`.
pub fn soft_update(target: &mut Mlp, source: &Mlp, tau: f64) -> Result<()> {
    if !target.same_shape(source) {
        return Err(Error::Contract("soft update between differently shaped networks".into()));
    }
    for (t, &s) in target.params_mut().iter_mut().zip(source.params()) {
        *t = tau * s + (1.0 - tau) * *t;
    }
    Ok(())
}

fn concat(s: &[f64], a: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(s.len() + a.len());
    x.extend_from_slice(s);
    x.extend_from_slice(a);
    x
}

/// Mean critic value `J = mean_i Q(s_i, mu(s_i))` and its gradient with
/// respect to the actor parameters.
pub fn actor_objective_and_grad(actor: &Mlp, critic: &Mlp, states: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    if states.is_empty() {
        return Err(Error::Contract("actor objective over an empty batch".into()));
    }
    let n = states.len() as f64;
    let sd = actor.input_dim();
    let mut grads = vec![0.0; actor.num_params()];
    let mut critic_scratch = vec![0.0; critic.num_params()];
    let mut total = 0.0;
    for s in states {
        let a_cache = actor.forward_cached(s)?;
        let q_cache = critic.forward_cached(&concat(s, &a_cache.output))?;
        total += q_cache.output[0];
        let d_in = critic.backward(&q_cache, &[1.0 / n], &mut critic_scratch)?;
        actor.backward(&a_cache, &d_in[sd..], &mut grads)?;
    }
    Ok((total / n, grads))
}

/// Actor, critic, their target copies and optimizers.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub actor: Mlp,
    pub critic: Mlp,
    pub actor_target: Mlp,
    pub critic_target: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
    pub gamma: f64,
    pub tau: f64,
}

impl DdpgAgent {
    pub fn new<R: Rng + ?Sized>(state_dim: usize, bounds: &[f64], cfg: &DdpgConfig, rng: &mut R) -> Result<Self> {
        let actor = Mlp::actor(state_dim, &cfg.hidden, bounds, rng)?;
        let critic = Mlp::critic(state_dim + bounds.len(), &cfg.hidden, rng)?;
        Self::from_networks(actor, critic, cfg)
    }

    /// Agent whose targets start as copies of the given online networks.
    pub fn from_networks(actor: Mlp, critic: Mlp, cfg: &DdpgConfig) -> Result<Self> {
        if critic.input_dim() != actor.input_dim() + actor.output_dim() || critic.output_dim() != 1 {
            return Err(Error::Contract(format!(
                "critic {:?} does not fit actor {:?}",
                critic.sizes(),
                actor.sizes()
            )));
        }
        Ok(Self {
            actor_opt: Adam::new(AdamConfig::with_lr(cfg.actor_lr), actor.num_params()),
            critic_opt: Adam::new(AdamConfig::with_lr(cfg.critic_lr), critic.num_params()),
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor,
            critic,
            gamma: cfg.gamma,
            tau: cfg.tau,
        })
    }

    /// Replace the online actor and its target with pre-trained weights.
    pub fn with_actor(mut self, actor: Mlp) -> Result<Self> {
        if !actor.same_shape(&self.actor) {
            return Err(Error::Contract(format!(
                "initial actor {:?} does not match {:?}",
                actor.sizes(),
                self.actor.sizes()
            )));
        }
        self.actor_target = actor.clone();
        self.actor = actor;
        Ok(self)
    }

    pub fn act(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.actor.forward(s)
    }

    pub fn q(&self, s: &[f64], a: &[f64]) -> Result<f64> {
        Ok(self.critic.forward(&concat(s, a))?[0])
    }

    /// TD targets `r + gamma Q'(s', mu'(s'))`, dropping the bootstrap term
    /// on terminal transitions.
    pub fn td_targets(&self, batch: &Batch) -> Result<Vec<f64>> {
        (0..batch.len())
            .map(|i| {
                if batch.terminals[i] {
                    return Ok(batch.rewards[i]);
                }
                let s2 = &batch.next_states[i];
                let a2 = self.actor_target.forward(s2)?;
                let q2 = self.critic_target.forward(&concat(s2, &a2))?[0];
                Ok(batch.rewards[i] + self.gamma * q2)
            })
            .collect()
    }

    /// One Adam step on the mean squared TD error. Returns the pre-step
    /// loss and mean Q.
    pub fn critic_update(&mut self, batch: &Batch) -> Result<(f64, f64)> {
        if batch.is_empty() {
            return Err(Error::Contract("critic update on an empty batch".into()));
        }
        let y = self.td_targets(batch)?;
        let n = batch.len() as f64;
        let mut grads = vec![0.0; self.critic.num_params()];
        let (mut loss, mut mean_q) = (0.0, 0.0);
        for i in 0..batch.len() {
            let cache = self
                .critic
                .forward_cached(&concat(&batch.states[i], &batch.actions[i]))?;
            let err = cache.output[0] - y[i];
            loss += err * err / n;
            mean_q += cache.output[0] / n;
            self.critic.backward(&cache, &[2.0 * err / n], &mut grads)?;
        }
        if !loss.is_finite() {
            return Err(Error::TrainingFault(format!(
                "critic loss is {loss} (mean Q {mean_q})"
            )));
        }
        self.critic_opt.step(self.critic.params_mut(), &grads)?;
        Ok((loss, mean_q))
    }

    /// One Adam step ascending mean `Q(s, mu(s))`. Returns the pre-step
    /// objective.
    pub fn actor_update(&mut self, states: &[Vec<f64>]) -> Result<f64> {
        let (objective, mut grads) = actor_objective_and_grad(&self.actor, &self.critic, states)?;
        grads.iter_mut().for_each(|g| *g = -*g);
        self.actor_opt.step(self.actor.params_mut(), &grads)?;
        Ok(objective)
    }

    pub fn update_targets(&mut self) -> Result<()> {
        soft_update(&mut self.actor_target, &self.actor, self.tau)?;
        soft_update(&mut self.critic_target, &self.critic, self.tau)
    }

    /// Critic step, actor step and target update on one batch.
    pub fn train_step(&mut self, batch: &Batch) -> Result<(f64, f64, f64)> {
        let (critic_loss, mean_q) = self.critic_update(batch)?;
        let objective = self.actor_update(&batch.states)?;
        self.update_targets()?;
        Ok((critic_loss, -objective, mean_q))
    }

    pub fn save(&self, dir: &Path, prefix: &str) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, net) in [
            ("actor", &self.actor),
            ("critic", &self.critic),
            ("actor_target", &self.actor_target),
            ("critic_target", &self.critic_target),
        ] {
            save_weights(net, &dir.join(format!("{prefix}{name}.wts")))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub steps: usize,
    #[serde(rename = "return")]
    pub ret: f64,
    pub termination: String,
    pub mean_q: f64,
    pub actor_loss: f64,
    pub critic_loss: f64,
}

/// Mean episode return of the noise-free actor after `episode` episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRecord {
    pub episode: usize,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingLog {
    pub records: Vec<EpisodeRecord>,
    pub evals: Vec<EvalRecord>,
}

impl TrainingLog {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("episode,steps,return,termination,mean_q,actor_loss,critic_loss\n");
        for r in &self.records {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.episode, r.steps, r.ret, r.termination, r.mean_q, r.actor_loss, r.critic_loss
            );
        }
        s
    }

    pub fn evals_csv(&self) -> String {
        let mut s = String::from("episode,score\n");
        for e in &self.evals {
            let _ = writeln!(s, "{},{}", e.episode, e.score);
        }
        s
    }

    pub fn checksum(&self) -> u32 {
        crc32fast::hash(self.to_csv().as_bytes())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn write_evals(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.evals_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn returns(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.ret).collect()
    }
}

#[derive(Debug, Clone)]
pub struct DdpgOutcome {
    pub agent: DdpgAgent,
    /// Actor with the best evaluation score (or training return when
    /// evaluation is disabled).
    pub best_actor: Mlp,
    pub log: TrainingLog,
    pub stopped_early: bool,
}

struct Trainer<'a> {
    cfg: &'a DdpgConfig,
    out_dir: Option<PathBuf>,
    agent: DdpgAgent,
    best_actor: Mlp,
    best_return: f64,
    log: TrainingLog,
}

impl Trainer<'_> {
    fn persist(&self) -> Result<()> {
        if let Some(dir) = &self.out_dir {
            self.agent.save(dir, "")?;
            save_weights(&self.best_actor, &dir.join("actor_best.wts"))?;
            self.log.write(&dir.join("training_log.csv"))?;
            if !self.log.evals.is_empty() {
                self.log.write_evals(&dir.join("eval_log.csv"))?;
            }
        }
        Ok(())
    }

    fn run_episode<E: Environment>(
        &mut self,
        env: &mut E,
        episode: usize,
        seed: u64,
        buffer: &mut ReplayBuffer,
        noise: &mut OuNoise,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        let bounds = env.action_bounds();
        let mut s = env.reset(derive_seed(seed, episode as u64))?;
        noise.reset();
        let (mut ret, mut steps, mut label) = (0.0, 0, String::from("Running"));
        let (mut q_sum, mut a_sum, mut c_sum, mut updates) = (0.0, 0.0, 0.0, 0usize);
        while steps < self.cfg.max_steps {
            let mu = self.agent.act(&s)?;
            let eps = noise.sample(rng);
            let a: Vec<f64> = mu
                .iter()
                .zip(eps)
                .zip(&bounds)
                .map(|((m, e), b)| (m + e).clamp(-b, *b))
                .collect();
            let out = env.step(&a)?;
            steps += 1;
            ret += out.reward;
            label = out.label.clone();
            let done = out.done();
            buffer.push(&Transition {
                s: std::mem::take(&mut s),
                a,
                r: out.reward * self.cfg.reward_scale,
                s_next: out.state.clone(),
                terminal: out.terminal,
            })?;
            s = out.state;
            if done {
                break;
            }
            if buffer.ready() {
                let batch = buffer.sample(self.cfg.batch_size, rng)?;
                let (c, a, q) = self.agent.train_step(&batch)?;
                c_sum += c;
                a_sum += a;
                q_sum += q;
                updates += 1;
            }
        }
        let mean = |x: f64| if updates > 0 { x / updates as f64 } else { f64::NAN };
        if self.cfg.eval_every == 0 && ret > self.best_return {
            self.best_return = ret;
            self.best_actor = self.agent.actor.clone();
        }
        self.log.records.push(EpisodeRecord {
            episode,
            steps,
            ret,
            termination: label,
            mean_q: mean(q_sum),
            actor_loss: mean(a_sum),
            critic_loss: mean(c_sum),
        });
        Ok(())
    }

    /// Mean episode return of the current actor without exploration noise.
    fn evaluate<E: Environment>(&mut self, env: &mut E, episode: usize, seed: u64) -> Result<()> {
        let mut total = 0.0;
        for k in 0..self.cfg.eval_episodes {
            let mut s = env.reset(derive_seed(seed, k as u64))?;
            for _ in 0..self.cfg.max_steps {
                let out = env.step(&self.agent.act(&s)?)?;
                total += out.reward;
                if out.done() {
                    break;
                }
                s = out.state;
            }
        }
        let score = total / self.cfg.eval_episodes as f64;
        log::info!("evaluation after {episode} episodes: {score:.2}");
        self.log.evals.push(EvalRecord { episode, score });
        if score > self.best_return {
            self.best_return = score;
            self.best_actor = self.agent.actor.clone();
        }
        Ok(())
    }
}

/// Off-policy actor-critic training with per-step updates after warmup.
///
/// When `out_dir` is given, checkpoints and the training log are written
/// periodically, at the end, and before returning an error.
pub fn ddpg_train<E: Environment>(
    env: &mut E,
    agent: DdpgAgent,
    cfg: &DdpgConfig,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<DdpgOutcome> {
    cfg.validate()?;
    let action_dim = env.action_dim();
    if agent.actor.input_dim() != env.state_dim() || agent.actor.output_dim() != action_dim {
        return Err(Error::Contract(format!(
            "agent {:?} does not fit environment ({} states, {} actions)",
            agent.actor.sizes(),
            env.state_dim(),
            action_dim
        )));
    }
    if cfg.noise.len() != action_dim {
        return Err(Error::Parameter(format!(
            "{} noise channels for {action_dim} actions",
            cfg.noise.len()
        )));
    }
    let mut buffer = ReplayBuffer::new(env.state_dim(), action_dim, cfg.buffer_capacity, cfg.warmup)?;
    let mut noise = OuNoise::new(cfg.noise.clone());
    let mut rng = rng_from_seed(derive_seed(seed, u64::MAX));
    let mut tr = Trainer {
        cfg,
        out_dir: out_dir.map(Path::to_path_buf),
        best_actor: agent.actor.clone(),
        best_return: f64::NEG_INFINITY,
        agent,
        log: TrainingLog::default(),
    };
    let eval_seed = derive_seed(seed, u64::MAX - 1);
    let mut streak = 0;
    let mut stopped_early = false;
    for episode in 0..cfg.episodes {
        let mut step = || -> Result<()> {
            if cfg.eval_every > 0 && episode % cfg.eval_every == 0 {
                tr.evaluate(env, episode, eval_seed)?;
            }
            tr.run_episode(env, episode, seed, &mut buffer, &mut noise, &mut rng)
        };
        if let Err(e) = step() {
            log::error!("training aborted in episode {episode}: {e}");
            tr.persist()?;
            return Err(e);
        }
        let rec = tr.log.records.last().unwrap();
        log::info!(
            "episode {} steps {} return {:.2} {}",
            rec.episode,
            rec.steps,
            rec.ret,
            rec.termination
        );
        streak = if rec.termination == "GoalReached" { streak + 1 } else { 0 };
        if cfg.checkpoint_every > 0 && (episode + 1) % cfg.checkpoint_every == 0 {
            tr.persist()?;
        }
        if cfg.early_stop > 0 && streak >= cfg.early_stop {
            stopped_early = true;
            break;
        }
    }
    if cfg.eval_every > 0 && cfg.episodes > 0 {
        if let Err(e) = tr.evaluate(env, cfg.episodes, eval_seed) {
            tr.persist()?;
            return Err(e);
        }
    }
    tr.persist()?;
    Ok(DdpgOutcome {
        agent: tr.agent,
        best_actor: tr.best_actor,
        log: tr.log,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::ToyDistanceEnv;
    use rand::SeedableRng;

    fn agent(seed: u64) -> DdpgAgent {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DdpgAgent::new(6, &[0.2, 0.5], &DdpgConfig::default(), &mut rng).unwrap()
    }

    #[test]
    fn soft_update_cases() {
        let a = agent(1);
        let (src, orig) = (a.actor.clone(), a.actor_target.clone());
        let mut t = orig.clone();
        let mut s = src.clone();
        s.params_mut().iter_mut().for_each(|p| *p += 1.0);
        soft_update(&mut t, &s, 0.0).unwrap();
        assert_eq!(t, orig);
        soft_update(&mut t, &s, 1.0).unwrap();
        assert_eq!(t, s);
        let mut one = Mlp::new(vec![1, 1], vec![crate::neural::Activation::Identity]).unwrap();
        let mut zero = one.clone();
        one.params_mut()[0] = 1.0;
        soft_update(&mut zero, &one, 0.001).unwrap();
        assert_eq!(zero.params()[0], 0.001);
        assert!(soft_update(&mut zero, &a.actor, 0.5).is_err());
    }

    fn batch(terminal: bool, r: f64) -> Batch {
        let mut b = Batch::default();
        b.push(Transition {
            s: vec![0.1; 6],
            a: vec![0.0, 0.0],
            r,
            s_next: vec![0.2; 6],
            terminal,
        });
        b
    }

    #[test]
    fn td_target_values() {
        let mut a = agent(2);
        // critic target outputs a constant 2 through its final bias
        let (start, end) = a.critic_target.layer_range(2);
        a.critic_target.params_mut()[start..end].iter_mut().for_each(|p| *p = 0.0);
        *a.critic_target.params_mut().last_mut().unwrap() = 2.0;
        let y = a.td_targets(&batch(false, 1.0)).unwrap();
        assert!((y[0] - 2.98).abs() < 1e-12);
        let y = a.td_targets(&batch(true, -500.0)).unwrap();
        assert_eq!(y[0], -500.0);
    }

    #[test]
    fn critic_fixed_point() {
        let mut a = agent(3);
        let b = batch(true, 0.0);
        let q = a.q(&b.states[0], &b.actions[0]).unwrap();
        let b = batch(true, q);
        let before = a.critic.clone();
        let (loss, _) = a.critic_update(&b).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(a.critic, before);
    }

    #[test]
    fn zero_episodes_returns_initial() {
        let mut env = ToyDistanceEnv::default();
        let cfg = DdpgConfig {
            episodes: 0,
            noise: vec![OuParams::new(0.0, 0.15, 0.05)],
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = DdpgAgent::new(1, &[0.2], &cfg, &mut rng).unwrap();
        let init = a.actor.clone();
        let out = ddpg_train(&mut env, a, &cfg, 1, None).unwrap();
        assert_eq!(out.agent.actor, init);
        assert!(out.log.records.is_empty());
    }

    #[test]
    fn training_is_reproducible() {
        let cfg = DdpgConfig {
            episodes: 30,
            warmup: 100,
            noise: vec![OuParams::new(0.0, 0.15, 0.05)],
            ..Default::default()
        };
        let run = || {
            let mut env = ToyDistanceEnv::default();
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let a = DdpgAgent::new(1, &[0.2], &cfg, &mut rng).unwrap();
            ddpg_train(&mut env, a, &cfg, 11, None).unwrap().log
        };
        let (l1, l2) = (run(), run());
        assert_eq!(l1.checksum(), l2.checksum());
        assert_eq!(l1.records.len(), 30);
        assert!(l1.records[0].mean_q.is_nan());
        assert!(l1.records[29].mean_q.is_finite());
    }

    #[test]
    fn config_validation() {
        let cfg = DdpgConfig {
            tau: 1.5,
            ..Default::default()
        };
        assert_eq!(
            cfg.validate().unwrap_err().to_string().contains("tau must be in (0,1]"),
            true
        );
    }
}
