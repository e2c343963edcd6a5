//! Monte-Carlo and pathwise estimators.
//!
//! Every trial `i` draws from its own ChaCha8 stream selected by
//! `(base_seed, i)`, and per-trial statistics are folded in trial order, so a
//! run is bitwise reproducible whatever the number of worker threads.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, BaseGraph, BaseVertex};
use crate::kernels::{stable_sum, BaseKernel, Kernel, LamplighterKernel, StepDelta};
use crate::lamplighter::{LampConfiguration, LamplighterState};

/// Cut times closer than this to the end of a finite window are not reported.
pub const CUT_TAIL_CENSOR: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimConfig {
    pub base_seed: u64,
    pub horizon: usize,
    pub trials: usize,
    #[serde(default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

impl SimConfig {
    pub fn new(base_seed: u64, horizon: usize, trials: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Parameter("horizon must be >= 1".into()));
        }
        if trials == 0 {
            return Err(Error::Parameter("trials must be >= 1".into()));
        }
        Ok(Self {
            base_seed,
            horizon,
            trials,
            threads: 1,
        })
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    /// The randomness stream owned by trial `trial`.
    pub fn stream(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(trial);
        rng
    }

    /// Evaluates `f` once per trial and returns the values in trial order.
    pub fn run<F>(&self, f: F) -> Vec<f64>
    where
        F: Fn(u64, &mut ChaCha8Rng) -> f64 + Sync + Send,
    {
        let job = |i: u64| {
            let mut rng = self.stream(i);
            f(i, &mut rng)
        };
        if self.threads <= 1 {
            return (0..self.trials as u64).map(job).collect();
        }
        match rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
        {
            Ok(pool) => pool.install(|| (0..self.trials as u64).into_par_iter().map(job).collect()),
            Err(_) => (0..self.trials as u64).map(job).collect(),
        }
    }

    pub fn estimate<F>(&self, f: F) -> Estimate
    where
        F: Fn(u64, &mut ChaCha8Rng) -> f64 + Sync + Send,
    {
        Estimate::from_trials(self.base_seed, self.run(f))
    }
}

/// Sample mean with its standard error, plus the raw per-trial values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip)]
    pub per_trial: Vec<f64>,
}

impl Estimate {
    pub fn from_trials(seed: u64, per_trial: Vec<f64>) -> Self {
        let n = per_trial.len();
        let mean = stable_sum(per_trial.iter().copied()) / n as f64;
        let stderr = if n > 1 {
            let ss = stable_sum(per_trial.iter().map(|x| (x - mean) * (x - mean)));
            (ss / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            estimate: mean,
            stderr,
            trials: n,
            seed,
            per_trial,
        }
    }

    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

/// Sample path `X_0, ..., X_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
}

impl<S> Trajectory<S> {
    pub fn steps(&self) -> usize {
        self.states.len() - 1
    }
}

pub fn run_trajectory<K: Kernel>(
    k: &K,
    start: &K::State,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Trajectory<K::State>> {
    k.transitions(start)?;
    let mut states = Vec::with_capacity(n + 1);
    states.push(start.clone());
    for _ in 0..n {
        let next = k.sample(states.last().unwrap(), rng);
        states.push(next);
    }
    Ok(Trajectory { states })
}

/// Lamplighter path stored as its start state plus per-step changes, so long
/// horizons do not copy the configuration at every step.
#[derive(Clone, Debug, PartialEq)]
pub struct LamplighterTrajectory {
    pub start: LamplighterState,
    pub steps: Vec<StepDelta>,
}

impl LamplighterTrajectory {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn position(&self, t: usize) -> &BaseVertex {
        if t == 0 {
            &self.start.position
        } else {
            &self.steps[t - 1].position
        }
    }

    pub fn state_at(&self, t: usize) -> LamplighterState {
        let mut s = self.start.clone();
        for d in &self.steps[..t] {
            for v in &d.flips {
                s.lamps.flip(v);
            }
            s.position = d.position.clone();
        }
        s
    }
}

pub fn run_lamplighter_trajectory(
    k: &LamplighterKernel,
    start: &LamplighterState,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<LamplighterTrajectory> {
    k.transitions(start)?;
    let mut s = start.clone();
    let steps = (0..n).map(|_| k.step(&mut s, rng)).collect();
    Ok(LamplighterTrajectory {
        start: start.clone(),
        steps,
    })
}

/// Mean of `metric(start, X_n) / n` over trials.
pub fn rate_of_escape<K, M>(k: &K, start: &K::State, metric: M, cfg: &SimConfig) -> Result<Estimate>
where
    K: Kernel,
    M: Fn(&K::State, &K::State) -> f64 + Sync + Send,
{
    k.transitions(start)?;
    let n = cfg.horizon;
    Ok(cfg.estimate(|_, rng| {
        let mut x = start.clone();
        for _ in 0..n {
            x = k.sample(&x, rng);
        }
        metric(start, &x) / n as f64
    }))
}

/// [`rate_of_escape`] for a base kernel with the graph metric, started at the
/// origin.
pub fn rate_of_escape_base(k: &BaseKernel, cfg: &SimConfig) -> Result<Estimate> {
    let g = k.graph();
    rate_of_escape(
        k,
        &g.origin(),
        |a, b| g.distance_unchecked(a, b) as f64,
        cfg,
    )
}

/// Mean of `|supp(η_n)| / n` over trials, started from the all-off state at
/// the origin.
pub fn support_growth(k: &LamplighterKernel, cfg: &SimConfig) -> Result<Estimate> {
    let start = LamplighterState::at(k.graph().origin());
    k.transitions(&start)?;
    let n = cfg.horizon;
    Ok(cfg.estimate(|_, rng| {
        let mut s = start.clone();
        for _ in 0..n {
            k.step(&mut s, rng);
        }
        s.lamps.len() as f64 / n as f64
    }))
}

/// `R_j = |{X_1, ..., X_j}|` for `j = 1..=n` (the starting point only counts
/// once it is revisited).
pub fn range<S: Hash + Eq>(traj: &Trajectory<S>) -> Vec<usize> {
    let mut seen: HashSet<&S> = HashSet::new();
    traj.states[1..]
        .iter()
        .map(|x| {
            seen.insert(x);
            seen.len()
        })
        .collect()
}

fn walk_range(
    k: &BaseKernel,
    start: &BaseVertex,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> (usize, BaseVertex) {
    let mut seen: HashSet<BaseVertex> = HashSet::with_capacity(n.min(1 << 16));
    let mut x = start.clone();
    for _ in 0..n {
        x = k.sample(&x, rng);
        if !seen.contains(&x) {
            seen.insert(x.clone());
        }
    }
    (seen.len(), x)
}

/// Monte-Carlo mean of `R_n` at the given horizon.
pub fn mean_range(k: &BaseKernel, cfg: &SimConfig) -> Estimate {
    let start = k.graph().origin();
    cfg.estimate(|_, rng| walk_range(k, &start, cfg.horizon, rng).0 as f64)
}

/// Return probability of switch-walk-switch with uniform lamps, computed from
/// the base walk alone as the mean of `2^{-R_n} 1{X_n = x_0}`.
pub fn sws_return_probability(base: &BaseKernel, n: usize, cfg: &SimConfig) -> Result<Estimate> {
    let start = base.graph().origin();
    base.transitions(&start)?;
    Ok(cfg.estimate(|_, rng| {
        let (r, x) = walk_range(base, &start, n, rng);
        if x == start {
            0.5f64.powi(r as i32)
        } else {
            0.0
        }
    }))
}

/// Fraction of trials with `X_n = X_0`.
pub fn return_frequency<K: Kernel>(
    k: &K,
    start: &K::State,
    n: usize,
    cfg: &SimConfig,
) -> Result<Estimate> {
    k.transitions(start)?;
    Ok(cfg.estimate(|_, rng| {
        let mut x = start.clone();
        for _ in 0..n {
            x = k.sample(&x, rng);
        }
        f64::from(u8::from(x == *start))
    }))
}

/// Monte-Carlo mean of `exp(-t R_n)`.
pub fn laplace_range(base: &BaseKernel, t: f64, n: usize, cfg: &SimConfig) -> Result<Estimate> {
    if !(t >= 0.0) {
        return Err(Error::Parameter(format!(
            "Laplace parameter must be >= 0, got {t}"
        )));
    }
    let start = base.graph().origin();
    base.transitions(&start)?;
    Ok(cfg.estimate(|_, rng| {
        let (r, _) = walk_range(base, &start, n, rng);
        (-t * r as f64).exp()
    }))
}

/// Expected one-step height increment at the origin of an oriented-tree
/// kernel.
pub fn modular_drift(k: &BaseKernel) -> Result<f64> {
    let g = k.graph();
    if !matches!(g, BaseGraph::Oriented { .. }) {
        return Err(Error::FamilyMismatch(format!(
            "modular drift needs an oriented-tree kernel, got {}",
            g.family_name()
        )));
    }
    let o = g.origin();
    let mut by_increment: HashMap<i64, Vec<f64>> = HashMap::new();
    for (x, p) in k.transitions(&o)? {
        by_increment
            .entry(graph::oriented_height(&x))
            .or_default()
            .push(p);
    }
    let mut increments: Vec<i64> = by_increment.keys().copied().collect();
    increments.sort_unstable();
    let masses: Vec<f64> = increments
        .iter()
        .map(|h| *h as f64 * stable_sum(by_increment[h].iter().copied()))
        .collect();
    Ok(stable_sum(masses))
}

/// Spine chain `Y_m = X_{τ_m}` read off an oriented-tree trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InducedChain {
    pub values: Vec<u64>,
    /// `τ_m` for each recorded `Y_m`.
    pub times: Vec<usize>,
    /// The walk never left its starting subtree within the horizon.
    pub truncated: bool,
}

impl InducedChain {
    /// `(up-steps, steps)` counted from states `>= 1`.
    pub fn up_steps(&self) -> (usize, usize) {
        let mut up = 0;
        let mut total = 0;
        for w in self.values.windows(2) {
            if w[0] >= 1 {
                total += 1;
                if w[1] > w[0] {
                    up += 1;
                }
            }
        }
        (up, total)
    }
}

pub fn induced_chain(traj: &Trajectory<BaseVertex>) -> Result<InducedChain> {
    let spine = |v: &BaseVertex| match v {
        BaseVertex::Oriented { spine, .. } => Ok(*spine),
        other => Err(Error::FamilyMismatch(format!(
            "induced chain needs oriented-tree positions, got {other:?}"
        ))),
    };
    let mut values = vec![spine(&traj.states[0])?];
    let mut times = vec![0];
    for (t, x) in traj.states.iter().enumerate().skip(1) {
        let k = spine(x)?;
        if k != *values.last().unwrap() {
            values.push(k);
            times.push(t);
        }
    }
    let truncated = values.len() == 1;
    Ok(InducedChain {
        values,
        times,
        truncated,
    })
}

/// Cut times of a finite path, censored near the end of the window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutPoints<T> {
    pub times: Vec<usize>,
    pub points: Vec<T>,
    /// Number of indices eligible to be reported.
    pub window: usize,
    /// Distinct states visited at eligible indices.
    pub sites: usize,
    /// Cut times per eligible index.
    pub time_density: f64,
    /// Cut points per visited state.
    pub point_density: f64,
    pub censored_tail: usize,
}

/// `n` is a cut time iff the sets `{path_0..path_n}` and `{path_{n+1}..}` are
/// disjoint on the finite window; the last [`CUT_TAIL_CENSOR`] indices are
/// never reported.
pub fn cut_points<T: Hash + Eq + Clone>(path: &[T]) -> CutPoints<T> {
    cut_points_censored(path, CUT_TAIL_CENSOR)
}

pub fn cut_points_censored<T: Hash + Eq + Clone>(path: &[T], censor: usize) -> CutPoints<T> {
    let len = path.len();
    let window = len.saturating_sub(censor.max(1));
    // a value with first index f and last index l blocks every n in [f, l)
    let mut span: HashMap<&T, (usize, usize)> = HashMap::new();
    for (i, v) in path.iter().enumerate() {
        span.entry(v).and_modify(|s| s.1 = i).or_insert((i, i));
    }
    let mut delta = vec![0i64; len + 1];
    for &(f, l) in span.values() {
        delta[f] += 1;
        delta[l] -= 1;
    }
    let mut times = Vec::new();
    let mut open = 0i64;
    for (n, d) in delta.iter().take(window).enumerate() {
        open += d;
        if open == 0 {
            times.push(n);
        }
    }
    let points: Vec<T> = times.iter().map(|&n| path[n].clone()).collect();
    let sites = path[..window].iter().collect::<HashSet<_>>().len();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    CutPoints {
        time_density: ratio(times.len(), window),
        point_density: ratio(times.len(), sites),
        times,
        points,
        window,
        sites,
        censored_tail: len - window,
    }
}

/// Lamp configuration inside a ball around the start and whether it has
/// settled within the horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitConfiguration {
    pub ball: Vec<BaseVertex>,
    /// Step index of the last flip of each ball vertex.
    pub last_flip: Vec<Option<usize>>,
    pub config: LampConfiguration,
    /// Last step that changed a lamp in the ball (0 if none).
    pub stabilization_time: usize,
    /// Last time the walker was inside the ball.
    pub last_visit: usize,
    /// The walker was still visiting the ball during the second half of the
    /// horizon, so no stabilisation is claimed.
    pub censored: bool,
}

pub fn limit_configuration(
    g: BaseGraph,
    traj: &LamplighterTrajectory,
    radius: u64,
) -> Result<LimitConfiguration> {
    let center = traj.start.position.clone();
    let ball = g.ball(&center, radius)?;
    let index: HashMap<&BaseVertex, usize> = ball.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut last_flip = vec![None; ball.len()];
    let mut last_visit = 0;
    let mut lamps: Vec<bool> = ball.iter().map(|v| traj.start.lamps.is_on(v)).collect();
    for (i, step) in traj.steps.iter().enumerate() {
        let t = i + 1;
        for v in &step.flips {
            if let Some(&j) = index.get(v) {
                last_flip[j] = Some(t);
                lamps[j] = !lamps[j];
            }
        }
        if g.distance_unchecked(&center, &step.position) <= radius {
            last_visit = t;
        }
    }
    let horizon = traj.len();
    let config: LampConfiguration = ball
        .iter()
        .zip(&lamps)
        .filter(|(_, &on)| on)
        .map(|(v, _)| v.clone())
        .collect();
    let stabilization_time = last_flip.iter().flatten().copied().max().unwrap_or(0);
    Ok(LimitConfiguration {
        ball,
        last_flip,
        config,
        stabilization_time,
        last_visit,
        censored: 2 * last_visit > horizon,
    })
}

/// Fraction of trials whose ball configuration is reported as stabilised.
pub fn stabilization_frequency(
    k: &LamplighterKernel,
    radius: u64,
    cfg: &SimConfig,
) -> Result<Estimate> {
    let g = k.graph();
    let start = LamplighterState::at(g.origin());
    k.transitions(&start)?;
    let results: Vec<Result<f64>> = {
        let n = cfg.horizon;
        let run = |rng: &mut ChaCha8Rng| -> Result<f64> {
            let traj = run_lamplighter_trajectory(k, &start, n, rng)?;
            Ok(f64::from(u8::from(
                !limit_configuration(g, &traj, radius)?.censored,
            )))
        };
        (0..cfg.trials as u64)
            .map(|i| run(&mut cfg.stream(i)))
            .collect()
    };
    let values = results.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_trials(cfg.base_seed, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{
        biased_z, oriented_tree_kernel, oriented_tree_kernel_with_father, srw, switch_walk,
        LampKernel,
    };

    fn z(i: i64) -> BaseVertex {
        BaseVertex::lattice([i])
    }

    fn zk() -> BaseKernel {
        srw(BaseGraph::lattice(1).unwrap())
    }

    #[test]
    fn config_validation() {
        assert!(SimConfig::new(1, 0, 1).is_err());
        assert!(SimConfig::new(1, 1, 0).is_err());
    }

    #[test]
    fn trajectory_basics() {
        let k = biased_z(0.7).unwrap();
        let cfg = SimConfig::new(3, 10, 1).unwrap();
        let t0 = run_trajectory(&k, &z(0), 0, &mut cfg.stream(0)).unwrap();
        assert_eq!(t0.states, vec![z(0)]);
        let a = run_trajectory(&k, &z(0), 50, &mut cfg.stream(5)).unwrap();
        let b = run_trajectory(&k, &z(0), 50, &mut cfg.stream(5)).unwrap();
        assert_eq!(a, b);
        let g = k.graph();
        for w in a.states.windows(2) {
            assert_eq!(g.distance(&w[0], &w[1]).unwrap(), 1);
        }
    }

    #[test]
    fn threads_do_not_change_results() {
        let k = zk();
        let serial = SimConfig::new(11, 200, 64).unwrap();
        let parallel = serial.with_threads(4);
        let a = rate_of_escape_base(&k, &serial).unwrap();
        let b = rate_of_escape_base(&k, &parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.per_trial, b.per_trial);
    }

    #[test]
    fn range_examples() {
        let right = Trajectory {
            states: (0..=10).map(z).collect(),
        };
        assert_eq!(range(&right), (1..=10).collect::<Vec<_>>());
        let back_and_forth = Trajectory {
            states: vec![z(0), z(1), z(0), z(1)],
        };
        assert_eq!(range(&back_and_forth), vec![1, 2, 2]);
    }

    #[test]
    fn sws_return_at_zero_steps_is_one() {
        let cfg = SimConfig::new(1, 1, 10).unwrap();
        let e = sws_return_probability(&zk(), 0, &cfg).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn laplace_range_monotone_in_t() {
        let cfg = SimConfig::new(9, 1, 500).unwrap();
        let a = laplace_range(&zk(), 0.0, 64, &cfg).unwrap();
        assert_eq!(a.estimate, 1.0);
        let half = laplace_range(&zk(), 0.5, 64, &cfg).unwrap();
        let one = laplace_range(&zk(), 1.0, 64, &cfg).unwrap();
        assert!(one.estimate <= half.estimate);
        for (x, y) in one.per_trial.iter().zip(&half.per_trial) {
            assert!(x <= y);
        }
    }

    #[test]
    fn modular_drift_values() {
        for q in 2..=6 {
            assert_eq!(
                modular_drift(&oriented_tree_kernel(q).unwrap()).unwrap(),
                0.0,
                "q = {q}"
            );
        }
        let down = oriented_tree_kernel_with_father(3, 2.0 / 3.0).unwrap();
        assert!((modular_drift(&down).unwrap() + 1.0 / 3.0).abs() < 1e-15);
        let up = oriented_tree_kernel_with_father(3, 1.0 / 3.0).unwrap();
        assert!((modular_drift(&up).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(
            modular_drift(&zk()),
            Err(Error::FamilyMismatch(_))
        ));
    }

    #[test]
    fn induced_chain_structure() {
        let k = oriented_tree_kernel(2).unwrap();
        let cfg = SimConfig::new(2, 1, 1).unwrap();
        let traj = run_trajectory(&k, &k.graph().origin(), 20_000, &mut cfg.stream(0)).unwrap();
        let y = induced_chain(&traj).unwrap();
        assert!(!y.truncated);
        assert_eq!(y.values[0], 0);
        assert_eq!(y.values[1], 1);
        for w in y.values.windows(2) {
            assert_eq!(w[0].abs_diff(w[1]), 1);
        }
        let stuck = Trajectory {
            states: vec![k.graph().origin()],
        };
        assert!(induced_chain(&stuck).unwrap().truncated);
    }

    fn brute_force_cut_times(path: &[i64], censor: usize) -> Vec<usize> {
        let window = path.len().saturating_sub(censor.max(1));
        (0..window)
            .filter(|&n| {
                let past: HashSet<i64> = path[..=n].iter().copied().collect();
                path[n + 1..].iter().all(|v| !past.contains(v))
            })
            .collect()
    }

    #[test]
    fn cut_points_small_paths() {
        let inc: Vec<i64> = (0..10).collect();
        assert_eq!(
            cut_points_censored(&inc, 1).times,
            (0..9).collect::<Vec<_>>()
        );
        let p = [0, 1, 0, 1, 2];
        let c = cut_points_censored(&p, 1);
        assert_eq!(c.times, brute_force_cut_times(&p, 1));
        assert_eq!(c.times, vec![3]);
        assert_eq!(c.points, vec![1]);
        assert!(cut_points(&inc).times.is_empty());
    }

    #[test]
    fn limit_configuration_zero_horizon() {
        let k = switch_walk(LampKernel::flip(), BaseKernel::Shift);
        let g = k.graph();
        let start = LamplighterState::new(LampConfiguration::single(z(1)), z(0));
        let traj = run_lamplighter_trajectory(
            &k,
            &start,
            0,
            &mut SimConfig::new(0, 1, 1).unwrap().stream(0),
        )
        .unwrap();
        let lim = limit_configuration(g, &traj, 2).unwrap();
        assert_eq!(lim.config, start.lamps);
        assert_eq!(lim.stabilization_time, 0);
        assert!(!lim.censored);
    }

    #[test]
    fn limit_configuration_deterministic_walk() {
        let k = switch_walk(LampKernel::flip(), BaseKernel::Shift);
        let g = k.graph();
        let traj = run_lamplighter_trajectory(
            &k,
            &LamplighterState::at(z(0)),
            20,
            &mut SimConfig::new(0, 1, 1).unwrap().stream(0),
        )
        .unwrap();
        let lim = limit_configuration(g, &traj, 2).unwrap();
        let expect: LampConfiguration = [z(0), z(1), z(2)].into_iter().collect();
        assert_eq!(lim.config, expect);
        assert_eq!(lim.stabilization_time, 3);
        assert_eq!(lim.last_visit, 2);
        assert!(!lim.censored);
        assert_eq!(traj.state_at(20).lamps.len(), 20);
    }

    #[test]
    fn flip_then_step_has_unit_support_growth() {
        let k = switch_walk(LampKernel::flip(), BaseKernel::Shift);
        let cfg = SimConfig::new(0, 500, 3).unwrap();
        let e = support_growth(&k, &cfg).unwrap();
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn reflected_walk_cut_points_recheck() {
        let y = crate::kernels::induced_spine_chain(2).unwrap();
        let cfg = SimConfig::new(4, 1, 1).unwrap();
        let traj = run_trajectory(&y, &0, 2_000, &mut cfg.stream(0)).unwrap();
        let path: Vec<i64> = traj.states.iter().map(|&v| v as i64).collect();
        let c = cut_points(&path);
        assert_eq!(c.times, brute_force_cut_times(&path, CUT_TAIL_CENSOR));
    }
}
