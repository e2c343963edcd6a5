//! Command-line front end. Every invocation is first resolved into an
//! [`ExperimentManifest`], which is echoed in the JSON summary and can be
//! replayed with `lampwalk run --manifest FILE`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, BaseVertex};
use crate::kernels::{
    biased_z, induced_spine_chain, oriented_tree_kernel_with_father, srw, switch_walk,
    switch_walk_switch, walk_or_switch, BaseKernel, LampKernel, LamplighterKernel,
};
use crate::lamplighter::{LamplighterGraph, LamplighterState};
use crate::lang::{
    count_sequence, entropy, entropy_spectral_identity_check, growth_sensitivity_report, restrict,
    restricted_rho, substochastic_bound_check, uniform_weighting, FactorSet, LabeledDigraph,
};
use crate::schreier::{build_schreier, GroupSpec, Presentation};
use crate::simulate::{
    self, cut_points, limit_configuration, run_lamplighter_trajectory, run_trajectory, Estimate,
    SimConfig,
};
use crate::spectral::{green_series, spectral_radius_base, spectral_radius_dp};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SimStat {
    RateOfEscape,
    SupportGrowth,
    Range,
    SwsReturn,
    LaplaceRange,
    Cutpoints,
    LimitConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralOp {
    Rho,
    Green,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyOp {
    Report,
    IdentityCheck,
    SubstochCheck,
    Count,
    Rho,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchreierOp {
    Build,
}

/// Lamp kernel by name (`uniform`, `flip`) or as a 2x2 matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LampSpec {
    Named(String),
    Matrix(LampKernel),
}

impl LampSpec {
    fn resolve(&self) -> Result<LampKernel> {
        match self {
            LampSpec::Named(n) if n == "uniform" => Ok(LampKernel::uniform()),
            LampSpec::Named(n) if n == "flip" => Ok(LampKernel::flip()),
            LampSpec::Named(n) => Err(Error::Parse(format!("unknown lamp kernel {n:?}"))),
            LampSpec::Matrix(m) => Ok(*m),
        }
    }
}

fn half() -> f64 {
    0.5
}

fn uniform_lamp() -> LampSpec {
    LampSpec::Named("uniform".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    Srw {
        graph: BaseGraph,
    },
    Biased {
        p: f64,
    },
    Oriented {
        q: usize,
        #[serde(default = "half")]
        father: f64,
    },
    Wos {
        a: f64,
        #[serde(default = "uniform_lamp")]
        lamp: LampSpec,
        base: Box<KernelSpec>,
    },
    Sws {
        #[serde(default = "uniform_lamp")]
        lamp: LampSpec,
        base: Box<KernelSpec>,
    },
    Sw {
        #[serde(default = "uniform_lamp")]
        lamp: LampSpec,
        base: Box<KernelSpec>,
    },
}

pub enum ResolvedKernel {
    Base(BaseKernel),
    Lamplighter(LamplighterKernel),
}

fn parse_graph(s: &str) -> Result<BaseGraph> {
    let (family, param) = s.split_once(':').unwrap_or((s, ""));
    let num = |what: &str| -> Result<usize> {
        param
            .parse()
            .map_err(|_| Error::Parse(format!("{what} needs an integer parameter, got {s:?}")))
    };
    match family {
        "z" if param.is_empty() => BaseGraph::lattice(1),
        "z" => BaseGraph::lattice(num("z")?),
        "homtree" => BaseGraph::homtree(num("homtree")?),
        "oriented" => BaseGraph::oriented(num("oriented")?),
        "cycle" => BaseGraph::cycle(num("cycle")?),
        other => Err(Error::Parse(format!("unknown graph family {other:?}"))),
    }
}

impl KernelSpec {
    /// JSON (`{"kind": ...}`) or shorthand: `biased:0.7`, `srw:z`,
    /// `srw:z:2`, `srw:homtree:3`, `srw:cycle:5`, `oriented:2`,
    /// `oriented:3:0.6`, `sws:<base>`, `sw:<base>`, `wos:0.5:<base>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let float = |t: &str| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in {s:?}")))
        };
        Ok(match head {
            "srw" => KernelSpec::Srw {
                graph: parse_graph(rest)?,
            },
            "biased" => KernelSpec::Biased { p: float(rest)? },
            "oriented" => {
                let (q, father) = match rest.split_once(':') {
                    Some((q, f)) => (q, float(f)?),
                    None => (rest, 0.5),
                };
                KernelSpec::Oriented {
                    q: q.parse()
                        .map_err(|_| Error::Parse(format!("bad q in {s:?}")))?,
                    father,
                }
            }
            "sws" => KernelSpec::Sws {
                lamp: uniform_lamp(),
                base: Box::new(KernelSpec::parse(rest)?),
            },
            "sw" => KernelSpec::Sw {
                lamp: uniform_lamp(),
                base: Box::new(KernelSpec::parse(rest)?),
            },
            "wos" => {
                let (a, base) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("wos needs a:base, got {s:?}")))?;
                KernelSpec::Wos {
                    a: float(a)?,
                    lamp: uniform_lamp(),
                    base: Box::new(KernelSpec::parse(base)?),
                }
            }
            other => return Err(Error::Parse(format!("unknown kernel {other:?}"))),
        })
    }

    pub fn resolve(&self) -> Result<ResolvedKernel> {
        let base = |b: &KernelSpec| match b.resolve()? {
            ResolvedKernel::Base(k) => Ok(k),
            ResolvedKernel::Lamplighter(_) => Err(Error::Parameter(
                "lamplighter kernels need a base kernel".into(),
            )),
        };
        Ok(match self {
            KernelSpec::Srw { graph } => ResolvedKernel::Base(srw(*graph)),
            KernelSpec::Biased { p } => ResolvedKernel::Base(biased_z(*p)?),
            KernelSpec::Oriented { q, father } => {
                ResolvedKernel::Base(oriented_tree_kernel_with_father(*q, *father)?)
            }
            KernelSpec::Wos { a, lamp, base: b } => {
                ResolvedKernel::Lamplighter(walk_or_switch(*a, base(b)?, lamp.resolve()?)?)
            }
            KernelSpec::Sws { lamp, base: b } => {
                ResolvedKernel::Lamplighter(switch_walk_switch(lamp.resolve()?, base(b)?))
            }
            KernelSpec::Sw { lamp, base: b } => {
                ResolvedKernel::Lamplighter(switch_walk(lamp.resolve()?, base(b)?))
            }
        })
    }

    fn base_kernel(&self) -> Result<BaseKernel> {
        match self.resolve()? {
            ResolvedKernel::Base(k) => Ok(k),
            ResolvedKernel::Lamplighter(k) => Ok(k.base().clone()),
        }
    }

    fn lamplighter_kernel(&self) -> Result<LamplighterKernel> {
        match self.resolve()? {
            ResolvedKernel::Lamplighter(k) => Ok(k),
            ResolvedKernel::Base(_) => Err(Error::Parameter(
                "this statistic needs a lamplighter kernel (wos/sws/sw)".into(),
            )),
        }
    }
}

/// Graph given inline or by path; paths are replaced by the graph they name
/// before a manifest is echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    Inline(LabeledDigraph),
    Path(PathBuf),
}

impl GraphSource {
    fn load(&self) -> Result<LabeledDigraph> {
        match self {
            GraphSource::Inline(g) => Ok(g.clone()),
            GraphSource::Path(p) => Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    Simulate {
        stat: SimStat,
        kernel: KernelSpec,
        n: usize,
        trials: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u64>,
    },
    Spectral {
        op: SpectralOp,
        kernel: KernelSpec,
        nmax: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x: Option<BaseVertex>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<BaseVertex>,
    },
    Entropy {
        op: EntropyOp,
        graph: GraphSource,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forbid: Option<FactorSet>,
        #[serde(default)]
        from: usize,
        #[serde(default)]
        to: usize,
        nmax: usize,
    },
    Schreier {
        op: SchreierOp,
        group: GroupSpec,
        psi: Presentation,
        radius: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl ExperimentManifest {
    /// Schema-level checks that do not need to run anything.
    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Parameter("threads must be >= 1".into()));
        }
        match &self.task {
            Task::Simulate { n, trials, .. } => {
                if self.seed.is_none() {
                    return Err(Error::Parameter(
                        "--seed is required for simulations".into(),
                    ));
                }
                SimConfig::new(0, *n, *trials)?;
            }
            Task::Spectral {
                op: SpectralOp::Green,
                z: None,
                ..
            } => {
                return Err(Error::Parameter("green needs --z".into()));
            }
            Task::Entropy {
                op: EntropyOp::Report | EntropyOp::SubstochCheck | EntropyOp::Rho,
                forbid: None,
                ..
            } => {
                return Err(Error::Parameter(
                    "this entropy operation needs --forbid".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// Replaces graph paths by the graphs themselves.
    pub fn resolved(&self) -> Result<Self> {
        let mut m = self.clone();
        if let Task::Entropy { graph, .. } = &mut m.task {
            *graph = GraphSource::Inline(graph.load()?);
        }
        Ok(m)
    }
}

/// Result of running a manifest.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub summary: Value,
    pub csv: String,
    /// 0, or 3 when a certified check came out negative.
    pub status: i32,
}

fn estimate_csv(e: &Estimate) -> String {
    let mut s = String::from("trial,value\n");
    for (i, v) in e.per_trial.iter().enumerate() {
        let _ = writeln!(s, "{i},{v}");
    }
    s
}

fn run_simulate(
    stat: SimStat,
    kernel: &KernelSpec,
    n: usize,
    t: Option<f64>,
    radius: Option<u64>,
    cfg: SimConfig,
) -> Result<(Value, String)> {
    match stat {
        SimStat::RateOfEscape => match kernel.resolve()? {
            ResolvedKernel::Base(k) => {
                let e = simulate::rate_of_escape_base(&k, &cfg)?;
                Ok((serde_json::to_value(&e)?, estimate_csv(&e)))
            }
            ResolvedKernel::Lamplighter(k) => {
                let lg = LamplighterGraph::new(k.graph());
                let start = lg.origin();
                let e = simulate::rate_of_escape(
                    &k,
                    &start,
                    |a, b| lg.distance(a, b).map_or(f64::NAN, |d| d.value as f64),
                    &cfg,
                )?;
                Ok((serde_json::to_value(&e)?, estimate_csv(&e)))
            }
        },
        SimStat::SupportGrowth => {
            let e = simulate::support_growth(&kernel.lamplighter_kernel()?, &cfg)?;
            Ok((serde_json::to_value(&e)?, estimate_csv(&e)))
        }
        SimStat::Range => {
            let e = simulate::mean_range(&kernel.base_kernel()?, &cfg);
            Ok((serde_json::to_value(&e)?, estimate_csv(&e)))
        }
        SimStat::SwsReturn => {
            let base = kernel.base_kernel()?;
            let formula = simulate::sws_return_probability(&base, n, &cfg)?;
            let start = LamplighterState::at(base.graph().origin());
            let chain = switch_walk_switch(LampKernel::uniform(), base);
            let direct = simulate::return_frequency(&chain, &start, n, &cfg)?;
            let mut csv = String::from("trial,formula,direct\n");
            for (i, (a, b)) in formula.per_trial.iter().zip(&direct.per_trial).enumerate() {
                let _ = writeln!(csv, "{i},{a},{b}");
            }
            Ok((json!({"formula": formula, "direct": direct}), csv))
        }
        SimStat::LaplaceRange => {
            let t = t.unwrap_or(1.0);
            let e = simulate::laplace_range(&kernel.base_kernel()?, t, n, &cfg)?;
            Ok((
                json!({"laplace": e, "t": t, "minus_log": -e.estimate.ln()}),
                estimate_csv(&e),
            ))
        }
        SimStat::Cutpoints => {
            let q = match kernel {
                KernelSpec::Oriented { q, .. } => *q,
                _ => {
                    return Err(Error::Parameter(
                        "cut points are taken on the induced chain of an oriented kernel".into(),
                    ))
                }
            };
            let y = induced_spine_chain(q)?;
            let per: Vec<(f64, f64, usize)> = (0..cfg.trials as u64)
                .map(|i| {
                    let traj = run_trajectory(&y, &0, n, &mut cfg.stream(i)).expect("valid start");
                    let path: Vec<i64> = traj.states.iter().map(|&v| v as i64).collect();
                    let c = cut_points(&path);
                    (c.point_density, c.time_density, c.times.len())
                })
                .collect();
            let point = Estimate::from_trials(cfg.base_seed, per.iter().map(|p| p.0).collect());
            let time = Estimate::from_trials(cfg.base_seed, per.iter().map(|p| p.1).collect());
            let mut csv = String::from("trial,point_density,time_density,cut_points\n");
            for (i, p) in per.iter().enumerate() {
                let _ = writeln!(csv, "{i},{},{},{}", p.0, p.1, p.2);
            }
            Ok((
                json!({"point_density": point, "time_density": time, "q": q}),
                csv,
            ))
        }
        SimStat::LimitConfig => {
            let k = kernel.lamplighter_kernel()?;
            let r = radius.unwrap_or(2);
            let e = simulate::stabilization_frequency(&k, r, &cfg)?;
            let traj = run_lamplighter_trajectory(
                &k,
                &LamplighterState::at(k.graph().origin()),
                n,
                &mut cfg.stream(0),
            )?;
            let first = limit_configuration(k.graph(), &traj, r)?;
            Ok((
                json!({"stabilized_fraction": e, "radius": r, "trial_0": first}),
                estimate_csv(&e),
            ))
        }
    }
}

fn parse_forbid(forbid: &Option<FactorSet>) -> Result<&FactorSet> {
    forbid
        .as_ref()
        .ok_or_else(|| Error::Parameter("--forbid is required".into()))
}

/// Executes a manifest.
pub fn run(manifest: &ExperimentManifest) -> Result<Outcome> {
    manifest.validate()?;
    let resolved = manifest.resolved()?;
    let mut status = 0;
    let (result, csv) = match &resolved.task {
        Task::Simulate {
            stat,
            kernel,
            n,
            trials,
            t,
            radius,
        } => {
            let cfg =
                SimConfig::new(resolved.seed.unwrap(), *n, *trials)?.with_threads(resolved.threads);
            run_simulate(*stat, kernel, *n, *t, *radius, cfg)?
        }
        Task::Spectral {
            op,
            kernel,
            nmax,
            z,
            x,
            y,
        } => match op {
            SpectralOp::Rho => {
                let e = match kernel.resolve()? {
                    ResolvedKernel::Base(k) => match x {
                        None => spectral_radius_base(&k, *nmax)?,
                        Some(x) => spectral_radius_dp(&k, x, *nmax)?,
                    },
                    ResolvedKernel::Lamplighter(k) => {
                        spectral_radius_dp(&k, &LamplighterGraph::new(k.graph()).origin(), *nmax)?
                    }
                };
                let mut csv = String::from("n,root\n");
                for (n, r) in &e.roots {
                    let _ = writeln!(csv, "{n},{r}");
                }
                (serde_json::to_value(&e)?, csv)
            }
            SpectralOp::Green => {
                let k = kernel.base_kernel()?;
                let o = k.graph().origin();
                let x = x.clone().unwrap_or_else(|| o.clone());
                let y = y.clone().unwrap_or(o);
                let z = z.unwrap();
                let lumped = k
                    .radial_lumping()
                    .filter(|_| x == k.graph().origin() && y == x);
                let sums = match lumped {
                    Some(walk) => green_series(&walk, &0, &0, z, *nmax)?,
                    None => green_series(&k, &x, &y, z, *nmax)?,
                };
                let mut csv = String::from("n,partial_sum\n");
                for (n, s) in sums.iter().enumerate() {
                    let _ = writeln!(csv, "{n},{s}");
                }
                (json!({"green": sums.last(), "z": z, "n": nmax}), csv)
            }
        },
        Task::Entropy {
            op,
            graph,
            forbid,
            from,
            to,
            nmax,
        } => {
            let g = graph.load()?;
            match op {
                EntropyOp::Report => {
                    let rep = growth_sensitivity_report(&g, parse_forbid(forbid)?)?;
                    let mut csv = String::from("x,y,h_f\n");
                    for p in &rep.pairs {
                        let _ = writeln!(
                            csv,
                            "{},{},{}",
                            p.x,
                            p.y,
                            p.h_f.map_or("-inf".to_string(), |h| h.to_string())
                        );
                    }
                    (serde_json::to_value(&rep)?, csv)
                }
                EntropyOp::IdentityCheck => {
                    let c = entropy_spectral_identity_check(&g)?;
                    let est = entropy(&g, *from, *to, *nmax)?;
                    let mut csv = String::from("n,log_count_over_n\n");
                    for (n, v) in &est.raw {
                        let _ = writeln!(csv, "{n},{v}");
                    }
                    (
                        json!({"identity": c, "entropy": est.h, "period": est.period}),
                        csv,
                    )
                }
                EntropyOp::SubstochCheck => {
                    let rep =
                        substochastic_bound_check(&uniform_weighting(&g)?, parse_forbid(forbid)?)?;
                    if !rep.pass {
                        status = 3;
                    }
                    let mut csv = String::from("x,row_sum\n");
                    for (x, s) in rep.row_sums.iter().enumerate() {
                        let _ = writeln!(csv, "{x},{s}");
                    }
                    (serde_json::to_value(&rep)?, csv)
                }
                EntropyOp::Count => {
                    let counts = match forbid {
                        None => count_sequence(&g, *from, *to, *nmax)?,
                        Some(f) => restrict(&g, f)?.count_sequence(*from, *to, *nmax)?,
                    };
                    let mut csv = String::from("n,count\n");
                    for (n, c) in counts.iter().enumerate() {
                        let _ = writeln!(csv, "{n},{c}");
                    }
                    let as_text: Vec<String> = counts.iter().map(u128::to_string).collect();
                    (json!({"counts": as_text}), csv)
                }
                EntropyOp::Rho => {
                    let r = restricted_rho(
                        &uniform_weighting(&g)?,
                        parse_forbid(forbid)?,
                        *from,
                        *to,
                        *nmax,
                    )?;
                    let mut csv = String::from("n,root\n");
                    for (n, v) in r.dp.iter().flat_map(|d| d.roots.iter()) {
                        let _ = writeln!(csv, "{n},{v}");
                    }
                    (serde_json::to_value(&r)?, csv)
                }
            }
        }
        Task::Schreier {
            group, psi, radius, ..
        } => {
            let s = build_schreier(group, psi, *radius)?;
            let mut csv = String::from("source,label,target\n");
            for e in s.graph.edges() {
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    e.source,
                    s.graph.alphabet()[e.label],
                    e.target
                );
            }
            (serde_json::to_value(&s)?, csv)
        }
    };
    let summary = json!({"manifest": resolved, "result": result});
    Ok(Outcome {
        summary,
        csv,
        status,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "lampwalk",
    version,
    about = "Lamplighter random walks, spectral radii and language entropy"
)]
pub struct Cli {
    /// Base seed; required by `simulate`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Directory receiving summary.json and data.csv.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Monte-Carlo estimators.
    Simulate {
        #[arg(value_enum)]
        stat: SimStat,
        #[arg(long)]
        kernel: String,
        #[arg(long = "n")]
        n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Laplace parameter for `laplace-range`.
        #[arg(long)]
        t: Option<f64>,
        /// Ball radius for `limit-config`.
        #[arg(long)]
        radius: Option<u64>,
    },
    /// Spectral radius or Green function partial sums.
    Spectral {
        #[arg(value_enum)]
        op: SpectralOp,
        #[arg(long)]
        kernel: String,
        #[arg(long, default_value_t = 400)]
        nmax: usize,
        #[arg(long)]
        z: Option<f64>,
        /// Start vertex as JSON or comma-separated lattice coordinates.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: Option<String>,
    },
    /// Language entropy of a labelled graph.
    Entropy {
        #[arg(value_enum)]
        op: EntropyOp,
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated forbidden words.
        #[arg(long)]
        forbid: Option<String>,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long, default_value_t = 0)]
        to: usize,
        #[arg(long, default_value_t = 20)]
        nmax: usize,
    },
    /// Schreier coset graphs.
    Schreier {
        #[arg(value_enum)]
        op: SchreierOp,
        /// `z2`, `zd:D` or `freeprod:K`.
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "trivial")]
        subgroup: String,
        /// e.g. `a=t` or `a=(1,0),b=(-1,0)`.
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 1)]
        radius: usize,
    },
    /// Replay a manifest file.
    Run {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn parse_vertex(s: &str) -> Result<BaseVertex> {
    if s.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(s)?);
    }
    let coords = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad vertex {s:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaseVertex::lattice(coords))
}

impl Cli {
    pub fn manifest(&self) -> Result<ExperimentManifest> {
        let task = match &self.command {
            Commands::Simulate {
                stat,
                kernel,
                n,
                trials,
                t,
                radius,
            } => Task::Simulate {
                stat: *stat,
                kernel: KernelSpec::parse(kernel)?,
                n: *n,
                trials: *trials,
                t: *t,
                radius: *radius,
            },
            Commands::Spectral {
                op,
                kernel,
                nmax,
                z,
                x,
                y,
            } => Task::Spectral {
                op: *op,
                kernel: KernelSpec::parse(kernel)?,
                nmax: *nmax,
                z: *z,
                x: x.as_deref().map(parse_vertex).transpose()?,
                y: y.as_deref().map(parse_vertex).transpose()?,
            },
            Commands::Entropy {
                op,
                graph,
                forbid,
                from,
                to,
                nmax,
            } => Task::Entropy {
                op: *op,
                graph: GraphSource::Path(graph.clone()),
                forbid: forbid.as_deref().map(FactorSet::parse).transpose()?,
                from: *from,
                to: *to,
                nmax: *nmax,
            },
            Commands::Schreier {
                op,
                group,
                subgroup,
                psi,
                radius,
            } => {
                let group = GroupSpec::parse(group, subgroup)?;
                let psi = Presentation::parse(&group, psi)?;
                Task::Schreier {
                    op: *op,
                    group,
                    psi,
                    radius: *radius,
                }
            }
            Commands::Run { manifest } => {
                let mut m: ExperimentManifest =
                    serde_json::from_str(&std::fs::read_to_string(manifest)?)?;
                if self.seed.is_some() {
                    m.seed = self.seed;
                }
                return Ok(m);
            }
        };
        Ok(ExperimentManifest {
            task,
            seed: self.seed,
            threads: self.threads,
            out: self.out.clone(),
            format: self.format,
        })
    }
}

fn write_outputs(
    m: &ExperimentManifest,
    o: &Outcome,
    stdout: &mut dyn std::io::Write,
) -> Result<()> {
    let json = serde_json::to_string_pretty(&o.summary)? + "\n";
    match &m.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            if m.format != Format::Csv {
                std::fs::write(Path::new(dir).join("summary.json"), &json)?;
            }
            if m.format != Format::Json {
                std::fs::write(Path::new(dir).join("data.csv"), &o.csv)?;
            }
            stdout.write_all(json.as_bytes())?;
        }
        None => {
            if m.format != Format::Json {
                stdout.write_all(o.csv.as_bytes())?;
            }
            if m.format != Format::Csv {
                stdout.write_all(json.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on parsed arguments and returns the process exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32 {
    let result = cli.manifest().and_then(|m| {
        let o = run(&m)?;
        write_outputs(&m, &o, stdout)?;
        Ok(o.status)
    });
    match result {
        Ok(0) => 0,
        Ok(code) => {
            let _ = writeln!(stderr, "certification failed: see the summary");
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("lampwalk").chain(args.iter().copied())).unwrap()
    }

    fn exec(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = execute(&cli(args), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn kernel_shorthands() {
        assert_eq!(
            KernelSpec::parse("biased:0.7").unwrap(),
            KernelSpec::Biased { p: 0.7 }
        );
        assert!(matches!(
            KernelSpec::parse("srw:homtree:3")
                .unwrap()
                .resolve()
                .unwrap(),
            ResolvedKernel::Base(_)
        ));
        assert!(matches!(
            KernelSpec::parse("sws:srw:z").unwrap().resolve().unwrap(),
            ResolvedKernel::Lamplighter(_)
        ));
        assert!(matches!(
            KernelSpec::parse("wos:0.5:biased:0.7")
                .unwrap()
                .resolve()
                .unwrap(),
            ResolvedKernel::Lamplighter(_)
        ));
        let j = KernelSpec::parse(r#"{"kind":"sws","lamp":"uniform","base":{"kind":"srw","graph":{"family":"lattice","d":1}}}"#).unwrap();
        assert_eq!(j, KernelSpec::parse("sws:srw:z").unwrap());
        assert!(KernelSpec::parse("biased:0.3").unwrap().resolve().is_err());
        assert!(KernelSpec::parse("nope").is_err());
        assert!(KernelSpec::parse("sws:sws:srw:z")
            .unwrap()
            .resolve()
            .is_err());
    }

    #[test]
    fn seed_is_mandatory() {
        let (code, _, err) = exec(&[
            "simulate", "range", "--kernel", "srw:z", "--n", "10", "--trials", "2",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("seed"));
    }

    #[test]
    fn simulate_is_reproducible() {
        let args = [
            "simulate",
            "rate-of-escape",
            "--kernel",
            "biased:0.7",
            "--n",
            "200",
            "--trials",
            "20",
            "--seed",
            "7",
        ];
        let (c1, a, _) = exec(&args);
        let (c2, b, _) = exec(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(a, b);
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["result"]["seed"], 7);
        assert_eq!(v["manifest"]["seed"], 7);
    }

    #[test]
    fn schreier_builds_z2() {
        let (code, out, _) = exec(&[
            "schreier",
            "build",
            "--group",
            "z2",
            "--subgroup",
            "trivial",
            "--psi",
            "a=t",
        ]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["vertices"], 2);
    }

    #[test]
    fn invalid_psi_exits_with_validation_code() {
        let (code, _, err) = exec(&["schreier", "build", "--group", "zd:1", "--psi", "a=1"]);
        assert_eq!(code, 2);
        assert!(err.contains("presentation"));
    }

    #[test]
    fn entropy_report_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("full2.json");
        std::fs::write(
            &path,
            r#"{"vertices":1,"alphabet":["0","1"],"edges":[[0,"0",0],[0,"1",0]]}"#,
        )
        .unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = exec(&["entropy", "report", "--graph", p, "--forbid", "11"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["result"]["strict"], true);
        assert!((v["result"]["h"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-12);
        let absent = dir.path().join("absent.json");
        std::fs::write(
            &absent,
            r#"{"vertices":1,"alphabet":["a","c"],"edges":[[0,"a",0]]}"#,
        )
        .unwrap();
        let (code, _, err) = exec(&[
            "entropy",
            "report",
            "--graph",
            absent.to_str().unwrap(),
            "--forbid",
            "c",
        ]);
        assert_eq!(code, 3);
        assert!(err.contains("relatively dense"));
        let (code, _, _) = exec(&[
            "entropy",
            "report",
            "--graph",
            "/nonexistent/graph.json",
            "--forbid",
            "c",
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn manifest_roundtrip_and_out_dir() {
        let dir = tempfile::tempdir().unwrap();
        let m = cli(&["spectral", "rho", "--kernel", "biased:0.7", "--nmax", "100"])
            .manifest()
            .unwrap();
        let path = dir.path().join("m.json");
        std::fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
        let out_dir = dir.path().join("out");
        let (code, out, _) = exec(&["run", "--manifest", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let direct = exec(&["spectral", "rho", "--kernel", "biased:0.7", "--nmax", "100"]).1;
        assert_eq!(out, direct);
        let (code, _, _) = exec(&[
            "spectral",
            "rho",
            "--kernel",
            "biased:0.7",
            "--nmax",
            "100",
            "--format",
            "both",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(std::fs::read_to_string(out_dir.join("data.csv"))
            .unwrap()
            .starts_with("n,root\n"));
        assert!(out_dir.join("summary.json").exists());
    }
}
