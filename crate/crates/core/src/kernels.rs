//! Transition kernels on base graphs and lamplighter graphs.
//!
//! State spaces are infinite, so a kernel is given by its local enumeration
//! `state -> [(target, probability)]` plus a sampler that draws from the same
//! distribution. Matrices only appear after truncation (see `spectral`).

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, BaseGraph, BaseVertex};
use crate::lamplighter::{LampConfiguration, LamplighterState};

/// A (sub)stochastic transition rule given by local enumeration.
pub trait Kernel: Sync {
    type State: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    /// Targets with positive probability, merged and in canonical order.
    fn transitions(&self, from: &Self::State) -> Result<Vec<(Self::State, f64)>>;

    /// Rough memory footprint of one stored state, heap included.
    fn state_bytes(&self, _s: &Self::State) -> usize {
        std::mem::size_of::<Self::State>()
    }

    /// Draws one step. Only meaningful for stochastic kernels; `from` is
    /// assumed valid.
    fn sample<R: Rng + ?Sized>(&self, from: &Self::State, rng: &mut R) -> Self::State {
        let t = self
            .transitions(from)
            .expect("sampling from an invalid state");
        sample_from(&t, rng)
    }
}

/// Inverse-CDF draw from an enumerated distribution.
pub fn sample_from<S: Clone, R: Rng + ?Sized>(t: &[(S, f64)], rng: &mut R) -> S {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (s, p) in t {
        acc += p;
        if u < acc {
            return s.clone();
        }
    }
    t.last().expect("empty transition list").0.clone()
}

pub(crate) fn aggregate<S: Ord>(items: impl IntoIterator<Item = (S, f64)>) -> Vec<(S, f64)> {
    let mut map: BTreeMap<S, f64> = BTreeMap::new();
    for (s, p) in items {
        if p > 0.0 {
            *map.entry(s).or_insert(0.0) += p;
        }
    }
    map.into_iter().collect()
}

/// Compensated (Neumaier) summation.
pub fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Kernels on the vertices of a base graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BaseKernel {
    /// Simple random walk: uniform over neighbours.
    Srw(BaseGraph),
    /// Nearest-neighbour walk on `Z` stepping right with probability `p`.
    BiasedZ { p: f64 },
    /// Oriented tree walk: father with probability `father`, each of the `q`
    /// sons with probability `(1 - father) / q`.
    OrientedTree { q: usize, father: f64 },
    /// Deterministic unit step to the right on `Z`.
    Shift,
}

pub fn srw(g: BaseGraph) -> BaseKernel {
    BaseKernel::Srw(g)
}

pub fn biased_z(p: f64) -> Result<BaseKernel> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::Parameter(format!(
            "drift probability must lie in (1/2, 1), got {p}"
        )));
    }
    Ok(BaseKernel::BiasedZ { p })
}

/// The zero-drift walk: father with probability 1/2, each son 1/(2q).
pub fn oriented_tree_kernel(q: usize) -> Result<BaseKernel> {
    oriented_tree_kernel_with_father(q, 0.5)
}

pub fn oriented_tree_kernel_with_father(q: usize, father: f64) -> Result<BaseKernel> {
    if q < 2 {
        return Err(Error::Parameter(format!(
            "oriented tree needs q >= 2, got {q}"
        )));
    }
    BaseGraph::oriented(q)?;
    if !(father > 0.0 && father < 1.0) {
        return Err(Error::Parameter(format!(
            "father probability must lie in (0, 1), got {father}"
        )));
    }
    Ok(BaseKernel::OrientedTree { q, father })
}

impl BaseKernel {
    pub fn graph(&self) -> BaseGraph {
        match *self {
            BaseKernel::Srw(g) => g,
            BaseKernel::BiasedZ { .. } | BaseKernel::Shift => BaseGraph::Lattice { d: 1 },
            BaseKernel::OrientedTree { q, .. } => BaseGraph::Oriented { q },
        }
    }

    /// The distance-from-start process when it is itself Markov (simple
    /// random walk on `Z` or on a homogeneous tree).
    pub fn radial_lumping(&self) -> Option<ReflectedWalk> {
        match *self {
            BaseKernel::Srw(BaseGraph::Lattice { d: 1 }) => Some(ReflectedWalk { up: 0.5 }),
            BaseKernel::Srw(BaseGraph::HomTree { m }) => Some(ReflectedWalk {
                up: (m - 1) as f64 / m as f64,
            }),
            _ => None,
        }
    }
}

impl Kernel for BaseKernel {
    type State = BaseVertex;

    fn transitions(&self, from: &BaseVertex) -> Result<Vec<(BaseVertex, f64)>> {
        let g = self.graph();
        g.check(from)?;
        Ok(match *self {
            BaseKernel::Srw(g) => {
                let w = 1.0 / g.degree() as f64;
                aggregate((0..g.degree()).map(|i| (g.neighbor(from, i), w)))
            }
            BaseKernel::BiasedZ { p } => {
                aggregate([(g.neighbor(from, 0), p), (g.neighbor(from, 1), 1.0 - p)])
            }
            BaseKernel::OrientedTree { q, father } => {
                let son = (1.0 - father) / q as f64;
                aggregate(
                    std::iter::once((graph::oriented_father(from), father))
                        .chain((0..q).map(|j| (graph::oriented_son(from, j as u8), son))),
                )
            }
            BaseKernel::Shift => vec![(g.neighbor(from, 0), 1.0)],
        })
    }

    fn sample<R: Rng + ?Sized>(&self, from: &BaseVertex, rng: &mut R) -> BaseVertex {
        match *self {
            BaseKernel::Srw(g) => g.neighbor(from, rng.random_range(0..g.degree())),
            BaseKernel::BiasedZ { p } => {
                let i = if rng.random::<f64>() < p { 0 } else { 1 };
                self.graph().neighbor(from, i)
            }
            BaseKernel::OrientedTree { q, father } => {
                if rng.random::<f64>() < father {
                    graph::oriented_father(from)
                } else {
                    graph::oriented_son(from, rng.random_range(0..q) as u8)
                }
            }
            BaseKernel::Shift => self.graph().neighbor(from, 0),
        }
    }
}

/// Nearest-neighbour walk on `Z_+`, reflected at 0 (`0 -> 1` surely) and
/// moving up with probability `up` from every `i >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectedWalk {
    pub up: f64,
}

/// Law of the spine chain `Y` induced by the zero-drift oriented tree walk:
/// `q(0,1) = 1`, `q(i,i+1) = q/(q+1)`, `q(i,i-1) = 1/(q+1)`.
pub fn induced_spine_chain(q: usize) -> Result<ReflectedWalk> {
    if q < 2 {
        return Err(Error::Parameter(format!(
            "oriented tree needs q >= 2, got {q}"
        )));
    }
    Ok(ReflectedWalk {
        up: q as f64 / (q + 1) as f64,
    })
}

impl Kernel for ReflectedWalk {
    type State = u64;

    fn transitions(&self, from: &u64) -> Result<Vec<(u64, f64)>> {
        Ok(if *from == 0 {
            vec![(1, 1.0)]
        } else {
            vec![(from - 1, 1.0 - self.up), (from + 1, self.up)]
        })
    }

    fn sample<R: Rng + ?Sized>(&self, from: &u64, rng: &mut R) -> u64 {
        if *from == 0 || rng.random::<f64>() < self.up {
            from + 1
        } else {
            from - 1
        }
    }
}

/// Stochastic 2x2 matrix acting on a single lamp.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct LampKernel {
    m: [[f64; 2]; 2],
}

impl TryFrom<[[f64; 2]; 2]> for LampKernel {
    type Error = Error;

    fn try_from(m: [[f64; 2]; 2]) -> Result<Self> {
        LampKernel::new(m)
    }
}

impl From<LampKernel> for [[f64; 2]; 2] {
    fn from(k: LampKernel) -> Self {
        k.m
    }
}

impl LampKernel {
    pub fn new(m: [[f64; 2]; 2]) -> Result<Self> {
        for row in &m {
            if row.iter().any(|&x| !(0.0..=1.0).contains(&x))
                || (row[0] + row[1] - 1.0).abs() > 1e-12
            {
                return Err(Error::Parameter(format!(
                    "lamp kernel rows must be probability vectors, got {m:?}"
                )));
            }
        }
        Ok(Self { m })
    }

    pub fn uniform() -> Self {
        Self {
            m: [[0.5, 0.5], [0.5, 0.5]],
        }
    }

    /// Always switch.
    pub fn flip() -> Self {
        Self {
            m: [[0.0, 1.0], [1.0, 0.0]],
        }
    }

    pub fn is_uniform(&self) -> bool {
        *self == Self::uniform()
    }

    pub fn prob(&self, from: u8, to: u8) -> f64 {
        self.m[from as usize][to as usize]
    }

    /// Outcomes of applying the lamp kernel at `at`.
    fn apply(&self, lamps: &LampConfiguration, at: &BaseVertex) -> [(bool, f64); 2] {
        let v = lamps.value(at);
        [(false, self.prob(v, v)), (true, self.prob(v, 1 - v))]
    }

    fn sample_flip<R: Rng + ?Sized>(
        &self,
        lamps: &LampConfiguration,
        at: &BaseVertex,
        rng: &mut R,
    ) -> bool {
        let v = lamps.value(at);
        let p = self.prob(v, 1 - v);
        p >= 1.0 || (p > 0.0 && rng.random::<f64>() < p)
    }
}

/// Kernels on `Z_2 ≀ G` built from a base kernel and a lamp kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum LamplighterKernel {
    /// With probability `a` move by the base kernel, otherwise act on the lamp
    /// at the current position.
    WalkOrSwitch {
        a: f64,
        base: BaseKernel,
        lamp: LampKernel,
    },
    /// Lamp, then base move, then lamp at the new position.
    SwitchWalkSwitch { lamp: LampKernel, base: BaseKernel },
    /// Lamp, then base move.
    SwitchWalk { lamp: LampKernel, base: BaseKernel },
}

pub fn walk_or_switch(a: f64, base: BaseKernel, lamp: LampKernel) -> Result<LamplighterKernel> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter(format!(
            "walk probability must lie in (0, 1), got {a}"
        )));
    }
    Ok(LamplighterKernel::WalkOrSwitch { a, base, lamp })
}

pub fn switch_walk_switch(lamp: LampKernel, base: BaseKernel) -> LamplighterKernel {
    LamplighterKernel::SwitchWalkSwitch { lamp, base }
}

pub fn switch_walk(lamp: LampKernel, base: BaseKernel) -> LamplighterKernel {
    LamplighterKernel::SwitchWalk { lamp, base }
}

/// One sampled lamplighter step: new position and the lamps that flipped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepDelta {
    pub position: BaseVertex,
    pub flips: Vec<BaseVertex>,
}

impl LamplighterKernel {
    pub fn base(&self) -> &BaseKernel {
        match self {
            LamplighterKernel::WalkOrSwitch { base, .. }
            | LamplighterKernel::SwitchWalkSwitch { base, .. }
            | LamplighterKernel::SwitchWalk { base, .. } => base,
        }
    }

    pub fn lamp(&self) -> &LampKernel {
        match self {
            LamplighterKernel::WalkOrSwitch { lamp, .. }
            | LamplighterKernel::SwitchWalkSwitch { lamp, .. }
            | LamplighterKernel::SwitchWalk { lamp, .. } => lamp,
        }
    }

    pub fn graph(&self) -> BaseGraph {
        self.base().graph()
    }

    fn lamp_stage(&self, states: Vec<(LamplighterState, f64)>) -> Vec<(LamplighterState, f64)> {
        let lamp = self.lamp();
        let mut out = Vec::with_capacity(2 * states.len());
        for (s, p) in states {
            for (flip, q) in lamp.apply(&s.lamps, &s.position) {
                if q > 0.0 {
                    let mut t = s.clone();
                    if flip {
                        t.lamps.flip(&s.position);
                    }
                    out.push((t, p * q));
                }
            }
        }
        out
    }

    fn walk_stage(
        &self,
        states: Vec<(LamplighterState, f64)>,
    ) -> Result<Vec<(LamplighterState, f64)>> {
        let mut out = Vec::new();
        for (s, p) in states {
            for (x, q) in self.base().transitions(&s.position)? {
                out.push((LamplighterState::new(s.lamps.clone(), x), p * q));
            }
        }
        Ok(out)
    }

    /// Samples one step in place and reports what changed.
    pub fn step<R: Rng + ?Sized>(&self, s: &mut LamplighterState, rng: &mut R) -> StepDelta {
        let mut flips = Vec::new();
        match self {
            LamplighterKernel::WalkOrSwitch { a, base, lamp } => {
                if rng.random::<f64>() < *a {
                    s.position = base.sample(&s.position, rng);
                } else if lamp.sample_flip(&s.lamps, &s.position, rng) {
                    s.lamps.flip(&s.position);
                    flips.push(s.position.clone());
                }
            }
            LamplighterKernel::SwitchWalkSwitch { lamp, base }
            | LamplighterKernel::SwitchWalk { lamp, base } => {
                if lamp.sample_flip(&s.lamps, &s.position, rng) {
                    s.lamps.flip(&s.position);
                    flips.push(s.position.clone());
                }
                s.position = base.sample(&s.position, rng);
                if matches!(self, LamplighterKernel::SwitchWalkSwitch { .. })
                    && lamp.sample_flip(&s.lamps, &s.position, rng)
                {
                    s.lamps.flip(&s.position);
                    flips.push(s.position.clone());
                }
            }
        }
        StepDelta {
            position: s.position.clone(),
            flips,
        }
    }
}

impl Kernel for LamplighterKernel {
    type State = LamplighterState;

    fn state_bytes(&self, s: &LamplighterState) -> usize {
        // B-tree nodes hold up to 11 keys and are allocated whole.
        let node = 11 * std::mem::size_of::<BaseVertex>() + 16;
        std::mem::size_of::<LamplighterState>() + s.lamps.len().div_ceil(11) * node
    }

    fn transitions(&self, from: &LamplighterState) -> Result<Vec<(LamplighterState, f64)>> {
        let g = self.graph();
        g.check(&from.position)?;
        for v in from.lamps.support() {
            g.check(v)?;
        }
        let start = vec![(from.clone(), 1.0)];
        let staged = match self {
            LamplighterKernel::WalkOrSwitch { a, .. } => {
                let moves = self
                    .walk_stage(start.clone())?
                    .into_iter()
                    .map(|(s, p)| (s, a * p));
                let switches = self
                    .lamp_stage(start)
                    .into_iter()
                    .map(|(s, p)| (s, (1.0 - a) * p));
                moves.chain(switches).collect::<Vec<_>>()
            }
            LamplighterKernel::SwitchWalkSwitch { .. } => {
                let first = self.lamp_stage(start);
                let moved = self.walk_stage(first)?;
                self.lamp_stage(moved)
            }
            LamplighterKernel::SwitchWalk { .. } => self.walk_stage(self.lamp_stage(start))?,
        };
        Ok(aggregate(staged))
    }

    fn sample<R: Rng + ?Sized>(&self, from: &LamplighterState, rng: &mut R) -> LamplighterState {
        let mut s = from.clone();
        self.step(&mut s, rng);
        s
    }
}

/// Marginal law of the base position after one lamplighter step from
/// `(0, x)`.
pub fn project_base(k: &LamplighterKernel, x: &BaseVertex) -> Result<Vec<(BaseVertex, f64)>> {
    let t = k.transitions(&LamplighterState::at(x.clone()))?;
    Ok(aggregate(t.into_iter().map(|(s, p)| (s.position, p))))
}

/// Detailed balance `m(x) p(x,y) = m(y) p(y,x)` for every `x` in `states`
/// and every `y` reachable from it in one step.
pub fn check_reversible<K, M>(k: &K, m: M, states: &[K::State]) -> Result<bool>
where
    K: Kernel,
    M: Fn(&K::State) -> f64,
{
    for x in states {
        let mx = m(x);
        for (y, pxy) in k.transitions(x)? {
            let pyx = k
                .transitions(&y)?
                .into_iter()
                .find(|(z, _)| z == x)
                .map(|(_, p)| p)
                .unwrap_or(0.0);
            let lhs = mx * pxy;
            let rhs = m(&y) * pyx;
            if (lhs - rhs).abs() > 1e-12 * lhs.abs().max(rhs.abs()).max(1.0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// [`check_reversible`] over the ball of the given radius around the origin.
pub fn check_reversible_ball<M>(k: &BaseKernel, m: M, radius: u64) -> Result<bool>
where
    M: Fn(&BaseVertex) -> f64,
{
    let g = k.graph();
    let ball = g.ball(&g.origin(), radius)?;
    check_reversible(k, m, &ball)
}
