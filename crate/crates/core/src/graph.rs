//! Base-graph families with exact geometry.
//!
//! Three infinite families are supported: the lattice `Z^d`, the homogeneous
//! tree `T_M` (realised as the Cayley graph of the free product of `M` copies
//! of `Z_2`, so vertices are freely reduced words), and the oriented tree of
//! forward degree `q` with a fixed end `ω`. A finite cycle is included so small
//! wreath products such as `Z_2 ≀ Z_2` can be built exactly.
//!
//! Oriented-tree vertices are stored relative to the geodesic ray from the
//! origin `o` towards `ω`: spine vertex `s_k` is the `k`-th ancestor of `o`,
//! and a vertex is `(k, descent)` where `descent` is the digit string read
//! going down from `s_k`. Son `0` of `s_k` (for `k >= 1`) is `s_{k-1}`, so a
//! canonical encoding with `k >= 1` never starts its descent with digit `0`.
//! The tree hanging at `s_k` (everything encoded with spine index `k`) is the
//! attached subtree `T_k`.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Coords = SmallVec<[i64; 4]>;

/// A vertex of one of the base-graph families. Encodings are canonical, so
/// structural equality is vertex identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseVertex {
    Lattice(Coords),
    /// Freely reduced word over the generators `0..M`.
    Tree(Vec<u8>),
    Oriented {
        spine: u64,
        descent: Vec<u8>,
    },
    Cycle(u64),
}

impl BaseVertex {
    pub fn lattice<I: IntoIterator<Item = i64>>(coords: I) -> Self {
        BaseVertex::Lattice(coords.into_iter().collect())
    }

    pub fn oriented(spine: u64, descent: Vec<u8>) -> Self {
        BaseVertex::Oriented { spine, descent }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum RawGraph {
    Lattice {
        d: usize,
    },
    #[serde(rename = "homtree")]
    HomTree {
        #[serde(rename = "M")]
        m: usize,
    },
    Oriented {
        q: usize,
    },
    Cycle {
        n: usize,
    },
}

/// A base-graph family together with its parameters.
///
/// JSON form: `{"family":"lattice","d":2}`, `{"family":"homtree","M":3}`,
/// `{"family":"oriented","q":2}` or `{"family":"cycle","n":2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub enum BaseGraph {
    Lattice { d: usize },
    HomTree { m: usize },
    Oriented { q: usize },
    Cycle { n: usize },
}

impl TryFrom<RawGraph> for BaseGraph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        match raw {
            RawGraph::Lattice { d } => BaseGraph::lattice(d),
            RawGraph::HomTree { m } => BaseGraph::homtree(m),
            RawGraph::Oriented { q } => BaseGraph::oriented(q),
            RawGraph::Cycle { n } => BaseGraph::cycle(n),
        }
    }
}

impl From<BaseGraph> for RawGraph {
    fn from(g: BaseGraph) -> Self {
        match g {
            BaseGraph::Lattice { d } => RawGraph::Lattice { d },
            BaseGraph::HomTree { m } => RawGraph::HomTree { m },
            BaseGraph::Oriented { q } => RawGraph::Oriented { q },
            BaseGraph::Cycle { n } => RawGraph::Cycle { n },
        }
    }
}

impl BaseGraph {
    pub fn lattice(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Parameter("lattice dimension must be >= 1".into()));
        }
        Ok(BaseGraph::Lattice { d })
    }

    pub fn homtree(m: usize) -> Result<Self> {
        if !(3..=255).contains(&m) {
            return Err(Error::Parameter(format!(
                "homogeneous tree degree must be in 3..=255, got {m}"
            )));
        }
        Ok(BaseGraph::HomTree { m })
    }

    pub fn oriented(q: usize) -> Result<Self> {
        if !(2..=255).contains(&q) {
            return Err(Error::Parameter(format!(
                "oriented tree branching must be in 2..=255, got {q}"
            )));
        }
        Ok(BaseGraph::Oriented { q })
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "cycle length must be >= 2, got {n}"
            )));
        }
        Ok(BaseGraph::Cycle { n })
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            BaseGraph::Lattice { .. } => "lattice",
            BaseGraph::HomTree { .. } => "homtree",
            BaseGraph::Oriented { .. } => "oriented",
            BaseGraph::Cycle { .. } => "cycle",
        }
    }

    pub fn degree(&self) -> usize {
        match *self {
            BaseGraph::Lattice { d } => 2 * d,
            BaseGraph::HomTree { m } => m,
            BaseGraph::Oriented { q } => q + 1,
            BaseGraph::Cycle { n } => {
                if n == 2 {
                    1
                } else {
                    2
                }
            }
        }
    }

    pub fn origin(&self) -> BaseVertex {
        match *self {
            BaseGraph::Lattice { d } => BaseVertex::Lattice(std::iter::repeat_n(0, d).collect()),
            BaseGraph::HomTree { .. } => BaseVertex::Tree(Vec::new()),
            BaseGraph::Oriented { .. } => BaseVertex::oriented(0, Vec::new()),
            BaseGraph::Cycle { .. } => BaseVertex::Cycle(0),
        }
    }

    /// Checks that `v` is a canonical encoding of a vertex of this graph.
    pub fn check(&self, v: &BaseVertex) -> Result<()> {
        match (self, v) {
            (BaseGraph::Lattice { d }, BaseVertex::Lattice(c)) => {
                if c.len() != *d {
                    return Err(Error::Encoding(format!(
                        "expected {d} coordinates, got {}",
                        c.len()
                    )));
                }
            }
            (BaseGraph::HomTree { m }, BaseVertex::Tree(w)) => {
                if let Some(&g) = w.iter().find(|&&g| g as usize >= *m) {
                    return Err(Error::Encoding(format!(
                        "generator {g} out of range for M = {m}"
                    )));
                }
                if w.windows(2).any(|p| p[0] == p[1]) {
                    return Err(Error::Encoding("tree word is not freely reduced".into()));
                }
            }
            (BaseGraph::Oriented { q }, BaseVertex::Oriented { spine, descent }) => {
                if let Some(&dg) = descent.iter().find(|&&dg| dg as usize >= *q) {
                    return Err(Error::Encoding(format!(
                        "digit {dg} out of range for q = {q}"
                    )));
                }
                if *spine >= 1 && descent.first() == Some(&0) {
                    return Err(Error::Encoding(
                        "descent from a spine vertex may not start with the spine son 0".into(),
                    ));
                }
            }
            (BaseGraph::Cycle { n }, BaseVertex::Cycle(i)) => {
                if *i as usize >= *n {
                    return Err(Error::Encoding(format!(
                        "cycle index {i} out of range for n = {n}"
                    )));
                }
            }
            _ => {
                return Err(Error::FamilyMismatch(format!(
                    "vertex {v:?} does not belong to the {} family",
                    self.family_name()
                )))
            }
        }
        Ok(())
    }

    /// The `i`-th neighbour of `v` in a fixed family-specific order, for
    /// `i < degree()`. `v` is assumed valid; used on hot sampling paths.
    pub fn neighbor(&self, v: &BaseVertex, i: usize) -> BaseVertex {
        match (self, v) {
            (BaseGraph::Lattice { .. }, BaseVertex::Lattice(c)) => {
                let mut c = c.clone();
                c[i / 2] += if i.is_multiple_of(2) { 1 } else { -1 };
                BaseVertex::Lattice(c)
            }
            (BaseGraph::HomTree { .. }, BaseVertex::Tree(w)) => {
                let g = i as u8;
                let mut w = w.clone();
                if w.last() == Some(&g) {
                    w.pop();
                } else {
                    w.push(g);
                }
                BaseVertex::Tree(w)
            }
            (BaseGraph::Oriented { .. }, BaseVertex::Oriented { .. }) => {
                if i == 0 {
                    oriented_father(v)
                } else {
                    oriented_son(v, (i - 1) as u8)
                }
            }
            (BaseGraph::Cycle { n }, BaseVertex::Cycle(x)) => {
                let n = *n as u64;
                if i == 0 {
                    BaseVertex::Cycle((x + 1) % n)
                } else {
                    BaseVertex::Cycle((x + n - 1) % n)
                }
            }
            _ => panic!(
                "neighbor: vertex {v:?} is not in the {} family",
                self.family_name()
            ),
        }
    }

    /// All neighbours of `v` in canonical (sorted) order.
    pub fn neighbors(&self, v: &BaseVertex) -> Result<Vec<BaseVertex>> {
        self.check(v)?;
        let mut out: Vec<BaseVertex> = (0..self.degree()).map(|i| self.neighbor(v, i)).collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Exact geodesic distance.
    pub fn distance(&self, u: &BaseVertex, v: &BaseVertex) -> Result<u64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.distance_unchecked(u, v))
    }

    pub(crate) fn distance_unchecked(&self, u: &BaseVertex, v: &BaseVertex) -> u64 {
        match (self, u, v) {
            (BaseGraph::Lattice { .. }, BaseVertex::Lattice(a), BaseVertex::Lattice(b)) => {
                a.iter().zip(b.iter()).map(|(x, y)| x.abs_diff(*y)).sum()
            }
            (BaseGraph::HomTree { .. }, BaseVertex::Tree(a), BaseVertex::Tree(b)) => {
                let c = common_prefix(a, b);
                (a.len() + b.len() - 2 * c) as u64
            }
            (BaseGraph::Oriented { .. }, _, _) => {
                let m = oriented_meet(u, v);
                (oriented_height(u) + oriented_height(v) - 2 * oriented_height(&m)) as u64
            }
            (BaseGraph::Cycle { n }, BaseVertex::Cycle(a), BaseVertex::Cycle(b)) => {
                let d = a.abs_diff(*b);
                d.min(*n as u64 - d)
            }
            _ => panic!(
                "distance: vertices {u:?}, {v:?} are not in the {} family",
                self.family_name()
            ),
        }
    }

    fn require_oriented(&self, op: &str) -> Result<()> {
        match self {
            BaseGraph::Oriented { .. } => Ok(()),
            _ => Err(Error::FamilyMismatch(format!(
                "{op} is only defined on the oriented tree, not on {}",
                self.family_name()
            ))),
        }
    }

    /// Height (generation number) relative to the fixed end: `h(o) = 0`,
    /// decreasing by one towards the father.
    pub fn height(&self, x: &BaseVertex) -> Result<i64> {
        self.require_oriented("height")?;
        self.check(x)?;
        Ok(oriented_height(x))
    }

    /// First common vertex of the geodesic rays from `x` and `y` to `ω`.
    pub fn meet(&self, x: &BaseVertex, y: &BaseVertex) -> Result<BaseVertex> {
        self.require_oriented("meet")?;
        self.check(x)?;
        self.check(y)?;
        Ok(oriented_meet(x, y))
    }

    pub fn father(&self, x: &BaseVertex) -> Result<BaseVertex> {
        self.require_oriented("father")?;
        self.check(x)?;
        Ok(oriented_father(x))
    }

    pub fn sons(&self, x: &BaseVertex) -> Result<Vec<BaseVertex>> {
        self.require_oriented("sons")?;
        self.check(x)?;
        let q = self.degree() - 1;
        Ok((0..q).map(|j| oriented_son(x, j as u8)).collect())
    }

    /// Shifts a lattice vertex by `shift`.
    pub fn translate(&self, v: &BaseVertex, shift: &[i64]) -> Result<BaseVertex> {
        let d = match self {
            BaseGraph::Lattice { d } => *d,
            _ => {
                return Err(Error::FamilyMismatch(format!(
                    "translations act on lattices only, not on {}",
                    self.family_name()
                )))
            }
        };
        if shift.len() != d {
            return Err(Error::Parameter(format!(
                "shift has {} coordinates, lattice has {d}",
                shift.len()
            )));
        }
        self.check(v)?;
        match v {
            BaseVertex::Lattice(c) => Ok(BaseVertex::Lattice(
                c.iter().zip(shift).map(|(a, b)| a + b).collect(),
            )),
            _ => unreachable!(),
        }
    }

    /// Breadth-first ball of the given radius around `center`, in BFS order.
    pub fn ball(&self, center: &BaseVertex, radius: u64) -> Result<Vec<BaseVertex>> {
        self.check(center)?;
        let mut seen: HashSet<BaseVertex> = HashSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        seen.insert(center.clone());
        queue.push_back((center.clone(), 0u64));
        while let Some((v, r)) = queue.pop_front() {
            if r < radius {
                for i in 0..self.degree() {
                    let w = self.neighbor(&v, i);
                    if seen.insert(w.clone()) {
                        queue.push_back((w, r + 1));
                    }
                }
            }
            out.push(v);
        }
        Ok(out)
    }
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

fn oriented_parts(v: &BaseVertex) -> (u64, &[u8]) {
    match v {
        BaseVertex::Oriented { spine, descent } => (*spine, descent),
        _ => panic!("expected an oriented-tree vertex, got {v:?}"),
    }
}

pub(crate) fn oriented_height(v: &BaseVertex) -> i64 {
    let (k, ds) = oriented_parts(v);
    ds.len() as i64 - k as i64
}

pub(crate) fn oriented_father(v: &BaseVertex) -> BaseVertex {
    let (k, ds) = oriented_parts(v);
    if ds.is_empty() {
        BaseVertex::oriented(k + 1, Vec::new())
    } else {
        BaseVertex::oriented(k, ds[..ds.len() - 1].to_vec())
    }
}

pub(crate) fn oriented_son(v: &BaseVertex, j: u8) -> BaseVertex {
    let (k, ds) = oriented_parts(v);
    if k >= 1 && ds.is_empty() && j == 0 {
        BaseVertex::oriented(k - 1, Vec::new())
    } else {
        let mut d = ds.to_vec();
        d.push(j);
        BaseVertex::oriented(k, d)
    }
}

pub(crate) fn oriented_meet(x: &BaseVertex, y: &BaseVertex) -> BaseVertex {
    let (kx, dx) = oriented_parts(x);
    let (ky, dy) = oriented_parts(y);
    if kx == ky {
        let c = common_prefix(dx, dy);
        BaseVertex::oriented(kx, dx[..c].to_vec())
    } else {
        BaseVertex::oriented(kx.max(ky), Vec::new())
    }
}
