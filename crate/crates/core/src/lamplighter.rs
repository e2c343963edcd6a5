//! The lamplighter graph `Z_2 ≀ G` over a base graph `G`.
//!
//! A state is a finitely supported lamp configuration together with the
//! lamplighter's position. Two states are adjacent when the lamplighter moves
//! along an edge of `G` with the configuration untouched, or stays put and
//! flips the lamp at its position.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BaseGraph, BaseVertex};
use crate::tour;

/// Finitely supported `{0,1}`-valued function on base vertices, stored as its
/// sorted support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LampConfiguration {
    support: BTreeSet<BaseVertex>,
}

impl LampConfiguration {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(v: BaseVertex) -> Self {
        Self {
            support: BTreeSet::from([v]),
        }
    }

    pub fn is_on(&self, v: &BaseVertex) -> bool {
        self.support.contains(v)
    }

    pub fn value(&self, v: &BaseVertex) -> u8 {
        u8::from(self.is_on(v))
    }

    pub fn flip(&mut self, v: &BaseVertex) {
        if !self.support.remove(v) {
            self.support.insert(v.clone());
        }
    }

    pub fn support(&self) -> &BTreeSet<BaseVertex> {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        Self {
            support: self
                .support
                .symmetric_difference(&other.support)
                .cloned()
                .collect(),
        }
    }
}

impl FromIterator<BaseVertex> for LampConfiguration {
    /// Builds the configuration lit at the given vertices (duplicates collapse).
    fn from_iter<I: IntoIterator<Item = BaseVertex>>(iter: I) -> Self {
        Self {
            support: iter.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LamplighterState {
    pub position: BaseVertex,
    pub lamps: LampConfiguration,
}

impl LamplighterState {
    pub fn new(lamps: LampConfiguration, position: BaseVertex) -> Self {
        Self { position, lamps }
    }

    /// All lamps off, lamplighter at `position`.
    pub fn at(position: BaseVertex) -> Self {
        Self {
            position,
            lamps: LampConfiguration::empty(),
        }
    }
}

/// How to solve the travelling-salesman subproblem of the metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TourMode {
    /// Exact when the symmetric difference has at most
    /// [`tour::EXACT_LIMIT`] vertices, heuristic beyond.
    Auto,
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LampDistance {
    pub value: u64,
    /// `false` when `value` is only an upper bound.
    pub exact: bool,
}

/// Symmetric difference of two configurations.
pub fn symmetric_difference(a: &LampConfiguration, b: &LampConfiguration) -> LampConfiguration {
    a.symmetric_difference(b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LamplighterGraph {
    pub base: BaseGraph,
}

impl LamplighterGraph {
    pub fn new(base: BaseGraph) -> Self {
        Self { base }
    }

    pub fn origin(&self) -> LamplighterState {
        LamplighterState::at(self.base.origin())
    }

    pub fn check(&self, s: &LamplighterState) -> Result<()> {
        let lift = |e: Error| match e {
            Error::FamilyMismatch(m) => Error::GraphMismatch(m),
            other => other,
        };
        self.base.check(&s.position).map_err(lift)?;
        for v in s.lamps.support() {
            self.base.check(v).map_err(lift)?;
        }
        Ok(())
    }

    pub fn is_adjacent(&self, s: &LamplighterState, t: &LamplighterState) -> Result<bool> {
        self.check(s)?;
        self.check(t)?;
        if s.lamps == t.lamps {
            return Ok(self.base.distance_unchecked(&s.position, &t.position) == 1);
        }
        if s.position != t.position {
            return Ok(false);
        }
        let diff = s.lamps.symmetric_difference(&t.lamps);
        Ok(diff.len() == 1 && diff.is_on(&s.position))
    }

    /// Move-neighbours followed by the single switch-neighbour, in canonical
    /// state order.
    pub fn neighbors(&self, s: &LamplighterState) -> Result<Vec<LamplighterState>> {
        self.check(s)?;
        let mut out: Vec<LamplighterState> = self
            .base
            .neighbors(&s.position)?
            .into_iter()
            .map(|p| LamplighterState::new(s.lamps.clone(), p))
            .collect();
        let mut lamps = s.lamps.clone();
        lamps.flip(&s.position);
        out.push(LamplighterState::new(lamps, s.position.clone()));
        out.sort();
        Ok(out)
    }

    pub fn distance(&self, s: &LamplighterState, t: &LamplighterState) -> Result<LampDistance> {
        self.distance_with(s, t, TourMode::Auto)
    }

    /// Shortest walk from `s.position` to `t.position` through every vertex
    /// where the configurations differ, plus the number of such vertices.
    pub fn distance_with(
        &self,
        s: &LamplighterState,
        t: &LamplighterState,
        mode: TourMode,
    ) -> Result<LampDistance> {
        self.check(s)?;
        self.check(t)?;
        let diff = s.lamps.symmetric_difference(&t.lamps);
        let mut points = vec![s.position.clone(), t.position.clone()];
        points.extend(diff.support().iter().cloned());
        let dist: Vec<Vec<u64>> = points
            .iter()
            .map(|a| {
                points
                    .iter()
                    .map(|b| self.base.distance_unchecked(a, b))
                    .collect()
            })
            .collect();
        let exact = mode == TourMode::Auto && diff.len() <= tour::EXACT_LIMIT;
        let walk = if diff.is_empty() {
            dist[0][1]
        } else if exact {
            tour::exact_open_tour(&dist)
        } else {
            tour::heuristic_open_tour(&dist)
        };
        Ok(LampDistance {
            value: walk + diff.len() as u64,
            exact: exact || diff.is_empty(),
        })
    }

    /// Action of a lattice translation on the whole state.
    pub fn translate(&self, shift: &[i64], s: &LamplighterState) -> Result<LamplighterState> {
        self.check(s)?;
        let position = self.base.translate(&s.position, shift)?;
        let lamps = s
            .lamps
            .support()
            .iter()
            .map(|v| self.base.translate(v, shift))
            .collect::<Result<LampConfiguration>>()?;
        Ok(LamplighterState::new(lamps, position))
    }

    /// Every state of the lamplighter graph over a finite (cycle) base.
    pub fn enumerate_finite(&self) -> Result<Vec<LamplighterState>> {
        let n = match self.base {
            BaseGraph::Cycle { n } if n <= 16 => n,
            _ => {
                return Err(Error::Parameter(
                    "state enumeration needs a cycle base with at most 16 vertices".into(),
                ))
            }
        };
        let mut out = Vec::with_capacity(n << n);
        for mask in 0u32..(1 << n) {
            let lamps: LampConfiguration = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| BaseVertex::Cycle(i as u64))
                .collect();
            for x in 0..n {
                out.push(LamplighterState::new(
                    lamps.clone(),
                    BaseVertex::Cycle(x as u64),
                ));
            }
        }
        out.sort();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(i: i64) -> BaseVertex {
        BaseVertex::lattice([i])
    }

    fn zlamp() -> LamplighterGraph {
        LamplighterGraph::new(BaseGraph::lattice(1).unwrap())
    }

    #[test]
    fn symmetric_difference_identities() {
        let a: LampConfiguration = [z(1), z(2)].into_iter().collect();
        assert!(symmetric_difference(&a, &a).is_empty());
        let d = LampConfiguration::single(z(0));
        assert_eq!(symmetric_difference(&LampConfiguration::empty(), &d), d);
        let b: LampConfiguration = [z(2), z(3)].into_iter().collect();
        let expect: LampConfiguration = [z(1), z(3)].into_iter().collect();
        assert_eq!(symmetric_difference(&a, &b), expect);
    }

    #[test]
    fn adjacency_cases() {
        let g = zlamp();
        let o = g.origin();
        assert!(g.is_adjacent(&o, &LamplighterState::at(z(1))).unwrap());
        assert!(g
            .is_adjacent(
                &o,
                &LamplighterState::new(LampConfiguration::single(z(0)), z(0))
            )
            .unwrap());
        assert!(!g
            .is_adjacent(
                &o,
                &LamplighterState::new(LampConfiguration::single(z(2)), z(0))
            )
            .unwrap());
        assert!(!g.is_adjacent(&o, &o).unwrap());
    }

    #[test]
    fn mixed_graphs_rejected() {
        let g = zlamp();
        let bad = LamplighterState::at(BaseVertex::Tree(vec![]));
        assert!(matches!(
            g.is_adjacent(&g.origin(), &bad),
            Err(Error::GraphMismatch(_))
        ));
    }

    #[test]
    fn three_neighbors_on_z() {
        let g = zlamp();
        let nb = g.neighbors(&g.origin()).unwrap();
        assert_eq!(nb.len(), 3);
        for t in &nb {
            assert!(g.is_adjacent(&g.origin(), t).unwrap());
        }
    }

    #[test]
    fn distance_examples_on_z() {
        let g = zlamp();
        let o = g.origin();
        assert_eq!(
            g.distance(&o, &LamplighterState::at(z(3))).unwrap(),
            LampDistance {
                value: 3,
                exact: true
            }
        );
        let lit = LamplighterState::new(LampConfiguration::single(z(0)), z(0));
        assert_eq!(g.distance(&o, &lit).unwrap().value, 1);
        let both: LampConfiguration = [z(-1), z(1)].into_iter().collect();
        let d = g.distance(&o, &LamplighterState::new(both, z(0))).unwrap();
        assert_eq!(
            d,
            LampDistance {
                value: 6,
                exact: true
            }
        );
    }

    #[test]
    fn large_difference_falls_back_to_upper_bound() {
        let g = zlamp();
        let lamps: LampConfiguration = (0..15).map(z).collect();
        let d = g
            .distance(&g.origin(), &LamplighterState::new(lamps, z(0)))
            .unwrap();
        assert!(!d.exact);
        assert_eq!(d.value, 14 + 14 + 15);
    }

    #[test]
    fn translation_roundtrip() {
        let g = zlamp();
        let s = LamplighterState::new([z(-2), z(4)].into_iter().collect(), z(1));
        assert_eq!(g.translate(&[0], &s).unwrap(), s);
        let t = g.translate(&[5], &s).unwrap();
        assert_eq!(t.position, z(6));
        assert_eq!(g.translate(&[-5], &t).unwrap(), s);
        let tree = LamplighterGraph::new(BaseGraph::homtree(3).unwrap());
        assert!(matches!(
            tree.translate(&[1], &tree.origin()),
            Err(Error::FamilyMismatch(_))
        ));
    }

    #[test]
    fn state_json_shape() {
        let s = LamplighterState::new(LampConfiguration::single(z(2)), z(1));
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"position": {"lattice": [1]}, "lamps": [{"lattice": [2]}]})
        );
        let back: LamplighterState = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
