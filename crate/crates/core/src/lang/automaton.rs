use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Edge, LabeledDigraph};
use crate::error::{Error, Result};

/// Finite nonempty set of nonempty forbidden words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct FactorSet {
    words: Vec<Vec<char>>,
}

impl TryFrom<Vec<String>> for FactorSet {
    type Error = Error;

    fn try_from(words: Vec<String>) -> Result<Self> {
        FactorSet::new(words)
    }
}

impl From<FactorSet> for Vec<String> {
    fn from(f: FactorSet) -> Self {
        f.words.iter().map(|w| w.iter().collect()).collect()
    }
}

impl FactorSet {
    pub fn new<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set: BTreeSet<Vec<char>> = words
            .into_iter()
            .map(|w| w.as_ref().chars().collect())
            .collect();
        if set.is_empty() {
            return Err(Error::Parameter("forbidden set must be nonempty".into()));
        }
        if set.contains(&Vec::new()) {
            return Err(Error::Parameter(
                "the empty word cannot be forbidden".into(),
            ));
        }
        Ok(Self {
            words: set.into_iter().collect(),
        })
    }

    /// Comma-separated words, e.g. `"11,010"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.split(',').map(str::trim))
    }

    pub fn words(&self) -> &[Vec<char>] {
        &self.words
    }

    /// Length of the longest forbidden word.
    pub fn max_len(&self) -> usize {
        self.words.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Words as alphabet indices; every letter must belong to `alphabet`.
    pub fn indices(&self, alphabet: &[char]) -> Result<Vec<Vec<usize>>> {
        self.words
            .iter()
            .map(|w| {
                w.iter()
                    .map(|c| {
                        alphabet.iter().position(|a| a == c).ok_or_else(|| {
                            Error::Parameter(format!(
                                "forbidden letter {c:?} is not in the alphabet"
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    }
}

/// Complete deterministic automaton over `0..sigma` reading a word letter by
/// letter; a state is dead once some forbidden word has occurred as a factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorAutomaton {
    delta: Vec<Vec<usize>>,
    dead: Vec<bool>,
}

impl FactorAutomaton {
    pub const ROOT: usize = 0;

    /// Aho-Corasick construction: trie of the words plus failure links,
    /// flattened into a complete transition table.
    pub fn build(words: &[Vec<usize>], sigma: usize) -> Self {
        let mut child: Vec<Vec<Option<usize>>> = vec![vec![None; sigma]];
        let mut dead = vec![false];
        for w in words {
            let mut s = Self::ROOT;
            for &a in w {
                s = match child[s][a] {
                    Some(c) => c,
                    None => {
                        child.push(vec![None; sigma]);
                        dead.push(false);
                        child[s][a] = Some(child.len() - 1);
                        child.len() - 1
                    }
                };
            }
            dead[s] = true;
        }
        let n = child.len();
        let mut delta = vec![vec![Self::ROOT; sigma]; n];
        let mut fail = vec![Self::ROOT; n];
        let mut queue = VecDeque::from([Self::ROOT]);
        while let Some(u) = queue.pop_front() {
            for a in 0..sigma {
                match child[u][a] {
                    Some(c) => {
                        fail[c] = if u == Self::ROOT {
                            Self::ROOT
                        } else {
                            delta[fail[u]][a]
                        };
                        dead[c] |= dead[fail[c]];
                        delta[u][a] = c;
                        queue.push_back(c);
                    }
                    None => {
                        delta[u][a] = if u == Self::ROOT {
                            Self::ROOT
                        } else {
                            delta[fail[u]][a]
                        }
                    }
                }
            }
        }
        Self { delta, dead }
    }

    pub fn state_count(&self) -> usize {
        self.delta.len()
    }

    pub fn step(&self, s: usize, a: usize) -> usize {
        self.delta[s][a]
    }

    pub fn is_safe(&self, s: usize) -> bool {
        !self.dead[s]
    }

    /// Whether `word` avoids every forbidden factor.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut s = Self::ROOT;
        for &a in word {
            s = self.step(s, a);
            if self.dead[s] {
                return false;
            }
        }
        true
    }
}

/// Product of a labelled graph with the factor automaton of `F`: paths from
/// `start(x)` into `ends(y)` spell exactly the words of `L_{x,y}` with no
/// factor in `F`.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub graph: LabeledDigraph,
    /// `(base vertex, automaton state)` of each product vertex.
    pub pairs: Vec<(usize, usize)>,
    /// Base edge index of each product edge.
    pub base_edge: Vec<usize>,
    pub automaton: FactorAutomaton,
    safe: usize,
    root_rank: usize,
}

impl Restriction {
    pub fn start(&self, x: usize) -> usize {
        x * self.safe + self.root_rank
    }

    pub fn ends(&self, y: usize) -> std::ops::Range<usize> {
        y * self.safe..(y + 1) * self.safe
    }

    /// Number of base vertices.
    pub fn base_vertices(&self) -> usize {
        self.pairs.len() / self.safe
    }
}

pub fn restrict(g: &LabeledDigraph, f: &FactorSet) -> Result<Restriction> {
    let words = f.indices(g.alphabet())?;
    let automaton = FactorAutomaton::build(&words, g.alphabet().len());
    let mut rank = vec![None; automaton.state_count()];
    let mut safe = 0;
    for (s, r) in rank.iter_mut().enumerate() {
        if automaton.is_safe(s) {
            *r = Some(safe);
            safe += 1;
        }
    }
    let n = g.vertex_count();
    let mut pairs = Vec::with_capacity(n * safe);
    for v in 0..n {
        for s in 0..automaton.state_count() {
            if automaton.is_safe(s) {
                pairs.push((v, s));
            }
        }
    }
    let mut edges = Vec::new();
    for (i, &(v, s)) in pairs.iter().enumerate() {
        for &(a, t) in g.out_edges(v) {
            if let Some(r) = rank[automaton.step(s, a)] {
                edges.push(Edge {
                    source: i,
                    label: a,
                    target: t * safe + r,
                });
            }
        }
    }
    edges.sort();
    let base_edge = edges
        .iter()
        .map(|e| {
            let b = Edge {
                source: pairs[e.source].0,
                label: e.label,
                target: pairs[e.target].0,
            };
            g.edge_index(&b)
                .expect("product edge projects onto a base edge")
        })
        .collect();
    let root_rank = rank[FactorAutomaton::ROOT].expect("root is safe since F has no empty word");
    Ok(Restriction {
        graph: LabeledDigraph::from_sorted(n * safe, g.alphabet().to_vec(), edges),
        pairs,
        base_edge,
        automaton,
        safe,
        root_rank,
    })
}
