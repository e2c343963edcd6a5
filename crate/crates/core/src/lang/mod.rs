//! Edge-labelled digraphs read as automata: determinism and connectivity
//! certificates, forbidden-factor restriction, word counts and entropy.

mod automaton;
mod entropy;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::DenseMatrix;

pub use automaton::{restrict, FactorAutomaton, FactorSet, Restriction};
pub use entropy::{
    certify, count_sequence, count_words, entropy, entropy_spectral_identity_check,
    growth_sensitivity_report, restricted_entropy, restricted_rho, restricted_row_sums,
    substochastic_bound_check, uniform_weighting, Certification, EntropyEstimate, GrowthReport,
    IdentityCheck, PairEntropy, RestrictedRho, SubstochasticReport, WeightedGraph,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub source: usize,
    /// Index into the alphabet.
    pub label: usize,
    pub target: usize,
}

/// Finite directed graph with edges labelled by single characters.
///
/// JSON form: `{"vertices": n, "alphabet": ["a","b"], "edges": [[0,"a",1], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDigraph", into = "RawDigraph")]
pub struct LabeledDigraph {
    vertices: usize,
    alphabet: Vec<char>,
    edges: Vec<Edge>,
    out: Vec<Vec<(usize, usize)>>,
}

#[derive(Serialize, Deserialize)]
struct RawDigraph {
    vertices: usize,
    alphabet: Vec<String>,
    edges: Vec<(usize, String, usize)>,
}

fn one_char(s: &str) -> Result<char> {
    let mut it = s.chars();
    match (it.next(), it.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(Error::Parse(format!(
            "labels must be single characters, got {s:?}"
        ))),
    }
}

impl TryFrom<RawDigraph> for LabeledDigraph {
    type Error = Error;

    fn try_from(raw: RawDigraph) -> Result<Self> {
        let alphabet = raw
            .alphabet
            .iter()
            .map(|s| one_char(s))
            .collect::<Result<Vec<_>>>()?;
        let edges = raw
            .edges
            .into_iter()
            .map(|(s, l, t)| Ok((s, one_char(&l)?, t)))
            .collect::<Result<Vec<_>>>()?;
        LabeledDigraph::new(raw.vertices, alphabet, edges)
    }
}

impl From<LabeledDigraph> for RawDigraph {
    fn from(g: LabeledDigraph) -> Self {
        RawDigraph {
            vertices: g.vertices,
            alphabet: g.alphabet.iter().map(|c| c.to_string()).collect(),
            edges: g
                .edges
                .iter()
                .map(|e| (e.source, g.alphabet[e.label].to_string(), e.target))
                .collect(),
        }
    }
}

impl LabeledDigraph {
    pub fn new(
        vertices: usize,
        alphabet: Vec<char>,
        edges: Vec<(usize, char, usize)>,
    ) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::Parameter("graph needs at least one vertex".into()));
        }
        if alphabet.is_empty() || alphabet.iter().collect::<BTreeSet<_>>().len() != alphabet.len() {
            return Err(Error::Parameter(
                "alphabet must be nonempty with distinct letters".into(),
            ));
        }
        let mut list = Vec::with_capacity(edges.len());
        for (s, c, t) in edges {
            if s >= vertices || t >= vertices {
                return Err(Error::Parameter(format!(
                    "edge ({s},{c:?},{t}) has a vertex outside 0..{vertices}"
                )));
            }
            let label = alphabet
                .iter()
                .position(|&a| a == c)
                .ok_or_else(|| Error::Parameter(format!("label {c:?} is not in the alphabet")))?;
            list.push(Edge {
                source: s,
                label,
                target: t,
            });
        }
        list.sort();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            let e = w[0];
            return Err(Error::Parameter(format!(
                "duplicate edge ({},{:?},{})",
                e.source, alphabet[e.label], e.target
            )));
        }
        Ok(Self::from_sorted(vertices, alphabet, list))
    }

    fn from_sorted(vertices: usize, alphabet: Vec<char>, edges: Vec<Edge>) -> Self {
        let mut out = vec![Vec::new(); vertices];
        for e in &edges {
            out[e.source].push((e.label, e.target));
        }
        Self {
            vertices,
            alphabet,
            edges,
            out,
        }
    }

    /// Graph on one vertex with a loop for every letter.
    pub fn full_shift(alphabet: Vec<char>) -> Result<Self> {
        let edges = alphabet.iter().map(|&c| (0, c, 0)).collect();
        Self::new(1, alphabet, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(label, target)` pairs leaving `v`, sorted.
    pub fn out_edges(&self, v: usize) -> &[(usize, usize)] {
        &self.out[v]
    }

    pub fn label_index(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == c)
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.edges.binary_search(e).ok()
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertices {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "vertex {v} out of range 0..{}",
                self.vertices
            )))
        }
    }

    /// `A[x][y]` = number of edges from `x` to `y`.
    pub fn count_matrix(&self) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(self.vertices);
        for e in &self.edges {
            a.set(e.source, e.target, a.get(e.source, e.target) + 1.0);
        }
        a
    }

    pub(crate) fn successors(&self) -> Vec<Vec<usize>> {
        self.out
            .iter()
            .map(|o| o.iter().map(|&(_, t)| t).collect())
            .collect()
    }

    pub(crate) fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut p = vec![Vec::new(); self.vertices];
        for e in &self.edges {
            p[e.target].push(e.source);
        }
        p
    }

    /// At most one out-edge per (vertex, label).
    pub fn is_deterministic(&self) -> bool {
        self.out
            .iter()
            .all(|o| o.windows(2).all(|w| w[0].0 != w[1].0))
    }

    /// Exactly one out-edge per (vertex, label).
    pub fn is_fully_deterministic(&self) -> bool {
        self.is_deterministic() && self.out.iter().all(|o| o.len() == self.alphabet.len())
    }

    pub fn is_strongly_connected(&self) -> bool {
        let all = |d: Vec<Option<usize>>| d.iter().all(Option::is_some);
        all(bfs(&self.successors(), &[0])) && all(bfs(&self.predecessors(), &[0]))
    }

    /// Smallest `K` such that every edge `x -> y` has a return path `y -> x`
    /// of length at most `K`, or `None` if that exceeds `k_max` or some edge
    /// has no return path.
    pub fn uniform_connectedness(&self, k_max: usize) -> Option<usize> {
        let succ = self.successors();
        let dist: Vec<Vec<Option<usize>>> = (0..self.vertices).map(|v| bfs(&succ, &[v])).collect();
        let mut k = 0;
        for e in &self.edges {
            k = k.max(dist[e.target][e.source]?);
        }
        (k <= k_max).then_some(k)
    }

    /// Length of a shortest directed path from `x` to `y`.
    pub fn forward_distance(&self, x: usize, y: usize) -> Result<usize> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        bfs(&self.successors(), &[x])[y].ok_or(Error::Unreachable { from: x, to: y })
    }

    /// Vertices from which some word of `words` can be read along a path.
    pub(crate) fn spelling_starts(&self, words: &[Vec<usize>]) -> Vec<bool> {
        let mut starts = vec![false; self.vertices];
        for w in words {
            let mut ok = vec![true; self.vertices];
            for &a in w.iter().rev() {
                let mut prev = vec![false; self.vertices];
                for e in &self.edges {
                    if e.label == a && ok[e.target] {
                        prev[e.source] = true;
                    }
                }
                ok = prev;
            }
            for (s, o) in starts.iter_mut().zip(ok) {
                *s |= o;
            }
        }
        starts
    }

    /// Smallest `D` such that from every vertex some word of `f` is spellable
    /// from a vertex at forward distance at most `D`; `None` beyond `d_max`.
    pub fn relative_denseness(&self, f: &FactorSet, d_max: usize) -> Result<Option<usize>> {
        let words = f.indices(&self.alphabet)?;
        let starts: Vec<usize> = self
            .spelling_starts(&words)
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(v, _)| v)
            .collect();
        let dist = bfs(&self.predecessors(), &starts);
        let mut d = 0;
        for x in dist {
            match x {
                Some(x) => d = d.max(x),
                None => return Ok(None),
            }
        }
        Ok((d <= d_max).then_some(d))
    }

    /// gcd of cycle lengths of a strongly connected graph (0 without edges).
    pub fn period(&self) -> usize {
        let level = bfs(&self.successors(), &[0]);
        let mut d = 0;
        for e in &self.edges {
            if let (Some(a), Some(b)) = (level[e.source], level[e.target]) {
                d = gcd(d, (a + 1).abs_diff(b));
            }
        }
        d
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Multi-source BFS distances.
pub(crate) fn bfs(adj: &[Vec<usize>], sources: &[usize]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Strongly connected component id of every vertex (Kosaraju, iterative).
pub(crate) fn components(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![(s, 0usize)];
        while let Some(&mut (u, ref mut i)) = stack.last_mut() {
            if *i < adj[u].len() {
                let v = adj[u][*i];
                *i += 1;
                if !seen[v] {
                    seen[v] = true;
                    stack.push((v, 0));
                }
            } else {
                order.push(u);
                stack.pop();
            }
        }
    }
    let mut radj = vec![Vec::new(); n];
    for (u, vs) in adj.iter().enumerate() {
        for &v in vs {
            radj[v].push(u);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &s in order.iter().rev() {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &radj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    stack.push(v);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Vertices x, y, z, t = 0, 1, 2, 3.
    pub(crate) fn example_graph() -> LabeledDigraph {
        LabeledDigraph::new(
            4,
            vec!['a', 'b'],
            vec![
                (0, 'a', 2),
                (1, 'a', 2),
                (2, 'a', 2),
                (2, 'b', 3),
                (3, 'a', 0),
                (0, 'b', 3),
                (3, 'b', 1),
                (1, 'b', 3),
            ],
        )
        .unwrap()
    }

    fn cycle(n: usize) -> LabeledDigraph {
        LabeledDigraph::new(
            n,
            vec!['a'],
            (0..n).map(|i| (i, 'a', (i + 1) % n)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(LabeledDigraph::new(0, vec!['a'], vec![]).is_err());
        assert!(LabeledDigraph::new(1, vec!['a', 'a'], vec![]).is_err());
        assert!(LabeledDigraph::new(1, vec!['a'], vec![(0, 'b', 0)]).is_err());
        assert!(LabeledDigraph::new(1, vec!['a'], vec![(0, 'a', 1)]).is_err());
        assert!(LabeledDigraph::new(1, vec!['a'], vec![(0, 'a', 0), (0, 'a', 0)]).is_err());
        assert!(LabeledDigraph::new(2, vec!['a', 'b'], vec![(0, 'a', 1), (0, 'b', 1)]).is_ok());
    }

    #[test]
    fn json_roundtrip() {
        let g = example_graph();
        let s = serde_json::to_string(&g).unwrap();
        let back: LabeledDigraph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let parsed: LabeledDigraph = serde_json::from_str(
            r#"{"vertices":1,"alphabet":["0","1"],"edges":[[0,"0",0],[0,"1",0]]}"#,
        )
        .unwrap();
        assert!(parsed.is_fully_deterministic());
        assert!(serde_json::from_str::<LabeledDigraph>(
            r#"{"vertices":1,"alphabet":["ab"],"edges":[]}"#
        )
        .is_err());
    }

    #[test]
    fn determinism() {
        let full = LabeledDigraph::full_shift(vec!['a', 'b']).unwrap();
        assert!(full.is_fully_deterministic());
        let g = example_graph();
        assert!(g.is_deterministic());
        assert!(g.is_fully_deterministic());
        let mut e: Vec<(usize, char, usize)> = g
            .edges()
            .iter()
            .map(|e| (e.source, g.alphabet()[e.label], e.target))
            .collect();
        e.push((0, 'a', 1));
        assert!(!LabeledDigraph::new(4, vec!['a', 'b'], e)
            .unwrap()
            .is_deterministic());
    }

    #[test]
    fn connectivity() {
        assert_eq!(cycle(2).uniform_connectedness(10), Some(1));
        assert_eq!(cycle(5).uniform_connectedness(10), Some(4));
        assert_eq!(cycle(5).uniform_connectedness(3), None);
        let g = example_graph();
        assert!(g.is_strongly_connected());
        assert!(g.uniform_connectedness(g.vertex_count()).unwrap() <= 4);
        let path = LabeledDigraph::new(2, vec!['a'], vec![(0, 'a', 1)]).unwrap();
        assert!(!path.is_strongly_connected());
        assert_eq!(path.uniform_connectedness(10), None);
    }

    #[test]
    fn distances() {
        let g = example_graph();
        assert_eq!(g.forward_distance(0, 0).unwrap(), 0);
        assert_eq!(g.forward_distance(0, 1).unwrap(), 2);
        assert_eq!(cycle(2).forward_distance(0, 1).unwrap(), 1);
        assert_eq!(cycle(2).forward_distance(1, 0).unwrap(), 1);
        let path = LabeledDigraph::new(2, vec!['a'], vec![(0, 'a', 1)]).unwrap();
        assert_eq!(
            path.forward_distance(1, 0),
            Err(Error::Unreachable { from: 1, to: 0 })
        );
    }

    #[test]
    fn denseness() {
        let full = LabeledDigraph::full_shift(vec!['a', 'b']).unwrap();
        assert_eq!(
            full.relative_denseness(&FactorSet::parse("ab").unwrap(), 0)
                .unwrap(),
            Some(0)
        );
        // only vertex 2 starts an "ab" path on the 4-cycle 0->1->2->3->0
        let g = LabeledDigraph::new(
            4,
            vec!['a', 'b'],
            vec![(0, 'b', 1), (1, 'b', 2), (2, 'a', 3), (3, 'b', 0)],
        )
        .unwrap();
        assert_eq!(
            g.relative_denseness(&FactorSet::parse("ab").unwrap(), 5)
                .unwrap(),
            Some(3)
        );
        assert_eq!(
            g.relative_denseness(&FactorSet::parse("ab").unwrap(), 2)
                .unwrap(),
            None
        );
        let absent = LabeledDigraph::new(1, vec!['a', 'c'], vec![(0, 'a', 0)]).unwrap();
        assert_eq!(
            absent
                .relative_denseness(&FactorSet::parse("c").unwrap(), 100)
                .unwrap(),
            None
        );
        assert!(absent
            .relative_denseness(&FactorSet::parse("z").unwrap(), 100)
            .is_err());
    }

    #[test]
    fn periods() {
        assert_eq!(cycle(3).period(), 3);
        assert_eq!(example_graph().period(), 1);
        assert_eq!(
            LabeledDigraph::new(1, vec!['a'], vec![]).unwrap().period(),
            0
        );
    }

    #[test]
    fn component_ids() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let c = components(&adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[2], c[3]);
        assert_ne!(c[0], c[2]);
        assert_ne!(c[4], c[0]);
        assert_ne!(c[4], c[2]);
    }
}
