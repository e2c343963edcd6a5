#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{HashSet, VecDeque};

use lampwalk::lang::{certify, FactorSet, LabeledDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LETTERS: [char; 3] = ['a', 'b', 'c'];

/// Example graph with vertices x, y, z, t = 0..3.
pub fn example_graph() -> LabeledDigraph {
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

/// Random deterministic strongly connected graph with at most 6 vertices
/// over at most 3 letters.
pub fn random_graph(rng: &mut ChaCha8Rng) -> LabeledDigraph {
    loop {
        let n = rng.random_range(1..=6);
        let sigma = rng.random_range(1..=3);
        let density = rng.random_range(0.4..=1.0);
        let mut edges = Vec::new();
        for v in 0..n {
            for &a in &LETTERS[..sigma] {
                if rng.random_bool(density) {
                    edges.push((v, a, rng.random_range(0..n)));
                }
            }
        }
        let g = LabeledDigraph::new(n, LETTERS[..sigma].to_vec(), edges).unwrap();
        if !g.edges().is_empty() && g.is_strongly_connected() {
            return g;
        }
    }
}

pub fn corpus(seed: u64, count: usize) -> Vec<LabeledDigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_graph(&mut rng)).collect()
}

/// Random graphs paired with forbidden sets that pass certification.
pub fn certified_instances(seed: u64, count: usize) -> Vec<(LabeledDigraph, FactorSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let g = random_graph(&mut rng);
        let sigma = g.alphabet().len();
        let words: Vec<String> = (0..rng.random_range(1..=2))
            .map(|_| {
                (0..rng.random_range(1..=3))
                    .map(|_| LETTERS[rng.random_range(0..sigma)])
                    .collect()
            })
            .collect();
        let f = FactorSet::new(words).unwrap();
        if certify(&g, &f).unwrap().passed() {
            out.push((g, f));
        }
    }
    out
}

/// `counts[y][n]` = number of label paths of length `n` from `x` to `y`
/// whose word has no factor in `forbidden`, by depth-first enumeration.
pub fn brute_force_counts(
    g: &LabeledDigraph,
    forbidden: &[Vec<char>],
    x: usize,
    n_max: usize,
) -> Vec<Vec<u128>> {
    fn dfs(
        g: &LabeledDigraph,
        forbidden: &[Vec<char>],
        v: usize,
        word: &mut Vec<char>,
        n_max: usize,
        counts: &mut Vec<Vec<u128>>,
    ) {
        counts[v][word.len()] += 1;
        if word.len() == n_max {
            return;
        }
        for &(a, t) in g.out_edges(v) {
            word.push(g.alphabet()[a]);
            if !forbidden.iter().any(|w| word.ends_with(w)) {
                dfs(g, forbidden, t, word, n_max, counts);
            }
            word.pop();
        }
    }
    let mut counts = vec![vec![0u128; n_max + 1]; g.vertex_count()];
    dfs(g, forbidden, x, &mut Vec::new(), n_max, &mut counts);
    counts
}

/// Exact `P[X_n = 0, all lamps off]` for switch-walk-switch with uniform lamps
/// over simple random walk on Z, by enumerating moves and lamp coins.
pub fn sws_return_exact(n: usize) -> f64 {
    let mut hits = 0u64;
    for moves in 0u32..(1 << n) {
        let mut positions = vec![0i64];
        for i in 0..n {
            let p = positions[i] + if moves >> i & 1 == 1 { 1 } else { -1 };
            positions.push(p);
        }
        if positions[n] != 0 {
            continue;
        }
        for coins in 0u64..(1 << (2 * n)) {
            let mut lit: HashSet<i64> = HashSet::new();
            let mut toggle = |v: i64, c: bool| {
                if c && !lit.remove(&v) {
                    lit.insert(v);
                }
            };
            for i in 0..n {
                toggle(positions[i], coins >> (2 * i) & 1 == 1);
                toggle(positions[i + 1], coins >> (2 * i + 1) & 1 == 1);
            }
            if lit.is_empty() {
                hits += 1;
            }
        }
    }
    hits as f64 / (1u64 << (3 * n)) as f64
}

/// Exact `E[exp(-t R_n)]` for simple random walk on Z with
/// `R_n = |{X_1, ..., X_n}|`, truncating ranges above `r_max`.
pub fn laplace_range_exact(t: f64, n: usize, r_max: usize) -> f64 {
    // walk of n-1 steps started at X_1, state (pos - min, max - pos)
    let steps = n - 1;
    let mut cur = vec![vec![0.0f64; r_max + 2]; r_max + 2];
    cur[0][0] = 1.0;
    for _ in 0..steps {
        let mut next = vec![vec![0.0f64; r_max + 2]; r_max + 2];
        for a in 0..=r_max {
            for b in 0..=r_max - a {
                let p = cur[a][b];
                if p == 0.0 {
                    continue;
                }
                // up
                let (na, nb) = if b == 0 { (a + 1, 0) } else { (a + 1, b - 1) };
                if na + nb <= r_max {
                    next[na][nb] += 0.5 * p;
                }
                // down
                let (na, nb) = if a == 0 { (0, b + 1) } else { (a - 1, b + 1) };
                if na + nb <= r_max {
                    next[na][nb] += 0.5 * p;
                }
            }
        }
        cur = next;
    }
    let mut total = 0.0;
    for (a, row) in cur.iter().enumerate() {
        for (b, &p) in row.iter().enumerate() {
            total += p * (-t * (a + b + 1) as f64).exp();
        }
    }
    total
}

/// BFS distances on Z2 wr Z restricted to positions and lamps in
/// `[-w, w]`; states are `(position, lamp mask)` with bit `i` for site `i - w`.
pub fn window_bfs(w: i64, from: (i64, u32)) -> Vec<Vec<Option<usize>>> {
    let width = (2 * w + 1) as usize;
    let mut dist = vec![vec![None; 1 << width]; width];
    let idx = |p: i64| (p + w) as usize;
    dist[idx(from.0)][from.1 as usize] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some((p, m)) = queue.pop_front() {
        let d = dist[idx(p)][m as usize].unwrap();
        let mut next = vec![(p, m ^ (1 << idx(p)))];
        if p > -w {
            next.push((p - 1, m));
        }
        if p < w {
            next.push((p + 1, m));
        }
        for (q, k) in next {
            if dist[idx(q)][k as usize].is_none() {
                dist[idx(q)][k as usize] = Some(d + 1);
                queue.push_back((q, k));
            }
        }
    }
    dist
}

/// Cut times by definition: past and future vertex sets are disjoint.
pub fn is_cut_time<T: std::hash::Hash + Eq>(path: &[T], n: usize) -> bool {
    let past: HashSet<&T> = path[..=n].iter().collect();
    path[n + 1..].iter().all(|v| !past.contains(v))
}
