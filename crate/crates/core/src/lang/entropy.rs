use std::ops::Range;

use serde::Serialize;

use super::{bfs, components, restrict, FactorSet, LabeledDigraph, Restriction};
use crate::error::{Error, Result};
use crate::kernels::stable_sum;
use crate::spectral::{estimate_from_log_returns, perron, DenseMatrix, SpectralEstimate};

/// Margin by which `h_F` must undercut `h` to count as a strict drop.
pub const STRICT_TOL: f64 = 1e-9;
const IDENTITY_HORIZON: usize = 8192;

fn require_deterministic(g: &LabeledDigraph) -> Result<()> {
    if g.is_deterministic() {
        Ok(())
    } else {
        Err(Error::NotDeterministic(
            "some vertex has two out-edges with the same label".into(),
        ))
    }
}

/// Numbers of paths of length `0..=n_max` from `x` into `targets`.
fn path_counts(
    g: &LabeledDigraph,
    x: usize,
    targets: Range<usize>,
    n_max: usize,
) -> Result<Vec<u128>> {
    let mut v = vec![0u128; g.vertex_count()];
    v[x] = 1;
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            let mut next = vec![0u128; v.len()];
            for e in g.edges() {
                if v[e.source] != 0 {
                    next[e.target] = next[e.target]
                        .checked_add(v[e.source])
                        .ok_or(Error::Overflow(n))?;
                }
            }
            v = next;
        }
        let mut total = 0u128;
        for &c in &v[targets.clone()] {
            total = total.checked_add(c).ok_or(Error::Overflow(n))?;
        }
        out.push(total);
    }
    Ok(out)
}

/// `log` of the weighted path mass of length `0..=n_max` from the
/// distribution `init` into `targets` (`-inf` where zero), renormalising at
/// every step.
fn log_masses(
    g: &LabeledDigraph,
    weights: Option<&[f64]>,
    init: Vec<f64>,
    targets: Range<usize>,
    n_max: usize,
) -> Vec<f64> {
    let mut v = init;
    let mut log_scale = 0.0;
    let mut out = Vec::with_capacity(n_max + 1);
    let at_targets = |v: &[f64], log_scale: f64| {
        let m = stable_sum(v[targets.clone()].iter().copied());
        if m > 0.0 {
            m.ln() + log_scale
        } else {
            f64::NEG_INFINITY
        }
    };
    out.push(at_targets(&v, 0.0));
    for _ in 0..n_max {
        let mut next = vec![0.0; v.len()];
        for (i, e) in g.edges().iter().enumerate() {
            next[e.target] += v[e.source] * weights.map_or(1.0, |w| w[i]);
        }
        let mass = stable_sum(next.iter().copied());
        if mass == 0.0 {
            out.resize(n_max + 1, f64::NEG_INFINITY);
            break;
        }
        for m in &mut next {
            *m /= mass;
        }
        log_scale += mass.ln();
        v = next;
        out.push(at_targets(&v, log_scale));
    }
    out
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

/// Number of words of length `n` in `L_{x,y}`.
pub fn count_words(g: &LabeledDigraph, x: usize, y: usize, n: usize) -> Result<u128> {
    Ok(*count_sequence(g, x, y, n)?.last().unwrap())
}

/// Word counts of `L_{x,y}` for lengths `0..=n_max`.
pub fn count_sequence(g: &LabeledDigraph, x: usize, y: usize, n_max: usize) -> Result<Vec<u128>> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    require_deterministic(g)?;
    path_counts(g, x, y..y + 1, n_max)
}

impl Restriction {
    /// Word counts of `L^F_{x,y}` for lengths `0..=n_max`.
    pub fn count_sequence(&self, x: usize, y: usize, n_max: usize) -> Result<Vec<u128>> {
        let n = self.base_vertices();
        if x >= n || y >= n {
            return Err(Error::Parameter(format!("vertex out of range 0..{n}")));
        }
        require_deterministic(&self.graph)?;
        path_counts(&self.graph, self.start(x), self.ends(y), n_max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `log ρ(A)` for the count matrix `A`.
    pub h: f64,
    pub rho: f64,
    /// Counts of a fixed pair can only be positive on one residue class
    /// modulo this period.
    pub period: usize,
    /// `(n, log(count(n))/n)` for every `n >= 1` with a positive count.
    pub raw: Vec<(usize, f64)>,
}

fn perron_root(a: &DenseMatrix) -> Result<f64> {
    if a.is_nonnegative() && a.row_sums().iter().all(|&s| s == 0.0) {
        return Ok(0.0);
    }
    Ok(perron(a)?.rho)
}

pub fn entropy(g: &LabeledDigraph, x: usize, y: usize, n_max: usize) -> Result<EntropyEstimate> {
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    require_deterministic(g)?;
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let rho = perron_root(&g.count_matrix())?;
    let logs = log_masses(g, None, unit(g.vertex_count(), x), y..y + 1, n_max);
    let raw = logs
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| l.is_finite())
        .map(|(n, l)| (n, l / n as f64))
        .collect();
    Ok(EntropyEstimate {
        h: rho.ln(),
        rho,
        period: g.period(),
        raw,
    })
}

/// Largest Perron root among the strongly connected components lying on a
/// path from `start` into `targets`, or `None` if those paths use no cycle.
fn max_component_root(
    g: &LabeledDigraph,
    comp: &[usize],
    comp_root: &[Option<f64>],
    start: usize,
    targets: Range<usize>,
) -> Option<f64> {
    let fwd = bfs(&g.successors(), &[start]);
    let back = bfs(&g.predecessors(), &targets.collect::<Vec<_>>());
    let mut best: Option<f64> = None;
    for v in 0..g.vertex_count() {
        if fwd[v].is_some() && back[v].is_some() {
            if let Some(r) = comp_root[comp[v]] {
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
    }
    best
}

/// Perron root of every component that contains a cycle.
fn component_roots(
    g: &LabeledDigraph,
    weights: Option<&[f64]>,
) -> Result<(Vec<usize>, Vec<Option<f64>>)> {
    let comp = components(&g.successors());
    let count = comp.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (v, &c) in comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut local = vec![0; g.vertex_count()];
    for m in &members {
        for (i, &v) in m.iter().enumerate() {
            local[v] = i;
        }
    }
    let mut mats: Vec<DenseMatrix> = members
        .iter()
        .map(|m| DenseMatrix::zeros(m.len()))
        .collect();
    for (i, e) in g.edges().iter().enumerate() {
        let c = comp[e.source];
        if comp[e.target] == c {
            let (a, b) = (local[e.source], local[e.target]);
            let w = weights.map_or(1.0, |w| w[i]);
            let m = &mut mats[c];
            m.set(a, b, m.get(a, b) + w);
        }
    }
    let roots = mats
        .iter()
        .map(|m| {
            if m.is_irreducible() {
                perron(m).map(|p| Some(p.rho))
            } else {
                Ok(None)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((comp, roots))
}

/// Exact `h(L^F_{x,y})`, or `None` when the language is finite.
pub fn restricted_entropy(r: &Restriction, x: usize, y: usize) -> Result<Option<f64>> {
    let (comp, roots) = component_roots(&r.graph, None)?;
    Ok(max_component_root(&r.graph, &comp, &roots, r.start(x), r.ends(y)).map(f64::ln))
}

/// Outcome of the certifications required by the growth-sensitivity
/// theorem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certification {
    pub deterministic: bool,
    pub strongly_connected: bool,
    /// Uniform connectedness constant `K`.
    pub k: Option<usize>,
    /// Relative denseness constant `D`.
    pub d: Option<usize>,
}

impl Certification {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.deterministic {
            out.push("graph is not deterministic".to_string());
        }
        if !self.strongly_connected {
            out.push("graph is not strongly connected, hence not uniformly connected".to_string());
        } else if self.k.is_none() {
            out.push("graph is not uniformly connected".to_string());
        }
        if self.d.is_none() {
            out.push("forbidden set is not relatively dense".to_string());
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Certifies determinism, uniform connectedness and relative denseness, with
/// the constants bounded by the number of vertices.
pub fn certify(g: &LabeledDigraph, f: &FactorSet) -> Result<Certification> {
    let n = g.vertex_count();
    Ok(Certification {
        deterministic: g.is_deterministic(),
        strongly_connected: g.is_strongly_connected(),
        k: g.uniform_connectedness(n),
        d: g.relative_denseness(f, n)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEntropy {
    pub x: usize,
    pub y: usize,
    /// `None` for a finite language.
    pub h_f: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub h: f64,
    pub sup_h_f: Option<f64>,
    pub strict: bool,
    pub certification: Certification,
    pub pairs: Vec<PairEntropy>,
}

/// Entropy of the graph against the entropies of every restricted language
/// `L^F_{x,y}`.
pub fn growth_sensitivity_report(g: &LabeledDigraph, f: &FactorSet) -> Result<GrowthReport> {
    let certification = certify(g, f)?;
    let failures = certification.failures();
    if !failures.is_empty() {
        return Err(Error::Hypothesis(failures));
    }
    let h = perron_root(&g.count_matrix())?.ln();
    let r = restrict(g, f)?;
    let (comp, roots) = component_roots(&r.graph, None)?;
    let n = g.vertex_count();
    let mut pairs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let h_f =
                max_component_root(&r.graph, &comp, &roots, r.start(x), r.ends(y)).map(f64::ln);
            pairs.push(PairEntropy { x, y, h_f });
        }
    }
    let sup_h_f = pairs
        .iter()
        .filter_map(|p| p.h_f)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let strict = sup_h_f.is_none_or(|s| s < h - STRICT_TOL);
    Ok(GrowthReport {
        h,
        sup_h_f,
        strict,
        certification,
        pairs,
    })
}

/// Labelled graph with edge probabilities `p(e) >= α > 0` and out-sums at
/// most 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedGraph {
    graph: LabeledDigraph,
    weights: Vec<f64>,
    alpha: f64,
}

impl WeightedGraph {
    /// `weights` follow the order of `graph.edges()`.
    pub fn new(graph: LabeledDigraph, weights: Vec<f64>, alpha: f64) -> Result<Self> {
        if weights.len() != graph.edges().len() {
            return Err(Error::Parameter(format!(
                "{} weights for {} edges",
                weights.len(),
                graph.edges().len()
            )));
        }
        if !(alpha > 0.0) {
            return Err(Error::Parameter(format!("α must be positive, got {alpha}")));
        }
        if let Some(w) = weights.iter().find(|&&w| !(w >= alpha * (1.0 - 1e-12))) {
            return Err(Error::Parameter(format!(
                "edge weight {w} is below α = {alpha}"
            )));
        }
        let wg = Self {
            graph,
            weights,
            alpha,
        };
        if let Some(s) = wg.row_sums().into_iter().find(|&s| s > 1.0 + 1e-9) {
            return Err(Error::Parameter(format!(
                "out-going weights sum to {s} > 1"
            )));
        }
        Ok(wg)
    }

    pub fn graph(&self) -> &LabeledDigraph {
        &self.graph
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `P[x][y] = Σ p(e)` over edges from `x` to `y`.
    pub fn matrix(&self) -> DenseMatrix {
        let mut p = DenseMatrix::zeros(self.graph.vertex_count());
        for (e, w) in self.graph.edges().iter().zip(&self.weights) {
            p.set(e.source, e.target, p.get(e.source, e.target) + w);
        }
        p
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![Vec::new(); self.graph.vertex_count()];
        for (e, &w) in self.graph.edges().iter().zip(&self.weights) {
            s[e.source].push(w);
        }
        s.into_iter().map(stable_sum).collect()
    }

    /// Edge-wise `p^h(x,a,y) = p(x,a,y) h(y) / (ρ h(x))`; the result records
    /// its smallest edge weight as `α`.
    pub fn h_transform(&self, h: &[f64], rho: f64) -> Result<WeightedGraph> {
        if h.len() != self.graph.vertex_count() {
            return Err(Error::Parameter(format!(
                "vector has length {}, graph has {} vertices",
                h.len(),
                self.graph.vertex_count()
            )));
        }
        if !(rho > 0.0) {
            return Err(Error::Parameter(format!("ρ must be positive, got {rho}")));
        }
        if let Some(i) = h.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::Domain(i));
        }
        let weights: Vec<f64> = self
            .graph
            .edges()
            .iter()
            .zip(&self.weights)
            .map(|(e, w)| w * h[e.target] / (rho * h[e.source]))
            .collect();
        let alpha = weights.iter().copied().fold(f64::INFINITY, f64::min);
        let alpha = if alpha.is_finite() { alpha } else { 1.0 };
        WeightedGraph::new(self.graph.clone(), weights, alpha)
    }
}

/// Every edge gets probability `1/|Σ|`.
pub fn uniform_weighting(g: &LabeledDigraph) -> Result<WeightedGraph> {
    require_deterministic(g)?;
    let alpha = 1.0 / g.alphabet().len() as f64;
    WeightedGraph::new(g.clone(), vec![alpha; g.edges().len()], alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    /// Growth rate of the total word count over all pairs of vertices.
    pub h_counting: f64,
    /// `log(ρ(P)·|Σ|)` for the uniform weighting `P`.
    pub log_rho_sigma: f64,
    pub delta: f64,
    pub period: usize,
}

/// Compares the counting entropy with `log(ρ(P)|Σ|)`, each computed on its
/// own: the first from word counts, the second from the Perron root of the
/// uniformly weighted transition matrix.
pub fn entropy_spectral_identity_check(g: &LabeledDigraph) -> Result<IdentityCheck> {
    require_deterministic(g)?;
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let period = g.period();
    let p = uniform_weighting(g)?.matrix();
    let log_rho_sigma = (perron_root(&p)? * g.alphabet().len() as f64).ln();
    let n = g.vertex_count();
    let h_counting = if period == 0 {
        f64::NEG_INFINITY
    } else {
        let logs = log_masses(g, None, vec![1.0; n], 0..n, IDENTITY_HORIZON);
        let top = IDENTITY_HORIZON - IDENTITY_HORIZON % period;
        (logs[top] - logs[top - period]) / period as f64
    };
    let delta = if h_counting == log_rho_sigma {
        0.0
    } else {
        (h_counting - log_rho_sigma).abs()
    };
    Ok(IdentityCheck {
        h_counting,
        log_rho_sigma,
        delta,
        period,
    })
}

/// `Σ_y p_F^(n)(x,y)` for every `x`: the probability that the first `n`
/// labels avoid `F`.
pub fn restricted_row_sums(wg: &WeightedGraph, f: &FactorSet, n: usize) -> Result<Vec<f64>> {
    let r = restrict(wg.graph(), f)?;
    let w: Vec<f64> = r.base_edge.iter().map(|&i| wg.weights()[i]).collect();
    let m = r.graph.vertex_count();
    Ok((0..r.base_vertices())
        .map(|x| {
            let mut v = unit(m, r.start(x));
            for _ in 0..n {
                let mut next = vec![0.0; m];
                for (i, e) in r.graph.edges().iter().enumerate() {
                    next[e.target] += v[e.source] * w[i];
                }
                v = next;
            }
            stable_sum(v)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubstochasticReport {
    pub d: usize,
    pub r: usize,
    pub k: usize,
    pub alpha: f64,
    pub epsilon0: f64,
    pub row_sums: Vec<f64>,
    pub max_row_sum: f64,
    pub pass: bool,
}

/// Checks that every row of `P_F^(k)`, `k = D + R`, sums to at most
/// `1 - α^k`.
pub fn substochastic_bound_check(wg: &WeightedGraph, f: &FactorSet) -> Result<SubstochasticReport> {
    let g = wg.graph();
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let d = g
        .relative_denseness(f, g.vertex_count())?
        .ok_or_else(|| Error::Hypothesis(vec!["forbidden set is not relatively dense".into()]))?;
    let r = f.max_len();
    let k = d + r;
    let epsilon0 = wg.alpha().powi(k as i32);
    let row_sums = restricted_row_sums(wg, f, k)?;
    let max_row_sum = row_sums.iter().copied().fold(0.0, f64::max);
    Ok(SubstochasticReport {
        d,
        r,
        k,
        alpha: wg.alpha(),
        epsilon0,
        pass: max_row_sum <= 1.0 - epsilon0 + 1e-12,
        row_sums,
        max_row_sum,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedRho {
    /// Largest Perron root over the product components between `x` and `y`;
    /// `None` when only finitely many restricted paths exist.
    pub exact: Option<f64>,
    /// Extrapolated from `p_F^(n)(x,y)`, `n <= n_max`.
    pub dp: Option<SpectralEstimate>,
    /// `ρ(P)` of the unrestricted weighted graph.
    pub rho: Option<f64>,
}

pub fn restricted_rho(
    wg: &WeightedGraph,
    f: &FactorSet,
    x: usize,
    y: usize,
    n_max: usize,
) -> Result<RestrictedRho> {
    let g = wg.graph();
    g.check_vertex(x)?;
    g.check_vertex(y)?;
    let r = restrict(g, f)?;
    let w: Vec<f64> = r.base_edge.iter().map(|&i| wg.weights()[i]).collect();
    let (comp, roots) = component_roots(&r.graph, Some(&w))?;
    let exact = max_component_root(&r.graph, &comp, &roots, r.start(x), r.ends(y));
    let logs = log_masses(
        &r.graph,
        Some(&w),
        unit(r.graph.vertex_count(), r.start(x)),
        r.ends(y),
        n_max,
    );
    let dp = match estimate_from_log_returns(&logs) {
        Ok(e) => Some(e),
        Err(Error::NoReturn(_)) => None,
        Err(e) => return Err(e),
    };
    let rho = perron(&wg.matrix()).ok().map(|p| p.rho);
    Ok(RestrictedRho { exact, dp, rho })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::tests::example_graph;

    fn full2() -> LabeledDigraph {
        LabeledDigraph::full_shift(vec!['0', '1']).unwrap()
    }

    fn golden() -> f64 {
        (1.0 + 5f64.sqrt()) / 2.0
    }

    #[test]
    fn counts_on_simple_graphs() {
        let g = LabeledDigraph::full_shift(vec!['a', 'b']).unwrap();
        assert_eq!(
            count_sequence(&g, 0, 0, 10).unwrap(),
            (0..=10).map(|n| 1u128 << n).collect::<Vec<_>>()
        );
        let ex = example_graph();
        assert_eq!(count_words(&ex, 0, 0, 0).unwrap(), 1);
        assert_eq!(count_words(&ex, 0, 1, 0).unwrap(), 0);
        assert!(count_words(&ex, 0, 1, 2).unwrap() >= 1);
        let nd = LabeledDigraph::new(2, vec!['a'], vec![(0, 'a', 0), (0, 'a', 1)]).unwrap();
        assert!(matches!(
            count_words(&nd, 0, 0, 3),
            Err(Error::NotDeterministic(_))
        ));
        assert_eq!(count_words(&g, 0, 0, 128), Err(Error::Overflow(128)));
    }

    #[test]
    fn golden_mean_counts_and_entropy() {
        let r = restrict(&full2(), &FactorSet::parse("11").unwrap()).unwrap();
        let c = r.count_sequence(0, 0, 8).unwrap();
        assert_eq!(c, vec![1, 2, 3, 5, 8, 13, 21, 34, 55]);
        let h = restricted_entropy(&r, 0, 0).unwrap().unwrap();
        assert!((h - golden().ln()).abs() < 1e-12);
        let twice = restrict(&r.graph, &FactorSet::parse("11").unwrap()).unwrap();
        let start = twice.start(r.start(0));
        let mut total = vec![0u128; 9];
        for y in r.ends(0) {
            for (t, c) in total
                .iter_mut()
                .zip(path_counts(&twice.graph, start, twice.ends(y), 8).unwrap())
            {
                *t += c;
            }
        }
        assert_eq!(total, c);
    }

    #[test]
    fn forbidding_a_letter_leaves_the_other() {
        let g = LabeledDigraph::full_shift(vec!['a', 'b']).unwrap();
        let r = restrict(&g, &FactorSet::parse("a").unwrap()).unwrap();
        assert_eq!(r.count_sequence(0, 0, 5).unwrap(), vec![1; 6]);
        assert_eq!(restricted_entropy(&r, 0, 0).unwrap(), Some(0.0));
    }

    #[test]
    fn entropy_values() {
        let e = entropy(&full2(), 0, 0, 50).unwrap();
        assert!((e.h - 2f64.ln()).abs() < 1e-12);
        assert!((e.raw.last().unwrap().1 - 2f64.ln()).abs() < 1e-12);
        let path = LabeledDigraph::new(2, vec!['a'], vec![(0, 'a', 1)]).unwrap();
        assert_eq!(entropy(&path, 0, 1, 5), Err(Error::NotStronglyConnected));
        let ex = example_graph();
        let hs: Vec<f64> = (0..4)
            .flat_map(|x| (0..4).map(move |y| (x, y)))
            .map(|(x, y)| entropy(&ex, x, y, 20).unwrap().h)
            .collect();
        let spread = hs.iter().copied().fold(f64::MIN, f64::max)
            - hs.iter().copied().fold(f64::MAX, f64::min);
        assert!(spread < 1e-9);
    }

    #[test]
    fn growth_report_golden_mean() {
        let rep = growth_sensitivity_report(&full2(), &FactorSet::parse("11").unwrap()).unwrap();
        assert!(rep.strict);
        assert!((rep.h - 2f64.ln()).abs() < 1e-12);
        assert!((rep.sup_h_f.unwrap() - golden().ln()).abs() < 1e-9);
        let three = LabeledDigraph::full_shift(vec!['a', 'b', 'c']).unwrap();
        let rep = growth_sensitivity_report(&three, &FactorSet::parse("c").unwrap()).unwrap();
        assert!(rep.strict);
        assert!((rep.sup_h_f.unwrap() - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn growth_report_rejects_uncertified_input() {
        let g = LabeledDigraph::new(1, vec!['a', 'c'], vec![(0, 'a', 0)]).unwrap();
        match growth_sensitivity_report(&g, &FactorSet::parse("c").unwrap()) {
            Err(Error::Hypothesis(v)) => {
                assert_eq!(v, vec!["forbidden set is not relatively dense".to_string()])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn uniform_weighting_rows() {
        let w = uniform_weighting(&full2()).unwrap();
        assert_eq!(w.alpha(), 0.5);
        assert_eq!(w.row_sums(), vec![1.0]);
        let ex = uniform_weighting(&example_graph()).unwrap();
        assert!(ex.row_sums().iter().all(|&s| s <= 1.0));
    }

    #[test]
    fn identity_examples() {
        let c = entropy_spectral_identity_check(&full2()).unwrap();
        assert!(c.delta < 1e-10);
        let three_cycle =
            LabeledDigraph::new(3, vec!['a'], vec![(0, 'a', 1), (1, 'a', 2), (2, 'a', 0)]).unwrap();
        let c = entropy_spectral_identity_check(&three_cycle).unwrap();
        assert_eq!(c.period, 3);
        assert!(c.h_counting.abs() < 1e-12 && c.log_rho_sigma.abs() < 1e-12);
        let r = restrict(&full2(), &FactorSet::parse("11").unwrap()).unwrap();
        let c = entropy_spectral_identity_check(&r.graph).unwrap();
        assert!((c.h_counting - golden().ln()).abs() < 1e-9);
        assert!(c.delta < 1e-9);
    }

    #[test]
    fn substochastic_golden_mean() {
        let w = uniform_weighting(&full2()).unwrap();
        let f = FactorSet::parse("11").unwrap();
        let rep = substochastic_bound_check(&w, &f).unwrap();
        assert_eq!((rep.d, rep.r, rep.k), (0, 2, 2));
        assert_eq!(rep.max_row_sum, 0.75);
        assert!(rep.pass);
        for m in 2..=3 {
            let s = restricted_row_sums(&w, &f, m * rep.k).unwrap();
            assert!(s.iter().all(|&v| v <= 0.75f64.powi(m as i32) + 1e-15));
        }
        let bad =
            uniform_weighting(&LabeledDigraph::new(1, vec!['a', 'c'], vec![(0, 'a', 0)]).unwrap())
                .unwrap();
        assert!(matches!(
            substochastic_bound_check(&bad, &FactorSet::parse("c").unwrap()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn restricted_rho_golden_mean() {
        let w = uniform_weighting(&full2()).unwrap();
        let r = restricted_rho(&w, &FactorSet::parse("11").unwrap(), 0, 0, 200).unwrap();
        assert!((r.exact.unwrap() - golden() / 2.0).abs() < 1e-12);
        assert!((r.dp.unwrap().rho - golden() / 2.0).abs() < 1e-9);
        assert!((r.rho.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn h_transform_of_uniform_weighting() {
        let w = uniform_weighting(&example_graph()).unwrap();
        let pp = perron(&w.matrix()).unwrap();
        let t = w.h_transform(&pp.h, pp.rho).unwrap();
        for s in t.row_sums() {
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert!(matches!(
            w.h_transform(&[1.0, 1.0, 0.0, 1.0], 1.0),
            Err(Error::Domain(2))
        ));
    }
}
