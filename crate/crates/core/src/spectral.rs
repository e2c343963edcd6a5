//! Return probabilities, Green-function partial sums and spectral radii by
//! exact forward dynamic programming, plus Perron pairs and h-transforms of
//! finite nonnegative matrices.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::{stable_sum, BaseKernel, Kernel};

/// Largest number of distinct states a dynamic program may touch.
pub const STATE_LIMIT: usize = 10_000_000;

/// Estimated heap a dynamic program may use; heavy states (lamp
/// configurations) hit this long before `STATE_LIMIT`.
pub const MEMORY_BUDGET: usize = 2 << 30;

const PERRON_TOL: f64 = 1e-12;
const PERRON_MAX_ITER: usize = 100_000;
const RAW_ITER: usize = 2_000;

/// Lazily discovered state space with cached sparse rows.
struct Explorer<'a, K: Kernel> {
    k: &'a K,
    states: Vec<K::State>,
    index: HashMap<K::State, usize>,
    rows: Vec<Option<Vec<(usize, f64)>>>,
    bytes: usize,
    limit: usize,
}

impl<'a, K: Kernel> Explorer<'a, K> {
    fn new(k: &'a K, limit: usize) -> Self {
        Self {
            k,
            states: Vec::new(),
            index: HashMap::new(),
            rows: Vec::new(),
            bytes: 0,
            limit,
        }
    }

    fn id(&mut self, s: &K::State) -> Result<usize> {
        if let Some(&i) = self.index.get(s) {
            return Ok(i);
        }
        if self.states.len() >= self.limit {
            return Err(Error::StateSpaceTooLarge(self.limit));
        }
        // Stored twice (vector and index) plus table and row overhead.
        self.bytes += 2 * self.k.state_bytes(s) + 32;
        if self.bytes > MEMORY_BUDGET {
            return Err(Error::MemoryBudget(MEMORY_BUDGET >> 20));
        }
        let i = self.states.len();
        self.states.push(s.clone());
        self.index.insert(s.clone(), i);
        self.rows.push(None);
        Ok(i)
    }

    fn row(&mut self, i: usize) -> Result<Vec<(usize, f64)>> {
        if let Some(r) = &self.rows[i] {
            return Ok(r.clone());
        }
        let from = self.states[i].clone();
        let row = self
            .k
            .transitions(&from)?
            .into_iter()
            .map(|(s, p)| Ok((self.id(&s)?, p)))
            .collect::<Result<Vec<_>>>()?;
        self.bytes += row.len() * std::mem::size_of::<(usize, f64)>();
        if self.bytes > MEMORY_BUDGET {
            return Err(Error::MemoryBudget(MEMORY_BUDGET >> 20));
        }
        self.rows[i] = Some(row.clone());
        Ok(row)
    }

    /// One forward step `v -> vP`.
    fn push(&mut self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.states.len()];
        for (i, &m) in v.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (j, p) in self.row(i)? {
                if j >= out.len() {
                    out.resize(self.states.len(), 0.0);
                }
                out[j] += m * p;
            }
        }
        Ok(out)
    }
}

/// Partial sums `Σ_{n<=m} p^(n)(x,y) z^n` for `m = 0..=n_steps`.
pub fn green_series<K: Kernel>(
    k: &K,
    x: &K::State,
    y: &K::State,
    z: f64,
    n_steps: usize,
) -> Result<Vec<f64>> {
    if !(z >= 0.0) {
        return Err(Error::Parameter(format!(
            "Green function argument must be >= 0, got {z}"
        )));
    }
    k.transitions(x)?;
    let mut ex = Explorer::new(k, STATE_LIMIT);
    let ix = ex.id(x)?;
    let mut v = vec![0.0; ex.states.len()];
    v[ix] = 1.0;
    let mut terms = Vec::with_capacity(n_steps + 1);
    let mut zn = 1.0;
    for n in 0..=n_steps {
        if n > 0 {
            v = ex.push(&v)?;
            zn *= z;
        }
        let p = ex
            .index
            .get(y)
            .and_then(|&j| v.get(j))
            .copied()
            .unwrap_or(0.0);
        terms.push(p * zn);
    }
    let mut sums = Vec::with_capacity(terms.len());
    for n in 0..terms.len() {
        sums.push(stable_sum(terms[..=n].iter().copied()));
    }
    Ok(sums)
}

/// `Σ_{n<=N} p^(n)(x,y) z^n`, exact up to rounding.
pub fn truncated_green<K: Kernel>(
    k: &K,
    x: &K::State,
    y: &K::State,
    z: f64,
    n_steps: usize,
) -> Result<f64> {
    Ok(*green_series(k, x, y, z, n_steps)?.last().unwrap())
}

/// Log return probabilities `log p^(n)(x,x)` for `n = 0..=n_max`
/// (`-inf` where zero), computed with per-step renormalisation so long
/// horizons do not underflow.
pub fn log_return_probabilities<K: Kernel>(k: &K, x: &K::State, n_max: usize) -> Result<Vec<f64>> {
    k.transitions(x)?;
    let mut ex = Explorer::new(k, STATE_LIMIT);
    let ix = ex.id(x)?;
    let mut v = vec![1.0];
    let mut log_scale = 0.0;
    let mut out = vec![0.0];
    for _ in 0..n_max {
        v = ex.push(&v)?;
        let mass = stable_sum(v.iter().copied());
        if mass == 0.0 {
            out.resize(n_max + 1, f64::NEG_INFINITY);
            break;
        }
        for m in &mut v {
            *m /= mass;
        }
        log_scale += mass.ln();
        out.push(if v[ix] > 0.0 {
            v[ix].ln() + log_scale
        } else {
            f64::NEG_INFINITY
        });
    }
    Ok(out)
}

/// Spectral radius estimate with the raw root sequence it was derived from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub rho: f64,
    /// Gap between the first- and second-order extrapolations.
    pub error_estimate: f64,
    /// Spacing of the residue class carrying the positive terms.
    pub period: usize,
    /// `(n, p^(n)^(1/n))` for every `n >= 1` with a positive term.
    pub roots: Vec<(usize, f64)>,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Value at `h = 0` of the polynomial through the given `(h, f)` points.
fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for (i, &(hi, fi)) in points.iter().enumerate() {
        let mut w = 1.0;
        for (j, &(hj, _)) in points.iter().enumerate() {
            if i != j {
                w *= hj / (hj - hi);
            }
        }
        total += w * fi;
    }
    total
}

/// Turns a sequence `log p^(n)` (index `n`, `-inf` where zero) into an
/// exponential growth rate estimate.
///
/// Positive terms live on `n ≡ n0 (mod d)`. Along that class
/// `log(p^(n+d)/p^(n))/d` equals `log ρ - α/(n + d/2) + O(n^-3)` whenever
/// `p^(n) ~ C ρ^n n^-α`, so the ratio is extrapolated polynomially in
/// `1/(n + d/2)`.
pub fn estimate_from_log_returns(logs: &[f64]) -> Result<SpectralEstimate> {
    let n_max = logs.len().saturating_sub(1);
    let positive: Vec<usize> = (1..logs.len()).filter(|&n| logs[n].is_finite()).collect();
    let Some(&n0) = positive.first() else {
        return Err(Error::NoReturn(n_max));
    };
    let period = positive.iter().fold(0, |g, &n| gcd(g, n - n0));
    let roots: Vec<(usize, f64)> = positive
        .iter()
        .map(|&n| (n, (logs[n] / n as f64).exp()))
        .collect();
    if period == 0 {
        return Ok(SpectralEstimate {
            rho: roots[0].1,
            error_estimate: f64::NAN,
            period,
            roots,
        });
    }
    let d = period as f64;
    let ratio = |n: usize| -> Option<(f64, f64)> {
        let (a, b) = (logs[n], logs[n + period]);
        (a.is_finite() && b.is_finite()).then(|| (1.0 / (n as f64 + d / 2.0), (b - a) / d))
    };
    let steps = (n_max - n0) / period;
    if steps == 0 {
        return Ok(SpectralEstimate {
            rho: roots[0].1,
            error_estimate: f64::NAN,
            period,
            roots,
        });
    }
    let mut picks: Vec<usize> = [(steps - 1) / 4, (steps - 1) / 2, steps - 1]
        .iter()
        .map(|j| n0 + j * period)
        .collect();
    picks.dedup();
    let samples: Vec<(f64, f64)> = picks.iter().filter_map(|&n| ratio(n)).collect();
    let (rho, error_estimate) = match samples.len() {
        0 => (roots.last().unwrap().1, f64::NAN),
        1 => (samples[0].1.exp(), f64::NAN),
        _ => {
            let second = extrapolate_to_zero(&samples).exp();
            let first = extrapolate_to_zero(&samples[samples.len() - 2..]).exp();
            (second, (second - first).abs())
        }
    };
    Ok(SpectralEstimate {
        rho,
        error_estimate,
        period,
        roots,
    })
}

/// Spectral radius of `k` seen from `x`, from exact return probabilities up
/// to `n_max`.
pub fn spectral_radius_dp<K: Kernel>(
    k: &K,
    x: &K::State,
    n_max: usize,
) -> Result<SpectralEstimate> {
    check_horizon(n_max)?;
    estimate_from_log_returns(&log_return_probabilities(k, x, n_max)?)
}

fn check_horizon(n_max: usize) -> Result<()> {
    if n_max < 10 || !n_max.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "n_max must be even and >= 10, got {n_max}"
        )));
    }
    Ok(())
}

/// [`spectral_radius_dp`] at the origin of a base kernel, computed on the
/// distance-from-origin chain when the kernel lumps exactly onto it.
pub fn spectral_radius_base(k: &BaseKernel, n_max: usize) -> Result<SpectralEstimate> {
    match k.radial_lumping() {
        Some(walk) => {
            check_horizon(n_max)?;
            estimate_from_log_returns(&log_return_probabilities(&walk, &0, n_max)?)
        }
        None => spectral_radius_dp(k, &k.graph().origin(), n_max),
    }
}

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter("matrix must be square".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| stable_sum(self.row(i).iter().copied()))
            .collect()
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|a| a.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&a| a >= 0.0)
    }

    /// Strong connectivity of the positive pattern (a 1x1 matrix needs a
    /// positive entry).
    pub fn is_irreducible(&self) -> bool {
        if self.n == 0 {
            return false;
        }
        if self.n == 1 {
            return self.data[0] > 0.0;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; self.n];
            let mut queue = VecDeque::from([0]);
            seen[0] = true;
            while let Some(i) = queue.pop_front() {
                for (j, s) in seen.iter_mut().enumerate() {
                    let a = if forward {
                        self.get(i, j)
                    } else {
                        self.get(j, i)
                    };
                    if a > 0.0 && !*s {
                        *s = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }
}

/// Restriction of a kernel to the states reachable from a start state in at
/// most `steps` steps; mass leaving the window is dropped.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedChain<S> {
    pub states: Vec<S>,
    pub matrix: DenseMatrix,
}

impl<S: Clone + Ord + std::hash::Hash> TruncatedChain<S> {
    pub fn build<K: Kernel<State = S>>(k: &K, start: &S, steps: usize) -> Result<Self> {
        k.transitions(start)?;
        let mut seen: HashMap<S, usize> = HashMap::from([(start.clone(), 0)]);
        let mut frontier = vec![start.clone()];
        for d in 1..=steps {
            let mut next = Vec::new();
            for s in &frontier {
                for (t, _) in k.transitions(s)? {
                    if !seen.contains_key(&t) {
                        if seen.len() >= STATE_LIMIT {
                            return Err(Error::StateSpaceTooLarge(STATE_LIMIT));
                        }
                        seen.insert(t.clone(), d);
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        let mut states: Vec<S> = seen.into_keys().collect();
        states.sort();
        let index: HashMap<&S, usize> = states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut matrix = DenseMatrix::zeros(states.len());
        for (i, s) in states.iter().enumerate() {
            for (t, p) in k.transitions(s)? {
                if let Some(&j) = index.get(&t) {
                    matrix.set(i, j, p);
                }
            }
        }
        Ok(Self { states, matrix })
    }

    pub fn index_of(&self, s: &S) -> Option<usize> {
        self.states.binary_search(s).ok()
    }
}

/// Perron root and a positive right eigenvector normalised to maximum 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronPair {
    pub rho: f64,
    pub h: Vec<f64>,
}

impl PerronPair {
    /// `max_i |(Ah)_i - ρ h_i|`.
    pub fn residual(&self, a: &DenseMatrix) -> f64 {
        a.mul_vec(&self.h)
            .iter()
            .zip(&self.h)
            .map(|(w, h)| (w - self.rho * h).abs())
            .fold(0.0, f64::max)
    }
}

/// Power iteration on `b`, stopping when the Collatz-Wielandt bounds
/// `min (Bh)_i/h_i <= ρ <= max (Bh)_i/h_i` agree to relative `PERRON_TOL`.
fn power_iterate(b: &DenseMatrix, h: &mut Vec<f64>, max_iter: usize) -> Option<f64> {
    for _ in 0..max_iter {
        let w = b.mul_vec(h);
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (wi, hi_) in w.iter().zip(h.iter()) {
            let r = wi / hi_;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let top = w.iter().copied().fold(0.0, f64::max);
        if top == 0.0 || !top.is_finite() {
            return None;
        }
        *h = w.into_iter().map(|x| x / top).collect();
        if h.iter().any(|&x| x <= 0.0) {
            continue;
        }
        if hi - lo <= PERRON_TOL * hi {
            return Some((hi + lo) / 2.0);
        }
    }
    None
}

pub fn perron(a: &DenseMatrix) -> Result<PerronPair> {
    if !a.is_nonnegative() {
        return Err(Error::Parameter(
            "Perron pair needs a nonnegative matrix".into(),
        ));
    }
    if !a.is_irreducible() {
        return Err(Error::Irreducible(format!(
            "{}x{} matrix is not strongly connected",
            a.dim(),
            a.dim()
        )));
    }
    let n = a.dim();
    let mut h = vec![1.0; n];
    if let Some(rho) = power_iterate(a, &mut h, RAW_ITER) {
        return Ok(PerronPair { rho, h });
    }
    // periodic case: iterate (I + A/s)/2, which is primitive with the same
    // Perron vector and root (1 + ρ/s)/2
    let s = a.norm_inf();
    let mut damped = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            damped.set(i, j, 0.5 * (id + a.get(i, j) / s));
        }
    }
    let mut h = vec![1.0; n];
    let mu = power_iterate(&damped, &mut h, PERRON_MAX_ITER)
        .ok_or(Error::NoConvergence(PERRON_MAX_ITER))?;
    Ok(PerronPair {
        rho: s * (2.0 * mu - 1.0),
        h,
    })
}

/// `p^h(i,j) = a(i,j) h(j) / (ρ h(i))`.
pub fn h_transform(a: &DenseMatrix, h: &[f64], rho: f64) -> Result<DenseMatrix> {
    if h.len() != a.dim() {
        return Err(Error::Parameter(format!(
            "vector has length {}, matrix has dimension {}",
            h.len(),
            a.dim()
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::Parameter(format!("ρ must be positive, got {rho}")));
    }
    if let Some(i) = h.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Domain(i));
    }
    let n = a.dim();
    let mut out = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, a.get(i, j) * h[j] / (rho * h[i]));
        }
    }
    Ok(out)
}
