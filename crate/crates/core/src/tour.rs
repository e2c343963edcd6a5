//! Shortest open walks through a set of mandatory points, given their metric
//! closure. Used by the lamplighter metric.

/// Largest number of mandatory points solved exactly.
pub const EXACT_LIMIT: usize = 12;

/// Length of the shortest walk from point `0` to point `1` that visits every
/// point `2..n`, by subset dynamic programming. `dist` must be a metric on
/// `n` points.
pub fn exact_open_tour(dist: &[Vec<u64>]) -> u64 {
    let n = dist.len();
    assert!(n >= 2, "need a start and an end point");
    let k = n - 2;
    assert!(k <= 20, "exact tour limited to 20 mandatory points");
    if k == 0 {
        return dist[0][1];
    }
    let full = (1usize << k) - 1;
    let mut dp = vec![u64::MAX; (1 << k) * k];
    let idx = |mask: usize, j: usize| mask * k + j;
    for j in 0..k {
        dp[idx(1 << j, j)] = dist[0][j + 2];
    }
    for mask in 1..=full {
        for j in 0..k {
            let cur = dp[idx(mask, j)];
            if cur == u64::MAX || mask & (1 << j) == 0 {
                continue;
            }
            for nxt in 0..k {
                if mask & (1 << nxt) != 0 {
                    continue;
                }
                let cand = cur + dist[j + 2][nxt + 2];
                let slot = &mut dp[idx(mask | (1 << nxt), nxt)];
                if cand < *slot {
                    *slot = cand;
                }
            }
        }
    }
    (0..k)
        .map(|j| dp[idx(full, j)] + dist[j + 2][1])
        .min()
        .unwrap()
}

fn path_length(dist: &[Vec<u64>], order: &[usize]) -> u64 {
    let mut total = 0;
    let mut prev = 0;
    for &p in order {
        total += dist[prev][p];
        prev = p;
    }
    total + dist[prev][1]
}

/// Upper bound on the same quantity: nearest-neighbour construction followed
/// by 2-opt segment reversals with both endpoints pinned.
pub fn heuristic_open_tour(dist: &[Vec<u64>]) -> u64 {
    let n = dist.len();
    assert!(n >= 2, "need a start and an end point");
    let mut remaining: Vec<usize> = (2..n).collect();
    let mut order = Vec::with_capacity(n - 2);
    let mut cur = 0;
    while !remaining.is_empty() {
        let (pos, _) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &p)| (dist[cur][p], p))
            .unwrap();
        cur = remaining.swap_remove(pos);
        order.push(cur);
    }
    let mut best = path_length(dist, &order);
    loop {
        let mut improved = false;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                order[i..=j].reverse();
                let len = path_length(dist, &order);
                if len < best {
                    best = len;
                    improved = true;
                } else {
                    order[i..=j].reverse();
                }
            }
        }
        if !improved {
            return best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_metric(points: &[i64]) -> Vec<Vec<u64>> {
        points
            .iter()
            .map(|a| points.iter().map(|b| a.abs_diff(*b)).collect())
            .collect()
    }

    fn brute_force(dist: &[Vec<u64>]) -> u64 {
        fn rec(dist: &[Vec<u64>], cur: usize, left: &mut Vec<usize>) -> u64 {
            if left.is_empty() {
                return dist[cur][1];
            }
            let mut best = u64::MAX;
            for i in 0..left.len() {
                let p = left.remove(i);
                best = best.min(dist[cur][p] + rec(dist, p, left));
                left.insert(i, p);
            }
            best
        }
        rec(dist, 0, &mut (2..dist.len()).collect())
    }

    #[test]
    fn no_mandatory_points() {
        assert_eq!(exact_open_tour(&line_metric(&[0, 5])), 5);
        assert_eq!(heuristic_open_tour(&line_metric(&[0, 5])), 5);
    }

    #[test]
    fn two_sided_sweep_on_a_line() {
        // start 0, end 0, visit -1 and +1
        assert_eq!(exact_open_tour(&line_metric(&[0, 0, -1, 1])), 4);
    }

    #[test]
    fn exact_matches_permutation_search() {
        let pts = [3, -2, 7, 0, -5, 4, 1];
        let d = line_metric(&pts);
        assert_eq!(exact_open_tour(&d), brute_force(&d));
        assert!(heuristic_open_tour(&d) >= exact_open_tour(&d));
    }
}
