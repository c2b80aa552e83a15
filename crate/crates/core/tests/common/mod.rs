//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use cotypelab::{FiniteMetricSpace, GeneratorKind, GeneratorSpec, GraphKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Shortest-path metric of a random weighted complete graph with small integer weights,
/// so that ties are common.
pub fn random_graph_metric(seed: u64, k: usize) -> FiniteMetricSpace {
    let mut r = rng(seed);
    let mut d = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let w = r.gen_range(1..=6) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for via in 0..k {
        for i in 0..k {
            for j in 0..k {
                let alt = d[i][via] + d[via][j];
                if alt < d[i][j] {
                    d[i][j] = alt;
                }
            }
        }
    }
    FiniteMetricSpace::from_matrix(d).unwrap()
}

/// A mixed corpus: Euclidean, graph metrics and ultrametrics, sizes 2..=max_points.
pub fn corpus(count: u64, max_points: usize) -> Vec<FiniteMetricSpace> {
    (0..count)
        .map(|s| {
            let k = 2 + (s as usize * 7 + 3) % (max_points - 1);
            match s % 3 {
                0 => GeneratorSpec::seeded(
                    GeneratorKind::RandomEuclidean {
                        points: k,
                        dim: 1 + (s as usize % 3),
                    },
                    s,
                )
                .generate()
                .unwrap(),
                1 => random_graph_metric(s, k),
                _ => GeneratorSpec::seeded(GeneratorKind::RandomUltrametric { points: k }, s)
                    .generate()
                    .unwrap(),
            }
        })
        .collect()
}

/// Minimax path value between `a` and `b` over all simple paths.
pub fn minimax_by_paths(x: &FiniteMetricSpace, a: usize, b: usize) -> f64 {
    fn go(
        x: &FiniteMetricSpace,
        at: usize,
        b: usize,
        used: &mut Vec<bool>,
        worst: f64,
        best: &mut f64,
    ) {
        if worst >= *best {
            return;
        }
        if at == b {
            *best = worst;
            return;
        }
        for next in 0..x.len() {
            if !used[next] {
                used[next] = true;
                go(x, next, b, used, worst.max(x.d(at, next)), best);
                used[next] = false;
            }
        }
    }
    if a == b {
        return 0.0;
    }
    let mut used = vec![false; x.len()];
    used[a] = true;
    let mut best = f64::INFINITY;
    go(x, a, b, &mut used, 0.0, &mut best);
    best
}

/// Union-find over pairs at distance `< eps`.
pub fn connected_below(x: &FiniteMetricSpace, a: usize, b: usize, eps: f64) -> bool {
    let mut parent: Vec<usize> = (0..x.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if x.d(i, j) < eps {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    find(&mut parent, a) == find(&mut parent, b)
}

pub fn diam(x: &FiniteMetricSpace, s: &[usize]) -> f64 {
    let mut d = 0.0f64;
    for &i in s {
        for &j in s {
            d = d.max(x.d(i, j));
        }
    }
    d
}

/// Largest `dist(A, S \ A)` over every bipartition of `s`.
pub fn max_split_by_bipartitions(x: &FiniteMetricSpace, s: &[usize]) -> f64 {
    let k = s.len();
    let mut best = 0.0f64;
    // The last point of `s` stays on the far side, so each unordered split is seen once.
    for mask in 1u32..(1 << (k - 1)) {
        let mut sep = f64::INFINITY;
        for i in 0..k {
            if (mask >> i) & 1 == 0 {
                continue;
            }
            for j in 0..k {
                if (mask >> j) & 1 == 0 {
                    sep = sep.min(x.d(s[i], s[j]));
                }
            }
        }
        best = best.max(sep);
    }
    best
}

/// `max_S diam(S) / max-split(S)` over every subset with at least two points.
pub fn c_sep_by_subsets(x: &FiniteMetricSpace) -> f64 {
    let k = x.len();
    let mut best = 1.0f64;
    for mask in 1u32..(1 << k) {
        if mask.count_ones() < 2 {
            continue;
        }
        let s: Vec<usize> = (0..k).filter(|i| (mask >> i) & 1 == 1).collect();
        best = best.max(diam(x, &s) / max_split_by_bipartitions(x, &s));
    }
    best
}

fn coords(mut i: usize, n: usize, m: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let c = i % m;
            i /= m;
            c
        })
        .collect()
}

/// Adjacency from coordinate differences alone.
pub fn adjacent(u: usize, v: usize, n: usize, m: usize, kind: GraphKind) -> bool {
    if u == v {
        return false;
    }
    let (a, b) = (coords(u, n, m), coords(v, n, m));
    let diffs: Vec<usize> = a.iter().zip(&b).map(|(x, y)| (x + m - y) % m).collect();
    let moved = diffs.iter().filter(|&&d| d != 0).count();
    match kind {
        GraphKind::T => moved == 1 && diffs.iter().all(|&d| d == 0 || d == 1 || d == m - 1),
        GraphKind::R => diffs.iter().all(|&d| d == 0 || d == 1 || d == m - 1),
        GraphKind::L => moved == 1 && diffs.iter().all(|&d| d == 0 || d == m / 2),
    }
}

/// Edges with exactly one endpoint in `set`, counted once each.
pub fn boundary_by_pairs(set: &[bool], n: usize, m: usize, kind: GraphKind) -> usize {
    let size = set.len();
    let mut count = 0;
    for u in 0..size {
        for v in u + 1..size {
            if set[u] != set[v] && adjacent(u, v, n, m, kind) {
                count += 1;
            }
        }
    }
    count
}

/// Both sides of the cotype inequality, straight from the definition.
pub fn cotype_sides(
    x: &FiniteMetricSpace,
    values: &[usize],
    n: usize,
    m: usize,
    p: f64,
) -> (f64, f64) {
    let size = values.len();
    let index = |c: &[i64]| -> usize {
        c.iter()
            .rev()
            .fold(0usize, |acc, &v| acc * m + v.rem_euclid(m as i64) as usize)
    };
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for e in 0..size {
        let c: Vec<i64> = coords(e, n, m).into_iter().map(|v| v as i64).collect();
        for j in 0..n {
            let mut t = c.clone();
            t[j] += (m / 2) as i64;
            lhs += x.d(values[e], values[index(&t)]).powf(p);
        }
        for code in 0..3usize.pow(n as u32) {
            let mut t = c.clone();
            let mut r = code;
            for tj in t.iter_mut() {
                *tj += (r % 3) as i64 - 1;
                r /= 3;
            }
            rhs += x.d(values[e], values[index(&t)]).powf(p);
        }
    }
    (lhs / size as f64, rhs / (size as f64 * 3f64.powi(n as i32)))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Connected components of the graph joining points at distance `<= t`.
pub fn components_at(x: &FiniteMetricSpace, t: f64) -> Vec<Vec<usize>> {
    let k = x.len();
    let mut label: Vec<usize> = (0..k).collect();
    loop {
        let mut changed = false;
        for i in 0..k {
            for j in 0..k {
                if x.d(i, j) <= t && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for root in 0..k {
        let c: Vec<usize> = (0..k).filter(|&i| label[i] == root).collect();
        if !c.is_empty() {
            out.push(c);
        }
    }
    out
}
