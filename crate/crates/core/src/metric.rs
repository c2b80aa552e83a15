//! Finite metric spaces and the diagnostics that only need the distance matrix:
//! axiom validation, the ultrametric test, the direct `L^s` exponent, snowflaking,
//! the subdominant (single-linkage) ultrametric and threshold chains.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Relative tolerance used for axiom checks unless the caller overrides it.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Upper end of the bisection window for per-triple critical exponents.
pub const LS_EXPONENT_CAP: f64 = 64.0;

/// Absolute precision of the bisection on the exponent.
pub const LS_EXPONENT_PRECISION: f64 = 1e-10;

/// A single failed metric axiom together with the indices that witness it.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonSquare { rows: usize, row: usize, len: usize },
    LabelCount { labels: usize, points: usize },
    NonFinite { i: usize, j: usize },
    NonZeroDiagonal { i: usize },
    NegativeEntry { i: usize, j: usize },
    ZeroDistance { i: usize, j: usize },
    AsymmetricEntry { i: usize, j: usize },
    TriangleViolation { i: usize, j: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonSquare { rows, row, len } => {
                write!(f, "NonSquare: row {row} has {len} entries, expected {rows}")
            }
            Violation::LabelCount { labels, points } => {
                write!(f, "LabelCount: {labels} labels for {points} points")
            }
            Violation::NonFinite { i, j } => write!(f, "NonFinite({i},{j})"),
            Violation::NonZeroDiagonal { i } => write!(f, "NonZeroDiagonal({i})"),
            Violation::NegativeEntry { i, j } => write!(f, "NegativeEntry({i},{j})"),
            Violation::ZeroDistance { i, j } => write!(f, "ZeroDistance({i},{j})"),
            Violation::AsymmetricEntry { i, j } => write!(f, "AsymmetricEntry({i},{j})"),
            Violation::TriangleViolation { i, j, k } => {
                write!(
                    f,
                    "TriangleViolation({i},{j},{k}): d({i},{k}) > d({i},{j}) + d({j},{k})"
                )
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("not a metric: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("point index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("distance to an empty set is undefined")]
    EmptySet,
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl MetricError {
    /// The violations carried by an `Invalid` error, empty otherwise.
    pub fn violations(&self) -> &[Violation] {
        match self {
            MetricError::Invalid(v) => v,
            _ => &[],
        }
    }
}

/// Ordered triple `(x, y, z)` with `z` the intermediate point.
pub type Triple = (usize, usize, usize);

/// A validated finite metric space `(X, d)` with a row-major distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    tolerance: f64,
}

fn within(value: f64, bound: f64, tol: f64) -> bool {
    value <= bound + tol * bound.abs().max(value.abs())
}

impl FiniteMetricSpace {
    /// Validates `matrix` as a metric and collects one witness for every violated axiom.
    ///
    /// Entries below the diagonal are only compared against their mirror; the stored
    /// matrix is the upper triangle mirrored, so it is exactly symmetric.
    pub fn new(
        matrix: Vec<Vec<f64>>,
        labels: Vec<String>,
        tolerance: f64,
    ) -> Result<Self, MetricError> {
        if !(tolerance >= 0.0) || !tolerance.is_finite() {
            return Err(MetricError::BadParameter(format!("tolerance {tolerance}")));
        }
        let k = matrix.len();
        let mut violations = Vec::new();
        if let Some((row, r)) = matrix.iter().enumerate().find(|(_, r)| r.len() != k) {
            violations.push(Violation::NonSquare {
                rows: k,
                row,
                len: r.len(),
            });
            return Err(MetricError::Invalid(violations));
        }
        if labels.len() != k {
            violations.push(Violation::LabelCount {
                labels: labels.len(),
                points: k,
            });
            return Err(MetricError::Invalid(violations));
        }

        let first = |v: Violation, violations: &mut Vec<Violation>| {
            if !violations
                .iter()
                .any(|w| std::mem::discriminant(w) == std::mem::discriminant(&v))
            {
                violations.push(v);
            }
        };

        for i in 0..k {
            for j in 0..k {
                let x = matrix[i][j];
                if !x.is_finite() {
                    first(Violation::NonFinite { i, j }, &mut violations);
                } else if i == j {
                    if x != 0.0 {
                        first(Violation::NonZeroDiagonal { i }, &mut violations);
                    }
                } else if x < 0.0 {
                    first(Violation::NegativeEntry { i, j }, &mut violations);
                } else if x == 0.0 {
                    first(Violation::ZeroDistance { i, j }, &mut violations);
                }
                if i < j {
                    let y = matrix[j][i];
                    if x.is_finite()
                        && y.is_finite()
                        && (x - y).abs() > tolerance * x.abs().max(y.abs())
                    {
                        first(Violation::AsymmetricEntry { i, j }, &mut violations);
                    }
                }
            }
        }
        if !violations.is_empty() {
            return Err(MetricError::Invalid(violations));
        }

        let mut dist = vec![0.0; k * k];
        for i in 0..k {
            for j in i + 1..k {
                dist[i * k + j] = matrix[i][j];
                dist[j * k + i] = matrix[i][j];
            }
        }
        let space = FiniteMetricSpace {
            labels,
            dist,
            tolerance,
        };
        if let Some((i, j, l)) = space.triangle_violation() {
            return Err(MetricError::Invalid(vec![Violation::TriangleViolation {
                i,
                j,
                k: l,
            }]));
        }
        Ok(space)
    }

    /// Same as [`FiniteMetricSpace::new`] with labels `0..k` and the default tolerance.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let labels = (0..matrix.len()).map(|i| i.to_string()).collect();
        Self::new(matrix, labels, DEFAULT_TOLERANCE)
    }

    /// Points of the real line with the absolute-value metric.
    pub fn from_line(points: &[f64]) -> Result<Self, MetricError> {
        let matrix = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        Self::from_matrix(matrix)
    }

    fn triangle_violation(&self) -> Option<Triple> {
        let k = self.len();
        for i in 0..k {
            for l in i + 1..k {
                let direct = self.d(i, l);
                for j in 0..k {
                    if j == i || j == l {
                        continue;
                    }
                    if !within(direct, self.d(i, j) + self.d(j, l), self.tolerance) {
                        return Some((i, j, l));
                    }
                }
            }
        }
        None
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.labels.len() + j]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    /// Full symmetric matrix as nested rows.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist
            .chunks(self.len().max(1))
            .take(self.len())
            .map(|r| r.to_vec())
            .collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn check_index(&self, index: usize) -> Result<(), MetricError> {
        if index < self.len() {
            Ok(())
        } else {
            Err(MetricError::IndexOutOfRange {
                index,
                len: self.len(),
            })
        }
    }

    /// Diameter of a subset; zero for empty sets and singletons.
    pub fn diam(&self, subset: &[usize]) -> f64 {
        let mut best = 0.0f64;
        for (a, &x) in subset.iter().enumerate() {
            for &y in &subset[a + 1..] {
                best = best.max(self.d(x, y));
            }
        }
        best
    }

    /// `dist(A, B) = min d(a, b)`; an empty argument is an error.
    pub fn set_distance(&self, a: &[usize], b: &[usize]) -> Result<f64, MetricError> {
        if a.is_empty() || b.is_empty() {
            return Err(MetricError::EmptySet);
        }
        let mut best = f64::INFINITY;
        for &x in a {
            for &y in b {
                best = best.min(self.d(x, y));
            }
        }
        Ok(best)
    }

    /// The subspace on `points`, in the given order.
    pub fn subspace(&self, points: &[usize]) -> FiniteMetricSpace {
        let k = points.len();
        let mut dist = vec![0.0; k * k];
        for (a, &x) in points.iter().enumerate() {
            for (b, &y) in points.iter().enumerate() {
                dist[a * k + b] = self.d(x, y);
            }
        }
        FiniteMetricSpace {
            labels: points.iter().map(|&i| self.labels[i].clone()).collect(),
            dist,
            tolerance: self.tolerance,
        }
    }

    /// Multiplies every distance by `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> Result<FiniteMetricSpace, MetricError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(MetricError::BadParameter(format!("scale factor {lambda}")));
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.iter().map(|d| d * lambda).collect(),
            tolerance: self.tolerance,
        })
    }

    /// Checks `d(x,y) <= max{d(x,z), d(z,y)}` over all triples at the space tolerance.
    pub fn check_ultrametric(&self) -> Result<(), Triple> {
        self.check_ultrametric_with(self.tolerance)
    }

    /// Ultrametric check at an explicit relative tolerance (use `0.0` for an exact test).
    pub fn check_ultrametric_with(&self, tolerance: f64) -> Result<(), Triple> {
        let k = self.len();
        for x in 0..k {
            for y in x + 1..k {
                let c = self.d(x, y);
                for z in 0..k {
                    if z == x || z == y {
                        continue;
                    }
                    if !within(c, self.d(x, z).max(self.d(z, y)), tolerance) {
                        return Err((x, y, z));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_ultrametric(&self) -> bool {
        self.check_ultrametric().is_ok()
    }

    /// Largest `s` for which `d(x,y) <= (d(x,z)^s + d(z,y)^s)^{1/s}` holds on every triple.
    ///
    /// Returns `f64::INFINITY` exactly when the ultrametric check passes. Otherwise the
    /// result is the minimum per-triple critical exponent, capped at [`LS_EXPONENT_CAP`].
    pub fn ls_metric_exponent(&self) -> f64 {
        let mut best = f64::INFINITY;
        let mut bounded = false;
        let k = self.len();
        for x in 0..k {
            for y in x + 1..k {
                let c = self.d(x, y);
                for z in 0..k {
                    if z == x || z == y {
                        continue;
                    }
                    let (a, b) = (self.d(x, z), self.d(z, y));
                    if within(c, a.max(b), self.tolerance) {
                        continue;
                    }
                    bounded = true;
                    best = best.min(critical_exponent(a / c, b / c));
                }
            }
        }
        if bounded {
            best.min(LS_EXPONENT_CAP)
        } else {
            f64::INFINITY
        }
    }

    /// The space `(X, d^alpha)`. For `alpha > 1` the result is re-validated.
    pub fn snowflake(&self, alpha: f64) -> Result<FiniteMetricSpace, MetricError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(MetricError::BadParameter(format!(
                "snowflake exponent {alpha}"
            )));
        }
        let dist: Vec<f64> = self
            .dist
            .iter()
            .map(|&d| if alpha == 1.0 { d } else { d.powf(alpha) })
            .collect();
        let space = FiniteMetricSpace {
            labels: self.labels.clone(),
            dist,
            tolerance: self.tolerance,
        };
        if alpha > 1.0 {
            if let Some((i, j, k)) = space.triangle_violation() {
                return Err(MetricError::Invalid(vec![Violation::TriangleViolation {
                    i,
                    j,
                    k,
                }]));
            }
        }
        Ok(space)
    }

    /// The subdominant ultrametric `rho` and the distortion `max d / rho`.
    ///
    /// `rho(x, y)` is the minimax step over chains from `x` to `y`, read off a minimum
    /// spanning tree. Every entry of `rho` is an entry of `d`, so the result is an exact
    /// ultrametric.
    pub fn subdominant_ultrametric(&self) -> (FiniteMetricSpace, f64) {
        let k = self.len();
        let all: Vec<usize> = (0..k).collect();
        let tree = minimum_spanning_tree(self, &all);
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); k];
        for &(a, b, w) in &tree {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        let mut rho = vec![0.0; k * k];
        let mut stack = Vec::new();
        for s in 0..k {
            let mut seen = vec![false; k];
            seen[s] = true;
            stack.push((s, 0.0f64));
            while let Some((u, m)) = stack.pop() {
                rho[s * k + u] = m;
                for &(v, w) in &adj[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push((v, m.max(w)));
                    }
                }
            }
        }
        let mut distortion = 1.0f64;
        for i in 0..k {
            for j in i + 1..k {
                distortion = distortion.max(self.d(i, j) / rho[i * k + j]);
            }
        }
        let u = FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: rho,
            tolerance: self.tolerance,
        };
        (u, distortion)
    }

    /// Breadth-first search for an `epsilon`-chain (all steps `< epsilon`) from `a` to `b`.
    pub fn find_chain(
        &self,
        a: usize,
        b: usize,
        epsilon: f64,
    ) -> Result<Option<Chain>, MetricError> {
        self.check_index(a)?;
        self.check_index(b)?;
        if !(epsilon > 0.0) {
            return Err(MetricError::BadParameter(format!("epsilon {epsilon}")));
        }
        let k = self.len();
        let mut parent = vec![usize::MAX; k];
        parent[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for v in 0..k {
                if parent[v] == usize::MAX && self.d(u, v) < epsilon {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if parent[b] == usize::MAX {
            return Ok(None);
        }
        let mut points = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[cur];
            points.push(cur);
        }
        points.reverse();
        Ok(Some(Chain { points, epsilon }))
    }
}

/// Solves `a^s + b^s = 1` for `s` in `[1, cap]`, where `max(a, b) < 1`.
fn critical_exponent(a: f64, b: f64) -> f64 {
    let g = |s: f64| a.powf(s) + b.powf(s) - 1.0;
    if g(1.0) <= 0.0 {
        return 1.0;
    }
    if g(LS_EXPONENT_CAP) > 0.0 {
        return LS_EXPONENT_CAP;
    }
    let (mut lo, mut hi) = (1.0, LS_EXPONENT_CAP);
    while hi - lo > LS_EXPONENT_PRECISION {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Prim's algorithm on the subset `points`; edges are `(u, v, weight)` in global indices.
///
/// Ties are broken towards the lowest position in `points`, so the tree is deterministic.
pub fn minimum_spanning_tree(
    space: &FiniteMetricSpace,
    points: &[usize],
) -> Vec<(usize, usize, f64)> {
    let k = points.len();
    if k < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    let mut link = vec![0usize; k];
    let mut edges = Vec::with_capacity(k - 1);
    in_tree[0] = true;
    for v in 1..k {
        best[v] = space.d(points[0], points[v]);
    }
    for _ in 1..k {
        let mut next = usize::MAX;
        for v in 0..k {
            if !in_tree[v] && (next == usize::MAX || best[v] < best[next]) {
                next = v;
            }
        }
        in_tree[next] = true;
        edges.push((points[link[next]], points[next], best[next]));
        for v in 0..k {
            if !in_tree[v] {
                let w = space.d(points[next], points[v]);
                if w < best[v] {
                    best[v] = w;
                    link[v] = next;
                }
            }
        }
    }
    edges
}

/// An `epsilon`-chain `x_0, ..., x_k`: consecutive distances strictly below `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub points: Vec<usize>,
    pub epsilon: f64,
}

impl Chain {
    pub fn is_valid_in(&self, space: &FiniteMetricSpace) -> bool {
        !self.points.is_empty()
            && self.points.iter().all(|&p| p < space.len())
            && self
                .points
                .windows(2)
                .all(|w| space.d(w[0], w[1]) < self.epsilon)
    }

    pub fn diam(&self, space: &FiniteMetricSpace) -> f64 {
        space.diam(&self.points)
    }
}
