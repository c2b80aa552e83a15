//! Metric cotype inequalities on a finite space.
//!
//! For `f: Z_m^n -> X` the evaluator computes
//!
//! ```text
//! lhs = E_eps sum_j d(f(eps), f(eps + (m/2) e_j))^p
//! rhs = E_eps E_{delta in {-1,0,1}^n} d(f(eps), f(eps + delta))^p
//! ```
//!
//! and the smallest `Gamma` with `lhs <= Gamma^p m^p n^{1-p/q} rhs`. Both sides are
//! also recomputed as edge sums over the graphs `L` and `R` of [`crate::torus`].

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::FiniteMetricSpace;
use crate::separation::{
    build_tree_structure, separation_constant, SeparationError, SeparationMode, DEFAULT_EXACT_LIMIT,
};
use crate::torus::{GraphKind, Torus, TorusError, TorusSubset};

/// Relative agreement required between the direct and edge-sum evaluations.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Largest function space the exhaustive search will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;

/// Cap on `m^n * 3^n`, the size of the offset table used by the evaluator.
pub const MAX_OFFSET_TABLE: usize = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CotypeError {
    #[error("function has {got} values but Z_{m}^{n} has {expected} points")]
    DimensionMismatch {
        n: usize,
        m: usize,
        expected: usize,
        got: usize,
    },
    #[error("function value {value} is not a point of a {points}-point space")]
    BadPoint { value: usize, points: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{side}: direct value {direct} disagrees with edge sum {edge}")]
    IdentityMismatch {
        side: &'static str,
        direct: f64,
        edge: f64,
    },
    #[error("scaling function overflows for q = {q}, n = {n}")]
    Overflow { q: f64, n: usize },
    #[error("scaling function is undefined for q = {0} (needs q > 1)")]
    ScalingUndefined(f64),
    #[error("search budget must be at least 1")]
    BudgetTooSmall,
    #[error("exhaustive search over {points}^{torus_points} functions exceeds {limit}")]
    TooLargeForExhaustive {
        points: usize,
        torus_points: usize,
        limit: u64,
    },
    #[error("torus Z_{m}^{n} is too large to evaluate")]
    TorusTooLarge { n: usize, m: usize },
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Separation(#[from] SeparationError),
}

/// `(p, q)` exponents, dimension `n`, side `m` and an optional declared constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotypeParams {
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

impl CotypeParams {
    pub fn new(p: f64, q: f64, n: usize, m: usize) -> Result<Self, CotypeError> {
        let params = CotypeParams {
            p,
            q,
            n,
            m,
            gamma: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self, CotypeError> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(CotypeError::InvalidParams(format!(
                "gamma must be >= 1, got {gamma}"
            )));
        }
        self.gamma = Some(gamma);
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CotypeError> {
        check_exponents(self.p, self.q)?;
        Torus::new(self.n, self.m)?;
        Ok(())
    }

    /// `m^p n^{1 - p/q}`.
    pub fn scale(&self) -> f64 {
        (self.m as f64).powf(self.p) * (self.n as f64).powf(1.0 - self.p / self.q)
    }
}

fn check_exponents(p: f64, q: f64) -> Result<(), CotypeError> {
    if !(p >= 1.0 && q >= p) || !q.is_finite() {
        return Err(CotypeError::InvalidParams(format!(
            "need 1 <= p <= q < inf, got p = {p}, q = {q}"
        )));
    }
    Ok(())
}

/// A map `Z_m^n -> X`, stored densely in the torus' linear index order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusFunction {
    pub n: usize,
    pub m: usize,
    pub values: Vec<usize>,
}

impl TorusFunction {
    pub fn new(n: usize, m: usize, values: Vec<usize>) -> Result<Self, CotypeError> {
        let f = TorusFunction { n, m, values };
        f.torus()?;
        Ok(f)
    }

    pub fn constant(torus: Torus, point: usize) -> Self {
        TorusFunction {
            n: torus.n(),
            m: torus.m(),
            values: vec![point; torus.size()],
        }
    }

    /// Uniformly random values in `0..points`.
    pub fn random<R: Rng>(torus: Torus, points: usize, rng: &mut R) -> Self {
        TorusFunction {
            n: torus.n(),
            m: torus.m(),
            values: (0..torus.size())
                .map(|_| rng.gen_range(0..points))
                .collect(),
        }
    }

    /// Sample number `index` of the counter-based stream for `seed`.
    pub fn sample(torus: Torus, points: usize, seed: u64, index: u64) -> Self {
        Self::random(torus, points, &mut stream_rng(seed, index))
    }

    /// The torus shape, after checking that the value count matches it.
    pub fn torus(&self) -> Result<Torus, CotypeError> {
        let t = Torus::new(self.n, self.m)?;
        if t.size() != self.values.len() {
            return Err(CotypeError::DimensionMismatch {
                n: self.n,
                m: self.m,
                expected: t.size(),
                got: self.values.len(),
            });
        }
        Ok(t)
    }

    fn check_against(&self, space: &FiniteMetricSpace) -> Result<Torus, CotypeError> {
        let t = self.torus()?;
        if let Some(&value) = self.values.iter().find(|&&v| v >= space.len()) {
            return Err(CotypeError::BadPoint {
                value,
                points: space.len(),
            });
        }
        Ok(t)
    }

    /// `eps -> f(eps + v)`.
    pub fn translate(&self, offset: &[i64]) -> Result<Self, CotypeError> {
        let t = self.torus()?;
        let values = (0..t.size())
            .map(|i| self.values[t.shift(i, offset)])
            .collect();
        Ok(TorusFunction {
            n: self.n,
            m: self.m,
            values,
        })
    }

    /// `eps -> f(eps_sigma(0), ..., eps_sigma(n-1))`.
    pub fn permute_coordinates(&self, sigma: &[usize]) -> Result<Self, CotypeError> {
        let t = self.torus()?;
        let mut check = sigma.to_vec();
        check.sort_unstable();
        if check != (0..self.n).collect::<Vec<_>>() {
            return Err(CotypeError::InvalidParams(format!(
                "{sigma:?} is not a permutation"
            )));
        }
        let values = (0..t.size())
            .map(|i| {
                let c = t.coords(i);
                let permuted: Vec<usize> = sigma.iter().map(|&s| c[s]).collect();
                self.values[t.index(&permuted).expect("in range")]
            })
            .collect();
        Ok(TorusFunction {
            n: self.n,
            m: self.m,
            values,
        })
    }

    /// `eps -> g(f(eps))` for a point map `g`.
    pub fn compose(&self, assignment: &[usize]) -> Self {
        TorusFunction {
            n: self.n,
            m: self.m,
            values: self.values.iter().map(|&v| assignment[v]).collect(),
        }
    }
}

pub(crate) fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Both sides of the inequality and the constant they imply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CotypeEvaluation {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs` recomputed as `2 m^-n sum_{E_L} d^p`.
    pub lhs_edge_sum: f64,
    /// `rhs` recomputed as `2 (3m)^-n sum_{E_R} d^p`.
    pub rhs_edge_sum: f64,
    pub implied_gamma: f64,
    pub p: f64,
    pub q: f64,
    pub n: usize,
    pub m: usize,
}

/// Smallest `Gamma` with `lhs <= Gamma^p * scale * rhs`; zero for the `0/0` case.
pub fn implied_gamma(lhs: f64, rhs: f64, p: f64, scale: f64) -> f64 {
    if rhs > 0.0 {
        (lhs / (scale * rhs)).powf(1.0 / p)
    } else {
        0.0
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Precomputed neighbour tables for one torus.
#[derive(Debug, Clone)]
struct Tables {
    torus: Torus,
    /// `half[i * n + j]` is `i + (m/2) e_j`.
    half: Vec<usize>,
    /// `cube[i * 3^n + t]` is `i + delta_t`, `delta_t` ranging over all of `{-1,0,1}^n`.
    cube: Vec<usize>,
    cube_len: usize,
}

impl Tables {
    fn new(torus: Torus) -> Result<Self, CotypeError> {
        let n = torus.n();
        let too_large = CotypeError::TorusTooLarge { n, m: torus.m() };
        let cube_len = 3usize.checked_pow(n as u32).ok_or(too_large.clone())?;
        if torus
            .size()
            .checked_mul(cube_len)
            .is_none_or(|s| s > MAX_OFFSET_TABLE)
        {
            return Err(too_large);
        }
        let half_offsets = torus.offsets(GraphKind::L);
        let cube_offsets = crate::torus::cube_offsets(n);
        let mut half = Vec::with_capacity(torus.size() * n);
        let mut cube = Vec::with_capacity(torus.size() * cube_len);
        for i in 0..torus.size() {
            half.extend(half_offsets.iter().map(|o| torus.shift(i, o)));
            cube.extend(cube_offsets.iter().map(|o| torus.shift(i, o)));
        }
        Ok(Tables {
            torus,
            half,
            cube,
            cube_len,
        })
    }

    /// Unnormalised ordered sums `(sum_{eps,j}, sum_{eps,delta})`.
    fn sums(&self, pow: &PowTable, values: &[usize]) -> (f64, f64) {
        let n = self.torus.n();
        let mut sl = 0.0;
        let mut sr = 0.0;
        for (i, &v) in values.iter().enumerate() {
            for &j in &self.half[i * n..(i + 1) * n] {
                sl += pow.get(v, values[j]);
            }
            for &j in &self.cube[i * self.cube_len..(i + 1) * self.cube_len] {
                sr += pow.get(v, values[j]);
            }
        }
        (sl, sr)
    }

    /// Change of the ordered sums when `values[i]` becomes `to`.
    fn delta(&self, pow: &PowTable, values: &[usize], i: usize, to: usize) -> (f64, f64) {
        let n = self.torus.n();
        let from = values[i];
        let mut dl = 0.0;
        for &j in &self.half[i * n..(i + 1) * n] {
            dl += pow.get(to, values[j]) - pow.get(from, values[j]);
        }
        let mut dr = 0.0;
        for &j in &self.cube[i * self.cube_len..(i + 1) * self.cube_len] {
            if j != i {
                dr += pow.get(to, values[j]) - pow.get(from, values[j]);
            }
        }
        (2.0 * dl, 2.0 * dr)
    }

    fn lhs_norm(&self) -> f64 {
        self.torus.size() as f64
    }

    fn rhs_norm(&self) -> f64 {
        (self.torus.size() * self.cube_len) as f64
    }
}

/// `d(x, y)^p` for every pair of points.
#[derive(Debug, Clone)]
struct PowTable {
    k: usize,
    values: Vec<f64>,
}

impl PowTable {
    fn new(space: &FiniteMetricSpace, p: f64) -> Self {
        let k = space.len();
        let mut values = vec![0.0; k * k];
        for i in 0..k {
            for j in 0..k {
                values[i * k + j] = if i == j { 0.0 } else { space.d(i, j).powf(p) };
            }
        }
        PowTable { k, values }
    }

    #[inline]
    fn get(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.k + b]
    }
}

/// Evaluates both sides directly and through the `L`/`R` edge sums.
///
/// For `m >= 4` the two routes must agree to [`IDENTITY_TOLERANCE`]; for `m = 2` the
/// graphs have coinciding offsets and only the direct values are authoritative.
pub fn evaluate_cotype(
    space: &FiniteMetricSpace,
    f: &TorusFunction,
    p: f64,
    q: f64,
) -> Result<CotypeEvaluation, CotypeError> {
    check_exponents(p, q)?;
    let torus = f.check_against(space)?;
    let tables = Tables::new(torus)?;
    let pow = PowTable::new(space, p);
    let (sl, sr) = tables.sums(&pow, &f.values);
    let lhs = sl / tables.lhs_norm();
    let rhs = sr / tables.rhs_norm();

    let (n, m) = (torus.n(), torus.m());
    let edge_sum = |kind| -> f64 {
        torus
            .edges(kind)
            .into_iter()
            .map(|(u, v)| pow.get(f.values[u], f.values[v]))
            .sum()
    };
    let size = torus.size() as f64;
    let lhs_edge_sum = 2.0 * edge_sum(GraphKind::L) / size;
    let rhs_edge_sum = 2.0 * edge_sum(GraphKind::R) / (size * 3f64.powi(n as i32));
    if m >= 4 {
        if !rel_close(lhs, lhs_edge_sum, IDENTITY_TOLERANCE) {
            return Err(CotypeError::IdentityMismatch {
                side: "lhs",
                direct: lhs,
                edge: lhs_edge_sum,
            });
        }
        if !rel_close(rhs, rhs_edge_sum, IDENTITY_TOLERANCE) {
            return Err(CotypeError::IdentityMismatch {
                side: "rhs",
                direct: rhs,
                edge: rhs_edge_sum,
            });
        }
    }
    let params = CotypeParams {
        p,
        q,
        n,
        m,
        gamma: None,
    };
    Ok(CotypeEvaluation {
        lhs,
        rhs,
        lhs_edge_sum,
        rhs_edge_sum,
        implied_gamma: implied_gamma(lhs, rhs, p, params.scale()),
        p,
        q,
        n,
        m,
    })
}

/// Smallest even `m` with `m^{q-1} >= n 3^n`.
///
/// The inequality is re-checked exactly with big integers when `q - 1` is an integer,
/// and in logarithms otherwise.
pub fn mn_scaling_function(q: f64, n: usize) -> Result<usize, CotypeError> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(CotypeError::ScalingUndefined(q));
    }
    if n == 0 {
        return Err(CotypeError::InvalidParams("n must be positive".into()));
    }
    let overflow = CotypeError::Overflow { q, n };
    let log_target = (n as f64).ln() + n as f64 * 3f64.ln();
    let threshold = (log_target / (q - 1.0)).exp();
    if !threshold.is_finite() || threshold > 2f64.powi(52) {
        return Err(overflow);
    }
    let satisfies = |m: u64| -> bool {
        let e = q - 1.0;
        if e.fract() == 0.0 && e <= 4096.0 {
            let lhs = BigUint::from(m).pow(e as u32);
            let rhs = BigUint::from(n) * BigUint::from(3u32).pow(n as u32);
            lhs >= rhs
        } else {
            e * (m as f64).ln() >= log_target
        }
    };
    let mut m = (threshold.ceil() as u64).max(2);
    if m % 2 == 1 {
        m += 1;
    }
    while !satisfies(m) {
        m = m.checked_add(2).ok_or(overflow.clone())?;
    }
    while m > 2 && satisfies(m - 2) {
        m -= 2;
    }
    usize::try_from(m).map_err(|_| overflow)
}

/// `Gamma^-1 n^{1/q}`, a lower bound any valid side length must meet.
pub fn scaling_lower_bound(gamma: f64, q: f64, n: usize) -> f64 {
    (n as f64).powf(1.0 / q) / gamma
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStrategy {
    Exhaustive,
    Random,
    Local,
}

/// Best function found by [`gamma_search`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub strategy: SearchStrategy,
    pub best: TorusFunction,
    pub best_gamma: f64,
    /// Functions scored: enumerated, sampled, or visited along local-search paths.
    pub visited: u64,
    pub restarts: u64,
}

/// Searches for a function maximising the implied constant.
///
/// * `Exhaustive` enumerates all `|X|^{m^n}` functions (at most [`EXHAUSTIVE_LIMIT`]).
/// * `Random` scores `budget` seeded uniform functions.
/// * `Local` climbs from seeded random starts, changing one value at a time in
///   `(eps, point)` order and accepting the first improvement; a full pass without
///   improvement triggers a restart. `budget` counts visited functions (starts plus
///   accepted moves).
///
/// Sample `i` of a run is drawn from stream `i` of the seed, so results do not depend
/// on the number of worker threads. Ties go to the earliest sample.
pub fn gamma_search(
    space: &FiniteMetricSpace,
    params: &CotypeParams,
    strategy: SearchStrategy,
    budget: u64,
    seed: u64,
) -> Result<SearchResult, CotypeError> {
    params.validate()?;
    let torus = Torus::new(params.n, params.m)?;
    let tables = Tables::new(torus)?;
    let pow = PowTable::new(space, params.p);
    let k = space.len();
    if k == 0 {
        return Err(CotypeError::InvalidParams("empty space".into()));
    }
    let scale = params.scale();
    let score = |values: &[usize]| {
        let (sl, sr) = tables.sums(&pow, values);
        implied_gamma(
            sl / tables.lhs_norm(),
            sr / tables.rhs_norm(),
            params.p,
            scale,
        )
    };
    let pick = |a: (f64, u64), b: (f64, u64)| {
        if a.0 > b.0 || (a.0 == b.0 && a.1 <= b.1) {
            a
        } else {
            b
        }
    };

    let (best, best_gamma, visited, restarts) = match strategy {
        SearchStrategy::Exhaustive => {
            let total = (k as u64)
                .checked_pow(torus.size() as u32)
                .filter(|&t| t <= EXHAUSTIVE_LIMIT)
                .ok_or(CotypeError::TooLargeForExhaustive {
                    points: k,
                    torus_points: torus.size(),
                    limit: EXHAUSTIVE_LIMIT,
                })?;
            let decode = |mut t: u64| -> Vec<usize> {
                (0..torus.size())
                    .map(|_| {
                        let v = (t % k as u64) as usize;
                        t /= k as u64;
                        v
                    })
                    .collect()
            };
            let (g, t) = (0..total)
                .into_par_iter()
                .map(|t| (score(&decode(t)), t))
                .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick);
            (decode(t), g, total, 0)
        }
        SearchStrategy::Random => {
            if budget == 0 {
                return Err(CotypeError::BudgetTooSmall);
            }
            let (g, s) = (0..budget)
                .into_par_iter()
                .map(|s| (score(&TorusFunction::sample(torus, k, seed, s).values), s))
                .reduce(|| (f64::NEG_INFINITY, u64::MAX), pick);
            (
                TorusFunction::sample(torus, k, seed, s).values,
                g,
                budget,
                0,
            )
        }
        SearchStrategy::Local => {
            if budget == 0 {
                return Err(CotypeError::BudgetTooSmall);
            }
            local_search(&tables, &pow, params, k, budget, seed)
        }
    };
    let best = TorusFunction {
        n: params.n,
        m: params.m,
        values: best,
    };
    // Incremental updates drift slightly; report the exact score of the winner.
    let best_gamma = if strategy == SearchStrategy::Local {
        score(&best.values)
    } else {
        best_gamma
    };
    Ok(SearchResult {
        strategy,
        best,
        best_gamma,
        visited,
        restarts,
    })
}

fn local_search(
    tables: &Tables,
    pow: &PowTable,
    params: &CotypeParams,
    k: usize,
    budget: u64,
    seed: u64,
) -> (Vec<usize>, f64, u64, u64) {
    let torus = tables.torus;
    let size = torus.size();
    let scale = params.scale();
    let ratio = |sl: f64, sr: f64| {
        implied_gamma(
            sl.max(0.0) / tables.lhs_norm(),
            sr.max(0.0) / tables.rhs_norm(),
            params.p,
            scale,
        )
    };
    let mut best: (Vec<usize>, f64) = (Vec::new(), f64::NEG_INFINITY);
    let mut visited = 0u64;
    let mut restarts = 0u64;
    while visited < budget {
        let mut values = TorusFunction::sample(torus, k, seed, restarts).values;
        restarts += 1;
        visited += 1;
        let (mut sl, mut sr) = tables.sums(pow, &values);
        let mut current = ratio(sl, sr);
        if current > best.1 {
            best = (values.clone(), current);
        }
        if k == 1 {
            break;
        }
        let moves = size * k;
        let mut pos = 0usize;
        let mut since_improvement = 0usize;
        while visited < budget && since_improvement < moves {
            let (eps, point) = (pos / k, pos % k);
            pos = (pos + 1) % moves;
            since_improvement += 1;
            if values[eps] == point {
                continue;
            }
            let (dl, dr) = tables.delta(pow, &values, eps, point);
            let candidate = ratio(sl + dl, sr + dr);
            if candidate > current * (1.0 + 1e-12) && candidate > current {
                values[eps] = point;
                sl += dl;
                sr += dr;
                current = candidate;
                visited += 1;
                since_improvement = 0;
                if current > best.1 {
                    best = (values.clone(), current);
                }
            }
        }
    }
    (best.0, best.1, visited, restarts)
}

/// One level `i` of the certificate, along the branch `1_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRow {
    pub level: usize,
    /// `|F_{1_i 0}|`, after the relabeling that keeps it at most `m^n / 2`.
    pub subset_size: usize,
    pub diam: f64,
    /// `|boundary_R F_{1_i 0}|`.
    pub boundary: usize,
    /// `m^-n 2n |F| diam^q`.
    pub lhs_level: f64,
    /// `m^-n 3^-n m^q |boundary| diam^q`.
    pub rhs_level: f64,
    /// `3^-n m^q |boundary| >= 2n |F|`.
    pub counting_holds: bool,
    /// Whether the children were swapped at this level.
    pub swapped: bool,
}

/// Level-by-level replay of the bound `lhs <= C^q m^q rhs` for one function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub c: f64,
    pub c_mode: SeparationMode,
    pub q: f64,
    pub n: usize,
    pub m: usize,
    pub required_m: usize,
    pub scaling_too_small: bool,
    pub rows: Vec<CertificateRow>,
    pub lhs: f64,
    pub rhs: f64,
    /// `C^q m^q rhs`.
    pub bound: f64,
    pub lhs_levels_total: f64,
    pub rhs_levels_total: f64,
    pub rows_pass: bool,
    pub pass: bool,
}

impl Certificate {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "level,subset_size,diam,boundary,lhs_level,rhs_level,counting_holds,swapped\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.level,
                r.subset_size,
                r.diam,
                r.boundary,
                r.lhs_level,
                r.rhs_level,
                r.counting_holds,
                r.swapped
            ));
        }
        out
    }
}

/// Builds a separated tree on `f(Z_m^n)` and walks the branch `1, 11, 111, ...`,
/// recording the per-level estimates that bound both sides of the `(q, q)` inequality.
///
/// `C` is the exact separation constant of the image when it has at most
/// [`DEFAULT_EXACT_LIMIT`] points, otherwise the constant realised by the canonical tree.
/// A side length below [`mn_scaling_function`] is flagged, not rejected.
pub fn sts_certificate(
    space: &FiniteMetricSpace,
    f: &TorusFunction,
    q: f64,
) -> Result<Certificate, CotypeError> {
    let required_m = mn_scaling_function(q, f.n)?;
    let torus = f.check_against(space)?;
    let eval = evaluate_cotype(space, f, q, q)?;
    let (n, m) = (torus.n(), torus.m());
    let size = torus.size();
    let mf = m as f64;
    let three_n = 3f64.powi(n as i32);

    let mut image: Vec<usize> = f.values.clone();
    image.sort_unstable();
    image.dedup();

    let mut rows = Vec::new();
    let (c, c_mode) = if image.len() < 2 {
        (1.0, SeparationMode::Exact)
    } else {
        let sub = space.subspace(&image);
        let (c, c_mode) = if image.len() <= DEFAULT_EXACT_LIMIT {
            (
                separation_constant(&sub, SeparationMode::Exact)?.c_sep,
                SeparationMode::Exact,
            )
        } else {
            let t = build_tree_structure(&sub, f64::MAX)?;
            (t.realized_constant(&sub), SeparationMode::Dendrogram)
        };
        let tree = build_tree_structure(&sub, c)?;
        // Local image index for every torus point.
        let local: Vec<usize> = f
            .values
            .iter()
            .map(|v| image.binary_search(v).expect("value in image"))
            .collect();
        let mut node = 0usize;
        let mut level = 0usize;
        while let Some([a, b]) = tree.nodes[node].children {
            let members = |idx: usize| -> Vec<usize> {
                let pts = &tree.nodes[idx].points;
                (0..size)
                    .filter(|&e| pts.binary_search(&local[e]).is_ok())
                    .collect()
            };
            let (mut zero, mut one) = (a, b);
            let mut f_zero = members(zero);
            let swapped = 2 * f_zero.len() > size;
            if swapped {
                std::mem::swap(&mut zero, &mut one);
                f_zero = members(zero);
            }
            let subset = TorusSubset::from_indices(torus, &f_zero)?;
            let boundary = subset.edge_boundary(GraphKind::R);
            let diam = sub.diam(&tree.nodes[node].points);
            let dq = diam.powf(q);
            let fz = f_zero.len() as f64;
            let counting_lhs = mf.powf(q) * boundary as f64 / three_n;
            let counting_rhs = 2.0 * n as f64 * fz;
            rows.push(CertificateRow {
                level,
                subset_size: f_zero.len(),
                diam,
                boundary,
                lhs_level: counting_rhs * dq / size as f64,
                rhs_level: counting_lhs * dq / size as f64,
                counting_holds: counting_lhs >= counting_rhs * (1.0 - 1e-12),
                swapped,
            });
            node = one;
            level += 1;
        }
        (c, c_mode)
    };

    let bound = c.powf(q) * mf.powf(q) * eval.rhs;
    let lhs_levels_total: f64 = rows.iter().map(|r| r.lhs_level).sum();
    let rhs_levels_total: f64 = rows.iter().map(|r| r.rhs_level).sum();
    let rows_pass = rows.iter().all(|r| r.counting_holds);
    let pass = eval.lhs <= bound * (1.0 + 1e-12);
    Ok(Certificate {
        c,
        c_mode,
        q,
        n,
        m,
        required_m,
        scaling_too_small: m < required_m,
        rows,
        lhs: eval.lhs,
        rhs: eval.rhs,
        bound,
        lhs_levels_total,
        rhs_levels_total,
        rows_pass,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> FiniteMetricSpace {
        FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn constant_function_is_zero_over_zero() {
        let x = two_points();
        let f = TorusFunction::constant(Torus::new(2, 4).unwrap(), 1);
        let e = evaluate_cotype(&x, &f, 2.0, 2.0).unwrap();
        assert_eq!((e.lhs, e.rhs, e.implied_gamma), (0.0, 0.0, 0.0));
    }

    #[test]
    fn two_point_torus_of_side_two() {
        let x = two_points();
        let f = TorusFunction::new(1, 2, vec![0, 1]).unwrap();
        for p in [1.0, 2.0, 3.5] {
            let e = evaluate_cotype(&x, &f, p, p).unwrap();
            assert_eq!(e.lhs, 1.0);
            assert!((e.rhs - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn hand_checked_function() {
        let x = two_points();
        let f = TorusFunction::new(1, 4, vec![0, 0, 1, 1]).unwrap();
        let e = evaluate_cotype(&x, &f, 2.0, 2.0).unwrap();
        assert_eq!(e.lhs, 1.0);
        assert!((e.rhs - 1.0 / 3.0).abs() < 1e-15);
        assert!((e.implied_gamma - 3f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            TorusFunction::new(2, 4, vec![0; 15]),
            Err(CotypeError::DimensionMismatch {
                expected: 16,
                got: 15,
                ..
            })
        ));
        let f = TorusFunction::new(1, 4, vec![0, 0, 5, 1]).unwrap();
        assert!(matches!(
            evaluate_cotype(&two_points(), &f, 2.0, 2.0),
            Err(CotypeError::BadPoint { .. })
        ));
        assert!(matches!(
            TorusFunction::new(1, 3, vec![0; 3]),
            Err(CotypeError::Torus(_))
        ));
    }

    #[test]
    fn scaling_function_examples() {
        assert_eq!(mn_scaling_function(2.0, 1).unwrap(), 4);
        assert_eq!(mn_scaling_function(2.0, 2).unwrap(), 18);
        assert_eq!(mn_scaling_function(3.0, 1).unwrap(), 2);
        assert_eq!(
            mn_scaling_function(1.0, 2),
            Err(CotypeError::ScalingUndefined(1.0))
        );
        assert!(matches!(
            mn_scaling_function(1.0001, 30),
            Err(CotypeError::Overflow { .. })
        ));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(scaling_lower_bound(1.0, 2.0, 4), 2.0);
        assert_eq!(scaling_lower_bound(2.0, 2.0, 4), 1.0);
        assert!((scaling_lower_bound(1.0, 3.0, 8) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn single_point_space_has_zero_gamma() {
        let x = FiniteMetricSpace::from_matrix(vec![vec![0.0]]).unwrap();
        let params = CotypeParams::new(2.0, 2.0, 1, 4).unwrap();
        for s in [
            SearchStrategy::Exhaustive,
            SearchStrategy::Random,
            SearchStrategy::Local,
        ] {
            assert_eq!(gamma_search(&x, &params, s, 10, 1).unwrap().best_gamma, 0.0);
        }
    }

    #[test]
    fn search_errors() {
        let x = two_points();
        let params = CotypeParams::new(2.0, 2.0, 2, 6).unwrap();
        assert!(matches!(
            gamma_search(&x, &params, SearchStrategy::Exhaustive, 1, 0),
            Err(CotypeError::TooLargeForExhaustive { .. })
        ));
        assert_eq!(
            gamma_search(&x, &params, SearchStrategy::Random, 0, 0),
            Err(CotypeError::BudgetTooSmall)
        );
        assert!(CotypeParams::new(2.0, 1.5, 1, 4).is_err());
        assert!(CotypeParams::new(1.0, 2.0, 1, 5).is_err());
    }

    #[test]
    fn local_search_is_deterministic_and_respects_budget() {
        let x = crate::generate::GeneratorSpec::seeded(
            crate::generate::GeneratorKind::RandomEuclidean { points: 5, dim: 2 },
            3,
        )
        .generate()
        .unwrap();
        let params = CotypeParams::new(2.0, 2.0, 2, 4).unwrap();
        let a = gamma_search(&x, &params, SearchStrategy::Local, 200, 9).unwrap();
        let b = gamma_search(&x, &params, SearchStrategy::Local, 200, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.visited, 200);
        let direct = evaluate_cotype(&x, &a.best, 2.0, 2.0)
            .unwrap()
            .implied_gamma;
        assert!((direct - a.best_gamma).abs() <= 1e-12 * direct);
    }

    #[test]
    fn certificate_for_constant_function() {
        let x = two_points();
        let f = TorusFunction::constant(Torus::new(1, 4).unwrap(), 0);
        let c = sts_certificate(&x, &f, 2.0).unwrap();
        assert!(c.rows.is_empty());
        assert!(c.pass && c.rows_pass && !c.scaling_too_small);
    }

    #[test]
    fn certificate_flags_small_side() {
        let x = two_points();
        let f = TorusFunction::new(1, 2, vec![0, 1]).unwrap();
        let c = sts_certificate(&x, &f, 2.0).unwrap();
        assert!(c.scaling_too_small);
        assert_eq!(c.required_m, 4);
        assert_eq!(c.rows.len(), 1);
    }
}
