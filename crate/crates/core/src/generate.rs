//! Deterministic generators for the standard example spaces.
//!
//! Specs are written `kind=value[,key=value...]`, e.g. `cantor-level=2`,
//! `random-ultrametric=8,seed=7` or `random-euclidean=20,dim=3,seed=1`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::metric::{FiniteMetricSpace, MetricError, DEFAULT_TOLERANCE};

/// Largest space any generator will emit.
pub const MAX_GENERATED_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    /// Left endpoints of the `2^k` level-`k` intervals of the middle-thirds construction.
    CantorLevel { level: u32 },
    /// `{2^-i : 0 <= i <= k}` on the line.
    Dyadic { k: u32 },
    /// `Z_m` with the graph metric of the `m`-cycle.
    Cycle { m: usize },
    /// `{0,1}^n` with Hamming distance.
    Hypercube { n: u32 },
    /// Leaves of a random binary dendrogram with strictly decreasing merge heights.
    RandomUltrametric { points: usize },
    /// Uniform points in the unit cube `[0,1]^dim`.
    RandomEuclidean { points: usize, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind) -> Self {
        GeneratorSpec { kind, seed: 0 }
    }

    pub fn seeded(kind: GeneratorKind, seed: u64) -> Self {
        GeneratorSpec { kind, seed }
    }

    pub fn is_random(&self) -> bool {
        matches!(
            self.kind,
            GeneratorKind::RandomUltrametric { .. } | GeneratorKind::RandomEuclidean { .. }
        )
    }

    fn check(&self) -> Result<(), MetricError> {
        let bad = |msg: String| Err(MetricError::BadParameter(msg));
        match self.kind {
            GeneratorKind::CantorLevel { level } if level > 9 => {
                bad(format!("cantor-level {level} exceeds 9"))
            }
            GeneratorKind::Dyadic { k } if k > 60 => bad(format!("dyadic {k} exceeds 60")),
            GeneratorKind::Cycle { m } if m == 0 || m > MAX_GENERATED_POINTS => bad(format!(
                "cycle length {m} outside 1..={MAX_GENERATED_POINTS}"
            )),
            GeneratorKind::Hypercube { n } if n == 0 || n > 9 => {
                bad(format!("hypercube dimension {n} outside 1..=9"))
            }
            GeneratorKind::RandomUltrametric { points }
                if points == 0 || points > MAX_GENERATED_POINTS =>
            {
                bad(format!(
                    "random-ultrametric size {points} outside 1..={MAX_GENERATED_POINTS}"
                ))
            }
            GeneratorKind::RandomEuclidean { points, dim }
                if points == 0 || points > MAX_GENERATED_POINTS || dim == 0 || dim > 16 =>
            {
                bad(format!(
                    "random-euclidean size {points} / dim {dim} out of range"
                ))
            }
            _ => Ok(()),
        }
    }

    /// Builds the space. The same spec (including seed) always yields the same matrix.
    pub fn generate(&self) -> Result<FiniteMetricSpace, MetricError> {
        self.check()?;
        let (matrix, labels) = match self.kind {
            GeneratorKind::CantorLevel { level } => {
                let denom = 3u64.pow(level);
                let nums: Vec<u64> = (0..1u64 << level)
                    .map(|bits| {
                        (0..level)
                            .filter(|i| bits >> (level - 1 - i) & 1 == 1)
                            .map(|i| 2 * 3u64.pow(level - 1 - i))
                            .sum()
                    })
                    .collect();
                let matrix = nums
                    .iter()
                    .map(|&a| {
                        nums.iter()
                            .map(|&b| a.abs_diff(b) as f64 / denom as f64)
                            .collect()
                    })
                    .collect();
                let labels = nums.iter().map(|&a| format!("{a}/{denom}")).collect();
                (matrix, labels)
            }
            GeneratorKind::Dyadic { k } => {
                let pts: Vec<f64> = (0..=k).map(|i| 0.5f64.powi(i as i32)).collect();
                let matrix = pts
                    .iter()
                    .map(|a| pts.iter().map(|b| (a - b).abs()).collect())
                    .collect();
                let labels = (0..=k).map(|i| format!("2^-{i}")).collect();
                (matrix, labels)
            }
            GeneratorKind::Cycle { m } => {
                let matrix = (0..m)
                    .map(|i| {
                        (0..m)
                            .map(|j| {
                                let d = i.abs_diff(j);
                                d.min(m - d) as f64
                            })
                            .collect()
                    })
                    .collect();
                (matrix, (0..m).map(|i| i.to_string()).collect())
            }
            GeneratorKind::Hypercube { n } => {
                let size = 1usize << n;
                let matrix = (0..size)
                    .map(|i| (0..size).map(|j| (i ^ j).count_ones() as f64).collect())
                    .collect();
                let labels = (0..size)
                    .map(|i| format!("{:0width$b}", i, width = n as usize))
                    .collect();
                (matrix, labels)
            }
            GeneratorKind::RandomUltrametric { points } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                (
                    random_dendrogram(points, &mut rng),
                    (0..points).map(|i| format!("u{i}")).collect(),
                )
            }
            GeneratorKind::RandomEuclidean { points, dim } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let coords: Vec<Vec<f64>> = (0..points)
                    .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
                    .collect();
                let matrix = coords
                    .iter()
                    .map(|a| {
                        coords
                            .iter()
                            .map(|b| {
                                a.iter()
                                    .zip(b)
                                    .map(|(x, y)| (x - y) * (x - y))
                                    .sum::<f64>()
                                    .sqrt()
                            })
                            .collect()
                    })
                    .collect();
                (matrix, (0..points).map(|i| format!("e{i}")).collect())
            }
        };
        FiniteMetricSpace::new(matrix, labels, DEFAULT_TOLERANCE)
    }
}

/// Recursively splits a shuffled block at a random cut; each child merges strictly
/// below its parent. Heights are integers, so every comparison is exact.
fn random_dendrogram(points: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut matrix = vec![vec![0.0; points]; points];
    let mut order: Vec<usize> = (0..points).collect();
    order.shuffle(rng);
    let mut stack = vec![(order, 4 * points as u64)];
    while let Some((block, height)) = stack.pop() {
        if block.len() < 2 {
            continue;
        }
        let cut = rng.gen_range(1..block.len());
        let (left, right) = block.split_at(cut);
        for &a in left {
            for &b in right {
                matrix[a][b] = height as f64;
                matrix[b][a] = height as f64;
            }
        }
        for part in [left, right] {
            let child = height - rng.gen_range(1..=3);
            stack.push((part.to_vec(), child));
        }
    }
    matrix
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::CantorLevel { level } => write!(f, "cantor-level={level}"),
            GeneratorKind::Dyadic { k } => write!(f, "dyadic={k}"),
            GeneratorKind::Cycle { m } => write!(f, "cycle={m}"),
            GeneratorKind::Hypercube { n } => write!(f, "hypercube={n}"),
            GeneratorKind::RandomUltrametric { points } => {
                write!(f, "random-ultrametric={points},seed={}", self.seed)
            }
            GeneratorKind::RandomEuclidean { points, dim } => {
                write!(f, "random-euclidean={points},dim={dim},seed={}", self.seed)
            }
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| MetricError::BadParameter(format!("generator '{s}': {msg}"));
        let mut parts = s.split(',').map(str::trim);
        let head = parts.next().unwrap_or_default();
        let (name, value) = head
            .split_once('=')
            .ok_or_else(|| bad("expected kind=value"))?;
        let value: u64 = value
            .parse()
            .map_err(|_| bad("size must be a non-negative integer"))?;
        let mut seed = None;
        let mut dim = None;
        for part in parts {
            let (key, v) = part
                .split_once('=')
                .ok_or_else(|| bad("expected key=value"))?;
            let v: u64 = v
                .parse()
                .map_err(|_| bad("parameter values must be integers"))?;
            match key {
                "seed" => seed = Some(v),
                "dim" => dim = Some(v as usize),
                _ => return Err(bad(&format!("unknown parameter '{key}'"))),
            }
        }
        let small = |v: u64| u32::try_from(v).map_err(|_| bad("size too large"));
        let kind = match name {
            "cantor-level" => GeneratorKind::CantorLevel {
                level: small(value)?,
            },
            "dyadic" => GeneratorKind::Dyadic { k: small(value)? },
            "cycle" => GeneratorKind::Cycle { m: value as usize },
            "hypercube" => GeneratorKind::Hypercube { n: small(value)? },
            "random-ultrametric" => GeneratorKind::RandomUltrametric {
                points: value as usize,
            },
            "random-euclidean" => GeneratorKind::RandomEuclidean {
                points: value as usize,
                dim: dim.unwrap_or(2),
            },
            _ => return Err(bad("unknown kind")),
        };
        if dim.is_some() && !matches!(kind, GeneratorKind::RandomEuclidean { .. }) {
            return Err(bad("dim only applies to random-euclidean"));
        }
        let spec = GeneratorSpec {
            kind,
            seed: seed.unwrap_or(0),
        };
        if spec.is_random() && seed.is_none() {
            return Err(bad("random generators require seed=<u64>"));
        }
        if !spec.is_random() && seed.is_some() {
            return Err(bad("seed only applies to random generators"));
        }
        spec.check()?;
        Ok(spec)
    }
}

/// Convenience wrapper around [`GeneratorSpec::generate`].
pub fn generate(spec: &GeneratorSpec) -> Result<FiniteMetricSpace, MetricError> {
    spec.generate()
}
