//! Benchmark fixtures.

use cotypelab::{FiniteMetricSpace, GeneratorKind, GeneratorSpec, Torus, TorusFunction};

pub fn ultrametric(points: usize, seed: u64) -> FiniteMetricSpace {
    GeneratorSpec::seeded(GeneratorKind::RandomUltrametric { points }, seed)
        .generate()
        .expect("generator output is a metric")
}

pub fn euclidean(points: usize, seed: u64) -> FiniteMetricSpace {
    GeneratorSpec::seeded(GeneratorKind::RandomEuclidean { points, dim: 2 }, seed)
        .generate()
        .expect("generator output is a metric")
}

/// A seeded function on `Z_m^n` into a space with `points` points.
pub fn function(n: usize, m: usize, points: usize, seed: u64) -> TorusFunction {
    TorusFunction::sample(Torus::new(n, m).expect("valid torus"), points, seed, 0)
}
