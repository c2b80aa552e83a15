mod common;

use common::*;
use cotypelab::metric::minimum_spanning_tree;
use cotypelab::{FiniteMetricSpace, GeneratorKind, GeneratorSpec};
use proptest::prelude::*;

#[test]
fn subdominant_matches_minimax_over_paths() {
    for x in corpus(60, 8) {
        let (rho, _) = x.subdominant_ultrametric();
        for a in 0..x.len() {
            for b in 0..x.len() {
                assert_eq!(rho.d(a, b), minimax_by_paths(&x, a, b));
            }
        }
    }
}

#[test]
fn subdominant_is_largest_ultrametric_below() {
    for x in corpus(60, 10) {
        let (rho, l) = x.subdominant_ultrametric();
        assert!(rho.check_ultrametric_with(0.0).is_ok());
        let mut worst = 1.0f64;
        for a in 0..x.len() {
            for b in 0..x.len() {
                assert!(rho.d(a, b) <= x.d(a, b));
                if a != b {
                    worst = worst.max(x.d(a, b) / rho.d(a, b));
                }
            }
        }
        assert_eq!(l, worst);
    }
}

#[test]
fn chains_agree_with_union_find() {
    for (s, x) in corpus(40, 9).into_iter().enumerate() {
        let mut thresholds: Vec<f64> = (0..x.len())
            .flat_map(|i| (0..x.len()).map(move |j| (i, j)))
            .map(|(i, j)| x.d(i, j))
            .collect();
        thresholds.retain(|&t| t > 0.0);
        thresholds.push(0.5);
        thresholds.push(100.0);
        for eps in thresholds {
            let (a, b) = (s % x.len(), (s * 3 + 1) % x.len());
            let chain = x.find_chain(a, b, eps).unwrap();
            assert_eq!(
                chain.is_some(),
                a == b || connected_below(&x, a, b, eps),
                "eps {eps}"
            );
            if let Some(c) = chain {
                assert!(c.is_valid_in(&x));
                assert_eq!((c.points[0], *c.points.last().unwrap()), (a, b));
            }
        }
    }
}

#[test]
fn mst_weight_is_minimal_for_small_sets() {
    // Against the minimax characterisation: each tree edge is the minimax value of its ends.
    for x in corpus(30, 8) {
        let all: Vec<usize> = (0..x.len()).collect();
        let tree = minimum_spanning_tree(&x, &all);
        assert_eq!(tree.len(), x.len() - 1);
        for (u, v, w) in tree {
            assert_eq!(w, x.d(u, v));
            assert_eq!(w, minimax_by_paths(&x, u, v));
        }
    }
}

#[test]
fn generated_ultrametrics_pass_the_check() {
    for s in 0..50 {
        let x = GeneratorSpec::seeded(
            GeneratorKind::RandomUltrametric {
                points: 2 + s as usize % 20,
            },
            s,
        )
        .generate()
        .unwrap();
        assert!(x.is_ultrametric());
        assert_eq!(x.ls_metric_exponent(), f64::INFINITY);
    }
}

fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..9)
}

fn plane(points: &[(f64, f64)]) -> Option<FiniteMetricSpace> {
    let m: Vec<Vec<f64>> = points
        .iter()
        .map(|a| {
            points
                .iter()
                .map(|b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt())
                .collect()
        })
        .collect();
    FiniteMetricSpace::from_matrix(m).ok()
}

proptest! {
    #[test]
    fn snowflake_below_one_stays_metric(points in arb_points(), alpha in 0.05f64..1.0) {
        if let Some(x) = plane(&points) {
            let y = x.snowflake(alpha).unwrap();
            for i in 0..x.len() {
                for j in 0..x.len() {
                    prop_assert!(rel_close(y.d(i, j), x.d(i, j).powf(alpha), 1e-15));
                }
            }
        }
    }

    #[test]
    fn ls_exponent_is_a_metric_threshold(points in arb_points()) {
        if let Some(x) = plane(&points) {
            let s = x.ls_metric_exponent();
            prop_assert!(s >= 1.0 - 1e-9);
            if s.is_finite() && s < 64.0 {
                // d^t is a metric just below the exponent and fails just above it.
                prop_assert!(x.snowflake(s * (1.0 - 1e-6)).is_ok());
                prop_assert!(x.with_tolerance(0.0).snowflake(s * 1.01).is_err());
            }
        }
    }

    #[test]
    fn subdominant_is_idempotent(points in arb_points()) {
        if let Some(x) = plane(&points) {
            let (rho, _) = x.subdominant_ultrametric();
            let (again, l) = rho.subdominant_ultrametric();
            prop_assert_eq!(l, 1.0);
            prop_assert_eq!(again.matrix(), rho.matrix());
        }
    }

    #[test]
    fn scaling_preserves_ultrametric_verdict(seed in 0u64..500, lambda in 0.01f64..100.0) {
        let x = GeneratorSpec::seeded(GeneratorKind::RandomUltrametric { points: 7 }, seed).generate().unwrap();
        prop_assert!(x.scaled(lambda).unwrap().is_ultrametric());
    }
}
