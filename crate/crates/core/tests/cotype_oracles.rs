mod common;

use common::*;
use cotypelab::cotype::{implied_gamma, mn_scaling_function};
use cotypelab::{
    evaluate_cotype, gamma_search, separation_constant, sts_certificate, CotypeParams,
    FiniteMetricSpace, GeneratorKind, GeneratorSpec, SearchStrategy, Torus, TorusFunction,
};
use proptest::prelude::*;

fn two_points() -> FiniteMetricSpace {
    FiniteMetricSpace::from_matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
}

fn euclid(points: usize, seed: u64) -> FiniteMetricSpace {
    GeneratorSpec::seeded(GeneratorKind::RandomEuclidean { points, dim: 2 }, seed)
        .generate()
        .unwrap()
}

fn ultra(points: usize, seed: u64) -> FiniteMetricSpace {
    GeneratorSpec::seeded(GeneratorKind::RandomUltrametric { points }, seed)
        .generate()
        .unwrap()
}

fn scale(p: f64, q: f64, n: usize, m: usize) -> f64 {
    (m as f64).powf(p) * (n as f64).powf(1.0 - p / q)
}

#[test]
fn evaluator_matches_definition() {
    for (s, (n, m)) in [
        (1, 2),
        (1, 4),
        (1, 6),
        (2, 2),
        (2, 4),
        (3, 2),
        (2, 6),
        (3, 4),
    ]
    .into_iter()
    .enumerate()
    {
        let x = euclid(4, s as u64);
        let t = Torus::new(n, m).unwrap();
        for sample in 0..10 {
            let f = TorusFunction::sample(t, x.len(), 77, sample);
            for (p, q) in [(1.0, 1.0), (1.0, 2.0), (2.0, 2.0), (1.5, 3.0)] {
                let e = evaluate_cotype(&x, &f, p, q).unwrap();
                let (lhs, rhs) = cotype_sides(&x, &f.values, n, m, p);
                assert!(rel_close(e.lhs, lhs, 1e-12) && rel_close(e.rhs, rhs, 1e-12));
                let g = if rhs > 0.0 {
                    (lhs / (scale(p, q, n, m) * rhs)).powf(1.0 / p)
                } else {
                    0.0
                };
                assert!(rel_close(e.implied_gamma, g, 1e-12));
            }
        }
    }
}

#[test]
fn edge_sum_identities_on_random_functions() {
    let t = Torus::new(2, 4).unwrap();
    for s in 0..200u64 {
        let x = euclid(5, 1000 + s);
        let f = TorusFunction::sample(t, 5, 4242, s);
        let e = evaluate_cotype(&x, &f, 2.0, 2.0).unwrap();
        assert!(rel_close(e.lhs, e.lhs_edge_sum, 1e-12));
        assert!(rel_close(e.rhs, e.rhs_edge_sum, 1e-12));
    }
}

#[test]
fn hand_checked_values() {
    let x = two_points();
    let f = TorusFunction::new(1, 4, vec![0, 0, 1, 1]).unwrap();
    let e = evaluate_cotype(&x, &f, 2.0, 2.0).unwrap();
    assert_eq!(e.lhs, 1.0);
    assert!(rel_close(e.rhs, 1.0 / 3.0, 1e-15));
    assert!(rel_close(e.implied_gamma, 3f64.sqrt() / 4.0, 1e-15));
}

#[test]
fn exhaustive_search_matches_enumeration() {
    let x = two_points();
    let params = CotypeParams::new(2.0, 2.0, 1, 4).unwrap();
    let r = gamma_search(&x, &params, SearchStrategy::Exhaustive, 0, 0).unwrap();
    let mut best = 0.0f64;
    for code in 0u32..16 {
        let values: Vec<usize> = (0..4).map(|i| ((code >> i) & 1) as usize).collect();
        let (lhs, rhs) = cotype_sides(&x, &values, 1, 4, 2.0);
        best = best.max(implied_gamma(lhs, rhs, 2.0, 16.0));
    }
    assert_eq!(r.visited, 16);
    assert!(rel_close(r.best_gamma, best, 1e-12));
    // Golden value: the half/half split (a, a, b, b).
    assert!(rel_close(r.best_gamma, 3f64.sqrt() / 4.0, 1e-12));
    assert!(r.best_gamma <= 1.0);
}

#[test]
fn exhaustive_dominates_sampling() {
    for s in 0..6u64 {
        let x = euclid(3, s);
        let params = CotypeParams::new(1.0 + s as f64 * 0.2, 2.0, 1, 8).unwrap();
        let ex = gamma_search(&x, &params, SearchStrategy::Exhaustive, 0, 0).unwrap();
        for strategy in [SearchStrategy::Random, SearchStrategy::Local] {
            let r = gamma_search(&x, &params, strategy, 300, s).unwrap();
            assert!(r.best_gamma <= ex.best_gamma * (1.0 + 1e-12));
        }
    }
}

#[test]
fn ultrametric_gamma_is_at_most_one_when_m_is_large_enough() {
    // Exhaustive over all 4^4 maps Z_4 -> X for 4-point ultrametrics, q = 2 needs m >= 4.
    for s in 0..20u64 {
        let x = ultra(4, s);
        let params = CotypeParams::new(2.0, 2.0, 1, 4).unwrap();
        let r = gamma_search(&x, &params, SearchStrategy::Exhaustive, 0, 0).unwrap();
        assert!(r.best_gamma <= 1.0 + 1e-9, "seed {s}: {}", r.best_gamma);
    }
}

#[test]
fn general_spaces_respect_their_separation_constant() {
    for s in 0..10u64 {
        let x = euclid(4, 50 + s);
        let c = separation_constant(&x, cotypelab::SeparationMode::Exact)
            .unwrap()
            .c_sep;
        let params = CotypeParams::new(2.0, 2.0, 1, 4).unwrap();
        let r = gamma_search(&x, &params, SearchStrategy::Exhaustive, 0, 0).unwrap();
        assert!(r.best_gamma <= c + 1e-9);
    }
}

#[test]
fn certificates_for_small_ultrametrics() {
    let t = Torus::new(1, 4).unwrap();
    for s in 0..10u64 {
        let x = ultra(4, s);
        for code in 0..256usize {
            let values: Vec<usize> = (0..4).map(|i| (code >> (2 * i)) & 3).collect();
            let f = TorusFunction::new(1, 4, values).unwrap();
            let cert = sts_certificate(&x, &f, 2.0).unwrap();
            assert!(cert.rows_pass && cert.pass && !cert.scaling_too_small);
            assert_eq!(cert.c, 1.0);
            assert!(cert.rows.iter().all(|r| 2 * r.subset_size <= t.size()));
            assert!(cert.lhs <= cert.lhs_levels_total * (1.0 + 1e-12));
            assert!(cert.rhs_levels_total <= cert.m.pow(2) as f64 * cert.rhs * (1.0 + 1e-12));
        }
        let f = TorusFunction::new(1, 2, vec![0, 1]).unwrap();
        let cert = sts_certificate(&x, &f, 2.0).unwrap();
        assert!(cert.scaling_too_small && !cert.rows.is_empty());
    }
}

#[test]
fn sampling_does_not_depend_on_thread_count() {
    let x = euclid(6, 5);
    let params = CotypeParams::new(2.0, 2.0, 2, 4).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| gamma_search(&x, &params, SearchStrategy::Random, 500, 11).unwrap())
    };
    assert_eq!(run(1), run(4));
}

proptest! {
    #[test]
    fn scaling_function_is_the_smallest_even_solution(q in 1.3f64..6.0, n in 1usize..5) {
        let m = mn_scaling_function(q, n).unwrap();
        let target = n as f64 * 3f64.powi(n as i32);
        prop_assert_eq!(m % 2, 0);
        prop_assert!((m as f64).powf(q - 1.0) >= target * (1.0 - 1e-12));
        if m > 2 {
            prop_assert!(((m - 2) as f64).powf(q - 1.0) < target * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gamma_is_invariant_under_symmetries(
        seed in any::<u64>(),
        lambda in 0.01f64..100.0,
        shift in prop::collection::vec(-9i64..9, 2),
        swap in any::<bool>(),
        p in 1.0f64..3.0,
    ) {
        let x = euclid(5, seed % 1000);
        let t = Torus::new(2, 6).unwrap();
        let f = TorusFunction::sample(t, 5, seed, 0);
        let base = evaluate_cotype(&x, &f, p, 3.0).unwrap().implied_gamma;
        let scaled = evaluate_cotype(&x.scaled(lambda).unwrap(), &f, p, 3.0).unwrap().implied_gamma;
        prop_assert!(rel_close(base, scaled, 1e-12));
        let moved = evaluate_cotype(&x, &f.translate(&shift).unwrap(), p, 3.0).unwrap().implied_gamma;
        prop_assert!(rel_close(base, moved, 1e-12));
        let sigma = if swap { vec![1, 0] } else { vec![0, 1] };
        let permuted = evaluate_cotype(&x, &f.permute_coordinates(&sigma).unwrap(), p, 3.0).unwrap().implied_gamma;
        prop_assert!(rel_close(base, permuted, 1e-12));
    }

    #[test]
    fn function_json_round_trip(seed in any::<u64>(), n in 1usize..3, half in 1usize..4) {
        let t = Torus::new(n, 2 * half).unwrap();
        let f = TorusFunction::sample(t, 7, seed, 3);
        let text = cotypelab::io::function_to_json(&f);
        prop_assert_eq!(cotypelab::io::function_from_json(&text).unwrap(), f);
    }
}
