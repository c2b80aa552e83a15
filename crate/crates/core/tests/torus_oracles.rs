mod common;

use common::*;
use cotypelab::torus::{brute_force_min_boundary, isoperimetric_bounds, BoundaryMasks};
use cotypelab::{GraphKind, Torus, TorusSubset};
use proptest::prelude::*;

const KINDS: [GraphKind; 3] = [GraphKind::L, GraphKind::R, GraphKind::T];

fn to_set(mask: u64, size: usize) -> Vec<bool> {
    (0..size).map(|i| (mask >> i) & 1 == 1).collect()
}

#[test]
fn neighbours_match_coordinate_adjacency() {
    for (n, m) in [
        (1, 2),
        (1, 4),
        (1, 6),
        (2, 2),
        (2, 4),
        (3, 2),
        (2, 6),
        (3, 4),
    ] {
        let t = Torus::new(n, m).unwrap();
        for kind in KINDS {
            for u in 0..t.size() {
                let expected: Vec<usize> = (0..t.size())
                    .filter(|&v| adjacent(u, v, n, m, kind))
                    .collect();
                assert_eq!(t.neighbors(u, kind), expected, "n={n} m={m} {kind:?} u={u}");
            }
        }
    }
}

#[test]
fn every_boundary_of_small_tori_matches_pair_count() {
    for (n, m) in [(1, 4), (1, 8), (2, 2), (2, 4)] {
        let t = Torus::new(n, m).unwrap();
        for kind in KINDS {
            let masks = BoundaryMasks::new(&t, kind);
            for mask in 0u64..(1 << t.size()) {
                let expected = boundary_by_pairs(&to_set(mask, t.size()), n, m, kind);
                assert_eq!(masks.boundary(mask), expected);
                if mask % 97 == 0 {
                    assert_eq!(
                        TorusSubset::from_mask(t, mask).edge_boundary(kind),
                        expected
                    );
                }
            }
        }
    }
}

#[test]
fn isoperimetric_inequalities_hold_exhaustively() {
    for (n, m) in [(1usize, 4usize), (1, 8), (1, 16), (2, 4)] {
        let size = m.pow(n as u32);
        for a in 0..=size / 2 {
            let bounds = isoperimetric_bounds(a, n, m);
            let r = brute_force_min_boundary(n, m, a, GraphKind::R).unwrap();
            let tt = brute_force_min_boundary(n, m, a, GraphKind::T).unwrap();
            assert!(r.min as f64 >= bounds.linfty - 1e-9, "R n={n} m={m} a={a}");
            assert!(tt.min as f64 >= bounds.bl - 1e-9, "T n={n} m={m} a={a}");
            assert_eq!(r.minimizer.len(), a);
            assert_eq!(r.minimizer.edge_boundary(GraphKind::R), r.min);
        }
    }
}

#[test]
fn interval_is_optimal_on_a_cycle() {
    // On Z_m the best sets of size 0 < a < m are arcs with boundary 2.
    for a in 1..8 {
        assert_eq!(
            brute_force_min_boundary(1, 8, a, GraphKind::T).unwrap().min,
            2
        );
    }
}

proptest! {
    #[test]
    fn boundary_is_invariant_under_complement_and_translation(
        (n, m) in prop::sample::select(vec![(1usize, 4usize), (1, 6), (2, 4), (2, 6), (3, 4), (3, 2), (2, 8)]),
        seed in any::<u64>(),
        shift in prop::collection::vec(-20i64..20, 3),
    ) {
        let t = Torus::new(n, m).unwrap();
        let mut r = rng(seed);
        let picks: Vec<usize> = (0..t.size()).filter(|_| rand::Rng::gen_bool(&mut r, 0.4)).collect();
        let a = TorusSubset::from_indices(t, &picks).unwrap();
        for kind in KINDS {
            let b = a.edge_boundary(kind);
            prop_assert_eq!(a.complement().edge_boundary(kind), b);
            prop_assert_eq!(a.translate(&shift[..n]).edge_boundary(kind), b);
            prop_assert_eq!(a.edge_boundary_edges(kind).len(), b);
        }
    }

    #[test]
    fn linear_index_round_trips(n in 1usize..5, half in 1usize..5, i in any::<usize>()) {
        let t = Torus::new(n, 2 * half).unwrap();
        let i = i % t.size();
        prop_assert_eq!(t.index(&t.coords(i)).unwrap(), i);
    }
}
