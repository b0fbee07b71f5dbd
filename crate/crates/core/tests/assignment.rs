mod common;

use common::{brute_lap_min as brute_min, permutations, transport_bfs_min};
use gedforge_core::assignment::{
    assignment_kernel, solve_lap_hungarian, solve_lap_jv, solve_transportation, CostMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn six_by_six_against_all_permutations() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let c = CostMatrix::new(6, (0..36).map(|_| rng.gen_range(0.0..10.0)).collect()).unwrap();
        let best = brute_min(&c);
        assert!((solve_lap_hungarian(&c).total_cost - best).abs() <= 1e-9);
        assert!((solve_lap_jv(&c).total_cost - best).abs() <= 1e-9);
    }
}

#[test]
fn tie_heavy_integer_matrices_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..3000 {
        let n = rng.gen_range(1..=12);
        let hi = if trial % 2 == 0 { 3 } else { 50 };
        let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..hi)).collect();
        let c = CostMatrix::new(n, entries).unwrap();
        let h = solve_lap_hungarian(&c);
        let j = solve_lap_jv(&c);
        assert_eq!(h.total_cost, j.total_cost, "trial {trial}: {c:?}");
        assert_eq!(c.cost_of(&j.perm), j.total_cost);
    }
}

#[test]
fn sentinel_cells_are_avoided() {
    let c = CostMatrix::<f64>::with_forbidden(3, vec![
        None, Some(5.0), Some(9.0),
        Some(1.0), None, None,
        Some(2.0), Some(2.0), None,
    ])
    .unwrap();
    for a in [solve_lap_hungarian(&c), solve_lap_jv(&c)] {
        assert_eq!(a.perm, vec![2, 0, 1]);
        assert_eq!(a.total_cost, 12.0);
    }
}

#[test]
fn kernel_matches_bijection_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let nx = rng.gen_range(1..=6);
        let ny = rng.gen_range(1..=6);
        let x: Vec<[f64; 2]> = (0..nx).map(|_| [rng.gen(), rng.gen()]).collect();
        let y: Vec<[f64; 2]> = (0..ny).map(|_| [rng.gen(), rng.gen()]).collect();
        let k = |a: &[f64; 2], b: &[f64; 2]| (-(a[0] - b[0]).powi(2) - (a[1] - b[1]).powi(2)).exp();
        let n = nx.max(ny);
        let brute = permutations(n)
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .filter(|&(i, &j)| i < nx && j < ny)
                    .map(|(i, &j)| k(&x[i], &y[j]))
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let fast = assignment_kernel(&x, &y, k);
        assert!((fast - brute).abs() < 1e-9);
        assert!((assignment_kernel(&y, &x, k) - fast).abs() < 1e-9);
    }
}

#[test]
fn identical_sets_with_linear_kernel() {
    let x = vec![[3.0, 0.0], [0.0, 2.0], [1.0, 1.0]];
    let dot = |a: &[f64; 2], b: &[f64; 2]| a[0] * b[0] + a[1] * b[1];
    // each point is its own best partner: 9 + 4 + 2
    assert!(x.iter().all(|a| x.iter().all(|b| dot(a, a) >= dot(a, b) || dot(b, b) >= dot(a, b))));
    assert_eq!(assignment_kernel(&x, &x, dot), 15.0);
}

proptest! {
    #[test]
    fn transport_cost_invariant_under_row_permutation(
        pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..6),
        other in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..5),
        rotate in 0usize..6,
    ) {
        let x: Vec<Vec<f64>> = pts.iter().map(|&(a, b)| vec![a, b]).collect();
        let y: Vec<Vec<f64>> = other.iter().map(|&(a, b)| vec![a, b]).collect();
        let mut shuffled = x.clone();
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        let (t, c1) = solve_transportation(&x, &y).unwrap();
        let (_, c2) = solve_transportation(&shuffled, &y).unwrap();
        prop_assert!((c1 - c2).abs() < 1e-9);
        for r in t.row_sums() {
            prop_assert!((r - 1.0 / x.len() as f64).abs() < 1e-9);
        }
        for c in t.col_sums() {
            prop_assert!((c - 1.0 / y.len() as f64).abs() < 1e-9);
        }
    }
}

#[test]
fn transport_matches_basic_feasible_solution_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let x: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let y: Vec<Vec<f64>> = (0..3).map(|_| (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect();
        let dist: Vec<Vec<f64>> = x
            .iter()
            .map(|a| y.iter().map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()).collect())
            .collect();
        let oracle = transport_bfs_min(&dist, &[1.0 / 3.0; 3], &[1.0 / 3.0; 3]);
        let (_, cost) = solve_transportation(&x, &y).unwrap();
        assert!((cost - oracle).abs() <= 1e-9, "{cost} vs {oracle}");
    }
}

#[test]
fn uneven_transport_matches_basic_feasible_solution_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (m, n) in [(2, 3), (3, 2), (1, 4), (4, 3)] {
        let x: Vec<Vec<f64>> = (0..m).map(|_| vec![rng.gen_range(-3.0..3.0)]).collect();
        let y: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(-3.0..3.0)]).collect();
        let dist: Vec<Vec<f64>> = x.iter().map(|a| y.iter().map(|b| (a[0] - b[0]).abs()).collect()).collect();
        let oracle = transport_bfs_min(&dist, &vec![1.0 / m as f64; m], &vec![1.0 / n as f64; n]);
        let (_, cost) = solve_transportation(&x, &y).unwrap();
        assert!((cost - oracle).abs() <= 1e-9, "{m}x{n}: {cost} vs {oracle}");
    }
}
