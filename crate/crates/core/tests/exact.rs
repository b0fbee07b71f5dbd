mod common;

use common::{random_pairs, three_edit_pair};
use gedforge_core::assignment::{ged_bipartite, ged_hed, CostModel, LapSolver};
use gedforge_core::exact::{
    ged_astar, ged_astar_with, ged_beam, ged_bruteforce, AStarOptions, Bound, GedError, UNBOUNDED_WIDTH,
};
use gedforge_core::graph::{generate_graph, permute_graph, LabeledGraph, NodeOrdering};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn astar_matches_bruteforce_with_witness_paths() {
    for (k, (g1, g2)) in random_pairs(200, 6, 11).iter().enumerate() {
        let oracle = ged_bruteforce(g1, g2).unwrap();
        let got = ged_astar(g1, g2).unwrap();
        assert_eq!(got.distance, oracle.distance, "pair {k}");
        assert_eq!(got.bound, Bound::Exact);
        assert_eq!(got.edit_path.as_ref().map(Vec::len), Some(got.distance as usize));
    }
}

#[test]
fn heuristic_is_admissible_on_every_expanded_state() {
    let options = AStarOptions {
        audit_heuristic: true,
        ..AStarOptions::default()
    };
    for (g1, g2) in random_pairs(40, 5, 12) {
        let audited = ged_astar_with(&g1, &g2, &options).unwrap();
        assert_eq!(audited.distance, ged_bruteforce(&g1, &g2).unwrap().distance);
    }
}

#[test]
fn bounds_sandwich_the_exact_distance() {
    for (g1, g2) in random_pairs(200, 6, 13) {
        let exact = ged_astar(&g1, &g2).unwrap().distance;
        assert!(ged_hed(&g1, &g2).distance <= exact);
        for width in [1, 2, 5, 100] {
            assert!(ged_beam(&g1, &g2, width).distance >= exact);
        }
        for model in [CostModel::Paper, CostModel::Augmented] {
            for solver in [LapSolver::Hungarian, LapSolver::Jv] {
                assert!(ged_bipartite(&g1, &g2, solver, model).distance >= exact);
            }
        }
    }
}

#[test]
fn unbounded_beam_is_exact() {
    for (g1, g2) in random_pairs(200, 6, 14) {
        assert_eq!(ged_beam(&g1, &g2, UNBOUNDED_WIDTH).distance, ged_astar(&g1, &g2).unwrap().distance);
    }
}

#[test]
fn distance_is_symmetric_and_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for (g1, g2) in random_pairs(60, 6, 15) {
        let d = ged_astar(&g1, &g2).unwrap().distance;
        assert_eq!(ged_astar(&g2, &g1).unwrap().distance, d);
        let mut order: Vec<usize> = (0..g2.node_count()).collect();
        order.shuffle(&mut rng);
        let p2 = permute_graph(&g2, &NodeOrdering::new(order).unwrap()).unwrap();
        assert_eq!(ged_astar(&g1, &p2).unwrap().distance, d);
        assert_eq!(ged_astar(&g1, &g1).unwrap().distance, 0);
    }
}

#[test]
fn triangle_to_path_by_hand() {
    let triangle = LabeledGraph::from_labels(vec![0, 0, 0], [(0, 1), (1, 2), (0, 2)]).unwrap();
    let path = LabeledGraph::from_labels(vec![0, 0, 0, 1], [(0, 1), (1, 2), (2, 3)]).unwrap();
    assert_eq!(ged_astar(&triangle, &path).unwrap().distance, 3);
    assert_eq!(ged_bruteforce(&triangle, &path).unwrap().distance, 3);
}

#[test]
fn guards_and_budgets_are_reported() {
    let big = generate_graph(7, 0.5, 2, 1);
    assert!(matches!(ged_bruteforce(&big, &big), Err(GedError::SizeGuard { .. })));
    let options = AStarOptions {
        max_nodes: 6,
        ..AStarOptions::default()
    };
    assert!(matches!(ged_astar_with(&big, &big, &options), Err(GedError::SizeGuard { .. })));
    let g1 = generate_graph(8, 0.4, 3, 2);
    let g2 = generate_graph(8, 0.4, 3, 3);
    let tight = AStarOptions {
        max_expanded: 3,
        ..AStarOptions::default()
    };
    assert!(matches!(ged_astar_with(&g1, &g2, &tight), Err(GedError::BudgetExhausted { .. })));
}

#[test]
fn three_edit_pair_costs_three() {
    let (g1, g2) = three_edit_pair();
    assert_eq!(ged_bruteforce(&g1, &g2).unwrap().distance, 3);
    let exact = ged_astar(&g1, &g2).unwrap();
    assert_eq!(exact.distance, 3);
    let path = exact.edit_path.unwrap();
    assert_eq!(path.iter().filter(|op| matches!(op, gedforge_core::exact::EditOp::DeleteEdge { .. })).count(), 2);
    assert_eq!(path.iter().filter(|op| matches!(op, gedforge_core::exact::EditOp::InsertEdge { .. })).count(), 1);
    for model in [CostModel::Paper, CostModel::Augmented] {
        assert!(ged_bipartite(&g1, &g2, LapSolver::Hungarian, model).distance >= 3);
    }
    assert!(ged_hed(&g1, &g2).distance <= 3);
}

#[test]
fn single_nodes_prefer_relabeling() {
    let a = LabeledGraph::from_labels(vec![0], []).unwrap();
    let b = LabeledGraph::from_labels(vec![1], []).unwrap();
    assert_eq!(ged_bruteforce(&a, &b).unwrap().distance, 1);
    assert_eq!(ged_astar(&a, &b).unwrap().distance, 1);
    assert!(ged_hed(&a, &b).distance <= 1);
}
