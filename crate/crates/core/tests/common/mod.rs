#![allow(dead_code)]

use gedforge_core::assignment::CostMatrix;
use gedforge_core::autodiff::{Tape, Tensor, Var};
use gedforge_core::graph::{generate_graph, GraphPair, GroundTruthKind, LabeledGraph};
use gedforge_core::model::{loss, CnnLayer, ModelConfig, SimilarityModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STEP: f64 = 1e-6;

/// Seeded pairs of graphs with 1..=max_nodes nodes over a 3-label alphabet.
pub fn random_pairs(count: usize, max_nodes: usize, seed: u64) -> Vec<(LabeledGraph, LabeledGraph)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let labels = rng.gen_range(1..=3);
            let make = |rng: &mut ChaCha8Rng| {
                let n = rng.gen_range(1..=max_nodes);
                let p = rng.gen_range(0.1..0.7);
                generate_graph(n, p, labels, rng.gen()).with_alphabet(3).unwrap()
            };
            (make(&mut rng), make(&mut rng))
        })
        .collect()
}

/// A labeled 4-cycle and the triangle-plus-isolated-node obtained from it
/// by deleting two edges and inserting one.
pub fn three_edit_pair() -> (LabeledGraph, LabeledGraph) {
    let cycle = LabeledGraph::from_labels(vec![0, 1, 2, 0], [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let triangle = LabeledGraph::from_labels(vec![0, 1, 2, 0], [(0, 1), (1, 2), (0, 2)]).unwrap();
    (cycle, triangle)
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                prefix.push(j);
                rec(prefix, used, out);
                prefix.pop();
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn brute_lap_min(c: &CostMatrix<f64>) -> f64 {
    permutations(c.size())
        .iter()
        .map(|p| c.cost_of(p))
        .fold(f64::INFINITY, f64::min)
}

/// Flows of the basic solution on `basis`, or `None` when the cells do not
/// form a spanning tree of the row/column graph.
fn basic_solution(basis: &[(usize, usize)], supply: &[f64], demand: &[f64]) -> Option<Vec<f64>> {
    let (mut rows, mut cols) = (supply.to_vec(), demand.to_vec());
    let mut flow = vec![None; basis.len()];
    for _ in 0..basis.len() {
        let open: Vec<usize> = (0..basis.len()).filter(|&k| flow[k].is_none()).collect();
        let leaf = open.iter().copied().find_map(|k| {
            let (i, j) = basis[k];
            let in_row = open.iter().filter(|&&o| basis[o].0 == i).count();
            let in_col = open.iter().filter(|&&o| basis[o].1 == j).count();
            match (in_row, in_col) {
                (1, _) => Some((k, rows[i])),
                (_, 1) => Some((k, cols[j])),
                _ => None,
            }
        })?;
        let (k, value) = leaf;
        let (i, j) = basis[k];
        rows[i] -= value;
        cols[j] -= value;
        flow[k] = Some(value);
    }
    let balanced = rows.iter().chain(&cols).all(|r| r.abs() < 1e-12);
    balanced.then(|| flow.into_iter().map(Option::unwrap).collect())
}

/// Minimum cost over every basic feasible solution of the transportation
/// polytope.
pub fn transport_bfs_min(cost: &[Vec<f64>], supply: &[f64], demand: &[f64]) -> f64 {
    let (m, n) = (supply.len(), demand.len());
    let cells: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let size = m + n - 1;
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << cells.len()) {
        if mask.count_ones() as usize != size {
            continue;
        }
        let basis: Vec<(usize, usize)> = (0..cells.len()).filter(|&b| mask >> b & 1 == 1).map(|b| cells[b]).collect();
        if let Some(flow) = basic_solution(&basis, supply, demand) {
            if flow.iter().all(|&f| f >= -1e-12) {
                let c: f64 = basis.iter().zip(&flow).map(|(&(i, j), f)| cost[i][j] * f).sum();
                best = best.min(c);
            }
        }
    }
    best
}

/// Tau-b by counting every pair.
pub fn tau_b_quadratic(x: &[f64], y: &[f64]) -> f64 {
    use std::cmp::Ordering::Equal;
    let (mut concordant, mut discordant, mut ties_x, mut ties_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap();
            let dy = y[i].partial_cmp(&y[j]).unwrap();
            match (dx, dy) {
                (Equal, Equal) => {}
                (Equal, _) => ties_x += 1,
                (_, Equal) => ties_y += 1,
                (a, b) if a == b => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = concordant + discordant;
    (concordant - discordant) as f64 / (((n0 + ties_x) * (n0 + ties_y)) as f64).sqrt()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    let n = shape.iter().product();
    Tensor::new(shape.to_vec(), (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
}

/// Values bounded away from zero and from each other, for kinked operators.
pub fn spread_tensor(rng: &mut ChaCha8Rng, shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    let mut values: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * 0.13 - n as f64 * 0.065).collect();
    for k in (1..n).rev() {
        values.swap(k, rng.gen_range(0..=k));
    }
    Tensor::new(shape.to_vec(), values).unwrap()
}

/// Relative error between analytic and central-difference gradients of
/// `sum(w * f(inputs))` for a fixed random weighting `w`.
pub fn gradcheck<F>(inputs: &[Tensor], f: F) -> f64
where
    F: Fn(&mut Tape, &[Var]) -> Var,
{
    let build = |tape: &mut Tape, values: &[Tensor]| -> (Vec<Var>, Var) {
        let vars: Vec<Var> = values.iter().map(|t| tape.leaf(t.clone(), true)).collect();
        let out = f(tape, &vars);
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
        let shape = tape.value(out).shape().to_vec();
        let w = tape.leaf(random_tensor(&mut rng, &shape), false);
        let prod = tape.mul(out, w).unwrap();
        (vars, tape.sum(prod))
    };
    let eval = |values: &[Tensor]| -> f64 {
        let mut tape = Tape::new();
        let (_, loss) = build(&mut tape, values);
        tape.value(loss).data()[0]
    };

    let mut tape = Tape::new();
    let (vars, loss) = build(&mut tape, inputs);
    let grads = tape.backward(loss).unwrap();
    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for (k, var) in vars.iter().enumerate() {
        let analytic = grads.get(*var).map(<[f64]>::to_vec).unwrap_or_else(|| vec![0.0; inputs[k].len()]);
        for e in 0..inputs[k].len() {
            let mut plus = inputs.to_vec();
            plus[k].data_mut()[e] += STEP;
            let mut minus = inputs.to_vec();
            minus[k].data_mut()[e] -= STEP;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * STEP);
            diff = diff.max((analytic[e] - numeric).abs());
            scale = scale.max(analytic[e].abs().max(numeric.abs()));
        }
    }
    diff / scale.max(1e-12)
}

/// `(name, relative error)` for every tape primitive on random inputs.
pub fn primitive_gradchecks() -> Vec<(String, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_tensor(&mut rng, &[3, 4]);
    let b = random_tensor(&mut rng, &[4, 2]);
    let c = random_tensor(&mut rng, &[3, 4]);
    let bias = random_tensor(&mut rng, &[4]);
    let w = random_tensor(&mut rng, &[4, 3]);
    let bd = random_tensor(&mut rng, &[3]);
    let kinked = spread_tensor(&mut rng, &[3, 4]);
    let p = random_tensor(&mut rng, &[3]);
    let mut out = vec![
        ("matmul".to_string(), gradcheck(&[a.clone(), b], |t, v| t.matmul(v[0], v[1]).unwrap())),
        ("transpose".into(), gradcheck(&[a.clone()], |t, v| t.transpose(v[0]).unwrap())),
        ("add_bias".into(), gradcheck(&[a.clone(), bias], |t, v| t.add_bias(v[0], v[1]).unwrap())),
        ("add".into(), gradcheck(&[a.clone(), c.clone()], |t, v| t.add(v[0], v[1]).unwrap())),
        ("mul".into(), gradcheck(&[a.clone(), c.clone()], |t, v| t.mul(v[0], v[1]).unwrap())),
        ("scale".into(), gradcheck(&[a.clone()], |t, v| t.scale(v[0], -2.5))),
        ("sum".into(), gradcheck(&[a.clone()], |t, v| t.sum(v[0]))),
        ("sigmoid".into(), gradcheck(&[a.clone()], |t, v| t.sigmoid(v[0]))),
        ("relu".into(), gradcheck(&[kinked], |t, v| t.relu(v[0]))),
        ("reshape".into(), gradcheck(&[a.clone()], |t, v| t.reshape(v[0], &[2, 6]).unwrap())),
        ("flatten".into(), gradcheck(&[a.clone()], |t, v| t.flatten(v[0]).unwrap())),
        ("mean_rows".into(), gradcheck(&[a.clone()], |t, v| t.mean_rows(v[0]).unwrap())),
        ("concat_rows".into(), gradcheck(&[a.clone(), c], |t, v| t.concat_rows(&[v[0], v[1]]).unwrap())),
        ("dense".into(), gradcheck(&[a.clone(), w, bd], |t, v| t.dense(v[0], v[1], v[2]).unwrap())),
        (
            "gather_rows".into(),
            gradcheck(&[a], |t, v| t.gather_rows(v[0], vec![Some(2), None, Some(0), Some(2)]).unwrap()),
        ),
        ("mse_loss".into(), gradcheck(&[p], |t, v| t.mse_loss(v[0], &[0.3, -0.1, 0.7]).unwrap())),
    ];

    let x = random_tensor(&mut rng, &[2, 2, 5, 5]);
    for k in [1usize, 2, 3, 5, 6] {
        let w = random_tensor(&mut rng, &[3, 2, k, k]);
        let b = random_tensor(&mut rng, &[3]);
        let err = gradcheck(&[x.clone(), w, b], |t, v| t.conv2d(v[0], v[1], v[2]).unwrap());
        out.push((format!("conv2d {k}x{k}"), err));
    }
    for size in [2usize, 3] {
        let input = spread_tensor(&mut rng, &[2, 2, 5, 5]);
        out.push((format!("maxpool2d {size}"), gradcheck(&[input], |t, v| t.maxpool2d(v[0], size).unwrap())));
    }
    for (h, w) in [(10, 10), (3, 7), (1, 1), (5, 5)] {
        let err = gradcheck(&[x.clone()], |t, v| t.bilinear_resize(v[0], h, w).unwrap());
        out.push((format!("bilinear_resize {h}x{w}"), err));
    }
    let adjacency = std::sync::Arc::new(vec![
        vec![(0, 0.5), (1, 0.25)],
        vec![(0, 0.25), (1, 0.2), (2, 0.3)],
        vec![(1, 0.3), (2, 1.0)],
    ]);
    let h = random_tensor(&mut rng, &[3, 4]);
    out.push(("aggregate".into(), gradcheck(&[h], |t, v| t.aggregate(v[0], adjacency.clone()).unwrap())));
    out
}

/// The full architecture at a size where every parameter can be probed.
pub fn small_gsimcnn(input_dim: usize) -> ModelConfig {
    let mut config = ModelConfig::gsimcnn(input_dim, 6);
    config.gcn_dims = vec![5, 4];
    config.resize_to = 4;
    config.cnn = CnnLayer::parse_stack("conv(3,1,1,3), maxpool(2), conv(2,1,3,4), maxpool(2)").unwrap();
    config.dense_dims = vec![4, 3, 1];
    config
}

pub fn two_pair_batch() -> Vec<GraphPair> {
    let g1 = LabeledGraph::from_labels(vec![0, 1, 1, 0], [(0, 1), (1, 2), (2, 3)]).unwrap();
    let g2 = LabeledGraph::from_labels(vec![1, 1, 0], [(0, 1), (1, 2), (0, 2)]).unwrap();
    let g3 = LabeledGraph::from_labels(vec![0, 0, 1, 1, 0], [(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
    vec![
        GraphPair::with_ged(g1.clone(), g2, 3, GroundTruthKind::Exact),
        GraphPair::with_ged(g1, g3, 4, GroundTruthKind::Exact),
    ]
}

/// Relative error of the batch loss gradient against central differences
/// of [`loss`], over every parameter or `per_tensor` random coordinates of
/// each. Biases are randomized so no unit sits exactly on a ReLU kink.
pub fn loss_gradient_error(config: ModelConfig, seed: u64, per_tensor: Option<usize>) -> f64 {
    let mut model = SimilarityModel::new(config, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, t) in model.params.names.iter().zip(model.params.tensors.iter_mut()) {
        if name.ends_with("bias") {
            t.data_mut().iter_mut().for_each(|b| *b = rng.gen_range(-0.2..0.2));
        }
    }
    let pairs = two_pair_batch();
    let samples: Vec<_> = pairs
        .iter()
        .map(|p| {
            let n = (p.g1.node_count() + p.g2.node_count()) as f64;
            (&p.g1, &p.g2, (-2.0 * p.ground_truth_ged.unwrap() as f64 / n).exp())
        })
        .collect();
    let (value, grads) = model.loss_and_gradients(&samples).unwrap();
    assert!((value - loss(&pairs, &model).unwrap()).abs() < 1e-14);

    let (mut diff, mut scale) = (0.0f64, 0.0f64);
    for k in 0..model.params.len() {
        let len = model.params.tensors[k].len();
        let coords: Vec<usize> = match per_tensor {
            Some(count) if count < len => (0..count).map(|_| rng.gen_range(0..len)).collect(),
            _ => (0..len).collect(),
        };
        for e in coords {
            let shifted = |delta: f64| {
                let mut m = model.clone();
                m.params.tensors[k].data_mut()[e] += delta;
                loss(&pairs, &m).unwrap()
            };
            let numeric = (shifted(STEP) - shifted(-STEP)) / (2.0 * STEP);
            let analytic = grads[k].data()[e];
            diff = diff.max((analytic - numeric).abs());
            scale = scale.max(analytic.abs().max(numeric.abs()));
        }
    }
    diff / scale
}
