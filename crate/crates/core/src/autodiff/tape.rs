use std::borrow::Cow;
use std::sync::Arc;

use super::{mismatch, Tensor, TensorError};

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

/// Interpolation taps along one axis: `(source index, weight)` per output
/// position, zero-weight taps omitted.
type Taps = Vec<Vec<(usize, f64)>>;

/// Row-wise weighted neighbor lists for [`Tape::aggregate`].
pub type WeightedAdjacency = Arc<Vec<Vec<(usize, f64)>>>;

enum Op {
    Leaf,
    MatMul(Var, Var),
    Transpose(Var),
    AddBias(Var, Var),
    Add(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    Sum(Var),
    Relu(Var),
    Sigmoid(Var),
    Reshape(Var),
    Conv2d { input: Var, weight: Var, bias: Var },
    MaxPool { input: Var, argmax: Vec<usize> },
    Resize { input: Var, rows: Taps, cols: Taps },
    Aggregate { input: Var, adjacency: WeightedAdjacency },
    GatherRows { input: Var, index: Vec<Option<usize>> },
    MeanRows(Var),
    ConcatRows(Vec<Var>),
    Mse { pred: Var, target: Vec<f64> },
}

struct Node<'a> {
    value: Cow<'a, Tensor>,
    requires_grad: bool,
    op: Op,
}

/// Records operations in execution order; [`Tape::backward`] walks them in
/// reverse. Leaves may borrow their values, so parameters are not copied.
#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
}

/// Gradients from one backward pass, indexed by [`Var`].
pub struct Gradients {
    grads: Vec<Option<Vec<f64>>>,
}

impl Gradients {
    pub fn get(&self, var: Var) -> Option<&[f64]> {
        self.grads.get(var.0).and_then(|g| g.as_deref())
    }

    pub fn take(&mut self, var: Var) -> Option<Vec<f64>> {
        self.grads.get_mut(var.0).and_then(Option::take)
    }
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, inputs: &[Var], op: Op) -> Var {
        let requires_grad = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node {
            value: Cow::Owned(value),
            requires_grad,
            op,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value: Cow::Owned(value),
            requires_grad,
            op: Op::Leaf,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf_ref(&mut self, value: &'a Tensor, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value: Cow::Borrowed(value),
            requires_grad,
            op: Op::Leaf,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, var: Var) -> &Tensor {
        &self.nodes[var.0].value
    }

    fn shape(&self, var: Var) -> &[usize] {
        self.nodes[var.0].value.shape()
    }

    fn data(&self, var: Var) -> &[f64] {
        self.nodes[var.0].value.data()
    }

    fn rank2(&self, op: &'static str, var: Var) -> Result<(usize, usize), TensorError> {
        match *self.shape(var) {
            [r, c] => Ok((r, c)),
            ref s => Err(mismatch(op, format!("expected rank 2, got {s:?}"))),
        }
    }

    fn rank4(&self, op: &'static str, var: Var) -> Result<[usize; 4], TensorError> {
        match *self.shape(var) {
            [b, c, h, w] => Ok([b, c, h, w]),
            ref s => Err(mismatch(op, format!("expected rank 4, got {s:?}"))),
        }
    }

    /// `[m, k] × [k, n]`.
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        let (m, k) = self.rank2("matmul", a)?;
        let (k2, n) = self.rank2("matmul", b)?;
        if k != k2 {
            return Err(mismatch("matmul", format!("[{m}, {k}] x [{k2}, {n}]")));
        }
        let out = matmul_raw(self.data(a), self.data(b), m, k, n);
        Ok(self.push(Tensor::new(vec![m, n], out)?, &[a, b], Op::MatMul(a, b)))
    }

    pub fn transpose(&mut self, a: Var) -> Result<Var, TensorError> {
        let (m, n) = self.rank2("transpose", a)?;
        let src = self.data(a);
        let mut out = vec![0.0; m * n];
        for i in 0..m {
            for j in 0..n {
                out[j * m + i] = src[i * n + j];
            }
        }
        Ok(self.push(Tensor::new(vec![n, m], out)?, &[a], Op::Transpose(a)))
    }

    /// Adds a bias vector to every row of `[.., n]`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var, TensorError> {
        let n = *self.shape(x).last().unwrap_or(&0);
        if self.shape(bias) != [n] {
            return Err(mismatch(
                "add_bias",
                format!("bias {:?} for rows of width {n}", self.shape(bias)),
            ));
        }
        let b = self.data(bias);
        let out: Vec<f64> = self
            .data(x)
            .iter()
            .enumerate()
            .map(|(k, &v)| v + b[k % n])
            .collect();
        let shape = self.shape(x).to_vec();
        Ok(self.push(Tensor::new(shape, out)?, &[x, bias], Op::AddBias(x, bias)))
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<(), TensorError> {
        if self.shape(a) != self.shape(b) {
            return Err(mismatch(
                op,
                format!("{:?} vs {:?}", self.shape(a), self.shape(b)),
            ));
        }
        Ok(())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        self.same_shape("add", a, b)?;
        let out = self.data(a).iter().zip(self.data(b)).map(|(x, y)| x + y).collect();
        let shape = self.shape(a).to_vec();
        Ok(self.push(Tensor::new(shape, out)?, &[a, b], Op::Add(a, b)))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, TensorError> {
        self.same_shape("mul", a, b)?;
        let out = self.data(a).iter().zip(self.data(b)).map(|(x, y)| x * y).collect();
        let shape = self.shape(a).to_vec();
        Ok(self.push(Tensor::new(shape, out)?, &[a, b], Op::Mul(a, b)))
    }

    pub fn scale(&mut self, a: Var, factor: f64) -> Var {
        let out = self.data(a).iter().map(|x| x * factor).collect();
        let shape = self.shape(a).to_vec();
        self.push(Tensor::new(shape, out).expect("same shape"), &[a], Op::Scale(a, factor))
    }

    /// Sum of all elements, shape `[1]`.
    pub fn sum(&mut self, a: Var) -> Var {
        let total = self.data(a).iter().sum();
        self.push(Tensor::scalar(total), &[a], Op::Sum(a))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.data(a).iter().map(|&x| x.max(0.0)).collect();
        let shape = self.shape(a).to_vec();
        self.push(Tensor::new(shape, out).expect("same shape"), &[a], Op::Relu(a))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.data(a).iter().map(|&x| sigmoid(x)).collect();
        let shape = self.shape(a).to_vec();
        self.push(Tensor::new(shape, out).expect("same shape"), &[a], Op::Sigmoid(a))
    }

    pub fn reshape(&mut self, a: Var, shape: &[usize]) -> Result<Var, TensorError> {
        let value = self.value(a).reshaped(shape)?;
        Ok(self.push(value, &[a], Op::Reshape(a)))
    }

    /// Collapses everything but the leading (batch) axis.
    pub fn flatten(&mut self, a: Var) -> Result<Var, TensorError> {
        let shape = self.shape(a);
        let batch = shape.first().copied().unwrap_or(1);
        let rest = shape.iter().skip(1).product();
        self.reshape(a, &[batch, rest])
    }

    /// `x · W + b` for `x: [m, k]`, `W: [k, n]`, `b: [n]`.
    pub fn dense(&mut self, x: Var, weight: Var, bias: Var) -> Result<Var, TensorError> {
        let y = self.matmul(x, weight)?;
        self.add_bias(y, bias)
    }

    /// Stride-1 convolution with zero "same" padding: `(k - 1) / 2` before,
    /// the rest after. `x: [B, C, H, W]`, `weight: [O, C, kh, kw]`,
    /// `bias: [O]`.
    pub fn conv2d(&mut self, x: Var, weight: Var, bias: Var) -> Result<Var, TensorError> {
        let [b, c, h, w] = self.rank4("conv2d", x)?;
        let [o, c2, kh, kw] = self.rank4("conv2d", weight)?;
        if c != c2 || self.shape(bias) != [o] {
            return Err(mismatch(
                "conv2d",
                format!(
                    "input {:?}, weight {:?}, bias {:?}",
                    self.shape(x),
                    self.shape(weight),
                    self.shape(bias)
                ),
            ));
        }
        let geom = ConvGeometry { b, c, h, w, o, kh, kw };
        let out = geom.forward(self.data(x), self.data(weight), self.data(bias));
        Ok(self.push(
            Tensor::new(vec![b, o, h, w], out)?,
            &[x, weight, bias],
            Op::Conv2d {
                input: x,
                weight,
                bias,
            },
        ))
    }

    /// Non-overlapping max pooling with window and stride `size`, ceil mode:
    /// border windows are truncated. Ties go to the lowest flat index.
    pub fn maxpool2d(&mut self, x: Var, size: usize) -> Result<Var, TensorError> {
        let [b, c, h, w] = self.rank4("maxpool2d", x)?;
        if size == 0 {
            return Err(mismatch("maxpool2d", "pool size 0"));
        }
        let (oh, ow) = (h.div_ceil(size), w.div_ceil(size));
        let src = self.data(x);
        let mut out = Vec::with_capacity(b * c * oh * ow);
        let mut argmax = Vec::with_capacity(b * c * oh * ow);
        for plane in 0..b * c {
            let base = plane * h * w;
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut best = base + oy * size * w + ox * size;
                    for y in oy * size..((oy + 1) * size).min(h) {
                        for xx in ox * size..((ox + 1) * size).min(w) {
                            let idx = base + y * w + xx;
                            if src[idx] > src[best] {
                                best = idx;
                            }
                        }
                    }
                    out.push(src[best]);
                    argmax.push(best);
                }
            }
        }
        Ok(self.push(
            Tensor::new(vec![b, c, oh, ow], out)?,
            &[x],
            Op::MaxPool { input: x, argmax },
        ))
    }

    /// Bilinear resize of `[B, C, H, W]` with align-corners sampling:
    /// output `t` reads source `t (S - 1) / (T - 1)`; a single output
    /// samples the center.
    pub fn bilinear_resize(&mut self, x: Var, out_h: usize, out_w: usize) -> Result<Var, TensorError> {
        let [b, c, h, w] = self.rank4("bilinear_resize", x)?;
        if out_h == 0 || out_w == 0 {
            return Err(TensorError::BadResizeTarget);
        }
        let rows = resize_taps(h, out_h);
        let cols = resize_taps(w, out_w);
        let src = self.data(x);
        let mut out = vec![0.0; b * c * out_h * out_w];
        for plane in 0..b * c {
            let (ib, ob) = (plane * h * w, plane * out_h * out_w);
            for (ty, ry) in rows.iter().enumerate() {
                for (tx, rx) in cols.iter().enumerate() {
                    let mut acc = 0.0;
                    for &(sy, wy) in ry {
                        for &(sx, wx) in rx {
                            acc += wy * wx * src[ib + sy * w + sx];
                        }
                    }
                    out[ob + ty * out_w + tx] = acc;
                }
            }
        }
        Ok(self.push(
            Tensor::new(vec![b, c, out_h, out_w], out)?,
            &[x],
            Op::Resize { input: x, rows, cols },
        ))
    }

    /// `out[i] = Σ_j a_ij · x[j]` over the listed neighbors of row `i`.
    ///
    /// Each output element sums its terms in ascending value order, so the
    /// result depends only on the multiset of terms: relabeling rows
    /// permutes the output bit for bit.
    pub fn aggregate(&mut self, x: Var, adjacency: WeightedAdjacency) -> Result<Var, TensorError> {
        let (n, d) = self.rank2("aggregate", x)?;
        if adjacency.len() != n || adjacency.iter().flatten().any(|&(j, _)| j >= n) {
            return Err(mismatch("aggregate", format!("{} adjacency rows for {n} nodes", adjacency.len())));
        }
        let src = self.data(x);
        let mut out = vec![0.0; n * d];
        let mut terms = Vec::new();
        for (i, neighbors) in adjacency.iter().enumerate() {
            for f in 0..d {
                terms.clear();
                terms.extend(neighbors.iter().map(|&(j, a)| a * src[j * d + f]));
                terms.sort_by(f64::total_cmp);
                out[i * d + f] = terms.iter().sum();
            }
        }
        Ok(self.push(
            Tensor::new(vec![n, d], out)?,
            &[x],
            Op::Aggregate { input: x, adjacency },
        ))
    }

    /// Picks rows of `x: [n, d]`; `None` yields a zero row.
    pub fn gather_rows(&mut self, x: Var, index: Vec<Option<usize>>) -> Result<Var, TensorError> {
        let (n, d) = self.rank2("gather_rows", x)?;
        if index.iter().flatten().any(|&r| r >= n) {
            return Err(mismatch("gather_rows", format!("row index out of range for {n} rows")));
        }
        let src = self.data(x);
        let mut out = vec![0.0; index.len() * d];
        for (r, idx) in index.iter().enumerate() {
            if let Some(s) = *idx {
                out[r * d..(r + 1) * d].copy_from_slice(&src[s * d..(s + 1) * d]);
            }
        }
        let rows = index.len();
        Ok(self.push(
            Tensor::new(vec![rows, d], out)?,
            &[x],
            Op::GatherRows { input: x, index },
        ))
    }

    /// Column means of `[n, d]`, shape `[1, d]`.
    pub fn mean_rows(&mut self, x: Var) -> Result<Var, TensorError> {
        let (n, d) = self.rank2("mean_rows", x)?;
        let src = self.data(x);
        let out = (0..d)
            .map(|f| (0..n).map(|i| src[i * d + f]).sum::<f64>() / n as f64)
            .collect();
        Ok(self.push(Tensor::new(vec![1, d], out)?, &[x], Op::MeanRows(x)))
    }

    /// Stacks `[r_i, d]` tensors along the first axis.
    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var, TensorError> {
        let first = *parts.first().ok_or_else(|| mismatch("concat_rows", "nothing to concatenate"))?;
        let (_, d) = self.rank2("concat_rows", first)?;
        let mut rows = 0;
        let mut out = Vec::new();
        for &p in parts {
            let (r, d2) = self.rank2("concat_rows", p)?;
            if d2 != d {
                return Err(mismatch("concat_rows", format!("width {d2} vs {d}")));
            }
            rows += r;
            out.extend_from_slice(self.data(p));
        }
        Ok(self.push(Tensor::new(vec![rows, d], out)?, parts, Op::ConcatRows(parts.to_vec())))
    }

    /// Mean squared error against constant targets, shape `[1]`.
    pub fn mse_loss(&mut self, pred: Var, target: &[f64]) -> Result<Var, TensorError> {
        let p = self.data(pred);
        if p.len() != target.len() || p.is_empty() {
            return Err(mismatch("mse_loss", format!("{} predictions, {} targets", p.len(), target.len())));
        }
        let loss = p
            .iter()
            .zip(target)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / p.len() as f64;
        Ok(self.push(
            Tensor::scalar(loss),
            &[pred],
            Op::Mse {
                pred,
                target: target.to_vec(),
            },
        ))
    }

    /// Reverse pass from a one-element `loss`.
    pub fn backward(&self, loss: Var) -> Result<Gradients, TensorError> {
        self.backward_seeded(loss, Vec::new())
    }

    /// Like [`Tape::backward`], but the gradients of the listed variables
    /// are added onto the given buffers, which [`Gradients::take`] hands
    /// back. Lets callers sum gradients over many tapes without extra
    /// copies.
    pub fn backward_seeded(&self, loss: Var, seeds: Vec<(Var, Vec<f64>)>) -> Result<Gradients, TensorError> {
        let loss_value = self.value(loss);
        if loss_value.len() != 1 {
            return Err(TensorError::NonScalarLoss(loss_value.shape().to_vec()));
        }
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; self.nodes.len()];
        for (var, buffer) in seeds {
            let len = self.nodes[var.0].value.len();
            if buffer.len() != len {
                return Err(mismatch("backward", format!("seed of length {} for {len} values", buffer.len())));
            }
            grads[var.0] = Some(buffer);
        }
        grads[loss.0] = Some(vec![1.0]);
        for idx in (0..=loss.0).rev() {
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            if matches!(node.op, Op::Leaf) {
                continue;
            }
            let Some(g) = grads[idx].take() else { continue };
            self.propagate(&node.op, &node.value, &g, &mut grads);
        }
        Ok(Gradients { grads })
    }

    fn accumulate<F>(&self, grads: &mut [Option<Vec<f64>>], var: Var, f: F)
    where
        F: FnOnce(&mut [f64]),
    {
        if !self.nodes[var.0].requires_grad {
            return;
        }
        let len = self.nodes[var.0].value.len();
        let slot = grads[var.0].get_or_insert_with(|| vec![0.0; len]);
        f(slot);
    }

    fn propagate(&self, op: &Op, out: &Tensor, g: &[f64], grads: &mut [Option<Vec<f64>>]) {
        match op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let (m, k) = (self.shape(*a)[0], self.shape(*a)[1]);
                let n = self.shape(*b)[1];
                let (av, bv) = (self.data(*a), self.data(*b));
                self.accumulate(grads, *a, |ga| {
                    for i in 0..m {
                        for p in 0..k {
                            let mut s = 0.0;
                            for j in 0..n {
                                s += g[i * n + j] * bv[p * n + j];
                            }
                            ga[i * k + p] += s;
                        }
                    }
                });
                self.accumulate(grads, *b, |gb| {
                    for i in 0..m {
                        for p in 0..k {
                            let x = av[i * k + p];
                            if x == 0.0 {
                                continue;
                            }
                            for j in 0..n {
                                gb[p * n + j] += x * g[i * n + j];
                            }
                        }
                    }
                });
            }
            Op::Transpose(a) => {
                let (m, n) = (self.shape(*a)[0], self.shape(*a)[1]);
                self.accumulate(grads, *a, |ga| {
                    for i in 0..m {
                        for j in 0..n {
                            ga[i * n + j] += g[j * m + i];
                        }
                    }
                });
            }
            Op::AddBias(x, bias) => {
                let n = self.shape(*bias)[0];
                self.accumulate(grads, *x, |gx| add_into(gx, g));
                self.accumulate(grads, *bias, |gb| {
                    for (k, v) in g.iter().enumerate() {
                        gb[k % n] += v;
                    }
                });
            }
            Op::Add(a, b) => {
                self.accumulate(grads, *a, |ga| add_into(ga, g));
                self.accumulate(grads, *b, |gb| add_into(gb, g));
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.data(*a), self.data(*b));
                self.accumulate(grads, *a, |ga| {
                    for k in 0..ga.len() {
                        ga[k] += g[k] * bv[k];
                    }
                });
                self.accumulate(grads, *b, |gb| {
                    for k in 0..gb.len() {
                        gb[k] += g[k] * av[k];
                    }
                });
            }
            Op::Scale(a, factor) => {
                self.accumulate(grads, *a, |ga| {
                    for k in 0..ga.len() {
                        ga[k] += g[k] * factor;
                    }
                });
            }
            Op::Sum(a) => {
                self.accumulate(grads, *a, |ga| ga.iter_mut().for_each(|x| *x += g[0]));
            }
            Op::Relu(a) => {
                let av = self.data(*a);
                self.accumulate(grads, *a, |ga| {
                    for k in 0..ga.len() {
                        if av[k] > 0.0 {
                            ga[k] += g[k];
                        }
                    }
                });
            }
            Op::Sigmoid(a) => {
                let y = out.data();
                self.accumulate(grads, *a, |ga| {
                    for k in 0..ga.len() {
                        ga[k] += g[k] * y[k] * (1.0 - y[k]);
                    }
                });
            }
            Op::Reshape(a) => self.accumulate(grads, *a, |ga| add_into(ga, g)),
            Op::Conv2d { input, weight, bias } => {
                let [b, c, h, w] = self.rank4("conv2d", *input).expect("checked in forward");
                let [o, _, kh, kw] = self.rank4("conv2d", *weight).expect("checked in forward");
                let geom = ConvGeometry { b, c, h, w, o, kh, kw };
                let (xv, wv) = (self.data(*input), self.data(*weight));
                self.accumulate(grads, *input, |gx| geom.backward_input(g, wv, gx));
                self.accumulate(grads, *weight, |gw| geom.backward_weight(g, xv, gw));
                self.accumulate(grads, *bias, |gb| {
                    for bi in 0..b {
                        for oc in 0..o {
                            let base = (bi * o + oc) * h * w;
                            gb[oc] += g[base..base + h * w].iter().sum::<f64>();
                        }
                    }
                });
            }
            Op::MaxPool { input, argmax } => {
                self.accumulate(grads, *input, |gx| {
                    for (k, &src) in argmax.iter().enumerate() {
                        gx[src] += g[k];
                    }
                });
            }
            Op::Resize { input, rows, cols } => {
                let [b, c, h, w] = self.rank4("resize", *input).expect("checked in forward");
                let (oh, ow) = (rows.len(), cols.len());
                self.accumulate(grads, *input, |gx| {
                    for plane in 0..b * c {
                        let (ib, ob) = (plane * h * w, plane * oh * ow);
                        for (ty, ry) in rows.iter().enumerate() {
                            for (tx, rx) in cols.iter().enumerate() {
                                let go = g[ob + ty * ow + tx];
                                for &(sy, wy) in ry {
                                    for &(sx, wx) in rx {
                                        gx[ib + sy * w + sx] += wy * wx * go;
                                    }
                                }
                            }
                        }
                    }
                });
            }
            Op::Aggregate { input, adjacency } => {
                let d = self.shape(*input)[1];
                self.accumulate(grads, *input, |gx| {
                    for (i, neighbors) in adjacency.iter().enumerate() {
                        for &(j, a) in neighbors {
                            for f in 0..d {
                                gx[j * d + f] += a * g[i * d + f];
                            }
                        }
                    }
                });
            }
            Op::GatherRows { input, index } => {
                let d = self.shape(*input)[1];
                self.accumulate(grads, *input, |gx| {
                    for (r, idx) in index.iter().enumerate() {
                        if let Some(s) = *idx {
                            for f in 0..d {
                                gx[s * d + f] += g[r * d + f];
                            }
                        }
                    }
                });
            }
            Op::MeanRows(a) => {
                let (n, d) = (self.shape(*a)[0], self.shape(*a)[1]);
                self.accumulate(grads, *a, |ga| {
                    for i in 0..n {
                        for f in 0..d {
                            ga[i * d + f] += g[f] / n as f64;
                        }
                    }
                });
            }
            Op::ConcatRows(parts) => {
                let mut offset = 0;
                for &p in parts {
                    let len = self.value(p).len();
                    self.accumulate(grads, p, |gp| add_into(gp, &g[offset..offset + len]));
                    offset += len;
                }
            }
            Op::Mse { pred, target } => {
                let p = self.data(*pred);
                let scale = 2.0 * g[0] / p.len() as f64;
                self.accumulate(grads, *pred, |gp| {
                    for k in 0..gp.len() {
                        gp[k] += scale * (p[k] - target[k]);
                    }
                });
            }
        }
    }
}

fn add_into(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn matmul_raw(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let x = a[i * k + p];
            let brow = &b[p * n..(p + 1) * n];
            for j in 0..n {
                row[j] += x * brow[j];
            }
        }
    }
    out
}

fn resize_taps(source: usize, target: usize) -> Taps {
    (0..target)
        .map(|t| {
            let pos = if target == 1 {
                (source - 1) as f64 / 2.0
            } else {
                (t * (source - 1)) as f64 / (target - 1) as f64
            };
            let i0 = (pos.floor() as usize).min(source - 1);
            let frac = pos - i0 as f64;
            let mut taps = vec![(i0, 1.0 - frac)];
            if frac > 0.0 && i0 + 1 < source {
                taps.push((i0 + 1, frac));
            }
            taps
        })
        .collect()
}

struct ConvGeometry {
    b: usize,
    c: usize,
    h: usize,
    w: usize,
    o: usize,
    kh: usize,
    kw: usize,
}

impl ConvGeometry {
    /// Output positions along one axis for which tap `k` lands inside the
    /// input.
    fn valid(k: usize, pad: usize, len: usize) -> std::ops::Range<usize> {
        let lo = pad.saturating_sub(k);
        let hi = (len + pad).saturating_sub(k).min(len);
        lo..hi.max(lo)
    }

    /// Kernel taps `(ky, kx)` that touch the input at least once.
    fn taps(&self) -> Vec<(usize, usize)> {
        let (ph, pw) = ((self.kh - 1) / 2, (self.kw - 1) / 2);
        let mut taps = Vec::new();
        for ky in 0..self.kh {
            if Self::valid(ky, ph, self.h).is_empty() {
                continue;
            }
            for kx in 0..self.kw {
                if !Self::valid(kx, pw, self.w).is_empty() {
                    taps.push((ky, kx));
                }
            }
        }
        taps
    }

    /// Unfolds image `bi` into `h * w` rows of `(channel, tap)` entries,
    /// zero where the tap falls in the padding.
    fn unfold(&self, x: &[f64], bi: usize, taps: &[(usize, usize)]) -> Vec<f64> {
        let Self { c, h, w, kh, kw, .. } = *self;
        let (ph, pw) = ((kh - 1) / 2, (kw - 1) / 2);
        let width = c * taps.len();
        let mut col = vec![0.0; h * w * width];
        for ic in 0..c {
            let ib = (bi * c + ic) * h * w;
            for (t, &(ky, kx)) in taps.iter().enumerate() {
                let r = ic * taps.len() + t;
                for y in Self::valid(ky, ph, h) {
                    let iy = y + ky - ph;
                    for xx in Self::valid(kx, pw, w) {
                        col[(y * w + xx) * width + r] = x[ib + iy * w + xx + kx - pw];
                    }
                }
            }
        }
        col
    }

    /// Weights restricted to live taps, one row of `(channel, tap)` per
    /// output channel.
    fn pack(&self, weight: &[f64], taps: &[(usize, usize)]) -> Vec<f64> {
        let offsets: Vec<usize> = taps.iter().map(|&(ky, kx)| ky * self.kw + kx).collect();
        let area = self.kh * self.kw;
        let mut packed = Vec::with_capacity(self.o * self.c * taps.len());
        for block in weight.chunks_exact(area) {
            packed.extend(offsets.iter().map(|&off| block[off]));
        }
        packed
    }

    fn forward(&self, x: &[f64], weight: &[f64], bias: &[f64]) -> Vec<f64> {
        let Self { b, c, h, w, o, .. } = *self;
        let hw = h * w;
        let taps = self.taps();
        let width = c * taps.len();
        let packed = self.pack(weight, &taps);
        let mut out = vec![0.0; b * o * hw];
        for bi in 0..b {
            let col = self.unfold(x, bi, &taps);
            for oc in 0..o {
                let wrow = &packed[oc * width..][..width];
                for pos in 0..hw {
                    out[(bi * o + oc) * hw + pos] = bias[oc] + dot(wrow, &col[pos * width..][..width]);
                }
            }
        }
        out
    }

    fn backward_input(&self, g: &[f64], weight: &[f64], gx: &mut [f64]) {
        let Self { b, c, h, w, o, kh, kw } = *self;
        let (ph, pw) = ((kh - 1) / 2, (kw - 1) / 2);
        let hw = h * w;
        let taps = self.taps();
        let width = c * taps.len();
        let packed = self.pack(weight, &taps);
        let mut gcol = vec![0.0; hw * width];
        for bi in 0..b {
            gcol.iter_mut().for_each(|v| *v = 0.0);
            for pos in 0..hw {
                let dst = &mut gcol[pos * width..][..width];
                for oc in 0..o {
                    axpy(dst, g[(bi * o + oc) * hw + pos], &packed[oc * width..][..width]);
                }
            }
            for ic in 0..c {
                let ib = (bi * c + ic) * hw;
                for (t, &(ky, kx)) in taps.iter().enumerate() {
                    let r = ic * taps.len() + t;
                    for y in Self::valid(ky, ph, h) {
                        let iy = y + ky - ph;
                        for xx in Self::valid(kx, pw, w) {
                            gx[ib + iy * w + xx + kx - pw] += gcol[(y * w + xx) * width + r];
                        }
                    }
                }
            }
        }
    }

    fn backward_weight(&self, g: &[f64], x: &[f64], gw: &mut [f64]) {
        let Self { b, c, h, w, o, .. } = *self;
        let hw = h * w;
        let taps = self.taps();
        let width = c * taps.len();
        let mut gpacked = vec![0.0; o * width];
        for bi in 0..b {
            let col = self.unfold(x, bi, &taps);
            for oc in 0..o {
                let dst = &mut gpacked[oc * width..][..width];
                for pos in 0..hw {
                    axpy(dst, g[(bi * o + oc) * hw + pos], &col[pos * width..][..width]);
                }
            }
        }
        let area = self.kh * self.kw;
        for (block, grads) in gw.chunks_exact_mut(area).zip(gpacked.chunks_exact(taps.len())) {
            for (&(ky, kx), &v) in taps.iter().zip(grads) {
                block[ky * self.kw + kx] += v;
            }
        }
    }
}

/// Dot product with four interleaved partial sums.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `dst += a * src`.
fn axpy(dst: &mut [f64], a: f64, src: &[f64]) {
    if a == 0.0 {
        return;
    }
    dst.iter_mut().zip(src).for_each(|(d, s)| *d += a * s);
}
