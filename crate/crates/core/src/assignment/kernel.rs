use super::cost::CostMatrix;
use super::solve_lap_hungarian;
use crate::scalar::Scalar;

/// Optimal assignment kernel: the largest total base-kernel similarity
/// over bijections between `x` and `y`.
///
/// The smaller side is padded with dummies of similarity zero to
/// everything. The maximization runs as a minimization of
/// `max - k(x, y)`, which keeps the LAP costs non-negative.
pub fn assignment_kernel<I, T, K>(x: &[I], y: &[I], base_kernel: K) -> T
where
    T: Scalar,
    K: Fn(&I, &I) -> T,
{
    let n = x.len().max(y.len());
    if n == 0 {
        return T::zero();
    }
    let mut sim = vec![T::zero(); n * n];
    for (i, a) in x.iter().enumerate() {
        for (j, b) in y.iter().enumerate() {
            sim[i * n + j] = base_kernel(a, b);
        }
    }
    let top = sim.iter().fold(T::zero(), |m, &s| m.max_of(s));
    let costs = sim.iter().map(|&s| top - s).collect();
    let c = CostMatrix::new(n, costs).expect("shifted similarities are non-negative");
    let assignment = solve_lap_hungarian(&c);
    assignment
        .perm
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &j)| acc + sim[i * n + j])
}
