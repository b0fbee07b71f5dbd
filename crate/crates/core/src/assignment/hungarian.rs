use super::cost::{Assignment, CostMatrix};
use crate::scalar::Scalar;

/// Kuhn-Munkres with row/column potentials, O(n³).
///
/// Rows are inserted one at a time; each insertion grows a Dijkstra-like
/// alternating tree over reduced costs until a free column is reached.
pub fn solve_lap_hungarian<T: Scalar>(c: &CostMatrix<T>) -> Assignment<T> {
    let n = c.size();
    if n == 0 {
        return Assignment {
            perm: Vec::new(),
            total_cost: T::zero(),
        };
    }
    let inf = T::solver_infinity();
    // 1-based with column 0 as the virtual root
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![inf; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|m| *m = inf);
        used.iter_mut().for_each(|b| *b = false);
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            let row = c.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = row[j - 1] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] = u[row_of[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[row_of[j] - 1] = j - 1;
    }
    Assignment::from_perm(c, perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let c = CostMatrix::from_rows(&[vec![0.0]]).unwrap();
        let a = solve_lap_hungarian(&c);
        assert_eq!(a.perm, vec![0]);
        assert_eq!(a.total_cost, 0.0);
    }

    #[test]
    fn two_by_two() {
        let c = CostMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let a = solve_lap_hungarian(&c);
        assert_eq!(a.perm, vec![0, 1]);
        assert_eq!(a.total_cost, 2.0);
    }

    #[test]
    fn integer_costs() {
        let c = CostMatrix::<i64>::from_rows(&[vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]]).unwrap();
        assert_eq!(solve_lap_hungarian(&c).total_cost, 5);
    }
}
