use super::cost::{Assignment, CostMatrix};
use crate::scalar::Scalar;

const UNASSIGNED: usize = usize::MAX;

/// Jonker-Volgenant shortest augmenting path solver.
///
/// Three phases: column reduction with reduction transfer, two rounds of
/// augmenting row reduction, then a Dijkstra-style augmentation for every
/// row still free. Same optimum as [`super::solve_lap_hungarian`]; under
/// ties the permutation may differ.
pub fn solve_lap_jv<T: Scalar>(c: &CostMatrix<T>) -> Assignment<T> {
    let n = c.size();
    match n {
        0 => {
            return Assignment {
                perm: Vec::new(),
                total_cost: T::zero(),
            }
        }
        1 => return Assignment::from_perm(c, vec![0]),
        _ => {}
    }
    let big = T::solver_infinity();
    let mut row_sol = vec![UNASSIGNED; n];
    let mut col_sol = vec![UNASSIGNED; n];
    let mut v = vec![T::zero(); n];

    // column reduction
    let mut matches = vec![0usize; n];
    for j in (0..n).rev() {
        let (mut imin, mut min) = (0, c.get(0, j));
        for i in 1..n {
            if c.get(i, j) < min {
                min = c.get(i, j);
                imin = i;
            }
        }
        v[j] = min;
        matches[imin] += 1;
        if matches[imin] == 1 {
            row_sol[imin] = j;
            col_sol[j] = imin;
        } else if v[j] < v[row_sol[imin]] {
            let j1 = row_sol[imin];
            row_sol[imin] = j;
            col_sol[j] = imin;
            col_sol[j1] = UNASSIGNED;
        } else {
            col_sol[j] = UNASSIGNED;
        }
    }

    // reduction transfer
    let mut free = Vec::with_capacity(n);
    for i in 0..n {
        match matches[i] {
            0 => free.push(i),
            1 => {
                let j1 = row_sol[i];
                let mut min = big;
                for j in 0..n {
                    if j != j1 {
                        let h = c.get(i, j) - v[j];
                        if h < min {
                            min = h;
                        }
                    }
                }
                v[j1] = v[j1] - min;
            }
            _ => {}
        }
    }
    // rows matched more than once in column reduction lost all but one
    // column; they are already free via col_sol, but their row_sol must
    // point at the column they kept.
    for (j, &i) in col_sol.iter().enumerate() {
        if i != UNASSIGNED {
            row_sol[i] = j;
        }
    }

    // augmenting row reduction
    for _ in 0..2 {
        let mut k = 0;
        let previous = std::mem::take(&mut free);
        let mut queue = previous;
        while k < queue.len() {
            let i = queue[k];
            k += 1;
            let mut umin = c.get(i, 0) - v[0];
            let mut j1 = 0;
            let mut j2 = 0;
            let mut usubmin = big;
            for j in 1..n {
                let h = c.get(i, j) - v[j];
                if h < usubmin {
                    if h >= umin {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            let mut i0 = col_sol[j1];
            let mut lowered = false;
            if umin < usubmin {
                let updated = v[j1] - (usubmin - umin);
                // a float update too small to move the price must not be
                // retried forever; the displaced row then waits its turn
                lowered = updated < v[j1];
                v[j1] = updated;
            } else if i0 != UNASSIGNED {
                j1 = j2;
                i0 = col_sol[j2];
            }
            if row_sol[i] != UNASSIGNED && col_sol[row_sol[i]] == i {
                col_sol[row_sol[i]] = UNASSIGNED;
            }
            row_sol[i] = j1;
            col_sol[j1] = i;
            if i0 != UNASSIGNED {
                row_sol[i0] = UNASSIGNED;
                if lowered {
                    // reprocess immediately
                    k -= 1;
                    queue[k] = i0;
                } else {
                    free.push(i0);
                }
            }
        }
    }

    // augmentation
    let mut d = vec![T::zero(); n];
    let mut pred = vec![0usize; n];
    let mut col_list: Vec<usize> = (0..n).collect();
    for &free_row in &free {
        for j in 0..n {
            d[j] = c.get(free_row, j) - v[j];
            pred[j] = free_row;
            col_list[j] = j;
        }
        let mut low = 0; // col_list[..low]: settled
        let mut up = 0; // col_list[low..up]: at minimum distance, to scan
        let mut min = T::zero();
        let mut settled_end = 0;
        let end_of_path;
        'search: loop {
            if up == low {
                settled_end = low;
                min = d[col_list[up]];
                up += 1;
                for k in up..n {
                    let j = col_list[k];
                    let h = d[j];
                    if h <= min {
                        if h < min {
                            up = low;
                            min = h;
                        }
                        col_list[k] = col_list[up];
                        col_list[up] = j;
                        up += 1;
                    }
                }
                for &j in &col_list[low..up] {
                    if col_sol[j] == UNASSIGNED {
                        end_of_path = j;
                        break 'search;
                    }
                }
            }
            let j1 = col_list[low];
            low += 1;
            let i = col_sol[j1];
            let h = c.get(i, j1) - v[j1] - min;
            let mut k = up;
            while k < n {
                let j = col_list[k];
                let v2 = c.get(i, j) - v[j] - h;
                if v2 < d[j] {
                    pred[j] = i;
                    if v2 == min {
                        if col_sol[j] == UNASSIGNED {
                            end_of_path = j;
                            break 'search;
                        }
                        col_list[k] = col_list[up];
                        col_list[up] = j;
                        up += 1;
                    }
                    d[j] = v2;
                }
                k += 1;
            }
        }
        for &j1 in &col_list[..settled_end] {
            v[j1] = v[j1] + d[j1] - min;
        }
        let mut j = end_of_path;
        loop {
            let i = pred[j];
            col_sol[j] = i;
            let next = row_sol[i];
            row_sol[i] = j;
            if i == free_row {
                break;
            }
            j = next;
        }
    }

    Assignment::from_perm(c, row_sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anti_diagonal_zero() {
        let c = CostMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(solve_lap_jv(&c).total_cost, 0.0);
    }

    #[test]
    fn two_by_two() {
        let c = CostMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let a = solve_lap_jv(&c);
        assert_eq!(a.total_cost, 2.0);
        assert_eq!(a.perm, vec![0, 1]);
    }

    #[test]
    fn all_equal_costs() {
        let c = CostMatrix::<i64>::new(4, vec![7; 16]).unwrap();
        let a = solve_lap_jv(&c);
        assert_eq!(a.total_cost, 28);
        let mut cols = a.perm.clone();
        cols.sort_unstable();
        assert_eq!(cols, vec![0, 1, 2, 3]);
    }
}
