use super::AssignmentError;
use crate::scalar::Scalar;

/// Square, non-negative cost matrix stored row-major.
///
/// Forbidden cells carry `sentinel`, a finite value larger than `n` times
/// the largest allowed entry, so no optimal assignment touches one while a
/// finite perfect matching exists.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<T> {
    n: usize,
    entries: Vec<T>,
    sentinel: Option<T>,
}

impl<T: Scalar> CostMatrix<T> {
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self, AssignmentError> {
        if entries.len() != n * n {
            return Err(AssignmentError::NotSquare {
                n,
                entries: entries.len(),
            });
        }
        for (k, &c) in entries.iter().enumerate() {
            if !c.is_finite_value() || c < T::zero() {
                return Err(AssignmentError::BadEntry {
                    row: k / n.max(1),
                    col: k % n.max(1),
                });
            }
        }
        Ok(Self {
            n,
            entries,
            sentinel: None,
        })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, AssignmentError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(AssignmentError::NotSquare {
                n,
                entries: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(n, rows.concat())
    }

    /// Builds a matrix where `None` cells are forbidden.
    pub fn with_forbidden(n: usize, cells: Vec<Option<T>>) -> Result<Self, AssignmentError> {
        assert_eq!(cells.len(), n * n, "cell count must be n * n");
        let max_finite = cells
            .iter()
            .flatten()
            .fold(T::zero(), |m, &c| m.max_of(c));
        let sentinel = T::from_usize(n.max(1)) * max_finite + T::one();
        let entries = cells.into_iter().map(|c| c.unwrap_or(sentinel)).collect();
        let mut matrix = Self::new(n, entries)?;
        matrix.sentinel = Some(sentinel);
        Ok(matrix)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.n + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.entries[row * self.n..(row + 1) * self.n]
    }

    pub fn sentinel(&self) -> Option<T> {
        self.sentinel
    }

    pub fn is_forbidden(&self, row: usize, col: usize) -> bool {
        self.sentinel == Some(self.get(row, col))
    }

    /// Sum of the entries selected by `perm`.
    pub fn cost_of(&self, perm: &[usize]) -> T {
        perm.iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, &j)| acc + self.get(i, j))
    }
}

/// A perfect matching of rows to columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<T> {
    /// `perm[row]` is the column assigned to `row`.
    pub perm: Vec<usize>,
    pub total_cost: T,
}

impl<T: Scalar> Assignment<T> {
    pub(crate) fn from_perm(c: &CostMatrix<T>, perm: Vec<usize>) -> Self {
        debug_assert!({
            let mut seen = vec![false; perm.len()];
            perm.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        });
        let total_cost = c.cost_of(&perm);
        Self { perm, total_cost }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinel_dominates_any_finite_matching() {
        let m = CostMatrix::<i64>::with_forbidden(3, vec![
            Some(4), None, Some(1),
            None, Some(2), None,
            Some(0), Some(3), None,
        ])
        .unwrap();
        assert_eq!(m.sentinel(), Some(13));
        assert!(m.is_forbidden(0, 1));
        assert!(!m.is_forbidden(0, 0));
    }

    #[test]
    fn rejects_bad_shapes_and_entries() {
        assert!(CostMatrix::<f64>::new(2, vec![0.0; 3]).is_err());
        assert!(CostMatrix::<f64>::new(1, vec![f64::NAN]).is_err());
        assert!(CostMatrix::<f64>::new(1, vec![-1.0]).is_err());
        assert!(CostMatrix::<f64>::from_rows(&[vec![1.0], vec![2.0, 3.0]]).is_err());
    }
}
