use std::cmp::Ordering;

use super::MetricError;
use crate::scalar::Scalar;

fn cmp<T: PartialOrd>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn check_pair<T>(a: &[T], b: &[T]) -> Result<(), MetricError> {
    if a.len() != b.len() {
        return Err(MetricError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(MetricError::TooShort(a.len()));
    }
    Ok(())
}

/// 1-based ranks with ties sharing their mean rank.
fn average_ranks<T: Scalar>(values: &[T]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| cmp(&values[a], &values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && cmp(&values[idx[end]], &values[idx[start]]) == Ordering::Equal {
            end += 1;
        }
        let mean = (start + end + 1) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = mean;
        }
        start = end;
    }
    ranks
}

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman_rho<T: Scalar>(pred: &[T], truth: &[T]) -> Result<f64, MetricError> {
    check_pair(pred, truth)?;
    let (a, b) = (average_ranks(pred), average_ranks(truth));
    let n = a.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        let (dx, dy) = (x - mean, y - mean);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

fn tied_pairs(sorted: &[usize], same: impl Fn(usize, usize) -> bool) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if same(w[0], w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Kendall's τ-b in O(n log n) (Knight's merge-sort method).
pub fn kendall_tau<T: Scalar>(pred: &[T], truth: &[T]) -> Result<f64, MetricError> {
    check_pair(pred, truth)?;
    let n = pred.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| cmp(&pred[a], &pred[b]).then(cmp(&truth[a], &truth[b])));
    let same_x = |a: usize, b: usize| cmp(&pred[a], &pred[b]) == Ordering::Equal;
    let ties_x = tied_pairs(&idx, same_x);
    let ties_xy = tied_pairs(&idx, |a, b| same_x(a, b) && cmp(&truth[a], &truth[b]) == Ordering::Equal);

    // count inversions of truth along the pred-sorted order
    let mut buffer = idx.clone();
    let swaps = merge_count(&mut idx, &mut buffer, truth);
    let ties_y = tied_pairs(&idx, |a, b| cmp(&truth[a], &truth[b]) == Ordering::Equal);

    let total = (n as u64) * (n as u64 - 1) / 2;
    let denom = ((total - ties_x) as f64) * ((total - ties_y) as f64);
    if denom == 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    let numer = total as f64 - ties_x as f64 - ties_y as f64 + ties_xy as f64 - 2.0 * swaps as f64;
    Ok((numer / denom.sqrt()).clamp(-1.0, 1.0))
}

/// Stable merge sort of `idx` by `key`, returning the number of strict
/// inversions.
fn merge_count<T: Scalar>(idx: &mut [usize], buf: &mut [usize], key: &[T]) -> u64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut idx[..mid], &mut buf[..mid], key);
    swaps += merge_count(&mut idx[mid..], &mut buf[mid..], key);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp(&key[idx[j]], &key[idx[i]]) == Ordering::Less {
            buf[k] = idx[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = idx[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&idx[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&idx[j..n]);
    idx.copy_from_slice(&buf[..n]);
    swaps
}

/// Indices of the `k` largest scores; ties go to the smaller index.
pub fn top_k<T: Scalar>(scores: &[T], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| cmp(&scores[b], &scores[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

/// Overlap of predicted and true top-`k` candidates, divided by `k`.
/// Scores are similarities (higher ranks first), indexed by candidate id.
pub fn precision_at_k<T: Scalar>(pred: &[T], truth: &[T], k: usize) -> Result<f64, MetricError> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch(pred.len(), truth.len()));
    }
    if k == 0 || k > pred.len() {
        return Err(MetricError::InvalidK { k, n: pred.len() });
    }
    let mut hit = vec![false; pred.len()];
    for i in top_k(truth, k) {
        hit[i] = true;
    }
    let overlap = top_k(pred, k).into_iter().filter(|&i| hit[i]).count();
    Ok(overlap as f64 / k as f64)
}

pub fn mse<T: Scalar>(pred: &[T], truth: &[T]) -> Result<f64, MetricError> {
    if pred.len() != truth.len() {
        return Err(MetricError::LengthMismatch(pred.len(), truth.len()));
    }
    if pred.is_empty() {
        return Err(MetricError::TooShort(0));
    }
    let total: f64 = pred
        .iter()
        .zip(truth)
        .map(|(&a, &b)| {
            let d = a.to_f64_lossy() - b.to_f64_lossy();
            d * d
        })
        .sum();
    Ok(total / pred.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_examples() {
        let up = [1.0, 2.0, 3.0, 4.0, 5.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(spearman_rho(&up, &up).unwrap(), 1.0);
        assert_eq!(spearman_rho(&up, &down).unwrap(), -1.0);
        let swapped = [1.0, 2.0, 3.0, 5.0, 4.0];
        assert!((spearman_rho(&swapped, &up).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn spearman_errors() {
        assert_eq!(spearman_rho(&[1.0], &[1.0]), Err(MetricError::TooShort(1)));
        assert_eq!(
            spearman_rho(&[1.0, 1.0], &[1.0, 2.0]),
            Err(MetricError::ZeroVariance)
        );
        assert!(spearman_rho(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn kendall_examples() {
        let up = [1i64, 2, 3, 4];
        let down = [4i64, 3, 2, 1];
        assert_eq!(kendall_tau(&up, &up).unwrap(), 1.0);
        assert_eq!(kendall_tau(&up, &down).unwrap(), -1.0);
        assert_eq!(kendall_tau(&[1i64, 1], &[1, 2]), Err(MetricError::ZeroVariance));
    }

    #[test]
    fn precision_examples() {
        let a: Vec<f64> = (0..20).map(|v| v as f64).collect();
        assert_eq!(precision_at_k(&a, &a, 10).unwrap(), 1.0);
        let rev: Vec<f64> = a.iter().map(|v| -v).collect();
        assert_eq!(precision_at_k(&a, &rev, 10).unwrap(), 0.0);
        assert!(precision_at_k(&a, &a, 0).is_err());
        assert!(precision_at_k(&a, &a, 21).is_err());
    }

    #[test]
    fn precision_tie_break_by_id() {
        // all equal: both top-2 sets are {0, 1}
        assert_eq!(precision_at_k(&[0.5; 4], &[0.5; 4], 2).unwrap(), 1.0);
        assert_eq!(top_k(&[0.2, 0.9, 0.9, 0.1], 2), vec![1, 2]);
    }
}
