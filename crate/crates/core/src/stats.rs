//! Rank correlation and contingency statistics.

use std::cmp::Ordering;

use num_traits::Float;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Kendall's tau-b, tie-corrected, in O(n log n) (Knight's algorithm).
///
/// `None` when the lengths differ, fewer than two points are given, any
/// value is NaN, or either sequence is constant.
pub fn kendall_tau<F: Float>(xs: &[F], ys: &[F]) -> Option<F> {
    let n = xs.len();
    if n != ys.len() || n < 2 || xs.iter().chain(ys).any(|v| v.is_nan()) {
        return None;
    }
    let cmp = |a: &F, b: &F| a.partial_cmp(b).unwrap_or(Ordering::Equal);
    let mut pairs: Vec<(F, F)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp(&a.0, &b.0).then(cmp(&a.1, &b.1)));

    let pairs_in = |run: u64| run * run.saturating_sub(1) / 2;
    let n0 = pairs_in(n as u64);
    let (mut n1, mut n3) = (0u64, 0u64);
    let (mut run_x, mut run_xy) = (1u64, 1u64);
    for w in pairs.windows(2) {
        if w[0].0 == w[1].0 {
            run_x += 1;
            if w[0].1 == w[1].1 {
                run_xy += 1;
            } else {
                n3 += pairs_in(run_xy);
                run_xy = 1;
            }
        } else {
            n1 += pairs_in(run_x);
            n3 += pairs_in(run_xy);
            run_x = 1;
            run_xy = 1;
        }
    }
    n1 += pairs_in(run_x);
    n3 += pairs_in(run_xy);

    let mut ys_sorted: Vec<F> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys_sorted, &cmp);

    let mut n2 = 0u64;
    let mut run_y = 1u64;
    for w in ys_sorted.windows(2) {
        if w[0] == w[1] {
            run_y += 1;
        } else {
            n2 += pairs_in(run_y);
            run_y = 1;
        }
    }
    n2 += pairs_in(run_y);

    if n0 == n1 || n0 == n2 {
        return None;
    }
    let f = |v: u64| F::from(v).expect("count fits the float type");
    let num = f(n0) - f(n1) - f(n2) + f(n3) - f(2) * f(swaps);
    let den = ((f(n0) - f(n1)) * (f(n0) - f(n2))).sqrt();
    Some(num / den)
}

/// Stable merge sort returning the number of inversions.
fn merge_count<F: Copy>(v: &mut [F], cmp: &impl Fn(&F, &F) -> Ordering) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], cmp) + merge_count(&mut v[mid..], cmp);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if cmp(&v[j], &v[i]) == Ordering::Less {
            merged.push(v[j]);
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            merged.push(v[i]);
            i += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..n]);
    v.copy_from_slice(&merged);
    swaps
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare<F> {
    pub statistic: F,
    pub df: usize,
    /// Upper-tail probability; absent when df is zero.
    pub p_value: Option<F>,
}

/// Pearson chi-square test of independence over an r x 2 table, without
/// continuity correction. Rows summing to zero are ignored.
pub fn chi_square<F: Float>(rows: &[[u64; 2]]) -> ChiSquare<F> {
    let rows: Vec<[u64; 2]> = rows.iter().copied().filter(|r| r[0] + r[1] > 0).collect();
    let f = |v: u64| F::from(v).expect("count fits the float type");
    let col = [rows.iter().map(|r| r[0]).sum::<u64>(), rows.iter().map(|r| r[1]).sum::<u64>()];
    let total = col[0] + col[1];
    let df = rows.len().saturating_sub(1);
    let mut stat = F::zero();
    if total > 0 && col[0] > 0 && col[1] > 0 {
        for r in &rows {
            let rt = r[0] + r[1];
            for c in 0..2 {
                let expected = f(rt) * f(col[c]) / f(total);
                let d = f(r[c]) - expected;
                stat = stat + d * d / expected;
            }
        }
    }
    let p_value = (df > 0).then(|| {
        let dist = ChiSquared::new(df as f64).expect("positive degrees of freedom");
        F::from(dist.sf(stat.to_f64().unwrap_or(f64::INFINITY))).unwrap_or_else(F::zero)
    });
    ChiSquare { statistic: stat, df, p_value }
}
