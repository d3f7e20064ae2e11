//! Rectangular linear assignment (Hungarian algorithm with potentials).
//!
//! Solves `min Σ cost[i][col(i)]` over injective `col` for an `n × m` matrix
//! with `n ≤ m`, in `O(n²m)`. A rectangular matrix behaves exactly like the
//! square matrix padded with `m − n` zero-cost dummy rows, without
//! materializing them.
//!
//! The cost type only needs ordered-group operations, so lexicographic costs
//! such as [`Score`] work as well as `f64`.

use std::ops::{Add, Sub};

use crate::score::Score;

pub trait LapCost: Copy + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    fn zero() -> Self;
    /// Strictly greater than any cost or reduced cost seen in practice.
    fn infinity() -> Self;
}

impl LapCost for f64 {
    fn zero() -> Self {
        0.0
    }
    fn infinity() -> Self {
        f64::INFINITY
    }
}

/// As a cost, a `Score` orders with more singular terms counting as larger,
/// which is what negating a value score gives.
impl LapCost for Score {
    fn zero() -> Self {
        Score::ZERO
    }
    fn infinity() -> Self {
        Score { singular: i64::MIN / 4, finite: 0.0 }
    }
}

/// Column chosen for each row.
///
/// # Panics
/// If some row is longer or shorter than the first, or there are more rows
/// than columns.
pub fn solve_min<C: LapCost>(costs: &[Vec<C>]) -> Vec<usize> {
    let n = costs.len();
    if n == 0 {
        return Vec::new();
    }
    let m = costs[0].len();
    assert!(costs.iter().all(|r| r.len() == m), "ragged cost matrix");
    assert!(n <= m, "more rows than columns");

    // 1-based with index 0 as the virtual root, following the classic
    // shortest-augmenting-path formulation.
    let mut u = vec![C::zero(); n + 1];
    let mut v = vec![C::zero(); m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![C::infinity(); m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = C::infinity();
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=m {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_min(costs: &[Vec<f64>]) -> f64 {
        fn go(costs: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
            if row == costs.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..used.len() {
                if !used[j] {
                    used[j] = true;
                    best = best.min(costs[row][j] + go(costs, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        go(costs, 0, &mut vec![false; costs[0].len()])
    }

    #[test]
    fn square_instance() {
        let costs = vec![vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]];
        let a = solve_min(&costs);
        let total: f64 = a.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
        assert_eq!(total, 5.0);
    }

    #[test]
    fn rectangular_matches_brute_force() {
        let mut state = 0x2545_f491_4f6c_dd1du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 1000) as f64 / 10.0 - 50.0
        };
        for n in 1..=4 {
            for m in n..=6 {
                let costs: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| next()).collect()).collect();
                let a = solve_min(&costs);
                let mut cols = a.clone();
                cols.sort_unstable();
                cols.dedup();
                assert_eq!(cols.len(), n);
                let total: f64 = a.iter().enumerate().map(|(i, &j)| costs[i][j]).sum();
                assert!((total - brute_min(&costs)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn lexicographic_costs_avoid_singular_cells() {
        // Cost = −score; the singular cell must be avoided even though its
        // finite part looks attractive.
        let bad = -(Score::NEG_INF + Score::finite(100.0));
        let costs = vec![vec![bad, -Score::finite(1.0)], vec![-Score::finite(2.0), -Score::finite(3.0)]];
        assert_eq!(solve_min(&costs), vec![1, 0]);
    }
}
