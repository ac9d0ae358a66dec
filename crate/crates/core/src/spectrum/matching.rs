//! Matching distance between two equally sized quasi-energy multisets.

use std::f64::consts::TAU;

use crate::C64;

/// Greedy matches longer than this trigger the optimal assignment.
pub const GREEDY_ACCEPT: f64 = 1e-6;

/// Distance between quasi-energies; the real part lives on a circle of
/// circumference 2π.
pub fn qe_distance(a: C64, b: C64) -> f64 {
    let mut dx = (a.re - b.re).rem_euclid(TAU);
    if dx > TAU / 2.0 {
        dx = TAU - dx;
    }
    dx.hypot(a.im - b.im)
}

/// Largest pair distance of a one-to-one matching between `a` and `b`.
///
/// Greedy nearest-neighbour matching first; when any greedy pair is farther
/// apart than [`GREEDY_ACCEPT`] the minimum-cost assignment is solved exactly
/// and its largest pair distance is returned instead.
pub fn matching_distance(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len(), "matching needs equally sized sets");
    if a.is_empty() {
        return 0.0;
    }
    let greedy = greedy_match(a, b);
    if greedy <= GREEDY_ACCEPT {
        return greedy;
    }
    let n = a.len();
    let cost: Vec<f64> = (0..n * n)
        .map(|k| qe_distance(a[k / n], b[k % n]))
        .collect();
    let assign = min_cost_assignment(&cost, n);
    assign
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i * n + j])
        .fold(0.0, f64::max)
        .min(greedy)
}

fn greedy_match(a: &[C64], b: &[C64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0_f64;
    for &x in a {
        let (best, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, &y)| (j, qe_distance(x, y)))
            .min_by(|p, q| p.1.total_cmp(&q.1).then(p.0.cmp(&q.0)))
            .expect("b has an unused element");
        used[best] = true;
        worst = worst.max(d);
    }
    worst
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on a dense
/// row-major `n x n` cost matrix. Returns the column assigned to each row.
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n);
    // 1-based arrays; column 0 is the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
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
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if row_of[j] > 0 {
            assign[row_of[j] - 1] = j - 1;
        }
    }
    assign
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(cost: &[f64], n: usize) -> f64 {
        fn rec(cost: &[f64], n: usize, row: usize, used: &mut Vec<bool>) -> f64 {
            if row == n {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..n {
                if !used[j] {
                    used[j] = true;
                    best = best.min(cost[row * n + j] + rec(cost, n, row + 1, used));
                    used[j] = false;
                }
            }
            best
        }
        rec(cost, n, 0, &mut vec![false; n])
    }

    #[test]
    fn hungarian_matches_enumeration() {
        let mut s = 12345u64;
        for n in 1..=6 {
            for _ in 0..20 {
                let cost: Vec<f64> = (0..n * n)
                    .map(|_| {
                        s = s
                            .wrapping_mul(6364136223846793005)
                            .wrapping_add(1442695040888963407);
                        (s >> 11) as f64 / (1u64 << 53) as f64
                    })
                    .collect();
                let a = min_cost_assignment(&cost, n);
                let total: f64 = a.iter().enumerate().map(|(i, &j)| cost[i * n + j]).sum();
                assert!((total - brute_force(&cost, n)).abs() < 1e-12);
                let mut cols = a.clone();
                cols.sort();
                assert_eq!(cols, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn greedy_trap_is_resolved() {
        // greedy pairs 0.0 with 0.05 and leaves 0.1 for -0.3
        let a = [C64::new(0.0, 0.0), C64::new(0.1, 0.0)];
        let b = [C64::new(0.05, 0.0), C64::new(-0.3, 0.0)];
        let d = matching_distance(&a, &b);
        assert!((d - 0.3).abs() < 1e-12, "{d}");
    }

    #[test]
    fn wraps_across_branch_cut() {
        let d = qe_distance(C64::new(3.1, 0.0), C64::new(-3.1, 0.0));
        assert!((d - (TAU - 6.2)).abs() < 1e-12);
    }
}
