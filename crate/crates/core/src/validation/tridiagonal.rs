//! Lowest eigenvalues of a real symmetric tridiagonal matrix by Sturm-sequence
//! bisection.

/// Number of eigenvalues strictly below `x`.
///
/// `off_sq[i]` is the square of the coupling between rows `i` and `i + 1`.
pub fn sturm_count(diag: &[f64], off_sq: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        let prev = if q == 0.0 { f64::EPSILON * (diag[i - 1].abs() + 1.0) } else { q };
        q = diag[i] - x - off_sq[i - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin interval containing the whole spectrum.
pub fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let left = if i > 0 { off[i - 1].abs() } else { 0.0 };
        let right = if i < off.len() { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    (lo, hi)
}

/// The `k` smallest eigenvalues in ascending order.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    assert_eq!(off.len() + 1, diag.len(), "off-diagonal must have n - 1 entries");
    let k = k.min(diag.len());
    let off_sq: Vec<f64> = off.iter().map(|b| b * b).collect();
    let (lo, hi) = gershgorin(diag, off);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    (0..k)
        .map(|j| {
            // Smallest x with more than j eigenvalues below it.
            let (mut a, mut b) = (lo, hi);
            while b - a > 4.0 * f64::EPSILON * scale {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, &off_sq, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_laplacian_spectrum() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2 cos(j pi / (n + 1)).
        let n = 50;
        let diag = vec![2.0; n];
        let off = vec![-1.0; n - 1];
        let ev = lowest_eigenvalues(&diag, &off, 6);
        for (j, e) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((e - exact).abs() < 1e-13, "{j}: {e} vs {exact}");
        }
    }

    #[test]
    fn diagonal_matrix() {
        let diag = [3.0, -1.0, 2.0, 0.5];
        let off = [0.0; 3];
        let ev = lowest_eigenvalues(&diag, &off, 4);
        let want = [-1.0, 0.5, 2.0, 3.0];
        for (e, w) in ev.iter().zip(want) {
            assert!((e - w).abs() < 1e-14);
        }
    }

    #[test]
    fn sturm_count_is_monotone() {
        let diag = [1.0, 4.0, 2.0, 7.0, -3.0];
        let off_sq = [0.25, 1.0, 4.0, 0.5];
        let mut last = 0;
        for i in -100..100 {
            let c = sturm_count(&diag, &off_sq, i as f64 * 0.1);
            assert!(c >= last);
            last = c;
        }
        assert_eq!(last, 5);
    }

    #[test]
    fn truncates_k_to_size() {
        assert_eq!(lowest_eigenvalues(&[1.0, 2.0], &[0.0], 5).len(), 2);
    }
}
