//! Dense symmetric kernels for the small (M <= 20) local systems.
//!
//! Matrices are row-major `m * m` slices.

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, sqrt};

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
pub fn min_eigenvalue(a: &[f64], m: usize) -> f64 {
    symmetric_eigenvalues(a, m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// All eigenvalues of a symmetric matrix (unordered).
pub fn symmetric_eigenvalues(a: &[f64], m: usize) -> Vec<f64> {
    assert_eq!(a.len(), m * m);
    let mut w = a.to_vec();
    let scale: f64 = w.iter().map(|v| v * v).sum::<f64>();
    if scale == 0.0 {
        return vec![0.0; m];
    }
    for _sweep in 0..100 {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[i * m + j] * w[i * m + j])
            .sum();
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = w[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[q * m + q] - w[p * m + p]) / (2.0 * apq);
                let t = theta.signum() / (fabs(theta) + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..m {
                    let akp = w[k * m + p];
                    let akq = w[k * m + q];
                    w[k * m + p] = c * akp - s * akq;
                    w[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = w[p * m + k];
                    let aqk = w[q * m + k];
                    w[p * m + k] = c * apk - s * aqk;
                    w[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| w[i * m + i]).collect()
}

/// Solves `a x = b` for symmetric positive (semi-)definite `a` with an
/// `L D L^T` factorisation using symmetric (diagonal) pivoting.
///
/// Returns `None` when a pivot falls below `1e-14` times the largest
/// diagonal entry.
pub fn solve_symmetric(a: &[f64], m: usize, b: &[f64]) -> Option<Vec<f64>> {
    assert_eq!(a.len(), m * m);
    assert_eq!(b.len(), m);
    let mut w = a.to_vec();
    let mut perm: Vec<usize> = (0..m).collect();
    let max_diag = (0..m).map(|i| fabs(w[i * m + i])).fold(0.0, f64::max);
    if max_diag == 0.0 || !max_diag.is_finite() {
        return None;
    }
    let tiny = 1e-14 * max_diag;

    for k in 0..m {
        let piv = (k..m)
            .max_by(|&i, &j| w[i * m + i].total_cmp(&w[j * m + j]))
            .unwrap();
        if piv != k {
            swap_sym(&mut w, m, k, piv);
            perm.swap(k, piv);
        }
        let d = w[k * m + k];
        if d.is_nan() || d <= tiny {
            return None;
        }
        let col: Vec<f64> = (0..m).map(|i| w[i * m + k]).collect();
        for i in k + 1..m {
            for j in k + 1..=i {
                w[i * m + j] -= col[i] * col[j] / d;
            }
            w[i * m + k] = col[i] / d;
        }
        // keep the upper triangle in sync for the next pivot search
        for i in k + 1..m {
            for j in k + 1..i {
                w[j * m + i] = w[i * m + j];
            }
        }
    }

    // forward: L y = P b
    let mut y: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..m {
        for k in 0..i {
            y[i] -= w[i * m + k] * y[k];
        }
    }
    for (i, yi) in y.iter_mut().enumerate() {
        *yi /= w[i * m + i];
    }
    // backward: L^T z = y
    for i in (0..m).rev() {
        for k in i + 1..m {
            y[i] -= w[k * m + i] * y[k];
        }
    }
    let mut x = vec![0.0; m];
    for (i, &p) in perm.iter().enumerate() {
        x[p] = y[i];
    }
    Some(x)
}

fn swap_sym(w: &mut [f64], m: usize, a: usize, b: usize) {
    for k in 0..m {
        w.swap(a * m + k, b * m + k);
    }
    for k in 0..m {
        w.swap(k * m + a, k * m + b);
    }
}
