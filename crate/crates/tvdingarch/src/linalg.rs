//! Dense symmetric matrix helpers for the small (4x4 / 6x6) information
//! matrices. Row-major `Vec<f64>` storage; sizes are tiny so a cyclic Jacobi
//! eigendecomposition is plenty.

use crate::{Error, Result};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns (eigenvalues, eigenvectors) with eigenvector `k` stored in
/// column `k` of the returned row-major matrix.
pub(crate) fn jacobi_eigh(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let idx = |r: usize, c: usize| r * n + c;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[idx(i, j)] * m[idx(i, j)];
            }
        }
        let scale: f64 = (0..n).map(|i| m[idx(i, i)].abs()).sum::<f64>().max(1e-300);
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[idx(k, p)];
                    let mkq = m[idx(k, q)];
                    m[idx(k, p)] = c * mkp - s * mkq;
                    m[idx(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[idx(p, k)];
                    let mqk = m[idx(q, k)];
                    m[idx(p, k)] = c * mpk - s * mqk;
                    m[idx(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[idx(k, p)];
                    let vkq = v[idx(k, q)];
                    v[idx(k, p)] = c * vkp - s * vkq;
                    v[idx(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
    (eig, v)
}

/// Invert a symmetric matrix via its eigendecomposition, refusing when the
/// condition number (|eig|_max / |eig|_min) exceeds `cond_limit`.
/// Returns the inverse and the condition number.
pub(crate) fn sym_inverse(a: &[f64], n: usize, cond_limit: f64) -> Result<(Vec<f64>, f64)> {
    let (eig, v) = jacobi_eigh(a, n);
    let max_abs = eig.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    let min_abs = eig.iter().fold(f64::INFINITY, |m, &e| m.min(e.abs()));
    let cond = if min_abs == 0.0 {
        f64::INFINITY
    } else {
        max_abs / min_abs
    };
    if !cond.is_finite() || cond > cond_limit {
        return Err(Error::Singular {
            cond,
            limit: cond_limit,
        });
    }
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.0;
            for k in 0..n {
                sum += v[i * n + k] * v[j * n + k] / eig[k];
            }
            inv[i * n + j] = sum;
        }
    }
    Ok((inv, cond))
}
