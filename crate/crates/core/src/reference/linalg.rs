//! Small dense LU factorisation and tridiagonal solves.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-major `n x n` LU factorisation with partial pivoting.
pub(crate) struct Lu {
    n: usize,
    a: Vec<f64>,
    piv: Vec<usize>,
}

impl Lu {
    pub(crate) fn factor(n: usize, mut a: Vec<f64>) -> Result<Self> {
        debug_assert_eq!(a.len(), n * n);
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap_or(k);
            if a[p * n + k] == 0.0 || !a[p * n + k].is_finite() {
                return Err(Error::Unsupported("singular linear system"));
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                piv.swap(k, p);
            }
            let d = a[k * n + k];
            for i in (k + 1)..n {
                let l = a[i * n + k] / d;
                a[i * n + k] = l;
                if l != 0.0 {
                    for c in (k + 1)..n {
                        a[i * n + c] -= l * a[k * n + c];
                    }
                }
            }
        }
        Ok(Self { n, a, piv })
    }

    /// Solves in place.
    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for (c, xc) in x.iter().enumerate().take(i) {
                s -= self.a[i * n + c] * xc;
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for (c, xc) in x.iter().enumerate().skip(i + 1) {
                s -= self.a[i * n + c] * xc;
            }
            x[i] = s / self.a[i * n + i];
        }
        b.copy_from_slice(&x);
    }
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> Result<()> {
    let n = diag.len();
    let mut c = Vec::with_capacity(n);
    let mut prev_c = 0.0;
    for i in 0..n {
        let l = if i > 0 { lower[i] } else { 0.0 };
        let m = diag[i] - l * prev_c;
        if m == 0.0 {
            return Err(Error::Unsupported("singular tridiagonal system"));
        }
        prev_c = if i + 1 < n { upper[i] / m } else { 0.0 };
        c.push(prev_c);
        rhs[i] = (rhs[i] - if i > 0 { l * rhs[i - 1] } else { 0.0 }) / m;
    }
    for i in (0..n.saturating_sub(1)).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn lu_solves_pivoting_system() {
        let a = vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0];
        let x = [1.0, -2.0, 0.5];
        let mut b: Vec<f64> = (0..3).map(|i| (0..3).map(|j| a[i * 3 + j] * x[j]).sum()).collect();
        Lu::factor(3, a).unwrap().solve(&mut b);
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
        assert!(Lu::factor(2, vec![1.0, 2.0, 2.0, 4.0]).is_err());
    }

    #[test]
    fn tridiagonal() {
        let n = 6;
        let lower = vec![-1.0; n];
        let upper = vec![-1.0; n];
        let diag = vec![3.0; n];
        let x: Vec<f64> = (0..n).map(|i| i as f64 * 0.7 - 1.0).collect();
        let mut b: Vec<f64> = (0..n)
            .map(|i| {
                3.0 * x[i] - if i > 0 { x[i - 1] } else { 0.0 } - if i + 1 < n { x[i + 1] } else { 0.0 }
            })
            .collect();
        solve_tridiagonal(&lower, &diag, &upper, &mut b).unwrap();
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-14);
        }
    }
}
