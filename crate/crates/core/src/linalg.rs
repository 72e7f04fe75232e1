//! Dense Householder QR on column-major storage.
//!
//! The regression paths only ever need `Q'y`, the triangular factor and a
//! back-solve, so this stays small and allocation-light. It is the one place
//! the hot Monte Carlo loops spend their time.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub(crate) struct HouseholderQr {
    /// Column-major n×m. Upper triangle (strictly above the diagonal) holds R,
    /// the diagonal and below hold the Householder vectors with implicit
    /// leading 1 stored explicitly in `v[j]`.
    a: Vec<f64>,
    n: usize,
    m: usize,
    tau: Vec<f64>,
    r_diag: Vec<f64>,
}

impl HouseholderQr {
    /// Factorizes a column-major `n × m` matrix (`n ≥ m`).
    pub(crate) fn new(mut a: Vec<f64>, n: usize, m: usize) -> Self {
        debug_assert_eq!(a.len(), n * m);
        debug_assert!(n >= m);
        let mut tau = vec![0.0; m];
        let mut r_diag = vec![0.0; m];
        for j in 0..m {
            let (head, tail) = a.split_at_mut((j + 1) * n);
            let col = &mut head[j * n + j..(j + 1) * n];
            let alpha = col[0];
            let norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                tau[j] = 0.0;
                r_diag[j] = 0.0;
                continue;
            }
            let r = if alpha >= 0.0 { -norm } else { norm };
            let scale = 1.0 / (alpha - r);
            col[0] = 1.0;
            for v in col[1..].iter_mut() {
                *v *= scale;
            }
            let t = (r - alpha) / r;
            tau[j] = t;
            r_diag[j] = r;
            let v = &*col;
            for c in 0..(m - j - 1) {
                let target = &mut tail[c * n + j..(c + 1) * n];
                let s = t * dot(v, target);
                if s != 0.0 {
                    axpy(-s, v, target);
                }
            }
        }
        Self {
            a,
            n,
            m,
            tau,
            r_diag,
        }
    }

    pub(crate) fn from_matrix(design: &DMatrix<f64>) -> Self {
        let (n, m) = design.shape();
        Self::new(design.as_slice().to_vec(), n, m)
    }

    pub(crate) fn ncols(&self) -> usize {
        self.m
    }

    pub(crate) fn r_diag(&self) -> &[f64] {
        &self.r_diag
    }

    /// Overwrites `y` (length n) with `Q'y`.
    pub(crate) fn apply_qt(&self, y: &mut [f64]) {
        debug_assert_eq!(y.len(), self.n);
        for j in 0..self.m {
            if self.tau[j] == 0.0 {
                continue;
            }
            let v = &self.a[j * self.n + j..(j + 1) * self.n];
            let target = &mut y[j..];
            let s = self.tau[j] * dot(v, target);
            axpy(-s, v, target);
        }
    }

    /// Entry (i, j) of R for i ≤ j < m.
    pub(crate) fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.r_diag[j]
        } else if i < j {
            self.a[j * self.n + i]
        } else {
            0.0
        }
    }

    /// The leading `k × k` block of R as a dense matrix.
    pub(crate) fn r_matrix(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(k, k, |i, j| self.r(i, j))
    }

    /// Solves `R[..k, ..k] b = qty[..k]` by back substitution.
    pub(crate) fn back_solve(&self, qty: &[f64], k: usize) -> Vec<f64> {
        let mut b = qty[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = b[i];
            for (j, bj) in b.iter().enumerate().skip(i + 1) {
                s -= self.r(i, j) * bj;
            }
            b[i] = s / self.r_diag[i];
        }
        b
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize without reassociation.
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = c * 4;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in chunks * 4..n {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Pairwise summation; error grows like O(log n) rather than O(n).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Arithmetic mean via [`pairwise_sum`]; NaN for an empty slice.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(values) / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_reproduces_r_transpose_r() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 3.0, -1.0, 0.5, 4.0, -2.0, 1.0]);
        let qr = HouseholderQr::from_matrix(&a);
        let r = qr.r_matrix(2);
        let rtr = r.transpose() * &r;
        let ata = a.transpose() * &a;
        assert!((rtr - ata).abs().max() < 1e-12);
    }

    #[test]
    fn qt_preserves_norm() {
        let a = DMatrix::from_row_slice(3, 1, &[3.0, 0.0, 4.0]);
        let qr = HouseholderQr::from_matrix(&a);
        let mut y = vec![1.0, 2.0, 2.0];
        qr.apply_qt(&mut y);
        let norm: f64 = y.iter().map(|v| v * v).sum();
        assert!((norm - 9.0).abs() < 1e-12);
        assert!((qr.r_diag()[0].abs() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_column_leaves_zero_pivot() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let qr = HouseholderQr::from_matrix(&a);
        assert_eq!(qr.r_diag()[1], 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(pairwise_sum(&v), 5050.0);
        assert!(mean(&[]).is_nan());
    }
}
