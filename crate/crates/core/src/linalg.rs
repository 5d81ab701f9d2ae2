//! Small dense symmetric linear algebra.
//!
//! Matrices here are at most a few dozen rows, so a cyclic Jacobi sweep is
//! both accurate and fast enough. Storage is row-major `Vec<T>`.

use crate::scalar::Real;

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub n: usize,
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Eigenvectors stored column-wise: `vectors[i * n + k]` is component `i`
    /// of the eigenvector paired with `values[k]`.
    pub vectors: Vec<T>,
}

impl<T: Real> SymEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<T> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }

    pub fn max_abs_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Cyclic Jacobi eigenvalue iteration.
pub fn sym_eigen<T: Real>(a: &[T], n: usize) -> SymEigen<T> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = T::one();
    }
    let eps = T::epsilon();
    for _sweep in 0..100 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..n {
            diag = diag + m[i * n + i] * m[i * n + i];
            for j in (i + 1)..n {
                off = off + m[i * n + j] * m[i * n + j];
            }
        }
        if off <= eps * eps * diag.max(T::min_positive_value()) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = (aqq - app) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .partial_cmp(&m[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (new_k, &old_k) in order.iter().enumerate() {
        for i in 0..n {
            vectors[i * n + new_k] = v[i * n + old_k];
        }
    }
    SymEigen { n, values, vectors }
}

/// `A (r×k) · B (k×c)`.
pub fn matmul<T: Real>(a: &[T], b: &[T], r: usize, k: usize, c: usize) -> Vec<T> {
    let mut out = vec![T::zero(); r * c];
    for i in 0..r {
        for l in 0..k {
            let ail = a[i * k + l];
            if ail == T::zero() {
                continue;
            }
            for j in 0..c {
                out[i * c + j] = out[i * c + j] + ail * b[l * c + j];
            }
        }
    }
    out
}

pub fn transpose<T: Real>(a: &[T], r: usize, c: usize) -> Vec<T> {
    let mut out = vec![T::zero(); r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = a[i * c + j];
        }
    }
    out
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix. Eigenvalues at or
/// below `rel_cutoff` times the largest magnitude are treated as zero.
pub fn sym_pinv<T: Real>(a: &[T], n: usize, rel_cutoff: T) -> Vec<T> {
    let eig = sym_eigen(a, n);
    let cutoff = rel_cutoff * eig.max_abs_value();
    let mut out = vec![T::zero(); n * n];
    for k in 0..n {
        let lam = eig.values[k];
        if lam <= cutoff || lam <= T::zero() {
            continue;
        }
        let inv = T::one() / lam;
        for i in 0..n {
            let vik = eig.vectors[i * n + k] * inv;
            for j in 0..n {
                out[i * n + j] = out[i * n + j] + vik * eig.vectors[j * n + k];
            }
        }
    }
    out
}

/// Extremal eigenvalues of a symmetric 2×2 matrix in closed form.
pub fn eig2<T: Real>(a: T, b: T, d: T) -> (T, T) {
    let mean = (a + d) * T::half();
    let half_diff = (a - d) * T::half();
    let r = (half_diff * half_diff + b * b).sqrt();
    (mean - r, mean + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_diagonalizes() {
        let a = [4.0_f64, 1.0, 0.5, 1.0, 3.0, 0.25, 0.5, 0.25, 2.0];
        let e = sym_eigen(&a, 3);
        // A v = λ v for every pair
        for k in 0..3 {
            let v = e.vector(k);
            let av = matmul(&a, &v, 3, 3, 1);
            for i in 0..3 {
                assert!((av[i] - e.values[k] * v[i]).abs() < 1e-12);
            }
        }
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 9.0).abs() < 1e-12);
        assert!(e.values[0] <= e.values[1] && e.values[1] <= e.values[2]);
    }

    #[test]
    fn pinv_of_singular_matrix() {
        // rank one: [1 1; 1 1]
        let a = [1.0_f64, 1.0, 1.0, 1.0];
        let p = sym_pinv(&a, 2, 1e-12);
        for x in p {
            assert!((x - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_2x2_matches_jacobi() {
        let (lo, hi) = eig2(2.0_f64, -0.7, 0.5);
        let e = sym_eigen(&[2.0, -0.7, -0.7, 0.5], 2);
        assert!((lo - e.values[0]).abs() < 1e-12);
        assert!((hi - e.values[1]).abs() < 1e-12);
    }
}
