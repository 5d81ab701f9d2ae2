//! Covariance algebra for jointly Gaussian variables.
//!
//! All information quantities are in bits. A [`GaussianSystem`] holds a
//! labelled joint covariance; entropies, conditional covariances and
//! (conditional) mutual informations are evaluated by label subset.

mod builder;
mod extremal;

pub use builder::SystemBuilder;
pub use extremal::{
    epi_lower_bound, extremal_objective, verify_extremal_inequality, ExtremalGrid,
    VerificationReport,
};

use crate::error::{Error, Result};
use crate::linalg::{self, SymEigen};
use crate::scalar::Real;

/// Relative symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted (and clamped to zero) for a PSD matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Determinants at or below this value flag an entropy as degenerate.
pub const DET_TOL: f64 = 1e-300;
/// Relative cutoff for the pseudo-inverse and for rank decisions.
pub const PINV_CUTOFF: f64 = 1e-12;
/// Conditional mutual information below this (bits) counts as zero.
pub const MI_TOL: f64 = 1e-9;

/// Symmetric positive semidefinite covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Real> CovMatrix<T> {
    /// Validates symmetry and positive semidefiniteness. Entries are
    /// symmetrized by averaging once the symmetry check passes.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyLabelSet);
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let scale = entries
            .iter()
            .fold(T::zero(), |m, x| m.max(x.abs()))
            .max(T::min_positive_value());
        let mut m = Self { dim, entries };
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = m.entries[i * dim + j];
                let b = m.entries[j * dim + i];
                if !(a.is_finite() && b.is_finite()) {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff: f64::NAN,
                    });
                }
                let diff = (a - b).abs();
                if diff > T::tol(SYMMETRY_TOL) * scale {
                    return Err(Error::NotSymmetric {
                        row: i,
                        col: j,
                        diff: diff.as_f64(),
                    });
                }
                let avg = (a + b) * T::half();
                m.entries[i * dim + j] = avg;
                m.entries[j * dim + i] = avg;
            }
        }
        let min_eig = m.min_eigenvalue();
        if min_eig.is_nan() || min_eig < -T::tol(PSD_TOL) * scale.max(T::one()) {
            return Err(Error::NotPsd {
                min_eigenvalue: min_eig.as_f64(),
            });
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        Self::new(dim, entries)
    }

    pub fn scalar(variance: T) -> Result<Self> {
        Self::new(1, vec![variance])
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![T::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = T::one();
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn eigen(&self) -> SymEigen<T> {
        linalg::sym_eigen(&self.entries, self.dim)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().values
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()
            .into_iter()
            .fold(T::infinity(), |m, x| m.min(x))
    }

    pub fn is_psd_within(&self, tol: T) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Sub-matrix over the given row/column indices (in that order).
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let k = idx.len();
        let mut entries = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                entries.push(self.get(i, j));
            }
        }
        Self { dim: k, entries }
    }

    fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<T> {
        let mut out = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// `log₂ det` with eigenvalues below the PSD tolerance clamped to zero.
    /// Returns `-∞` for singular matrices.
    pub fn log2_det(&self) -> T {
        let eig = self.eigen();
        let cutoff = T::tol(PINV_CUTOFF) * eig.max_abs_value();
        let mut acc = T::zero();
        for &lam in &eig.values {
            if lam <= cutoff || lam <= T::zero() {
                return T::neg_infinity();
            }
            acc = acc + lam.log2();
        }
        acc
    }

    pub fn determinant(&self) -> T {
        self.log2_det().exp2()
    }

    /// Schur complement `Σ_TT − Σ_TG Σ_GG⁺ Σ_GT` over index sets.
    pub fn schur(&self, target: &[usize], given: &[usize]) -> Result<Self> {
        let t = target.len();
        let g = given.len();
        let stt = self.block(target, target);
        if g == 0 {
            return Self::new(t, stt);
        }
        let stg = self.block(target, given);
        let sgg = self.block(given, given);
        let pinv = linalg::sym_pinv(&sgg, g, T::tol(PINV_CUTOFF));
        let tmp = linalg::matmul(&stg, &pinv, t, g, g);
        let gt = linalg::transpose(&stg, t, g);
        let corr = linalg::matmul(&tmp, &gt, t, g, t);
        let mut entries: Vec<T> = stt.iter().zip(&corr).map(|(&a, &b)| a - b).collect();
        // rounding can leave a tiny asymmetry
        for i in 0..t {
            for j in (i + 1)..t {
                let avg = (entries[i * t + j] + entries[j * t + i]) * T::half();
                entries[i * t + j] = avg;
                entries[j * t + i] = avg;
            }
        }
        Self::new(t, entries)
    }
}

/// A differential entropy in bits, with a flag for the `-∞` (singular) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue<T> {
    pub value: T,
    pub degenerate: bool,
}

impl<T: Real> EntropyValue<T> {
    pub fn finite(value: T) -> Self {
        Self {
            value,
            degenerate: false,
        }
    }

    pub fn degenerate() -> Self {
        Self {
            value: T::neg_infinity(),
            degenerate: true,
        }
    }

    /// Entropy of a Gaussian with the given covariance.
    pub fn of_cov(cov: &CovMatrix<T>) -> Self {
        let k = T::of_usize(cov.dim());
        let log_det = cov.log2_det();
        if log_det <= T::lit(DET_TOL).log2() {
            return Self::degenerate();
        }
        Self::finite(T::half() * (k * T::two_pi_e().log2() + log_det))
    }
}

/// A finite collection of labelled, jointly Gaussian, zero-mean variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSystem<T> {
    names: Vec<String>,
    cov: CovMatrix<T>,
}

impl<T: Real> GaussianSystem<T> {
    pub fn new(names: Vec<String>, cov: CovMatrix<T>) -> Result<Self> {
        if names.len() != cov.dim() {
            return Err(Error::DimensionMismatch {
                expected: cov.dim(),
                got: names.len(),
            });
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::DuplicateLabel(n.clone()));
            }
        }
        Ok(Self { names, cov })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cov(&self) -> &CovMatrix<T> {
        &self.cov
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn indices(&self, labels: &[&str]) -> Result<Vec<usize>> {
        if labels.is_empty() {
            return Err(Error::EmptyLabelSet);
        }
        let mut out = Vec::with_capacity(labels.len());
        for l in labels {
            let i = self.index_of(l)?;
            if out.contains(&i) {
                return Err(Error::DuplicateLabel(l.to_string()));
            }
            out.push(i);
        }
        Ok(out)
    }

    fn disjoint(sets: &[&[&str]]) -> Result<()> {
        for (a, sa) in sets.iter().enumerate() {
            for sb in &sets[a + 1..] {
                if let Some(l) = sa.iter().find(|l| sb.contains(l)) {
                    return Err(Error::OverlappingLabels(l.to_string()));
                }
            }
        }
        Ok(())
    }

    pub fn variance(&self, label: &str) -> Result<T> {
        let i = self.index_of(label)?;
        Ok(self.cov.get(i, i))
    }

    pub fn covariance(&self, a: &str, b: &str) -> Result<T> {
        Ok(self.cov.get(self.index_of(a)?, self.index_of(b)?))
    }

    /// Covariance of a label subset.
    pub fn sub_cov(&self, subset: &[&str]) -> Result<CovMatrix<T>> {
        Ok(self.cov.submatrix(&self.indices(subset)?))
    }

    /// `h(subset)` in bits.
    pub fn differential_entropy(&self, subset: &[&str]) -> Result<EntropyValue<T>> {
        Ok(EntropyValue::of_cov(&self.sub_cov(subset)?))
    }

    /// `h(target | given)` in bits.
    pub fn conditional_entropy(&self, target: &[&str], given: &[&str]) -> Result<EntropyValue<T>> {
        Ok(EntropyValue::of_cov(&self.conditional_cov(target, given)?))
    }

    /// MMSE error covariance of `target` given `given`.
    pub fn conditional_cov(&self, target: &[&str], given: &[&str]) -> Result<CovMatrix<T>> {
        let t = self.indices(target)?;
        if given.is_empty() {
            return Ok(self.cov.submatrix(&t));
        }
        Self::disjoint(&[target, given])?;
        let g = self.indices(given)?;
        self.cov.schur(&t, &g)
    }

    /// `I(a; b)` in bits; `+∞` when `b` determines a non-constant part of `a`.
    pub fn mutual_information(&self, a: &[&str], b: &[&str]) -> Result<T> {
        self.conditional_mutual_information(a, b, &[])
    }

    /// `I(a; b | c)` in bits, evaluated from the two conditional covariances
    /// `Cov(a|c)` and `Cov(a|b,c)`, restricted to the range of `Cov(a|c)`.
    pub fn conditional_mutual_information(&self, a: &[&str], b: &[&str], c: &[&str]) -> Result<T> {
        Self::disjoint(&[a, b, c])?;
        let ia = self.indices(a)?;
        let ib = self.indices(b)?;
        let ic = if c.is_empty() {
            Vec::new()
        } else {
            self.indices(c)?
        };
        let mut ibc = ib.clone();
        ibc.extend_from_slice(&ic);
        let outer = self.cov.schur(&ia, &ic)?;
        let inner = self.cov.schur(&ia, &ibc)?;
        let scale = ia.iter().fold(T::zero(), |m, &i| m.max(self.cov.get(i, i)));
        Ok(log_det_ratio(&outer, &inner, scale))
    }
}

/// `½ log₂ det(outer) / det(inner)` on the range of `outer`. Eigenvalues
/// below the cutoff relative to `scale` (the unconditional variance) count
/// as zero, so a target fully determined by the conditioning gives 0.
fn log_det_ratio<T: Real>(outer: &CovMatrix<T>, inner: &CovMatrix<T>, scale: T) -> T {
    let n = outer.dim();
    let eig = outer.eigen();
    let cutoff = T::tol(PINV_CUTOFF) * eig.max_abs_value().max(scale);
    let keep: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff).collect();
    if keep.is_empty() {
        return T::zero();
    }
    let r = keep.len();
    // U: n×r basis of the range
    let mut u = vec![T::zero(); n * r];
    for (col, &k) in keep.iter().enumerate() {
        for i in 0..n {
            u[i * r + col] = eig.vectors[i * n + k];
        }
    }
    let ut = linalg::transpose(&u, n, r);
    let proj = linalg::matmul(&linalg::matmul(&ut, inner.entries(), r, n, n), &u, r, n, r);
    let proj_eig = linalg::sym_eigen(&proj, r);
    let mut acc = T::zero();
    for &k in &keep {
        acc = acc + eig.values[k].log2();
    }
    for &lam in &proj_eig.values {
        if lam <= cutoff {
            return T::infinity();
        }
        acc = acc - lam.log2();
    }
    T::half() * acc
}

/// Markov chain test `x – y – s` via `I(x; s | y) ≤ MI_TOL`.
pub fn markov_test<T: Real>(sys: &GaussianSystem<T>, x: &[&str], y: &[&str], s: &[&str]) -> Result<bool> {
    let cmi = sys.conditional_mutual_information(x, s, y)?;
    Ok(cmi <= T::tol(MI_TOL))
}

/// Algebraic form of the scalar Markov criterion: for `Y = X + Z`, `S = X + N`
/// with `Z, N` independent of `X`, the chain `X – Y – S` holds iff `E[NZ] = E[Z²]`.
pub fn markov_algebraic<T: Real>(e_nz: T, e_zz: T) -> bool {
    (e_nz - e_zz).abs() <= T::tol(MI_TOL)
}

/// `x – y – (s1, s2)` for scalar labels.
pub fn scalar_markov_pair_test<T: Real>(
    sys: &GaussianSystem<T>,
    x: &str,
    y: &str,
    s1: &str,
    s2: &str,
) -> Result<bool> {
    for l in [x, y, s1, s2] {
        sys.index_of(l)?;
    }
    markov_test(sys, &[x], &[y], &[s1, s2])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_var(vy: f64, vs: f64, c: f64) -> GaussianSystem<f64> {
        let cov = CovMatrix::from_rows(&[vec![vy, c], vec![c, vs]]).unwrap();
        GaussianSystem::new(vec!["Y".into(), "S".into()], cov).unwrap()
    }

    #[test]
    fn entropy_examples() {
        let tpe = std::f64::consts::TAU * std::f64::consts::E;
        let s = two_var(1.0 / tpe, 2.0 / tpe, 0.0);
        let h = s.differential_entropy(&["Y"]).unwrap();
        assert!(h.value.abs() < 1e-12 && !h.degenerate);
        let h = s.differential_entropy(&["S"]).unwrap();
        assert!((h.value - 0.5).abs() < 1e-12);
        let id = two_var(1.0 / tpe, 1.0 / tpe, 0.0);
        assert!(id.differential_entropy(&["Y", "S"]).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn singular_entropy_is_flagged() {
        let s = two_var(1.0, 1.0, 1.0);
        let h = s.differential_entropy(&["Y", "S"]).unwrap();
        assert!(h.degenerate);
        assert_eq!(h.value, f64::NEG_INFINITY);
        let z = two_var(0.0, 1.0, 0.0);
        assert!(z.differential_entropy(&["Y"]).unwrap().degenerate);
    }

    #[test]
    fn conditional_cov_examples() {
        let s = two_var(2.0, 2.0, 1.0);
        let c = s.conditional_cov(&["Y"], &["S"]).unwrap();
        assert!((c.get(0, 0) - 1.5).abs() < 1e-14);
        let ind = two_var(3.0, 2.0, 0.0);
        assert_eq!(ind.conditional_cov(&["Y"], &["S"]).unwrap().get(0, 0), 3.0);
        let same = two_var(2.5, 2.5, 2.5);
        assert!(same.conditional_cov(&["Y"], &["S"]).unwrap().get(0, 0).abs() < 1e-12);
    }

    #[test]
    fn label_errors() {
        let s = two_var(1.0, 1.0, 0.0);
        assert_eq!(
            s.differential_entropy(&["Q"]).unwrap_err(),
            Error::UnknownLabel("Q".into())
        );
        assert_eq!(s.differential_entropy(&[]).unwrap_err(), Error::EmptyLabelSet);
        assert!(matches!(
            s.conditional_cov(&["Y"], &["Y"]),
            Err(Error::OverlappingLabels(_))
        ));
    }

    #[test]
    fn rejects_invalid_matrices() {
        assert!(matches!(
            CovMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]),
            Err(Error::NotSymmetric { .. })
        ));
        assert!(matches!(
            CovMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]),
            Err(Error::NotPsd { .. })
        ));
        // tiny negative eigenvalue within tolerance is accepted
        assert!(CovMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0 - 1e-11]]).is_ok());
    }

    #[test]
    fn mutual_information_examples() {
        let mut b = SystemBuilder::new();
        b.source("X", 3.0_f64).source("Z", 1.0);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        let sys = b.build().unwrap();
        let mi = sys.mutual_information(&["X"], &["Y"]).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
        assert!(sys.mutual_information(&["X"], &["Z"]).unwrap().abs() < 1e-12);
        // Y determines X + Z exactly
        assert_eq!(sys.mutual_information(&["Y"], &["X", "Z"]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn sinr_example() {
        // I(X1G; Y1G) with P1 = 10, h12² = 0.04, P2 = 20
        let mut b = SystemBuilder::new();
        b.source("X1", 10.0).source("X2", 20.0).source("Z1", 1.0);
        b.combine("Y1", &[("X1", 1.0), ("X2", 0.2), ("Z1", 1.0)]);
        let sys = b.build().unwrap();
        let mi = sys.mutual_information(&["X1"], &["Y1"]).unwrap();
        let expected = 0.5 * (1.0 + 10.0 / 1.8_f64).log2();
        assert!((mi - expected).abs() < 1e-12);
        assert!((mi - 1.3563).abs() < 1e-4);
    }

    fn markov_sys(noise_cov: f64, var_n: f64) -> GaussianSystem<f64> {
        let mut b = SystemBuilder::new();
        b.source("X", 2.0);
        b.correlated_sources(
            &["Z", "N"],
            CovMatrix::from_rows(&[vec![1.0, noise_cov], vec![noise_cov, var_n]]).unwrap(),
        );
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        b.combine("S", &[("X", 1.0), ("N", 1.0)]);
        b.build().unwrap()
    }

    #[test]
    fn markov_examples() {
        // N = Z
        let s = markov_sys(1.0, 1.0);
        assert!(markov_test(&s, &["X"], &["Y"], &["S"]).unwrap());
        // N independent of Z
        let s = markov_sys(0.0, 1.0);
        assert!(!markov_test(&s, &["X"], &["Y"], &["S"]).unwrap());
        assert!(!markov_algebraic(0.0, 1.0));
        // S = Y + V, V independent
        let mut b = SystemBuilder::new();
        b.source("X", 2.0_f64).source("Z", 1.0).source("V", 0.7);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        b.combine("S", &[("X", 1.0), ("Z", 1.0), ("V", 1.0)]);
        let s = b.build().unwrap();
        let cmi = s.conditional_mutual_information(&["X"], &["S"], &["Y"]).unwrap();
        assert!(cmi.abs() < 1e-12);
        assert!(markov_test(&s, &["X"], &["Y"], &["S"]).unwrap());
    }

    #[test]
    fn markov_pair_examples() {
        let mut b = SystemBuilder::new();
        b.source("X", 2.0).source("Z", 1.0).source("V1", 0.5).source("V2", 1.5);
        b.source("U", 1.0);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        b.combine("S1", &[("X", 1.0), ("Z", 1.0), ("V1", 1.0)]);
        b.combine("S2", &[("X", 2.0), ("Z", 2.0), ("V2", 1.0)]);
        b.combine("S3", &[("X", 1.0), ("U", 1.0)]);
        let s = b.build().unwrap();
        assert!(scalar_markov_pair_test(&s, "X", "Y", "S1", "S2").unwrap());
        assert!(!scalar_markov_pair_test(&s, "X", "Y", "S1", "S3").unwrap());
    }

    #[test]
    fn determined_target_has_zero_information() {
        // V has zero power, so X is a function of U
        let mut b = SystemBuilder::new();
        b.source("U", 19.4).source("V", 0.0).source("Z", 1.0);
        b.combine("X", &[("U", 1.0), ("V", 1.0)]);
        b.combine("Y", &[("X", 1.0), ("Z", 1.0)]);
        let s = b.build().unwrap();
        assert_eq!(s.conditional_mutual_information(&["X"], &["Y"], &["U", "V"]).unwrap(), 0.0);
        assert_eq!(s.conditional_mutual_information(&["X"], &["Y"], &["U"]).unwrap(), 0.0);
        assert_eq!(s.mutual_information(&["X"], &["U"]).unwrap(), f64::INFINITY);
    }
}
