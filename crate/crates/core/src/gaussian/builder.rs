use super::{CovMatrix, GaussianSystem};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Incremental construction of a [`GaussianSystem`] from independent
/// sources and linear combinations of previously defined labels.
///
/// Every label is stored as a coefficient vector over the underlying
/// independent blocks, so the joint covariance is exact up to one product.
/// Errors are deferred and reported by [`SystemBuilder::build`].
#[derive(Debug, Clone)]
pub struct SystemBuilder<T> {
    /// Block-diagonal covariance of the base variables, grown as blocks arrive.
    base_blocks: Vec<(usize, CovMatrix<T>)>,
    base_dim: usize,
    names: Vec<String>,
    forms: Vec<Vec<(usize, T)>>,
    error: Option<Error>,
}

impl<T: Real> Default for SystemBuilder<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> SystemBuilder<T> {
    pub fn new() -> Self {
        Self {
            base_blocks: Vec::new(),
            base_dim: 0,
            names: Vec::new(),
            forms: Vec::new(),
            error: None,
        }
    }

    fn fail(&mut self, e: Error) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn push_label(&mut self, name: &str, form: Vec<(usize, T)>) {
        if self.names.iter().any(|n| n == name) {
            self.fail(Error::DuplicateLabel(name.to_string()));
            return;
        }
        self.names.push(name.to_string());
        self.forms.push(form);
    }

    /// Independent scalar source with the given variance.
    pub fn source(&mut self, name: &str, variance: T) -> &mut Self {
        match CovMatrix::scalar(variance) {
            Ok(c) => self.correlated_sources(&[name], c),
            Err(e) => {
                self.fail(e);
                self
            }
        }
    }

    /// A block of sources with joint covariance `cov`, independent of
    /// everything defined so far.
    pub fn correlated_sources(&mut self, names: &[&str], cov: CovMatrix<T>) -> &mut Self {
        if names.len() != cov.dim() {
            self.fail(Error::DimensionMismatch {
                expected: cov.dim(),
                got: names.len(),
            });
            return self;
        }
        let start = self.base_dim;
        self.base_dim += cov.dim();
        self.base_blocks.push((start, cov));
        for (k, n) in names.iter().enumerate() {
            self.push_label(n, vec![(start + k, T::one())]);
        }
        self
    }

    /// `name = Σ coeff · label` over already defined labels.
    pub fn combine(&mut self, name: &str, terms: &[(&str, T)]) -> &mut Self {
        let mut form: Vec<(usize, T)> = Vec::new();
        for &(label, coeff) in terms {
            let Some(i) = self.names.iter().position(|n| n == label) else {
                self.fail(Error::UnknownLabel(label.to_string()));
                return self;
            };
            for &(base, c) in &self.forms[i] {
                match form.iter_mut().find(|(b, _)| *b == base) {
                    Some(slot) => slot.1 = slot.1 + coeff * c,
                    None => form.push((base, coeff * c)),
                }
            }
        }
        self.push_label(name, form);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn build(&self) -> Result<GaussianSystem<T>> {
        if let Some(e) = &self.error {
            return Err(e.clone());
        }
        let n = self.base_dim;
        let mut base = vec![T::zero(); n * n];
        for (start, blk) in &self.base_blocks {
            let d = blk.dim();
            for i in 0..d {
                for j in 0..d {
                    base[(start + i) * n + start + j] = blk.get(i, j);
                }
            }
        }
        let k = self.names.len();
        let mut entries = vec![T::zero(); k * k];
        for a in 0..k {
            for b in a..k {
                let mut acc = T::zero();
                for &(i, ca) in &self.forms[a] {
                    for &(j, cb) in &self.forms[b] {
                        acc = acc + ca * cb * base[i * n + j];
                    }
                }
                entries[a * k + b] = acc;
                entries[b * k + a] = acc;
            }
        }
        GaussianSystem::new(self.names.clone(), CovMatrix::new(k, entries)?)
    }
}
