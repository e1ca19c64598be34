//! Orbit spectra and evaluation points.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpectrumError {
    #[error("spectrum must contain at least one eigenvalue")]
    Empty,
    #[error("non-finite entry {value} at position {index}")]
    NonFinite { index: usize, value: f64 },
}

/// Eigenvalue multiset `Λ = (λ_1, …, λ_n)` of a conjugation orbit in the
/// n×n Hermitian matrices, stored sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
}

impl Spectrum {
    pub fn new(eigenvalues: impl Into<Vec<f64>>) -> Result<Self, SpectrumError> {
        let mut eigenvalues = eigenvalues.into();
        if eigenvalues.is_empty() {
            return Err(SpectrumError::Empty);
        }
        for (index, &value) in eigenvalues.iter().enumerate() {
            if !value.is_finite() {
                return Err(SpectrumError::NonFinite { index, value });
            }
        }
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Spectrum { eigenvalues })
    }

    /// Matrix size `n`.
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Splits into `(Λ′, Λ″)`: nonnegative entries descending and negative
    /// entries ascending (most negative first). Zeros go to `Λ′`; the two
    /// halves together are a permutation of the spectrum.
    pub fn split(&self) -> (Vec<f64>, Vec<f64>) {
        let mut pos: Vec<f64> = self.eigenvalues.iter().copied().filter(|&v| v >= 0.0).collect();
        let mut neg: Vec<f64> = self.eigenvalues.iter().copied().filter(|&v| v < 0.0).collect();
        pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
        neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        (pos, neg)
    }

    /// `Σ |λ_i|`.
    pub fn one_norm(&self) -> f64 {
        self.eigenvalues.iter().map(|v| v.abs()).sum()
    }

    /// `max |λ_i|`.
    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Entries divided by `n`, the natural scaling of the limit theory.
    pub fn scaled_entries(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.eigenvalues.iter().map(|v| v / n).collect()
    }

    /// Nonzero entries only (the symmetric functions ignore zeros).
    pub fn nonzero_entries(&self) -> Vec<f64> {
        self.eigenvalues.iter().copied().filter(|&v| v != 0.0).collect()
    }

    /// Minimum pairwise separation relative to `max(1, max|λ|)`.
    pub fn relative_separation(&self) -> f64 {
        relative_separation(&self.eigenvalues)
    }
}

/// Eigenvalues `(a_1, …, a_k)` of the diagonal test matrix `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    entries: Vec<f64>,
}

impl EvalPoint {
    pub fn new(entries: impl Into<Vec<f64>>) -> Result<Self, SpectrumError> {
        let entries = entries.into();
        if entries.is_empty() {
            return Err(SpectrumError::Empty);
        }
        for (index, &value) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(SpectrumError::NonFinite { index, value });
            }
        }
        Ok(EvalPoint { entries })
    }

    /// Single-entry point `A = diag(a)`.
    pub fn scalar(a: f64) -> Self {
        EvalPoint { entries: vec![a] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn negated(&self) -> EvalPoint {
        EvalPoint { entries: self.entries.iter().map(|v| -v).collect() }
    }

    pub fn relative_separation(&self) -> f64 {
        relative_separation(&self.entries)
    }
}

fn relative_separation(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return f64::INFINITY;
    }
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let mut min = f64::INFINITY;
    for i in 0..values.len() {
        for j in i + 1..values.len() {
            min = min.min((values[i] - values[j]).abs());
        }
    }
    min / scale
}
