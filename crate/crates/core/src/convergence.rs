//! Limit diagnostics for sequences of orbital spectra: parameter
//! estimation from the scaled extreme eigenvalues and traces, divergence
//! detection, tail control, and direct measurement of the
//! |f_n − F| convergence gap.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::ergodic::{charfn_f, charfn_f1, ErgodicParams};
use crate::orbital::{orbital_charfn_series, OnevarEvaluator, OrbitalError};
use crate::spectrum::{EvalPoint, Spectrum};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ConvergenceError {
    #[error("need at least 3 ascending sizes, got {got:?}")]
    BadSizes { got: Vec<usize> },
    #[error("tolerance must be positive, got {tol}")]
    BadTolerance { tol: f64 },
    #[error("scaled second moments grow without bound between n = {at} and n = {next} ({from:.4e} -> {to:.4e}); the sequence diverges")]
    Divergence { at: usize, next: usize, from: f64, to: f64 },
    #[error("generator produced {got} eigenvalues for size {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error(transparent)]
    Orbital(#[from] OrbitalError),
    #[error("could not parse spectrum manifest: {0}")]
    Manifest(String),
}

/// A family of spectra indexed by the matrix size `n`.
#[derive(Clone)]
pub struct SpectrumSequence {
    label: String,
    generator: Arc<dyn Fn(usize) -> Spectrum + Send + Sync>,
}

impl fmt::Debug for SpectrumSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpectrumSequence({})", self.label)
    }
}

impl SpectrumSequence {
    pub fn from_fn(
        label: impl Into<String>,
        generator: impl Fn(usize) -> Spectrum + Send + Sync + 'static,
    ) -> Self {
        SpectrumSequence { label: label.into(), generator: Arc::new(generator) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Spectrum at size `n`, validated to have exactly `n` entries.
    pub fn spectrum(&self, n: usize) -> Result<Spectrum, ConvergenceError> {
        let s = (self.generator)(n);
        if s.n() != n {
            return Err(ConvergenceError::WrongSize { expected: n, got: s.n() });
        }
        Ok(s)
    }

    /// Finite-rank linear family: `λ_i(n) = x_i · n` for the given
    /// coefficients, zeros elsewhere.
    pub fn linear(coefficients: &[f64]) -> Self {
        let coeffs = coefficients.to_vec();
        let label = format!(
            "linear({})",
            coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        );
        SpectrumSequence::from_fn(label, move |n| {
            let mut eigen = vec![0.0; n];
            for (slot, &x) in eigen.iter_mut().zip(&coeffs) {
                *slot = x * n as f64;
            }
            Spectrum::new(eigen).expect("finite by construction")
        })
    }

    /// Square-root growth family with Gaussian limit: `⌊n/2⌋` eigenvalues
    /// `+√(γn)` and `⌈n/2⌉` eigenvalues `−√(γn)`.
    pub fn gaussian(gamma: f64) -> Self {
        assert!(gamma >= 0.0, "the gaussian family needs gamma >= 0, got {gamma}");
        SpectrumSequence::from_fn(format!("gaussian({gamma})"), move |n| {
            let value = (gamma * n as f64).sqrt();
            let mut eigen = vec![value; n / 2];
            eigen.extend(vec![-value; n - n / 2]);
            Spectrum::new(eigen).expect("finite by construction")
        })
    }

    /// Wishart-type family: `max(1, ⌊fraction·n⌋)` eigenvalues equal to
    /// `y·n`. With a fraction small enough that the rank stays 1 this is the
    /// rank-one linear family; a growing rank trips the divergence check.
    pub fn wishart(y: f64, rank_fraction: f64) -> Self {
        SpectrumSequence::from_fn(format!("wishart({y},{rank_fraction})"), move |n| {
            let rank = ((rank_fraction * n as f64).floor() as usize).clamp(1, n);
            let mut eigen = vec![0.0; n];
            for slot in eigen.iter_mut().take(rank) {
                *slot = y * n as f64;
            }
            Spectrum::new(eigen).expect("finite by construction")
        })
    }

    /// Explicit per-size spectra from a manifest: one line per size,
    /// `n: λ_1, λ_2, …, λ_n`, `#` starts a comment. Sizes not listed fall
    /// back to the zero spectrum.
    pub fn from_manifest(text: &str) -> Result<Self, ConvergenceError> {
        let mut table: Vec<(usize, Vec<f64>)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (head, rest) = line
                .split_once(':')
                .ok_or_else(|| ConvergenceError::Manifest(format!("line {}: missing ':'", lineno + 1)))?;
            let n: usize = head.trim().parse().map_err(|_| {
                ConvergenceError::Manifest(format!("line {}: bad size {head:?}", lineno + 1))
            })?;
            let values: Result<Vec<f64>, _> =
                rest.split(',').map(|tok| tok.trim().parse::<f64>()).collect();
            let values = values.map_err(|_| {
                ConvergenceError::Manifest(format!("line {}: bad eigenvalue list", lineno + 1))
            })?;
            if values.len() != n {
                return Err(ConvergenceError::Manifest(format!(
                    "line {}: size {n} but {} eigenvalues",
                    lineno + 1,
                    values.len()
                )));
            }
            table.push((n, values));
        }
        let label = format!("explicit({} sizes)", table.len());
        Ok(SpectrumSequence::from_fn(label, move |n| {
            match table.iter().find(|(size, _)| *size == n) {
                Some((_, values)) => Spectrum::new(values.clone()).expect("validated finite"),
                None => Spectrum::new(vec![0.0; n]).expect("zero spectrum"),
            }
        }))
    }
}

/// One estimated limit component with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComponentEstimate {
    pub value: f64,
    /// Absolute change between the last two sizes.
    pub residual: f64,
    pub converged: bool,
}

/// Estimated limit parameters of a spectrum sequence.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LimitEstimate {
    /// Retained positive scaled-eigenvalue limits, descending.
    pub x_pos: Vec<ComponentEstimate>,
    /// Retained negative scaled-eigenvalue limits, ascending.
    pub x_neg: Vec<ComponentEstimate>,
    pub gamma1: ComponentEstimate,
    pub gamma2_tilde: ComponentEstimate,
    /// `γ₂ = γ̃₂ − Σ x²` over the retained components.
    pub gamma2: f64,
}

impl LimitEstimate {
    /// Parameter point assembled from the retained estimates (θ = 1).
    pub fn params(&self) -> ErgodicParams {
        let x: Vec<f64> = self
            .x_pos
            .iter()
            .chain(self.x_neg.iter())
            .map(|c| c.value)
            .collect();
        ErgodicParams::unitary(self.gamma1.value, self.gamma2.max(0.0), &x)
            .expect("estimates are finite")
    }
}

/// `p_m(λ/n) = Σ (λ_i/n)^m`, the scaled power sum of a spectrum.
pub fn scaled_moments(spectrum: &Spectrum, m: u32) -> f64 {
    assert!(m >= 1);
    spectrum.scaled_entries().iter().map(|v| v.powi(m as i32)).sum()
}

/// Tail-control bound `(λ′_N/n) · p₂(λ/n)` dominating
/// `Σ_{r ≥ N} (λ′_r/n)^m` for `m ≥ 3` (spectra with `|λ_i| ≤ n`).
/// `N` is 1-based.
pub fn tail_control(spectrum: &Spectrum, big_n: usize, m: u32) -> f64 {
    assert!(m >= 3, "the tail bound needs m >= 3");
    assert!(big_n >= 1);
    let (pos, _) = spectrum.split();
    let lambda_n = pos.get(big_n - 1).copied().unwrap_or(0.0);
    (lambda_n / spectrum.n() as f64) * scaled_moments(spectrum, 2)
}

/// Estimates the limit parameters from the spectra at the given sizes.
///
/// Estimates are taken at the largest size; a component is `converged`
/// when the last two sizes agree within `tol`. Estimates with `|x| < tol`
/// are dropped (they contribute trivial factors and would bias `γ₂`).
/// Divergence is signaled when `p₂ + p₁²` grows by more than 2× between
/// consecutive sizes.
pub fn estimate_limits(
    seq: &SpectrumSequence,
    sizes: &[usize],
    k_max: usize,
    tol: f64,
) -> Result<LimitEstimate, ConvergenceError> {
    if sizes.len() < 3 || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConvergenceError::BadSizes { got: sizes.to_vec() });
    }
    if tol <= 0.0 {
        return Err(ConvergenceError::BadTolerance { tol });
    }

    struct SizeData {
        pos: Vec<f64>,
        neg: Vec<f64>,
        p1: f64,
        p2: f64,
    }

    let mut per_size = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let spectrum = seq.spectrum(n)?;
        let (pos, neg) = spectrum.split();
        let scale = n as f64;
        per_size.push(SizeData {
            pos: pos.iter().take(k_max).map(|v| v / scale).collect(),
            neg: neg.iter().take(k_max).map(|v| v / scale).collect(),
            p1: scaled_moments(&spectrum, 1),
            p2: scaled_moments(&spectrum, 2),
        });
    }

    // boundedness of p2 + p1^2 across sizes
    for i in 1..per_size.len() {
        let prev = per_size[i - 1].p2 + per_size[i - 1].p1 * per_size[i - 1].p1;
        let next = per_size[i].p2 + per_size[i].p1 * per_size[i].p1;
        if next > 2.0 * prev && next > 1e-9 {
            return Err(ConvergenceError::Divergence {
                at: sizes[i - 1],
                next: sizes[i],
                from: prev,
                to: next,
            });
        }
    }

    let last = per_size.last().unwrap();
    let prev = &per_size[per_size.len() - 2];

    let component = |value: f64, earlier: f64| {
        let residual = (value - earlier).abs();
        ComponentEstimate { value, residual, converged: residual < tol }
    };

    let collect = |cur: &[f64], before: &[f64]| -> Vec<ComponentEstimate> {
        cur.iter()
            .enumerate()
            .filter(|&(_, &v)| v.abs() >= tol)
            .map(|(k, &v)| component(v, before.get(k).copied().unwrap_or(0.0)))
            .collect()
    };

    let x_pos = collect(&last.pos, &prev.pos);
    let x_neg = collect(&last.neg, &prev.neg);
    let gamma1 = component(last.p1, prev.p1);
    let gamma2_tilde = component(last.p2, prev.p2);
    let x_square: f64 = x_pos.iter().chain(x_neg.iter()).map(|c| c.value * c.value).sum();
    let gamma2 = gamma2_tilde.value - x_square;

    Ok(LimitEstimate { x_pos, x_neg, gamma1, gamma2_tilde, gamma2 })
}

/// Default truncation-tail target for the series evaluations.
pub const SERIES_TAIL_TOL: f64 = 1e-9;

/// Hard cap on adaptive truncation orders.
pub const MAX_SERIES_ORDER: usize = 8192;

/// Max |f_n(a) − F(a)| over the grid, one entry per size, using the
/// one-variable series with adaptively chosen truncation order.
pub fn verify_convergence(
    seq: &SpectrumSequence,
    p: &ErgodicParams,
    sizes: &[usize],
    a_grid: &[f64],
) -> Result<Vec<f64>, ConvergenceError> {
    let mut errors = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let spectrum = seq.spectrum(n)?;
        let mut evaluator = OnevarEvaluator::new(&spectrum);
        let mut worst = 0.0f64;
        for &a in a_grid {
            let fn_a = evaluator.eval_adaptive(a, SERIES_TAIL_TOL, MAX_SERIES_ORDER)?;
            let f_a = charfn_f1(p, a);
            worst = worst.max((fn_a.value - f_a).norm());
        }
        errors.push(worst);
    }
    Ok(errors)
}

/// Multivariate variant of [`verify_convergence`]: max over the supplied
/// evaluation points of |f_n(A) − Π F(a_i)| per size, using the Schur
/// series at the given order. Results whose tail bound exceeds
/// [`crate::orbital::RELIABILITY_TOL`] are rejected.
pub fn verify_convergence_multi(
    seq: &SpectrumSequence,
    p: &ErgodicParams,
    sizes: &[usize],
    points: &[EvalPoint],
    order: usize,
) -> Result<Vec<f64>, ConvergenceError> {
    let mut errors = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let spectrum = seq.spectrum(n)?;
        let mut worst = 0.0f64;
        for point in points {
            let result = orbital_charfn_series(&spectrum, point, order)?;
            if !result.is_reliable() {
                return Err(ConvergenceError::Orbital(OrbitalError::TruncationUnreliable {
                    tail_bound: result.tail_bound,
                    target: crate::orbital::RELIABILITY_TOL,
                }));
            }
            let f_a = charfn_f(p, point);
            worst = worst.max((result.value - f_a).norm());
        }
        errors.push(worst);
    }
    Ok(errors)
}
