//! Seeded Monte Carlo samplers: Haar-random unitaries, orbital measures,
//! the elementary ergodic measures, finite-rank Wishart-type corners,
//! Dirichlet-simplex projections, and empirical characteristic functions.
//!
//! Samplers take an explicit 64-bit seed and are stateless otherwise;
//! identical seeds give bit-identical streams. Parallel callers should
//! derive per-stream seeds with [`derive_stream_seed`].

mod linalg;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use thiserror::Error;

use crate::spectrum::{EvalPoint, Spectrum};
use linalg::{hermitian_eigenvalues, householder_qr, CMatrix};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SamplingError {
    #[error("gaussian variance must be nonnegative, got {value}")]
    NegativeVariance { value: f64 },
    #[error("dirichlet theta must be positive, got {value}")]
    BadTheta { value: f64 },
    #[error("dirichlet projection needs at least 2 coordinates, got {count}")]
    TooFewCoordinates { count: usize },
    #[error("evaluation point has {point} entries but samples live in H({n})")]
    DimensionMismatch { point: usize, n: usize },
    #[error("empirical characteristic function needs at least one sample")]
    NoSamples,
}

/// Splits a base seed into independent stream seeds (SplitMix64 finalizer
/// over `seed + GOLDEN·(index+1)`). `derive_stream_seed(seed, 0) != seed`,
/// so derived streams never collide with the base stream.
pub fn derive_stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng_for(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian with density `π^{-1} e^{-|z|²}`
/// (`E|z|² = 1`; real and imaginary parts are N(0, 1/2)).
fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// An n×n unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Largest deviation of `U†U` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut dot = Complex64::ZERO;
                for k in 0..n {
                    dot += self.entry(k, i).conj() * self.entry(k, j);
                }
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - Complex64::new(want, 0.0)).norm());
            }
        }
        worst
    }
}

/// An n×n complex Hermitian matrix; symmetry is exact by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSample {
    dim: usize,
    data: Vec<Complex64>,
}

impl HermitianSample {
    /// Builds from an upper-triangle generator; the lower triangle is the
    /// conjugate and diagonal imaginary parts are dropped.
    fn from_upper(dim: usize, mut entry: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = entry(i, j);
                let v = if i == j { Complex64::new(v.re, 0.0) } else { v };
                data[i * dim + j] = v;
                data[j * dim + i] = v.conj();
            }
        }
        HermitianSample { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    /// Real diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entry(i, i).re).collect()
    }

    /// Top-left k×k corner.
    pub fn corner(&self, k: usize) -> HermitianSample {
        assert!(k >= 1 && k <= self.dim);
        HermitianSample::from_upper(k, |i, j| self.entry(i, j))
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut m = CMatrix::zeros(self.dim);
        m.data.copy_from_slice(&self.data);
        hermitian_eigenvalues(m)
    }

    /// `tr(A·B)` against a diagonal test matrix `A` (padded with zeros).
    pub fn trace_against_diag(&self, a: &[f64]) -> f64 {
        a.iter()
            .enumerate()
            .map(|(i, &ai)| ai * self.entry(i, i).re)
            .sum()
    }

    /// Largest asymmetry |B_ij − conj(B_ji)|; zero by construction.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// CSV row: upper triangle flattened row by row, real/imag interleaved.
    pub fn to_csv_row(&self) -> String {
        let mut fields = Vec::with_capacity(self.dim * (self.dim + 1));
        for i in 0..self.dim {
            for j in i..self.dim {
                let v = self.entry(i, j);
                fields.push(v.re.to_string());
                fields.push(v.im.to_string());
            }
        }
        fields.join(",")
    }

    /// Summary JSON value: spectrum, diagonal, and the eigenvalues of the
    /// top-left `corner`×`corner` block.
    pub fn summary_json(&self, corner: usize) -> serde_json::Value {
        let corner = corner.clamp(1, self.dim);
        serde_json::json!({
            "spectrum": self.spectrum(),
            "diagonal": self.diagonal(),
            "corner_eigenvalues": self.corner(corner).spectrum(),
        })
    }
}

/// Haar-distributed random unitary: QR of a Ginibre matrix with the
/// column-phase correction from the R diagonal (each column of Q is
/// multiplied by `r_jj/|r_jj|`, making the factorization canonical).
/// Without the correction the distribution is not Haar.
pub fn haar_unitary(n: usize, seed: u64) -> UnitaryMatrix {
    assert!(n >= 1);
    let mut rng = rng_for(seed);
    haar_unitary_with(n, &mut rng)
}

fn haar_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let mut g = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            g.set(i, j, standard_complex(rng));
        }
    }
    let (mut q, r_diag) = householder_qr(g);
    for (j, r) in r_diag.iter().enumerate() {
        let phase = if *r == Complex64::ZERO { Complex64::new(1.0, 0.0) } else { r / r.norm() };
        for i in 0..n {
            let v = q.at(i, j);
            q.set(i, j, v * phase);
        }
    }
    UnitaryMatrix { dim: n, data: q.data }
}

/// One draw from the orbital measure with the given spectrum:
/// `B = U diag(Λ) U†` with Haar `U`. Constant spectra short-circuit to
/// `c·I` (the orbit is a single point).
pub fn sample_orbital(spectrum: &Spectrum, seed: u64) -> HermitianSample {
    let mut rng = rng_for(seed);
    sample_orbital_with(spectrum, &mut rng)
}

fn sample_orbital_with<R: Rng + ?Sized>(spectrum: &Spectrum, rng: &mut R) -> HermitianSample {
    let n = spectrum.n();
    let lambda = spectrum.eigenvalues();
    if lambda.iter().all(|&v| v == lambda[0]) {
        return HermitianSample::from_upper(n, |i, j| {
            Complex64::new(if i == j { lambda[0] } else { 0.0 }, 0.0)
        });
    }
    let u = haar_unitary_with(n, rng);
    HermitianSample::from_upper(n, |i, j| {
        let mut acc = Complex64::ZERO;
        for k in 0..n {
            acc += u.entry(i, k) * lambda[k] * u.entry(j, k).conj();
        }
        acc
    })
}

/// Sampler parameterizations for the elementary and Wishart-type measures.
#[derive(Debug, Clone, PartialEq)]
pub enum SamplerVariant {
    /// Dirac mass at `γ·I`.
    Dirac(f64),
    /// Independent Gaussian entries: diagonal N(0, γ), off-diagonal
    /// real/imaginary parts N(0, γ).
    Gaussian(f64),
    /// `B = y(−I + ξ*ξ)` corner with iid standard complex Gaussian `ξ`.
    RankOne(f64),
    /// `B = z·I + Ξ*XΞ` corner, `X = diag(weights)`.
    FiniteRank { shift: f64, weights: Vec<f64> },
    /// Orbital measure with a fixed spectrum.
    Orbital(Spectrum),
}

/// A sampler bound to a matrix size and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub variant: SamplerVariant,
    pub size: usize,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn new(variant: SamplerVariant, size: usize, seed: u64) -> Result<Self, SamplingError> {
        if let SamplerVariant::Gaussian(gamma) = variant {
            if gamma < 0.0 {
                return Err(SamplingError::NegativeVariance { value: gamma });
            }
        }
        Ok(SamplerSpec { variant, size, seed })
    }

    /// Deterministic sample stream; identical spec ⇒ identical stream.
    pub fn stream(&self) -> SampleStream {
        SampleStream { spec: self.clone(), rng: rng_for(self.seed) }
    }

    /// First sample of the stream.
    pub fn sample(&self) -> HermitianSample {
        self.stream().next().expect("stream is infinite")
    }
}

/// Infinite iterator of samples from a [`SamplerSpec`].
pub struct SampleStream {
    spec: SamplerSpec,
    rng: ChaCha12Rng,
}

impl Iterator for SampleStream {
    type Item = HermitianSample;

    fn next(&mut self) -> Option<HermitianSample> {
        let n = self.spec.size;
        let rng = &mut self.rng;
        let sample = match &self.spec.variant {
            SamplerVariant::Dirac(gamma) => {
                let g = *gamma;
                HermitianSample::from_upper(n, |i, j| {
                    Complex64::new(if i == j { g } else { 0.0 }, 0.0)
                })
            }
            SamplerVariant::Gaussian(gamma) => {
                let sd = gamma.sqrt();
                HermitianSample::from_upper(n, |i, j| {
                    if i == j {
                        let d: f64 = rng.sample(StandardNormal);
                        Complex64::new(sd * d, 0.0)
                    } else {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex64::new(sd * re, sd * im)
                    }
                })
            }
            SamplerVariant::RankOne(y) => {
                let xi: Vec<Complex64> = (0..n).map(|_| standard_complex(rng)).collect();
                let y = *y;
                HermitianSample::from_upper(n, |i, j| {
                    let eye = if i == j { 1.0 } else { 0.0 };
                    y * (xi[i].conj() * xi[j] - eye)
                })
            }
            SamplerVariant::FiniteRank { shift, weights } => {
                let k = weights.len();
                let xi: Vec<Vec<Complex64>> = (0..k)
                    .map(|_| (0..n).map(|_| standard_complex(rng)).collect())
                    .collect();
                let z = *shift;
                HermitianSample::from_upper(n, |i, j| {
                    let mut acc = Complex64::new(if i == j { z } else { 0.0 }, 0.0);
                    for (row, &w) in xi.iter().zip(weights) {
                        acc += w * row[i].conj() * row[j];
                    }
                    acc
                })
            }
            SamplerVariant::Orbital(spectrum) => sample_orbital_with(spectrum, rng),
        };
        Some(sample)
    }
}

/// `count` projections `Σ p_k t_k` of Dirichlet(θ,…,θ) points on the
/// simplex, sampled by normalized Gamma(θ) variates (for θ = 1 these are
/// exponentials, i.e. the uniform simplex measure).
pub fn sample_dirichlet_projection(
    theta: f64,
    t_values: &[f64],
    count: usize,
    seed: u64,
) -> Result<Vec<f64>, SamplingError> {
    if !(theta > 0.0) {
        return Err(SamplingError::BadTheta { value: theta });
    }
    if t_values.len() < 2 {
        return Err(SamplingError::TooFewCoordinates { count: t_values.len() });
    }
    let gamma = Gamma::new(theta, 1.0).expect("theta > 0");
    let mut rng = rng_for(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut total = 0.0;
        let mut dot = 0.0;
        for &t in t_values {
            let g: f64 = gamma.sample(&mut rng);
            total += g;
            dot += g * t;
        }
        out.push(dot / total);
    }
    Ok(out)
}

/// Monte Carlo estimate of the characteristic function with its jackknife
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCharfn {
    pub value: Complex64,
    pub std_error: f64,
    pub count: usize,
}

impl EmpiricalCharfn {
    /// |estimate − reference| measured in standard errors. A zero-spread
    /// stream (all summands identical) still accumulates one rounding error
    /// per summand in the mean, so the comparison allows exactly that much.
    pub fn sigmas_from(&self, reference: Complex64) -> f64 {
        let diff = (self.value - reference).norm();
        if self.std_error == 0.0 {
            let roundoff = f64::EPSILON * self.count as f64 * (1.0 + reference.norm());
            if diff <= roundoff {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / self.std_error
        }
    }
}

/// Mean of `e^{i tr(A B)}` over samples, with `A` the diagonal test matrix
/// of the evaluation point (zero-padded to the sample size). For the
/// sample mean the jackknife collapses to the usual
/// `√(Σ|z − z̄|² / (N(N−1)))`.
pub fn empirical_charfn<I>(samples: I, point: &EvalPoint) -> Result<EmpiricalCharfn, SamplingError>
where
    I: IntoIterator<Item = HermitianSample>,
{
    let mut sum = Complex64::ZERO;
    let mut sum_sqr = 0.0f64;
    let mut count = 0usize;
    for sample in samples {
        if point.len() > sample.dim() {
            return Err(SamplingError::DimensionMismatch { point: point.len(), n: sample.dim() });
        }
        let z = Complex64::new(0.0, sample.trace_against_diag(point.entries())).exp();
        sum += z;
        sum_sqr += z.norm_sqr();
        count += 1;
    }
    if count == 0 {
        return Err(SamplingError::NoSamples);
    }
    let mean = sum / count as f64;
    let variance = (sum_sqr - count as f64 * mean.norm_sqr()).max(0.0);
    let std_error = if count > 1 {
        (variance / (count as f64 * (count as f64 - 1.0))).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(EmpiricalCharfn { value: mean, std_error, count })
}
