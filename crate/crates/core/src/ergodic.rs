//! Parameters of the ergodic limit measures and their characteristic
//! functions, Taylor/log expansions, diagonal-entry densities, and support
//! predicates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectrum::EvalPoint;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ErgodicError {
    #[error("gamma2 must be nonnegative, got {value}")]
    NegativeGamma2 { value: f64 },
    #[error("theta must be positive, got {value}")]
    NonPositiveTheta { value: f64 },
    #[error("non-finite parameter {name} = {value}")]
    NonFinite { name: &'static str, value: f64 },
    #[error("the measure is a Dirac mass (gamma2 = 0 and no x components); it has no density")]
    DiracMeasure,
    #[error("density grid captured only {captured:.6} of the mass; widen the grid")]
    GridTooNarrow { captured: f64 },
    #[error("density_diag requires theta = 1, got {theta}")]
    ThetaUnsupported { theta: f64 },
    #[error("grid must be uniform ascending with at least 2 points")]
    BadGrid,
    #[error("analytic derivative tables need gamma2 > 0 and order <= 3 (got gamma2 = {gamma2}, order {max_order})")]
    DerivativesUnavailable { gamma2: f64, max_order: usize },
    #[error("could not parse parameter set: {0}")]
    Parse(String),
}

/// Parameters `(γ₁, γ₂, x′, x″, θ)` of an ergodic measure. The
/// characteristic function of the diagonal-entry distribution is
///
/// `F(a) = e^{iγ₁a − γ₂a²/2} Π_k e^{−iθ x_k a} / (1 − i x_k a)^θ`,
///
/// with `θ = 1` the unitary-ensemble case.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicParams {
    gamma1: f64,
    gamma2: f64,
    x_pos: Vec<f64>,
    x_neg: Vec<f64>,
    theta: f64,
}

/// Flat serialized form: `gamma1`, `gamma2`, signed `x` list, `theta`.
#[derive(Serialize, Deserialize)]
struct ErgodicParamsRepr {
    gamma1: f64,
    gamma2: f64,
    x: Vec<f64>,
    theta: f64,
}

impl ErgodicParams {
    /// Builds a parameter set from a signed `x` list. Positive entries are
    /// sorted descending, negative ascending; zeros contribute a trivial
    /// factor and are dropped.
    pub fn new(gamma1: f64, gamma2: f64, x: &[f64], theta: f64) -> Result<Self, ErgodicError> {
        if !gamma1.is_finite() {
            return Err(ErgodicError::NonFinite { name: "gamma1", value: gamma1 });
        }
        if !gamma2.is_finite() {
            return Err(ErgodicError::NonFinite { name: "gamma2", value: gamma2 });
        }
        if !theta.is_finite() {
            return Err(ErgodicError::NonFinite { name: "theta", value: theta });
        }
        if gamma2 < 0.0 {
            return Err(ErgodicError::NegativeGamma2 { value: gamma2 });
        }
        if theta <= 0.0 {
            return Err(ErgodicError::NonPositiveTheta { value: theta });
        }
        for &v in x {
            if !v.is_finite() {
                return Err(ErgodicError::NonFinite { name: "x", value: v });
            }
        }
        let mut x_pos: Vec<f64> = x.iter().copied().filter(|&v| v > 0.0).collect();
        let mut x_neg: Vec<f64> = x.iter().copied().filter(|&v| v < 0.0).collect();
        x_pos.sort_by(|a, b| b.partial_cmp(a).unwrap());
        x_neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(ErgodicParams { gamma1, gamma2, x_pos, x_neg, theta })
    }

    /// Same as [`ErgodicParams::new`] with `θ = 1`.
    pub fn unitary(gamma1: f64, gamma2: f64, x: &[f64]) -> Result<Self, ErgodicError> {
        Self::new(gamma1, gamma2, x, 1.0)
    }

    /// Dirac mass at `γ·1`.
    pub fn dirac(gamma1: f64) -> Self {
        ErgodicParams { gamma1, gamma2: 0.0, x_pos: Vec::new(), x_neg: Vec::new(), theta: 1.0 }
    }

    /// Centered Gaussian measure with parameter `γ ≥ 0`.
    pub fn gaussian(gamma2: f64) -> Result<Self, ErgodicError> {
        Self::new(0.0, gamma2, &[], 1.0)
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }

    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }

    pub fn x_pos(&self) -> &[f64] {
        &self.x_pos
    }

    pub fn x_neg(&self) -> &[f64] {
        &self.x_neg
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// All `x_k`, positives first (descending), then negatives (ascending).
    pub fn x_all(&self) -> Vec<f64> {
        self.x_pos.iter().chain(self.x_neg.iter()).copied().collect()
    }

    /// Merge two parameter sets; the measures convolve, the characteristic
    /// functions multiply. Both sides must share `θ`.
    pub fn merged(&self, other: &ErgodicParams) -> Result<ErgodicParams, ErgodicError> {
        let mut x = self.x_all();
        x.extend(other.x_all());
        ErgodicParams::new(self.gamma1 + other.gamma1, self.gamma2 + other.gamma2, &x, self.theta)
    }

    pub fn to_json(&self) -> String {
        let repr = ErgodicParamsRepr {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            x: self.x_all(),
            theta: self.theta,
        };
        serde_json::to_string(&repr).expect("plain floats always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ErgodicError> {
        let repr: ErgodicParamsRepr =
            serde_json::from_str(text).map_err(|e| ErgodicError::Parse(e.to_string()))?;
        ErgodicParams::new(repr.gamma1, repr.gamma2, &repr.x, repr.theta)
    }
}

impl Serialize for ErgodicParams {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ErgodicParamsRepr {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            x: self.x_all(),
            theta: self.theta,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ErgodicParams {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ErgodicParamsRepr::deserialize(deserializer)?;
        ErgodicParams::new(repr.gamma1, repr.gamma2, &repr.x, repr.theta)
            .map_err(serde::de::Error::custom)
    }
}

/// Characteristic function `F(a)` of the diagonal-entry distribution.
/// `F(0) = 1`, `|F(a)| ≤ 1`, `F(−a) = conj F(a)`.
///
/// ```
/// use orbint::ErgodicParams;
/// use orbint::ergodic::charfn_f1;
///
/// let gaussian = ErgodicParams::gaussian(1.0).unwrap();
/// let f = charfn_f1(&gaussian, 2.0);
/// assert!((f.re - (-2.0f64).exp()).abs() < 1e-15 && f.im == 0.0);
/// ```
pub fn charfn_f1(p: &ErgodicParams, a: f64) -> Complex64 {
    // accumulate the exponent: iγ₁a − γ₂a²/2 + θ Σ (−i x a − ln(1 − i x a))
    let mut exponent = Complex64::new(-0.5 * p.gamma2 * a * a, p.gamma1 * a);
    for &x in p.x_pos.iter().chain(p.x_neg.iter()) {
        let log_factor = Complex64::new(1.0, -x * a).ln();
        exponent += p.theta * (Complex64::new(0.0, -x * a) - log_factor);
    }
    exponent.exp()
}

/// Multivariate characteristic function
/// `f(A) = Π_{a ∈ Spec A} F(a)` at a diagonal test matrix.
pub fn charfn_f(p: &ErgodicParams, spec_a: &EvalPoint) -> Complex64 {
    spec_a.entries().iter().map(|&a| charfn_f1(p, a)).product()
}

/// Coefficients of `ln F(a) = iγ₁a − γ₂a²/2 + θ Σ_{m≥2} p_m(ix) a^m / m`
/// up to `order` (index `m` holds the coefficient of `a^m`).
pub fn log_expansion(p: &ErgodicParams, order: usize) -> Vec<Complex64> {
    let mut coeffs = vec![Complex64::ZERO; order + 1];
    if order >= 1 {
        coeffs[1] = Complex64::new(0.0, p.gamma1);
    }
    if order >= 2 {
        coeffs[2] = Complex64::new(-0.5 * p.gamma2, 0.0);
    }
    let xs = p.x_all();
    if !xs.is_empty() {
        // p_m(ix) = i^m Σ x^m
        let mut powers: Vec<f64> = xs.iter().map(|&x| x * x).collect();
        for m in 2..=order {
            let pm: f64 = powers.iter().sum();
            let i_m = Complex64::new(0.0, 1.0).powu(m as u32);
            coeffs[m] += p.theta * i_m * pm / m as f64;
            for (pw, &x) in powers.iter_mut().zip(&xs) {
                *pw *= x;
            }
        }
    }
    coeffs
}

/// Taylor coefficients `c_m` of `F(a) = Σ c_m a^m` up to `order`, obtained
/// by exponentiating the log expansion: `m c_m = Σ_{j=1}^{m} j l_j c_{m−j}`.
pub fn taylor_coeffs_f1(p: &ErgodicParams, order: usize) -> Vec<Complex64> {
    let log = log_expansion(p, order);
    exp_series(&log, order)
}

/// Exponential of a power series with zero constant term.
pub(crate) fn exp_series(log: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(Complex64::new(1.0, 0.0));
    for m in 1..=order {
        let mut acc = Complex64::ZERO;
        for j in 1..=m {
            if j < log.len() {
                acc += (j as f64) * log[j] * out[m - j];
            }
        }
        out.push(acc / m as f64);
    }
    out
}

/// Logarithm of a power series with constant term 1 (the inverse of the
/// exponentiation in [`taylor_coeffs_f1`]):
/// `m l_m = m c_m − Σ_{j=1}^{m−1} j l_j c_{m−j}`.
pub fn log_series(coeffs: &[Complex64], order: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; order + 1];
    for m in 1..=order {
        let mut acc = (m as f64) * coeffs.get(m).copied().unwrap_or(Complex64::ZERO);
        for j in 1..m {
            acc -= (j as f64) * out[j] * coeffs.get(m - j).copied().unwrap_or(Complex64::ZERO);
        }
        out[m] = acc / m as f64;
    }
    out
}

/// Shifted exponential density with parameter `y ≠ 0`: mean 0, variance
/// `y²`, supported on `t ≥ −y` for `y > 0` (mirrored for `y < 0`).
pub fn shifted_exponential_density(y: f64, t: f64) -> f64 {
    if y > 0.0 {
        if t >= -y {
            (1.0 / y) * (-(t + y) / y).exp()
        } else {
            0.0
        }
    } else {
        let y_abs = -y;
        if t <= y_abs {
            (1.0 / y_abs) * ((t + y) / y_abs).exp()
        } else {
            0.0
        }
    }
}

/// Normal density with variance `gamma` centered at `mean`.
fn normal_density(gamma: f64, mean: f64, t: f64) -> f64 {
    (1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt()) * (-(t - mean) * (t - mean) / (2.0 * gamma)).exp()
}

/// d-th derivative of the centered normal density (Hermite-polynomial
/// prefactors), d ≤ 3.
fn normal_density_derivative(gamma: f64, mean: f64, order: usize, t: f64) -> f64 {
    let u = t - mean;
    let base = normal_density(gamma, mean, t);
    match order {
        0 => base,
        1 => -u / gamma * base,
        2 => (u * u / (gamma * gamma) - 1.0 / gamma) * base,
        3 => (-u * u * u / (gamma * gamma * gamma) + 3.0 * u / (gamma * gamma)) * base,
        _ => unreachable!("derivative order capped by the caller"),
    }
}

/// One-sided exponential smoothing filter: convolves tabulated values with
/// the mean-zero shifted exponential of parameter `y > 0`, exactly for
/// piecewise-linear input. Derived from `y g′(t) + g(t) = f(t + y)`.
fn exponential_filter(grid_start: f64, dt: f64, values: &[f64], y: f64) -> Vec<f64> {
    debug_assert!(y > 0.0);
    let n = values.len();
    let sample = |t: f64| -> f64 {
        let pos = (t - grid_start) / dt;
        if pos <= 0.0 || pos >= (n - 1) as f64 {
            return if (0.0..=(n - 1) as f64).contains(&pos) { values[pos.round() as usize] } else { 0.0 };
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        values[i] * (1.0 - frac) + values[i + 1] * frac
    };
    let decay = (-dt / y).exp();
    // weights for the linear segment between f(t_{i-1}+y) and f(t_i+y)
    let w_lead = 1.0 - (y / dt) * (1.0 - decay);
    let w_lag = (y / dt) * (1.0 - decay) - decay;
    // warm-up: start far enough below the grid that the kernel support is empty
    let warmup = (y / dt).ceil() as usize + 2;
    let mut g = 0.0f64;
    let mut out = Vec::with_capacity(n);
    for step in 0..warmup + n {
        let t = grid_start + (step as f64 - warmup as f64) * dt;
        let f_lead = sample(t + y);
        let f_lag = sample(t - dt + y);
        g = decay * g + w_lead * f_lead + w_lag * f_lag;
        if step >= warmup {
            out.push(g);
        }
    }
    out
}

/// Applies the mean-zero shifted-exponential convolution for any `y ≠ 0`
/// (negative `y` mirrors the grid).
fn apply_exponential(grid_start: f64, dt: f64, values: &[f64], y: f64) -> Vec<f64> {
    if y > 0.0 {
        exponential_filter(grid_start, dt, values, y)
    } else {
        let mut reversed: Vec<f64> = values.to_vec();
        reversed.reverse();
        // reversing maps the grid [s, e] onto itself with t -> s + e - t
        let mut filtered = exponential_filter(grid_start, dt, &reversed, -y);
        filtered.reverse();
        filtered
    }
}

/// Density of the diagonal-entry distribution on a uniform ascending grid:
/// the convolution of `N(γ₁, γ₂)` with one mean-zero shifted exponential
/// per `x_k`, computed by sequential exact-form convolution.
///
/// Requires `θ = 1` and a non-Dirac parameter point; signals when the grid
/// captures less than 0.999 of the mass.
pub fn density_diag(p: &ErgodicParams, grid: &[f64]) -> Result<Vec<f64>, ErgodicError> {
    if p.theta != 1.0 {
        return Err(ErgodicError::ThetaUnsupported { theta: p.theta });
    }
    let xs = p.x_all();
    if p.gamma2 == 0.0 && xs.is_empty() {
        return Err(ErgodicError::DiracMeasure);
    }
    if grid.len() < 2 {
        return Err(ErgodicError::BadGrid);
    }
    let dt = grid[1] - grid[0];
    if dt <= 0.0 {
        return Err(ErgodicError::BadGrid);
    }
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0) {
            return Err(ErgodicError::BadGrid);
        }
    }

    let mut values: Vec<f64>;
    let mut remaining = xs.as_slice();
    if p.gamma2 > 0.0 {
        values = grid.iter().map(|&t| normal_density(p.gamma2, p.gamma1, t)).collect();
    } else {
        // base = first shifted exponential, centered at γ₁
        let (first, rest) = xs.split_first().expect("non-Dirac with gamma2 = 0 has x entries");
        values = grid.iter().map(|&t| shifted_exponential_density(*first, t - p.gamma1)).collect();
        remaining = rest;
    }
    for &y in remaining {
        values = apply_exponential(grid[0], dt, &values, y);
    }
    for v in &mut values {
        *v = v.max(0.0);
    }

    let captured = trapezoid(grid, &values);
    if captured < 0.999 {
        return Err(ErgodicError::GridTooNarrow { captured });
    }
    Ok(values)
}

/// Tabulated derivatives of the diagonal-entry density up to `max_order`
/// (index `d` holds the d-th derivative; index 0 is the density itself).
///
/// Runs the same exponential filter chain on the analytic derivatives of
/// the Gaussian base, so each table carries convolution-level accuracy
/// rather than finite-difference noise. Requires `γ₂ > 0` (with `γ₂ = 0`
/// the density has a kink at the exponential support edge) and
/// `max_order ≤ 3`.
pub fn density_diag_derivatives(
    p: &ErgodicParams,
    grid: &[f64],
    max_order: usize,
) -> Result<Vec<Vec<f64>>, ErgodicError> {
    if p.theta != 1.0 {
        return Err(ErgodicError::ThetaUnsupported { theta: p.theta });
    }
    if !(p.gamma2 > 0.0) || max_order > 3 {
        return Err(ErgodicError::DerivativesUnavailable { gamma2: p.gamma2, max_order });
    }
    if grid.len() < 2 {
        return Err(ErgodicError::BadGrid);
    }
    let dt = grid[1] - grid[0];
    if dt <= 0.0 {
        return Err(ErgodicError::BadGrid);
    }
    let xs = p.x_all();
    let mut tables = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let mut values: Vec<f64> = grid
            .iter()
            .map(|&t| normal_density_derivative(p.gamma2, p.gamma1, order, t))
            .collect();
        for &y in &xs {
            values = apply_exponential(grid[0], dt, &values, y);
        }
        if order == 0 {
            for v in &mut values {
                *v = v.max(0.0);
            }
            let captured = trapezoid(grid, &values);
            if captured < 0.999 {
                return Err(ErgodicError::GridTooNarrow { captured });
            }
        }
        tables.push(values);
    }
    Ok(tables)
}

/// Trapezoid rule on a tabulated function.
pub fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
    }
    acc
}

/// Support predicate: the measure is carried by the nonnegative-definite
/// cone iff `γ₂ = 0`, every `x_k ≥ 0`, and `Σ x_k ≤ γ₁`.
pub fn is_nonneg_supported(p: &ErgodicParams) -> bool {
    if p.gamma2 != 0.0 || !p.x_neg.is_empty() {
        return false;
    }
    let sum: f64 = p.x_pos.iter().sum();
    sum <= p.gamma1
}
