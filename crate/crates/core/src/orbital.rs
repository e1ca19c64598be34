//! Characteristic functions of U(n)-orbital measures by two independent
//! routes: a truncated Schur-polynomial series and a closed determinant
//! formula, plus the one-variable specialization used by the limit
//! diagnostics.

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::dd::DdComplex;
use crate::partition::Partition;
use crate::spectrum::{EvalPoint, Spectrum};
use crate::symfunc::{complete_homogeneous_table, schur_from_h_table};

/// Series results with tail bounds above this are flagged unreliable.
pub const RELIABILITY_TOL: f64 = 1e-8;

/// Minimum relative eigenvalue separation accepted by the determinant route.
pub const DET_MIN_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OrbitalError {
    #[error("evaluation point has {point} entries but the orbit lives in H({n})")]
    DimensionMismatch { point: usize, n: usize },
    #[error("{which} entries too close for the determinant formula (relative separation {separation:.3e})")]
    CoincidentEigenvalues { which: &'static str, separation: f64 },
    #[error("series truncation unreliable: tail bound {tail_bound:.3e} exceeds target {target:.3e}")]
    TruncationUnreliable { tail_bound: f64, target: f64 },
}

/// A truncated series value together with its truncation order and a
/// rigorous upper bound on the dropped tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesResult {
    pub value: Complex64,
    pub truncation_order: usize,
    pub tail_bound: f64,
}

impl SeriesResult {
    /// A result is reliable when the dropped tail is below [`RELIABILITY_TOL`].
    pub fn is_reliable(&self) -> bool {
        self.tail_bound <= RELIABILITY_TOL
    }
}

fn imaginary_values(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&v| Complex64::new(0.0, v)).collect()
}

/// `Π_{(p,q) ∈ mu} (n + q − p)` in floating point; the exact integer route
/// lives in [`crate::symfunc::content_product`].
fn content_product_f64(mu: &Partition, n: usize) -> f64 {
    mu.boxes()
        .map(|(p, q)| n as f64 + Partition::content(p, q) as f64)
        .product()
}

/// Tail of the exponential majorant `Σ_{m > order} t^m / m!`.
fn exp_majorant_tail(t: f64, order: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let ln_first = (order as f64 + 1.0) * t.ln() - ln_gamma(order as f64 + 2.0);
    if ln_first > 700.0 {
        return f64::INFINITY;
    }
    let mut term = ln_first.exp();
    let mut sum = 0.0;
    let mut m = order + 1;
    loop {
        sum += term;
        m += 1;
        term *= t / m as f64;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        if term < sum * 1e-18 + f64::MIN_POSITIVE {
            return sum;
        }
    }
}

/// Orbital characteristic function by the Schur series truncated at
/// `order`:
///
/// `f_Λ(A) = Σ_{μ, |μ| ≤ order, ℓ(μ) ≤ min(k,n)} s_μ(iλ) s_μ(a) / Π (n+q−p)`.
///
/// An evaluation point of length `k < n` stands for `diag(a_1,…,a_k,0,…,0)`;
/// shapes with more rows than nonzero entries drop out on their own.
/// The tail bound is the crude exponential majorant
/// `Σ_{m > order} (‖Λ‖₁ ‖A‖_∞)^m / m!`.
pub fn orbital_charfn_series(
    spectrum: &Spectrum,
    point: &EvalPoint,
    order: usize,
) -> Result<SeriesResult, OrbitalError> {
    let n = spectrum.n();
    let k = point.len();
    if k > n {
        return Err(OrbitalError::DimensionMismatch { point: k, n });
    }

    let lambda_nonzero = spectrum.nonzero_entries();
    let a_nonzero: Vec<f64> = point.entries().iter().copied().filter(|&v| v != 0.0).collect();
    let lmax = lambda_nonzero.len().min(a_nonzero.len()).min(k).min(n);

    let value = if lmax == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let h_lambda = complete_homogeneous_table(&imaginary_values(&lambda_nonzero), order);
        let h_point = complete_homogeneous_table(
            &a_nonzero.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>(),
            order,
        );
        let mut acc = Complex64::new(1.0, 0.0);
        for m in 1..=order as u32 {
            for mu in Partition::all_of_weight_bounded(m, lmax) {
                let s_lambda = schur_from_h_table(&mu, &h_lambda, lambda_nonzero.len());
                if s_lambda == Complex64::ZERO {
                    continue;
                }
                let s_a = schur_from_h_table(&mu, &h_point, a_nonzero.len());
                if s_a == Complex64::ZERO {
                    continue;
                }
                acc += s_lambda * s_a / content_product_f64(&mu, n);
            }
        }
        acc
    };

    let tail_bound = exp_majorant_tail(spectrum.one_norm() * point.max_abs(), order);
    Ok(SeriesResult { value, truncation_order: order, tail_bound })
}

/// Determinant of a small complex matrix in log-magnitude/phase form,
/// eliminated in double-double arithmetic (the determinant sits far below
/// the unit entry scale near coincident eigenvalues, and plain f64
/// elimination cancels away the budgeted digits).
/// Returns `(ln|det|, arg det)`; a zero pivot yields `(-inf, 0)`.
fn det_lu_log(entries: Vec<DdComplex>, k: usize) -> (f64, f64) {
    let mut mat = entries;
    let mut ln_mag = 0.0f64;
    let mut arg = 0.0f64;
    for col in 0..k {
        let mut pivot = col;
        let mut best = mat[col * k + col].norm_sqr_f64();
        for row in col + 1..k {
            let candidate = mat[row * k + col].norm_sqr_f64();
            if candidate > best {
                best = candidate;
                pivot = row;
            }
        }
        if best == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if pivot != col {
            for j in 0..k {
                mat.swap(col * k + j, pivot * k + j);
            }
            arg += std::f64::consts::PI;
        }
        let diag = mat[col * k + col];
        let diag_value = diag.value();
        ln_mag += diag_value.norm().ln();
        arg += diag_value.arg();
        for row in col + 1..k {
            let factor = mat[row * k + col].div(diag);
            for j in col..k {
                let sub = factor.mul(mat[col * k + j]);
                mat[row * k + j] = mat[row * k + j].sub(sub);
            }
        }
    }
    (ln_mag, arg)
}

/// Log-magnitude and sign phase of the real Vandermonde `Π_{j<k}(v_j - v_k)`.
fn vandermonde_log(values: &[f64]) -> (f64, f64) {
    let mut ln_mag = 0.0f64;
    let mut arg = 0.0f64;
    for j in 0..values.len() {
        for k in j + 1..values.len() {
            let d = values[j] - values[k];
            ln_mag += d.abs().ln();
            if d < 0.0 {
                arg += std::f64::consts::PI;
            }
        }
    }
    (ln_mag, arg)
}

/// Orbital characteristic function by the closed determinant formula
///
/// `f_Λ(A) = (n−1)!⋯0! · det[e^{i a_j λ_k}] / (V(a) V(iλ))`,
///
/// valid for a full-size evaluation point (`k = n`) with pairwise distinct
/// entries on both sides. All factors are combined in log-magnitude/phase
/// form, so sizes up to n ≈ 150 stay clear of overflow.
///
/// ```
/// use orbint::{EvalPoint, Spectrum};
/// use orbint::orbital::orbital_charfn_det;
///
/// let spectrum = Spectrum::new(vec![1.0, -1.0]).unwrap();
/// let point = EvalPoint::new(vec![1.0, -1.0]).unwrap();
/// let f = orbital_charfn_det(&spectrum, &point).unwrap();
/// assert!((f.re - 2.0f64.sin() / 2.0).abs() < 1e-12);
/// ```
pub fn orbital_charfn_det(spectrum: &Spectrum, point: &EvalPoint) -> Result<Complex64, OrbitalError> {
    let n = spectrum.n();
    if point.len() != n {
        return Err(OrbitalError::DimensionMismatch { point: point.len(), n });
    }
    let sep_lambda = spectrum.relative_separation();
    if sep_lambda < DET_MIN_SEPARATION {
        return Err(OrbitalError::CoincidentEigenvalues { which: "spectrum", separation: sep_lambda });
    }
    let sep_a = point.relative_separation();
    if sep_a < DET_MIN_SEPARATION {
        return Err(OrbitalError::CoincidentEigenvalues { which: "evaluation point", separation: sep_a });
    }

    let lambda = spectrum.eigenvalues();
    let a = point.entries();
    if n == 1 {
        return Ok(Complex64::new(0.0, a[0] * lambda[0]).exp());
    }

    let mut exps = vec![DdComplex::ZERO; n * n];
    for j in 0..n {
        for k in 0..n {
            exps[j * n + k] = crate::dd::dd_cis(a[j], lambda[k]);
        }
    }
    let (det_mag, det_arg) = det_lu_log(exps, n);
    if det_mag == f64::NEG_INFINITY {
        return Ok(Complex64::ZERO);
    }

    let ln_prefactor: f64 = (1..n).map(|j| ln_gamma(j as f64 + 1.0)).sum();
    let (va_mag, va_arg) = vandermonde_log(a);
    let (vl_mag, vl_arg) = vandermonde_log(lambda);
    // V(iλ) = i^{n(n-1)/2} V(λ)
    let quarter_turns = (n * (n - 1) / 2) % 4;
    let vl_arg = vl_arg + quarter_turns as f64 * std::f64::consts::FRAC_PI_2;

    let ln_mag = ln_prefactor + det_mag - va_mag - vl_mag;
    let arg = det_arg - va_arg - vl_arg;
    Ok(Complex64::from_polar(ln_mag.exp(), arg))
}

/// One-variable orbital series evaluator, precomputing the scaled
/// complete-homogeneous tables `h_m(iλ/n)` once per spectrum so a whole
/// grid of arguments can be swept cheaply.
///
/// The evaluation uses the overflow-free form
/// `f_Λ(a) = Σ_m h_m(iλ/n) · Π_{j<m} (n a)/(n+j)`,
/// and the tail is bounded term-wise by the same expression with
/// `h_m(|λ|/n)`, closed geometrically once the term ratio drops below 1
/// (the ratio is eventually decreasing because nonnegative
/// complete-homogeneous sequences are log-concave).
pub struct OnevarEvaluator {
    n: usize,
    p_scaled: Vec<Complex64>,
    h_scaled: Vec<Complex64>,
    p_abs: Vec<f64>,
    h_abs: Vec<f64>,
    scaled_values: Vec<Complex64>,
    abs_values: Vec<f64>,
}

const TAIL_RATIO_CUTOFF: f64 = 0.95;

impl OnevarEvaluator {
    pub fn new(spectrum: &Spectrum) -> Self {
        let n = spectrum.n();
        let nonzero = spectrum.nonzero_entries();
        let scaled_values: Vec<Complex64> =
            nonzero.iter().map(|&v| Complex64::new(0.0, v / n as f64)).collect();
        let abs_values: Vec<f64> = nonzero.iter().map(|&v| v.abs() / n as f64).collect();
        OnevarEvaluator {
            n,
            p_scaled: Vec::new(),
            h_scaled: vec![Complex64::new(1.0, 0.0)],
            p_abs: Vec::new(),
            h_abs: vec![1.0],
            scaled_values,
            abs_values,
        }
    }

    fn ensure(&mut self, order: usize) {
        while self.p_scaled.len() < order {
            let m = self.p_scaled.len() as u32 + 1;
            self.p_scaled
                .push(self.scaled_values.iter().map(|v| v.powu(m)).sum());
            self.p_abs.push(self.abs_values.iter().map(|v| v.powi(m as i32)).sum());
        }
        while self.h_scaled.len() <= order {
            let m = self.h_scaled.len();
            let mut acc = Complex64::ZERO;
            let mut acc_abs = 0.0f64;
            for j in 1..=m {
                acc += self.p_scaled[j - 1] * self.h_scaled[m - j];
                acc_abs += self.p_abs[j - 1] * self.h_abs[m - j];
            }
            self.h_scaled.push(acc / m as f64);
            self.h_abs.push(acc_abs / m as f64);
        }
    }

    /// Majorant term `h_m(|λ|/n) · Π_{j<m} n|a|/(n+j)` stream; returns the
    /// bound on everything past `order`, or `inf` if no geometric closure
    /// is reached within `cap` terms.
    fn tail_beyond(&mut self, abs_a: f64, order: usize, cap: usize) -> f64 {
        if abs_a == 0.0 || self.abs_values.is_empty() {
            return 0.0;
        }
        let n = self.n as f64;
        let mut tail = 0.0f64;
        let mut rho = 1.0f64;
        self.ensure(order + 1);
        for j in 0..=order {
            rho *= n * abs_a / (n + j as f64);
            if !rho.is_finite() {
                return f64::INFINITY;
            }
        }
        // rho now carries Π_{j<=order}, i.e. the multiplier for m = order+1
        let mut m = order + 1;
        let mut term = self.h_abs[m] * rho;
        loop {
            self.ensure(m + 1);
            let next = self.h_abs[m + 1] * rho * (n * abs_a / (n + m as f64));
            let ratio = if term > 0.0 { next / term } else { 0.0 };
            if ratio < TAIL_RATIO_CUTOFF {
                // future ratios only decrease from here
                return tail + term + next / (1.0 - ratio.max(0.0));
            }
            tail += term;
            rho *= n * abs_a / (n + m as f64);
            m += 1;
            term = next;
            if !tail.is_finite() || m > cap {
                return f64::INFINITY;
            }
        }
    }

    /// Evaluates the series truncated at `order`.
    pub fn eval(&mut self, a: f64, order: usize) -> SeriesResult {
        self.ensure(order);
        let n = self.n as f64;
        let mut value = Complex64::new(1.0, 0.0);
        let mut r = 1.0f64;
        for m in 1..=order {
            r *= n * a / (n + (m - 1) as f64);
            value += self.h_scaled[m] * r;
        }
        let tail_bound = self.tail_beyond(a.abs(), order, order.max(64) * 64 + 4096);
        SeriesResult { value, truncation_order: order, tail_bound }
    }

    /// Picks the smallest order whose tail bound is below `tol` (capped at
    /// `max_order`) and evaluates there.
    pub fn eval_adaptive(
        &mut self,
        a: f64,
        tol: f64,
        max_order: usize,
    ) -> Result<SeriesResult, OrbitalError> {
        let order = self
            .required_order(a.abs(), tol, max_order)
            .ok_or(OrbitalError::TruncationUnreliable {
                tail_bound: self.tail_beyond(a.abs(), max_order, max_order * 4),
                target: tol,
            })?;
        Ok(self.eval(a, order))
    }

    /// Smallest truncation order with tail bound ≤ `tol` for `|a| ≤ abs_a`.
    pub fn required_order(&mut self, abs_a: f64, tol: f64, max_order: usize) -> Option<usize> {
        if abs_a == 0.0 || self.abs_values.is_empty() {
            return Some(0);
        }
        let mut order = 8usize.min(max_order);
        loop {
            if self.tail_beyond(abs_a, order, max_order * 4 + 4096) <= tol {
                // walk back to the smallest adequate order
                let mut best = order;
                while best > 0 && self.tail_beyond(abs_a, best - 1, max_order * 4 + 4096) <= tol {
                    best -= 1;
                }
                return Some(best);
            }
            if order >= max_order {
                return None;
            }
            order = (order * 2).min(max_order);
        }
    }
}

/// One-variable orbital characteristic function, the diagonal-entry
/// projection: `Σ_m h_m(iλ) a^m / (n(n+1)⋯(n+m−1))` truncated at `order`.
pub fn orbital_charfn_onevar(spectrum: &Spectrum, a: f64, order: usize) -> SeriesResult {
    OnevarEvaluator::new(spectrum).eval(a, order)
}

/// Taylor coefficient of the one-variable series at order `m` in both
/// normalizations: `coeff = h_m(iλ)/(n(n+1)⋯(n+m−1))` and
/// `scaled = h_m(iλ/n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnevarTaylorCoeff {
    pub coeff: Complex64,
    pub scaled: Complex64,
}

pub fn taylor_coeff_onevar(spectrum: &Spectrum, m: usize) -> OnevarTaylorCoeff {
    let n = spectrum.n() as f64;
    let scaled_values: Vec<Complex64> = spectrum
        .nonzero_entries()
        .iter()
        .map(|&v| Complex64::new(0.0, v / n))
        .collect();
    let scaled = complete_homogeneous_table(&scaled_values, m)[m];
    let mut ratio = 1.0f64;
    for j in 0..m {
        ratio *= n / (n + j as f64);
    }
    OnevarTaylorCoeff { coeff: scaled * ratio, scaled }
}
