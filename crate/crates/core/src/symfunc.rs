//! Symmetric-function evaluation: hook dimensions, power sums, complete
//! homogeneous polynomials, and Schur polynomials by two determinant routes.
//!
//! Hook/content products are exact integers; polynomial evaluation is
//! double-precision complex.

use num_bigint::BigUint;
use num_complex::Complex64;
use thiserror::Error;

use crate::partition::Partition;

/// Exact-arithmetic budget for `dim_sym`.
pub const MAX_DIM_WEIGHT: u32 = 40;

/// Minimum relative separation accepted by the bialternant route.
pub const BIALTERNANT_MIN_SEPARATION: f64 = 1e-8;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SymfuncError {
    #[error("partition parts must be weakly decreasing, got {parts:?}")]
    NotWeaklyDecreasing { parts: Vec<u32> },
    #[error("|mu| = {weight} exceeds the exact-arithmetic budget {max}")]
    WeightTooLarge { weight: u32, max: u32 },
    #[error("partition has {rows} rows but only {vars} variables are available")]
    TooManyRows { rows: usize, vars: usize },
    #[error("values too close for the bialternant determinant (relative separation {separation:.3e} < {min:.3e})")]
    CoincidentValues { separation: f64, min: f64 },
}

/// Dimension of the irreducible symmetric-group representation indexed by
/// `mu`: the number of standard Young tableaux of that shape, computed as
/// `m! / Π h(p,q)` in exact integer arithmetic.
pub fn dim_sym(mu: &Partition) -> Result<BigUint, SymfuncError> {
    let m = mu.weight();
    if m > MAX_DIM_WEIGHT {
        return Err(SymfuncError::WeightTooLarge { weight: m, max: MAX_DIM_WEIGHT });
    }
    let mut numerator = BigUint::from(1u32);
    for j in 2..=m as u64 {
        numerator *= j;
    }
    let mut hooks = BigUint::from(1u32);
    for (p, q) in mu.boxes() {
        hooks *= mu.hook_length(p, q) as u64;
    }
    // m! is divisible by the full hook product (hook length formula).
    Ok(numerator / hooks)
}

/// Product of shifted contents `Π_{(p,q) ∈ mu} (n + q − p)`, exact.
///
/// For the one-row shape `(m)` this is the rising factorial
/// `n (n+1) ⋯ (n+m−1)`.
pub fn content_product(mu: &Partition, n: usize) -> Result<BigUint, SymfuncError> {
    if mu.len() > n {
        return Err(SymfuncError::TooManyRows { rows: mu.len(), vars: n });
    }
    let mut acc = BigUint::from(1u32);
    for (p, q) in mu.boxes() {
        let factor = n as i64 + Partition::content(p, q);
        debug_assert!(factor > 0);
        acc *= factor as u64;
    }
    Ok(acc)
}

/// Power sum `p_m(values) = Σ v_i^m`, `m ≥ 1`.
pub fn power_sum(m: u32, values: &[Complex64]) -> Complex64 {
    assert!(m >= 1, "power sums are defined for m >= 1");
    values.iter().map(|v| v.powu(m)).sum()
}

/// Table `p_1, …, p_max` of power sums (index 0 holds `p_1`).
fn power_sum_table(values: &[Complex64], max: usize) -> Vec<Complex64> {
    let mut table = vec![Complex64::ZERO; max];
    for &v in values {
        let mut pw = Complex64::new(1.0, 0.0);
        for slot in table.iter_mut() {
            pw *= v;
            *slot += pw;
        }
    }
    table
}

/// Table `h_0, …, h_max` of complete homogeneous polynomials via the Newton
/// recurrence `m·h_m = Σ_{j=1}^{m} p_j h_{m−j}`.
pub fn complete_homogeneous_table(values: &[Complex64], max: usize) -> Vec<Complex64> {
    let p = power_sum_table(values, max);
    let mut h = Vec::with_capacity(max + 1);
    h.push(Complex64::new(1.0, 0.0));
    for m in 1..=max {
        let mut acc = Complex64::ZERO;
        for j in 1..=m {
            acc += p[j - 1] * h[m - j];
        }
        h.push(acc / m as f64);
    }
    h
}

/// Complete homogeneous polynomial `h_m(values)`; `h_0 = 1`.
pub fn complete_homogeneous(m: u32, values: &[Complex64]) -> Complex64 {
    complete_homogeneous_table(values, m as usize)[m as usize]
}

/// Determinant of the `k×k` minor `[c_{μ_i − i + j}]` with `c_r = 0` for
/// `r < 0` or `r` past the end of `coeffs`.
fn coefficient_minor(coeffs: &[Complex64], mu: &Partition, k: usize) -> Complex64 {
    if k == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut mat = vec![Complex64::ZERO; k * k];
    for i in 1..=k {
        for j in 1..=k {
            let idx = mu.part(i) as i64 - i as i64 + j as i64;
            if idx >= 0 && (idx as usize) < coeffs.len() {
                mat[(i - 1) * k + j - 1] = coeffs[idx as usize];
            }
        }
    }
    det_lu(&mut mat, k)
}

/// LU determinant with partial pivoting for small dense complex matrices.
pub(crate) fn det_lu(mat: &mut [Complex64], k: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..k {
        let mut pivot = col;
        let mut best = mat[col * k + col].norm_sqr();
        for row in col + 1..k {
            let candidate = mat[row * k + col].norm_sqr();
            if candidate > best {
                best = candidate;
                pivot = row;
            }
        }
        if best == 0.0 {
            return Complex64::ZERO;
        }
        if pivot != col {
            for j in 0..k {
                mat.swap(col * k + j, pivot * k + j);
            }
            det = -det;
        }
        let diag = mat[col * k + col];
        det *= diag;
        for row in col + 1..k {
            let factor = mat[row * k + col] / diag;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in col..k {
                let sub = factor * mat[col * k + j];
                mat[row * k + j] -= sub;
            }
        }
    }
    det
}

/// Schur polynomial `s_mu(values)` by the Jacobi–Trudi determinant
/// `det [h_{μ_i − i + j}]`. Returns exactly 0 when `ℓ(mu)` exceeds the
/// number of variables, and 1 for the empty partition.
pub fn schur_jacobi_trudi(mu: &Partition, values: &[Complex64]) -> Complex64 {
    if mu.len() > values.len() {
        return Complex64::ZERO;
    }
    if mu.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let k = mu.len();
    let max_index = mu.part(1) as usize + k - 1;
    let h = complete_homogeneous_table(values, max_index);
    coefficient_minor(&h, mu, k)
}

/// Schur polynomial via a precomputed complete-homogeneous table. The table
/// must extend at least to `μ_1 + ℓ(mu) − 1`.
pub fn schur_from_h_table(mu: &Partition, h: &[Complex64], vars: usize) -> Complex64 {
    if mu.len() > vars {
        return Complex64::ZERO;
    }
    if mu.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    debug_assert!(mu.part(1) as usize + mu.len() <= h.len() + 1);
    coefficient_minor(h, mu, mu.len())
}

/// Schur polynomial by the bialternant ratio
/// `det [v_j^{μ_k + n − k}] / Vandermonde(values)`.
///
/// Rejects inputs whose relative separation is below
/// [`BIALTERNANT_MIN_SEPARATION`]; use the Jacobi–Trudi route there.
pub fn schur_bialternant(mu: &Partition, values: &[Complex64]) -> Result<Complex64, SymfuncError> {
    let n = values.len();
    if mu.len() > n {
        return Err(SymfuncError::TooManyRows { rows: mu.len(), vars: n });
    }
    let scale = values.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
    let mut min_sep = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            min_sep = min_sep.min((values[i] - values[j]).norm());
        }
    }
    let separation = min_sep / scale;
    if n > 1 && separation < BIALTERNANT_MIN_SEPARATION {
        return Err(SymfuncError::CoincidentValues {
            separation,
            min: BIALTERNANT_MIN_SEPARATION,
        });
    }
    let mut numerator = vec![Complex64::ZERO; n * n];
    for j in 0..n {
        for k in 0..n {
            let exponent = mu.part(k + 1) + (n - 1 - k) as u32;
            numerator[j * n + k] = values[j].powu(exponent);
        }
    }
    let num = det_lu(&mut numerator, n);
    let mut vandermonde = Complex64::new(1.0, 0.0);
    for j in 0..n {
        for k in j + 1..n {
            vandermonde *= values[j] - values[k];
        }
    }
    Ok(num / vandermonde)
}

/// Minor `det [c_{μ_i − i + j}]_{i,j=1..k}` for a formal series with
/// `c_0 = 1`: the coefficient of `s_mu(a_1,…,a_k)` in `Π_p Σ_m c_m a_p^m`.
/// Coefficients past the end of `coeffs` are treated as zero.
pub fn series_product_minor(coeffs: &[Complex64], mu: &Partition, k: usize) -> Complex64 {
    if mu.len() > k {
        return Complex64::ZERO;
    }
    coefficient_minor(coeffs, mu, k)
}
