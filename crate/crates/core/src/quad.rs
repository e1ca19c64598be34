//! Adaptive Simpson quadrature, real and complex.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("adaptive quadrature did not converge on [{a}, {b}] (requested tolerance {tol:.3e})")]
    NonConvergence { a: f64, b: f64, tol: f64 },
}

const MAX_DEPTH: u32 = 32;

fn simpson_step<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    fa: Complex64,
    b: f64,
    fb: Complex64,
    m: f64,
    fm: Complex64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<Complex64, QuadError> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let h = b - a;
    let left = h / 12.0 * (fa + 4.0 * flm + fm);
    let right = h / 12.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.norm() <= 15.0 * tol || h.abs() < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(QuadError::NonConvergence { a, b, tol });
    }
    let l = simpson_step(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth + 1)?;
    let r = simpson_step(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth + 1)?;
    Ok(l + r)
}

/// Adaptive Simpson integration of a complex-valued function over `[a, b]`.
pub fn adaptive_simpson_complex<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<Complex64, QuadError> {
    if a == b {
        return Ok(Complex64::ZERO);
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, fa, b, fb, m, fm, whole, tol, 0)
}

/// Adaptive Simpson integration of a real-valued function over `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError> {
    adaptive_simpson_complex(|t| Complex64::new(f(t), 0.0), a, b, tol).map(|v| v.re)
}
