//! Tabulated probability densities and total-positivity diagnostics:
//! sign tests on translation-kernel determinants, extended (Wronskian-type)
//! positivity on derivatives, and density convolution.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use statrs::function::erf::erfc;
use thiserror::Error;

/// Edge values above this fraction of the maximum make out-of-range
/// evaluation an error rather than a silent zero.
const EDGE_NEGLIGIBLE: f64 = 1e-10;

/// Minimum normalized gap enforced on random test grids; nearly coincident
/// points make the determinant sign numerically meaningless.
const GRID_GAP_FLOOR: f64 = 5e-3;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TpError {
    #[error("density values must be nonnegative and finite (index {index})")]
    BadValue { index: usize },
    #[error("need at least 2 tabulation points")]
    TooFewPoints,
    #[error("tabulation step must be positive and uniform")]
    BadStep,
    #[error("test order must be between 1 and {max}, got {order}")]
    BadOrder { order: usize, max: usize },
    #[error("difference {at:.4} falls outside the tabulated range [{start:.4}, {end:.4}] where the density is not negligible")]
    InsufficientCoverage { at: f64, start: f64, end: f64 },
    #[error("grid steps differ ({left} vs {right}); convolve on a common step")]
    StepMismatch { left: f64, right: f64 },
    #[error("derivative order {order} estimation noise {noise:.3e} exceeds the determinant budget {budget:.3e}")]
    DerivativeNoise { order: usize, noise: f64, budget: f64 },
    #[error("explicit point tuples must be strictly descending")]
    PointsNotDescending,
    #[error("could not parse density CSV: {0}")]
    Parse(String),
}

type DensityFn = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

/// A probability density tabulated on a uniform grid, optionally backed by
/// an analytic evaluator with derivatives up to a stated order and/or by
/// precomputed derivative tables.
#[derive(Clone)]
pub struct TabulatedDensity {
    start: f64,
    step: f64,
    values: Vec<f64>,
    /// Tabulated derivatives; index `d` holds order `d + 1`.
    derivative_tables: Vec<Vec<f64>>,
    analytic: Option<(usize, DensityFn)>,
    label: String,
}

impl std::fmt::Debug for TabulatedDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "TabulatedDensity({}, [{:.4}, {:.4}], {} pts)",
            self.label,
            self.start,
            self.end(),
            self.values.len()
        )
    }
}

fn check_values(values: &[f64]) -> Result<(), TpError> {
    if values.len() < 2 {
        return Err(TpError::TooFewPoints);
    }
    for (index, &v) in values.iter().enumerate() {
        if !v.is_finite() || v < 0.0 {
            return Err(TpError::BadValue { index });
        }
    }
    Ok(())
}

impl TabulatedDensity {
    pub fn from_values(start: f64, step: f64, values: Vec<f64>) -> Result<Self, TpError> {
        if !(step > 0.0) || !start.is_finite() {
            return Err(TpError::BadStep);
        }
        check_values(&values)?;
        Ok(TabulatedDensity {
            start,
            step,
            values,
            derivative_tables: Vec::new(),
            analytic: None,
            label: "tabulated".into(),
        })
    }

    /// Attaches tabulated derivatives (order 1, 2, … on the same grid),
    /// consulted before falling back to finite differences.
    pub fn with_derivative_tables(mut self, tables: Vec<Vec<f64>>) -> Result<Self, TpError> {
        for table in &tables {
            if table.len() != self.values.len() {
                return Err(TpError::BadStep);
            }
        }
        self.derivative_tables = tables;
        Ok(self)
    }

    pub fn from_grid(grid: &[f64], values: &[f64]) -> Result<Self, TpError> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(TpError::TooFewPoints);
        }
        let step = grid[1] - grid[0];
        if !(step > 0.0) {
            return Err(TpError::BadStep);
        }
        for w in grid.windows(2) {
            if ((w[1] - w[0]) - step).abs() > 1e-9 * step.max(1.0) {
                return Err(TpError::BadStep);
            }
        }
        Self::from_values(grid[0], step, values.to_vec())
    }

    /// Tabulates an analytic density (with derivatives up to `max_order`)
    /// on `[lo, hi]`. A finer-than-default grid keeps the trapezoid mass of
    /// the one-sided families within 1e−4 despite their support-edge jump.
    fn from_analytic(
        label: impl Into<String>,
        lo: f64,
        hi: f64,
        max_order: usize,
        f: DensityFn,
    ) -> Self {
        let width = hi - lo;
        let count = 4001usize;
        let step = width / (count - 1) as f64;
        let values: Vec<f64> = (0..count).map(|i| f(0, lo + i as f64 * step).max(0.0)).collect();
        TabulatedDensity {
            start: lo,
            step,
            values,
            derivative_tables: Vec::new(),
            analytic: Some((max_order, f)),
            label: label.into(),
        }
    }

    /// Centered normal density with variance `gamma`, derivatives analytic
    /// up to order 3.
    pub fn normal(gamma: f64) -> Result<Self, TpError> {
        if !(gamma > 0.0) {
            return Err(TpError::BadStep);
        }
        let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
        let f: DensityFn = Arc::new(move |order, t| {
            let base = norm * (-t * t / (2.0 * gamma)).exp();
            match order {
                0 => base,
                1 => -t / gamma * base,
                2 => (t * t / (gamma * gamma) - 1.0 / gamma) * base,
                3 => (-t * t * t / (gamma * gamma * gamma) + 3.0 * t / (gamma * gamma)) * base,
                _ => f64::NAN,
            }
        });
        let halfwidth = 8.0 * gamma.sqrt();
        Ok(Self::from_analytic(format!("normal({gamma})"), -halfwidth, halfwidth, 3, f))
    }

    /// One-sided exponential density `y⁻¹ e^{−t/y}` on `t ≥ 0`. Not smooth
    /// at 0, so only the value (order 0) is exposed.
    pub fn exponential(y: f64) -> Result<Self, TpError> {
        if !(y > 0.0) {
            return Err(TpError::BadStep);
        }
        let f: DensityFn = Arc::new(move |order, t| match order {
            0 => {
                if t >= 0.0 {
                    (-t / y).exp() / y
                } else {
                    0.0
                }
            }
            _ => f64::NAN,
        });
        Ok(Self::from_analytic(format!("exponential({y})"), 0.0, 40.0 * y, 0, f))
    }

    /// Convolution of `normal(gamma)` and `exponential(y)` in closed form
    /// (exponentially modified Gaussian).
    pub fn normal_exponential(gamma: f64, y: f64) -> Result<Self, TpError> {
        if !(gamma > 0.0) || !(y > 0.0) {
            return Err(TpError::BadStep);
        }
        let f: DensityFn = Arc::new(move |order, t| match order {
            0 => {
                let z = (gamma / y - t) / (2.0 * gamma).sqrt();
                // guard the exp against overflow in the far left tail where
                // erfc ~ 2 and the prefactor would blow up
                let ln_pref = gamma / (2.0 * y * y) - t / y;
                if z > 25.0 {
                    // left tail: use erfc(z) ~ e^{-z²}/(z√π) in log space
                    let ln = ln_pref - z * z - (z * std::f64::consts::PI.sqrt()).ln();
                    (ln - (2.0 * y).ln()).exp()
                } else {
                    (ln_pref.exp() / (2.0 * y)) * erfc(z)
                }
            }
            _ => f64::NAN,
        });
        let halfwidth = 8.0 * gamma.sqrt() + 40.0 * y;
        Ok(Self::from_analytic(
            format!("normal({gamma})*exponential({y})"),
            -8.0 * gamma.sqrt(),
            halfwidth,
            0,
            f,
        ))
    }

    /// Convolution of two one-sided exponentials in closed form
    /// (hypoexponential; Gamma(2) when the parameters coincide).
    pub fn exponential_pair(y1: f64, y2: f64) -> Result<Self, TpError> {
        if !(y1 > 0.0) || !(y2 > 0.0) {
            return Err(TpError::BadStep);
        }
        let f: DensityFn = Arc::new(move |order, t| match order {
            0 => {
                if t < 0.0 {
                    0.0
                } else if (y1 - y2).abs() < 1e-12 * y1.max(y2) {
                    t * (-t / y1).exp() / (y1 * y1)
                } else {
                    ((-t / y1).exp() - (-t / y2).exp()) / (y1 - y2)
                }
            }
            _ => f64::NAN,
        });
        Ok(Self::from_analytic(
            format!("exponential({y1})*exponential({y2})"),
            0.0,
            40.0 * (y1 + y2),
            0,
            f,
        ))
    }

    /// Symmetric two-bump Gaussian mixture
    /// `(ψ_γ(t−sep) + ψ_γ(t+sep))/2` — not totally positive once the modes
    /// separate; the standard order-2 counterexample.
    pub fn bimodal(gamma: f64, sep: f64) -> Result<Self, TpError> {
        if !(gamma > 0.0) {
            return Err(TpError::BadStep);
        }
        let norm = 0.5 / (2.0 * std::f64::consts::PI * gamma).sqrt();
        let f: DensityFn = Arc::new(move |order, t| {
            let bump = |u: f64, order: usize| -> f64 {
                let base = (-u * u / (2.0 * gamma)).exp();
                match order {
                    0 => base,
                    1 => -u / gamma * base,
                    2 => (u * u / (gamma * gamma) - 1.0 / gamma) * base,
                    3 => (-u * u * u / (gamma * gamma * gamma) + 3.0 * u / (gamma * gamma)) * base,
                    _ => f64::NAN,
                }
            };
            norm * (bump(t - sep, order) + bump(t + sep, order))
        });
        let halfwidth = sep + 8.0 * gamma.sqrt();
        Ok(Self::from_analytic(format!("bimodal({gamma},{sep})"), -halfwidth, halfwidth, 3, f))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len() - 1) as f64
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.values.len()).map(|i| self.start + i as f64 * self.step).collect()
    }

    pub fn width(&self) -> f64 {
        self.end() - self.start
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// Trapezoid mass of the tabulation.
    pub fn mass(&self) -> f64 {
        let mut acc = 0.0;
        for w in self.values.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * self.step;
        }
        acc
    }

    fn interpolate_table(&self, table: &[f64], t: f64) -> f64 {
        let pos = (t - self.start) / self.step;
        if pos < 0.0 || pos > (table.len() - 1) as f64 {
            return 0.0;
        }
        let i = (pos.floor() as usize).min(table.len() - 2);
        let frac = pos - i as f64;
        table[i] * (1.0 - frac) + table[i + 1] * frac
    }

    fn interpolate(&self, t: f64) -> f64 {
        self.interpolate_table(&self.values, t)
    }

    /// Density value: analytic when available, linear interpolation of the
    /// tabulation otherwise (zero outside the grid).
    pub fn eval(&self, t: f64) -> f64 {
        if let Some((_, f)) = &self.analytic {
            f(0, t)
        } else {
            self.interpolate(t)
        }
    }

    /// Like [`TabulatedDensity::eval`] but errors when `t` falls outside an
    /// interpolation-backed tabulation whose edge value is not negligible.
    fn eval_checked(&self, t: f64) -> Result<f64, TpError> {
        if self.analytic.is_some() {
            return Ok(self.eval(t));
        }
        if t < self.start || t > self.end() {
            let edge = if t < self.start { self.values[0] } else { *self.values.last().unwrap() };
            if edge > EDGE_NEGLIGIBLE * self.max_value() {
                return Err(TpError::InsufficientCoverage {
                    at: t,
                    start: self.start,
                    end: self.end(),
                });
            }
            return Ok(0.0);
        }
        Ok(self.interpolate(t))
    }

    /// d-th derivative: analytic when the closure covers it, then any
    /// attached derivative table, otherwise 4th-order central differences
    /// with step `h = 1e−3 · width` (on the analytic value when present,
    /// else on the interpolant).
    pub fn derivative(&self, order: usize, t: f64) -> f64 {
        if order == 0 {
            return self.eval(t);
        }
        if let Some((max_order, f)) = &self.analytic {
            if order <= *max_order {
                return f(order, t);
            }
        }
        if order <= self.derivative_tables.len() {
            return self.interpolate_table(&self.derivative_tables[order - 1], t);
        }
        let h = 1e-3 * self.width();
        let f = |u: f64| self.eval(u);
        match order {
            1 => (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h),
            2 => {
                (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h)
                    - f(t - 2.0 * h))
                    / (12.0 * h * h)
            }
            3 => {
                (f(t - 3.0 * h) / 8.0 - f(t - 2.0 * h) + 13.0 * f(t - h) / 8.0
                    - 13.0 * f(t + h) / 8.0
                    + f(t + 2.0 * h)
                    - f(t + 3.0 * h) / 8.0)
                    / (h * h * h)
            }
            _ => f64::NAN,
        }
    }

    /// Roundoff/interpolation noise estimate for derivative evaluation of
    /// the given order (zero when analytic).
    fn derivative_noise(&self, order: usize) -> f64 {
        if order == 0 {
            return 0.0;
        }
        if let Some((max_order, _)) = &self.analytic {
            if order <= *max_order {
                return 0.0;
            }
        }
        if order <= self.derivative_tables.len() {
            // only the table's own interpolation wiggle remains
            let table = &self.derivative_tables[order - 1];
            let mut second = 0.0f64;
            let mut largest = 0.0f64;
            for w in table.windows(3) {
                second = second.max((w[2] - 2.0 * w[1] + w[0]).abs());
                largest = largest.max(w[1].abs());
            }
            return second / 8.0 + f64::EPSILON * largest;
        }
        let h = 1e-3 * self.width();
        // |coefficient| sums of the stencils above
        let coeff_sum = match order {
            1 => 18.0 / 12.0,
            2 => 64.0 / 12.0,
            3 => 44.0 / 8.0,
            _ => 10.0,
        };
        let eval_noise = if self.analytic.is_some() {
            f64::EPSILON * self.max_value()
        } else {
            // linear interpolation error ~ step² max|φ''| / 8, estimated
            // from the table's second differences
            let mut second = 0.0f64;
            for w in self.values.windows(3) {
                second = second.max((w[2] - 2.0 * w[1] + w[0]).abs());
            }
            second / 8.0 + f64::EPSILON * self.max_value()
        };
        coeff_sum * eval_noise / h.powi(order as i32)
    }

    /// Two-column CSV `t,phi` of the tabulation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,phi\n");
        for (i, v) in self.values.iter().enumerate() {
            let t = self.start + i as f64 * self.step;
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }

    /// Parses a two-column CSV (optional `t,phi` header) on a uniform grid.
    pub fn from_csv(text: &str) -> Result<Self, TpError> {
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('t')) {
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| TpError::Parse(format!("line {}: expected 't,phi'", lineno + 1)))?;
            let t: f64 = a
                .trim()
                .parse()
                .map_err(|_| TpError::Parse(format!("line {}: bad t", lineno + 1)))?;
            let v: f64 = b
                .trim()
                .parse()
                .map_err(|_| TpError::Parse(format!("line {}: bad value", lineno + 1)))?;
            grid.push(t);
            values.push(v);
        }
        Self::from_grid(&grid, &values)
    }
}

/// Result of a determinant sign test at one order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TpOrderReport {
    pub order: usize,
    pub trials: usize,
    pub min_det: f64,
    /// Negative tolerance the minimum is compared against.
    pub tolerance: f64,
    pub pass: bool,
}

/// Per-order minimum determinants and the overall verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpReport {
    pub density: String,
    pub orders: Vec<TpOrderReport>,
    pub pass: bool,
}

fn det_real(mat: &mut [f64], k: usize) -> f64 {
    let mut det = 1.0f64;
    for col in 0..k {
        let mut pivot = col;
        let mut best = mat[col * k + col].abs();
        for row in col + 1..k {
            if mat[row * k + col].abs() > best {
                best = mat[row * k + col].abs();
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
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
            if factor == 0.0 {
                continue;
            }
            for j in col..k {
                mat[row * k + j] -= factor * mat[col * k + j];
            }
        }
    }
    det
}

/// Sorted uniform draw of `k` points over `[lo, hi]` with a minimum
/// normalized gap; nearly coincident draws are rejected and redrawn.
fn sorted_grid(rng: &mut ChaCha12Rng, k: usize, lo: f64, hi: f64) -> Vec<f64> {
    let width = hi - lo;
    loop {
        let mut pts: Vec<f64> = (0..k).map(|_| rng.random_range(lo..hi)).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ok = pts.windows(2).all(|w| (w[1] - w[0]) / width >= GRID_GAP_FLOOR);
        if ok {
            return pts;
        }
    }
}

pub const TP_MAX_ORDER: usize = 5;
pub const ETP_MAX_ORDER: usize = 4;

/// Total-positivity test: for each `k ≤ order`, draws `trials` random
/// ascending grids `t`, `s` over the support and records the minimum of
/// `det [φ(t_i − s_j)]`. PASS at order `k` means
/// `min ≥ −1e−10 · (max φ)^k`.
pub fn tp_test(
    density: &TabulatedDensity,
    order: usize,
    trials: usize,
    seed: u64,
) -> Result<TpReport, TpError> {
    if order == 0 || order > TP_MAX_ORDER {
        return Err(TpError::BadOrder { order, max: TP_MAX_ORDER });
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let scale = density.max_value();
    let (lo, hi) = (density.start(), density.end());
    let mut orders = Vec::with_capacity(order);
    for k in 1..=order {
        let mut min_det = f64::INFINITY;
        for _ in 0..trials {
            let t = sorted_grid(&mut rng, k, lo, hi);
            let s = sorted_grid(&mut rng, k, lo, hi);
            let mut mat = vec![0.0f64; k * k];
            for i in 0..k {
                for j in 0..k {
                    mat[i * k + j] = density.eval_checked(t[i] - s[j])?;
                }
            }
            min_det = min_det.min(det_real(&mut mat, k));
        }
        let tolerance = 1e-10 * scale.powi(k as i32);
        orders.push(TpOrderReport { order: k, trials, min_det, tolerance, pass: min_det >= -tolerance });
    }
    let pass = orders.iter().all(|o| o.pass);
    Ok(TpReport { density: density.label().to_string(), orders, pass })
}

/// Extended total-positivity test on Wronskian-type determinants
/// `det [φ^{(i−1)}(v_j)]` over descending points: the supplied explicit
/// tuples plus `trials` random descending grids per order. The tolerance
/// at order `k` is `1e−10 · Π_i max_j |row_i|` (which reduces to the
/// tp_test form when only the density row is involved). A minimum that is
/// negative but within the derivative-estimation noise band is reported
/// as an error rather than called either way.
pub fn etp_test(
    density: &TabulatedDensity,
    order: usize,
    explicit_points: &[Vec<f64>],
    trials: usize,
    seed: u64,
) -> Result<TpReport, TpError> {
    if order == 0 || order > ETP_MAX_ORDER {
        return Err(TpError::BadOrder { order, max: ETP_MAX_ORDER });
    }
    for tuple in explicit_points {
        if tuple.windows(2).any(|w| w[0] <= w[1]) {
            return Err(TpError::PointsNotDescending);
        }
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    // keep clear of the support edges so the difference stencils stay inside
    let margin = 4e-3 * density.width();
    let (lo, hi) = (density.start() + margin, density.end() - margin);
    let mut orders = Vec::with_capacity(order);
    for k in 1..=order {
        let mut grids: Vec<Vec<f64>> = explicit_points
            .iter()
            .filter(|t| t.len() == k)
            .cloned()
            .collect();
        for _ in 0..trials {
            let mut g = sorted_grid(&mut rng, k, lo, hi);
            g.reverse();
            grids.push(g);
        }
        let mut min_det = f64::INFINITY;
        let mut row_scale = vec![0.0f64; k];
        let mut evaluated = Vec::with_capacity(grids.len());
        for v in &grids {
            let mut mat = vec![0.0f64; k * k];
            for i in 0..k {
                for j in 0..k {
                    let entry = density.derivative(i, v[j]);
                    mat[i * k + j] = entry;
                    row_scale[i] = row_scale[i].max(entry.abs());
                }
            }
            evaluated.push(mat);
        }
        let scale_product: f64 = row_scale.iter().map(|&r| r.max(f64::MIN_POSITIVE)).product();
        let tolerance = 1e-10 * scale_product;
        // determinant-level noise from derivative estimation: worst entry
        // noise times the complementary row scales
        let mut det_noise = 0.0f64;
        for i in 1..k {
            let cofactor: f64 = row_scale
                .iter()
                .enumerate()
                .filter(|&(r, _)| r != i)
                .map(|(_, &v)| v.max(f64::MIN_POSITIVE))
                .product();
            det_noise = det_noise.max(density.derivative_noise(i) * cofactor * k as f64);
        }
        for mut mat in evaluated {
            min_det = min_det.min(det_real(&mut mat, k));
        }
        if grids.is_empty() {
            min_det = 0.0;
        }
        let pass = min_det >= -tolerance;
        // a negative minimum inside the noise band is undecidable: the
        // estimation error is reported rather than guessed away
        if !pass && min_det >= -(tolerance + det_noise) {
            return Err(TpError::DerivativeNoise { order: k, noise: det_noise, budget: tolerance });
        }
        orders.push(TpOrderReport { order: k, trials: grids.len(), min_det, tolerance, pass });
    }
    let pass = orders.iter().all(|o| o.pass);
    Ok(TpReport { density: density.label().to_string(), orders, pass })
}

/// Discrete convolution of two densities tabulated with a common step,
/// rescaled by the step. The result spans the sum of the supports.
pub fn convolve_densities(
    f: &TabulatedDensity,
    g: &TabulatedDensity,
) -> Result<TabulatedDensity, TpError> {
    let dt = f.step();
    if ((g.step() - dt) / dt).abs() > 1e-9 {
        return Err(TpError::StepMismatch { left: dt, right: g.step() });
    }
    let nf = f.values().len();
    let ng = g.values().len();
    // trapezoid endpoint weights keep mass exact for edge-supported inputs
    let weighted = |values: &[f64]| -> Vec<f64> {
        let mut w = values.to_vec();
        w[0] *= 0.5;
        *w.last_mut().unwrap() *= 0.5;
        w
    };
    let fw = weighted(f.values());
    let gw = weighted(g.values());
    let mut values = vec![0.0f64; nf + ng - 1];
    for (i, &fv) in fw.iter().enumerate() {
        if fv == 0.0 {
            continue;
        }
        for (j, &gv) in gw.iter().enumerate() {
            values[i + j] += fv * gv;
        }
    }
    for v in &mut values {
        *v *= dt;
    }
    let mut out = TabulatedDensity::from_values(f.start() + g.start(), dt, values)?;
    out.label = format!("{}*{}", f.label(), g.label());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_density_tp_low_orders() {
        let normal = TabulatedDensity::normal(1.0).unwrap();
        let report = tp_test(&normal, 4, 60, 42).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.orders.len(), 4);
    }

    #[test]
    fn exponential_density_tp() {
        let exp = TabulatedDensity::exponential(0.5).unwrap();
        let report = tp_test(&exp, 4, 60, 43).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn bimodal_fails_order_two() {
        let mix = TabulatedDensity::bimodal(0.1, 3.0).unwrap();
        let report = tp_test(&mix, 2, 100, 44).unwrap();
        assert!(report.orders[0].pass, "order 1 is just nonnegativity");
        assert!(!report.orders[1].pass, "{report:?}");
        assert!(!report.pass);
    }

    #[test]
    fn tp_rejects_bad_order() {
        let normal = TabulatedDensity::normal(1.0).unwrap();
        assert!(matches!(tp_test(&normal, 0, 5, 0), Err(TpError::BadOrder { .. })));
        assert!(matches!(tp_test(&normal, 9, 5, 0), Err(TpError::BadOrder { .. })));
    }

    #[test]
    fn coverage_error_on_truncated_tabulation() {
        // a tabulation cut off mid-bulk cannot answer difference queries
        let normal = TabulatedDensity::normal(1.0).unwrap();
        let truncated = TabulatedDensity::from_values(
            0.0,
            normal.step(),
            normal.values()[500..700].to_vec(),
        )
        .unwrap();
        let err = tp_test(&truncated, 2, 40, 7);
        assert!(matches!(err, Err(TpError::InsufficientCoverage { .. })));
    }

    #[test]
    fn etp_order_one_is_nonnegativity() {
        let normal = TabulatedDensity::normal(0.7).unwrap();
        let report = etp_test(&normal, 1, &[], 50, 45).unwrap();
        assert!(report.pass);
        assert!(report.orders[0].min_det >= 0.0);
    }

    #[test]
    fn etp_normal_passes_order_three() {
        let normal = TabulatedDensity::normal(1.0).unwrap();
        let explicit = vec![vec![1.0, 0.0, -1.0], vec![2.0, 0.5, -0.7]];
        let report = etp_test(&normal, 3, &explicit, 60, 46).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn etp_rejects_unsorted_points() {
        let normal = TabulatedDensity::normal(1.0).unwrap();
        assert!(matches!(
            etp_test(&normal, 2, &[vec![0.0, 1.0]], 5, 0),
            Err(TpError::PointsNotDescending)
        ));
    }

    #[test]
    fn convolution_gaussian_semigroup() {
        // ψ_γ * ψ_δ = ψ_{γ+δ}
        let step = 0.004;
        let halfwidth = 8.0f64;
        let count = (2.0 * halfwidth / step).round() as usize + 1;
        let tab = |gamma: f64| {
            let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
            TabulatedDensity::from_values(
                -halfwidth,
                step,
                (0..count)
                    .map(|i| {
                        let t = -halfwidth + i as f64 * step;
                        norm * (-t * t / (2.0 * gamma)).exp()
                    })
                    .collect(),
            )
            .unwrap()
        };
        let conv = convolve_densities(&tab(0.6), &tab(0.9)).unwrap();
        assert!((conv.mass() - 1.0).abs() < 1e-3, "mass = {}", conv.mass());
        let want = tab(1.5);
        // compare on the overlap of the two grids
        let mut worst = 0.0f64;
        for (i, &t) in want.grid().iter().enumerate() {
            worst = worst.max((conv.eval(t) - want.values()[i]).abs());
        }
        assert!(worst < 1e-4, "sup gap = {worst}");
    }

    #[test]
    fn convolution_approximate_identity() {
        let step = 0.004;
        let normal = {
            let gamma = 0.5f64;
            let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
            let count = (12.0 / step) as usize + 1;
            TabulatedDensity::from_values(
                -6.0,
                step,
                (0..count)
                    .map(|i| {
                        let t = -6.0 + i as f64 * step;
                        norm * (-t * t / (2.0 * gamma)).exp()
                    })
                    .collect(),
            )
            .unwrap()
        };
        // narrow spike: a steep Gaussian acts as an approximate identity
        let narrow = {
            let gamma = 1e-4f64;
            let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
            let count = (0.4 / step) as usize + 1;
            TabulatedDensity::from_values(
                -0.2,
                step,
                (0..count)
                    .map(|i| {
                        let t = -0.2 + i as f64 * step;
                        norm * (-t * t / (2.0 * gamma)).exp()
                    })
                    .collect(),
            )
            .unwrap()
        };
        let conv = convolve_densities(&normal, &narrow).unwrap();
        let mut worst = 0.0f64;
        for t in [-2.0, -0.5, 0.0, 0.8, 1.9] {
            worst = worst.max((conv.eval(t) - normal.eval(t)).abs());
        }
        assert!(worst < 1e-2, "sup gap = {worst}");
    }

    #[test]
    fn convolution_step_mismatch() {
        let a = TabulatedDensity::from_values(0.0, 0.01, vec![1.0; 100]).unwrap();
        let b = TabulatedDensity::from_values(0.0, 0.02, vec![1.0; 100]).unwrap();
        assert!(matches!(convolve_densities(&a, &b), Err(TpError::StepMismatch { .. })));
    }

    #[test]
    fn discrete_convolution_passes_tp_order_three() {
        // exponential * normal through the discrete route
        let step = 0.01;
        let normal = {
            let gamma = 1.0f64;
            let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
            let count = (16.0 / step) as usize + 1;
            TabulatedDensity::from_values(
                -8.0,
                step,
                (0..count)
                    .map(|i| {
                        let t = -8.0 + i as f64 * step;
                        norm * (-t * t / (2.0 * gamma)).exp()
                    })
                    .collect(),
            )
            .unwrap()
        };
        let exp = {
            let y = 0.5f64;
            let count = (20.0 / step) as usize + 1;
            TabulatedDensity::from_values(
                0.0,
                step,
                (0..count)
                    .map(|i| {
                        let t = i as f64 * step;
                        (-t / y).exp() / y
                    })
                    .collect(),
            )
            .unwrap()
        };
        let conv = convolve_densities(&exp, &normal).unwrap();
        assert!((conv.mass() - 1.0).abs() < 1e-3);
        let report = tp_test(&conv, 3, 60, 48).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn determinant_sign_structure() {
        // spot-check of the convolution composition sign claim: for TP φ, ψ,
        // ordered t, s and arbitrary distinct u, both factor determinants
        // carry the sign of Π_{k>l}(u_k − u_l)
        use rand::{Rng, SeedableRng};
        let normal = TabulatedDensity::normal(0.8).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(49);
        for _ in 0..50 {
            let k = rng.random_range(2..=3usize);
            let t = {
                let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            };
            let s = {
                let mut v: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            };
            let u: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
            let mut vandermonde_sign = 1.0f64;
            for kk in 0..k {
                for ll in 0..kk {
                    vandermonde_sign *= (u[kk] - u[ll]).signum();
                }
            }
            let mut m1 = vec![0.0; k * k];
            let mut m2 = vec![0.0; k * k];
            for i in 0..k {
                for j in 0..k {
                    m1[i * k + j] = normal.eval(t[i] - u[j]);
                    m2[i * k + j] = normal.eval(u[i] - s[j]);
                }
            }
            let d1 = det_real(&mut m1, k);
            let d2 = det_real(&mut m2, k);
            let floor = 1e-12;
            if d1.abs() > floor {
                assert!(d1 * vandermonde_sign > 0.0, "d1 = {d1}, sign = {vandermonde_sign}");
            }
            if d2.abs() > floor {
                assert!(d2 * vandermonde_sign > 0.0, "d2 = {d2}");
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let normal = TabulatedDensity::normal(1.0).unwrap();
        let csv = normal.to_csv();
        let back = TabulatedDensity::from_csv(&csv).unwrap();
        assert_eq!(back.values().len(), normal.values().len());
        assert!((back.step() - normal.step()).abs() < 1e-12);
        // the round-trip loses the analytic closure; only interpolation accuracy remains
        assert!((back.eval(0.3) - normal.eval(0.3)).abs() < 1e-4);
        assert!(TabulatedDensity::from_csv("nonsense").is_err());
    }

    #[test]
    fn mass_near_unit_for_families() {
        for density in [
            TabulatedDensity::normal(0.5).unwrap(),
            TabulatedDensity::exponential(0.7).unwrap(),
            TabulatedDensity::normal_exponential(0.8, 0.5).unwrap(),
            TabulatedDensity::exponential_pair(0.4, 0.9).unwrap(),
            TabulatedDensity::bimodal(0.1, 3.0).unwrap(),
        ] {
            let mass = density.mass();
            assert!((mass - 1.0).abs() < 1e-4, "{density:?} mass = {mass}");
        }
    }

    #[test]
    fn emg_matches_quadrature() {
        // closed form vs direct convolution integral at a few points
        let gamma = 0.8;
        let y = 0.5;
        let emg = TabulatedDensity::normal_exponential(gamma, y).unwrap();
        let norm = 1.0 / (2.0 * std::f64::consts::PI * gamma).sqrt();
        for t in [-1.5, -0.2, 0.0, 0.7, 2.5] {
            let quad = crate::quad::adaptive_simpson(
                |s| ((-s / y).exp() / y) * norm * (-(t - s) * (t - s) / (2.0 * gamma)).exp(),
                0.0,
                40.0 * y,
                1e-12,
            )
            .unwrap();
            assert!((emg.eval(t) - quad).abs() < 1e-10, "t={t}: {} vs {quad}", emg.eval(t));
        }
    }
}
