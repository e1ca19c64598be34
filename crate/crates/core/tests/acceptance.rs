//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test -p orbint --test acceptance -- --nocapture`).

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use orbint::convergence::{estimate_limits, verify_convergence, SpectrumSequence};
use orbint::ergodic::{charfn_f1, density_diag, log_expansion, taylor_coeffs_f1, ErgodicParams};
use orbint::orbital::{orbital_charfn_det, orbital_charfn_series, taylor_coeff_onevar};
use orbint::sampling::{
    derive_stream_seed, empirical_charfn, SamplerSpec, SamplerVariant,
};
use orbint::splines::{approx_fourier, approx_fourier_quadrature, bspline_cdf, fourier_quadrature, KnotVector};
use orbint::symfunc::{dim_sym, schur_bialternant, schur_jacobi_trudi, power_sum};
use orbint::tp::{tp_test, TabulatedDensity};
use orbint::{EvalPoint, Partition, Spectrum};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Distinct entries in [-1, 1] with pairwise separation >= 0.05.
fn separated_entries(rng: &mut ChaCha12Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut ok = true;
        for i in 0..n {
            for j in i + 1..n {
                if (v[i] - v[j]).abs() < 0.05 {
                    ok = false;
                }
            }
        }
        if ok {
            return v;
        }
    }
}

fn ks_statistic(mut draws: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = draws.len() as f64;
    let mut ks = 0.0f64;
    for (i, &x) in draws.iter().enumerate() {
        let f = cdf(x);
        ks = ks.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    ks
}

#[test]
fn criterion_01_dual_route_orbital_integral() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let n = rng.random_range(2..=6usize);
        let spectrum = Spectrum::new(separated_entries(&mut rng, n)).unwrap();
        let point = EvalPoint::new(separated_entries(&mut rng, n)).unwrap();
        let series = orbital_charfn_series(&spectrum, &point, 40).unwrap();
        let det = orbital_charfn_det(&spectrum, &point).unwrap();
        let diff = (series.value - det).norm();
        assert!(diff <= 1e-8, "case {case}: n={n} |series - det| = {diff:.3e}");
        worst = worst.max(diff);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "acceptance 01 dual-route orbital integral: PASS (worst gap {worst:.2e}, {elapsed:.2?})"
    );
}

/// Brute-force standard-tableau count by peeling removable corners.
fn count_syt(shape: &[u32], memo: &mut HashMap<Vec<u32>, u64>) -> u64 {
    if shape.is_empty() {
        return 1;
    }
    if let Some(&v) = memo.get(shape) {
        return v;
    }
    let mut total = 0;
    for i in 0..shape.len() {
        if shape[i] > 0 && (i + 1 == shape.len() || shape[i] > shape[i + 1]) {
            let mut smaller = shape.to_vec();
            smaller[i] -= 1;
            while smaller.last() == Some(&0) {
                smaller.pop();
            }
            total += count_syt(&smaller, memo);
        }
    }
    memo.insert(shape.to_vec(), total);
    total
}

#[test]
fn criterion_02_symmetric_function_identities() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1002);

    // p_1^m = sum over mu of dim(mu) s_mu at 50 random complex points
    for _ in 0..50 {
        let n = rng.random_range(1..=5usize);
        let values: Vec<Complex64> = (0..n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        for m in 1..=6u32 {
            let lhs = power_sum(1, &values).powu(m);
            let mut rhs = Complex64::ZERO;
            for mu in Partition::all_of_weight_bounded(m, n) {
                rhs += dim_sym(&mu).unwrap().to_f64().unwrap() * schur_jacobi_trudi(&mu, &values);
            }
            assert!(
                (lhs - rhs).norm() <= 1e-11 * lhs.norm().max(1.0),
                "m={m} n={n}: {lhs} vs {rhs}"
            );
        }
    }

    // Jacobi-Trudi vs bialternant for |mu| <= 6, n <= 5
    for _ in 0..60 {
        let n = rng.random_range(1..=5usize);
        let values: Vec<Complex64> =
            separated_entries(&mut rng, n).iter().map(|&v| c(v, 0.0)).collect();
        for m in 0..=6u32 {
            for mu in Partition::all_of_weight_bounded(m, n) {
                let bi = schur_bialternant(&mu, &values).unwrap();
                let jt = schur_jacobi_trudi(&mu, &values);
                assert!(
                    (bi - jt).norm() <= 1e-10 * jt.norm().max(1.0),
                    "mu={mu}: {bi} vs {jt}"
                );
            }
        }
    }

    // hook-length dimension vs tableau enumeration for |mu| <= 8
    let mut memo = HashMap::new();
    for m in 0..=8u32 {
        for mu in Partition::all_of_weight(m) {
            assert_eq!(
                dim_sym(&mu).unwrap().to_u64(),
                Some(count_syt(mu.parts(), &mut memo)),
                "dim mismatch at {mu}"
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("acceptance 02 symmetric-function identities: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_03_spline_duality_ks() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1003);
    let random_knots: Vec<f64> = loop {
        let mut v: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if KnotVector::new(v.clone()).is_ok()
            && v.windows(2).all(|w| w[1] - w[0] >= 0.05)
        {
            break v;
        }
    };
    let knot_sets = [vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 2.0, 4.0, 7.0], random_knots];
    let count = 200_000usize;
    for (set_idx, knots) in knot_sets.iter().enumerate() {
        let kv = KnotVector::new(knots.clone()).unwrap();
        let spectrum = Spectrum::new(knots.clone()).unwrap();
        let spec = SamplerSpec::new(
            SamplerVariant::Orbital(spectrum),
            knots.len(),
            derive_stream_seed(1003, set_idx as u64),
        )
        .unwrap();
        let draws: Vec<f64> = spec.stream().take(count).map(|s| s.entry(0, 0).re).collect();
        let ks = ks_statistic(draws, |t| bspline_cdf(&kv, t));
        assert!(ks < 0.01, "knots {knots:?}: KS = {ks}");
        println!("  knots {knots:?}: KS = {ks:.4}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("acceptance 03 spline-sampler duality: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_04_convergence_finite_rank() {
    let start = Instant::now();
    let seq = SpectrumSequence::linear(&[0.8, -0.5]);
    let est = estimate_limits(&seq, &[25, 50, 100, 200], 20, 1e-3).unwrap();
    let params = est.params();
    assert!((params.gamma1() - 0.3).abs() < 1e-10);
    let a_grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
    let errors = verify_convergence(&seq, &params, &[25, 200], &a_grid).unwrap();
    assert!(errors[1] < 0.05, "error at n=200 is {}", errors[1]);
    assert!(errors[1] < errors[0], "no decay: {errors:?}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "acceptance 04 finite-rank convergence: PASS (err25 = {:.4}, err200 = {:.4}, {elapsed:.2?})",
        errors[0], errors[1]
    );
}

#[test]
fn criterion_05_convergence_gaussian() {
    let start = Instant::now();
    let seq = SpectrumSequence::gaussian(1.0);
    // snapping tolerance chosen at the sqrt(γ/n) ≈ 0.07 resolution of n = 200
    let est = estimate_limits(&seq, &[50, 100, 200], 20, 0.1).unwrap();
    assert!(est.gamma1.value.abs() < 0.02, "gamma1 = {}", est.gamma1.value);
    assert!((est.gamma2 - 1.0).abs() < 0.05, "gamma2 = {}", est.gamma2);
    assert!(est.x_pos.iter().chain(est.x_neg.iter()).all(|e| e.value.abs() < 0.02));
    assert!(est.x_pos.is_empty() && est.x_neg.is_empty());
    let params = ErgodicParams::gaussian(1.0).unwrap();
    let a_grid: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
    let errors = verify_convergence(&seq, &params, &[200], &a_grid).unwrap();
    assert!(errors[0] < 0.05, "max |f_200 - e^{{-a^2/2}}| = {}", errors[0]);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "acceptance 05 gaussian convergence: PASS (err200 = {:.4}, {elapsed:.2?})",
        errors[0]
    );
}

#[test]
fn criterion_06_elementary_charfns_monte_carlo() {
    let start = Instant::now();
    let count = 100_000usize;
    let cases: Vec<(SamplerSpec, Box<dyn Fn(f64) -> Complex64>, &str)> = vec![
        (
            SamplerSpec::new(SamplerVariant::Dirac(0.7), 3, 2001).unwrap(),
            Box::new(|a: f64| c(0.0, 0.7 * a).exp()),
            "dirac(0.7)",
        ),
        (
            SamplerSpec::new(SamplerVariant::Gaussian(1.0), 3, 2002).unwrap(),
            Box::new(|a: f64| c((-a * a / 2.0).exp(), 0.0)),
            "gaussian(1.0)",
        ),
        (
            SamplerSpec::new(SamplerVariant::RankOne(0.5), 3, 2003).unwrap(),
            Box::new(|a: f64| c(0.0, -0.5 * a).exp() / c(1.0, -0.5 * a)),
            "rank_one(0.5)",
        ),
    ];
    for (spec, closed_form, name) in &cases {
        for a in [0.5, 1.0, 2.0] {
            let point = EvalPoint::scalar(a);
            let est = empirical_charfn(spec.stream().take(count), &point).unwrap();
            let sigmas = est.sigmas_from(closed_form(a));
            assert!(sigmas <= 3.0, "{name} at a={a}: {sigmas:.2} standard errors");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!("acceptance 06 elementary-measure characteristic functions: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_07_nonneg_support_corners() {
    let start = Instant::now();
    let spec = SamplerSpec::new(
        SamplerVariant::FiniteRank { shift: 0.2, weights: vec![0.3, 0.1] },
        20,
        2007,
    )
    .unwrap();
    let mut worst = f64::INFINITY;
    for sample in spec.stream().take(1000) {
        let min_eig = sample.spectrum()[0];
        assert!(min_eig >= -1e-8, "negative corner eigenvalue {min_eig}");
        worst = worst.min(min_eig);
    }
    // the predicate agrees: gamma1 = z + sum x >= sum x
    let params = ErgodicParams::unitary(0.2 + 0.4, 0.0, &[0.3, 0.1]).unwrap();
    assert!(orbint::ergodic::is_nonneg_supported(&params));
    let elapsed = start.elapsed();
    println!(
        "acceptance 07 nonnegative-support corners: PASS (min eigenvalue {worst:.3}, {elapsed:.2?})"
    );
}

#[test]
fn criterion_08_total_positivity_suite() {
    let start = Instant::now();
    let trials = 100;
    let densities = [
        TabulatedDensity::normal(1.0).unwrap(),
        TabulatedDensity::exponential(0.5).unwrap(),
        // pairwise convolutions in closed form
        TabulatedDensity::normal(2.0).unwrap(),
        TabulatedDensity::normal_exponential(1.0, 0.5).unwrap(),
        TabulatedDensity::exponential_pair(0.5, 0.5).unwrap(),
    ];
    for density in &densities {
        let report = tp_test(density, 4, trials, 2008).unwrap();
        assert!(report.pass, "{report:?}");
        let min = report.orders.iter().map(|o| o.min_det).fold(f64::INFINITY, f64::min);
        println!("  {}: min det {min:.3e} over orders <= 4", report.density);
    }
    let bimodal = TabulatedDensity::bimodal(0.1, 3.0).unwrap();
    let report = tp_test(&bimodal, 2, trials, 2008).unwrap();
    assert!(!report.orders[1].pass, "bimodal mixture must fail at order 2: {report:?}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("acceptance 08 total positivity suite: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_09_approximate_fourier() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1009);
    let a_grid: Vec<f64> = (-10..=10).map(|i| i as f64 * 0.2).collect();
    for case in 0..20 {
        let n = rng.random_range(3..=10usize);
        let knots: Vec<f64> = loop {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            v.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if v.windows(2).all(|w| w[1] - w[0] >= 0.02) {
                break v;
            }
        };
        let kv = KnotVector::new(knots).unwrap();
        for &a in &a_grid {
            let product = approx_fourier(&kv, a);
            let quad = approx_fourier_quadrature(&kv, a, 1e-9).unwrap();
            let gap = (product - quad).norm();
            assert!(gap <= 1e-6, "case {case} a={a}: gap {gap:.2e}");
        }
    }
    // the e^{iat} replacement gap shrinks along the scaled family
    let gap_for = |n: usize| -> f64 {
        let knots: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let kv = KnotVector::new(knots).unwrap();
        a_grid
            .iter()
            .map(|&a| {
                (approx_fourier(&kv, a) - fourier_quadrature(&kv, a, 1e-9).unwrap()).norm()
            })
            .fold(0.0, f64::max)
    };
    let gap10 = gap_for(10);
    let gap50 = gap_for(50);
    assert!(gap50 < gap10, "gap at n=50 ({gap50:.3e}) not below n=10 ({gap10:.3e})");
    let elapsed = start.elapsed();
    println!(
        "acceptance 09 approximate Fourier transform: PASS (gap10 = {gap10:.3e}, gap50 = {gap50:.3e}, {elapsed:.2?})"
    );
}

#[test]
fn criterion_10_moment_bridge() {
    let start = Instant::now();
    let y = 0.7f64;

    // linear(y) family: scaled coefficients against the limit object
    let seq = SpectrumSequence::linear(&[y]);
    let spectrum = seq.spectrum(400).unwrap();
    let limit = ErgodicParams::unitary(y, 0.0, &[y]).unwrap();
    let limit_coeffs = taylor_coeffs_f1(&limit, 6);
    for m in 0..=6usize {
        let finite = taylor_coeff_onevar(&spectrum, m);
        let rel = (finite.scaled - limit_coeffs[m]).norm() / limit_coeffs[m].norm().max(1e-12);
        assert!(rel < 0.02, "m={m}: relative error {rel:.3e}");
    }

    // single-x measure (no drift): c2 = -y^2/2, the variance being y^2.
    let single = ErgodicParams::unitary(0.0, 0.0, &[y]).unwrap();
    let coeffs = taylor_coeffs_f1(&single, 2);
    assert!((coeffs[2] - c(-y * y / 2.0, 0.0)).norm() < 1e-10, "c2 = {}", coeffs[2]);
    // cross-checks: the log expansion gives the same a² coefficient plus
    // drift², and a drift-compensated spectrum sequence approaches it
    let log = log_expansion(&single, 2);
    assert!((log[2] - coeffs[2]).norm() < 1e-14);
    let n = 400usize;
    let k = 20usize;
    let mut eigen = vec![0.0; n];
    eigen[0] = y * n as f64;
    for slot in eigen.iter_mut().skip(1).take(k) {
        *slot = -y * n as f64 / k as f64;
    }
    let compensated = Spectrum::new(eigen).unwrap();
    let c2_finite = taylor_coeff_onevar(&compensated, 2).scaled;
    assert!(
        (c2_finite - coeffs[2]).norm() < 0.03,
        "finite-n c2 {c2_finite} vs limit {}",
        coeffs[2]
    );
    assert!((c2_finite - c(-1.5 * y * y, 0.0)).norm() > 0.4);
    let elapsed = start.elapsed();
    println!("acceptance 10 moment bridge: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_11_density_diag_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(1011);

    // Fourier transform of the density matches the characteristic function
    for case in 0..10 {
        let gamma1 = rng.random_range(-0.5..0.5);
        let gamma2 = rng.random_range(0.3..1.2);
        let n_x = rng.random_range(0..=3usize);
        let xs: Vec<f64> = (0..n_x)
            .map(|_| {
                let mag = rng.random_range(0.15..0.6);
                if rng.random_range(0.0..1.0) < 0.5 {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let p = ErgodicParams::unitary(gamma1, gamma2, &xs).unwrap();
        let sum_abs_x: f64 = xs.iter().map(|v| v.abs()).sum();
        let halfwidth = 8.0 * gamma2.sqrt() + 16.0 * sum_abs_x + gamma1.abs() + 2.0;
        let step = 0.005;
        let count = (2.0 * halfwidth / step).ceil() as usize + 1;
        let grid: Vec<f64> = (0..count).map(|i| -halfwidth + i as f64 * step).collect();
        let density = density_diag(&p, &grid).unwrap();
        for a_i in -10..=10 {
            let a = a_i as f64 * 0.5;
            // trapezoid Fourier transform of the tabulated density
            let mut ft = Complex64::ZERO;
            for (i, (&t, &d)) in grid.iter().zip(&density).enumerate() {
                let w = if i == 0 || i == count - 1 { 0.5 } else { 1.0 };
                ft += w * c(0.0, a * t).exp() * d * step;
            }
            let want = charfn_f1(&p, a);
            let gap = (ft - want).norm();
            assert!(gap <= 1e-4, "case {case} a={a}: |FT - F| = {gap:.2e}");
        }
    }

    // histogram of summed gaussian + rank-one diagonal entries vs the density
    let gamma = 0.8;
    let y = 0.5;
    let count = 200_000usize;
    let gauss = SamplerSpec::new(SamplerVariant::Gaussian(gamma), 1, 2011).unwrap();
    let rank = SamplerSpec::new(SamplerVariant::RankOne(y), 1, 2012).unwrap();
    let draws: Vec<f64> = gauss
        .stream()
        .zip(rank.stream())
        .take(count)
        .map(|(g, r)| g.entry(0, 0).re + r.entry(0, 0).re)
        .collect();
    let p = ErgodicParams::unitary(0.0, gamma, &[y]).unwrap();
    let halfwidth = 8.0 * gamma.sqrt() + 16.0 * y; // covers all draws comfortably
    let step = 0.004;
    let n_grid = (2.0 * halfwidth / step).ceil() as usize + 1;
    let grid: Vec<f64> = (0..n_grid).map(|i| -halfwidth + i as f64 * step).collect();
    let density = density_diag(&p, &grid).unwrap();
    // cumulative trapezoid CDF with interpolation
    let mut cdf = vec![0.0f64; n_grid];
    for i in 1..n_grid {
        cdf[i] = cdf[i - 1] + 0.5 * (density[i] + density[i - 1]) * step;
    }
    let total = cdf[n_grid - 1];
    let cdf_at = move |t: f64| -> f64 {
        let pos = (t + halfwidth) / step;
        if pos <= 0.0 {
            return 0.0;
        }
        if pos >= (n_grid - 1) as f64 {
            return 1.0;
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        (cdf[i] * (1.0 - frac) + cdf[i + 1] * frac) / total
    };
    let ks = ks_statistic(draws, cdf_at);
    assert!(ks < 0.02, "KS = {ks}");
    let elapsed = start.elapsed();
    println!(
        "acceptance 11 diagonal-density consistency: PASS (KS = {ks:.4}, {elapsed:.2?})"
    );
}
