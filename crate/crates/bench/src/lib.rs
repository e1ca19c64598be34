//! Shared input builders for the benchmark targets.

use orbint::{EvalPoint, Spectrum};

/// Deterministic pseudo-random entries in [-1, 1] with a separation floor,
/// sized for the dual-route orbital benchmarks.
pub fn spread_entries(n: usize, salt: u64) -> Vec<f64> {
    let mut state = salt.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(1);
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    loop {
        let v: Vec<f64> = (0..n).map(|_| next()).collect();
        let mut ok = true;
        for i in 0..n {
            for j in i + 1..n {
                if (v[i] - v[j]).abs() < 0.1 {
                    ok = false;
                }
            }
        }
        if ok {
            return v;
        }
    }
}

pub fn bench_spectrum(n: usize) -> Spectrum {
    Spectrum::new(spread_entries(n, 41)).unwrap()
}

pub fn bench_point(n: usize) -> EvalPoint {
    EvalPoint::new(spread_entries(n, 97)).unwrap()
}
