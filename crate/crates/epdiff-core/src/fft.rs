//! Cached FFT plans and grid-size selection.
//!
//! rustfft handles arbitrary lengths, but repeated planning is wasteful and
//! sizes with large prime factors fall back to Bluestein. Plans are cached
//! per (length, direction) and product grids are rounded up to 5-smooth sizes.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

static PLANS: Lazy<PlanCache> = Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().unwrap();
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// In-place unnormalized forward DFT: X_k = sum_j x_j e^{-2 pi i jk/M}.
pub fn forward(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// In-place unnormalized inverse DFT: x_j = sum_k X_k e^{+2 pi i jk/M}.
pub fn inverse(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// Smallest 5-smooth integer (2^a 3^b 5^c) that is >= n.
pub fn next_fast_size(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let mut best = usize::MAX;
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            // round p35 up to the next power of two multiple
            let mut m = p35;
            while m < n {
                m = m.saturating_mul(2);
            }
            if m < best {
                best = m;
            }
            p35 = match p35.checked_mul(3) {
                Some(v) => v,
                None => break,
            };
        }
        p5 = match p5.checked_mul(5) {
            Some(v) => v,
            None => break,
        };
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn next_fast_size_is_5_smooth_and_minimal() {
        for n in [1, 2, 7, 100, 193, 770, 1538, 4097] {
            let m = next_fast_size(n);
            assert!(m >= n);
            let mut r = m;
            for p in [2, 3, 5] {
                while r.is_multiple_of(p) {
                    r /= p;
                }
            }
            assert_eq!(r, 1, "{m} not 5-smooth");
        }
        assert_eq!(next_fast_size(770), 800);
        assert_eq!(next_fast_size(193), 200);
    }

    #[test]
    fn forward_inverse_round_trip() {
        let mut buf: Vec<Complex64> = (0..64)
            .map(|j| Complex64::new((j as f64).sin(), (j as f64 * 0.7).cos()))
            .collect();
        let orig = buf.clone();
        forward(&mut buf);
        inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 64.0 - b).norm() < 1e-13);
        }
    }
}
