//! Fixed-seed ensembles of random band-limited fields.
//!
//! Every verification sweep draws from the same deterministic corpus:
//! complex Gaussian coefficients damped by (1+k^2)^{-p/2} with decay
//! exponent p cycling over {2, 3, 4}. Per-field seeds are derived from a
//! base seed plus the field index, so any witness can be regenerated from
//! its index alone.

use crate::spectral::FourierField;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub const DEFAULT_BASE_SEED: u64 = 0x0e9d_1ff5;
pub const DECAY_EXPONENTS: [f64; 3] = [2.0, 3.0, 4.0];

/// Random real field with |u_k| ~ (1+k^2)^{-p/2}, reproducible from the seed.
pub fn random_field(bandwidth: usize, p: f64, seed: u64) -> FourierField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut coeffs = Vec::with_capacity(bandwidth + 1);
    coeffs.push(Complex64::new(draw(), 0.0));
    for k in 1..=bandwidth {
        let w = (1.0 + (k * k) as f64).powf(-p / 2.0);
        let re = draw();
        let im = draw();
        coeffs.push(Complex64::new(re * w, im * w) / 2.0f64.sqrt());
    }
    FourierField::from_half_coeffs(coeffs).expect("constructed symmetric")
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub count: usize,
    pub bandwidth: usize,
    pub base_seed: u64,
}

impl CorpusSpec {
    pub fn new(count: usize, bandwidth: usize) -> Self {
        Self {
            count,
            bandwidth,
            base_seed: DEFAULT_BASE_SEED,
        }
    }

    /// Decay exponent assigned to field `index`.
    pub fn exponent(&self, index: usize) -> f64 {
        DECAY_EXPONENTS[index % DECAY_EXPONENTS.len()]
    }

    pub fn seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    pub fn field(&self, index: usize) -> FourierField {
        random_field(self.bandwidth, self.exponent(index), self.seed(index))
    }

    pub fn fields(&self) -> Vec<FourierField> {
        (0..self.count).map(|i| self.field(i)).collect()
    }
}
