//! Spectral field algebra on the circle.
//!
//! A real 2*pi-periodic function is stored as the truncated Fourier series
//! u(x) = sum_{|k| <= N} u_k e^{ikx} with the convention
//! u_k = (1/2pi) int_0^{2pi} u(x) e^{-ikx} dx. Only the half k = 0..=N is
//! kept; u_{-k} = conj(u_k) holds by construction, so every operation that
//! multiplies coefficients by a symbol with a(-k) = conj(a(k)) maps real
//! fields to real fields.
//!
//! All norms are coefficient-sequence norms: ||u||_{H^q}^2 =
//! sum_k (1+k^2)^q |u_k|^2 over the full index range. They differ from
//! L^2(dx)-based norms by a factor sqrt(2pi).
//!
//! Products are dealiased by zero-padding to at least 3N+1 collocation
//! points, which makes the truncated product of two bandwidth-N fields equal
//! to the exact convolution on |k| <= N (alias-free quadratic nonlinearity).

use crate::error::{Error, Result};
use crate::fft;
use num_complex::Complex64;

/// Real periodic function as conjugate-symmetric Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierField {
    /// Coefficients u_k for k = 0..=N; u_{-k} = conj(u_k). coeffs[0] is real.
    coeffs: Vec<Complex64>,
}

/// Real samples at equispaced collocation points x_j = 2 pi j / M.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<f64>,
}

impl GridField {
    pub fn from_values(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn from_fn(points: usize, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..points)
            .map(|j| f(2.0 * std::f64::consts::PI * j as f64 / points as f64))
            .collect();
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl FourierField {
    pub fn zero(bandwidth: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); bandwidth + 1],
        }
    }

    pub fn constant(c: f64, bandwidth: usize) -> Self {
        let mut f = Self::zero(bandwidth);
        f.coeffs[0] = Complex64::new(c, 0.0);
        f
    }

    /// cos(kx) scaled by `amp` (coefficients amp/2 at +-k).
    pub fn cosine(k: usize, amp: f64, bandwidth: usize) -> Self {
        assert!(k <= bandwidth);
        let mut f = Self::zero(bandwidth);
        if k == 0 {
            f.coeffs[0] = Complex64::new(amp, 0.0);
        } else {
            f.coeffs[k] = Complex64::new(amp / 2.0, 0.0);
        }
        f
    }

    /// sin(kx) scaled by `amp` (coefficient -i amp/2 at +k).
    pub fn sine(k: usize, amp: f64, bandwidth: usize) -> Self {
        assert!(k >= 1 && k <= bandwidth);
        let mut f = Self::zero(bandwidth);
        f.coeffs[k] = Complex64::new(0.0, -amp / 2.0);
        f
    }

    /// Build from the half-spectrum k = 0..=N. The k = 0 entry must be real
    /// (its imaginary part is the conjugate-symmetry defect of the mean).
    pub fn from_half_coeffs(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(1.0, f64::max);
        if coeffs[0].im.abs() > 1e-10 * scale {
            return Err(Error::ConjugateSymmetry {
                k: 0,
                deviation: coeffs[0].im.abs(),
            });
        }
        coeffs[0].im = 0.0;
        Ok(Self { coeffs })
    }

    /// Build from a full spectrum given as (k, u_k) for k = -N..=N, checking
    /// conjugate symmetry exactly up to round-off.
    pub fn from_full_coeffs(full: &[(i64, Complex64)]) -> Result<Self> {
        let n = full
            .iter()
            .map(|(k, _)| k.unsigned_abs())
            .max()
            .unwrap_or(0) as usize;
        let mut pos = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut neg = vec![Complex64::new(0.0, 0.0); n + 1];
        for &(k, v) in full {
            if k >= 0 {
                pos[k as usize] += v;
            } else {
                neg[(-k) as usize] += v;
            }
        }
        let scale = pos
            .iter()
            .chain(neg.iter())
            .map(|c| c.norm())
            .fold(1.0, f64::max);
        for k in 1..=n {
            let dev = (neg[k] - pos[k].conj()).norm();
            if dev > 1e-10 * scale {
                return Err(Error::ConjugateSymmetry {
                    k: -(k as i64),
                    deviation: dev,
                });
            }
        }
        Self::from_half_coeffs(pos)
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient at any integer frequency (conjugate for k < 0, zero beyond band).
    pub fn coeff(&self, k: i64) -> Complex64 {
        let a = k.unsigned_abs() as usize;
        if a >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else if k >= 0 {
            self.coeffs[a]
        } else {
            self.coeffs[a].conj()
        }
    }

    pub fn half_coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn half_coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// Same field viewed at a different bandwidth (zero-pad or truncate).
    pub fn with_bandwidth(&self, bandwidth: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(bandwidth + 1, Complex64::new(0.0, 0.0));
        Self { coeffs }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Coefficients (ik)^order u_k.
    pub fn derivative(&self, order: u32) -> Self {
        let mut coeffs = self.coeffs.clone();
        for (k, c) in coeffs.iter_mut().enumerate() {
            let ik = Complex64::new(0.0, k as f64);
            *c *= ik.powu(order);
        }
        if order > 0 {
            coeffs[0] = Complex64::new(0.0, 0.0);
        }
        Self { coeffs }
    }

    /// Hilbert transform, coefficients -i sgn(k) u_k with sgn(0) = 0.
    /// Annihilates the mean; H^2 = -Id on mean-zero fields.
    pub fn hilbert(&self) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = Complex64::new(0.0, 0.0);
        for c in coeffs.iter_mut().skip(1) {
            *c *= Complex64::new(0.0, -1.0);
        }
        Self { coeffs }
    }

    /// Dealiased pointwise product, truncated back to the common bandwidth.
    /// Exact whenever the true product has bandwidth <= N.
    pub fn multiply(&self, other: &Self) -> Self {
        quadratic_sum(&[(self, other, 1.0)])
    }

    /// Lie bracket [u, w] = u_x w - u w_x.
    pub fn bracket(&self, other: &Self) -> Self {
        let n = self.bandwidth().max(other.bandwidth());
        let u = self.with_bandwidth(n);
        let w = other.with_bandwidth(n);
        let ux = u.derivative(1);
        let wx = w.derivative(1);
        quadratic_sum(&[(&ux, &w, 1.0), (&u, &wx, -1.0)])
    }

    /// Coefficient-sequence Sobolev norm (sum_k (1+k^2)^q |u_k|^2)^{1/2}.
    pub fn sobolev_norm(&self, q: f64) -> f64 {
        let mut s = self.coeffs[0].norm_sqr();
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let w = (1.0 + (k * k) as f64).powf(q);
            s += 2.0 * w * c.norm_sqr();
        }
        s.sqrt()
    }

    /// Grid max of |u| over 8N equispaced points. A lower bound on the true
    /// sup-norm; trigonometric polynomials of degree N are well resolved at
    /// this density for diagnostic purposes.
    pub fn sup_norm(&self) -> f64 {
        let m = (8 * self.bandwidth()).max(32);
        self.synthesize(m)
            .expect("oversampled grid resolves the band")
            .max_abs()
    }

    /// Sup-norm sharpened by golden-section refinement of u^2 around the
    /// grid maximum. Accurate to ~1e-12 for smooth fields; used where grid
    /// resolution of the plain `sup_norm` is not enough.
    pub fn sup_norm_refined(&self) -> f64 {
        let m = (8 * self.bandwidth()).max(32);
        let grid = self
            .synthesize(m)
            .expect("oversampled grid resolves the band");
        let (mut jmax, mut best) = (0usize, 0.0f64);
        for (j, v) in grid.values().iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                jmax = j;
            }
        }
        let dx = 2.0 * std::f64::consts::PI / m as f64;
        let x0 = jmax as f64 * dx;
        let sq = |x: f64| {
            let v = self.eval(x);
            v * v
        };
        golden_max(sq, x0 - dx, x0 + dx).sqrt().max(best)
    }

    /// Evaluate the trigonometric polynomial at an arbitrary point.
    pub fn eval(&self, x: f64) -> f64 {
        let rot = Complex64::from_polar(1.0, x);
        let mut phase = rot;
        let mut acc = 0.0;
        for c in self.coeffs.iter().skip(1) {
            acc += (c * phase).re;
            phase *= rot;
        }
        self.coeffs[0].re + 2.0 * acc
    }

    /// Pointwise synthesis sum_k u_k e^{ikx_j} on M >= 2N+1 points.
    /// The imaginary residue of the inverse transform is asserted small and
    /// discarded.
    pub fn synthesize(&self, points: usize) -> Result<GridField> {
        let n = self.bandwidth();
        if points < 2 * n + 1 {
            return Err(Error::Resolution {
                points,
                bandwidth: n,
                needed: 2 * n + 1,
            });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); points];
        pack_full_spectrum(&self.coeffs, &mut buf);
        fft::inverse(&mut buf);
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .sum::<f64>()
            .max(1e-300);
        let mut values = Vec::with_capacity(points);
        let mut max_im = 0.0f64;
        for c in &buf {
            max_im = max_im.max(c.im.abs());
            values.push(c.re);
        }
        debug_assert!(
            max_im <= 1e-10 * scale,
            "imaginary residue {max_im:.3e} exceeds 1e-10 * {scale:.3e}"
        );
        Ok(GridField { values })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Largest coefficient difference against another field (any bandwidths).
    pub fn max_coeff_diff(&self, other: &Self) -> f64 {
        let n = self.bandwidth().max(other.bandwidth());
        (0..=n as i64)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        let n = self.bandwidth().max(rhs.bandwidth());
        let mut out = self.with_bandwidth(n);
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            *c += rhs.coeff(k as i64);
        }
        out
    }
}

impl std::ops::Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        let n = self.bandwidth().max(rhs.bandwidth());
        let mut out = self.with_bandwidth(n);
        for (k, c) in out.coeffs.iter_mut().enumerate() {
            *c -= rhs.coeff(k as i64);
        }
        out
    }
}

impl std::ops::Neg for &FourierField {
    type Output = FourierField;
    fn neg(self) -> FourierField {
        self.scaled(-1.0)
    }
}

/// Discrete Fourier coefficients of grid samples, normalized so that
/// analyze(synthesize(u)) = u for band-limited u. Conjugate symmetry is
/// enforced by the half-spectrum representation.
pub fn analyze(grid: &GridField, bandwidth: usize) -> Result<FourierField> {
    let m = grid.points();
    if m < 2 * bandwidth + 1 {
        return Err(Error::Resolution {
            points: m,
            bandwidth,
            needed: 2 * bandwidth + 1,
        });
    }
    let mut buf: Vec<Complex64> = grid
        .values()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft::forward(&mut buf);
    let inv_m = 1.0 / m as f64;
    let mut coeffs: Vec<Complex64> = buf[..=bandwidth].iter().map(|c| c * inv_m).collect();
    coeffs[0].im = 0.0;
    Ok(FourierField { coeffs })
}

/// Truncation to the common bandwidth of sum_i w_i f_i g_i, with every
/// product formed on a padded grid of >= 3N+1 points (alias-free for
/// quadratic nonlinearities). Sharing one grid across the terms costs one
/// forward transform total.
pub fn quadratic_sum(terms: &[(&FourierField, &FourierField, f64)]) -> FourierField {
    let n = terms
        .iter()
        .map(|(f, g, _)| f.bandwidth().max(g.bandwidth()))
        .max()
        .unwrap_or(0);
    let m = fft::next_fast_size(3 * n + 2);
    let mut phys = vec![0.0f64; m];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let mut buf2 = vec![Complex64::new(0.0, 0.0); m];
    for (f, g, w) in terms {
        buf.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        buf2.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        pack_full_spectrum(&f.coeffs, &mut buf);
        pack_full_spectrum(&g.coeffs, &mut buf2);
        fft::inverse(&mut buf);
        fft::inverse(&mut buf2);
        for ((p, a), b) in phys.iter_mut().zip(&buf).zip(&buf2) {
            *p += w * a.re * b.re;
        }
    }
    let mut out: Vec<Complex64> = phys.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::forward(&mut out);
    let inv_m = 1.0 / m as f64;
    let mut coeffs: Vec<Complex64> = out[..=n].iter().map(|c| c * inv_m).collect();
    coeffs[0].im = 0.0;
    FourierField { coeffs }
}

/// Place half-spectrum coefficients into FFT bin layout: k at bin k for
/// k >= 0 and conj(u_k) at bin M-k. Requires M > 2N so bins never collide.
fn pack_full_spectrum(half: &[Complex64], buf: &mut [Complex64]) {
    let m = buf.len();
    let n = half.len() - 1;
    debug_assert!(m > 2 * n || n == 0);
    buf[0] = half[0];
    for (k, c) in half.iter().enumerate().skip(1) {
        buf[k] = *c;
        buf[m - k] = c.conj();
    }
}

/// Golden-section maximum of f on [a, b] (assumed unimodal there).
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    /// O(N^2) direct convolution: exact coefficients of the product of two
    /// band-limited fields, truncated to `bandwidth`. Independent of the
    /// padded-FFT path it checks.
    pub fn convolution_oracle(
        u: &FourierField,
        v: &FourierField,
        bandwidth: usize,
    ) -> FourierField {
        let nu = u.bandwidth() as i64;
        let nv = v.bandwidth() as i64;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); bandwidth + 1];
        for m in 0..=(bandwidth as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in -nu..=nu {
                let l = m - j;
                if l.abs() <= nv {
                    acc += u.coeff(j) * v.coeff(l);
                }
            }
            coeffs[m as usize] = acc;
        }
        coeffs[0].im = 0.0;
        FourierField { coeffs }
    }

    fn random_field(bandwidth: usize, p: f64, seed: u64) -> FourierField {
        crate::corpus::random_field(bandwidth, p, seed)
    }

    #[test]
    fn analyze_constant() {
        let g = GridField::from_fn(33, |_| 1.0);
        let u = analyze(&g, 16).unwrap();
        assert!((u.coeff(0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..=16 {
            assert!(u.coeff(k).norm() < 1e-14);
        }
    }

    #[test]
    fn analyze_cosine() {
        let g = GridField::from_fn(40, |x| x.cos());
        let u = analyze(&g, 8).unwrap();
        assert!((u.coeff(1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((u.coeff(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(u.coeff(0).norm() < 1e-14);
        assert!(u.coeff(2).norm() < 1e-14);
    }

    #[test]
    fn analyze_rejects_coarse_grid() {
        let g = GridField::from_fn(32, |x| x.cos());
        match analyze(&g, 16) {
            Err(Error::Resolution { needed, .. }) => assert_eq!(needed, 33),
            other => panic!("expected resolution error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_on_random_band_limited_field() {
        let u = random_field(24, 2.0, 7);
        let g = u.synthesize(64).unwrap();
        let v = analyze(&g, 24).unwrap();
        let rel = u.max_coeff_diff(&v) / u.sobolev_norm(0.0);
        assert!(rel < 1e-12, "round-trip relative error {rel:.3e}");
    }

    #[test]
    fn synthesize_constant_and_modes() {
        let c = FourierField::constant(1.0, 4);
        for v in c.synthesize(16).unwrap().values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let cosx = FourierField::cosine(1, 1.0, 4);
        for (j, v) in cosx.synthesize(16).unwrap().values().iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 16.0;
            assert!((v - x.cos()).abs() < 1e-14);
        }
        // u_2 = -i/2 is sin(2x)
        let mut s = FourierField::zero(4);
        s.half_coeffs_mut()[2] = Complex64::new(0.0, -0.5);
        for (j, v) in s.synthesize(16).unwrap().values().iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 16.0;
            assert!((v - (2.0 * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn from_full_coeffs_rejects_asymmetry() {
        let full = [
            (1i64, Complex64::new(0.5, 0.2)),
            (-1i64, Complex64::new(0.5, 0.2)), // should be (0.5, -0.2)
        ];
        match FourierField::from_full_coeffs(&full) {
            Err(Error::ConjugateSymmetry { .. }) => {}
            other => panic!("expected conjugate symmetry error, got {other:?}"),
        }
    }

    #[test]
    fn derivative_trivia() {
        let cosx = FourierField::cosine(1, 1.0, 4);
        let d = cosx.derivative(1);
        let minus_sinx = FourierField::sine(1, -1.0, 4);
        assert!(d.max_coeff_diff(&minus_sinx) < 1e-15);

        let sin2x = FourierField::sine(2, 1.0, 4);
        let d2 = sin2x.derivative(2);
        assert!(d2.max_coeff_diff(&sin2x.scaled(-4.0)) < 1e-15);

        let c = FourierField::constant(3.0, 4);
        assert!(c.derivative(1).sobolev_norm(0.0) < 1e-15);
    }

    #[test]
    fn hilbert_trivia() {
        let cosx = FourierField::cosine(1, 1.0, 4);
        assert!(
            cosx.hilbert()
                .max_coeff_diff(&FourierField::sine(1, 1.0, 4))
                < 1e-15
        );
        assert!(FourierField::constant(1.0, 4).hilbert().sobolev_norm(0.0) < 1e-15);
        let sin3x = FourierField::sine(3, 1.0, 4);
        assert!(
            sin3x
                .hilbert()
                .max_coeff_diff(&FourierField::cosine(3, -1.0, 4))
                < 1e-15
        );
    }

    #[test]
    fn hilbert_squared_is_minus_identity_on_mean_zero() {
        let u = random_field(16, 2.0, 3);
        let mut u0 = u.clone();
        u0.half_coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        let hh = u0.hilbert().hilbert();
        assert!(hh.max_coeff_diff(&u0.scaled(-1.0)) < 1e-15);
        // On general fields, H^2 u = -(u - mean(u)).
        let hh = u.hilbert().hilbert();
        let expected = &u.scaled(-1.0) + &FourierField::constant(u.mean(), u.bandwidth());
        assert!(hh.max_coeff_diff(&expected) < 1e-15);
    }

    #[test]
    fn hilbert_derivative_is_abs_k() {
        let u = random_field(12, 2.0, 11);
        let hd = u.derivative(1).hilbert();
        for k in 0..=12i64 {
            let expected = u.coeff(k) * k.unsigned_abs() as f64;
            assert!((hd.coeff(k) - expected).norm() < 1e-15);
        }
        // multipliers commute
        let dh = u.hilbert().derivative(1);
        assert!(hd.max_coeff_diff(&dh) < 1e-15);
    }

    #[test]
    fn multiply_identity_and_product_formula() {
        let one = FourierField::constant(1.0, 8);
        let v = random_field(8, 2.0, 5);
        assert!(one.multiply(&v).max_coeff_diff(&v) < 1e-14);

        // cos^2 x = 1/2 + cos(2x)/2
        let cosx = FourierField::cosine(1, 1.0, 8);
        let sq = cosx.multiply(&cosx);
        let expected = &FourierField::constant(0.5, 8) + &FourierField::cosine(2, 0.5, 8);
        assert!(sq.max_coeff_diff(&expected) < 1e-14);
    }

    #[test]
    fn multiply_matches_convolution_oracle() {
        // inputs of bandwidth N/3 embedded at bandwidth N: product exact
        let n = 24;
        let u = random_field(n / 3, 2.0, 1).with_bandwidth(n);
        let v = random_field(n / 3, 3.0, 2).with_bandwidth(n);
        let prod = u.multiply(&v);
        let oracle = convolution_oracle(&u, &v, n);
        assert!(prod.max_coeff_diff(&oracle) < 1e-12);
    }

    #[test]
    fn multiply_dealiasing_exact_up_to_truncation() {
        // full-band inputs: truncated product still matches exact convolution on |k| <= N
        let n = 16;
        let u = random_field(n, 2.0, 9);
        let v = random_field(n, 2.0, 10);
        let prod = u.multiply(&v);
        let oracle = convolution_oracle(&u, &v, n);
        assert!(prod.max_coeff_diff(&oracle) < 1e-13);
    }

    #[test]
    fn bracket_trivia() {
        let u = random_field(10, 2.0, 4);
        assert!(u.bracket(&u).sobolev_norm(0.0) < 1e-13);

        let one = FourierField::constant(1.0, 10);
        let w = random_field(10, 3.0, 6);
        let b = one.bracket(&w);
        assert!(b.max_coeff_diff(&w.derivative(1).scaled(-1.0)) < 1e-13);

        // [sin x, cos x] = cos^2 + sin^2 = 1
        let sinx = FourierField::sine(1, 1.0, 4);
        let cosx = FourierField::cosine(1, 1.0, 4);
        let b = sinx.bracket(&cosx);
        assert!(b.max_coeff_diff(&FourierField::constant(1.0, 4)) < 1e-14);
    }

    #[test]
    fn sobolev_norm_values() {
        let c = FourierField::constant(-2.5, 4);
        for q in [0.0, 0.5, 1.5, 3.0] {
            assert!((c.sobolev_norm(q) - 2.5).abs() < 1e-14);
        }
        let cosx = FourierField::cosine(1, 1.0, 4);
        assert!((cosx.sobolev_norm(0.0) - 0.5f64.sqrt()).abs() < 1e-14);
        // q = 3/2: sqrt(2 * (1/4) * 2^{3/2}) = 2^{1/4}
        assert!((cosx.sobolev_norm(1.5) - 2.0f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn sup_norm_values() {
        let cosx = FourierField::cosine(1, 1.0, 8);
        assert!((cosx.sup_norm() - 1.0).abs() < 1e-10);
        assert_eq!(FourierField::zero(8).sup_norm(), 0.0);
    }

    #[test]
    fn sup_norm_against_dense_scan() {
        // u = sin x + sin 2x, dense 10^6-point oracle. The 8N grid max is a
        // lower bound with an O(dx^2) defect; the refined value is sharp.
        let u = &FourierField::sine(1, 1.0, 8) + &FourierField::sine(2, 1.0, 8);
        let mut dense_max = 0.0f64;
        let m = 1_000_000;
        for j in 0..m {
            let x = 2.0 * PI * j as f64 / m as f64;
            dense_max = dense_max.max((x.sin() + (2.0 * x).sin()).abs());
        }
        let grid = u.sup_norm();
        assert!(grid <= dense_max + 1e-12);
        assert!(grid >= dense_max * (1.0 - 1e-2));
        assert!((u.sup_norm_refined() - dense_max).abs() < 1e-9);
    }

    #[test]
    fn discrete_parseval() {
        let u = random_field(20, 2.0, 8);
        let m = 64;
        let g = u.synthesize(m).unwrap();
        let grid_energy = g.values().iter().map(|v| v * v).sum::<f64>() / m as f64;
        let coeff_energy = u.sobolev_norm(0.0).powi(2);
        assert!((grid_energy - coeff_energy).abs() < 1e-13 * coeff_energy.max(1.0));
    }

    #[test]
    fn bandwidth_promotion_in_binary_ops() {
        let small = FourierField::cosine(1, 1.0, 2);
        let big = FourierField::cosine(5, 1.0, 8);
        let sum = &small + &big;
        assert_eq!(sum.bandwidth(), 8);
        assert!((sum.coeff(1) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!((sum.coeff(5) - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        let prod = small.multiply(&big);
        assert_eq!(prod.bandwidth(), 8);
    }

    #[test]
    fn eval_matches_synthesis() {
        let u = random_field(16, 2.0, 12);
        let g = u.synthesize(48).unwrap();
        for (j, v) in g.values().iter().enumerate() {
            let x = 2.0 * PI * j as f64 / 48.0;
            assert!((u.eval(x) - v).abs() < 1e-12);
        }
    }
}
