//! Numerical certification of the identities and estimates behind the
//! order-3/2 global-existence argument.
//!
//! Checked here, each against an independent route:
//!
//! - the sum-of-squares series identity for F(u) = u u_xx + H(u H u_xx),
//!   including its sign and pointwise signed definiteness;
//! - the closed convolution formula for the coefficients of u_x H u_x;
//! - the four sup-norm estimates (a)-(d) with fully witnessed constants;
//! - the exact eight-term decomposition of the stretching term
//!   Q(u) = u u_xx - A^{-1}(D^2(u Au) + D(u_x Au));
//! - the per-term bounds with their empirical constants kappa_i;
//! - the Gronwall-style certificate along solver trajectories.
//!
//! Every check returns an [`EstimateReport`] carrying the measured left
//! side, the bound, their ratio, and the witness that produced it. Bound
//! constants are assembled from witnessed symbol growth constants and
//! summable embeddings, so a ratio above 1 is a genuine counterexample,
//! not a tolerance artifact. Empirical constants (the kappa_i, the
//! multiplication constant) are reported quantities, never asserted
//! against values the analysis does not provide.

use crate::corpus::CorpusSpec;
use crate::error::{Error, Result};
use crate::operators::{
    embedding_constant_h32, sup_constant, InertiaOperator, MultiplierSymbol, RemainderLevel,
};
use crate::par;
use crate::solver::{self, Trajectory};
use crate::spectral::{FourierField, GridField};
use num_complex::Complex64;
use serde::Serialize;

/// Global sign relating the direct evaluation of F to the nonnegative
/// series: F(u) = SIGN * 2 sum_{n>=1} (2n-1) |sum_{k>=n} u_k e^{ikx}|^2.
/// Fixed once by the single-mode oracle (u = 2 cos x gives F = -2 while the
/// series gives +2 under H = op(-i sgn k)); the tests re-derive it.
pub const F_SERIES_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub name: String,
    pub lhs: f64,
    pub rhs_bound: f64,
    pub ratio: f64,
    pub witness: String,
    pub tolerance: f64,
    pub pass: bool,
}

impl EstimateReport {
    fn new(name: &str, lhs: f64, rhs_bound: f64, witness: String, tolerance: f64) -> Self {
        let ratio = if rhs_bound > 0.0 {
            lhs / rhs_bound
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            name: name.to_string(),
            lhs,
            rhs_bound,
            ratio,
            witness,
            tolerance,
            pass: ratio <= 1.0 + 1e-12,
        }
    }
}

// --- F identity --------------------------------------------------------------

/// F(u) = u u_xx + H(u H u_xx), dealiased. The high modes cancel: the true
/// bandwidth of F(u) is N-1, so the truncated evaluation is exact.
pub fn f_direct(u: &FourierField) -> FourierField {
    let uxx = u.derivative(2);
    let h_uxx = uxx.hilbert();
    let t1 = u.multiply(&uxx);
    let t2 = u.multiply(&h_uxx).hilbert();
    &t1 + &t2
}

/// The series route: SIGN * 2 sum_{n=1}^{N} (2n-1) |sum_{k=n}^{N} u_k e^{ikx}|^2
/// evaluated by suffix accumulation of the mode tails at each grid point.
pub fn f_series(u: &FourierField, points: usize) -> GridField {
    let n = u.bandwidth();
    let half = u.half_coeffs();
    let values = par::map_indices(points, |j| {
        let x = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
        let rot = Complex64::from_polar(1.0, x);
        // terms u_k e^{ikx} for k = 1..=N
        let mut phase = rot;
        let mut terms = Vec::with_capacity(n);
        for c in half.iter().skip(1) {
            terms.push(c * phase);
            phase *= rot;
        }
        // suffix sums: tail_n = sum_{k>=n} u_k e^{ikx}
        let mut tail = Complex64::new(0.0, 0.0);
        let mut acc = 0.0;
        for (idx, t) in terms.iter().enumerate().rev() {
            tail += t;
            let n_mode = (idx + 1) as f64;
            acc += (2.0 * n_mode - 1.0) * tail.norm_sqr();
        }
        F_SERIES_SIGN * 2.0 * acc
    });
    GridField::from_values(values)
}

/// Max-norm residual between the two routes to F on a shared grid,
/// and the worst violation of the signed definiteness SIGN * F >= 0.
pub fn f_identity_residual(u: &FourierField) -> Result<(f64, f64)> {
    let points = (8 * u.bandwidth()).max(32);
    let direct = f_direct(u).synthesize(points)?;
    let series = f_series(u, points);
    let mut resid = 0.0f64;
    let mut signed_violation = 0.0f64;
    for (a, b) in direct.values().iter().zip(series.values()) {
        resid = resid.max((a - b).abs());
        // F_SERIES_SIGN * F(u)(x) should be >= 0
        signed_violation = signed_violation.max(-(F_SERIES_SIGN * a));
    }
    Ok((resid, signed_violation))
}

/// ||F(u)||_inf <= 4 ||u||_{H^{3/2}}^2, plus the signed-definiteness
/// corollary of the series form.
pub fn check_lemma_a(u: &FourierField, witness: String) -> Result<EstimateReport> {
    let lhs = f_direct(u).sup_norm();
    let n32 = u.sobolev_norm(1.5);
    let rhs = 4.0 * n32 * n32;
    let tol = (1e-10 * n32 * n32).max(1e-12);
    let (_, signed_violation) = f_identity_residual(u)?;
    let mut report = EstimateReport::new("lemma_a", lhs, rhs, witness, tol);
    if signed_violation > tol {
        report.pass = false;
        report.ratio = f64::INFINITY;
    }
    Ok(report)
}

// --- h_k formula and lemma (b) -------------------------------------------------

/// Coefficients of u_x H u_x written as i sum h_k e^{ikx}:
/// h_0 = h_1 = 0 and h_k = sum_{n=1}^{k-1} n (k-n) u_n u_{k-n} for k >= 2,
/// with h_{-k} = -conj(h_k). Returned for k = 0..=2N.
pub fn hk_coefficients(u: &FourierField) -> Vec<Complex64> {
    let n = u.bandwidth();
    let half = u.half_coeffs();
    (0..=2 * n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in 1..k {
                if m <= n && k - m <= n {
                    acc += (m * (k - m)) as f64 * half[m] * half[k - m];
                }
            }
            acc
        })
        .collect()
}

/// The field u_x H u_x reconstructed from the h_k formula (exact bandwidth 2N).
pub fn hk_reconstruction(u: &FourierField) -> FourierField {
    let h = hk_coefficients(u);
    let coeffs: Vec<Complex64> = h.iter().map(|hk| Complex64::new(0.0, 1.0) * hk).collect();
    FourierField::from_half_coeffs(coeffs).expect("i*h_0 = 0 is real")
}

/// ||B(u_x H u_x)||_inf <= 2 pi C-tilde ||u||_{H^{1/2}}^2 for B of order
/// <= -2, with C-tilde the witnessed growth constant of B against order -2
/// over the product band |k| <= 2N (the double-series route).
pub fn check_lemma_b(
    u: &FourierField,
    b: &MultiplierSymbol,
    witness: String,
) -> Result<EstimateReport> {
    if b.order() > -2.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "lemma (b) needs a multiplier of order <= -2, got {}",
            b.order()
        )));
    }
    let n2 = 2 * u.bandwidth();
    let ux = u.derivative(1).with_bandwidth(n2);
    let h_ux = u.derivative(1).hilbert().with_bandwidth(n2);
    let product = ux.multiply(&h_ux);
    let g = b.apply(&product)?;
    let lhs = g.sup_norm();
    let c_tilde = (0..=n2 as i64)
        .map(|k| b.value(k).norm() * (1.0 + (k * k) as f64))
        .fold(0.0f64, f64::max);
    let n12 = u.sobolev_norm(0.5);
    let rhs = 2.0 * std::f64::consts::PI * c_tilde * n12 * n12;
    let tol = (1e-10 * n12 * n12).max(1e-12);
    Ok(EstimateReport::new("lemma_b", lhs, rhs, witness, tol))
}

/// ||B u||_inf <= C ||u||_{L^2} for B of order < -1/2, with C from the
/// summable-symbol constant (witnessed growth times the weight sum with its
/// integral tail bound).
pub fn check_lemma_c(
    u: &FourierField,
    b: &MultiplierSymbol,
    sum_bandwidth: usize,
    witness: String,
) -> Result<EstimateReport> {
    let c = sup_constant(b, sum_bandwidth)?;
    let bu = b.apply(u)?;
    let lhs = bu.sup_norm();
    let l2 = u.sobolev_norm(0.0);
    let rhs = c * l2;
    let tol = (1e-10 * l2).max(1e-12);
    Ok(EstimateReport::new("lemma_c", lhs, rhs, witness, tol))
}

/// ||B2(u B1 v)||_inf <= C ||u||_{H^{3/2}} ||v||_{H^{3/2}} with
/// C = supC(B2) * C_mult * growth(B1 against order 3/2), where C_mult is
/// the analytic multiplication constant (sum (1+m^2)^{-3/2})^{1/2}. The
/// empirical multiplication constant is measured separately by the sweep.
pub fn check_lemma_d(
    u: &FourierField,
    v: &FourierField,
    b1: &MultiplierSymbol,
    b2: &MultiplierSymbol,
    sum_bandwidth: usize,
    witness: String,
) -> Result<EstimateReport> {
    if b1.order() > 1.5 + 1e-12 {
        return Err(Error::Precondition(format!(
            "lemma (d) needs B1 of order <= 3/2, got {}",
            b1.order()
        )));
    }
    let c2 = sup_constant(b2, sum_bandwidth)?;
    let n = u.bandwidth().max(v.bandwidth());
    let b1v = b1.apply(v)?.with_bandwidth(2 * n);
    let prod = u.with_bandwidth(2 * n).multiply(&b1v);
    let lhs = b2.apply(&prod)?.sup_norm();
    let growth_b1 = (0..=n as i64)
        .map(|k| b1.value(k).norm() / (1.0 + (k * k) as f64).powf(0.75))
        .fold(0.0f64, f64::max);
    let (nu, nv) = (u.sobolev_norm(1.5), v.sobolev_norm(1.5));
    let rhs = c2 * embedding_constant_h32() * growth_b1 * nu * nv;
    let tol = (1e-10 * nu * nv).max(1e-12);
    Ok(EstimateReport::new("lemma_d", lhs, rhs, witness, tol))
}

// --- Q decomposition -----------------------------------------------------------

/// Q(u) = u u_xx - A^{-1}( D^2(u Au) + D(u_x Au) ), the stretching term of
/// the flow: d/dt (u_x o phi) = Q(u) o phi.
pub fn q_direct(u: &FourierField, operator: &InertiaOperator) -> Result<FourierField> {
    let uxx = u.derivative(2);
    Ok(&u.multiply(&uxx) + &solver::rhs_gradient_form(u, operator)?)
}

/// The eight pieces of Q(u) produced by expanding A = -a3 H D^3 - a2 D^2 + R1
/// and trading derivatives through product rules. Their sum equals
/// q_direct(u) exactly: every rewriting step is a true-product identity hit
/// with multipliers that commute with the mode truncation.
pub fn q_terms(u: &FourierField, operator: &InertiaOperator) -> Result<[FourierField; 8]> {
    let d = operator
        .decomposition()
        .ok_or_else(|| Error::ExpansionFailure {
            name: operator.name().to_string(),
            reason: "Q decomposition needs the certified expansion (a3, a2, R1)".into(),
        })?;
    let (a3, a2) = (d.a3, d.a2);
    let r1 = &d.remainder1;
    let inv = operator.inverse_symbol();

    let ux = u.derivative(1);
    let uxx = u.derivative(2);
    let h_ux = ux.hilbert();
    let h_uxx = uxx.hilbert();
    let r1u = r1.apply(u)?;

    let q1 = &u.multiply(&uxx) + &u.multiply(&h_uxx).hilbert();
    let q2 = inv.apply(&uxx.multiply(&h_uxx).derivative(1))?.scaled(-a3);
    let q3 = inv.apply(&q1.derivative(2))?.scaled(a2);
    let q4 = inv.apply(&ux.multiply(&ux).derivative(2))?.scaled(a2 / 2.0);
    let q5 = -&inv.apply(&u.multiply(&r1u).derivative(2))?;
    let q6 = -&inv.apply(&r1.apply(&u.multiply(&h_ux).derivative(1).hilbert())?)?;
    let q7 = inv.apply(&r1.apply(&ux.multiply(&h_ux).hilbert())?)?;
    let q8 = -&inv.apply(&ux.multiply(&r1u).derivative(1))?;
    Ok([q1, q2, q3, q4, q5, q6, q7, q8])
}

/// Max-norm of q_direct - sum q_i, normalized by max(1, ||u||_{H^2}^2).
pub fn q_decomposition_residual(u: &FourierField, operator: &InertiaOperator) -> Result<f64> {
    let direct = q_direct(u, operator)?;
    let terms = q_terms(u, operator)?;
    let mut sum = FourierField::zero(u.bandwidth());
    for t in &terms {
        sum = &sum + t;
    }
    let resid = (&direct - &sum).sup_norm();
    let h2 = u.sobolev_norm(2.0);
    Ok(resid / (h2 * h2).max(1.0))
}

/// Per-term reports: kappa_i = ||Q_i||_inf / ||u||_{H^{3/2}}^2 for
/// i = 1,2,3,5,6,7 and ||Q_i||_inf / (||u_x||_inf ||u||_{H^{3/2}}) for
/// i = 4,8. The kappa_i are empirical, reported with witnesses; finiteness
/// is the only hard assertion here.
pub fn check_q_bounds(
    u: &FourierField,
    operator: &InertiaOperator,
    witness: String,
) -> Result<Vec<EstimateReport>> {
    let terms = q_terms(u, operator)?;
    let n32 = u.sobolev_norm(1.5);
    let sup_ux = u.derivative(1).sup_norm();
    let mut out = Vec::with_capacity(8);
    for (i, t) in terms.iter().enumerate() {
        let idx = i + 1;
        let rhs = if idx == 4 || idx == 8 {
            sup_ux * n32
        } else {
            n32 * n32
        };
        let lhs = t.sup_norm();
        let mut rep = EstimateReport::new(&format!("Q{idx}"), lhs, rhs, witness.clone(), 1e-12);
        // kappa_i is measured, not bounded: pass means finite
        rep.pass = rep.ratio.is_finite();
        out.push(rep);
    }
    Ok(out)
}

// --- Gronwall certificate --------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct GronwallReport {
    /// Fitted constants in ||Q|| <= alpha ||u||^2 + beta ||u|| ||u_x||_inf
    /// (least-max: the smallest symmetric choice covering every snapshot).
    pub alpha: f64,
    pub beta: f64,
    pub max_q: f64,
    /// sup|u_x|(t) <= sup|u_x|(0) + int_0^t ||Q|| ds within the band.
    pub integral_ok: bool,
    pub integral_margin_min: f64,
    /// Energy constancy transfers to a uniform H^{3/2} bound through the
    /// certified equivalence constants.
    pub norm_equivalence_ok: bool,
    pub energy_drift_rel: f64,
    pub pass: bool,
}

/// Certify the Gronwall chain along a trajectory: the Q bound with fitted
/// (alpha, beta), the integral inequality by trapezoid quadrature with a
/// tolerance band from the snapshot spacing, and the energy-to-norm
/// equivalence from the certification constants.
pub fn gronwall_certificate(
    trajectory: &Trajectory,
    operator: &InertiaOperator,
) -> Result<GronwallReport> {
    if !operator.is_certified() {
        return Err(Error::Precondition(format!(
            "Gronwall certificate requires a fully certified operator; '{}' is not in the class",
            operator.name()
        )));
    }
    let snaps = &trajectory.snapshots;
    if snaps.len() < 16 {
        return Err(Error::Cadence(format!(
            "Gronwall certificate needs >= 16 snapshots, got {}",
            snaps.len()
        )));
    }
    let rows: Vec<(f64, f64, f64, f64, f64)> = par::map(snaps.as_slice(), |s| {
        let q = q_direct(&s.u, operator)
            .map(|f| f.sup_norm())
            .unwrap_or(f64::NAN);
        let n32 = s.u.sobolev_norm(1.5);
        let sup_ux = s.u.derivative(1).sup_norm();
        let energy = operator.energy(&s.u);
        (s.t, q, n32, sup_ux, energy)
    });
    if rows.iter().any(|r| !r.1.is_finite()) {
        return Err(Error::Precondition(
            "Q evaluation failed along trajectory".into(),
        ));
    }

    let kappa = rows
        .iter()
        .filter(|(_, _, n32, s, _)| n32 * n32 + n32 * s > 0.0)
        .map(|(_, q, n32, s, _)| q / (n32 * n32 + n32 * s))
        .fold(0.0f64, f64::max);
    let max_q = rows.iter().map(|r| r.1).fold(0.0f64, f64::max);

    // integral inequality with trapezoid quadrature
    let s0 = rows[0].3;
    let mut integral = 0.0f64;
    let mut band = 1e-9 * (1.0 + s0);
    let mut margin_min = f64::INFINITY;
    let mut integral_ok = true;
    for i in 1..rows.len() {
        let dt = rows[i].0 - rows[i - 1].0;
        integral += 0.5 * dt * (rows[i].1 + rows[i - 1].1);
        band += 0.5 * dt * (rows[i].1 - rows[i - 1].1).abs();
        let margin = s0 + integral + band - rows[i].3;
        margin_min = margin_min.min(margin);
        if margin < 0.0 {
            integral_ok = false;
        }
    }

    // energy constancy => uniform H^{3/2} bound via certified constants
    let (c_ell, c_grow) = (
        operator.report().ellipticity_constant,
        operator.report().growth_constant,
    );
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut norm_equivalence_ok = true;
    for (_, _, n32, _, energy) in &rows {
        let e = energy / two_pi;
        let n2 = n32 * n32;
        if e < c_ell * n2 * (1.0 - 1e-9) - 1e-12 || e > c_grow * n2 * (1.0 + 1e-9) + 1e-12 {
            norm_equivalence_ok = false;
        }
    }
    let e0 = rows[0].4;
    let energy_drift_rel = if e0 > 0.0 {
        rows.iter()
            .map(|r| (r.4 - e0).abs() / e0)
            .fold(0.0f64, f64::max)
    } else {
        0.0
    };

    let pass = integral_ok && norm_equivalence_ok && kappa.is_finite();
    Ok(GronwallReport {
        alpha: kappa,
        beta: kappa,
        max_q,
        integral_ok,
        integral_margin_min: margin_min,
        norm_equivalence_ok,
        energy_drift_rel,
        pass,
    })
}

// --- sweeps ---------------------------------------------------------------------

/// Batch residual of the F identity over a corpus: worst normalized
/// max-norm discrepancy, worst signed-definiteness violation, and the
/// index of the worst field.
pub fn f_identity_sweep(corpus: &CorpusSpec) -> Result<(f64, f64, usize)> {
    let outcomes = par::map_indices(corpus.count, |i| {
        let u = corpus.field(i);
        let n32 = u.sobolev_norm(1.5);
        let scale = (n32 * n32).max(1e-12);
        f_identity_residual(&u).map(|(r, s)| (r / scale, s / scale))
    });
    let mut worst = (0.0f64, 0.0f64, 0usize);
    for (i, o) in outcomes.into_iter().enumerate() {
        let (r, s) = o?;
        if r > worst.0 {
            worst.0 = r;
            worst.2 = i;
        }
        worst.1 = worst.1.max(s);
    }
    Ok(worst)
}

/// Corpus maxima of the eight per-term constants kappa_i.
pub fn q_bounds_sweep(corpus: &CorpusSpec, operator: &InertiaOperator) -> Result<[f64; 8]> {
    let rows = par::map_indices(corpus.count, |i| {
        check_q_bounds(&corpus.field(i), operator, format!("corpus[{i}]"))
            .map(|reps| reps.iter().map(|r| r.ratio).collect::<Vec<f64>>())
    });
    let mut kappa = [0.0f64; 8];
    for row in rows {
        for (k, r) in kappa.iter_mut().zip(row?) {
            *k = k.max(r);
        }
    }
    Ok(kappa)
}

/// Worst Q-decomposition residual over a corpus for one operator.
pub fn q_decomposition_sweep(
    corpus: &CorpusSpec,
    operator: &InertiaOperator,
) -> Result<(f64, usize)> {
    let outcomes = par::map_indices(corpus.count, |i| {
        q_decomposition_residual(&corpus.field(i), operator)
    });
    let mut worst = (0.0f64, 0usize);
    for (i, o) in outcomes.into_iter().enumerate() {
        let r = o?;
        if r > worst.0 {
            worst = (r, i);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaSweepOutcome {
    /// Worst-ratio report per lemma (a, b, c, d order), evaluated on the
    /// worst field found anywhere (corpus or adversarial).
    pub worst: Vec<EstimateReport>,
    /// Empirical constants over the fixed-seed corpus: max lhs over the
    /// natural norm products, before any bound constant. These are the
    /// reported regression quantities; they are stable under bandwidth
    /// doubling because the decaying corpus spectra keep the mass at low
    /// frequencies.
    pub empirical: LemmaConstants,
    /// Ascent-sharpened constants, when adversarial search ran. These
    /// approach the true band-limited suprema, which for the F-bound and
    /// the double-series bound grow slowly with bandwidth (the extremizer
    /// mass escapes to high frequencies), so they are reported with their
    /// witnesses but not gated on cross-bandwidth stability.
    pub adversarial: Option<LemmaConstants>,
    pub all_pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaConstants {
    pub lemma_a: f64,
    pub lemma_b: f64,
    pub lemma_c: f64,
    pub lemma_d: f64,
    /// max ||u B1v||_L2 / (||u||_{H^{3/2}} ||B1 v||_L2): the measured
    /// multiplication constant of the product estimate.
    pub multiplication: f64,
}

type Objective<'a> = Box<dyn Fn(&FourierField) -> f64 + Sync + 'a>;

/// Run the four lemma checks over the corpus, optionally sharpened by
/// coordinate-ascent adversaries seeded from the worst corpus fields.
pub fn lemma_sweep(
    corpus: &CorpusSpec,
    operator: &InertiaOperator,
    lemma_c_multiplier: &MultiplierSymbol,
    adversarial: bool,
) -> Result<LemmaSweepOutcome> {
    let n = corpus.bandwidth;
    let sum_bandwidth = operator.bandwidth();
    if sum_bandwidth < 2 * n {
        return Err(Error::Precondition(format!(
            "operator bandwidth {sum_bandwidth} must cover the product band 2N = {}",
            2 * n
        )));
    }
    let b_bd = operator
        .inverse_symbol()
        .compose(&MultiplierSymbol::derivative(1)); // order -2 for the class
    let b1 = operator.remainder(RemainderLevel::R1)?.clone();
    let b2 = operator
        .inverse_symbol()
        .compose(&MultiplierSymbol::derivative(2)); // order -1

    let fields: Vec<FourierField> = corpus.fields();

    // measured ratios against the natural norm products
    let eval_a = |u: &FourierField| {
        let d = u.sobolev_norm(1.5).powi(2);
        if d > 0.0 {
            f_direct(u).sup_norm() / d
        } else {
            0.0
        }
    };
    let eval_b = {
        let b_bd = b_bd.clone();
        move |u: &FourierField| {
            let n2 = 2 * u.bandwidth();
            let ux = u.derivative(1).with_bandwidth(n2);
            let h_ux = u.derivative(1).hilbert().with_bandwidth(n2);
            let d = u.sobolev_norm(0.5).powi(2);
            if d > 0.0 {
                b_bd.apply(&ux.multiply(&h_ux))
                    .map(|g| g.sup_norm() / d)
                    .unwrap_or(f64::NAN)
            } else {
                0.0
            }
        }
    };
    let eval_c = {
        let b = lemma_c_multiplier.clone();
        move |u: &FourierField| {
            let d = u.sobolev_norm(0.0);
            if d > 0.0 {
                b.apply(u).map(|g| g.sup_norm() / d).unwrap_or(f64::NAN)
            } else {
                0.0
            }
        }
    };
    let eval_d = {
        let (b1, b2) = (b1.clone(), b2.clone());
        move |u: &FourierField, v: &FourierField| {
            let d = u.sobolev_norm(1.5) * v.sobolev_norm(1.5);
            if d == 0.0 {
                return 0.0;
            }
            let n2 = 2 * u.bandwidth().max(v.bandwidth());
            let inner = || -> Result<f64> {
                let b1v = b1.apply(v)?.with_bandwidth(n2);
                let prod = u.with_bandwidth(n2).multiply(&b1v);
                Ok(b2.apply(&prod)?.sup_norm() / d)
            };
            inner().unwrap_or(f64::NAN)
        }
    };

    let per_field: Vec<(f64, f64, f64)> =
        par::map(fields.as_slice(), |u| (eval_a(u), eval_b(u), eval_c(u)));
    let mut best: [(f64, usize); 4] = [(0.0, 0); 4];
    for (i, r) in per_field.iter().enumerate() {
        for (slot, val) in [r.0, r.1, r.2].iter().enumerate() {
            if *val > best[slot].0 {
                best[slot] = (*val, i);
            }
        }
    }
    // bilinear (d): cyclic pairs
    let d_vals = par::map_indices(fields.len(), |i| {
        eval_d(&fields[i], &fields[(i + 1) % fields.len()])
    });
    for (i, v) in d_vals.iter().enumerate() {
        if *v > best[3].0 {
            best[3] = (*v, i);
        }
    }

    // multiplication constant: ||u B1v||_L2 / (||u||_{H3/2} ||B1v||_L2)
    let mult_of = |u: &FourierField, v: &FourierField| -> f64 {
        let inner = || -> Result<f64> {
            let n2 = 2 * u.bandwidth().max(v.bandwidth());
            let b1v = b1.apply(v)?.with_bandwidth(n2);
            let d = u.sobolev_norm(1.5) * b1v.sobolev_norm(0.0);
            if d == 0.0 {
                return Ok(0.0);
            }
            Ok(u.with_bandwidth(n2).multiply(&b1v).sobolev_norm(0.0) / d)
        };
        inner().unwrap_or(f64::NAN)
    };
    let mult_vals = par::map_indices(fields.len(), |i| {
        mult_of(&fields[i], &fields[(i + 1) % fields.len()])
    });
    let corpus_multiplication = mult_vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let corpus_constants = LemmaConstants {
        lemma_a: best[0].0,
        lemma_b: best[1].0,
        lemma_c: best[2].0,
        lemma_d: best[3].0,
        multiplication: corpus_multiplication,
    };
    let mut multiplication = corpus_multiplication;

    // adversarial sharpening
    let mut adv_fields: Vec<FourierField> = Vec::new();
    let mut adv_best = best;
    if adversarial {
        let seeds: Vec<FourierField> = best.iter().map(|&(_, i)| fields[i].clone()).collect();
        let partner = fields[(best[3].1 + 1) % fields.len()].clone();
        let objectives: [Objective; 4] = [
            Box::new(eval_a),
            Box::new(eval_b.clone()),
            Box::new(eval_c.clone()),
            Box::new({
                let eval_d = eval_d.clone();
                let partner = partner.clone();
                move |u: &FourierField| eval_d(u, &partner)
            }),
        ];
        for (slot, obj) in objectives.iter().enumerate() {
            let start = seeds
                .iter()
                .max_by(|a, b| obj(a).total_cmp(&obj(b)))
                .cloned()
                .unwrap_or_else(|| fields[best[slot].1].clone());
            let (adv, val) = coordinate_ascent(&start, obj.as_ref(), 6);
            if val > adv_best[slot].0 {
                adv_best[slot] = (val, usize::MAX); // witness recorded as adversarial
            }
            adv_fields.push(adv);
        }
        // adversaries also feed the multiplication constant
        for a in &adv_fields {
            for v in adv_fields.iter().chain(fields.iter().take(8)) {
                let m = mult_of(a, v);
                if m.is_finite() {
                    multiplication = multiplication.max(m);
                }
            }
        }
    }

    // full reports (bound checks) for the worst fields including adversaries
    let witness = |slot: usize| -> (FourierField, String) {
        let (val, idx) = adv_best[slot];
        if idx == usize::MAX {
            (
                adv_fields[slot].clone(),
                format!("adversarial (ratio {val:.4e})"),
            )
        } else {
            (
                fields[idx].clone(),
                format!("corpus[{idx}] seed {}", corpus.seed(idx)),
            )
        }
    };
    let (wa, na) = witness(0);
    let (wb, nb) = witness(1);
    let (wc, nc) = witness(2);
    let (wd, nd) = witness(3);
    let partner = fields[(best[3].1 + 1) % fields.len()].clone();
    let worst = vec![
        check_lemma_a(&wa, na)?,
        check_lemma_b(&wb, &b_bd, nb)?,
        check_lemma_c(&wc, lemma_c_multiplier, sum_bandwidth, nc)?,
        check_lemma_d(&wd, &partner, &b1, &b2, sum_bandwidth, nd)?,
    ];
    let all_pass = worst.iter().all(|r| r.pass);
    Ok(LemmaSweepOutcome {
        worst,
        empirical: corpus_constants,
        adversarial: adversarial.then_some(LemmaConstants {
            lemma_a: adv_best[0].0,
            lemma_b: adv_best[1].0,
            lemma_c: adv_best[2].0,
            lemma_d: adv_best[3].0,
            multiplication,
        }),
        all_pass,
    })
}

/// Deterministic coordinate ascent on a scale-invariant ratio: perturb each
/// coefficient along +-re/+-im with an H^{3/2}-natural step, keep
/// improvements, halve the step when a full sweep stalls.
pub fn coordinate_ascent(
    start: &FourierField,
    objective: &(dyn Fn(&FourierField) -> f64 + Sync),
    rounds: usize,
) -> (FourierField, f64) {
    let mut u = start.clone();
    let mut best = objective(&u);
    let scale = u.sobolev_norm(0.0).max(1e-6);
    let mut step = 0.25 * scale;
    let n = u.bandwidth();
    for _ in 0..rounds {
        let mut improved = false;
        for k in 0..=n {
            let weight = (1.0 + (k * k) as f64).powf(-0.75);
            for (dre, dim) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                if k == 0 && dim != 0.0 {
                    continue;
                }
                let mut cand = u.clone();
                cand.half_coeffs_mut()[k] += Complex64::new(dre, dim) * step * weight;
                let val = objective(&cand);
                if val > best * (1.0 + 1e-12) {
                    best = val;
                    u = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (u, best)
}
