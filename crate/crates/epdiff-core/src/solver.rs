//! Time integration of the Euler-Arnold equation
//!
//!   m_t + u m_x + 2 m u_x = 0,   m = Au,
//!
//! as the spectral ODE u_t = -A^{-1}( u A(u_x) + 2 u_x A(u) ) on the
//! coefficient vector, with classical RK4. For A = Id this is the inviscid
//! Burgers equation u_t = -3 u u_x.
//!
//! Step size follows dt = cfl * dx / max(1, sup|u|) capped by dt_max, with
//! dx = 2 pi / (2N+1). A^{-1} smooths by the operator order, so for
//! order-3 inertia operators the right-hand side is of order <= 0 and this
//! policy is very conservative; the binding case is Burgers, where the
//! advective spectral radius sits right at the RK4 stability boundary under
//! the default cfl = 0.3.
//!
//! Blow-up is never proven, only evidenced: a run is "suspected" once
//! sup|u_x| crosses a factor of its initial value while the top-octave
//! tail of the energy fills in, and "certain" only when refining dt and
//! doubling N both fail to tame the growth (or arithmetic overflows).
//! A run terminates early on overflow or when the tail fraction signals
//! resolution exhaustion.

use crate::corpus;
use crate::error::{Error, Result};
use crate::operators::InertiaOperator;
use crate::spectral::{quadratic_sum, FourierField};
use num_complex::Complex64;
use serde::Serialize;

/// Instantaneous solver state.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub u: FourierField,
    pub dt: f64,
}

/// Scalar diagnostics recorded every step.
#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// ||u||_A^2 = int u Au dx.
    pub energy: f64,
    pub h12: f64,
    pub h32: f64,
    pub h2: f64,
    pub sup_u: f64,
    pub sup_ux: f64,
    pub dt: f64,
    /// Fraction of the H^1 spectral energy carried by the top octave
    /// |k| >= N/2; fills toward O(1) as a front steepens past resolution.
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupVerdict {
    None,
    Suspected,
    Certain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    ResolutionExhausted,
    Overflow,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub u: FourierField,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeSummary {
    pub dt_refined_corroborates: bool,
    pub n_refined_corroborates: bool,
    pub dt_probe_event: Option<f64>,
    pub n_probe_event: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub verdict: BlowupVerdict,
    /// Time at which the blow-up evidence first triggered.
    pub t_event: Option<f64>,
    pub probes: Option<ProbeSummary>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BlowupThresholds {
    /// Suspicion once sup|u_x| exceeds this multiple of its initial value...
    pub sup_factor: f64,
    /// ...while the tail fraction exceeds this.
    pub tail_suspect: f64,
    /// Terminate the run as resolution-exhausted beyond this tail fraction.
    pub tail_exhaust: f64,
}

impl Default for BlowupThresholds {
    fn default() -> Self {
        Self {
            sup_factor: 50.0,
            tail_suspect: 0.1,
            tail_exhaust: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub enum InitialCondition {
    Sin,
    MinusSin,
    /// Random field with spectrum (1+k^2)^{-p/2}, reproducible from the seed.
    Random {
        p: f64,
        seed: u64,
    },
    /// Explicit half-spectrum coefficients (k = 0..).
    Coefficients(Vec<Complex64>),
}

impl InitialCondition {
    pub fn realize(&self, bandwidth: usize) -> Result<FourierField> {
        Ok(match self {
            InitialCondition::Sin => FourierField::sine(1, 1.0, bandwidth),
            InitialCondition::MinusSin => FourierField::sine(1, -1.0, bandwidth),
            InitialCondition::Random { p, seed } => corpus::random_field(bandwidth, *p, *seed),
            InitialCondition::Coefficients(c) => {
                FourierField::from_half_coeffs(c.clone())?.with_bandwidth(bandwidth)
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub bandwidth: usize,
    pub horizon: f64,
    pub cfl: f64,
    pub dt_max: f64,
    /// Fixed step size overriding the CFL policy (convergence studies).
    pub fixed_dt: Option<f64>,
    /// Snapshot every this many steps; None selects the default cadence
    /// max(1, floor(T / (200 dt))). Diagnostics are recorded every step.
    pub snapshot_every: Option<usize>,
    pub thresholds: BlowupThresholds,
    /// Corroborate suspected blow-up with dt- and N-refined reruns.
    pub probe_refinement: bool,
    pub initial: InitialCondition,
}

impl RunConfig {
    pub fn new(bandwidth: usize, horizon: f64, initial: InitialCondition) -> Self {
        Self {
            bandwidth,
            horizon,
            cfl: 0.3,
            dt_max: 1e-2,
            fixed_dt: None,
            snapshot_every: None,
            thresholds: BlowupThresholds::default(),
            probe_refinement: true,
            initial,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.horizon <= 0.0 {
            return Err(Error::Config(format!("horizon {} <= 0", self.horizon)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl {} outside (0, 1]", self.cfl)));
        }
        if self.dt_max <= 0.0 {
            return Err(Error::Config(format!("dt_max {} <= 0", self.dt_max)));
        }
        if let Some(dt) = self.fixed_dt {
            if dt <= 0.0 {
                return Err(Error::Config(format!("fixed dt {dt} <= 0")));
            }
        }
        if self.snapshot_every == Some(0) {
            return Err(Error::Config("snapshot cadence must be >= 1".into()));
        }
        Ok(())
    }
}

/// u_t = -A^{-1}( u A(u_x) + 2 u_x A(u) ), dealiased. Constants are exact
/// equilibria: every term carries a derivative of u.
pub fn rhs(u: &FourierField, operator: &InertiaOperator) -> Result<FourierField> {
    let ux = u.derivative(1);
    let au = operator.apply(u)?;
    let aux = operator.apply(&ux)?;
    let nl = quadratic_sum(&[(u, &aux, 1.0), (&ux, &au, 2.0)]);
    Ok(-&operator.apply_inverse(&nl)?)
}

/// The same vector field written through the stretching identity,
/// u_tx = -A^{-1}( D^2(u Au) + D(u_x Au) ); the return value equals
/// derivative(rhs(u), 1) to spectral precision, which cross-checks the
/// integration-by-parts algebra behind the estimates.
pub fn rhs_gradient_form(u: &FourierField, operator: &InertiaOperator) -> Result<FourierField> {
    let ux = u.derivative(1);
    let au = operator.apply(u)?;
    let t1 = u.multiply(&au).derivative(2);
    let t2 = ux.multiply(&au).derivative(1);
    Ok(-&operator.apply_inverse(&(&t1 + &t2))?)
}

fn rk4(u: &FourierField, dt: f64, operator: &InertiaOperator) -> Result<FourierField> {
    let k1 = rhs(u, operator)?;
    let k2 = rhs(&(u + &k1.scaled(dt / 2.0)), operator)?;
    let k3 = rhs(&(u + &k2.scaled(dt / 2.0)), operator)?;
    let k4 = rhs(&(u + &k3.scaled(dt)), operator)?;
    let incr = &(&k1 + &k4) + &(&k2 + &k3).scaled(2.0);
    Ok(u + &incr.scaled(dt / 6.0))
}

/// One RK4 step of size `state.dt`; advances t. NaN/Inf in the result is
/// surfaced as an overflow (blow-up candidate).
pub fn step(state: &SolverState, operator: &InertiaOperator) -> Result<SolverState> {
    let u = rk4(&state.u, state.dt, operator)?;
    if !u.is_finite() {
        return Err(Error::Overflow {
            t: state.t + state.dt,
        });
    }
    Ok(SolverState {
        t: state.t + state.dt,
        u,
        dt: state.dt,
    })
}

/// Fraction of the H^1 spectral energy in the top octave |k| >= N/2.
pub fn tail_fraction(u: &FourierField) -> f64 {
    let n = u.bandwidth();
    if n < 2 {
        return 0.0;
    }
    let cut = n.div_ceil(2);
    let mut total = 0.0;
    let mut tail = 0.0;
    for (k, c) in u.half_coeffs().iter().enumerate().skip(1) {
        let e = (k * k) as f64 * c.norm_sqr();
        total += e;
        if k >= cut {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

pub fn diagnostics(
    t: f64,
    u: &FourierField,
    dt: f64,
    operator: &InertiaOperator,
) -> DiagnosticsRecord {
    let ux = u.derivative(1);
    DiagnosticsRecord {
        t,
        energy: operator.energy(u),
        h12: u.sobolev_norm(0.5),
        h32: u.sobolev_norm(1.5),
        h2: u.sobolev_norm(2.0),
        sup_u: u.sup_norm(),
        sup_ux: ux.sup_norm(),
        dt,
        tail_fraction: tail_fraction(u),
    }
}

fn dt_policy(u: &FourierField, cfg: &RunConfig) -> f64 {
    if let Some(dt) = cfg.fixed_dt {
        return dt;
    }
    let dx = 2.0 * std::f64::consts::PI / (2 * cfg.bandwidth + 1) as f64;
    (cfg.cfl * dx / u.sup_norm().max(1.0)).min(cfg.dt_max)
}

/// Assess blow-up evidence from a record history. The verdict is numerical
/// evidence, never proof: `Suspected` needs the sup and tail triggers
/// together, `Certain` additionally needs an overflow or both refinement
/// probes to corroborate.
pub fn detect_blowup(
    records: &[DiagnosticsRecord],
    thresholds: &BlowupThresholds,
    overflowed: bool,
    probes: Option<&ProbeSummary>,
) -> Result<(BlowupVerdict, Option<f64>)> {
    if records.len() < 10 {
        return Err(Error::Precondition(format!(
            "blow-up assessment needs >= 10 records, got {}",
            records.len()
        )));
    }
    let base = records[0].sup_ux;
    let t_event = records
        .iter()
        .find(|r| {
            r.sup_ux >= thresholds.sup_factor * base && r.tail_fraction > thresholds.tail_suspect
        })
        .map(|r| r.t);
    let suspected = t_event.is_some();
    if overflowed {
        let t = t_event.or_else(|| records.last().map(|r| r.t));
        return Ok((BlowupVerdict::Certain, t));
    }
    if !suspected {
        return Ok((BlowupVerdict::None, None));
    }
    let certain = probes
        .map(|p| p.dt_refined_corroborates && p.n_refined_corroborates)
        .unwrap_or(false);
    Ok((
        if certain {
            BlowupVerdict::Certain
        } else {
            BlowupVerdict::Suspected
        },
        t_event,
    ))
}

const MAX_PROBE_BANDWIDTH: usize = 4096;

/// Integrate to the horizon or a termination trigger, recording diagnostics
/// every step and snapshots at the configured cadence. The termination
/// reason and the blow-up verdict are explicit in the output.
pub fn run(cfg: &RunConfig, operator: &InertiaOperator) -> Result<Trajectory> {
    cfg.validate()?;
    if operator.bandwidth() < cfg.bandwidth {
        return Err(Error::Config(format!(
            "operator tables built for bandwidth {} < solver bandwidth {}",
            operator.bandwidth(),
            cfg.bandwidth
        )));
    }
    let base = integrate(cfg, operator)?;
    let (mut verdict, t_event) = detect_blowup(
        &pad_records(&base.records),
        &cfg.thresholds,
        base.termination == Termination::Overflow,
        None,
    )?;
    let mut probes = None;
    if verdict == BlowupVerdict::Suspected && cfg.probe_refinement {
        let summary = run_probes(cfg, operator, t_event.unwrap_or(cfg.horizon))?;
        let (v, _) = detect_blowup(
            &pad_records(&base.records),
            &cfg.thresholds,
            false,
            Some(&summary),
        )?;
        verdict = v;
        probes = Some(summary);
    }
    Ok(Trajectory {
        records: base.records,
        snapshots: base.snapshots,
        termination: base.termination,
        verdict,
        t_event,
        probes,
    })
}

/// detect_blowup insists on >= 10 records; very short clean runs (tiny
/// horizons) are padded by repeating the last record for assessment only.
fn pad_records(records: &[DiagnosticsRecord]) -> Vec<DiagnosticsRecord> {
    let mut v = records.to_vec();
    while v.len() < 10 {
        match v.last() {
            Some(last) => v.push(last.clone()),
            None => break,
        }
    }
    v
}

struct RawRun {
    records: Vec<DiagnosticsRecord>,
    snapshots: Vec<Snapshot>,
    termination: Termination,
}

fn integrate(cfg: &RunConfig, operator: &InertiaOperator) -> Result<RawRun> {
    let mut u = cfg.initial.realize(cfg.bandwidth)?;
    let mut t = 0.0f64;
    let horizon = cfg.horizon;
    let cadence = cfg.snapshot_every.unwrap_or_else(|| {
        let dt0 = dt_policy(&u, cfg);
        ((horizon / (200.0 * dt0)).floor() as usize).max(1)
    });
    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut step_idx = 0usize;
    let termination;
    loop {
        // the terminal record keeps the policy step (no step follows it)
        let remaining = horizon - t;
        let mut dt = dt_policy(&u, cfg);
        if remaining > 0.0 {
            dt = dt.min(remaining);
        }
        let rec = diagnostics(t, &u, dt, operator);
        let exhausted = rec.tail_fraction > cfg.thresholds.tail_exhaust;
        records.push(rec);
        if step_idx.is_multiple_of(cadence) {
            snapshots.push(Snapshot { t, u: u.clone() });
        }
        if exhausted {
            termination = Termination::ResolutionExhausted;
            break;
        }
        if t >= horizon - 1e-12 * horizon.max(1.0) {
            termination = Termination::Horizon;
            break;
        }
        u = rk4(&u, dt, operator)?;
        t += dt;
        if !u.is_finite() {
            termination = Termination::Overflow;
            break;
        }
        step_idx += 1;
    }
    if let Some(last) = snapshots.last() {
        if termination != Termination::Overflow && last.t < t {
            snapshots.push(Snapshot { t, u: u.clone() });
        }
    }
    Ok(RawRun {
        records,
        snapshots,
        termination,
    })
}

fn run_probes(cfg: &RunConfig, operator: &InertiaOperator, t_event: f64) -> Result<ProbeSummary> {
    let probe_horizon = (t_event * 1.25 + 0.1).min(cfg.horizon);
    let probe_base = RunConfig {
        horizon: probe_horizon,
        probe_refinement: false,
        snapshot_every: Some(usize::MAX),
        ..cfg.clone()
    };

    let assess = |cfg: &RunConfig, op: &InertiaOperator| -> Result<(bool, Option<f64>)> {
        let raw = integrate(cfg, op)?;
        let overflowed = raw.termination == Termination::Overflow;
        let (verdict, ev) = detect_blowup(
            &pad_records(&raw.records),
            &cfg.thresholds,
            overflowed,
            None,
        )?;
        Ok((verdict != BlowupVerdict::None, ev))
    };

    // halve the time step (through the policy scale or the fixed step)
    let dt_cfg = RunConfig {
        cfl: if cfg.fixed_dt.is_none() {
            cfg.cfl / 2.0
        } else {
            cfg.cfl
        },
        dt_max: cfg.dt_max / 2.0,
        fixed_dt: cfg.fixed_dt.map(|dt| dt / 2.0),
        ..probe_base.clone()
    };
    let (dt_corroborates, dt_event) = assess(&dt_cfg, operator)?;

    // double the spatial resolution
    let n2 = (cfg.bandwidth * 2).min(MAX_PROBE_BANDWIDTH);
    let n_cfg = RunConfig {
        bandwidth: n2,
        ..probe_base
    };
    let op2 = operator.rebuild(n2)?;
    let (n_corroborates, n_event) = assess(&n_cfg, &op2)?;

    Ok(ProbeSummary {
        dt_refined_corroborates: dt_corroborates,
        n_refined_corroborates: n_corroborates,
        dt_probe_event: dt_event,
        n_probe_event: n_event,
    })
}
