//! Lagrangian flow of the time-dependent velocity field and evaluation of
//! the right-invariant metric.
//!
//! The flow map solves phi_t = u(t, phi) with phi(0) = id, tracked per
//! collocation point as the periodic displacement psi = phi - x together
//! with the Jacobian phi_x, which obeys (phi_x)_t = (u_x o phi) phi_x and
//! must stay positive for phi to remain a diffeomorphism.
//!
//! Integration steps span two consecutive snapshot intervals so the RK4
//! stages land exactly on stored snapshots (no interpolation of u in time);
//! an odd trailing interval uses a quadratic three-snapshot interpolation
//! for its midpoint stage. Velocity values between grid points come from
//! trigonometric interpolation of the coefficients, consistent with the
//! spectral accuracy of the solver.

use crate::error::{Error, Result};
use crate::operators::InertiaOperator;
use crate::par;
use crate::solver::Snapshot;
use crate::spectral::{analyze, FourierField, GridField};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Diffeomorphism of the circle sampled on a collocation grid.
#[derive(Debug, Clone)]
pub struct FlowMap {
    /// phi(x_j) - x_j, periodic.
    pub displacement: GridField,
    /// phi_x(x_j) > 0.
    pub jacobian: GridField,
}

impl FlowMap {
    pub fn identity(points: usize) -> Self {
        Self {
            displacement: GridField::from_values(vec![0.0; points]),
            jacobian: GridField::from_values(vec![1.0; points]),
        }
    }

    /// Build from displacement samples, deriving the Jacobian spectrally.
    pub fn from_displacement(displacement: GridField) -> Result<Self> {
        let m = displacement.points();
        let psi = analyze(&displacement, (m - 1) / 2)?;
        let jac = psi.derivative(1).synthesize(m)?;
        let jacobian = GridField::from_values(jac.values().iter().map(|v| 1.0 + v).collect());
        let map = Self {
            displacement,
            jacobian,
        };
        map.check_jacobian()?;
        Ok(map)
    }

    pub fn points(&self) -> usize {
        self.displacement.points()
    }

    fn check_jacobian(&self) -> Result<()> {
        for (index, &v) in self.jacobian.values().iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::DiffeomorphismLoss { index, phi_x: v });
            }
        }
        Ok(())
    }

    /// Trigonometric interpolant of the displacement.
    pub fn displacement_field(&self) -> Result<FourierField> {
        analyze(&self.displacement, (self.points() - 1) / 2)
    }

    /// phi evaluated between grid points through the interpolant.
    pub fn eval(&self, psi: &FourierField, x: f64) -> f64 {
        x + psi.eval(x)
    }
}

#[derive(Debug, Clone)]
pub struct FlowMapSeries {
    pub times: Vec<f64>,
    pub maps: Vec<FlowMap>,
}

/// Integrate the flow map along a trajectory of uniformly spaced snapshots.
/// Maps are emitted at every other snapshot time (the pair-step boundaries)
/// plus the final time.
pub fn evolve_flow_map(snapshots: &[Snapshot], points: usize) -> Result<FlowMapSeries> {
    if snapshots.len() < 3 {
        return Err(Error::Cadence(format!(
            "flow map needs >= 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    let dt0 = snapshots[1].t - snapshots[0].t;
    for w in snapshots.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt <= 0.0 || (dt - dt0).abs() > 1e-9 * dt0.max(1e-12) {
            return Err(Error::Cadence(format!(
                "snapshot spacing not uniform: {dt} vs {dt0}"
            )));
        }
    }
    let grid: Vec<f64> = (0..points)
        .map(|j| TWO_PI * j as f64 / points as f64)
        .collect();
    let mut psi = vec![0.0f64; points];
    let mut jac = vec![1.0f64; points];
    let mut times = vec![snapshots[0].t];
    let mut maps = vec![FlowMap::identity(points)];

    let derivs: Vec<FourierField> = snapshots.iter().map(|s| s.u.derivative(1)).collect();
    let mut i = 0usize;
    while i + 1 < snapshots.len() {
        if i + 2 < snapshots.len() {
            // RK4 over [t_i, t_{i+2}]: stages at the three stored snapshots
            let h = snapshots[i + 2].t - snapshots[i].t;
            step_points(
                &grid,
                &mut psi,
                &mut jac,
                h,
                [&snapshots[i].u, &snapshots[i + 1].u, &snapshots[i + 2].u],
                [&derivs[i], &derivs[i + 1], &derivs[i + 2]],
            );
            i += 2;
        } else {
            // odd trailing interval: quadratic interpolation for the midpoint
            let n = snapshots.len();
            let h = snapshots[n - 1].t - snapshots[n - 2].t;
            let mid = interp_mid(
                &snapshots[n - 3].u,
                &snapshots[n - 2].u,
                &snapshots[n - 1].u,
            );
            let mid_d = mid.derivative(1);
            step_points(
                &grid,
                &mut psi,
                &mut jac,
                h,
                [&snapshots[n - 2].u, &mid, &snapshots[n - 1].u],
                [&derivs[n - 2], &mid_d, &derivs[n - 1]],
            );
            i += 1;
        }
        let map = FlowMap {
            displacement: GridField::from_values(psi.clone()),
            jacobian: GridField::from_values(jac.clone()),
        };
        map.check_jacobian()?;
        times.push(snapshots[i].t);
        maps.push(map);
    }
    Ok(FlowMapSeries { times, maps })
}

/// Quadratic interpolant through u(t-2h), u(t-h), u(t) evaluated at t - h/2.
fn interp_mid(a: &FourierField, b: &FourierField, c: &FourierField) -> FourierField {
    &(&a.scaled(-1.0 / 8.0) + &b.scaled(6.0 / 8.0)) + &c.scaled(3.0 / 8.0)
}

fn step_points(
    grid: &[f64],
    psi: &mut [f64],
    jac: &mut [f64],
    h: f64,
    u: [&FourierField; 3],
    ux: [&FourierField; 3],
) {
    let psi_in: &[f64] = psi;
    let jac_in: &[f64] = jac;
    let updated = par::map_indices(grid.len(), |j| {
        let x = grid[j];
        let (p, v) = (psi_in[j], jac_in[j]);
        // stages: u[0] at t, u[1] at t + h/2, u[2] at t + h
        let k1p = u[0].eval(x + p);
        let k1v = ux[0].eval(x + p) * v;
        let (p2, v2) = (p + 0.5 * h * k1p, v + 0.5 * h * k1v);
        let k2p = u[1].eval(x + p2);
        let k2v = ux[1].eval(x + p2) * v2;
        let (p3, v3) = (p + 0.5 * h * k2p, v + 0.5 * h * k2v);
        let k3p = u[1].eval(x + p3);
        let k3v = ux[1].eval(x + p3) * v3;
        let (p4, v4) = (p + h * k3p, v + h * k3v);
        let k4p = u[2].eval(x + p4);
        let k4v = ux[2].eval(x + p4) * v4;
        (
            p + h / 6.0 * (k1p + 2.0 * (k2p + k3p) + k4p),
            v + h / 6.0 * (k1v + 2.0 * (k2v + k3v) + k4v),
        )
    });
    for (j, (p, v)) in updated.into_iter().enumerate() {
        psi[j] = p;
        jac[j] = v;
    }
}

/// Refined sup of |f(phi(x))| over the circle: grid scan through the map's
/// interpolant followed by golden-section sharpening. Composition with a
/// diffeomorphism preserves the sup-norm, so this should match the refined
/// sup of f itself up to the flow-map integration error.
pub fn sup_composed(f: &FourierField, map: &FlowMap) -> Result<f64> {
    let psi = map.displacement_field()?;
    let m = map.points().max(8 * f.bandwidth()).max(32);
    let g = |x: f64| f.eval(map.eval(&psi, x));
    let mut best = 0.0f64;
    let mut xbest = 0.0f64;
    for j in 0..m {
        let x = TWO_PI * j as f64 / m as f64;
        let v = g(x).abs();
        if v > best {
            best = v;
            xbest = x;
        }
    }
    let dx = TWO_PI / m as f64;
    Ok(golden_max_abs(&g, xbest - dx, xbest + dx).max(best))
}

fn golden_max_abs(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let sq = |x: f64| {
        let v = f(x);
        v * v
    };
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (sq(c), sq(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = sq(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = sq(d);
        }
    }
    fc.max(fd).sqrt()
}

/// Right-invariant metric pairing G_phi(h, k) = <h o phi^{-1}, k o phi^{-1}>_A.
/// phi is inverted pointwise by safeguarded Newton on the interpolant, the
/// compositions are resampled spectrally, and the pairing is
/// 2 pi sum_m a(m) (h-tilde)_m conj((k-tilde)_m).
pub fn metric_eval(
    map: &FlowMap,
    h: &GridField,
    k: &GridField,
    operator: &InertiaOperator,
) -> Result<f64> {
    map.check_jacobian()?;
    let m = map.points();
    let psi = map.displacement_field()?;
    let psi_x = psi.derivative(1);
    let h_hat = analyze(h, (h.points() - 1) / 2)?;
    let k_hat = analyze(k, (k.points() - 1) / 2)?;

    let inverse_points = par::map_indices(m, |j| {
        let y = TWO_PI * j as f64 / m as f64;
        invert_monotone(&psi, &psi_x, y)
    });
    let mut h_vals = Vec::with_capacity(m);
    let mut k_vals = Vec::with_capacity(m);
    for (index, x) in inverse_points.iter().enumerate() {
        let x = x.ok_or(Error::DiffeomorphismLoss { index, phi_x: 0.0 })?;
        h_vals.push(h_hat.eval(x));
        k_vals.push(k_hat.eval(x));
    }
    let n_pair = (m - 1) / 2;
    let ht = analyze(&GridField::from_values(h_vals), n_pair)?;
    let kt = analyze(&GridField::from_values(k_vals), n_pair)?;
    let mut s = operator.symbol().value(0).re * ht.coeff(0).re * kt.coeff(0).re;
    for kk in 1..=n_pair as i64 {
        s += 2.0 * (operator.symbol().value(kk) * ht.coeff(kk) * kt.coeff(kk).conj()).re;
    }
    Ok(TWO_PI * s)
}

/// Solve x + psi(x) = y for the unique x (phi is strictly increasing).
fn invert_monotone(psi: &FourierField, psi_x: &FourierField, y: f64) -> Option<f64> {
    let f = |x: f64| x + psi.eval(x) - y;
    // bracket: the displacement is bounded by its sup-norm
    let bound = psi.sup_norm() + 1e-9;
    let (mut lo, mut hi) = (y - bound, y + bound);
    let mut x = y - psi.eval(y);
    for _ in 0..100 {
        let fx = f(x);
        if fx.abs() < 1e-13 {
            return Some(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let dfx = 1.0 + psi_x.eval(x);
        let newton = if dfx > 1e-12 { x - fx / dfx } else { x };
        x = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    if f(x).abs() < 1e-9 {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::MultiplierSymbol;
    use crate::solver::{run, InitialCondition, RunConfig};

    fn snapshots_of_constant(c: f64, n_snaps: usize, dt: f64) -> Vec<Snapshot> {
        (0..n_snaps)
            .map(|i| Snapshot {
                t: i as f64 * dt,
                u: FourierField::constant(c, 8),
            })
            .collect()
    }

    #[test]
    fn zero_velocity_gives_identity() {
        let snaps = snapshots_of_constant(0.0, 11, 0.1);
        let series = evolve_flow_map(&snaps, 64).unwrap();
        let last = series.maps.last().unwrap();
        assert!(last.displacement.max_abs() < 1e-14);
        for &v in last.jacobian.values() {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_velocity_is_rigid_rotation() {
        let snaps = snapshots_of_constant(0.7, 11, 0.1);
        let series = evolve_flow_map(&snaps, 64).unwrap();
        for (t, map) in series.times.iter().zip(&series.maps) {
            for &d in map.displacement.values() {
                assert!((d - 0.7 * t).abs() < 1e-12, "t = {t}");
            }
        }
        // odd number of intervals exercises the trailing single step
        let snaps = snapshots_of_constant(0.7, 10, 0.1);
        let series = evolve_flow_map(&snaps, 32).unwrap();
        let last = series.maps.last().unwrap();
        for &d in last.displacement.values() {
            assert!((d - 0.7 * 0.9).abs() < 1e-12);
        }
    }

    #[test]
    fn nonuniform_snapshots_rejected() {
        let mut snaps = snapshots_of_constant(0.5, 5, 0.1);
        snaps[3].t += 0.03;
        assert!(matches!(
            evolve_flow_map(&snaps, 32),
            Err(Error::Cadence(_))
        ));
        assert!(matches!(
            evolve_flow_map(&snaps[..2], 32),
            Err(Error::Cadence(_))
        ));
    }

    #[test]
    fn composition_preserves_sup_norm_along_run() {
        let sym = MultiplierSymbol::builtin("sobolev_32").unwrap();
        let a = crate::operators::InertiaOperator::certified(sym, 32).unwrap();
        let cfg = RunConfig {
            snapshot_every: Some(1),
            ..RunConfig::new(32, 0.5, InitialCondition::Sin)
        };
        let traj = run(&cfg, &a).unwrap();
        let series = evolve_flow_map(&traj.snapshots, 512).unwrap();
        // ||u_x o phi||_inf = ||u_x||_inf at every emitted time
        for (t, map) in series.times.iter().zip(&series.maps) {
            let snap = traj
                .snapshots
                .iter()
                .find(|s| (s.t - t).abs() < 1e-12)
                .unwrap();
            let ux = snap.u.derivative(1);
            let lhs = sup_composed(&ux, map).unwrap();
            let rhs = ux.sup_norm_refined();
            assert!(
                (lhs - rhs).abs() <= 1e-6 * rhs.max(1.0),
                "t = {t}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn jacobian_loss_is_detected() {
        // displacement 1.2 sin x has phi_x = 1 + 1.2 cos x < 0 near x = pi
        let g = GridField::from_fn(64, |x| 1.2 * x.sin());
        assert!(matches!(
            FlowMap::from_displacement(g),
            Err(Error::DiffeomorphismLoss { .. })
        ));
        let ok = GridField::from_fn(64, |x| 0.5 * x.sin());
        assert!(FlowMap::from_displacement(ok).is_ok());
    }

    #[test]
    fn metric_at_identity_matches_energy_pairing() {
        let sym = MultiplierSymbol::builtin("sobolev_32").unwrap();
        let a = crate::operators::InertiaOperator::certified(sym, 128).unwrap();
        let m = 256;
        let h = GridField::from_fn(m, |x| x.cos() + 0.3 * (2.0 * x).sin());
        let id = FlowMap::identity(m);
        let g_hh = metric_eval(&id, &h, &h, &a).unwrap();
        let h_hat = analyze(&h, 8).unwrap();
        let energy = a.energy(&h_hat);
        assert!((g_hh - energy).abs() < 1e-10 * energy);
        assert!(g_hh > 0.0);
    }

    #[test]
    fn right_invariance_of_the_metric() {
        let sym = MultiplierSymbol::builtin("sobolev_32").unwrap();
        let a = crate::operators::InertiaOperator::certified(sym, 256).unwrap();
        let m = 512;
        // smooth diffeos and fields with a few harmonics each
        let phi = FlowMap::from_displacement(GridField::from_fn(m, |x| {
            0.25 * (x + 0.4).sin() + 0.1 * (2.0 * x - 0.3).cos()
        }))
        .unwrap();
        let psi_disp = |x: f64| 0.2 * (x - 1.1).sin() - 0.08 * (3.0 * x).cos();
        let h = |x: f64| x.cos() + 0.5 * (2.0 * x).sin();
        let k = |x: f64| (x + 0.7).sin() - 0.2 * (3.0 * x).cos();

        let h_grid = GridField::from_fn(m, h);
        let k_grid = GridField::from_fn(m, k);
        let lhs = metric_eval(&phi, &h_grid, &k_grid, &a).unwrap();

        // compose: (phi o psi)(x) = phi(psi(x)), h o psi, k o psi
        let phi_interp = phi.displacement_field().unwrap();
        let composed = FlowMap::from_displacement(GridField::from_fn(m, |x| {
            let y = x + psi_disp(x);
            phi.eval(&phi_interp, y) - x
        }))
        .unwrap();
        let h_c = GridField::from_fn(m, |x| h(x + psi_disp(x)));
        let k_c = GridField::from_fn(m, |x| k(x + psi_disp(x)));
        let rhs = metric_eval(&composed, &h_c, &k_c, &a).unwrap();

        let rel = (lhs - rhs).abs() / lhs.abs().max(1.0);
        assert!(rel <= 1e-6, "invariance residual {rel:.3e}");
    }
}
