//! Observables and theorem checks: moments, entropy, equilibrium profiles,
//! Gaussian lower-envelope extraction, conservation drift and the loss-shape
//! monitor.

use std::sync::Arc;

use crate::collision::KernelTable;
use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialState};
use crate::integrator::Trajectory;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Per-snapshot observables.
#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsReport {
    pub t: f64,
    /// `int f dp`.
    pub mass: f64,
    /// Energy moments `int f E^k dp`, k = 1..3.
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `int [f ln f - (1+f) ln(1+f)] dp`, always <= 0.
    pub entropy: f64,
    /// `(M1(t) - M1(0)) / M1(0)`.
    pub energy_drift: f64,
    /// Gaussian lower-envelope parameters from [`envelope_fit`].
    pub theta1: f64,
    pub theta2: f64,
    /// Estimated instantaneous mass flux past `r_max`.
    pub tail_loss: f64,
}

/// Gaussian lower-envelope parameters: `f(rho) >= theta1 exp(-theta2 rho^2)`
/// at every node up to `valid_radius` whenever `theta1 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    pub theta1: f64,
    pub theta2: f64,
    pub valid_radius: f64,
}

/// Verdict of the uniform-lower-bound check over a trajectory window.
#[derive(Debug, Clone, Copy)]
pub struct LowerBoundReport {
    /// True iff a positive Gaussian envelope holds uniformly on `t >= T`.
    pub verdict: bool,
    /// `inf_{t >= T} theta1(t)` at the best common `theta2`.
    pub theta1_inf: f64,
    pub theta2: f64,
}

/// Conservation and boundedness summary of a trajectory.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    /// Per-snapshot relative energy drift.
    pub energy_drift: Vec<f64>,
    /// Momentum functional of a radial state: identically zero (odd
    /// integrand), reported structurally.
    pub momentum: f64,
    pub mass: Vec<f64>,
    pub mass_sup: f64,
    pub m2: Vec<f64>,
    pub m3: Vec<f64>,
    /// Set when the mass exceeds `mass_bound`.
    pub mass_bound_exceeded: bool,
    /// Set when M2 or M3 still grow monotonically at the end of the window
    /// (no sign of saturation).
    pub unsaturated_growth: bool,
}

/// Energy moment `M_k = 4 pi int f(rho) E(rho)^k rho^2 drho`, `k = 0..3`
/// (k = 0 is the mass).
pub fn moment(state: &RadialState, k: u32, params: &DispersionParams) -> Result<f64> {
    if k > 3 {
        return Err(Error::domain(format!("moment order must be 0..=3, got {k}")));
    }
    let vals = state.values();
    Ok(FOUR_PI
        * state.grid().integrate(|i, rho| {
            vals[i] * params.energy_raw(rho).powi(k as i32) * rho * rho
        }))
}

/// Quantum entropy functional `H = int [f ln f - (1+f) ln(1+f)] dp <= 0`.
///
/// The integrand extends continuously by 0 to `f = 0`.
pub fn entropy(state: &RadialState) -> Result<f64> {
    let vals = state.values();
    let h = FOUR_PI
        * state.grid().integrate(|i, rho| {
            let f = vals[i];
            if f == 0.0 {
                0.0
            } else {
                (f * f.ln() - (1.0 + f) * f.ln_1p()) * rho * rho
            }
        });
    if !h.is_finite() {
        return Err(Error::numeric("entropy integral not finite"));
    }
    Ok(h)
}

/// The Bose-Einstein stationary profile `f = 1/(exp(c E) - 1)` sampled on the
/// grid; the only radially symmetric equilibria of the dynamics.
pub fn equilibrium_state(c: f64, grid: Arc<RadialGrid>, params: &DispersionParams) -> Result<RadialState> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::domain(format!("equilibrium needs c > 0, got {c}")));
    }
    RadialState::from_profile(grid, 0.0, |r| 1.0 / (c * params.energy_raw(r)).exp_m1())
}

/// 32 log-spaced envelope-rate candidates on `[1e-2, 1e2]`.
pub fn default_theta2_grid() -> Vec<f64> {
    log_spaced(1e-2, 1e2, 32)
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let l0 = lo.ln();
    let dl = (hi.ln() - l0) / (n - 1) as f64;
    (0..n).map(|i| (l0 + i as f64 * dl).exp()).collect()
}

/// `ln theta1(theta2) = min_i (ln f_i + theta2 rho_i^2)`, or `-inf` when some
/// node is empty (the bound is then vacuous).
fn log_theta1(state: &RadialState, theta2: f64) -> f64 {
    state
        .values()
        .iter()
        .zip(state.grid().nodes())
        .map(|(&f, &rho)| {
            if f == 0.0 {
                f64::NEG_INFINITY
            } else {
                f.ln() + theta2 * rho * rho
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Best Gaussian lower envelope on the candidate rate grid: for each
/// `theta2`, `theta1` is the largest amplitude that keeps
/// `f >= theta1 exp(-theta2 rho^2)` true at every node; the candidate
/// maximizing `theta1` wins, with one coarse-to-fine refinement pass around
/// the argmax.
pub fn envelope_fit(state: &RadialState, theta2_grid: &[f64]) -> Result<EnvelopeParams> {
    if theta2_grid.is_empty() || theta2_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config("theta2 grid must be nonempty and ascending"));
    }
    if theta2_grid[0] <= 0.0 {
        return Err(Error::config("theta2 candidates must be positive"));
    }
    let best = |grid: &[f64]| -> (f64, f64) {
        grid.iter()
            .map(|&t2| (log_theta1(state, t2), t2))
            .fold((f64::NEG_INFINITY, grid[0]), |acc, v| if v.0 > acc.0 { v } else { acc })
    };
    let (lt1, t2) = best(theta2_grid);
    let (lt1, t2) = if lt1.is_finite() {
        let k = theta2_grid.iter().position(|&v| v == t2).unwrap();
        let lo = theta2_grid[k.saturating_sub(1)];
        let hi = theta2_grid[(k + 1).min(theta2_grid.len() - 1)];
        if hi > lo {
            let refined = best(&log_spaced(lo, hi, 32));
            if refined.0 > lt1 {
                refined
            } else {
                (lt1, t2)
            }
        } else {
            (lt1, t2)
        }
    } else {
        (lt1, t2)
    };
    Ok(EnvelopeParams {
        theta1: if lt1.is_finite() { lt1.min(700.0).exp() } else { 0.0 },
        theta2: t2,
        valid_radius: state.grid().r_max(),
    })
}

/// Uniform-in-time lower bound over `t >= t_from`: true iff some common rate
/// `theta2` keeps the fitted amplitude positive on every snapshot of the
/// window.
pub fn lower_bound_report(
    trajectory: &Trajectory,
    t_from: f64,
    theta2_grid: &[f64],
) -> Result<LowerBoundReport> {
    let window: Vec<&RadialState> = trajectory
        .snapshots()
        .iter()
        .filter(|s| s.time() >= t_from)
        .collect();
    if window.is_empty() {
        return Err(Error::config(format!(
            "no snapshots at or after t = {t_from}; trajectory ends at {}",
            trajectory.snapshots().last().map(|s| s.time()).unwrap_or(0.0)
        )));
    }
    let mut best = (f64::NEG_INFINITY, theta2_grid[0]);
    for &t2 in theta2_grid {
        let inf = window
            .iter()
            .map(|s| log_theta1(s, t2))
            .fold(f64::INFINITY, f64::min);
        if inf > best.0 {
            best = (inf, t2);
        }
    }
    Ok(LowerBoundReport {
        verdict: best.0.is_finite(),
        theta1_inf: if best.0.is_finite() { best.0.min(700.0).exp() } else { 0.0 },
        theta2: best.1,
    })
}

/// Drift series and boundedness flags of a trajectory.
pub fn conservation_report(
    trajectory: &Trajectory,
    params: &DispersionParams,
    mass_bound: f64,
) -> Result<ConservationReport> {
    let snaps = trajectory.snapshots();
    if snaps.len() < 2 {
        return Err(Error::config("conservation report needs at least 2 snapshots"));
    }
    let m1_0 = moment(&snaps[0], 1, params)?;
    let mut energy_drift = Vec::with_capacity(snaps.len());
    let mut mass = Vec::with_capacity(snaps.len());
    let mut m2 = Vec::with_capacity(snaps.len());
    let mut m3 = Vec::with_capacity(snaps.len());
    for s in snaps {
        energy_drift.push((moment(s, 1, params)? - m1_0) / m1_0);
        mass.push(moment(s, 0, params)?);
        m2.push(moment(s, 2, params)?);
        m3.push(moment(s, 3, params)?);
    }
    let mass_sup = mass.iter().fold(0.0f64, |a, &b| a.max(b));
    let unsaturated = |series: &[f64]| {
        let n = series.len();
        if n < 4 {
            return false;
        }
        let tail = &series[3 * n / 4..];
        tail.windows(2).all(|w| w[1] > w[0]) && series[n - 1] > 1.02 * series[3 * n / 4]
    };
    Ok(ConservationReport {
        energy_drift,
        momentum: 0.0,
        mass_sup,
        mass_bound_exceeded: mass_sup > mass_bound,
        unsaturated_growth: unsaturated(&m2) || unsaturated(&m3),
        mass,
        m2,
        m3,
    })
}

/// Shape monitor for the loss frequency: the largest ratio
/// `nu(rho) / ((1 + M)(rho + rho^5))` over the grid, where
/// `M = int f(u)(u^2 + u^3) du` is the dominating-profile moment computed
/// from the state itself.
pub fn loss_shape_monitor(state: &RadialState, table: &KernelTable) -> Result<f64> {
    let nu = table.loss_frequency(state)?;
    let vals = state.values();
    let m = state
        .grid()
        .integrate(|i, u| vals[i] * (u * u + u * u * u));
    if !m.is_finite() {
        return Err(Error::numeric("dominating moment not finite"));
    }
    Ok(state
        .grid()
        .nodes()
        .iter()
        .zip(&nu)
        .map(|(&rho, &l)| l / ((1.0 + m) * (rho + rho.powi(5))))
        .fold(0.0f64, f64::max))
}

/// Instantaneous production `d M_k / dt` evaluated through the weak form
/// with `phi = E^k`.
pub fn moment_production(
    state: &RadialState,
    table: &KernelTable,
    k: u32,
    params: &DispersionParams,
) -> Result<f64> {
    if k > 3 {
        return Err(Error::domain(format!("moment order must be 0..=3, got {k}")));
    }
    table.weak_form(state, |r| params.energy_raw(r).powi(k as i32))
}

/// Full per-snapshot report.
pub fn report_for(
    state: &RadialState,
    table: &KernelTable,
    params: &DispersionParams,
    m1_initial: f64,
    theta2_grid: &[f64],
) -> Result<DiagnosticsReport> {
    let mass = moment(state, 0, params)?;
    let m1 = moment(state, 1, params)?;
    let m2 = moment(state, 2, params)?;
    let m3 = moment(state, 3, params)?;
    let h = entropy(state)?;
    let envelope = envelope_fit(state, theta2_grid)?;
    let nu_trunc = table.truncated_loss_frequency(state)?;
    let vals = state.values();
    let tail_loss = FOUR_PI
        * state
            .grid()
            .integrate(|i, rho| rho * rho * vals[i] * nu_trunc[i]);
    Ok(DiagnosticsReport {
        t: state.time(),
        mass,
        m1,
        m2,
        m3,
        entropy: h,
        energy_drift: if m1_initial > 0.0 { (m1 - m1_initial) / m1_initial } else { 0.0 },
        theta1: envelope.theta1,
        theta2: envelope.theta2,
        tail_loss,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::build_kernel_table;

    fn unit() -> DispersionParams {
        DispersionParams::default()
    }

    fn grid(n: usize, r_max: f64) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::uniform(n, r_max).unwrap())
    }

    #[test]
    fn moments_of_vacuum_and_linearity() {
        let g = grid(64, 8.0);
        let p = unit();
        let zero = RadialState::zeros(g.clone());
        for k in 0..=3 {
            assert_eq!(moment(&zero, k, &p).unwrap(), 0.0);
        }
        let st = RadialState::from_profile(g.clone(), 0.0, |r| (-r).exp()).unwrap();
        let st3 = RadialState::from_profile(g, 0.0, |r| 3.0 * (-r).exp()).unwrap();
        for k in 0..=3 {
            let a = moment(&st, k, &p).unwrap();
            let b = moment(&st3, k, &p).unwrap();
            assert!((b - 3.0 * a).abs() < 1e-12 * b.abs().max(1.0));
        }
        assert!(moment(&st, 4, &p).is_err());
    }

    #[test]
    fn moment_matches_refined_quadrature() {
        let p = unit();
        let coarse = RadialState::from_profile(grid(512, 8.0), 0.0, |r| {
            1.0 / (p.energy_raw(r)).exp_m1()
        })
        .unwrap();
        let fine = RadialState::from_profile(grid(8192, 8.0), 0.0, |r| {
            1.0 / (p.energy_raw(r)).exp_m1()
        })
        .unwrap();
        for k in 0..=3 {
            let a = moment(&coarse, k, &p).unwrap();
            let b = moment(&fine, k, &p).unwrap();
            assert!(
                ((a - b) / b).abs() < 1e-4,
                "moment {k}: coarse {a} vs fine {b}"
            );
        }
    }

    #[test]
    fn moment_cauchy_schwarz_ordering() {
        let p = unit();
        for profile in [
            |r: f64| (-r * r).exp(),
            |r: f64| (-(r - 2.0) * (r - 2.0)).exp(),
            |r: f64| 1.0 / (1.0 + r.powi(6)),
        ] {
            let st = RadialState::from_profile(grid(256, 8.0), 0.0, profile).unwrap();
            let m1 = moment(&st, 1, &p).unwrap();
            let m2 = moment(&st, 2, &p).unwrap();
            let m3 = moment(&st, 3, &p).unwrap();
            assert!(m2 * m2 <= m1 * m3 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn entropy_sign_and_vacuum() {
        let g = grid(64, 8.0);
        assert_eq!(entropy(&RadialState::zeros(g.clone())).unwrap(), 0.0);
        let st = RadialState::from_profile(g, 0.0, |r| 2.0 * (-r).exp()).unwrap();
        assert!(entropy(&st).unwrap() < 0.0);
    }

    #[test]
    fn equilibrium_profile_value() {
        let p = unit();
        let g = grid(16, 2.0);
        let eq = equilibrium_state(1.0, g.clone(), &p).unwrap();
        assert!(eq.values().iter().all(|v| v.is_finite()));
        // frozen: f(1) = 1/(e^(sqrt 2) - 1)
        let f1 = 1.0 / 2f64.sqrt().exp_m1();
        assert!((f1 - 0.321_207_702_025_859_24).abs() < 1e-15);
        let direct = 1.0 / (p.energy_raw(1.0)).exp_m1();
        assert!((direct - f1).abs() < 1e-15);
        // c -> infinity empties every node
        let cold = equilibrium_state(500.0, g, &p).unwrap();
        assert!(cold.values().iter().all(|&v| v < 1e-10));
        assert!(equilibrium_state(0.0, grid(16, 2.0), &p).is_err());
    }

    #[test]
    fn envelope_fit_gaussian_equality_case() {
        let g = grid(128, 4.0);
        let st = RadialState::from_profile(g.clone(), 0.0, |r| (-r * r).exp()).unwrap();
        // the theta2 = 1 candidate reaches equality: theta1 = 1 exactly
        let fit = envelope_fit(&st, &[1.0]).unwrap();
        assert_eq!(fit.theta2, 1.0);
        assert!((fit.theta1 - 1.0).abs() < 1e-12);
        // soundness at every node
        for (&f, &rho) in st.values().iter().zip(g.nodes()) {
            assert!(f >= fit.theta1 * (-fit.theta2 * rho * rho).exp() * (1.0 - 1e-12));
        }
        let zero = RadialState::zeros(g);
        assert_eq!(envelope_fit(&zero, &default_theta2_grid()).unwrap().theta1, 0.0);
    }

    #[test]
    fn envelope_fit_soundness_on_default_grid() {
        let p = unit();
        let g = grid(256, 8.0);
        let st = equilibrium_state(1.0, g.clone(), &p).unwrap();
        let fit = envelope_fit(&st, &default_theta2_grid()).unwrap();
        assert!(fit.theta1 > 0.0);
        for (&f, &rho) in st.values().iter().zip(g.nodes()) {
            assert!(
                f >= fit.theta1 * (-fit.theta2 * rho * rho).exp() * (1.0 - 1e-9),
                "envelope unsound at rho={rho}"
            );
        }
    }

    #[test]
    fn loss_shape_ratio_finite_for_vacuum_and_equilibrium() {
        let p = unit();
        let g = grid(128, 8.0);
        let t = build_kernel_table(g.clone(), p, 256).unwrap();
        let zero = RadialState::zeros(g.clone());
        let r0 = loss_shape_monitor(&zero, &t).unwrap();
        assert!(r0.is_finite() && r0 > 0.0);
        let eq = equilibrium_state(1.0, g, &p).unwrap();
        let r1 = loss_shape_monitor(&eq, &t).unwrap();
        assert!(r1.is_finite() && r1 > 0.0);
        // doubling the state changes the ratio by a bounded factor
        let doubled = RadialState::from_profile(eq.grid().clone(), 0.0, |r| {
            2.0 / (p.energy_raw(r)).exp_m1()
        })
        .unwrap();
        let r2 = loss_shape_monitor(&doubled, &t).unwrap();
        assert!(r2 < 3.0 * r1, "scaling blew up the ratio: {r1} -> {r2}");
    }

    #[test]
    fn moment_production_energy_conserved_mass_not() {
        let p = unit();
        let g = grid(128, 8.0);
        let t = build_kernel_table(g.clone(), p, 256).unwrap();
        let st = RadialState::from_profile(g, 0.0, |r| (-r * r).exp()).unwrap();
        let dm1 = moment_production(&st, &t, 1, &p).unwrap();
        let dm0 = moment_production(&st, &t, 0, &p).unwrap();
        assert!(dm1.abs() < 1e-10 * dm0.abs().max(1.0));
        assert!(dm0.abs() > 1e-8);
        // k = 2: generic bracket equals the on-shell product form
        let a = moment_production(&st, &t, 2, &p).unwrap();
        let b = t.weak_form_m2_product(&st).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-30), "{a} vs {b}");
    }

    #[test]
    fn conservation_report_on_repeated_state() {
        let p = unit();
        let g = grid(64, 8.0);
        let st = RadialState::from_profile(g, 0.0, |r| (-r).exp()).unwrap();
        let later = st.with_values(st.values().to_vec(), 1.0).unwrap();
        let traj =
            Trajectory::from_snapshots(vec![st.clone(), later.clone(), later.with_values(later.values().to_vec(), 2.0).unwrap()])
                .unwrap();
        let rep = conservation_report(&traj, &p, 1e9).unwrap();
        assert!(rep.energy_drift.iter().all(|&d| d == 0.0));
        assert_eq!(rep.momentum, 0.0);
        assert!(!rep.mass_bound_exceeded);
        assert!(!rep.unsaturated_growth);
        // mass bound flag trips when the bound is set below the state mass
        let strict = conservation_report(&traj, &p, rep.mass_sup * 0.5).unwrap();
        assert!(strict.mass_bound_exceeded);
    }

    #[test]
    fn lower_bound_report_on_constant_trajectories() {
        let p = unit();
        let g = grid(64, 8.0);
        let eq = equilibrium_state(1.0, g.clone(), &p).unwrap();
        let snaps: Vec<RadialState> = (0..4)
            .map(|k| eq.with_values(eq.values().to_vec(), k as f64).unwrap())
            .collect();
        let traj = Trajectory::from_snapshots(snaps).unwrap();
        let rep = lower_bound_report(&traj, 1.0, &default_theta2_grid()).unwrap();
        assert!(rep.verdict);
        assert!(rep.theta1_inf > 0.0);
        // vacuum history never acquires an envelope
        let zero = RadialState::zeros(g);
        let snaps: Vec<RadialState> = (0..3)
            .map(|k| zero.with_values(zero.values().to_vec(), k as f64).unwrap())
            .collect();
        let traj = Trajectory::from_snapshots(snaps).unwrap();
        let rep = lower_bound_report(&traj, 0.5, &default_theta2_grid()).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.theta1_inf, 0.0);
        // empty window is a configuration error
        assert!(lower_bound_report(&traj, 99.0, &default_theta2_grid()).is_err());
    }

    #[test]
    fn moment_production_matches_trajectory_difference() {
        use crate::integrator::{run, IntegratorConfig, Scheme};
        let p = unit();
        let g = grid(128, 8.0);
        let t = build_kernel_table(g.clone(), p, 256).unwrap();
        let st = RadialState::from_profile(g, 0.0, |r| (-r * r).exp()).unwrap();
        // window short against the transient so the average rate matches the
        // instantaneous production at its start
        let config = IntegratorConfig {
            dt_init: 1e-5,
            dt_min: 1e-12,
            dt_max: 1e-5,
            t_end: 1e-3,
            eta: 0.05,
            f_scale: 1e-8,
            scheme: Scheme::PatankarImex,
            snapshot_every: 1000,
        };
        let traj = run(st, &config, &t).unwrap();
        let first = &traj.snapshots()[0];
        let last = traj.final_state();
        let dt = last.time() - first.time();
        for k in [0u32, 2, 3] {
            let fd = (moment(last, k, &p).unwrap() - moment(first, k, &p).unwrap()) / dt;
            let production = moment_production(first, &t, k, &p).unwrap();
            let scale = production.abs().max(fd.abs());
            assert!(
                (fd - production).abs() < 0.05 * scale,
                "k={k}: finite difference {fd} vs weak form {production}"
            );
        }
    }

    #[test]
    fn moment_production_vanishes_at_equilibrium() {
        let p = unit();
        let g = grid(256, 8.0);
        let t = build_kernel_table(g.clone(), p, 512).unwrap();
        let eq = equilibrium_state(1.0, g, &p).unwrap();
        let d2 = moment_production(&eq, &t, 2, &p).unwrap();
        // normalize by the one-sided magnitude of the functional
        let (_, scale) = t
            .weak_form_with_scale(&eq, |r| p.energy_raw(r).powi(2))
            .unwrap();
        assert!(d2.abs() <= 1e-3 * scale.max(1e-30), "production {d2} vs scale {scale}");
    }
}
