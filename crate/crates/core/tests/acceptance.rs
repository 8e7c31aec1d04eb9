//! Acceptance suite: every verification criterion of the solver, one test per
//! criterion, each printing a `[acceptance]` pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).
//!
//! Default scale: unit dispersion constants, n = 512, r_max = 8.  The bump
//! trajectory shared by several criteria is the committed configuration
//! below; regression values pinned here were produced by that exact
//! configuration.

use std::sync::{Arc, OnceLock};

use qboltz::collision::{build_kernel_table, KernelTable};
use qboltz::diagnostics::{
    self, default_theta2_grid, entropy, equilibrium_state, lower_bound_report, moment,
};
use qboltz::dispersion::DispersionParams;
use qboltz::grid::{RadialGrid, RadialState};
use qboltz::integrator::{run, IntegratorConfig, Scheme, Trajectory};
use qboltz::oracle::{epsilon_study, MollifierConfig};
use qboltz::surfaces::{
    self, surface_area, surface_integral_n, SurfaceKind, SurfaceWeight,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn params() -> DispersionParams {
    DispersionParams::default()
}

fn grid512() -> Arc<RadialGrid> {
    static GRID: OnceLock<Arc<RadialGrid>> = OnceLock::new();
    GRID.get_or_init(|| Arc::new(RadialGrid::uniform(512, 8.0).unwrap()))
        .clone()
}

fn table512() -> &'static KernelTable {
    static TABLE: OnceLock<KernelTable> = OnceLock::new();
    TABLE.get_or_init(|| build_kernel_table(grid512(), params(), 1024).unwrap())
}

/// The committed bump-run configuration shared by criteria 1, 3, 9, 12, 13.
fn committed_config(t_end: f64) -> IntegratorConfig {
    IntegratorConfig {
        dt_init: 1e-4,
        dt_min: 1e-12,
        dt_max: 1e-3,
        t_end,
        eta: 0.0025,
        f_scale: 1e-8,
        scheme: Scheme::PatankarImex,
        snapshot_every: 50,
    }
}

fn bump_state() -> RadialState {
    RadialState::from_profile(grid512(), 0.0, qboltz::cli::bump_profile(1.0, 1.0, 0.25)).unwrap()
}

fn bump_trajectory() -> &'static Trajectory {
    static TRAJ: OnceLock<Trajectory> = OnceLock::new();
    TRAJ.get_or_init(|| run(bump_state(), &committed_config(10.0), table512()).unwrap())
}

/// The five canonical states: vacuum, two equilibria, a Gaussian bump and a
/// shifted bump, as (name, analytic profile truncated at r_max).
fn canonical_profiles() -> Vec<(&'static str, Box<dyn Fn(f64) -> f64 + Sync>)> {
    let p = params();
    vec![
        ("zero", Box::new(|_| 0.0)),
        (
            "equilibrium_c_0.5",
            Box::new(move |r: f64| {
                if r > 8.0 {
                    0.0
                } else {
                    1.0 / (0.5 * p.energy(r).unwrap()).exp_m1()
                }
            }),
        ),
        (
            "equilibrium_c_1",
            Box::new(move |r: f64| {
                if r > 8.0 {
                    0.0
                } else {
                    1.0 / (p.energy(r).unwrap()).exp_m1()
                }
            }),
        ),
        (
            "gaussian_bump",
            Box::new(|r: f64| if r > 8.0 { 0.0 } else { (-r * r).exp() }),
        ),
        (
            "shifted_bump",
            Box::new(|r: f64| if r > 8.0 { 0.0 } else { (-(r - 2.0) * (r - 2.0)).exp() }),
        ),
    ]
}

fn report(criterion: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[acceptance] criterion {criterion:2} ({name}): {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_energy_conservation() {
    let table = table512();
    let p = params();
    let mut worst = 0.0f64;
    for (name, profile) in canonical_profiles() {
        let state = RadialState::from_profile(grid512(), 0.0, &profile).unwrap();
        let (v, scale) = table.weak_form_with_scale(&state, |r| p.energy(r).unwrap()).unwrap();
        if name == "zero" {
            assert_eq!(v, 0.0, "vacuum weak form must vanish identically");
        } else {
            worst = worst.max(v.abs() / scale);
        }
    }
    let traj = bump_trajectory();
    let m1_0 = moment(&traj.snapshots()[0], 1, &p).unwrap();
    let drift = traj
        .snapshots()
        .iter()
        .map(|s| ((moment(s, 1, &p).unwrap() - m1_0) / m1_0).abs())
        .fold(0.0f64, f64::max);
    let pass = worst <= 1e-12 && drift <= 1e-3;
    report(
        1,
        "energy conservation",
        pass,
        &format!("weak-form rel magnitude {worst:.2e} (<= 1e-12), M1 drift {drift:.2e} (<= 1e-3)"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_momentum_conservation() {
    let p = params();
    let rep = diagnostics::conservation_report(bump_trajectory(), &p, 1e9).unwrap();
    let pass = rep.momentum == 0.0;
    report(
        2,
        "momentum conservation",
        pass,
        "momentum functional identically zero for radial states (structural)",
    );
    assert!(pass);
}

#[test]
fn criterion_03_h_theorem() {
    let traj = bump_trajectory();
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    let mut worst = 0.0f64;
    for s in traj.snapshots() {
        let h = entropy(s).unwrap();
        if h > prev + 1e-8 * prev.abs() {
            monotone = false;
            worst = worst.max(h - prev);
        }
        prev = h;
    }

    // entropy weak form on randomized positive states
    let table = table512();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut signs_ok = true;
    let mut worst_positive = f64::NEG_INFINITY;
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(0.1..2.0), rng.gen_range(0.2..2.0));
        let (c, d, s0) = (
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.0..3.0),
        );
        let floor = rng.gen_range(0.01..0.1);
        let state = RadialState::from_profile(grid512(), 0.0, |r| {
            a * (-b * r * r).exp() + c * (-d * (r - s0) * (r - s0)).exp() + floor
        })
        .unwrap();
        let ev = state.evaluator().unwrap();
        let v = table
            .weak_form(&state, |r| {
                let f = ev.eval(r).max(1e-12);
                (f / (1.0 + f)).ln()
            })
            .unwrap();
        worst_positive = worst_positive.max(v);
        signs_ok &= v <= 0.0;
    }
    let pass = monotone && signs_ok;
    report(
        3,
        "H-theorem",
        pass,
        &format!(
            "H nonincreasing along {} snapshots (worst rise {worst:.1e}); entropy weak form <= 0 \
             on 20 random states (max {worst_positive:.3e})",
            traj.snapshots().len()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_04_equilibrium() {
    let p = params();
    let residual = |n: usize| -> f64 {
        let grid = Arc::new(RadialGrid::uniform(n, 8.0).unwrap());
        let table = build_kernel_table(grid.clone(), p, 2 * n).unwrap();
        let mut worst = 0.0f64;
        for c in [0.5, 1.0, 2.0] {
            let eq = equilibrium_state(c, grid.clone(), &p).unwrap();
            let q = table.apply(&eq).unwrap();
            let (_, nu) = table.gain_and_loss(&eq).unwrap();
            let scale = nu
                .iter()
                .zip(eq.values())
                .map(|(l, f)| l * f)
                .fold(0.0f64, f64::max);
            worst = worst.max(q.iter().fold(0.0f64, |a, &v| a.max(v.abs())) / scale);
        }
        worst
    };
    let coarse = residual(512);
    let fine = residual(2048);

    // the integrator must hold the equilibrium for a unit of time
    let mut drift = 0.0f64;
    for c in [0.5, 1.0, 2.0] {
        let eq = equilibrium_state(c, grid512(), &p).unwrap();
        let config = IntegratorConfig {
            t_end: 1.0,
            dt_init: 1e-3,
            dt_max: 1e-2,
            ..committed_config(1.0)
        };
        let traj = run(eq.clone(), &config, table512()).unwrap();
        drift = drift.max(
            eq.values()
                .iter()
                .zip(traj.final_state().values())
                .map(|(&a, &b)| (b - a).abs() / (a + 1e-8))
                .fold(0.0f64, f64::max),
        );
    }
    let pass = coarse <= 1e-3 && fine <= coarse / 3.0 && drift <= 1e-3;
    report(
        4,
        "equilibrium",
        pass,
        &format!(
            "residual {coarse:.2e} at n=512 (<= 1e-3), {fine:.2e} at n=2048 (>= 3x smaller), \
             run drift over t=1: {drift:.2e} (<= 1e-3)"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_oracle_equivalence() {
    let p = params();
    let table = table512();
    let radii_targets = [0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0];
    // the angular resolution must track the energy gradient across the
    // resonance ridge, which steepens with the probe radius
    let base_for = |rho: f64| {
        let s0 = std::f64::consts::SQRT_2 * rho;
        let n_mu = (6.0 * s0 * p.energy_slope(s0).unwrap() / 0.16).ceil() as usize;
        MollifierConfig {
            epsilon: 0.16,
            n_r: 420,
            n_mu: n_mu.max(420),
            r_limit: 8.0,
        }
    };
    let eps_list = [0.16, 0.08, 0.04, 0.02];
    let mut worst_rel = 0.0f64;
    let mut order_at_reference = 0.0f64;
    for (name, profile) in canonical_profiles() {
        let state = RadialState::from_profile(grid512(), 0.0, &profile).unwrap();
        let q = table.apply(&state).unwrap();
        let (_, nu) = table.gain_and_loss(&state).unwrap();
        for &target in &radii_targets {
            let i = grid512()
                .nodes()
                .iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1 - target).abs().partial_cmp(&(b.1 - target).abs()).unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            let rho = grid512().nodes()[i];
            let base = base_for(rho);
            if name == "zero" {
                let v = qboltz::oracle::mollified_collision(&profile, rho, &base, &p).unwrap();
                assert_eq!(v, 0.0, "vacuum oracle must vanish identically");
                continue;
            }
            let study = epsilon_study(&profile, rho, &eps_list, &base, &p, q[i]).unwrap();
            // local magnitude of either side's terms
            let scale = q[i].abs().max(nu[i] * state.values()[i]).max(1e-30);
            let rel = (study.extrapolated - q[i]).abs() / scale;
            worst_rel = worst_rel.max(rel);
            if name == "gaussian_bump" && (rho - 1.0).abs() < 0.01 {
                order_at_reference = (study.rows[0].error_vs_reduced
                    / study.rows[1].error_vs_reduced)
                    .log2();
            }
        }
    }
    let pass = worst_rel <= 1e-3 && order_at_reference >= 1.8;
    report(
        5,
        "oracle equivalence",
        pass,
        &format!(
            "worst extrapolated relative error {worst_rel:.2e} over 5 states x 8 radii \
             (<= 1e-3), observed mollifier order {order_at_reference:.2}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06_surface_geometry() {
    let p = params();
    // two-sided bound: area / (rho^2 min(1, rho)) inside one fixed bracket
    let mut ratios = Vec::new();
    for rho in [1e-2, 1e-1, 1.0, 10.0, 100.0] {
        let area = surface_area(rho, &p, 2048).unwrap();
        ratios.push(area / (rho * rho * rho.min(1.0)));
    }
    let bracket_ok = ratios.iter().all(|r| *r > 1.55 && *r < 3.46);

    // midpoint ring radius against the closed-form quartic root:
    // q^4 + (k1/k2 + rho^2/2) q^2 - (3/16) rho^4 = 0 at rho = 2
    let q = surfaces::ring_radius(SurfaceKind::Decay, 2.0, 0.5, &p).unwrap();
    let b: f64 = 1.0 + 0.5 * 4.0;
    let c4 = 0.75 * 16.0; // 4 c = (3/4) rho^4
    let q_exact = (0.5 * (-b + (b * b + c4).sqrt())).sqrt();
    let q12_ok = (q - q_exact).abs() < 1e-10;

    // stated small-rho asymptote
    let rho = 1e-2;
    let area = surface_area(rho, &p, 2048).unwrap();
    let stated = std::f64::consts::PI / 6.0 * rho.powi(3);
    let stated_ok = ((area - stated) / stated).abs() < 0.05;

    let pass = bracket_ok && q12_ok && stated_ok;
    report(
        6,
        "surface geometry",
        pass,
        &format!(
            "bracket ratios {:?} in [1.55, 3.46]: {bracket_ok}; q_1/2 vs quartic: {q12_ok}; \
             small-rho area {:.4e} vs stated (pi/6) rho^3 = {:.4e}: {stated_ok}",
            ratios, area, stated
        ),
    );
    assert!(
        pass,
        "the stated asymptote constant pi/6 is unattainable: the exact midpoint ring radius \
         q_1/2 = (sqrt(3)/4) sqrt(k2/k1) rho^2 (from the quartic this same criterion checks) \
         forces q_alpha -> sqrt(3) sqrt(k2/k1) alpha (1-alpha) rho^2, giving \
         area -> (pi/sqrt(3)) sqrt(k2/k1) rho^3 = {:.4e} here, observed {area:.4e}; \
         see criterion_06_surface_geometry_corrected_constant",
        std::f64::consts::PI / 3f64.sqrt() * rho.powi(3),
    );
}

#[test]
fn criterion_06_surface_geometry_corrected_constant() {
    // same checks with the asymptote constant that the exact midpoint
    // quartic root implies
    let p = params();
    let rho = 1e-2;
    let area = surface_area(rho, &p, 2048).unwrap();
    let corrected = std::f64::consts::PI / 3f64.sqrt() * rho.powi(3);
    let pass = ((area - corrected) / corrected).abs() < 0.05;
    report(
        6,
        "surface geometry, corrected asymptote",
        pass,
        &format!("small-rho area {area:.4e} vs (pi/sqrt 3) rho^3 = {corrected:.4e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_absorption_cutoff() {
    let p = params();
    let mut worst = 0.0f64;
    for rho in [0.1, 1.0, 10.0] {
        let closed = surfaces::alpha_max(rho, &p).unwrap();
        // independent route: bisect the alpha at which the constraint stops
        // changing sign at very large transverse radius
        let q_big = 1e6 * rho.max(1.0);
        let mut lo = 0.0;
        let mut hi = 10.0 * closed;
        assert!(surfaces::absorb_constraint(rho, hi, q_big, &p) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if surfaces::absorb_constraint(rho, mid, q_big, &p) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let probed = 0.5 * (lo + hi);
        worst = worst.max(((probed - closed) / closed).abs());
    }
    let pass = worst <= 1e-6;
    report(
        7,
        "absorption cutoff",
        pass,
        &format!("closed form vs sign-change probe, worst relative gap {worst:.2e} (<= 1e-6)"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_cross_reduction_identity() {
    // co-area surface integral over the decay surface == 1-D kernel integral
    // (2 pi / rho) int_0^rho r F(r) s*(r) / E'(s*) dr
    let p = params();
    let weights: [(&str, Box<dyn Fn(f64) -> f64>); 3] = [
        ("unit", Box::new(|_| 1.0)),
        ("exp", Box::new(|u: f64| (-u).exp())),
        ("quadratic", Box::new(|u: f64| u * u)),
    ];
    let mut worst = 0.0f64;
    for rho in [0.5f64, 1.5, 3.0] {
        for (_, f) in &weights {
            let lhs =
                surface_integral_n(SurfaceKind::Decay, rho, f, SurfaceWeight::Coarea, &p, 16384)
                    .unwrap();
            let n = 32768;
            let dr = rho / n as f64;
            let mut rhs = 0.0;
            for j in 0..n {
                let r = (j as f64 + 0.5) * dr;
                let s = p.energy_inverse(p.energy(rho).unwrap() - p.energy(r).unwrap()).unwrap();
                rhs += r * f(r) * s / p.energy_slope(s).unwrap() * dr;
            }
            rhs *= 2.0 * std::f64::consts::PI / rho;
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
    }
    let pass = worst <= 1e-6;
    report(
        8,
        "cross-reduction identity",
        pass,
        &format!("3 weights x 3 radii, worst relative gap {worst:.2e} (<= 1e-6)"),
    );
    assert!(pass);
}

/// Committed regression value: sup of the mass over the committed bump run.
const MASS_SUP_REGRESSION: f64 = 6.008297522919998;

#[test]
fn criterion_09_moment_bounds() {
    let p = params();
    let traj = bump_trajectory();
    let mut m2_at_1 = None;
    let mut m3_at_1 = None;
    let mut m2_sup = 0.0f64;
    let mut m3_sup = 0.0f64;
    let mut mass_sup = 0.0f64;
    let mut all_finite = true;
    for s in traj.snapshots() {
        let t = s.time();
        let m2 = moment(s, 2, &p).unwrap();
        let m3 = moment(s, 3, &p).unwrap();
        mass_sup = mass_sup.max(moment(s, 0, &p).unwrap());
        if t >= 0.1 {
            all_finite &= m2.is_finite() && m3.is_finite();
            m2_sup = m2_sup.max(m2);
            m3_sup = m3_sup.max(m3);
        }
        if m2_at_1.is_none() && t >= 1.0 {
            m2_at_1 = Some(m2);
            m3_at_1 = Some(m3);
        }
    }
    let m2_ratio = m2_sup / m2_at_1.unwrap();
    let m3_ratio = m3_sup / m3_at_1.unwrap();
    let mass_ok = (mass_sup - MASS_SUP_REGRESSION).abs() <= 0.1 * MASS_SUP_REGRESSION;
    let pass = all_finite && m2_ratio <= 2.0 && m3_ratio <= 2.0 && mass_ok;
    report(
        9,
        "moment bounds",
        pass,
        &format!(
            "M2 sup/M2(1) = {m2_ratio:.4}, M3 sup/M3(1) = {m3_ratio:.4} (<= 2); mass sup \
             {mass_sup:.6} within 10% of regression {MASS_SUP_REGRESSION:.6}"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_loss_shape() {
    let p = params();
    let mut ratios = Vec::new();
    for r_max in [4.0, 8.0, 16.0] {
        let n = (64.0 * r_max) as usize;
        let grid = Arc::new(RadialGrid::uniform(n, r_max).unwrap());
        let table = build_kernel_table(grid.clone(), p, 2 * n).unwrap();
        let eq = equilibrium_state(1.0, grid, &p).unwrap();
        ratios.push(diagnostics::loss_shape_monitor(&eq, &table).unwrap());
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let pass = ratios.iter().all(|r| (r - mean).abs() <= 0.2 * mean);
    report(
        10,
        "loss shape",
        pass,
        &format!("max nu/((1+M)(rho+rho^5)) across r_max in {{4,8,16}}: {ratios:?} (within 20% of mean)"),
    );
    assert!(pass);
}

/// Committed regression: min over nodes rho <= sqrt(2)/2 of
/// gain(rho)/(rho min(1, rho)) for the smoothed unit plateau on B_{1/2}.
const GAIN_RATIO_REGRESSION: f64 = 3.73200671e-2;

#[test]
fn criterion_11_gain_lower_bound() {
    let table = table512();
    let state =
        RadialState::from_profile(grid512(), 0.0, qboltz::cli::bump_profile(1.0, 0.5, 0.1))
            .unwrap();
    let gain = table.gain(&state).unwrap();
    let mut min_ratio = f64::INFINITY;
    for (&rho, &g) in grid512().nodes().iter().zip(&gain) {
        if rho <= std::f64::consts::SQRT_2 / 2.0 {
            min_ratio = min_ratio.min(g / (rho * rho.min(1.0)));
        }
    }
    let positive = min_ratio > 0.0;
    let pinned = if GAIN_RATIO_REGRESSION > 0.0 {
        ((min_ratio - GAIN_RATIO_REGRESSION) / GAIN_RATIO_REGRESSION).abs() <= 1e-4
    } else {
        true
    };
    let pass = positive && pinned;
    report(
        11,
        "gain lower bound",
        pass,
        &format!(
            "min gain/(rho min(1,rho)) over rho <= sqrt(2)/2: {min_ratio:.8e} (> 0, regression \
             {GAIN_RATIO_REGRESSION:.8e})"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_12_gaussian_lower_bound() {
    let traj = bump_trajectory();
    let rep = lower_bound_report(traj, 1.0, &default_theta2_grid()).unwrap();

    // identically empty initial data can never acquire a positive envelope
    let zero = RadialState::zeros(grid512());
    let zero_traj = run(zero, &committed_config(1.0), table512()).unwrap();
    let zero_rep = lower_bound_report(&zero_traj, 0.5, &default_theta2_grid()).unwrap();

    let pass = rep.verdict && rep.theta1_inf > 0.0 && !zero_rep.verdict && zero_rep.theta1_inf == 0.0;
    report(
        12,
        "Gaussian lower bound",
        pass,
        &format!(
            "bump run: inf theta1(t >= 1) = {:.4e} at theta2 = {:.3} (verdict {}); zero run \
             verdict {} with theta1 = {}",
            rep.theta1_inf, rep.theta2, rep.verdict, zero_rep.verdict, zero_rep.theta1_inf
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_13_positivity_and_determinism() {
    let traj = bump_trajectory();
    let nonneg = traj
        .snapshots()
        .iter()
        .all(|s| s.values().iter().all(|&v| v >= 0.0));

    // bit-identical repetition over a shorter committed window
    let a = run(bump_state(), &committed_config(0.25), table512()).unwrap();
    let b = run(bump_state(), &committed_config(0.25), table512()).unwrap();
    let mut identical = a.snapshots().len() == b.snapshots().len();
    if identical {
        for (sa, sb) in a.snapshots().iter().zip(b.snapshots()) {
            identical &= sa.time().to_bits() == sb.time().to_bits();
            identical &= sa
                .values()
                .iter()
                .zip(sb.values())
                .all(|(x, y)| x.to_bits() == y.to_bits());
        }
    }
    let pass = nonneg && identical;
    report(
        13,
        "positivity and determinism",
        pass,
        &format!(
            "no negative values over {} snapshots: {nonneg}; repeated runs bit-identical: {identical}",
            traj.snapshots().len()
        ),
    );
    assert!(pass);
}
