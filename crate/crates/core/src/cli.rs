//! Command implementations behind the `qboltz` binary: scenario execution,
//! verification checks and table emission.
//!
//! All numeric text is written with the shortest round-trip `f64`
//! formatting, so emitted values re-parse exactly.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use crate::collision::{build_kernel_table, KernelTable};
use crate::config::{InitialCondition, RunConfig};
use crate::diagnostics::{
    self, default_theta2_grid, envelope_fit, equilibrium_state, DiagnosticsReport,
};
use crate::error::{Error, Result};
use crate::grid::{RadialGrid, RadialState, Spacing};
use crate::integrator::{run, Trajectory};
use crate::interp::MonotoneCubic;
use crate::oracle::{epsilon_study, MollifierConfig};
use crate::surfaces::{self, SurfaceKind};

/// C1 plateau-taper profile: `theta0` on `[0, radius]`, cubic taper to zero
/// over `[radius, radius + smoothing]`.
pub fn bump_profile(theta0: f64, radius: f64, smoothing: f64) -> impl Fn(f64) -> f64 {
    move |r: f64| {
        if r <= radius {
            theta0
        } else if r < radius + smoothing {
            let t = (r - radius) / smoothing;
            theta0 * (1.0 - (3.0 * t * t - 2.0 * t * t * t))
        } else {
            0.0
        }
    }
}

/// Build the grid named by the configuration.
pub fn build_grid(config: &RunConfig) -> Result<Arc<RadialGrid>> {
    let grid = match config.grid_spacing {
        Spacing::Uniform => RadialGrid::uniform(config.grid_n, config.grid_rmax)?,
        Spacing::Log => RadialGrid::log(
            config.grid_n,
            config.grid_rmin.unwrap_or(config.grid_rmax * 1e-3),
            config.grid_rmax,
        )?,
    };
    Ok(Arc::new(grid))
}

/// Build the configured initial state on `grid`.
pub fn build_initial_state(config: &RunConfig, grid: Arc<RadialGrid>) -> Result<RadialState> {
    match &config.init {
        InitialCondition::Equilibrium { c } => equilibrium_state(*c, grid, &config.params),
        InitialCondition::GaussianBump { theta0, radius, smoothing } => {
            RadialState::from_profile(grid, 0.0, bump_profile(*theta0, *radius, *smoothing))
        }
        InitialCondition::FromFile { path } => {
            let text = fs::read_to_string(path)?;
            let mut rho = Vec::new();
            let mut f = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with("rho") || line.starts_with('#') {
                    continue;
                }
                let mut parts = line.split(',');
                let (Some(a), Some(b)) = (parts.next(), parts.next()) else {
                    return Err(Error::config(format!("bad profile row: '{line}'")));
                };
                rho.push(a.trim().parse::<f64>().map_err(|_| {
                    Error::config(format!("bad rho value '{a}' in {}", path.display()))
                })?);
                f.push(b.trim().parse::<f64>().map_err(|_| {
                    Error::config(format!("bad f value '{b}' in {}", path.display()))
                })?);
            }
            if rho.len() < 2 {
                return Err(Error::config(format!(
                    "profile {} has fewer than 2 rows",
                    path.display()
                )));
            }
            let interp = MonotoneCubic::new(&rho, &f)?;
            let top = *rho.last().unwrap();
            RadialState::from_profile(grid, 0.0, |r| {
                if r > top {
                    0.0
                } else {
                    interp.eval(r).max(0.0)
                }
            })
        }
    }
}

fn write_snapshots(path: &Path, trajectory: &Trajectory) -> Result<()> {
    let mut out = String::from("t,rho,f\n");
    for snap in trajectory.snapshots() {
        let t = snap.time();
        for (&rho, &f) in snap.grid().nodes().iter().zip(snap.values()) {
            out.push_str(&format!("{t},{rho},{f}\n"));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

const DIAG_FIELDS: &str = "t,mass,m1,m2,m3,entropy,energy_drift,theta1,theta2,tail_loss";

fn diagnostics_rows(
    trajectory: &Trajectory,
    table: &KernelTable,
    config: &RunConfig,
) -> Result<Vec<DiagnosticsReport>> {
    let theta2_grid = default_theta2_grid();
    let m1_0 = diagnostics::moment(&trajectory.snapshots()[0], 1, &config.params)?;
    trajectory
        .snapshots()
        .iter()
        .map(|s| diagnostics::report_for(s, table, &config.params, m1_0, &theta2_grid))
        .collect()
}

fn write_diagnostics(dir: &Path, rows: &[DiagnosticsReport]) -> Result<()> {
    let mut csv = String::from(DIAG_FIELDS);
    csv.push('\n');
    let mut txt = String::new();
    for r in rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.t, r.mass, r.m1, r.m2, r.m3, r.entropy, r.energy_drift, r.theta1, r.theta2, r.tail_loss
        ));
        txt.push_str(&format!(
            "t={} mass={} m1={} m2={} m3={} entropy={} energy_drift={} theta1={} theta2={} tail_loss={}\n",
            r.t, r.mass, r.m1, r.m2, r.m3, r.entropy, r.energy_drift, r.theta1, r.theta2, r.tail_loss
        ));
    }
    fs::write(dir.join("diagnostics.csv"), csv)?;
    fs::write(dir.join("diagnostics.txt"), txt)?;
    Ok(())
}

/// Run the configured scenario and write snapshots plus diagnostics.
///
/// Exit status 0 on completion, 2 when the step controller aborted.
pub fn cmd_run(config: &RunConfig) -> Result<i32> {
    let grid = build_grid(config)?;
    let table = build_kernel_table(grid.clone(), config.params, 2 * grid.len())?;
    let initial = build_initial_state(config, grid)?;
    fs::create_dir_all(&config.out_dir)?;
    let trajectory = match run(initial, &config.integrator, &table) {
        Ok(t) => t,
        Err(Error::Numeric(msg)) => {
            eprintln!("step control aborted: {msg}");
            return Ok(2);
        }
        Err(e) => return Err(e),
    };
    write_snapshots(&config.out_dir.join("snapshots.csv"), &trajectory)?;
    let rows = diagnostics_rows(&trajectory, &table, config)?;
    write_diagnostics(&config.out_dir, &rows)?;
    if trajectory.positivity_clamps > 0 {
        eprintln!(
            "warning: explicit scheme clamped {} negative values",
            trajectory.positivity_clamps
        );
    }
    println!(
        "completed {} steps to t={}, {} snapshots -> {}",
        trajectory.steps,
        trajectory.final_state().time(),
        trajectory.snapshots().len(),
        config.out_dir.display()
    );
    Ok(0)
}

/// The verification subset feasible under an arbitrary configuration:
/// energy conservation of the weak form, the H-theorem along the configured
/// run, equilibrium stationarity on the configured grid, and envelope
/// positivity of the final state.  Prints one pass/fail line per check.
pub fn cmd_verify(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let grid = build_grid(config)?;
    let table = build_kernel_table(grid.clone(), config.params, 2 * grid.len())?;
    let initial = build_initial_state(config, grid.clone())?;
    let mut all_pass = true;
    let mut check = |name: &str, pass: bool, detail: String, out: &mut dyn Write| -> Result<()> {
        all_pass &= pass;
        writeln!(out, "{} {name}: {detail}", if pass { "PASS" } else { "FAIL" })?;
        Ok(())
    };

    // 1. energy conservation of the weak form on the initial state
    let (v, scale) = table.weak_form_with_scale(&initial, |r| config.params.energy_raw(r))?;
    check(
        "conservation_energy",
        v.abs() <= 1e-12 * scale.max(1e-300),
        format!("|weak form| = {:.3e}, scale = {:.3e}", v.abs(), scale),
        out,
    )?;

    // 2. H-theorem along the configured run
    let trajectory = run(initial, &config.integrator, &table)?;
    let mut h_ok = true;
    let mut prev = f64::INFINITY;
    let mut worst = 0.0f64;
    for s in trajectory.snapshots() {
        let h = diagnostics::entropy(s)?;
        if h > prev + 1e-8 * prev.abs() {
            h_ok = false;
            worst = worst.max(h - prev);
        }
        prev = h;
    }
    check(
        "h_theorem",
        h_ok,
        format!(
            "H nonincreasing over {} snapshots{}",
            trajectory.snapshots().len(),
            if h_ok { String::new() } else { format!(", worst rise {worst:.3e}") }
        ),
        out,
    )?;

    // 3. equilibrium stationarity on this grid
    let c = match &config.init {
        InitialCondition::Equilibrium { c } => *c,
        _ => 1.0,
    };
    let eq = equilibrium_state(c, grid, &config.params)?;
    let q = table.apply(&eq)?;
    let (_, nu) = table.gain_and_loss(&eq)?;
    let denom = nu
        .iter()
        .zip(eq.values())
        .map(|(l, f)| l * f)
        .fold(0.0f64, f64::max);
    let residual = q.iter().fold(0.0f64, |a, &v| a.max(v.abs())) / denom;
    check(
        "equilibrium_stationarity",
        residual <= 1e-3,
        format!("normalized residual = {residual:.3e}"),
        out,
    )?;

    // 4. envelope positivity and soundness on the final state
    let final_state = trajectory.final_state();
    let fit = envelope_fit(final_state, &default_theta2_grid())?;
    let sound = final_state
        .values()
        .iter()
        .zip(final_state.grid().nodes())
        .all(|(&f, &rho)| f >= fit.theta1 * (-fit.theta2 * rho * rho).exp() * (1.0 - 1e-9));
    check(
        "envelope_positivity",
        fit.theta1 > 0.0 && sound,
        format!("theta1 = {:.6e} at theta2 = {:.4}", fit.theta1, fit.theta2),
        out,
    )?;

    Ok(if all_pass { 0 } else { 1 })
}

/// Emit `n_alpha` ring samples of one surface as comma-separated rows.
pub fn cmd_surfaces(
    kind: SurfaceKind,
    rho: f64,
    n_alpha: usize,
    params: &crate::dispersion::DispersionParams,
    out: &mut impl Write,
) -> Result<()> {
    if n_alpha == 0 {
        return Err(Error::config("n_alpha must be >= 1"));
    }
    let domain = match kind {
        SurfaceKind::Decay => 1.0,
        _ => surfaces::alpha_max(rho, params)?,
    };
    writeln!(out, "kind,rho,alpha,q_alpha,density,grad_norm")?;
    let da = domain / n_alpha as f64;
    for j in 0..n_alpha {
        let alpha = (j as f64 + 0.5) * da;
        let s = surfaces::ring_sample(kind, rho, alpha, params)?;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            kind, rho, alpha, s.ring_radius, s.measure_density, s.grad_norm
        )?;
    }
    Ok(())
}

/// Emit the epsilon-refinement study of the mollified-delta oracle against
/// the reduced operator, as comma-separated text; the final `epsilon = 0` row
/// is the extrapolated limit.
pub fn cmd_oracle_check(config: &RunConfig, out: &mut impl Write) -> Result<i32> {
    let grid = build_grid(config)?;
    let table = build_kernel_table(grid.clone(), config.params, 2 * grid.len())?;
    let state = build_initial_state(config, grid.clone())?;
    let ev = state.evaluator()?;

    // probe at the node nearest rho = 1
    let i = grid
        .nodes()
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().partial_cmp(&(b.1 - 1.0).abs()).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let rho = grid.nodes()[i];
    let reduced = table.apply(&state)?[i];
    let profile = move |r: f64| ev.eval(r);
    let base = MollifierConfig {
        epsilon: 0.16,
        n_r: 256,
        n_mu: 256,
        r_limit: grid.r_max(),
    };
    let study = epsilon_study(
        &profile,
        rho,
        &[0.16, 0.08, 0.04, 0.02],
        &base,
        &config.params,
        reduced,
    )?;
    writeln!(out, "epsilon,value,error_vs_reduced")?;
    for row in &study.rows {
        writeln!(out, "{},{},{}", row.epsilon, row.value, row.error_vs_reduced)?;
    }
    writeln!(
        out,
        "0,{},{}",
        study.extrapolated,
        (study.extrapolated - reduced).abs()
    )?;
    if !study.monotone {
        writeln!(out, "# warning: error column not monotone above the rounding floor")?;
    }
    Ok(0)
}

/// Write the equilibrium profile for the configured grid to
/// `out_dir/equilibrium.csv`.
pub fn cmd_equilibrium(config: &RunConfig) -> Result<i32> {
    let grid = build_grid(config)?;
    let c = match &config.init {
        InitialCondition::Equilibrium { c } => *c,
        _ => 1.0,
    };
    let eq = equilibrium_state(c, grid, &config.params)?;
    fs::create_dir_all(&config.out_dir)?;
    let mut out = String::from("rho,f\n");
    for (&rho, &f) in eq.grid().nodes().iter().zip(eq.values()) {
        out.push_str(&format!("{rho},{f}\n"));
    }
    let path = config.out_dir.join("equilibrium.csv");
    fs::write(&path, out)?;
    println!("wrote {}", path.display());
    Ok(0)
}
