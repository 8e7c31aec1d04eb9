//! Flat `key = value` run configuration with `#` comments.
//!
//! `parse_config` validates everything it can and reports *all* violations at
//! once; `render` emits canonical text that parses back to the same
//! configuration.  Command-line flags are applied as key overrides before
//! interpretation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::dispersion::DispersionParams;
use crate::error::{Error, Result};
use crate::grid::Spacing;
use crate::integrator::{IntegratorConfig, Scheme};

/// Initial-condition selector; exactly one is active per run.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Bose-Einstein profile `1/(exp(c E) - 1)`.
    Equilibrium { c: f64 },
    /// Plateau of height `theta0` on `[0, radius]` with a C1 cubic taper of
    /// width `smoothing` (sharp indicators are rejected; they alias on the
    /// grid).
    GaussianBump { theta0: f64, radius: f64, smoothing: f64 },
    /// Profile read from a `rho,f` table and resampled onto the grid.
    FromFile { path: PathBuf },
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: DispersionParams,
    pub grid_n: usize,
    pub grid_rmax: f64,
    pub grid_spacing: Spacing,
    /// Inner radius of the log grid; unused for uniform spacing.
    pub grid_rmin: Option<f64>,
    pub integrator: IntegratorConfig,
    pub init: InitialCondition,
    pub out_dir: PathBuf,
}

/// Built-in defaults used when no configuration file is supplied; also the
/// documented default value of every optional key.
pub const DEFAULT_CONFIG: &str = "\
# dispersion constants
kappa0 = 1
kappa1 = 1
kappa2 = 1
# grid
grid.n = 512
grid.rmax = 8
grid.spacing = uniform
# time integration
dt_init = 1e-4
dt_min = 1e-12
dt_max = 5e-3
t_end = 1
eta = 0.1
f_scale = 1e-8
scheme = patankar_imex
snapshot_every = 20
# initial condition: plateau of height 1 on the unit ball
init = gaussian_bump
init.theta0 = 1
init.r0 = 1
init.smoothing = 0.25
out_dir = out
";

const KNOWN_KEYS: &[&str] = &[
    "kappa0", "kappa1", "kappa2", "m", "g", "n_c", "grid.n", "grid.rmax", "grid.spacing",
    "grid.rmin", "dt_init", "dt_min", "dt_max", "t_end", "eta", "f_scale", "scheme",
    "snapshot_every", "init", "init.c", "init.theta0", "init.r0", "init.smoothing", "init.path",
    "out_dir",
];

/// Parse configuration text, then apply `(key, value)` overrides (command
/// line flags), then validate.  Returns the configuration or the complete
/// list of violations.
pub fn parse_config_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut violations = Vec::new();
    let mut map: BTreeMap<String, String> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            violations.push(format!("line {}: expected 'key = value', got '{line}'", lineno + 1));
            continue;
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            violations.push(format!("unknown key: {key}"));
            continue;
        }
        if map.insert(key.clone(), value).is_some() {
            violations.push(format!("duplicate key: {key}"));
        }
    }
    for (key, value) in overrides {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            violations.push(format!("unknown key: {key}"));
            continue;
        }
        map.insert(key.clone(), value.clone());
    }

    let get_f64 = |key: &str, default: f64, violations: &mut Vec<String>| -> f64 {
        match map.get(key) {
            None => default,
            Some(v) => v.parse().unwrap_or_else(|_| {
                violations.push(format!("{key}: cannot parse '{v}' as a number"));
                default
            }),
        }
    };

    // dispersion constants: either the kappas or (m, g, n_c)
    let physical_given = ["m", "g", "n_c"].iter().any(|k| map.contains_key(*k));
    let kappa12_given = ["kappa1", "kappa2"].iter().any(|k| map.contains_key(*k));
    if physical_given && kappa12_given {
        violations.push("give either kappa1/kappa2 or m/g/n_c, not both".into());
    }
    let kappa0 = get_f64("kappa0", 1.0, &mut violations);
    let params = if physical_given {
        let m = get_f64("m", 1.0, &mut violations);
        let g = get_f64("g", 1.0, &mut violations);
        let n_c = get_f64("n_c", 1.0, &mut violations);
        DispersionParams::from_physical(kappa0, m, g, n_c)
    } else {
        DispersionParams::new(
            kappa0,
            get_f64("kappa1", 1.0, &mut violations),
            get_f64("kappa2", 1.0, &mut violations),
        )
    };
    let params = params.unwrap_or_else(|e| {
        violations.push(e.to_string());
        DispersionParams::default()
    });

    // grid
    let grid_n = match map.get("grid.n") {
        None => {
            violations.push("missing required key: grid.n".into());
            0
        }
        Some(v) => v.parse().unwrap_or_else(|_| {
            violations.push(format!("grid.n: cannot parse '{v}' as an integer"));
            0
        }),
    };
    if map.contains_key("grid.n") && grid_n < 32 {
        violations.push(format!("grid.n: n below minimum 32 (got {grid_n})"));
    }
    let grid_rmax = match map.get("grid.rmax") {
        None => {
            violations.push("missing required key: grid.rmax".into());
            0.0
        }
        Some(v) => v.parse().unwrap_or_else(|_| {
            violations.push(format!("grid.rmax: cannot parse '{v}' as a number"));
            0.0
        }),
    };
    if map.contains_key("grid.rmax") && !(grid_rmax > 0.0) {
        violations.push(format!("grid.rmax must be > 0, got {grid_rmax}"));
    }
    let grid_spacing = match map.get("grid.spacing").map(String::as_str) {
        None | Some("uniform") => Spacing::Uniform,
        Some("log") => Spacing::Log,
        Some(other) => {
            violations.push(format!("grid.spacing must be 'uniform' or 'log', got '{other}'"));
            Spacing::Uniform
        }
    };
    let grid_rmin = map.get("grid.rmin").map(|v| {
        v.parse().unwrap_or_else(|_| {
            violations.push(format!("grid.rmin: cannot parse '{v}' as a number"));
            0.0
        })
    });
    if grid_spacing == Spacing::Log {
        let rmin = grid_rmin.unwrap_or(grid_rmax * 1e-3);
        if !(rmin > 0.0 && rmin < grid_rmax) {
            violations.push(format!("log grid needs 0 < grid.rmin < grid.rmax, got {rmin}"));
        }
    } else if grid_rmin.is_some() {
        violations.push("grid.rmin only applies to log spacing".into());
    }

    // integrator
    if !map.contains_key("t_end") {
        violations.push("missing required key: t_end".into());
    }
    let scheme = match map.get("scheme").map(String::as_str) {
        None | Some("patankar_imex") => Scheme::PatankarImex,
        Some("heun_check") => Scheme::HeunCheck,
        Some(other) => {
            violations.push(format!("scheme must be 'patankar_imex' or 'heun_check', got '{other}'"));
            Scheme::PatankarImex
        }
    };
    let snapshot_every = match map.get("snapshot_every") {
        None => 20,
        Some(v) => v.parse().unwrap_or_else(|_| {
            violations.push(format!("snapshot_every: cannot parse '{v}' as an integer"));
            20
        }),
    };
    let integrator = IntegratorConfig {
        dt_init: get_f64("dt_init", 1e-4, &mut violations),
        dt_min: get_f64("dt_min", 1e-12, &mut violations),
        dt_max: get_f64("dt_max", 5e-3, &mut violations),
        t_end: get_f64("t_end", 1.0, &mut violations),
        eta: get_f64("eta", 0.1, &mut violations),
        f_scale: get_f64("f_scale", 1e-8, &mut violations),
        scheme,
        snapshot_every,
    };
    if let Err(e) = integrator.validate() {
        violations.push(e.to_string());
    }

    // initial condition: detect conflicting families
    let eq_keys = map.contains_key("init.c");
    let bump_keys = ["init.theta0", "init.r0", "init.smoothing"]
        .iter()
        .any(|k| map.contains_key(*k));
    let file_keys = map.contains_key("init.path");
    let family_count = [eq_keys, bump_keys, file_keys].iter().filter(|b| **b).count();
    if family_count > 1 {
        violations.push("conflicting initial conditions: keys from more than one of equilibrium(c), gaussian_bump, from_file are present".into());
    }
    let declared = map.get("init").map(String::as_str);
    let init = match declared {
        Some("equilibrium") if bump_keys || file_keys => {
            violations.push("init = equilibrium conflicts with gaussian_bump/from_file keys".into());
            InitialCondition::Equilibrium { c: 1.0 }
        }
        Some("gaussian_bump") if eq_keys || file_keys => {
            violations.push("init = gaussian_bump conflicts with equilibrium/from_file keys".into());
            InitialCondition::Equilibrium { c: 1.0 }
        }
        Some("from_file") if eq_keys || bump_keys => {
            violations.push("init = from_file conflicts with equilibrium/gaussian_bump keys".into());
            InitialCondition::Equilibrium { c: 1.0 }
        }
        Some("equilibrium") => InitialCondition::Equilibrium {
            c: get_f64("init.c", 1.0, &mut violations),
        },
        Some("from_file") => match map.get("init.path") {
            Some(p) => InitialCondition::FromFile { path: PathBuf::from(p) },
            None => {
                violations.push("init = from_file needs init.path".into());
                InitialCondition::Equilibrium { c: 1.0 }
            }
        },
        Some("gaussian_bump") | None => {
            if eq_keys && declared.is_none() {
                InitialCondition::Equilibrium {
                    c: get_f64("init.c", 1.0, &mut violations),
                }
            } else if file_keys && declared.is_none() {
                InitialCondition::FromFile {
                    path: PathBuf::from(map.get("init.path").unwrap()),
                }
            } else {
                let bump = InitialCondition::GaussianBump {
                    theta0: get_f64("init.theta0", 1.0, &mut violations),
                    radius: get_f64("init.r0", 1.0, &mut violations),
                    smoothing: get_f64("init.smoothing", 0.25, &mut violations),
                };
                if let InitialCondition::GaussianBump { theta0, radius, smoothing } = &bump {
                    if *theta0 < 0.0 {
                        violations.push(format!("init.theta0 must be >= 0, got {theta0}"));
                    }
                    if !(*radius > 0.0) {
                        violations.push(format!("init.r0 must be > 0, got {radius}"));
                    }
                    if !(*smoothing > 0.0) {
                        violations.push(format!(
                            "init.smoothing must be > 0 (sharp indicators are rejected), got {smoothing}"
                        ));
                    }
                }
                bump
            }
        }
        Some(other) => {
            violations.push(format!(
                "init must be 'equilibrium', 'gaussian_bump' or 'from_file', got '{other}'"
            ));
            InitialCondition::Equilibrium { c: 1.0 }
        }
    };
    if let InitialCondition::Equilibrium { c } = &init {
        if map.contains_key("init.c") && !(*c > 0.0) {
            violations.push(format!("init.c must be > 0, got {c}"));
        }
    }

    let out_dir = PathBuf::from(map.get("out_dir").map(String::as_str).unwrap_or("out"));

    if violations.is_empty() {
        Ok(RunConfig {
            params,
            grid_n,
            grid_rmax,
            grid_spacing,
            grid_rmin: if grid_spacing == Spacing::Log {
                Some(grid_rmin.unwrap_or(grid_rmax * 1e-3))
            } else {
                None
            },
            integrator,
            init,
            out_dir,
        })
    } else {
        Err(Error::InvalidConfig { violations })
    }
}

/// Parse configuration text with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with_overrides(text, &[])
}

/// Canonical text form; `parse_config(render(c))` reproduces `c` exactly.
pub fn render(config: &RunConfig) -> String {
    let mut s = String::new();
    let p = &config.params;
    s.push_str(&format!("kappa0 = {}\n", p.kappa0));
    s.push_str(&format!("kappa1 = {}\n", p.kappa1));
    s.push_str(&format!("kappa2 = {}\n", p.kappa2));
    s.push_str(&format!("grid.n = {}\n", config.grid_n));
    s.push_str(&format!("grid.rmax = {}\n", config.grid_rmax));
    s.push_str(&format!("grid.spacing = {}\n", config.grid_spacing));
    if let Some(rmin) = config.grid_rmin {
        s.push_str(&format!("grid.rmin = {rmin}\n"));
    }
    let i = &config.integrator;
    s.push_str(&format!("dt_init = {}\n", i.dt_init));
    s.push_str(&format!("dt_min = {}\n", i.dt_min));
    s.push_str(&format!("dt_max = {}\n", i.dt_max));
    s.push_str(&format!("t_end = {}\n", i.t_end));
    s.push_str(&format!("eta = {}\n", i.eta));
    s.push_str(&format!("f_scale = {}\n", i.f_scale));
    s.push_str(&format!("scheme = {}\n", i.scheme));
    s.push_str(&format!("snapshot_every = {}\n", i.snapshot_every));
    match &config.init {
        InitialCondition::Equilibrium { c } => {
            s.push_str("init = equilibrium\n");
            s.push_str(&format!("init.c = {c}\n"));
        }
        InitialCondition::GaussianBump { theta0, radius, smoothing } => {
            s.push_str("init = gaussian_bump\n");
            s.push_str(&format!("init.theta0 = {theta0}\n"));
            s.push_str(&format!("init.r0 = {radius}\n"));
            s.push_str(&format!("init.smoothing = {smoothing}\n"));
        }
        InitialCondition::FromFile { path } => {
            s.push_str("init = from_file\n");
            s.push_str(&format!("init.path = {}\n", path.display()));
        }
    }
    s.push_str(&format!("out_dir = {}\n", config.out_dir.display()));
    s
}
