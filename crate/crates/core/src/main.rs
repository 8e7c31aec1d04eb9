use std::io::Write;
use std::process::ExitCode;

use qboltz::cli;
use qboltz::config::{parse_config_with_overrides, DEFAULT_CONFIG};
use qboltz::error::Result;
use qboltz::surfaces::SurfaceKind;

const USAGE: &str = "\
qboltz - radial solver for the condensate-growth quantum Boltzmann equation

USAGE:
    qboltz <COMMAND> [ARGS] [FLAGS]

COMMANDS:
    run                          advance the configured scenario, write
                                 snapshots.csv and diagnostics to out_dir
    verify                       run the verification checks feasible under
                                 the configuration; exit 0 iff all pass
    surfaces <KIND> <RHO> <N>    emit N ring samples of a resonance surface
                                 (KIND: decay | absorb | absorb_shifted)
    oracle-check                 emit the mollified-delta refinement study
    equilibrium                  write the equilibrium profile to out_dir

FLAGS (override configuration keys):
    --config PATH    configuration file (flat key = value, '#' comments);
                     built-in defaults are used when absent
    --out DIR        out_dir
    --n N            grid.n
    --rmax X         grid.rmax
    --dt X           dt_init
    --t-end X        t_end
    --kappa0 X / --kappa1 X / --kappa2 X

Runs are deterministic; there is no seed to set.
";

fn flag_key(flag: &str) -> Option<&'static str> {
    match flag {
        "--out" => Some("out_dir"),
        "--n" => Some("grid.n"),
        "--rmax" => Some("grid.rmax"),
        "--dt" => Some("dt_init"),
        "--t-end" => Some("t_end"),
        "--kappa0" => Some("kappa0"),
        "--kappa1" => Some("kappa1"),
        "--kappa2" => Some("kappa2"),
        _ => None,
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch() -> Result<i32> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if args.is_empty() || args[0] == "-h" || args[0] == "--help" {
        print!("{USAGE}");
        return Ok(if args.is_empty() { 1 } else { 0 });
    }
    let command = args[0].as_str();

    // split positional arguments from flags
    let mut positional = Vec::new();
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut config_path: Option<String> = None;
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            i += 1;
            config_path = Some(
                args.get(i)
                    .ok_or_else(|| qboltz::Error::Config("--config needs a path".into()))?
                    .clone(),
            );
        } else if let Some(key) = flag_key(a) {
            i += 1;
            let value = args
                .get(i)
                .ok_or_else(|| qboltz::Error::Config(format!("{a} needs a value")))?;
            overrides.push((key.to_string(), value.clone()));
        } else if a.starts_with("--") {
            return Err(qboltz::Error::Config(format!("unknown flag: {a}")));
        } else {
            positional.push(a.clone());
        }
        i += 1;
    }

    let text = match &config_path {
        Some(p) => std::fs::read_to_string(p)?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let config = parse_config_with_overrides(&text, &overrides);

    let stdout = std::io::stdout();
    match command {
        "run" => cli::cmd_run(&config?),
        "verify" => {
            let mut out = stdout.lock();
            cli::cmd_verify(&config?, &mut out)
        }
        "surfaces" => {
            if positional.len() != 3 {
                return Err(qboltz::Error::Config(
                    "surfaces needs: <decay|absorb|absorb_shifted> <rho> <n_alpha>".into(),
                ));
            }
            let kind = match positional[0].as_str() {
                "decay" => SurfaceKind::Decay,
                "absorb" => SurfaceKind::Absorb,
                "absorb_shifted" => SurfaceKind::AbsorbShifted,
                other => {
                    return Err(qboltz::Error::Config(format!("unknown surface kind: {other}")))
                }
            };
            let rho: f64 = positional[1]
                .parse()
                .map_err(|_| qboltz::Error::Config(format!("bad rho: {}", positional[1])))?;
            let n: usize = positional[2]
                .parse()
                .map_err(|_| qboltz::Error::Config(format!("bad n_alpha: {}", positional[2])))?;
            let params = config?.params;
            let mut out = stdout.lock();
            cli::cmd_surfaces(kind, rho, n, &params, &mut out)?;
            out.flush()?;
            Ok(0)
        }
        "oracle-check" => {
            let mut out = stdout.lock();
            cli::cmd_oracle_check(&config?, &mut out)
        }
        "equilibrium" => cli::cmd_equilibrium(&config?),
        other => {
            eprintln!("unknown command: {other}\n");
            eprint!("{USAGE}");
            Ok(1)
        }
    }
}
