//! `biaxial <mode> --config FILE [--out DIR] [--seed N]`
//!
//! Exit codes: 0 success, 2 invalid configuration or arguments, 3 runtime
//! failure (divergence, failed solver, failed self-check).

use std::path::PathBuf;
use std::process::ExitCode;

use biaxial::io::{parse_config_unvalidated, Mode, RunConfig};
use biaxial::run::execute;
use clap::Parser;

#[derive(Parser, Debug)]
#[command(
    name = "biaxial",
    version,
    about = "Biaxial nematic energies, minimization and 2-D flow"
)]
struct Args {
    /// One of: minimize, flow2d, check, ellipticity, bubble-probe
    #[arg(value_parser = parse_mode)]
    mode: Mode,
    /// Configuration file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides `seed`
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| {
        let all: Vec<_> = Mode::ALL.iter().map(|m| m.as_str()).collect();
        format!("unknown mode {s:?}; expected one of {}", all.join(", "))
    })
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BIAXIAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("BIAXIAL_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(args: &Args) -> Result<(RunConfig, PathBuf), String> {
    let text =
        std::fs::read_to_string(&args.config).map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut config = parse_config_unvalidated(&text).map_err(|e| e.to_string())?;
    config.mode = args.mode;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&config.out_dir));
    config.out_dir = out.to_string_lossy().into_owned();
    config.validate().map_err(|e| e.to_string())?;
    Ok((config, out))
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (config, out) = match load(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&config, &out) {
        Ok(o) => {
            println!("{}", o.summary);
            println!("wrote {} file(s) to {}", o.files.len(), out.display());
            if o.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: {} reported a failure", config.mode.as_str());
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
    }
}
