//! `wigner-bench`: runs one benchmark scenario and writes its artifacts.
//!
//! Exit status 0 on success, 1 on a configuration error, 2 when the run
//! itself fails. Errors are printed to stderr as a JSON object.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;
use wigner_carrier::bench::{
    run_scenario, ConfigFile, GridPreset, Scenario, ScenarioConfig, Scheme,
};
use wigner_carrier::error::Error;

#[derive(Debug, Parser)]
#[command(
    name = "wigner-bench",
    version,
    about = "Wigner carrier/residual benchmarks"
)]
struct Cli {
    /// harmonic-null, quartic-compare, quartic-residual-field, quartic-reconstruct,
    /// signed-path-demo or underdetermination-demo
    #[arg(long)]
    scenario: Option<Scenario>,
    /// TOML file with any of the settings below; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_final: Option<f64>,
    /// Number of evenly spaced snapshots, endpoints included.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "WIGNER_BENCH_OUT")]
    out: Option<PathBuf>,
    /// balanced or reduced
    #[arg(long)]
    grid_preset: Option<GridPreset>,
    /// Write dense `field_<name>_<time>.csv` dumps.
    #[arg(long)]
    dump_fields: bool,
    /// lie, strang, lie-rk4 or strang-rk4
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    seed: Option<u64>,
}

fn fail(code: u8, stage: &str, e: &Error) -> ExitCode {
    let body = json!({ "error": { "stage": stage, "kind": e.kind(), "message": e.to_string() } });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn resolve(cli: Cli) -> Result<ScenarioConfig, Error> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let scenario = cli.scenario.or(file.scenario).ok_or_else(|| {
        Error::InvalidConfig("no scenario given (use --scenario or the config file)".into())
    })?;
    let mut cfg = ScenarioConfig::new(scenario);
    cfg.apply(&file);
    cfg.scenario = scenario;
    macro_rules! flag {
        ($($f:ident),*) => { $( if let Some(v) = cli.$f { cfg.$f = v; } )* };
    }
    flag!(lambda, dt, t_final, samples, out, grid_preset, scheme, seed);
    cfg.dump_fields |= cli.dump_fields;
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.render().to_string();
            return fail(
                1,
                "arguments",
                &Error::InvalidConfig(msg.trim().to_string()),
            );
        }
    };
    let cfg = match resolve(cli) {
        Ok(cfg) => cfg,
        Err(e) => return fail(1, "config", &e),
    };
    match run_scenario(&cfg) {
        Ok(outcome) => {
            for f in &outcome.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(2, "run", &e),
    }
}
