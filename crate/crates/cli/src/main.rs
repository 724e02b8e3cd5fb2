mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use hydrostat::dynamics::{minimal_nu, run, run_global_experiment, Status};
use hydrostat::stochastic::{good_set_probability, GoodSetParams};
use hydrostat::verify::{self, VerifyOptions};
use serde::Serialize;

use config::{ConfigError, ExperimentSpec};
use output::{json_line, write_json_lines, write_series, RunSummary, SCHEMA_VERSION};

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "hydrostat",
    version,
    about = "Experiments for the stochastic inviscid primitive equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Io {
    /// Overrides the configured seed(s).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress progress messages on stderr.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One run per seed: CSV series plus a JSON-lines summary.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        io: Io,
    },
    /// Path ensemble at the intensity required for global existence.
    Ensemble {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `[ensemble] paths`.
        #[arg(long)]
        paths: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
    /// Monte Carlo probability of the good set.
    Goodset {
        /// Reads `[goodset]`; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        nu: Option<f64>,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        paths: Option<usize>,
        #[command(flatten)]
        io: Io,
    },
    /// Runs a named verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long, default_value_t = VerifyOptions::default().n)]
        n: usize,
        #[arg(long, default_value_t = VerifyOptions::default().samples)]
        samples: usize,
        #[command(flatten)]
        io: Io,
    },
}

fn exit_code(status: Status) -> u8 {
    match status {
        Status::Completed => 0,
        Status::Blowup => 10,
        Status::RadiusExhausted => 11,
        Status::GoodsetExit => 12,
    }
}

/// Config problems exit with 2, anything else with 1.
fn classify(err: &anyhow::Error) -> u8 {
    use hydrostat::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return EXIT_CONFIG;
    }
    match err.downcast_ref::<E>() {
        Some(
            E::InvalidParameter(_)
            | E::Unknown { .. }
            | E::Threshold(_)
            | E::InsufficientSamples { .. }
            | E::TruncationMismatch { .. },
        ) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

fn note(quiet: bool, msg: impl AsRef<str>) {
    if !quiet {
        eprintln!("{}", msg.as_ref());
    }
}

fn load(path: &Path, io: &Io) -> Result<ExperimentSpec> {
    let mut spec = config::load(path).map_err(|e| {
        let at = match e.line {
            Some(line) => format!("{}:{line}", path.display()),
            None => path.display().to_string(),
        };
        ConfigError {
            line: e.line,
            message: format!("{at}: {}", e.message),
        }
    })?;
    if let Some(seed) = io.seed {
        spec.seeds = vec![seed];
        spec.sim.seed = seed;
    }
    if let Some(out) = &io.out {
        spec.out = out.clone();
    }
    Ok(spec)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn simulate(path: &Path, io: &Io) -> Result<u8> {
    let spec = load(path, io)?;
    let u0 = spec.initial_datum()?;
    ensure_dir(&spec.out)?;
    let mut summaries = Vec::new();
    let mut code = 0;
    for &seed in &spec.seeds {
        let cfg = hydrostat::dynamics::SimConfig {
            seed,
            ..spec.sim.clone()
        };
        let record = run(&u0, &cfg)?;
        let csv = spec.out.join(format!("{}-seed{seed}.csv", spec.name));
        write_series(&csv, &record)?;
        note(
            io.quiet,
            format!(
                "[simulate] seed {seed}: {} at t = {} -> {}",
                record.status,
                record.t_final,
                csv.display()
            ),
        );
        if code == 0 {
            code = exit_code(record.status);
        }
        summaries.push(RunSummary::new(&spec.name, seed, None, &record));
    }
    for s in &summaries {
        println!("{}", json_line(s)?);
    }
    write_json_lines(
        &spec.out.join(format!("{}-summary.jsonl", spec.name)),
        &summaries,
    )?;
    Ok(code)
}

#[derive(Serialize)]
struct EnsembleSummary<'a> {
    schema_version: u32,
    name: &'a str,
    seed: u64,
    noise: &'a str,
    epsilon: f64,
    target: f64,
    nu: f64,
    alpha: f64,
    beta: f64,
    threshold_nu_sq: f64,
    constant: f64,
    paths: usize,
    completed: usize,
    completed_fraction: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    goodset_fraction: f64,
}

fn ensemble(path: &Path, paths: Option<usize>, io: &Io) -> Result<u8> {
    let spec = load(path, io)?;
    let ens = spec.ensemble.clone().ok_or_else(|| ConfigError {
        line: None,
        message: format!("{}: no [ensemble] section", path.display()),
    })?;
    let paths = paths.unwrap_or(ens.paths);
    if paths == 0 {
        return Err(ConfigError {
            line: None,
            message: "--paths must be at least 1".into(),
        }
        .into());
    }
    let u0 = spec.initial_datum()?;
    let mut template = spec.sim.clone();
    if !ens.nu_given {
        // Just above the threshold; the diffusion bound is strict.
        template.nu = minimal_nu(&u0, ens.epsilon, &template)? * (1.0 + 1e-3);
    }
    note(
        io.quiet,
        format!(
            "[ensemble] {} paths, {} noise, nu = {:.6}",
            paths, template.noise, template.nu
        ),
    );
    let exp = run_global_experiment(&u0, ens.epsilon, &template, paths)?;
    ensure_dir(&spec.out)?;
    let runs: Vec<RunSummary<'_>> = exp
        .records
        .iter()
        .enumerate()
        .map(|(i, r)| RunSummary::new(&spec.name, template.seed, Some(i as u64), r))
        .collect();
    write_json_lines(&spec.out.join(format!("{}-runs.jsonl", spec.name)), &runs)?;
    let summary = EnsembleSummary {
        schema_version: SCHEMA_VERSION,
        name: &spec.name,
        seed: template.seed,
        noise: &template.noise,
        epsilon: exp.epsilon,
        target: exp.target,
        nu: exp.nu,
        alpha: exp.alpha,
        beta: exp.beta,
        threshold_nu_sq: exp.threshold.nu_sq,
        constant: exp.threshold.constant,
        paths,
        completed: exp.completed,
        completed_fraction: exp.completed_fraction,
        std_error: exp.std_error,
        ci_low: exp.ci.0,
        ci_high: exp.ci.1,
        goodset_fraction: exp.goodset_fraction,
    };
    write_json_lines(
        &spec.out.join(format!("{}-ensemble.jsonl", spec.name)),
        std::slice::from_ref(&summary),
    )?;
    println!("{}", json_line(&summary)?);
    note(
        io.quiet,
        format!(
            "[ensemble] completed {}/{} = {:.4} (95% CI {:.4}..{:.4}), target {:.4}",
            exp.completed, paths, exp.completed_fraction, exp.ci.0, exp.ci.1, exp.target
        ),
    );
    Ok(0)
}

#[derive(Serialize)]
struct GoodSetRecord {
    schema_version: u32,
    name: &'static str,
    seed: u64,
    alpha: f64,
    beta: f64,
    nu: f64,
    t_end: f64,
    dt: f64,
    paths: usize,
    estimate: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    lower_bound: f64,
    exact_value: f64,
}

struct GoodSetArgs {
    alpha: Option<f64>,
    beta: Option<f64>,
    nu: Option<f64>,
    t_end: Option<f64>,
    dt: Option<f64>,
    paths: Option<usize>,
}

fn goodset(config_path: Option<&Path>, a: GoodSetArgs, io: &Io) -> Result<u8> {
    let from_file = match config_path {
        Some(p) => load(p, io)?.goodset,
        None => None,
    };
    let missing = |key: &str| ConfigError {
        line: None,
        message: format!("goodset needs --{key} (or a [goodset] section)"),
    };
    let base = from_file.as_ref();
    let alpha = a
        .alpha
        .or(base.map(|g| g.params.alpha))
        .ok_or_else(|| missing("alpha"))?;
    let beta = a
        .beta
        .or(base.map(|g| g.params.beta))
        .ok_or_else(|| missing("beta"))?;
    let nu =
        a.nu.or(base.map(|g| g.params.nu))
            .ok_or_else(|| missing("nu"))?;
    let t_end = a
        .t_end
        .or(base.map(|g| g.t_end))
        .ok_or_else(|| missing("t-end"))?;
    let dt = a.dt.or(base.map(|g| g.dt)).unwrap_or(1e-3);
    let paths = a
        .paths
        .or(base.map(|g| g.paths))
        .unwrap_or(config::DEFAULT_PATHS);
    let seed = io.seed.unwrap_or(0);
    let params = GoodSetParams::new(alpha, beta, nu)?;
    let r = good_set_probability(&params, t_end, dt, paths, seed)?;
    let record = GoodSetRecord {
        schema_version: SCHEMA_VERSION,
        name: "goodset",
        seed,
        alpha,
        beta,
        nu,
        t_end,
        dt,
        paths,
        estimate: r.estimate,
        std_error: r.std_error,
        ci_low: r.ci_low,
        ci_high: r.ci_high,
        lower_bound: r.lower_bound,
        exact_value: r.exact_value,
    };
    println!("{}", json_line(&record)?);
    if let Some(out) = &io.out {
        ensure_dir(out)?;
        write_json_lines(&out.join("goodset.jsonl"), std::slice::from_ref(&record))?;
    }
    note(
        io.quiet,
        format!(
            "[goodset] {}/{} paths stayed inside",
            r.survivors, r.n_paths
        ),
    );
    Ok(0)
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    name: &'a str,
    value: f64,
    bound: f64,
    passed: bool,
}

#[derive(Serialize)]
struct SuiteRecord<'a> {
    schema_version: u32,
    name: &'a str,
    seed: u64,
    passed: bool,
    checks: Vec<CheckRecord<'a>>,
}

fn verify_cmd(suite: &str, n: usize, samples: usize, io: &Io) -> Result<u8> {
    let opts = VerifyOptions {
        n,
        samples,
        seed: io.seed.unwrap_or(0),
    };
    let names: Vec<&str> = if suite == "all" {
        verify::registry().names()
    } else {
        vec![suite]
    };
    let reports = names
        .iter()
        .map(|s| verify::run_suite(s, &opts))
        .collect::<hydrostat::Result<Vec<_>>>()?;
    let records: Vec<SuiteRecord<'_>> = reports
        .iter()
        .map(|r| SuiteRecord {
            schema_version: SCHEMA_VERSION,
            name: r.suite,
            seed: opts.seed,
            passed: r.passed,
            checks: r
                .checks
                .iter()
                .map(|c| CheckRecord {
                    name: &c.name,
                    value: c.value,
                    bound: c.bound,
                    passed: c.passed,
                })
                .collect(),
        })
        .collect();
    for r in &records {
        println!("{}", json_line(r)?);
        note(
            io.quiet,
            format!(
                "[verify] {}: {}",
                r.name,
                if r.passed { "pass" } else { "FAIL" }
            ),
        );
    }
    if let Some(out) = &io.out {
        ensure_dir(out)?;
        write_json_lines(&out.join("verify.jsonl"), &records)?;
    }
    Ok(if records.iter().all(|r| r.passed) {
        0
    } else {
        EXIT_FAILURE
    })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HYDROSTAT_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| ConfigError {
            line: None,
            message: format!("HYDROSTAT_THREADS must be a positive integer, got `{v}`"),
        })?;
        if n == 0 {
            return Err(ConfigError {
                line: None,
                message: "HYDROSTAT_THREADS must be at least 1".into(),
            }
            .into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Simulate { config, io } => simulate(&config, &io),
        Command::Ensemble { config, paths, io } => ensemble(&config, paths, &io),
        Command::Goodset {
            config,
            alpha,
            beta,
            nu,
            t_end,
            dt,
            paths,
            io,
        } => goodset(
            config.as_deref(),
            GoodSetArgs {
                alpha,
                beta,
                nu,
                t_end,
                dt,
                paths,
            },
            &io,
        ),
        Command::Verify {
            suite,
            n,
            samples,
            io,
        } => verify_cmd(&suite, n, samples, &io),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let code = classify(&err);
            let kind = if code == EXIT_CONFIG {
                "config error"
            } else {
                "error"
            };
            match err.downcast_ref::<ConfigError>() {
                Some(e) => eprintln!("hydrostat: {kind}: {}", e.message),
                None => eprintln!("hydrostat: {kind}: {err:#}"),
            }
            ExitCode::from(code)
        }
    }
}
