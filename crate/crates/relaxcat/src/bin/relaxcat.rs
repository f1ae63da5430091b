//! Command-line front end: run cases, refinement studies, and stability
//! sweeps from flat key=value configuration files, emitting CSV.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use relaxcat::config::{parse_config, RunConfig};
use relaxcat::csvio;
use relaxcat::error::{ConfigError, HarnessError};
use relaxcat::harness::{
    self, eoc_study, find_case, RefCache, SchemeConfig, TestCase, TimeControl,
};
use relaxcat::mood::MoodConfig;
use relaxcat::scheme::{SchemeKind, SchemeSpec};
use relaxcat::stability::{stability_region, StabilityRegion};

#[derive(Parser)]
#[command(
    name = "relaxcat",
    version,
    about = "Semi-implicit finite-volume schemes for stiff balance laws"
)]
struct Cli {
    /// Run the built-in self-check suite and exit.
    #[arg(long, global = true)]
    seed_check: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Advance one case; writes solution.csv, diagnostics.csv, timing.csv.
    Run(CommonArgs),
    /// Grid-refinement study; writes convergence.csv.
    Convergence(CommonArgs),
    /// Stability-region sweep; writes stability.csv.
    Stability(CommonArgs),
    /// List the built-in cases.
    ListCases,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to a key=value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides out_dir from the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Config(String),
    Solver(String),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::UnknownCase(_) | HarnessError::BadRunConfig { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<relaxcat::StabilityError> for CliError {
    fn from(e: relaxcat::StabilityError) -> Self {
        CliError::Solver(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.seed_check {
        return run_seed_check();
    }
    let Some(command) = cli.command else {
        eprintln!("error: config: no command given (try `relaxcat list-cases`)");
        return ExitCode::from(2);
    };
    let outcome = match command {
        Command::Run(args) => cmd_run(&args),
        Command::Convergence(args) => cmd_convergence(&args),
        Command::Stability(args) => cmd_stability(&args),
        Command::ListCases => cmd_list_cases(),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: config: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(msg)) => {
            eprintln!("error: solver: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: io: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run_seed_check() -> ExitCode {
    let outcomes = relaxcat::selfcheck::seed_check();
    let mut failures = 0usize;
    for o in &outcomes {
        if o.passed {
            println!("ok   {}", o.name);
        } else {
            failures += 1;
            println!("FAIL {}", o.name);
        }
    }
    println!("{} checks, {} failures", outcomes.len(), failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

fn out_dir(args: &CommonArgs, cfg: &RunConfig) -> PathBuf {
    args.out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn required_case(cfg: &RunConfig) -> Result<TestCase, CliError> {
    let name = cfg
        .case
        .as_deref()
        .ok_or_else(|| CliError::Config("missing `case`".to_string()))?;
    Ok(find_case(name)?)
}

fn mood_config(case: &TestCase, cfg: &RunConfig) -> MoodConfig {
    MoodConfig {
        eps1: cfg.mood_eps1.unwrap_or(case.mood_eps1),
        eps2: cfg.mood_eps2.unwrap_or(case.mood_eps2),
        ..MoodConfig::default()
    }
}

/// Assemble the scheme configuration for one scheme spec, honoring the
/// case defaults where the file is silent.
fn scheme_config(case: &TestCase, cfg: &RunConfig, spec: SchemeSpec) -> SchemeConfig {
    let mood_on = spec.mood || cfg.mood_enabled.unwrap_or(false);
    let time = match cfg.fixed_dt {
        Some(dt) => TimeControl::FixedDt(dt),
        None => TimeControl::CflAdaptive(cfg.cfl.unwrap_or_else(|| case.cfl_for(spec.kind))),
    };
    SchemeConfig {
        scheme: spec.kind,
        time,
        mood: if mood_on {
            Some(mood_config(case, cfg))
        } else {
            None
        },
    }
}

fn cmd_run(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let case = required_case(&cfg)?;
    let spec = cfg
        .scheme
        .ok_or_else(|| CliError::Config("missing `scheme`".to_string()))?;
    let scheme_cfg = scheme_config(&case, &cfg, spec);
    let n_cells = cfg.n_cells.unwrap_or(200);
    let eps = cfg.eps.unwrap_or_else(|| case.eps_values[0]);
    let repeats = cfg.repeats.unwrap_or(1);

    let mut seconds = Vec::with_capacity(repeats);
    let mut first = None;
    for _ in 0..repeats {
        let report = harness::run(&case, &scheme_cfg, n_cells, eps)?;
        seconds.push(report.wall_seconds);
        if first.is_none() {
            first = Some(report);
        }
    }
    let report = first.expect("at least one repeat");

    let dir = out_dir(args, &cfg);
    write_out(
        &dir,
        "solution.csv",
        &csvio::solution_to_csv(&report.x, &report.component_names, &report.components),
    )?;
    write_out(
        &dir,
        "diagnostics.csv",
        &csvio::diagnostics_to_csv(&report.diags),
    )?;
    write_out(&dir, "timing.csv", &csvio::timing_to_csv(&seconds))?;
    println!(
        "{} [{}] N={} eps={:e}: {} steps to t={}, written to {}",
        report.case_name,
        report.scheme_label,
        report.n_cells,
        report.eps,
        report.diags.len(),
        case.t_final,
        dir.display()
    );
    Ok(())
}

fn cmd_convergence(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let case = required_case(&cfg)?;
    let schemes: Vec<SchemeSpec> = if !cfg.schemes.is_empty() {
        cfg.schemes.clone()
    } else if let Some(spec) = cfg.scheme {
        vec![spec]
    } else {
        return Err(CliError::Config("missing `schemes`".to_string()));
    };
    let grids = if cfg.grids.is_empty() {
        vec![100, 200, 400]
    } else {
        cfg.grids.clone()
    };
    let eps_list = if cfg.eps_list.is_empty() {
        match cfg.eps {
            Some(e) => vec![e],
            None => case.eps_values.clone(),
        }
    } else {
        cfg.eps_list.clone()
    };
    let reference_n = cfg.reference_n.unwrap_or(4096);
    let cache = RefCache::from_env();

    let mut table = harness::EocTable::default();
    for spec in schemes {
        let scheme_cfg = scheme_config(&case, &cfg, spec);
        let part = eoc_study(&case, &scheme_cfg, &grids, &eps_list, reference_n, &cache)?;
        table.rows.extend(part.rows);
    }
    let dir = out_dir(args, &cfg);
    write_out(&dir, "convergence.csv", &csvio::convergence_to_csv(&table))?;
    println!(
        "{}: {} rows written to {}",
        case.name,
        table.rows.len(),
        dir.join("convergence.csv").display()
    );
    Ok(())
}

fn cmd_stability(args: &CommonArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.config)?;
    let schemes: Vec<SchemeKind> = if !cfg.schemes.is_empty() {
        cfg.schemes
            .iter()
            .map(|s| {
                if s.mood {
                    Err(CliError::Config(
                        "the adaptive wrapper has no Fourier symbol; use cat2_trap/cat2_tay"
                            .to_string(),
                    ))
                } else {
                    Ok(s.kind)
                }
            })
            .collect::<Result<_, _>>()?
    } else {
        vec![SchemeKind::Cat2Trap, SchemeKind::Cat2Tay]
    };
    let a_values = if cfg.a_values.is_empty() {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    } else {
        cfg.a_values.clone()
    };
    let eps = cfg.eps.unwrap_or(1e-14);
    let k_samples = cfg.k_samples.unwrap_or(64);
    let mu_tol = cfg.mu_tol.unwrap_or(0.01);

    let mut regions: Vec<StabilityRegion> = Vec::new();
    for scheme in schemes {
        regions.push(stability_region(scheme, &a_values, eps, k_samples, mu_tol)?);
    }
    let dir = out_dir(args, &cfg);
    write_out(&dir, "stability.csv", &csvio::stability_to_csv(&regions))?;
    let rows: usize = regions.iter().map(|r| r.points.len()).sum();
    println!(
        "{} rows written to {}",
        rows,
        dir.join("stability.csv").display()
    );
    Ok(())
}

fn cmd_list_cases() -> Result<(), CliError> {
    for case in harness::registry() {
        println!(
            "{:20} domain [{}, {}] t_final={} cfl={} eps options {:?}",
            case.name, case.x_left, case.x_right, case.t_final, case.cfl, case.eps_values
        );
    }
    Ok(())
}
