//! `tgfield` — verification suites for the geometry of unit vector fields.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage or configuration
//! error. Set `TGFIELD_LOG=debug` for diagnostics.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tgfield_core::report::{
    verdict_word, SuiteConfig, SuiteKind, SuiteResult, RNG_ALGORITHM, SCHEMA_VERSION,
};
use tgfield_core::suite::{run_suite, standard_battery, trajectory_artifacts};
use tgfield_core::GeomError;

#[derive(Parser)]
#[command(
    name = "tgfield",
    version,
    about = "Numerical verification of unit vector field geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verification suite on a manifold/field pair
    Verify(VerifyArgs),
    /// Classify a unit field (shortcut for `verify --suite classify`)
    Classify(CommonArgs),
    /// Integrate field trajectories and export them as CSV
    Trajectory(TrajectoryArgs),
    /// Run the canonical battery over all built-in pairs
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Manifold registry key (flat:n | sphere:n | warped:a,alpha0)
    #[arg(long)]
    manifold: String,
    /// Field registry key (flat-parallel | flat-radial | flat-tg:a,w0 |
    /// hopf:m | tg2d:a,w0 | coord-unit:axis)
    #[arg(long)]
    field: String,
    /// Number of sample points
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// RNG seed (suite output is a pure function of config and seed)
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Tolerance override for the suite's main checks
    #[arg(long)]
    tol: Option<f64>,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which suite to run
    #[arg(long, value_parser = parse_suite)]
    suite: SuiteKind,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Directory the per-start CSV files are written into
    #[arg(long, default_value = "trajectories")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn parse_suite(s: &str) -> Result<SuiteKind, String> {
    SuiteKind::parse(s).ok_or_else(|| {
        format!(
            "unknown suite `{s}` (expected one of {})",
            SuiteKind::all().join(", ")
        )
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TGFIELD_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, GeomError> {
    match cli.command {
        Command::Verify(args) => suite_command(args.common, args.suite),
        Command::Classify(common) => suite_command(common, SuiteKind::Classify),
        Command::Trajectory(args) => trajectory_command(args),
        Command::Report(args) => report_command(args),
    }
}

fn suite_command(common: CommonArgs, suite: SuiteKind) -> Result<bool, GeomError> {
    let config = SuiteConfig {
        manifold: common.manifold.clone(),
        field: common.field.clone(),
        suite,
        samples: common.samples,
        seed: common.seed,
        tolerance: common.tol,
    };
    let result = run_suite(&config)?;
    emit(&result, common.out.as_deref(), common.format)?;
    summarize(&result);
    Ok(result.passed())
}

fn trajectory_command(args: TrajectoryArgs) -> Result<bool, GeomError> {
    let started = Instant::now();
    let config = SuiteConfig {
        manifold: args.common.manifold.clone(),
        field: args.common.field.clone(),
        suite: SuiteKind::Trajectory,
        samples: args.common.samples,
        seed: args.common.seed,
        tolerance: args.common.tol,
    };
    let (checks, files) = trajectory_artifacts(&config)?;
    std::fs::create_dir_all(&args.out_dir)?;
    for (name, content) in &files {
        std::fs::write(args.out_dir.join(name), content)?;
    }
    let pass = checks.iter().all(|c| c.pass);
    let result = SuiteResult {
        schema_version: SCHEMA_VERSION,
        rng: RNG_ALGORITHM,
        config,
        checks,
        classification: None,
        verdict: verdict_word(pass),
        wall_time: started.elapsed(),
    };
    emit(&result, args.common.out.as_deref(), args.common.format)?;
    eprintln!(
        "wrote {} trajectory file(s) to {}",
        files.len(),
        args.out_dir.display()
    );
    summarize(&result);
    Ok(pass)
}

fn report_command(args: ReportArgs) -> Result<bool, GeomError> {
    let mut results = Vec::new();
    let mut all_pass = true;
    for config in standard_battery(args.seed) {
        let result = run_suite(&config)?;
        eprintln!(
            "{:<14} {:<28} {:<22} {} ({} checks, {:.2?})",
            format!("{:?}", config.suite).to_lowercase(),
            config.manifold,
            config.field,
            result.verdict,
            result.checks.len(),
            result.wall_time,
        );
        all_pass &= result.passed();
        results.push(result);
    }
    let doc = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "rng": RNG_ALGORITHM,
        "seed": args.seed,
        "results": results.iter().map(|r| serde_json::to_value(r).unwrap()).collect::<Vec<_>>(),
        "verdict": verdict_word(all_pass),
    });
    let payload = serde_json::to_string_pretty(&doc).expect("report serializes");
    match args.out {
        Some(path) => std::fs::write(path, payload)?,
        None => println!("{payload}"),
    }
    eprintln!("battery verdict: {}", verdict_word(all_pass));
    Ok(all_pass)
}

fn emit(result: &SuiteResult, out: Option<&Path>, format: Format) -> Result<(), GeomError> {
    let payload = match format {
        Format::Json => result.to_json(),
        Format::Csv => result.to_csv(),
    };
    match out {
        Some(path) => std::fs::write(path, payload)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{payload}")?;
        }
    }
    Ok(())
}

fn summarize(result: &SuiteResult) {
    for c in &result.checks {
        eprintln!(
            "  {:<34} {:<4} max defect {:.3e} (tol {:.1e}, {} samples)",
            c.name,
            if c.pass { "ok" } else { "FAIL" },
            c.max_defect,
            c.tolerance,
            c.samples
        );
    }
    if let Some(class) = &result.classification {
        let flag = |f: &tgfield_core::analysis::FlagResult| if f.holds { "yes" } else { "no" };
        eprintln!(
            "  geodesic {}, holonomic {}, killing {}, covariantly normal {}, strongly normal {}, invariant {}",
            flag(&class.geodesic),
            flag(&class.holonomic),
            flag(&class.killing),
            flag(&class.covariantly_normal),
            flag(&class.strongly_normal),
            flag(&class.invariant),
        );
    }
    eprintln!("verdict: {} ({:.2?})", result.verdict, result.wall_time);
}
