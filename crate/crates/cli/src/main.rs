use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contact_reduction::exterior::Rational;
use contact_reduction::scenario::{
    check_all, parse_checks, parse_mu, registry, run, to_json_bytes, Check, RunConfig, ScenarioSource,
};
use contact_reduction::{Catalog, Error};

/// Contact reduction scenarios: run checks, list the registry, or run the
/// acceptance suite.
#[derive(Parser)]
#[command(name = "contact-reduce", version)]
struct Cli {
    /// Lie algebra catalog (TOML) replacing the built-in one.
    #[arg(long, global = true, value_name = "FILE")]
    catalog: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checks on one scenario and write a JSON report.
    Run(RunArgs),
    /// List registry scenarios.
    List,
    /// Run the acceptance suite over the registry.
    CheckAll {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the full result table as JSON.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Registry id (omit when --config or --scenario-file names the scenario).
    scenario: Option<String>,
    /// Run configuration file; command-line flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Scenario definition file instead of a registry id.
    #[arg(long, value_name = "FILE", conflicts_with = "scenario")]
    scenario_file: Option<PathBuf>,
    /// Comma-separated coordinates of mu; rationals as p/q.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (default: <scenario>-report.json).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Comma-separated subset of: hypotheses, transversality,
    /// reduced_kernel, strata, albert, gs, reeb_flow (default: all that
    /// apply to the scenario; "" runs none).
    #[arg(long)]
    checks: Option<String>,
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn load_catalog(path: Option<&Path>) -> Result<Catalog, Error> {
    match path {
        Some(p) => Catalog::from_path(p),
        None => Ok(Catalog::builtin()),
    }
}

fn build_config(args: RunArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::from_path(p)?,
        None => {
            let id = match (&args.scenario, &args.scenario_file) {
                (Some(id), _) => id.clone(),
                (None, Some(_)) => String::new(),
                (None, None) => return Err(Error::Parse("a scenario id, --scenario-file or --config is required".into())),
            };
            RunConfig::new(&id)
        }
    };
    if let Some(id) = args.scenario {
        cfg.scenario = ScenarioSource::Registry(id);
    }
    if let Some(p) = args.scenario_file {
        cfg.scenario = ScenarioSource::File(p);
    }
    if let Some(m) = args.mu {
        cfg.mu = Some(parse_mu(&m)?);
    }
    if let Some(n) = args.samples {
        cfg.n_samples = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(c) = args.checks {
        cfg.checks = Some(parse_checks(&c)?);
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_mu(mu: &[Rational]) -> String {
    mu.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_run(args: RunArgs, catalog: &Catalog) -> Result<bool, Error> {
    let mut cfg = build_config(args)?;
    let scn = cfg.load_scenario(catalog)?;
    if cfg.out.is_none() {
        cfg.out = Some(PathBuf::from(format!("{}-report.json", scn.id())));
    }
    let (report, _) = run(&cfg, catalog)?;
    println!("scenario  {}", report.scenario);
    println!("mu        {}", fmt_mu(&cfg.mu_coords(&scn)?));
    let checks = if report.checks.is_empty() { "(none)".to_string() } else { report.checks.join(", ") };
    println!("checks    {checks}");
    if let Some(n) = report.samples_accepted {
        println!("samples   {n} accepted");
    }
    if let Some(q) = &report.quotient {
        println!(
            "quotient  dim Z {} - orbit {} = {} ({:?})",
            q.level_ray_dim, q.orbit_dim, q.quotient_dim, q.mode
        );
    }
    if let Some(a) = &report.albert {
        println!(
            "albert    level {} orbit {} quotient {}",
            a.level_dim, a.albert_orbit_dim, a.albert_quotient_dim
        );
    }
    if let Some(s) = &report.strata {
        println!("strata    {}", s.len());
    }
    for f in &report.failures {
        println!("FAIL      {f}");
    }
    println!("report    {}", cfg.out.as_ref().expect("set above").display());
    Ok(report.passed())
}

fn cmd_list(catalog: &Catalog) -> Result<bool, Error> {
    for s in registry(catalog)? {
        let kind = if s.is_numeric() { "numeric" } else { "bookkeeping" };
        println!(
            "{:<16} {:<11} {:<6} mu=({})  {}",
            s.id(),
            kind,
            s.algebra().name(),
            fmt_mu(s.default_mu()),
            s.description()
        );
    }
    println!();
    let names: Vec<&str> = Check::ALL.iter().map(|c| c.name()).collect();
    println!("checks: {}", names.join(", "));
    Ok(true)
}

fn cmd_check_all(seed: u64, out: Option<PathBuf>, catalog: &Catalog) -> Result<bool, Error> {
    let report = check_all(catalog, seed);
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(p) = out {
        std::fs::write(p, to_json_bytes(&report))?;
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", report.criteria.len() - failed, report.criteria.len());
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let catalog = match load_catalog(cli.catalog.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: cannot load catalog: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args, &catalog),
        Command::List => cmd_list(&catalog),
        Command::CheckAll { seed, out } => cmd_check_all(seed, out, &catalog),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
