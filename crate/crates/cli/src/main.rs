use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qfock_cli::{cmd_dump, cmd_sweep, cmd_verify, parse_list, CliError, DumpObject, Format, RunConfig};

/// Truncated q-deformed Fock space: verification, sweeps and dumps.
///
/// Defaults: q in {-0.8, -0.5, -0.3, 0, 0.3, 0.5, 0.8}, lambda in
/// {0.05, 0.15, 0.3, 0.5, 0.75}, depth 12, terms depth/2, output directory
/// qfock-out, format csv, all cores. Flags override the config file.
///
/// Exit codes: 0 success, 1 a check failed, 2 bad configuration or input.
#[derive(Parser)]
#[command(name = "qfock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Comma-separated q values.
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<String>,
    /// Comma-separated lambda values.
    #[arg(long, global = true)]
    lambda: Option<String>,
    /// Truncation depth N.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Series terms K for S_inf and xi (default N/2).
    #[arg(long, global = true)]
    terms: Option<usize>,
    /// Comma-separated depths for `sweep` (default: the depth).
    #[arg(long, global = true)]
    sweep_depths: Option<String>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// csv or json (dump: json only).
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every invariant over the grid; writes verify.json.
    Verify,
    /// Threshold, verdict and singular data per (q, lambda, N); writes
    /// sweep.csv or sweep.json, sweep_timing.csv and sweep.gp.
    Sweep,
    /// Write one object as JSON at the first grid point.
    ///
    /// gram LEVEL | xi [K] | operator (wen N | wick WORD | wick_right WORD |
    /// t N | t_limit | s N | s_inf K | creation LETTER | annihilation LETTER |
    /// z N | flip | delta). Words are spelled with e, Ebar, Aux1, Aux2, ...
    Dump {
        /// gram, operator or xi.
        object: String,
        selector: Vec<String>,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.q {
        c.q = parse_list(s)?;
    }
    if let Some(s) = &cli.lambda {
        c.lambda = parse_list(s)?;
    }
    if let Some(n) = cli.depth {
        c.depth = n;
    }
    if cli.terms.is_some() {
        c.terms = cli.terms;
    }
    if let Some(s) = &cli.sweep_depths {
        c.sweep_depths = parse_list(s)?
            .into_iter()
            .map(|x| {
                if x >= 0.0 && x.fract() == 0.0 {
                    Ok(x as usize)
                } else {
                    Err(CliError::Config(format!("depth {x} is not a nonnegative integer")))
                }
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(j) = cli.jobs {
        c.jobs = j;
    }
    if let Some(f) = cli.format {
        c.format = f;
    }
    if let Some(o) = &cli.out {
        c.out = o.clone();
    }
    Ok(c)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let c = config(cli)?;
    match &cli.command {
        Command::Verify => {
            let report = cmd_verify(&c)?;
            println!(
                "{} checks, {} passed, {} failed; report in {}",
                report.total,
                report.passed,
                report.failed,
                c.out.join("verify.json").display()
            );
            for check in report.checks.iter().filter(|c| !c.passed) {
                println!("FAIL {check}: {}", check.detail);
            }
            match report.first_failure {
                Some(name) => Err(CliError::CheckFailed(name)),
                None => Ok(()),
            }
        }
        Command::Sweep => {
            let rows = cmd_sweep(&c)?;
            let errors = rows.iter().filter(|r| r.status != "ok").count();
            println!("{} rows ({errors} with errors) in {}", rows.len(), c.out.display());
            Ok(())
        }
        Command::Dump { object, selector } => {
            let object: DumpObject = object.parse()?;
            let path = cmd_dump(&c, object, selector, cli.format.unwrap_or(Format::Json))?;
            println!("{}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfock: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
