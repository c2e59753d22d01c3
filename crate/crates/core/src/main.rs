use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use picklab::cli::{self, CliError, Command, InputDoc, Invocation, Options, Report, TOL_ENV};
use picklab::kernel::DEFAULT_TOL;

#[derive(Parser, Debug)]
#[command(
    name = "picklab",
    version,
    about = "Pick interpolation and Drury-Arveson kernel experiments"
)]
struct Args {
    /// PSD and residual tolerance [env: PICKLAB_TOL] [default: 1e-10]
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for randomized cases; decimal or 0x-prefixed hex
    #[arg(long, global = true, value_parser = parse_seed, default_value = "0xDA5EED")]
    seed: u64,
    /// Truncation cap for coefficient series
    #[arg(long, global = true)]
    max_n: Option<usize>,
    /// Exact rational recursion
    #[arg(long, global = true)]
    exact: bool,
    /// Grid resolution for the functional distance
    #[arg(long, global = true, default_value_t = cli::DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Also write the report JSON here
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the report's series as CSV here
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Kernel Gram matrix and PSD certificate of a point set
    Gram { input: PathBuf },
    /// Minimal multiplier norm of an interpolation problem
    PickNorm { input: PathBuf },
    /// Pseudohyperbolic and functional distance between two points
    Distance { input: PathBuf },
    /// Pullback coefficients of a monomial curve
    Curve { input: PathBuf },
    /// Implementing-unitary checks for a ball automorphism
    Automorphism { input: PathBuf },
    /// Riesz-system diagnostics of a disc sequence
    Diagnose { input: PathBuf },
    /// Run a reproduction case, or "all"
    Repro { id: String },
    /// Re-run the invocation echoed in a report; --check compares computed values
    Rerun {
        report: PathBuf,
        #[arg(long)]
        check: bool,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn read_input(path: &Path) -> Result<String, CliError> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn parse_document(path: &Path) -> Result<InputDoc, CliError> {
    let text = read_input(path)?;
    InputDoc::parse(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn env_tol() -> Result<Option<f64>, CliError> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|e| CliError::Usage(format!("{TOL_ENV}={v:?}: {e}"))),
        Err(_) => Ok(None),
    }
}

fn build_invocation(args: &Args) -> Result<Invocation, CliError> {
    let mut options = Options {
        tol: env_tol()?.unwrap_or(DEFAULT_TOL),
        seed: args.seed,
        max_n: args.max_n,
        exact: args.exact,
        resolution: args.resolution,
    };
    if let Some(t) = args.tol {
        options.tol = t;
    }
    let (command, input) = match &args.command {
        Cmd::Gram { input } => (Command::Gram, input),
        Cmd::PickNorm { input } => (Command::PickNorm, input),
        Cmd::Distance { input } => (Command::Distance, input),
        Cmd::Curve { input } => (Command::Curve, input),
        Cmd::Automorphism { input } => (Command::Automorphism, input),
        Cmd::Diagnose { input } => (Command::Diagnose, input),
        Cmd::Repro { id } => return Ok(Invocation::repro(id, options)),
        Cmd::Rerun { .. } => unreachable!("rerun is handled separately"),
    };
    let mut doc = parse_document(input)?;
    // An explicit flag overrides the document's own tolerance.
    if args.tol.is_some() {
        doc.tol = None;
    }
    Ok(Invocation::command(command, doc, options))
}

fn load_reports(path: &Path) -> Result<Vec<Report>, CliError> {
    let text = read_input(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::Usage(format!(
            "{}:{}:{}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    parsed.map_err(|e| CliError::Usage(format!("{}: not a report: {e}", path.display())))
}

fn rerun(path: &Path, check: bool) -> Result<(Vec<Report>, bool), CliError> {
    let old = load_reports(path)?;
    let mut fresh = Vec::new();
    let mut identical = true;
    for r in &old {
        let mut new = cli::execute(&r.inputs)?;
        if r.inputs.repro_id.as_deref() == Some("all") {
            new.retain(|n| n.case == r.case);
        }
        identical &= new
            .first()
            .is_some_and(|n| n.computed == r.computed && n.pass == r.pass);
        fresh.extend(new);
    }
    Ok((fresh, !check || identical))
}

fn emit(args: &Args, reports: &[Report]) -> Result<(), CliError> {
    let json = if let [single] = reports {
        serde_json::to_string_pretty(single)
    } else {
        serde_json::to_string_pretty(reports)
    }
    .map_err(|e| CliError::Compute(e.to_string()))?;
    let mut stdout = io::stdout().lock();
    writeln!(stdout, "{json}").map_err(|e| CliError::Compute(e.to_string()))?;
    if let Some(path) = &args.out {
        fs::write(path, format!("{json}\n"))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &args.csv {
        let file = fs::File::create(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let mut w = io::BufWriter::new(file);
        for r in reports.iter().filter(|r| r.series.is_some()) {
            r.write_csv(&mut w)
                .map_err(|e| CliError::Compute(e.to_string()))?;
        }
    }
    Ok(())
}

fn main_inner(args: &Args) -> Result<i32, CliError> {
    let (reports, consistent) = match &args.command {
        Cmd::Rerun { report, check } => rerun(report, *check)?,
        _ => (cli::execute(&build_invocation(args)?)?, true),
    };
    emit(args, &reports)?;
    if !consistent {
        eprintln!("picklab: computed values differ from the original report");
        return Ok(1);
    }
    Ok(cli::exit_code(&reports))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("picklab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
