use std::path::PathBuf;
use std::process::ExitCode;

use adelic_cli::{emit, parse_descriptor, run, CliError, Format};
use clap::Parser;

/// Evaluate one problem descriptor and print its report.
#[derive(Parser, Debug)]
#[command(name = "adelic", version)]
struct Args {
    /// Descriptor file (TOML or JSON).
    #[arg(long = "in")]
    input: PathBuf,
    /// Input format; taken from the file extension when omitted.
    #[arg(long)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the results table as CSV (the default for grid commands).
    #[arg(long)]
    csv: bool,
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("ADELIC_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Schema(format!("ADELIC_THREADS={v:?} is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Schema(e.to_string()))
}

fn execute(args: &Args) -> Result<(String, Vec<String>, Option<CliError>), CliError> {
    threads()?;
    let format = match args.format {
        Some(f) => f,
        None => match args.input.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            Some("toml") => Format::Toml,
            _ => {
                return Err(CliError::Schema(
                    "cannot tell the format from the file name; pass --format".into(),
                ))
            }
        },
    };
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| CliError::Schema(format!("{}: {e}", args.input.display())))?;
    let d = parse_descriptor(&text, format)?;
    let report = run(&d)?;
    let csv = args.csv || d.command.is_grid();
    let body = emit(&report, csv)?;
    Ok((body, report.warnings, report.partial))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (body, warnings, partial) = match execute(&args) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let written = match &args.out {
        Some(p) => std::fs::write(p, &body).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    match partial {
        Some(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        None => ExitCode::SUCCESS,
    }
}
