use carleson::report::{run, RunConfig};
use clap::error::ErrorKind;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "carleson", version, about = "Grid-certified Carleson embedding checks")]
struct Args {
    /// One of: indices, classify, certify-box, certify-berezin, embed-check, canonical,
    /// witness-test, multiplier, oracle-validate.
    command: String,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Report path; defaults to the config's `output` field, then standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for inner parallel loops.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(USAGE),
            };
        }
    };
    if let Some(n) = args.threads {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("error: cannot start {n} worker threads");
            return ExitCode::from(USAGE);
        }
    }
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", args.config.display());
            return ExitCode::from(USAGE);
        }
    };
    let report = run(&args.command, &text);
    let out = args.out.or_else(|| RunConfig::from_json(&text).ok().and_then(|c| c.output).map(PathBuf::from));
    let json = report.to_json();
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, json) {
                eprintln!("error: writing {}: {e}", path.display());
                return ExitCode::from(USAGE);
            }
        }
        None => print!("{json}"),
    }
    if let Some(msg) = &report.error {
        eprintln!("{}: {msg}", args.command);
    }
    ExitCode::from(report.exit_code as u8)
}
