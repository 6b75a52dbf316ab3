use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qsobolev::harness::run_suite;
use qsobolev_cli::{emit_report, parse_config, Format, Overrides, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

/// Evaluate quantum Sobolev, Besov and Schatten inequalities over an ħ-sweep.
///
/// Exits with 0 when no pass/fail record failed, 1 on any failure and 2 on a
/// configuration error.
#[derive(Parser, Debug)]
#[command(name = "qsobolev", version)]
struct Args {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated check ids, or `all`.
    #[arg(long, value_delimiter = ',')]
    suite: Option<Vec<String>>,
    /// Comma-separated ħ values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    hbar: Option<Vec<f64>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix; the report goes to stdout without it.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Base grid `d,n,L`; n grows like ħ^{-1/2} along the sweep.
    #[arg(long)]
    grid: Option<String>,
}

fn load(args: &Args) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    let overrides = Overrides {
        suites: args.suite.clone(),
        hbar: args.hbar.clone(),
        seed: args.seed,
        out: args.out.clone(),
        format: args.format,
        grid: args.grid.clone(),
    };
    cfg.apply(&overrides).map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match load(&args) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let report = match run_suite(&cfg.suite) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match emit_report(&report, cfg.format, cfg.output.as_deref()) {
        Ok(Some(path)) => eprintln!("wrote {}", path.display()),
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAIL);
        }
    }
    let s = report.summary();
    eprintln!("{} records: {} pass, {} fail, {} report-only", s.total, s.pass, s.fail, s.report_only);
    for (id, worst) in &s.worst {
        if report.records().iter().any(|r| &r.check_id == id && r.status == qsobolev::harness::Status::Fail) {
            eprintln!("  FAIL {id}: worst ratio {worst}");
        }
    }
    if report.failed() {
        ExitCode::from(EXIT_FAIL)
    } else {
        ExitCode::SUCCESS
    }
}
