//! Batch diagnostics for circle homeomorphisms.
//!
//! ```text
//! wpdiag --homeo trig:0.3 --bases 0,pi/3,-pi/3 --mult 3 --depth 12 \
//!        --eta 0.5 --out runs/trig03 --format csv --jobs 8 --figures
//! ```

use adswp::diag::{emit_figures, run_diagnostics, Classification, OutputFormat, RunConfig};
use adswp::homeo::parse_angle;
use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "wpdiag", about = "Multiscale Weil-Petersson diagnostics for circle homeomorphisms")]
struct Args {
    /// Homeomorphism spec: rot:c | mobius:a,b,c,d | trig:a | pwl:b;s1,s2 |
    /// compose:spec|spec
    #[arg(long)]
    homeo: String,

    /// Comma-separated decomposition base points (pi expressions allowed)
    #[arg(long, default_value = "0,pi/3,-pi/3")]
    bases: String,

    /// Triple multiplier for the beta sums
    #[arg(long, default_value_t = 3.0)]
    mult: f64,

    /// Maximum dyadic depth
    #[arg(long, default_value_t = 12)]
    depth: u32,

    /// Majorant exponent eta in (0, 1)
    #[arg(long, default_value_t = 0.5)]
    eta: f64,

    /// Output directory
    #[arg(long)]
    out: PathBuf,

    /// Table format
    #[arg(long, default_value = "csv")]
    format: String,

    /// Worker threads (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,

    /// Also emit figures.json (sampled curves, diamonds, limiting domain)
    #[arg(long, default_value_t = false)]
    figures: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let bases: Result<Vec<f64>, _> = args.bases.split(',').map(parse_angle).collect();
    let bases = match bases {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let format = match args.format.as_str() {
        "csv" => OutputFormat::Csv,
        "json" => OutputFormat::Json,
        other => {
            eprintln!("error: unknown format {other} (csv|json)");
            return ExitCode::FAILURE;
        }
    };
    let cfg = RunConfig {
        homeo_spec: args.homeo,
        bases,
        multiplier: args.mult,
        max_depth: args.depth,
        eta: args.eta,
        out_dir: args.out,
        format,
        jobs: args.jobs,
        ..Default::default()
    };
    match run_diagnostics(&cfg) {
        Ok(summary) => {
            let label = match &summary.classification {
                Classification::WpConsistent => "WP-consistent".to_string(),
                Classification::NonWpConsistent => "non-WP-consistent".to_string(),
                Classification::Inconclusive { dissent } => {
                    format!("inconclusive ({dissent})")
                }
            };
            println!("{}: {label}", summary.homeo);
            println!("reports written to {}", cfg.out_dir.display());
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    if args.figures {
        match emit_figures(&cfg) {
            Ok(p) => println!("figures written to {}", p.display()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    ExitCode::SUCCESS
}
