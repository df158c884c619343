//! Times discovery on regular polygons and writes a markdown report.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use geodiscover_bench::polygon;
use geodiscover_core::discovery::LogVerdict;
use geodiscover_core::{discover, DiscoveryConfig};

#[derive(Parser)]
struct Args {
    /// Polygon sizes to run.
    #[arg(long, value_delimiter = ',', default_values_t = [12usize, 20])]
    sides: Vec<usize>,
    /// Also run each size with two free points pinned.
    #[arg(long)]
    pinned: bool,
    #[arg(long, default_value = "bench_report.md")]
    out: PathBuf,
}

fn main() {
    let args = Args::parse();
    let mut rows = String::new();
    let modes: &[bool] = if args.pinned { &[false, true] } else { &[false] };
    for &n in &args.sides {
        for &pin in modes {
            let f = polygon(n);
            let config = DiscoveryConfig {
                pin,
                ..DiscoveryConfig::default()
            };
            let start = Instant::now();
            let report = discover(&f.construction, f.target().unwrap(), &config).expect("discovery runs");
            let secs = start.elapsed().as_secs_f64();
            let checks = &report.timings.per_conjecture;
            let count = |v: LogVerdict| checks.iter().filter(|c| c.verdict == v).count();
            let line = format!(
                "| {n} | {} | {secs:.2} | {} | {} | {} | {} |",
                if pin { "yes" } else { "no" },
                report.theorems.len(),
                count(LogVerdict::Proved),
                count(LogVerdict::Refuted),
                count(LogVerdict::Unknown),
            );
            eprintln!("{line}");
            let _ = writeln!(rows, "{line}");
        }
    }
    let text = format!(
        "# Polygon scaling\n\n\
         Discovery on a regular n-gon built on the unit segment AB, target A, 5 s per check, \
         release build. Times are wall clock for the whole run.\n\n\
         | n | pinned | seconds | theorems | proved | refuted | unknown |\n\
         |---|---|---|---|---|---|---|\n{rows}"
    );
    std::fs::write(&args.out, text).expect("report written");
    eprintln!("wrote {}", args.out.display());
}
