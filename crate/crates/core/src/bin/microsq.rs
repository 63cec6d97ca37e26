use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use microsq::arith::classify;
use microsq::circle::{
    build_major_arcs, minor_arc_moment, singular_integral_area_oracle, MajorArcIntegrator, Resolution,
    SingularIntegral,
};
use microsq::density::{singular_series_additive, singular_series_multiplicative};
use microsq::expsum::ThetaParams;
use microsq::reps::{count_reps, enumerate_reps, min_microsquare};
use microsq::sphere::{lattice_points, min_squared_distance, spacing_scan, spacing_violation_fractions, Metric};
use microsq::survey::{
    exceptional_scan, survey_records, two_square_gap_scan, verify, write_records, ScanConfig, ScanSettings,
    Suite, Variant,
};
use microsq::{Error, Result};

#[derive(Parser)]
#[command(name = "microsq", version, about = "Sums of three squares with a microsquare")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesMode {
    Add,
    Mult,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Euclid,
    Sq,
}

#[derive(Subcommand)]
enum Command {
    /// Count (and optionally list) representations with x3 <= Y.
    Repr {
        n: u64,
        #[arg(long)]
        ymax: u64,
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        allow_zero: bool,
        /// Count pairs with x1 <= x2 instead of ordered pairs.
        #[arg(long)]
        unordered: bool,
    },
    /// Exceptional-set census over (X/2, X] and survey rows as CSV.
    Scan {
        #[arg(long)]
        xmin: Option<u64>,
        #[arg(long)]
        xmax: Option<u64>,
        #[arg(long)]
        ymax: Option<u64>,
        #[arg(long)]
        four: bool,
        #[arg(long)]
        w: Option<f64>,
        #[arg(long)]
        stride: Option<u64>,
        #[arg(long)]
        exceptions_only: bool,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Truncated singular series.
    Sseries {
        n: u64,
        #[arg(long)]
        w: f64,
        #[arg(long, value_enum, default_value = "both")]
        mode: SeriesMode,
    },
    /// Major-arc integral against S(n; W) J(n; W).
    Major {
        n: u64,
        #[arg(long)]
        w: f64,
        #[arg(long)]
        ymax: u64,
        /// Scale X with X/2 < n <= X; defaults to n.
        #[arg(long)]
        x: Option<u64>,
        /// Also evaluate with the refined quadrature.
        #[arg(long)]
        high: bool,
    },
    /// Minor-arc moment of |f|^4 |g|^2.
    Moment {
        #[arg(long)]
        x: u64,
        #[arg(long)]
        ymax: u64,
        #[arg(long)]
        w: f64,
    },
    /// Lattice points on the sphere and their minimum spacing.
    Sphere {
        n: Option<u64>,
        #[arg(long, value_enum, default_value = "euclid")]
        metric: MetricArg,
        /// Range `A..B` (inclusive) for a CSV scan.
        #[arg(long, conflicts_with = "n")]
        range: Option<String>,
    },
    /// Gaps between sums of two squares up to X.
    Gaps {
        #[arg(long)]
        limit: u64,
    },
    /// Run a self-check suite: lemmas, orthogonality, truncation or all.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Error::InvalidArgument(format!("range {s:?} is not of the form A..B")))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidArgument(format!("bad range bound {t:?}")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(Error::InvalidArgument(format!("empty range {s}")));
    }
    Ok((a, b))
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Repr {
            n,
            ymax,
            enumerate,
            allow_zero,
            unordered,
        } => {
            let count = count_reps(n, ymax, !unordered, allow_zero)?;
            let mut v = json!({
                "n": n,
                "y": ymax,
                "ordered": !unordered,
                "allow_zero": allow_zero,
                "count": count,
                "eligibility": classify(n).to_string(),
                "min_microsquare": min_microsquare(n),
            });
            if enumerate {
                v["representations"] = serde_json::to_value(enumerate_reps(n, ymax, allow_zero)?)?;
            }
            print_json(&v)?;
        }
        Command::Scan {
            xmin,
            xmax,
            ymax,
            four,
            w,
            stride,
            exceptions_only,
            config,
            out,
        } => {
            let flags = ScanSettings {
                x_min: xmin,
                x_max: xmax,
                y_max: ymax,
                w,
                variant: four.then_some(Variant::Four),
                stride,
                exceptions_only: exceptions_only.then_some(true),
            };
            let file = match config {
                Some(path) => ScanSettings::parse(&std::fs::read_to_string(path)?)?,
                None => ScanSettings::default(),
            };
            let cfg = ScanConfig::resolve(flags.over(file))?;
            let records = survey_records(&cfg)?;
            let census = exceptional_scan(cfg.x_max, cfg.y_max, cfg.variant)?;
            let writer = BufWriter::new(File::create(&out)?);
            write_records(writer, &cfg.header_lines(), &records)?;
            print_json(&json!({
                "config": cfg,
                "rows_written": records.len(),
                "summary": census.summary,
                "exceptions": census.exceptions,
            }))?;
        }
        Command::Sseries { n, w, mode } => {
            let mut v = json!({ "n": n, "w": w, "eligibility": classify(n).to_string() });
            if matches!(mode, SeriesMode::Add | SeriesMode::Both) {
                v["additive"] = json!(singular_series_additive(n, w)?);
            }
            if matches!(mode, SeriesMode::Mult | SeriesMode::Both) {
                let table = singular_series_multiplicative(n, w)?;
                v["multiplicative"] = json!(table.value);
                v["log_w_times_multiplicative"] = json!(w.ln() * table.value);
                v["local_factors"] = serde_json::to_value(&table.rows)?;
            }
            print_json(&v)?;
        }
        Command::Major { n, w, ymax, x, high } => {
            let params = ThetaParams::from_scale(x.unwrap_or(n), ymax)?;
            let j = SingularIntegral::new(&params, w)?;
            let integrator = MajorArcIntegrator::new(&params, w, Resolution::STANDARD)?;
            let cmp = integrator.compare(n, &j)?;
            let mut v = json!({
                "comparison": cmp,
                "nodes": integrator.node_count(),
                "j_over_y": cmp.singular_integral / ymax as f64,
                "area_oracle": singular_integral_area_oracle(n, w, &params),
                "difference_over_y_over_w": cmp.difference / (ymax as f64 / w),
            });
            if high {
                let refined = MajorArcIntegrator::new(&params, w, Resolution::HIGH)?.integral(n);
                v["high_resolution_integral"] = json!(refined.re);
            }
            print_json(&v)?;
        }
        Command::Moment { x, ymax, w } => {
            let params = ThetaParams::from_scale(x, ymax)?;
            let m = minor_arc_moment(&params, w)?;
            let arcs = build_major_arcs(params.x, w)?;
            print_json(&json!({ "moment": m, "minor_measure": arcs.minor_measure }))?;
        }
        Command::Sphere { n, metric, range } => {
            let metric = match metric {
                MetricArg::Euclid => Metric::Euclidean,
                MetricArg::Sq => Metric::SquaredEuclidean,
            };
            match (n, range) {
                (Some(n), None) => {
                    let set = lattice_points(n)?;
                    let d = min_squared_distance(&set);
                    print_json(&json!({
                        "n": n,
                        "count": set.count,
                        "min_squared_distance": d,
                        "min_spacing": microsq::sphere::min_spacing(&set, metric),
                        "metric": metric,
                    }))?;
                }
                (None, Some(r)) => {
                    let (a, b) = parse_range(&r)?;
                    let rows = spacing_scan(a..=b, metric)?;
                    let mut out = BufWriter::new(io::stdout().lock());
                    for (c, frac) in spacing_violation_fractions(&rows, &[0.1, 1.0, 10.0, 100.0, 1000.0]) {
                        writeln!(out, "# fraction above C n^-1 (log n)^1.01 with C = {c}: {frac}")?;
                    }
                    writeln!(out, "n,count,min_squared,m,normalized")?;
                    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                    for r in rows {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            r.n,
                            r.count,
                            r.min_squared.map(|d| d.to_string()).unwrap_or_default(),
                            opt(r.m),
                            opt(r.normalized)
                        )?;
                    }
                    out.flush()?;
                }
                _ => return Err(Error::InvalidArgument("give either <n> or --range".into())),
            }
        }
        Command::Gaps { limit } => {
            print_json(&serde_json::to_value(two_square_gap_scan(limit)?)?)?;
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let report = verify(suite, seed)?;
            print_json(&json!({
                "report": report,
                "failure_kind": report.failure_kind(),
            }))?;
            if !report.passed {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var("MICROSQ_THREADS") {
        match t.parse::<usize>() {
            Ok(k) if k > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
            _ => {
                eprintln!("error: MICROSQ_THREADS must be a positive integer, got {t:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
