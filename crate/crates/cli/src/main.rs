mod render;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vgc_core::sieve::MATERIALIZE_LIMIT;
use vgc_core::store::StreamWriter;
use vgc_core::{
    build_chain, build_chain_streaming, comet, enumerate_partitions, gkc, scanner, store,
    AverageMode, GkcKind, IPrimeSet, KnownLimits, PredictorTables, PrimeTable, ScanOptions,
};

use render::MatrixKind;

#[derive(Parser)]
#[command(
    name = "vgc",
    version,
    about = "Verification laboratory for vertical Goldbach-style conjectures",
    after_help = "Limits accept scientific notation: --limit 2e7 equals --limit 20000000."
)]
struct Cli {
    /// Worker threads for parallel stages (default: machine parallelism)
    #[arg(long, global = true, env = "VGC_WORKERS")]
    workers: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write data to a file instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve primes up to a limit and report the count
    Sieve {
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        /// Also persist the primes as an order-0 set file
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Build the i-prime sets up to a limit, optionally saving them as .bin files
    Lift {
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        /// Highest iteration order to build
        #[arg(long, default_value_t = 7)]
        max_order: u32,
        /// Persist each set to the data directory
        #[arg(long)]
        save: bool,
        /// Data directory for set files
        #[arg(long, env = "VGC_DATA_DIR", default_value = ".")]
        out_dir: PathBuf,
    },
    /// Scan all even numbers up to a limit for exceptions of an order pair
    Scan {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        /// Checkpoint file; resumed when it already exists
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Even numbers per work chunk
        #[arg(long, default_value_t = 1 << 15)]
        chunk_size: usize,
    },
    /// Scan a window variant (GKC family) for exceptions
    Gkc {
        #[arg(long, value_enum)]
        variant: VariantArg,
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 15)]
        chunk_size: usize,
    },
    /// Emit comet series: partition counts, averages, or window-filtered counts
    Comet {
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, default_value_t = 0)]
        b: u32,
        #[arg(long, value_parser = parse_limit)]
        from: u64,
        #[arg(long, value_parser = parse_limit)]
        to: u64,
        /// Emit the cumulative average instead of raw counts
        #[arg(long)]
        average: bool,
        /// With --average: literal weighted partial sums instead of the running mean
        #[arg(long, requires = "average")]
        literal: bool,
        /// Count only pairs with one element in the 4*sqrt window (order pair (0,0))
        #[arg(long, conflicts_with_all = ["average", "a", "b"])]
        gkrc_filter: bool,
    },
    /// Print the predictor matrices
    Predict {
        #[arg(long, value_enum, default_value_t = ShowArg::All)]
        show: ShowArg,
        /// Matrix dimension (orders 0..dim in both axes)
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
    /// Scan and emit the exception sequence, one even number per line
    EmitSeq {
        #[arg(long)]
        a: u32,
        #[arg(long)]
        b: u32,
        #[arg(long, value_parser = parse_limit)]
        limit: u64,
        /// Emit "index value" lines instead of bare values
        #[arg(long)]
        b_file: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = 1 << 15)]
        chunk_size: usize,
    },
    /// Enumerate the partitions of one even number 2n
    Partitions {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        a: u32,
        #[arg(long, default_value_t = 0)]
        b: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Gkc,
    Ntgkc,
    Gkrc,
    Ntgkrc,
}

impl From<VariantArg> for GkcKind {
    fn from(v: VariantArg) -> GkcKind {
        match v {
            VariantArg::Gkc => GkcKind::Gkc,
            VariantArg::Ntgkc => GkcKind::NtGkc,
            VariantArg::Gkrc => GkcKind::Gkrc,
            VariantArg::Ntgkrc => GkcKind::NtGkrc,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShowArg {
    All,
    X1,
    X2,
    H,
    Fy,
    G,
    Estimates,
}

impl ShowArg {
    fn kinds(self) -> Vec<MatrixKind> {
        match self {
            ShowArg::All => vec![
                MatrixKind::X1,
                MatrixKind::X2,
                MatrixKind::H,
                MatrixKind::Fy,
                MatrixKind::G,
                MatrixKind::Estimates,
            ],
            ShowArg::X1 => vec![MatrixKind::X1],
            ShowArg::X2 => vec![MatrixKind::X2],
            ShowArg::H => vec![MatrixKind::H],
            ShowArg::Fy => vec![MatrixKind::Fy],
            ShowArg::G => vec![MatrixKind::G],
            ShowArg::Estimates => vec![MatrixKind::Estimates],
        }
    }
}

/// Exact-integer limit parser accepting plain decimals, underscores and
/// scientific notation ("1e10", "2.5e7").
fn parse_limit(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    let Some((mantissa, exponent)) = s.split_once(['e', 'E']) else {
        return s.parse().map_err(|_| format!("'{s}' is not a natural number"));
    };
    let exp: u32 = exponent
        .parse()
        .map_err(|_| format!("'{s}' has a bad exponent"))?;
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() {
        return Err(format!("'{s}' has no mantissa digits"));
    }
    let value: u64 = digits
        .parse()
        .map_err(|_| format!("'{s}' has a bad mantissa"))?;
    let frac_len = frac_part.len() as u32;
    if frac_len > exp {
        return Err(format!("'{s}' is not an integer"));
    }
    let shift = exp - frac_len;
    let scale = 10u64
        .checked_pow(shift)
        .ok_or_else(|| format!("'{s}' overflows 64 bits"))?;
    value
        .checked_mul(scale)
        .ok_or_else(|| format!("'{s}' overflows 64 bits"))
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.workers {
        Some(w) if w > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(anyhow::Error::from)
            .and_then(|pool| pool.install(|| run(&cli))),
        _ => run(&cli),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

/// Data sink: stdout by default, a file with --out.
fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Throttled progress lines on standard error.
struct Progress {
    label: &'static str,
    limit: u64,
    started: Instant,
    last: Instant,
}

impl Progress {
    fn new(label: &'static str, limit: u64) -> Self {
        let now = Instant::now();
        Progress {
            label,
            limit,
            started: now,
            last: now,
        }
    }

    fn tick(&mut self, scanned_to: u64) {
        if self.last.elapsed().as_millis() >= 1_000 {
            self.last = Instant::now();
            let pct = 100.0 * scanned_to as f64 / self.limit as f64;
            eprintln!(
                "{}: 2n = {scanned_to} / {} ({pct:.1}%), {:.1}s elapsed",
                self.label,
                self.limit,
                self.started.elapsed().as_secs_f64()
            );
        }
    }
}

fn sieve_table(limit: u64) -> Result<PrimeTable> {
    eprintln!("sieving primes up to {limit}...");
    let started = Instant::now();
    let table = PrimeTable::sieve(limit)?;
    eprintln!(
        "sieved {} primes in {:.1}s",
        table.count(),
        started.elapsed().as_secs_f64()
    );
    Ok(table)
}

fn build_sets(limit: u64, max_order: u32) -> Result<(PrimeTable, Vec<IPrimeSet>)> {
    let table = sieve_table(limit)?;
    let chain = build_chain(&table, max_order, limit)?;
    Ok((table, chain))
}

fn run(cli: &Cli) -> Result<()> {
    let mut out = open_output(&cli.out)?;
    match &cli.command {
        Command::Sieve { limit, save } => {
            let table = sieve_table(*limit)?;
            if let Some(path) = save {
                let zero = IPrimeSet::order_zero(&table, *limit)?;
                store::save(&zero, path)?;
                eprintln!("saved {} primes to {}", zero.len(), path.display());
            }
            match cli.format {
                Format::Text => writeln!(out, "primes up to {limit}: {}", table.count())?,
                Format::Csv => {
                    writeln!(out, "limit,count")?;
                    writeln!(out, "{limit},{}", table.count())?;
                }
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::json!({ "limit": limit, "count": table.count() })
                )?,
            }
        }

        Command::Lift {
            limit,
            max_order,
            save,
            out_dir,
        } => {
            run_lift(&mut out, cli.format, *limit, *max_order, *save, out_dir)?;
        }

        Command::Scan {
            a,
            b,
            limit,
            checkpoint,
            chunk_size,
        } => {
            let (_, chain) = build_sets(*limit, (*a).max(*b))?;
            let opts = ScanOptions {
                chunk_evens: *chunk_size,
                checkpoint_path: checkpoint.clone(),
            };
            let mut progress = Progress::new("scan", *limit);
            let report = match checkpoint {
                Some(path) if path.exists() => {
                    eprintln!("resuming from {}", path.display());
                    scanner::resume_scan(path, *a, *b, *limit, &chain, &opts, |s| {
                        progress.tick(s)
                    })?
                }
                _ => scanner::scan_with(*a, *b, *limit, &chain, &opts, |s| progress.tick(s))?,
            };
            write_report(&mut out, cli.format, &report)?;
        }

        Command::Gkc {
            variant,
            limit,
            checkpoint,
            chunk_size,
        } => {
            let kind: GkcKind = (*variant).into();
            let table = sieve_table(*limit)?;
            let opts = ScanOptions {
                chunk_evens: *chunk_size,
                checkpoint_path: checkpoint.clone(),
            };
            let mut progress = Progress::new("scan", *limit);
            let report = match checkpoint {
                Some(path) if path.exists() => {
                    eprintln!("resuming from {}", path.display());
                    gkc::resume_scan_variant(path, kind, *limit, &table, &opts, |s| {
                        progress.tick(s)
                    })?
                }
                _ => gkc::scan_variant_with(kind, *limit, &table, &opts, |s| progress.tick(s))?,
            };
            write_report(&mut out, cli.format, &report)?;
        }

        Command::Comet {
            a,
            b,
            from,
            to,
            average,
            literal,
            gkrc_filter,
        } => {
            let series = if *gkrc_filter {
                let table = sieve_table((2 * *to).max(4))?;
                comet::gkrc_filtered_series(*from, *to, &table)?
            } else {
                let (_, chain) = build_sets((2 * *to).max(4), (*a).max(*b))?;
                if *average {
                    let mode = if *literal {
                        AverageMode::LiteralSum
                    } else {
                        AverageMode::RunningMean
                    };
                    comet::g_average(*a, *b, *from, *to, &chain, mode)?
                } else {
                    comet::g_series(*a, *b, *from, *to, &chain)?
                }
            };
            match cli.format {
                Format::Text => render::render_series_text(&mut out, &series)?,
                Format::Csv => render::render_series_csv(&mut out, &series)?,
                Format::Json => writeln!(out, "{}", render::series_json(&series))?,
            }
        }

        Command::Predict { show, dim } => {
            let known = KnownLimits::verified();
            let tables = PredictorTables::build(*dim, &known);
            match cli.format {
                Format::Text => {
                    for (i, kind) in show.kinds().into_iter().enumerate() {
                        if i > 0 {
                            writeln!(out)?;
                        }
                        render::render_matrix_text(&mut out, &tables, kind)?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "matrix,a,b,value")?;
                    for kind in show.kinds() {
                        render::render_matrix_csv(&mut out, &tables, kind)?;
                    }
                }
                Format::Json => writeln!(out, "{}", serde_json::to_value(&tables)?)?,
            }
        }

        Command::EmitSeq {
            a,
            b,
            limit,
            b_file,
            checkpoint,
            chunk_size,
        } => {
            let (_, chain) = build_sets(*limit, (*a).max(*b))?;
            let opts = ScanOptions {
                chunk_evens: *chunk_size,
                checkpoint_path: checkpoint.clone(),
            };
            let mut progress = Progress::new("scan", *limit);
            let report = match checkpoint {
                Some(path) if path.exists() => {
                    eprintln!("resuming from {}", path.display());
                    scanner::resume_scan(path, *a, *b, *limit, &chain, &opts, |s| {
                        progress.tick(s)
                    })?
                }
                _ => scanner::scan_with(*a, *b, *limit, &chain, &opts, |s| progress.tick(s))?,
            };
            for (i, value) in report.sequence()?.iter().enumerate() {
                if *b_file {
                    writeln!(out, "{} {value}", i + 1)?;
                } else {
                    writeln!(out, "{value}")?;
                }
            }
        }

        Command::Partitions { n, a, b } => {
            let (hi, lo) = ((*a).max(*b), (*a).min(*b));
            let (_, chain) = build_sets((2 * *n).max(4), hi)?;
            let a_set = chain
                .iter()
                .find(|s| s.order() == hi)
                .ok_or_else(|| anyhow::anyhow!("no order-{hi} set below 2n = {}", 2 * n))?;
            let b_set = chain
                .iter()
                .find(|s| s.order() == lo)
                .ok_or_else(|| anyhow::anyhow!("no order-{lo} set below 2n = {}", 2 * n))?;
            let matrix = enumerate_partitions(*n, a_set, b_set)?;
            match cli.format {
                Format::Text => {
                    writeln!(
                        out,
                        "2n = {} has {} partitions for ({hi},{lo})",
                        2 * n,
                        matrix.count()
                    )?;
                    for &(u, v) in matrix.rows() {
                        writeln!(out, "{u} + {v}")?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "n,u,v,order_a,order_b")?;
                    for &(u, v) in matrix.rows() {
                        writeln!(out, "{n},{u},{v},{hi},{lo}")?;
                    }
                }
                Format::Json => writeln!(
                    out,
                    "{}",
                    serde_json::json!({
                        "n": n, "a": hi, "b": lo,
                        "count": matrix.count(),
                        "rows": matrix.rows(),
                    })
                )?,
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn write_report(
    out: &mut dyn Write,
    format: Format,
    report: &scanner::ExceptionReport,
) -> Result<()> {
    match format {
        Format::Text => render::render_report_text(out, report)?,
        Format::Csv => render::render_report_csv(out, report)?,
        Format::Json => writeln!(out, "{}", render::report_json(report))?,
    }
    Ok(())
}

fn run_lift(
    out: &mut dyn Write,
    format: Format,
    limit: u64,
    max_order: u32,
    save: bool,
    out_dir: &Path,
) -> Result<()> {
    if save {
        fs::create_dir_all(out_dir)?;
    }
    let set_path = |order: u32| out_dir.join(store::standard_filename(order, limit));

    let counts: Vec<(u32, u64)> = if limit <= MATERIALIZE_LIMIT {
        let (_, chain) = build_sets(limit, max_order)?;
        if save {
            for set in &chain {
                store::save(set, &set_path(set.order()))?;
                eprintln!("wrote {}", set_path(set.order()).display());
            }
        }
        chain.iter().map(|s| (s.order(), s.len() as u64)).collect()
    } else {
        // past the materialization threshold the order-0 primes are streamed
        // straight to disk (or just counted) while the higher orders build up
        eprintln!("limit beyond materialization threshold; streaming segmented sieve");
        let mut zero_writer = if save {
            Some(StreamWriter::create(0, limit, &set_path(0))?)
        } else {
            None
        };
        let started = Instant::now();
        let mut streamed = 0u64;
        let (zero_count, chain) = build_chain_streaming(max_order, limit, |p| {
            if let Some(w) = &mut zero_writer {
                w.push(p);
            }
            streamed += 1;
            if streamed % 100_000_000 == 0 {
                eprintln!(
                    "... {streamed} primes streamed, at p = {p}, {:.0}s elapsed",
                    started.elapsed().as_secs_f64()
                );
            }
        })?;
        if let Some(w) = zero_writer {
            w.finish()?;
            eprintln!("wrote {}", set_path(0).display());
        }
        if save {
            for set in &chain {
                store::save(set, &set_path(set.order()))?;
                eprintln!("wrote {}", set_path(set.order()).display());
            }
        }
        let mut counts = vec![(0, zero_count)];
        counts.extend(chain.iter().map(|s| (s.order(), s.len() as u64)));
        counts
    };

    match format {
        Format::Text => {
            for &(order, count) in &counts {
                writeln!(out, "order {order}: {count} elements")?;
            }
        }
        Format::Csv => {
            writeln!(out, "order,count")?;
            for &(order, count) in &counts {
                writeln!(out, "{order},{count}")?;
            }
        }
        Format::Json => {
            let items: Vec<serde_json::Value> = counts
                .iter()
                .map(|&(order, count)| serde_json::json!({ "order": order, "count": count }))
                .collect();
            writeln!(out, "{}", serde_json::json!({ "limit": limit, "sets": items }))?;
        }
    }
    Ok(())
}
