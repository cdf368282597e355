//! The `tbc` command line. Exit code 0 on success, 1 on usage errors and 2 on
//! data errors; reports go to stdout and diagnostics to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::{self, ExperimentOptions, ReportFormat, SweepMode};
use crate::bounds::{self, ApproximationParams};
use crate::counting::{brute_force_count, exact_count, exact_count_parallel, BRUTE_FORCE_GUIDELINE};
use crate::error::{Error, Result};
use crate::graph::{generate_synthetic, load_graph_file, Layer, LoadOptions, TemporalBipartiteGraph, Timestamp};
use crate::motif::{CountVector, Labeling};
use crate::sampling::{Method, SamplingConfig, DEFAULT_INTERVAL_MULTIPLIER};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tbc", version, about = "Temporal butterfly counting on temporal bipartite graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Edge list: `<upper> <lower> <timestamp>` per line
    #[arg(long)]
    input: PathBuf,
    /// Zero-based column holding the timestamp (3 for KONECT files with a weight column)
    #[arg(long, default_value_t = 2)]
    time_col: usize,
    /// Accept fractional timestamps, multiplied by this factor and rounded
    #[arg(long)]
    timestamp_scale: Option<f64>,
}

impl InputArgs {
    fn load(&self) -> Result<TemporalBipartiteGraph> {
        let options = LoadOptions {
            timestamp_column: self.time_col,
            timestamp_scale: self.timestamp_scale,
            ..LoadOptions::default()
        };
        load_graph_file(&self.input, &options)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Es,
    Ns,
    Is,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LayerArg {
    Upper,
    Lower,
}

impl From<LayerArg> for Layer {
    fn from(l: LayerArg) -> Layer {
        match l {
            LayerArg::Upper => Layer::Upper,
            LayerArg::Lower => Layer::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct MethodArgs {
    /// Sampling probability for es/ns
    #[arg(long)]
    p: Option<f64>,
    /// Layer whose nodes ns samples
    #[arg(long, value_enum, default_value = "upper")]
    layer: LayerArg,
    /// Number of anchor edges for is
    #[arg(long)]
    s: Option<usize>,
    /// Interval length multiplier for is
    #[arg(long, default_value_t = DEFAULT_INTERVAL_MULTIPLIER)]
    c: f64,
}

impl MethodArgs {
    fn method(&self, kind: MethodArg) -> Result<Method> {
        let need_p = || self.p.ok_or_else(|| Error::arg("--p is required for es and ns"));
        let method = match kind {
            MethodArg::Es => Method::Es { p: need_p()? },
            MethodArg::Ns => Method::Ns { p: need_p()?, layer: self.layer.into() },
            MethodArg::Is => Method::Is {
                s: self.s.ok_or_else(|| Error::arg("--s is required for is"))?,
                c: self.c,
            },
        };
        method.validate()?;
        Ok(method)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact counts via per-edge wedge enumeration
    Exact {
        #[command(flatten)]
        input: InputArgs,
        /// Duration constraint, e.g. `3600`, `1h`, `1d`
        #[arg(long)]
        tau: String,
        /// Six-digit relabeling of the output types, e.g. `213456`
        #[arg(long)]
        relabel: Option<String>,
        /// Spread per-edge work over all cores
        #[arg(long)]
        parallel: bool,
    },
    /// Brute-force counts over all 4-edge subsets (small graphs only)
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        /// Duration constraint, e.g. `3600`, `1h`, `1d`
        #[arg(long)]
        tau: String,
        /// Six-digit relabeling of the output types, e.g. `213456`
        #[arg(long)]
        relabel: Option<String>,
        /// Refuse graphs with more edges than this
        #[arg(long, default_value_t = BRUTE_FORCE_GUIDELINE)]
        max_edges: usize,
    },
    /// Sampling estimates over one or more seeded runs
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        /// Duration constraint, e.g. `3600`, `1h`, `1d`
        #[arg(long)]
        tau: String,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[command(flatten)]
        params: MethodArgs,
        /// Seed of the first run; run k uses seed + k
        #[arg(long)]
        seed: u64,
        /// Number of independent runs
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Also compute exact counts and error metrics
        #[arg(long)]
        with_exact: bool,
        /// Record wall-clock time per run (output is then not reproducible)
        #[arg(long)]
        timing: bool,
        /// Run trials in parallel
        #[arg(long)]
        parallel: bool,
        /// Six-digit relabeling of the output types, e.g. `213456`
        #[arg(long)]
        relabel: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Counts for a list of durations
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated durations, e.g. `1h,6h,1d`
        #[arg(long, value_delimiter = ',')]
        tau_list: Vec<String>,
        /// Estimate instead of counting exactly
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[command(flatten)]
        params: MethodArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Six-digit relabeling of the output types, e.g. `213456`
        #[arg(long)]
        relabel: Option<String>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Dataset statistics
    Stats {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Variance bounds and (epsilon, delta) sample sizes
    Bounds {
        /// Relative error, in (0, 1)
        #[arg(long)]
        epsilon: f64,
        /// Failure probability, in (0, 1)
        #[arg(long)]
        delta: f64,
        /// Number of edges
        #[arg(long)]
        m: Option<usize>,
        /// Exact count used for the variance bounds
        #[arg(long)]
        count: Option<f64>,
        /// Sampling probability for the es/ns variance bound
        #[arg(long)]
        p: Option<f64>,
        /// Anchor count for the is variance bound
        #[arg(long)]
        s: Option<usize>,
    },
    /// Writes a uniform random temporal bipartite graph
    Gen {
        /// Upper layer size
        #[arg(long)]
        nu: usize,
        /// Lower layer size
        #[arg(long)]
        nl: usize,
        /// Number of edges
        #[arg(long)]
        m: usize,
        /// Timestamps are drawn from [0, timespan]
        #[arg(long)]
        timespan: Timestamp,
        #[arg(long)]
        seed: u64,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct CountsOutput {
    tau: Timestamp,
    labels: String,
    counts: CountVector,
    total: u64,
}

fn labeling(arg: &Option<String>) -> Result<Labeling> {
    arg.as_deref().map_or(Ok(Labeling::identity()), str::parse)
}

fn print_json<T: Serialize, W: Write>(value: &T, out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn print_counts<W: Write>(tau: Timestamp, labels: &Labeling, counts: CountVector, out: &mut W) -> Result<()> {
    let counts = labels.apply(&counts);
    print_json(&CountsOutput { tau, labels: labels.to_string(), counts, total: counts.total() }, out)
}

fn execute<W: Write>(command: Command, out: &mut W) -> Result<()> {
    match command {
        Command::Exact { input, tau, relabel, parallel } => {
            let tau = bench::parse_duration(&tau)?;
            let labels = labeling(&relabel)?;
            let graph = input.load()?;
            let counts = if parallel { exact_count_parallel(&graph, tau)? } else { exact_count(&graph, tau)? };
            print_counts(tau, &labels, counts, out)
        }
        Command::Oracle { input, tau, relabel, max_edges } => {
            let tau = bench::parse_duration(&tau)?;
            let labels = labeling(&relabel)?;
            let graph = input.load()?;
            if graph.num_edges() > max_edges {
                return Err(Error::InvalidArgument(format!(
                    "graph has {} edges; brute force is limited to {max_edges} (raise --max-edges to force)",
                    graph.num_edges()
                )));
            }
            print_counts(tau, &labels, brute_force_count(&graph, tau)?, out)
        }
        Command::Estimate {
            input,
            tau,
            method,
            params,
            seed,
            runs,
            with_exact,
            timing,
            parallel,
            relabel,
            format,
        } => {
            let tau = bench::parse_duration(&tau)?;
            let labels = labeling(&relabel)?;
            let method = params.method(method)?;
            let graph = input.load()?;
            let options = ExperimentOptions { runs, base_seed: seed, with_exact, record_timing: timing, parallel };
            let report = bench::run_experiment(&graph, tau, &[method], &options)?.remove(0);
            let format = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            bench::export_report(&report.relabeled(&labels), format, out)
        }
        Command::Sweep { input, tau_list, method, params, seed, relabel, format } => {
            let taus = tau_list.iter().map(|t| bench::parse_duration(t)).collect::<Result<Vec<_>>>()?;
            if taus.is_empty() {
                return Err(Error::arg("--tau-list needs at least one duration"));
            }
            let labels = labeling(&relabel)?;
            let mode = match method {
                None => SweepMode::Exact,
                Some(kind) => SweepMode::Estimate(SamplingConfig { method: params.method(kind)?, seed }),
            };
            let graph = input.load()?;
            let rows = bench::sweep_tau(&graph, &taus, mode)?;
            match format {
                FormatArg::Csv => bench::write_sweep_csv(&rows, &labels, out),
                FormatArg::Json => {
                    let relabeled: Vec<_> = rows
                        .iter()
                        .map(|r| {
                            let counts: Vec<f64> = match r.counts {
                                bench::SweepCounts::Exact(c) => labels.apply(&c).0.map(|v| v as f64).to_vec(),
                                bench::SweepCounts::Estimate(e) => labels.apply_real(&e.0).to_vec(),
                            };
                            serde_json::json!({ "tau": r.tau, "counts": counts })
                        })
                        .collect();
                    print_json(&relabeled, out)
                }
            }
        }
        Command::Stats { input } => print_json(&input.load()?.stats(), out),
        Command::Bounds { epsilon, delta, m, count, p, s } => {
            let params = ApproximationParams::new(epsilon, delta)?;
            print_json(&bounds::summarize(params, m, count, p, s)?, out)
        }
        Command::Gen { nu, nl, m, timespan, seed, out: path } => {
            let graph = generate_synthetic(nu, nl, m, timespan, seed)?;
            match path {
                Some(path) => graph.write_edge_list(BufWriter::new(File::create(path)?)),
                None => graph.write_edge_list(out),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// the report to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command, out).and_then(|()| out.flush().map_err(Error::from)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
