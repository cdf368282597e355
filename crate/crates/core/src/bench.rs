//! Experiment harness: repeated seeded runs, accuracy metrics and reports.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{exact_count, exact_count_parallel};
use crate::error::{Error, Result};
use crate::graph::{TemporalBipartiteGraph, Timestamp};
use crate::motif::{CountVector, Labeling, NUM_TYPES};
use crate::sampling::{estimate, EstimateVector, Method, SamplingConfig};

/// Parses a duration: a raw integer or an integer with an `s`, `m`, `h` or `d`
/// suffix (seconds as the base unit).
pub fn parse_duration(text: &str) -> Result<Timestamp> {
    let text = text.trim();
    let (digits, unit) = match text.char_indices().last() {
        Some((i, 's')) => (&text[..i], 1),
        Some((i, 'm')) => (&text[..i], 60),
        Some((i, 'h')) => (&text[..i], 3_600),
        Some((i, 'd')) => (&text[..i], 86_400),
        _ => (text, 1),
    };
    let value: i64 = digits
        .parse()
        .map_err(|_| Error::arg(format!("cannot parse duration `{text}`")))?;
    if value < 0 {
        return Err(Error::arg(format!("duration `{text}` is negative")));
    }
    value
        .checked_mul(unit)
        .ok_or_else(|| Error::arg(format!("duration `{text}` overflows")))
}

/// `|est_i - exact_i| / exact_i` per type; `None` where the exact count is zero.
pub fn relative_errors(estimates: &EstimateVector, exact: &CountVector) -> [Option<f64>; NUM_TYPES] {
    std::array::from_fn(|i| {
        let c = exact.0[i];
        (c > 0).then(|| (estimates.0[i] - c as f64).abs() / c as f64)
    })
}

/// Mean absolute percentage error over the types with a non-zero exact count.
/// `None` when every exact count is zero.
pub fn mape(estimates: &EstimateVector, exact: &CountVector) -> Option<f64> {
    let included: Vec<f64> = relative_errors(estimates, exact).into_iter().flatten().collect();
    if included.is_empty() {
        None
    } else {
        Some(included.iter().sum::<f64>() / included.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub estimates: EstimateVector,
    /// Wall-clock time of the estimator run; `None` when timing is off.
    pub elapsed_ms: Option<f64>,
    pub seed: u64,
    pub mape: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean: [f64; NUM_TYPES],
    /// Mean of the per-run MAPE values.
    pub mape: Option<f64>,
    pub rel_err: [Option<f64>; NUM_TYPES],
    pub variance: [f64; NUM_TYPES],
    /// Types left out of MAPE because their exact count is zero (one-based).
    pub mape_excluded: Vec<usize>,
}

impl Aggregates {
    pub fn from_runs(runs: &[RunRecord], exact: Option<&CountVector>) -> Aggregates {
        let n = runs.len() as f64;
        let mean: [f64; NUM_TYPES] = std::array::from_fn(|i| {
            if runs.is_empty() {
                0.0
            } else {
                runs.iter().map(|r| r.estimates.0[i]).sum::<f64>() / n
            }
        });
        let variance = std::array::from_fn(|i| {
            if runs.len() < 2 {
                0.0
            } else {
                runs.iter().map(|r| (r.estimates.0[i] - mean[i]).powi(2)).sum::<f64>() / (n - 1.0)
            }
        });
        let (mape, rel_err, mape_excluded) = match exact {
            Some(exact) if !runs.is_empty() => {
                let per_run: Vec<_> = runs.iter().map(|r| relative_errors(&r.estimates, exact)).collect();
                let rel_err = std::array::from_fn(|i| {
                    exact.0[i]
                        .gt(&0)
                        .then(|| per_run.iter().map(|e| e[i].unwrap_or(0.0)).sum::<f64>() / n)
                });
                let mapes: Vec<f64> = runs.iter().filter_map(|r| mape(&r.estimates, exact)).collect();
                let mape = (!mapes.is_empty()).then(|| mapes.iter().sum::<f64>() / mapes.len() as f64);
                let excluded = (0..NUM_TYPES).filter(|&i| exact.0[i] == 0).map(|i| i + 1).collect();
                (mape, rel_err, excluded)
            }
            _ => (None, [None; NUM_TYPES], Vec::new()),
        };
        Aggregates { mean, mape, rel_err, variance, mape_excluded }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    #[serde(flatten)]
    pub method: Method,
    pub tau: Timestamp,
    pub runs: usize,
    pub base_seed: u64,
    pub labels: String,
}

/// Results of repeated runs of one estimator configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub config: ReportConfig,
    pub exact: Option<CountVector>,
    pub runs: Vec<RunRecord>,
    pub aggregates: Aggregates,
}

impl EstimateReport {
    /// The same report with every per-type vector reported under `labels`.
    pub fn relabeled(&self, labels: &Labeling) -> EstimateReport {
        let exact = self.exact.map(|c| labels.apply(&c));
        let runs: Vec<RunRecord> = self
            .runs
            .iter()
            .map(|r| RunRecord { estimates: EstimateVector(labels.apply_real(&r.estimates.0)), ..r.clone() })
            .collect();
        let aggregates = Aggregates::from_runs(&runs, exact.as_ref());
        EstimateReport {
            config: ReportConfig { labels: labels.to_string(), ..self.config.clone() },
            exact,
            runs,
            aggregates,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExperimentOptions {
    pub runs: usize,
    pub base_seed: u64,
    /// Compute exact counts once and fill in the error metrics.
    pub with_exact: bool,
    /// Record wall-clock time per run. Off gives byte-reproducible reports.
    pub record_timing: bool,
    /// Run independent trials on the rayon pool.
    pub parallel: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        ExperimentOptions { runs: 10, base_seed: 0, with_exact: true, record_timing: true, parallel: false }
    }
}

/// Seed of run `index` under `base_seed`.
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

/// Runs every configuration `options.runs` times with seeds
/// `base_seed + run_index` and assembles one report per configuration.
pub fn run_experiment(
    graph: &TemporalBipartiteGraph,
    tau: Timestamp,
    methods: &[Method],
    options: &ExperimentOptions,
) -> Result<Vec<EstimateReport>> {
    if options.runs == 0 {
        return Err(Error::arg("an experiment needs at least one run"));
    }
    for m in methods {
        m.validate()?;
    }
    let exact = if options.with_exact {
        Some(if options.parallel { exact_count_parallel(graph, tau)? } else { exact_count(graph, tau)? })
    } else {
        None
    };

    let mut reports = Vec::with_capacity(methods.len());
    for &method in methods {
        let one_run = |index: usize| -> Result<RunRecord> {
            let seed = run_seed(options.base_seed, index);
            let start = Instant::now();
            let estimates = estimate(graph, tau, &SamplingConfig { method, seed }).map_err(|e| match e {
                Error::InvalidArgument(msg) => Error::InvalidArgument(format!("run {index}: {msg}")),
                other => other,
            })?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            Ok(RunRecord {
                estimates,
                elapsed_ms: options.record_timing.then_some(elapsed),
                seed,
                mape: exact.as_ref().and_then(|c| mape(&estimates, c)),
            })
        };
        let runs: Vec<RunRecord> = if options.parallel {
            (0..options.runs).into_par_iter().map(one_run).collect::<Result<_>>()?
        } else {
            (0..options.runs).map(one_run).collect::<Result<_>>()?
        };
        let aggregates = Aggregates::from_runs(&runs, exact.as_ref());
        reports.push(EstimateReport {
            config: ReportConfig {
                method,
                tau,
                runs: options.runs,
                base_seed: options.base_seed,
                labels: Labeling::identity().to_string(),
            },
            exact,
            runs,
            aggregates,
        });
    }
    Ok(reports)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepMode {
    Exact,
    Estimate(SamplingConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SweepCounts {
    Exact(CountVector),
    Estimate(EstimateVector),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub tau: Timestamp,
    pub counts: SweepCounts,
}

/// Counts (exact or estimated with the same seed) for each duration in turn.
pub fn sweep_tau(graph: &TemporalBipartiteGraph, taus: &[Timestamp], mode: SweepMode) -> Result<Vec<SweepRow>> {
    taus.iter()
        .map(|&tau| {
            let counts = match mode {
                SweepMode::Exact => SweepCounts::Exact(exact_count(graph, tau)?),
                SweepMode::Estimate(cfg) => SweepCounts::Estimate(estimate(graph, tau, &cfg)?),
            };
            Ok(SweepRow { tau, counts })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], labels: &Labeling, mut out: W) -> Result<()> {
    writeln!(out, "tau,B1,B2,B3,B4,B5,B6")?;
    for row in rows {
        write!(out, "{}", row.tau)?;
        match row.counts {
            SweepCounts::Exact(c) => {
                for v in labels.apply(&c).0 {
                    write!(out, ",{v}")?;
                }
            }
            SweepCounts::Estimate(e) => {
                for v in labels.apply_real(&e.0) {
                    write!(out, ",{v}")?;
                }
            }
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::arg(format!("unknown report format `{other}`"))),
        }
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes a report. JSON keeps every field; CSV has a header and one row per run.
pub fn export_report<W: Write>(report: &EstimateReport, format: ReportFormat, mut out: W) -> Result<()> {
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            writeln!(out)?;
        }
        ReportFormat::Csv => {
            writeln!(out, "run,seed,elapsed_ms,B1,B2,B3,B4,B5,B6,mape")?;
            for (i, r) in report.runs.iter().enumerate() {
                write!(out, "{i},{},{}", r.seed, opt(r.elapsed_ms))?;
                for v in r.estimates.0 {
                    write!(out, ",{v}")?;
                }
                writeln!(out, ",{}", opt(r.mape))?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Layer;

    fn g2() -> TemporalBipartiteGraph {
        TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4), (1, 1, 5)]).unwrap()
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("1d").unwrap(), 86_400);
        assert_eq!(parse_duration("2h").unwrap(), 7_200);
        assert_eq!(parse_duration("5m").unwrap(), 300);
        assert_eq!(parse_duration("10s").unwrap(), 10);
        assert_eq!(parse_duration("42").unwrap(), 42);
        assert!(parse_duration("1.5h").is_err());
        assert!(parse_duration("-3").is_err());
        assert!(parse_duration("d").is_err());
        assert!(parse_duration("").is_err());
    }

    #[test]
    fn mape_examples() {
        let exact = CountVector([10; 6]);
        let est = EstimateVector([11.0, 9.0, 10.0, 10.0, 10.0, 10.0]);
        assert!((mape(&est, &exact).unwrap() - 1.0 / 30.0).abs() < 1e-15);
        assert_eq!(mape(&EstimateVector::from(exact), &exact), Some(0.0));
        let sparse = CountVector([10, 0, 0, 0, 0, 0]);
        assert_eq!(mape(&EstimateVector([20.0, 0.0, 0.0, 0.0, 0.0, 0.0]), &sparse), Some(1.0));
        assert_eq!(mape(&est, &CountVector::zero()), None);
    }

    #[test]
    fn relative_error_examples() {
        let exact = CountVector([4, 1, 0, 1, 1, 1]);
        let est = EstimateVector([5.0, 1.0, 3.0, 1.0, 1.0, 1.0]);
        let r = relative_errors(&est, &exact);
        assert_eq!(r[0], Some(0.25));
        assert_eq!(r[1], Some(0.0));
        assert_eq!(r[2], None);
        let mean: f64 = r.iter().flatten().sum::<f64>() / 5.0;
        assert_eq!(mape(&est, &exact), Some(mean));
    }

    #[test]
    fn identity_sampling_has_zero_error() {
        let opts = ExperimentOptions { runs: 10, base_seed: 5, record_timing: false, ..Default::default() };
        let reports = run_experiment(&g2(), 10, &[Method::Es { p: 1.0 }], &opts).unwrap();
        let r = &reports[0];
        assert_eq!(r.runs.len(), 10);
        assert!(r.runs.iter().all(|x| x.mape == Some(0.0)));
        assert_eq!(r.aggregates.mape, Some(0.0));
        assert_eq!(r.aggregates.mape_excluded, vec![2, 3, 4, 5, 6]);
        assert_eq!(r.runs[3].seed, 8);
    }

    #[test]
    fn aggregates_recompute_from_runs() {
        let opts = ExperimentOptions { runs: 10, base_seed: 1, record_timing: true, ..Default::default() };
        let r = &run_experiment(&g2(), 10, &[Method::Es { p: 0.5 }], &opts).unwrap()[0];
        assert_eq!(r.runs.len(), 10);
        assert!(r.runs.iter().all(|x| x.elapsed_ms.is_some()));
        let again = Aggregates::from_runs(&r.runs, r.exact.as_ref());
        for i in 0..NUM_TYPES {
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
            assert!(close(again.mean[i], r.aggregates.mean[i]));
            assert!(close(again.variance[i], r.aggregates.variance[i]));
        }
        let mean0 = r.runs.iter().map(|x| x.estimates.0[0]).sum::<f64>() / 10.0;
        assert!((mean0 - r.aggregates.mean[0]).abs() < 1e-12);
    }

    #[test]
    fn reports_are_reproducible() {
        let opts = ExperimentOptions { runs: 4, base_seed: 9, record_timing: false, ..Default::default() };
        let methods = [Method::Es { p: 0.5 }, Method::Ns { p: 0.5, layer: Layer::Lower }, Method::Is { s: 3, c: 1.0 }];
        let a = run_experiment(&g2(), 10, &methods, &opts).unwrap();
        let b = run_experiment(&g2(), 10, &methods, &ExperimentOptions { parallel: true, ..opts }).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let mut bx = Vec::new();
            let mut by = Vec::new();
            export_report(x, ReportFormat::Json, &mut bx).unwrap();
            export_report(y, ReportFormat::Json, &mut by).unwrap();
            assert_eq!(bx, by);
        }
        assert!(run_experiment(&g2(), 10, &methods, &ExperimentOptions { runs: 0, ..opts }).is_err());
    }

    #[test]
    fn export_formats() {
        let opts = ExperimentOptions { runs: 3, base_seed: 2, record_timing: false, ..Default::default() };
        let r = &run_experiment(&g2(), 10, &[Method::Is { s: 2, c: 1.0 }], &opts).unwrap()[0];
        let mut json = Vec::new();
        export_report(r, ReportFormat::Json, &mut json).unwrap();
        let back: EstimateReport = serde_json::from_slice(&json).unwrap();
        assert_eq!(&back, r);
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        for key in ["config", "exact", "runs", "aggregates"] {
            assert!(value.get(key).is_some(), "{key}");
        }
        for key in ["mean", "mape", "rel_err", "variance"] {
            assert!(value["aggregates"].get(key).is_some(), "{key}");
        }
        let mut csv = Vec::new();
        export_report(r, ReportFormat::Csv, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 4);
    }

    #[test]
    fn relabeling_reports() {
        let opts = ExperimentOptions { runs: 2, base_seed: 2, record_timing: false, ..Default::default() };
        let r = &run_experiment(&g2(), 10, &[Method::Es { p: 1.0 }], &opts).unwrap()[0];
        let swapped = r.relabeled(&"213456".parse().unwrap());
        assert_eq!(swapped.exact, Some(CountVector([0, 2, 0, 0, 0, 0])));
        assert_eq!(swapped.config.labels, "213456");
        assert_eq!(swapped.aggregates.mape, Some(0.0));
    }

    #[test]
    fn sweep_examples() {
        let g1 = TemporalBipartiteGraph::from_edges(2, 2, [(0, 0, 1), (1, 0, 2), (0, 1, 3), (1, 1, 4)]).unwrap();
        let rows = sweep_tau(&g1, &[2, 10, 10], SweepMode::Exact).unwrap();
        assert_eq!(rows[0].counts, SweepCounts::Exact(CountVector::zero()));
        assert_eq!(rows[1].counts, SweepCounts::Exact(CountVector([1, 0, 0, 0, 0, 0])));
        assert_eq!(rows[1].counts, rows[2].counts);
        let empty = TemporalBipartiteGraph::from_edges(1, 1, []).unwrap();
        for row in sweep_tau(&empty, &[1, 5], SweepMode::Exact).unwrap() {
            assert_eq!(row.counts, SweepCounts::Exact(CountVector::zero()));
        }
        let mut out = Vec::new();
        write_sweep_csv(&rows, &Labeling::identity(), &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "tau,B1,B2,B3,B4,B5,B6\n2,0,0,0,0,0,0\n10,1,0,0,0,0,0\n10,1,0,0,0,0,0\n");
    }
}
