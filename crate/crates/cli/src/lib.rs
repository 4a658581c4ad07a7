//! `nucleus-wde`: validate waveform/BSP pairs, explore mappings and render
//! the resulting reports.

pub mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use nucleus_core::frontend::{parse_bsp_named, parse_waveform_named, ParseDiagnostic};
use nucleus_core::mapper::SearchOptions;
use nucleus_core::{
    map_exhaustive, map_greedy, Bsp, EvalConfig, Evaluator, MapFailure, MapOutcome, Weights,
    WaveformGraph,
};
use thiserror::Error;

use report::{ConfigEcho, FailureRow, RankedRow, Report, StrategyRow};

/// Process exit codes. One per outcome class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const INFEASIBLE: i32 = 3;
    pub const BOUND_EXCEEDED: i32 = 4;
}

/// Environment variable capping the worker threads used by the mapper.
pub const THREADS_ENV: &str = "NUCLEUS_WDE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "nucleus-wde", version, about = "Waveform mapping explorer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a waveform and a board-support package for errors.
    Validate {
        wdl: PathBuf,
        bsp: PathBuf,
        /// Print nothing when both files are valid.
        #[arg(long)]
        quiet: bool,
    },
    /// Map a waveform onto a platform and write a JSON report.
    Map {
        wdl: PathBuf,
        bsp: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Both)]
        strategy: Strategy,
        /// Latency, communication, synchronization, utilization and energy weights.
        #[arg(long, value_parser = parse_weights, default_value = "1,1,1,1,1")]
        weights: Weights,
        /// Number of best mappings listed in the ranked table.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        top_k: u64,
        #[arg(long, default_value_t = nucleus_core::mapper::DEFAULT_MOVE_BUDGET as u64,
              value_parser = clap::value_parser!(u64).range(1..))]
        move_budget: u64,
        #[arg(long, default_value_t = nucleus_core::mapper::DEFAULT_ENUMERATION_BOUND,
              value_parser = clap::value_parser!(u64).range(1..))]
        enumeration_bound: u64,
        /// Reserved. All strategies are deterministic; the value is only echoed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report path. Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress the summary on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Render a stored report.
    Report {
        path: PathBuf,
        #[arg(long, default_value = "text")]
        format: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Exhaustive,
    Greedy,
    Both,
}

impl Strategy {
    fn name(self) -> &'static str {
        match self {
            Strategy::Exhaustive => "exhaustive",
            Strategy::Greedy => "greedy",
            Strategy::Both => "both",
        }
    }
}

pub fn parse_weights(s: &str) -> Result<Weights, String> {
    let values = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    Weights::from_slice(&values).map_err(|e| e.to_string())
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("unknown report format `{0}` (expected text or json)")]
    UnknownFormat(String),
    #[error("{path}: not a report: {source}")]
    BadReport {
        path: PathBuf,
        source: serde_json::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        exit::USAGE
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parsed inputs, or every diagnostic found in either file.
pub fn load(wdl: &Path, bsp: &Path) -> Result<Result<(WaveformGraph, Bsp), Vec<ParseDiagnostic>>, CliError> {
    let (wsrc, bsrc) = (read(wdl)?, read(bsp)?);
    let g = parse_waveform_named(&wdl.display().to_string(), &wsrc);
    let b = parse_bsp_named(&bsp.display().to_string(), &bsrc);
    Ok(match (g, b) {
        (Ok(g), Ok(b)) => Ok((g, b)),
        (g, b) => Err(g.err().into_iter().chain(b.err()).flatten().collect()),
    })
}

/// Runs a command, writing results to `out` and messages to `err`.
/// Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Validate { wdl, bsp, quiet } => validate(&wdl, &bsp, quiet, out),
        Command::Map {
            wdl,
            bsp,
            strategy,
            weights,
            top_k,
            move_budget,
            enumeration_bound,
            seed,
            out: out_path,
            quiet,
        } => {
            let config = ConfigEcho {
                strategy: strategy.name().into(),
                weights: weights.as_array(),
                top_k: top_k as usize,
                move_budget: move_budget as usize,
                enumeration_bound,
                seed,
            };
            map(&wdl, &bsp, strategy, config, out_path.as_deref(), quiet, out, err)
        }
        Command::Report { path, format } => render(&path, &format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn validate(wdl: &Path, bsp: &Path, quiet: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    match load(wdl, bsp)? {
        Ok((g, b)) => {
            if !quiet {
                let _ = writeln!(
                    out,
                    "ok: waveform `{}` ({} kernels, {} edges), bsp `{}` ({} PEs, {} flavors)",
                    g.name,
                    g.kernels.len(),
                    g.edges.len(),
                    b.name,
                    b.platform.pes.len(),
                    b.flavors.len()
                );
            }
            Ok(exit::OK)
        }
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(out, "{d}");
            }
            Ok(exit::INVALID_INPUT)
        }
    }
}

fn strategy_row(name: &str, r: &Result<MapOutcome, MapFailure>) -> StrategyRow {
    match r {
        Ok(o) => StrategyRow {
            strategy: name.into(),
            feasible: Some(o.best.report.feasible),
            score: Some(o.best.report.score),
            explored: o.explored,
            note: None,
        },
        Err(e) => StrategyRow {
            strategy: name.into(),
            feasible: None,
            score: None,
            explored: 0,
            note: Some(e.to_string()),
        },
    }
}

fn failure_row(e: &MapFailure) -> FailureRow {
    let (kind, kernels) = match e {
        MapFailure::InvalidGraph(_) => ("invalid_graph", vec![]),
        MapFailure::EmptyCandidates(k) => ("no_implementation", k.clone()),
        MapFailure::BoundExceeded { .. } => ("bound_exceeded", vec![]),
        MapFailure::NoFeasible { .. } => ("infeasible", vec![]),
        MapFailure::Config(_) => ("config", vec![]),
    };
    FailureRow {
        kind: kind.into(),
        message: e.to_string(),
        kernels,
    }
}

/// Builds the report for one map run. Also returns the exit code.
pub fn build_report(
    g: &WaveformGraph,
    bsp: &Bsp,
    strategy: Strategy,
    config: ConfigEcho,
) -> (Report, i32) {
    let weights = Weights::from_slice(&config.weights).expect("validated on the command line");
    let options = SearchOptions {
        enumeration_bound: config.enumeration_bound,
        move_budget: config.move_budget,
        top_k: config.top_k,
    };
    let mut report = Report {
        schema_version: report::SCHEMA_VERSION,
        waveform: g.name.clone(),
        bsp: bsp.name.clone(),
        config,
        status: "infeasible".into(),
        binding: vec![],
        glue: vec![],
        schedule: vec![],
        transfers: vec![],
        metrics: None,
        throughput_fps: None,
        verdicts: vec![],
        score: None,
        strategies: vec![],
        ranked: vec![],
        failure: None,
        notes: vec![],
    };
    let evaluator = match Evaluator::new(g, bsp, EvalConfig { weights, ..Default::default() }) {
        Ok(e) => e,
        Err(e) => {
            report.failure = Some(failure_row(&MapFailure::Config(e)));
            return (report, exit::USAGE);
        }
    };

    let exhaustive = matches!(strategy, Strategy::Exhaustive | Strategy::Both)
        .then(|| map_exhaustive(g, bsp, &evaluator, &options));
    let greedy = matches!(strategy, Strategy::Greedy | Strategy::Both)
        .then(|| map_greedy(g, bsp, &evaluator, &options));
    if let Some(r) = &exhaustive {
        report.strategies.push(strategy_row("exhaustive", r));
    }
    if let Some(r) = &greedy {
        report.strategies.push(strategy_row("greedy", r));
    }

    let chosen = match (exhaustive, greedy) {
        (Some(Err(e @ MapFailure::BoundExceeded { .. })), Some(gr)) => {
            report.notes.push(format!("{e}; reporting the greedy result"));
            gr
        }
        (Some(ex), _) => ex,
        (None, Some(gr)) => gr,
        (None, None) => unreachable!("every strategy runs at least one search"),
    };

    let outcome = match chosen {
        Ok(o) => o,
        Err(e) => {
            let code = match e {
                MapFailure::BoundExceeded { .. } => exit::BOUND_EXCEEDED,
                MapFailure::InvalidGraph(_) => exit::INVALID_INPUT,
                MapFailure::Config(_) => exit::USAGE,
                _ => exit::INFEASIBLE,
            };
            report.failure = Some(failure_row(&e));
            return (report, code);
        }
    };

    let best = &outcome.best;
    report.status = if best.report.feasible { "feasible" } else { "infeasible" }.into();
    report.binding = report::binding_rows(bsp, &best.mapping);
    report.glue = report::glue_rows(&best.mapping);
    (report.schedule, report.transfers) = report::schedule_rows(&best.schedule);
    report.metrics = Some(best.report.metrics.clone());
    report.throughput_fps = best.report.throughput_fps.is_finite().then_some(best.report.throughput_fps);
    report.verdicts = best.report.verdicts.clone();
    report.score = Some(best.report.score);
    report.ranked = outcome
        .ranked
        .iter()
        .take(report.config.top_k)
        .enumerate()
        .map(|(i, r)| RankedRow {
            rank: i + 1,
            feasible: r.feasible,
            score: r.score,
            binding: report::labelled_binding(bsp, &r.binding),
        })
        .collect();
    let code = if best.report.feasible { exit::OK } else { exit::INFEASIBLE };
    (report, code)
}

pub fn report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

#[allow(clippy::too_many_arguments)]
fn map(
    wdl: &Path,
    bsp_path: &Path,
    strategy: Strategy,
    config: ConfigEcho,
    out_path: Option<&Path>,
    quiet: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (g, bsp) = match load(wdl, bsp_path)? {
        Ok(pair) => pair,
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(err, "{d}");
            }
            return Ok(exit::INVALID_INPUT);
        }
    };
    let (report, code) = build_report(&g, &bsp, strategy, config);
    let json = report_json(&report);
    match out_path {
        Some(p) => fs::write(p, &json).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        })?,
        None => {
            let _ = out.write_all(json.as_bytes());
        }
    }
    if !quiet || code != exit::OK {
        match (&report.failure, report.score) {
            (Some(f), _) => {
                let _ = writeln!(err, "{}: {}", f.kind, f.message);
            }
            (None, Some(score)) => {
                let _ = writeln!(
                    err,
                    "{}: {} kernels bound, {} glue task(s), score {score:.6}",
                    report.status,
                    report.binding.len(),
                    report.glue.len()
                );
            }
            (None, None) => {}
        }
        for n in &report.notes {
            let _ = writeln!(err, "note: {n}");
        }
    }
    Ok(code)
}

fn render(path: &Path, format: &str, out: &mut dyn Write) -> Result<i32, CliError> {
    if !matches!(format, "text" | "json") {
        return Err(CliError::UnknownFormat(format.into()));
    }
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if format == "json" {
        let _ = out.write_all(&bytes);
        return Ok(exit::OK);
    }
    let report: Report = serde_json::from_slice(&bytes).map_err(|source| CliError::BadReport {
        path: path.to_path_buf(),
        source,
    })?;
    let _ = out.write_all(report::render_text(&report).as_bytes());
    Ok(exit::OK)
}
