//! The structured report written by `map` and rendered by `report`.

use std::collections::BTreeMap;
use std::fmt::Write;

use nucleus_core::evaluator::Verdict;
use nucleus_core::{Binding, Bsp, Mapping, Metrics, Schedule, Target, TaskRef};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub waveform: String,
    pub bsp: String,
    pub config: ConfigEcho,
    /// `feasible` or `infeasible`.
    pub status: String,
    pub binding: Vec<BindingRow>,
    pub glue: Vec<GlueRow>,
    pub schedule: Vec<ScheduleRow>,
    pub transfers: Vec<TransferRow>,
    pub metrics: Option<Metrics>,
    /// `null` when nothing is scheduled (unbounded frame rate).
    pub throughput_fps: Option<f64>,
    pub verdicts: Vec<Verdict>,
    pub score: Option<f64>,
    pub strategies: Vec<StrategyRow>,
    pub ranked: Vec<RankedRow>,
    pub failure: Option<FailureRow>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub strategy: String,
    pub weights: [f64; 5],
    pub top_k: usize,
    pub move_budget: usize,
    pub enumeration_bound: u64,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingRow {
    pub kernel: String,
    /// `NI_{nucleus,pe}` for flavors, the PE id for plain code.
    pub implementation: String,
    pub flavor: Option<String>,
    pub pe: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlueRow {
    pub edge: String,
    pub from: String,
    pub to: String,
    pub pe: String,
    pub cycles: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub task: String,
    pub pe: String,
    pub start_us: f64,
    pub end_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub edge: String,
    pub link: String,
    pub bytes: u64,
    pub start_us: f64,
    pub end_us: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub feasible: Option<bool>,
    pub score: Option<f64>,
    pub explored: u64,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedRow {
    pub rank: usize,
    pub feasible: bool,
    pub score: f64,
    pub binding: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub kind: String,
    pub message: String,
    pub kernels: Vec<String>,
}

/// Label of a target in `NI_{nucleus,pe}` form.
pub fn implementation_label(bsp: &Bsp, target: &Target) -> String {
    match target {
        Target::Flavor(id) => match bsp.flavor(id) {
            Some(f) => format!("NI_{{{},{}}}", f.nucleus, f.pe),
            None => id.clone(),
        },
        Target::Pe(pe) => pe.clone(),
    }
}

pub fn binding_rows(bsp: &Bsp, mapping: &Mapping) -> Vec<BindingRow> {
    mapping
        .binding
        .iter()
        .map(|(kernel, target)| BindingRow {
            kernel: kernel.clone(),
            implementation: implementation_label(bsp, target),
            flavor: match target {
                Target::Flavor(f) => Some(f.clone()),
                Target::Pe(_) => None,
            },
            pe: mapping.pe_of(bsp, kernel).unwrap_or_default().to_string(),
        })
        .collect()
}

pub fn labelled_binding(bsp: &Bsp, binding: &Binding) -> BTreeMap<String, String> {
    binding
        .iter()
        .map(|(k, t)| {
            let label = match t {
                Target::Flavor(f) => format!("{} ({f})", implementation_label(bsp, t)),
                Target::Pe(p) => p.clone(),
            };
            (k.clone(), label)
        })
        .collect()
}

pub fn glue_rows(mapping: &Mapping) -> Vec<GlueRow> {
    mapping
        .glue
        .iter()
        .map(|g| GlueRow {
            edge: g.edge.to_string(),
            from: g.from_format.to_string(),
            to: g.to_format.to_string(),
            pe: g.placed_on.clone(),
            cycles: g.cycles,
        })
        .collect()
}

pub fn schedule_rows(schedule: &Schedule) -> (Vec<ScheduleRow>, Vec<TransferRow>) {
    let tasks = schedule
        .entries
        .iter()
        .map(|e| ScheduleRow {
            task: match &e.task {
                TaskRef::Kernel { id } => id.clone(),
                glue => glue.to_string(),
            },
            pe: e.pe.clone(),
            start_us: e.start_s * 1e6,
            end_us: e.end_s * 1e6,
        })
        .collect();
    let transfers = schedule
        .link_entries
        .iter()
        .map(|l| TransferRow {
            edge: l.edge.to_string(),
            link: l.link.clone(),
            bytes: l.bytes,
            start_us: l.start_s * 1e6,
            end_us: l.end_s * 1e6,
        })
        .collect();
    (tasks, transfers)
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |out: &mut String, cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        let _ = writeln!(out, "  {}", padded.join("  ").trim_end());
    };
    line(out, header.to_vec());
    line(out, width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for r in rows {
        line(out, r.iter().map(String::as_str).collect());
    }
}

fn us(x: f64) -> String {
    format!("{x:.3}")
}

const TIMELINE_WIDTH: usize = 60;

/// Human-readable rendering of a report.
pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "waveform {} on bsp {}", r.waveform, r.bsp);
    let _ = writeln!(
        out,
        "strategy {}  weights {:?}  status {}",
        r.config.strategy, r.config.weights, r.status
    );
    if let Some(score) = r.score {
        let _ = writeln!(out, "score {score:.6}");
    }
    if let Some(f) = &r.failure {
        let _ = writeln!(out, "\nfailure ({}): {}", f.kind, f.message);
    }

    if !r.binding.is_empty() {
        let _ = writeln!(out, "\nbinding");
        let rows: Vec<Vec<String>> = r
            .binding
            .iter()
            .map(|b| {
                vec![
                    b.kernel.clone(),
                    b.implementation.clone(),
                    b.flavor.clone().unwrap_or_else(|| "-".into()),
                    b.pe.clone(),
                ]
            })
            .collect();
        table(&mut out, &["kernel", "implementation", "flavor", "pe"], &rows);
    }

    if !r.glue.is_empty() {
        let _ = writeln!(out, "\nglue");
        let rows: Vec<Vec<String>> = r
            .glue
            .iter()
            .map(|g| vec![g.edge.clone(), g.from.clone(), g.to.clone(), g.pe.clone(), g.cycles.to_string()])
            .collect();
        table(&mut out, &["edge", "from", "to", "pe", "cycles"], &rows);
    }

    let mut tasks: Vec<&ScheduleRow> = r.schedule.iter().collect();
    tasks.sort_by(|a, b| {
        a.pe.cmp(&b.pe)
            .then(a.start_us.total_cmp(&b.start_us))
            .then(a.task.cmp(&b.task))
    });
    if !tasks.is_empty() {
        let _ = writeln!(out, "\nschedule (us)");
        let rows: Vec<Vec<String>> = tasks
            .iter()
            .map(|t| vec![t.task.clone(), t.pe.clone(), us(t.start_us), us(t.end_us)])
            .collect();
        table(&mut out, &["task", "pe", "start", "end"], &rows);
    }
    if !r.transfers.is_empty() {
        let _ = writeln!(out, "\ntransfers (us)");
        let rows: Vec<Vec<String>> = r
            .transfers
            .iter()
            .map(|t| {
                vec![t.edge.clone(), t.link.clone(), t.bytes.to_string(), us(t.start_us), us(t.end_us)]
            })
            .collect();
        table(&mut out, &["edge", "link", "bytes", "start", "end"], &rows);
    }

    let horizon = tasks
        .iter()
        .map(|t| t.end_us)
        .chain(r.transfers.iter().map(|t| t.end_us))
        .fold(0.0, f64::max);
    if !tasks.is_empty() && horizon > 0.0 {
        let _ = writeln!(out, "\ntimeline (0 .. {} us)", us(horizon));
        let pe_width = tasks.iter().map(|t| t.pe.len()).max().unwrap_or(0);
        for t in &tasks {
            let col = |x: f64| ((x / horizon) * TIMELINE_WIDTH as f64).round() as usize;
            let (a, b) = (col(t.start_us), col(t.end_us).max(col(t.start_us) + 1));
            let b = b.min(TIMELINE_WIDTH);
            let a = a.min(b.saturating_sub(1));
            let bar: String = (0..TIMELINE_WIDTH)
                .map(|i| if i >= a && i < b { '#' } else { '.' })
                .collect();
            let _ = writeln!(out, "  {:<pe_width$} |{bar}| {}", t.pe, t.task);
        }
    }

    if let Some(m) = &r.metrics {
        let _ = writeln!(out, "\nmetrics");
        let mut rows = vec![
            vec!["makespan_us".into(), us(m.makespan_s * 1e6)],
            vec!["data_localization".into(), format!("{:.4}", m.data_localization)],
            vec!["comm_bytes".into(), m.comm_bytes.to_string()],
            vec!["comm_time_us".into(), us(m.comm_time_s * 1e6)],
            vec!["sync_count".into(), m.sync_count.to_string()],
            vec!["mean_utilization".into(), format!("{:.4}", m.mean_utilization)],
            vec!["energy_j".into(), format!("{:.6e}", m.energy_j)],
        ];
        for (pe, u) in &m.utilization {
            rows.push(vec![format!("utilization[{pe}]"), format!("{u:.4}")]);
        }
        rows.push(vec![
            "throughput_fps".into(),
            r.throughput_fps.map_or("unbounded".into(), |t| format!("{t:.3}")),
        ]);
        table(&mut out, &["metric", "value"], &rows);
    }

    if !r.verdicts.is_empty() {
        let _ = writeln!(out, "\nconstraints");
        let rows: Vec<Vec<String>> = r
            .verdicts
            .iter()
            .map(|v| {
                vec![
                    v.constraint.clone(),
                    format!("{:.3} {}", v.measured, v.unit),
                    format!("{} {}", v.bound, v.unit),
                    if v.satisfied { "ok" } else { "VIOLATED" }.into(),
                ]
            })
            .collect();
        table(&mut out, &["constraint", "measured", "bound", "verdict"], &rows);
    }

    if !r.strategies.is_empty() {
        let _ = writeln!(out, "\nstrategies");
        let rows: Vec<Vec<String>> = r
            .strategies
            .iter()
            .map(|s| {
                vec![
                    s.strategy.clone(),
                    s.score.map_or("-".into(), |x| format!("{x:.6}")),
                    s.feasible.map_or("-".into(), |f| f.to_string()),
                    s.explored.to_string(),
                    s.note.clone().unwrap_or_default(),
                ]
            })
            .collect();
        table(&mut out, &["strategy", "score", "feasible", "explored", "note"], &rows);
    }

    if r.ranked.len() > 1 {
        let _ = writeln!(out, "\nranked mappings");
        let rows: Vec<Vec<String>> = r
            .ranked
            .iter()
            .map(|m| {
                let b: Vec<String> = m.binding.iter().map(|(k, v)| format!("{k}={v}")).collect();
                vec![m.rank.to_string(), format!("{:.6}", m.score), m.feasible.to_string(), b.join(" ")]
            })
            .collect();
        table(&mut out, &["rank", "score", "feasible", "binding"], &rows);
    }

    for n in &r.notes {
        let _ = writeln!(out, "\nnote: {n}");
    }
    out
}
