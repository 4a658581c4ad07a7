//! Mapping evaluation: metrics over a schedule, constraint verdicts, and
//! the weighted scalar score used to rank mappings (lower is better).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapper::enumerate_candidates;
use crate::model::{
    cycles_of, port_formats, Bsp, ConstraintSpec, FormatKind, KernelKind, Mapping, Schedule,
    Target, WaveformGraph,
};
use crate::scheduler::{edge_bytes, generic_load};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("weights must be finite and nonnegative with at least one positive entry")]
    InvalidWeights,
    #[error("expected 5 weights, got {0}")]
    WeightCount(usize),
    #[error("constraint references kernel `{0}` which is not in the schedule")]
    Unscheduled(String),
}

/// Relative importance of the five metric terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub latency: f64,
    pub communication: f64,
    pub synchronization: f64,
    pub utilization: f64,
    pub energy: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            latency: 1.0,
            communication: 1.0,
            synchronization: 0.5,
            utilization: 0.5,
            energy: 1.0,
        }
    }
}

impl Weights {
    pub fn from_slice(w: &[f64]) -> Result<Self, EvalError> {
        let [latency, communication, synchronization, utilization, energy] = w else {
            return Err(EvalError::WeightCount(w.len()));
        };
        let weights = Weights {
            latency: *latency,
            communication: *communication,
            synchronization: *synchronization,
            utilization: *utilization,
            energy: *energy,
        };
        weights.validate()?;
        Ok(weights)
    }

    pub fn as_array(&self) -> [f64; 5] {
        [
            self.latency,
            self.communication,
            self.synchronization,
            self.utilization,
            self.energy,
        ]
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let w = self.as_array();
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) || w.iter().all(|x| *x == 0.0) {
            return Err(EvalError::InvalidWeights);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub weights: Weights,
    /// Energy per operation of code running outside a flavor (non-nucleus
    /// kernels, fallbacks and glue conversions).
    pub generic_energy_per_op_j: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            weights: Weights::default(),
            generic_energy_per_op_j: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub makespan_s: f64,
    /// Fraction of edge bytes whose producer and consumer share a PE.
    pub data_localization: f64,
    pub comm_bytes: u64,
    pub comm_time_s: f64,
    /// Dependencies that cross a PE boundary.
    pub sync_count: u64,
    pub utilization: BTreeMap<String, f64>,
    pub mean_utilization: f64,
    pub energy_j: f64,
}

pub fn compute_metrics(
    g: &WaveformGraph,
    bsp: &Bsp,
    mapping: &Mapping,
    schedule: &Schedule,
    config: &EvalConfig,
) -> Metrics {
    let mut total_bytes = 0u64;
    let mut comm_bytes = 0u64;
    let mut sync_count = 0u64;
    for e in &g.edges {
        let bytes = edge_bytes(bsp, mapping, e);
        total_bytes += bytes;
        if mapping.pe_of(bsp, &e.src) != mapping.pe_of(bsp, &e.dst) {
            comm_bytes += bytes;
            sync_count += 1;
        }
    }
    let data_localization = if total_bytes == 0 {
        1.0
    } else {
        (total_bytes - comm_bytes) as f64 / total_bytes as f64
    };

    let comm_time_s = schedule
        .link_entries
        .iter()
        .map(|l| l.end_s - l.start_s)
        .fold(0.0, |a, b| a + b);

    let makespan = schedule.makespan_s;
    let utilization: BTreeMap<String, f64> = bsp
        .platform
        .pes
        .iter()
        .map(|p| {
            let u = if makespan > 0.0 {
                (schedule.busy_time_on_pe(&p.id) / makespan).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (p.id.clone(), u)
        })
        .collect();
    let mean_utilization = if utilization.is_empty() {
        0.0
    } else {
        utilization.values().sum::<f64>() / utilization.len() as f64
    };

    let epo = config.generic_energy_per_op_j;
    let mut energy_j = 0.0;
    for k in &g.kernels {
        energy_j += match mapping.binding.get(&k.id) {
            Some(Target::Flavor(f)) => match (bsp.flavor(f), k.size()) {
                (Some(f), Some(n)) => k.invocations as f64 * f.cost.energy_j(n),
                _ => 0.0,
            },
            Some(Target::Pe(_)) => {
                k.invocations as f64 * generic_load(&k.kind).unwrap_or(0) as f64 * epo
            }
            None => 0.0,
        };
    }
    energy_j += mapping.glue.iter().map(|t| t.cycles as f64 * epo).sum::<f64>();
    for l in &schedule.link_entries {
        if let Some(link) = bsp.platform.links.iter().find(|x| x.id == l.link) {
            energy_j += link.energy_per_byte_j * l.bytes as f64;
        }
    }

    Metrics {
        makespan_s: makespan,
        data_localization,
        comm_bytes,
        comm_time_s,
        sync_count,
        utilization,
        mean_utilization,
        energy_j,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub constraint: String,
    pub measured: f64,
    pub bound: f64,
    pub unit: String,
    pub satisfied: bool,
}

/// Checks latency constraints against scheduled times and throughput
/// constraints against the pipelined frame rate.
pub fn check_constraints(
    g: &WaveformGraph,
    schedule: &Schedule,
    throughput_fps: f64,
) -> Result<Vec<Verdict>, EvalError> {
    g.constraints
        .iter()
        .map(|c| match c {
            ConstraintSpec::PathLatency { path, bound_us } => {
                let lookup = |id: &String| {
                    schedule
                        .kernel_entry(id)
                        .ok_or_else(|| EvalError::Unscheduled(id.clone()))
                };
                let (Some(first), Some(last)) = (path.first(), path.last()) else {
                    return Err(EvalError::Unscheduled(String::new()));
                };
                for id in path {
                    lookup(id)?;
                }
                let measured_us = (lookup(last)?.end_s - lookup(first)?.start_s) * 1e6;
                Ok(Verdict {
                    constraint: c.to_string(),
                    measured: measured_us,
                    bound: *bound_us,
                    unit: "us".into(),
                    satisfied: measured_us <= *bound_us,
                })
            }
            ConstraintSpec::Throughput { min_frames_per_s } => Ok(Verdict {
                constraint: c.to_string(),
                measured: throughput_fps,
                bound: *min_frames_per_s,
                unit: "fps".into(),
                satisfied: throughput_fps >= *min_frames_per_s,
            }),
        })
        .collect()
}

/// Per-instance upper bounds used to make the score terms dimensionless.
/// They depend only on the waveform and the BSP, never on a particular
/// mapping, so scores of different mappings are comparable.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizers {
    pub latency_s: f64,
    pub comm_bytes: f64,
    pub edges: f64,
    pub energy_j: f64,
}

impl Normalizers {
    pub fn for_instance(g: &WaveformGraph, bsp: &Bsp, config: &EvalConfig) -> Self {
        let candidates = enumerate_candidates(g, bsp);
        let epo = config.generic_energy_per_op_j;
        let mut latency_s = 0.0f64;
        let mut energy_j = 0.0f64;
        for k in &g.kernels {
            let mut worst_time = 0.0f64;
            let mut worst_energy = 0.0f64;
            for c in candidates.for_kernel(&k.id) {
                let (pe, energy) = match &c.target {
                    Target::Flavor(f) => {
                        let Some(f) = bsp.flavor(f) else { continue };
                        let e = k.size().map_or(0.0, |n| f.cost.energy_j(n));
                        (bsp.pe(&f.pe), k.invocations as f64 * e)
                    }
                    Target::Pe(p) => {
                        let load = generic_load(&k.kind).unwrap_or(0) as f64;
                        (bsp.pe(p), k.invocations as f64 * load * epo)
                    }
                };
                if let Some(pe) = pe {
                    worst_time = worst_time.max(c.est_cycles / pe.clock_hz());
                }
                worst_energy = worst_energy.max(energy);
            }
            latency_s += worst_time;
            energy_j += worst_energy;
        }

        let max_glue_rate = FormatKind::ALL
            .iter()
            .flat_map(|a| FormatKind::ALL.iter().map(move |b| (*a, *b)))
            .filter_map(|(a, b)| bsp.glue.cycles_per_sample(a, b))
            .max()
            .unwrap_or(0) as f64;
        let max_link_epb = bsp
            .platform
            .links
            .iter()
            .map(|l| l.energy_per_byte_j)
            .fold(0.0, f64::max);
        let mut comm_bytes = 0.0;
        for e in &g.edges {
            let widest = producer_formats(bsp, &candidates, e)
                .map(|b| b as f64)
                .fold(e.format.bytes_per_sample() as f64, f64::max);
            let bytes = e.tokens as f64 * widest;
            comm_bytes += bytes;
            // Worst case: a two-hop transfer plus a conversion at the consumer.
            energy_j += 2.0 * bytes * max_link_epb + e.tokens as f64 * max_glue_rate * epo;
        }
        Normalizers {
            latency_s,
            comm_bytes,
            edges: g.edges.len() as f64,
            energy_j,
        }
    }
}

fn producer_formats<'a>(
    bsp: &'a Bsp,
    candidates: &'a crate::mapper::CandidateSet,
    e: &'a crate::model::EdgeSpec,
) -> impl Iterator<Item = u64> + 'a {
    candidates.for_kernel(&e.src).iter().map(move |c| {
        let binding = [(e.src.clone(), c.target.clone())].into();
        port_formats(bsp, &binding, e).0.bytes_per_sample()
    })
}

fn ratio(x: f64, bound: f64) -> f64 {
    if bound > 0.0 {
        x / bound
    } else {
        0.0
    }
}

/// Weighted sum of normalized metric terms; lower is better.
pub fn score(metrics: &Metrics, weights: &Weights, norm: &Normalizers) -> Result<f64, EvalError> {
    weights.validate()?;
    Ok(weights.latency * ratio(metrics.makespan_s, norm.latency_s)
        + weights.communication * ratio(metrics.comm_bytes as f64, norm.comm_bytes)
        + weights.synchronization * ratio(metrics.sync_count as f64, norm.edges)
        + weights.utilization * (1.0 - metrics.mean_utilization)
        + weights.energy * ratio(metrics.energy_j, norm.energy_j))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub metrics: Metrics,
    pub throughput_fps: f64,
    pub verdicts: Vec<Verdict>,
    pub feasible: bool,
    pub score: f64,
}

impl EvaluationReport {
    /// Ranking order: every feasible report before every infeasible one,
    /// then by ascending score.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .feasible
            .cmp(&self.feasible)
            .then_with(|| self.score.total_cmp(&other.score))
    }
}

/// Scores mappings of one waveform on one BSP.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluator {
    pub config: EvalConfig,
    pub normalizers: Normalizers,
}

impl Evaluator {
    pub fn new(g: &WaveformGraph, bsp: &Bsp, config: EvalConfig) -> Result<Self, EvalError> {
        config.weights.validate()?;
        Ok(Evaluator {
            normalizers: Normalizers::for_instance(g, bsp, &config),
            config,
        })
    }

    pub fn evaluate(
        &self,
        g: &WaveformGraph,
        bsp: &Bsp,
        mapping: &Mapping,
        schedule: &Schedule,
    ) -> Result<EvaluationReport, EvalError> {
        let metrics = compute_metrics(g, bsp, mapping, schedule, &self.config);
        let throughput_fps = crate::scheduler::steady_state_throughput(schedule, &bsp.platform);
        let verdicts = check_constraints(g, schedule, throughput_fps)?;
        let feasible = verdicts.iter().all(|v| v.satisfied);
        let score = score(&metrics, &self.config.weights, &self.normalizers)?;
        Ok(EvaluationReport {
            metrics,
            throughput_fps,
            verdicts,
            feasible,
            score,
        })
    }
}

/// Estimated cycles of running a kernel on a target, before any format or
/// communication effects.
pub(crate) fn estimated_cycles(
    kind: &KernelKind,
    invocations: u64,
    target: &Target,
    bsp: &Bsp,
) -> Option<f64> {
    let per_call = match (kind, target) {
        (KernelKind::Nucleus { params, .. }, Target::Flavor(f)) => {
            cycles_of(&bsp.flavor(f)?.cost, *params.get("size")?).ok()?
        }
        (_, Target::Pe(p)) => generic_load(kind)? as f64 / bsp.pe(p)?.gpp_efficiency,
        _ => return None,
    };
    Some(invocations as f64 * per_call)
}
