//! Spatial mapping: binding kernels to flavors or PEs, inserting format
//! glue, and searching the binding space (exhaustively or greedily).

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluator::{estimated_cycles, EvalError, EvaluationReport, Evaluator};
use crate::model::{
    port_formats, Binding, Bsp, DataFormat, EdgeKey, Flavor, GlueTask, KernelSpec, Mapping,
    Schedule, Target, WaveformGraph,
};
use crate::scheduler::{list_schedule, ScheduleError};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 1_000_000;
pub const DEFAULT_MOVE_BUDGET: usize = 1000;

/// Errors from mapping, scheduling and evaluating one binding.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("edge {edge}: no conversion from {from} to {to}")]
    UnmappableFormat {
        edge: EdgeKey,
        from: DataFormat,
        to: DataFormat,
    },
    #[error("kernel `{0}` has no binding")]
    Unbound(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Why a search produced no mapping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapFailure {
    #[error("waveform is invalid: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("no implementation available for kernel(s): {}", .0.join(", "))]
    EmptyCandidates(Vec<String>),
    #[error("{product} candidate bindings exceed the enumeration bound of {bound}; use the greedy strategy")]
    BoundExceeded { product: u128, bound: u64 },
    #[error("no feasible mapping: {}", .reasons.join("; "))]
    NoFeasible { reasons: Vec<String> },
    #[error(transparent)]
    Config(#[from] EvalError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub kernel: String,
    pub target: Target,
    pub est_cycles: f64,
    pub format_penalty_cycles: f64,
}

/// Candidates per kernel, kernels and candidates both sorted by id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CandidateSet {
    pub per_kernel: Vec<(String, Vec<Candidate>)>,
}

impl CandidateSet {
    pub fn for_kernel(&self, id: &str) -> &[Candidate] {
        self.per_kernel
            .binary_search_by(|(k, _)| k.as_str().cmp(id))
            .map_or(&[], |i| &self.per_kernel[i].1)
    }

    pub fn empty_kernels(&self) -> Vec<String> {
        self.per_kernel
            .iter()
            .filter(|(_, c)| c.is_empty())
            .map(|(k, _)| k.clone())
            .collect()
    }

    /// Number of total bindings; saturates instead of overflowing.
    pub fn product(&self) -> u128 {
        self.per_kernel
            .iter()
            .fold(1u128, |acc, (_, c)| acc.saturating_mul(c.len() as u128))
    }
}

/// Whether a flavor can implement a nucleus kernel: same nucleus and the
/// kernel's size is among the flavor's supported sizes.
pub fn compatible(kernel: &KernelSpec, flavor: &Flavor) -> bool {
    match (kernel.nucleus_id(), kernel.size()) {
        (Some(nucleus), Some(size)) => {
            *nucleus == flavor.nucleus && flavor.supported_sizes.contains(size)
        }
        _ => false,
    }
}

/// Every legal target per kernel. Nucleus kernels get their compatible
/// flavors (or, failing that, generic PEs when they declare a fallback
/// load); other kernels get every PE able to run generic code.
pub fn enumerate_candidates(g: &WaveformGraph, bsp: &Bsp) -> CandidateSet {
    let generic_pes = || {
        bsp.platform
            .pes
            .iter()
            .filter(|p| p.class.runs_generic_code())
            .map(|p| Target::Pe(p.id.clone()))
            .collect::<Vec<_>>()
    };
    let mut per_kernel: Vec<(String, Vec<Candidate>)> = g
        .kernels
        .iter()
        .map(|k| {
            let targets = if k.is_nucleus() {
                let flavors: Vec<_> = bsp
                    .flavors
                    .iter()
                    .filter(|f| compatible(k, f) && bsp.pe(&f.pe).is_some())
                    .map(|f| Target::Flavor(f.id.clone()))
                    .collect();
                if flavors.is_empty() && crate::scheduler::generic_load(&k.kind).is_some() {
                    generic_pes()
                } else {
                    flavors
                }
            } else {
                generic_pes()
            };
            let mut cands: Vec<Candidate> = targets
                .into_iter()
                .filter_map(|t| {
                    let est = estimated_cycles(&k.kind, k.invocations, &t, bsp)?;
                    Some(Candidate {
                        kernel: k.id.clone(),
                        target: t,
                        est_cycles: est,
                        format_penalty_cycles: 0.0,
                    })
                })
                .collect();
            cands.sort_by(|a, b| a.target.id().cmp(b.target.id()));
            (k.id.clone(), cands)
        })
        .collect();
    per_kernel.sort_by(|a, b| a.0.cmp(&b.0));
    CandidateSet { per_kernel }
}

/// Glue conversions for every edge whose producer format differs from what
/// the consumer expects, placed on the consumer's PE.
pub fn insert_glue(
    g: &WaveformGraph,
    bsp: &Bsp,
    binding: &Binding,
) -> Result<Vec<GlueTask>, MapError> {
    let mapping = Mapping {
        binding: binding.clone(),
        glue: Vec::new(),
    };
    let mut glue = Vec::new();
    for e in &g.edges {
        let (from, to) = port_formats(bsp, binding, e);
        if from == to {
            continue;
        }
        let rate = bsp
            .glue
            .cycles_per_sample(from.kind(), to.kind())
            .ok_or_else(|| MapError::UnmappableFormat {
                edge: e.key(),
                from,
                to,
            })?;
        let placed_on = mapping
            .pe_of(bsp, &e.dst)
            .ok_or_else(|| MapError::Unbound(e.dst.clone()))?
            .to_string();
        glue.push(GlueTask {
            edge: e.key(),
            from_format: from,
            to_format: to,
            placed_on,
            cycles: rate * e.tokens,
        });
    }
    Ok(glue)
}

/// A binding carried through glue insertion, scheduling and evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluated {
    pub mapping: Mapping,
    pub schedule: Schedule,
    pub report: EvaluationReport,
}

pub fn evaluate_binding(
    g: &WaveformGraph,
    bsp: &Bsp,
    binding: Binding,
    evaluator: &Evaluator,
) -> Result<Evaluated, MapError> {
    let glue = insert_glue(g, bsp, &binding)?;
    let mapping = Mapping { binding, glue };
    let schedule = list_schedule(g, bsp, &mapping)?;
    let report = evaluator.evaluate(g, bsp, &mapping, &schedule)?;
    Ok(Evaluated {
        mapping,
        schedule,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub enumeration_bound: u64,
    pub move_budget: usize,
    /// How many of the best distinct bindings to keep for reporting.
    pub top_k: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            move_budget: DEFAULT_MOVE_BUDGET,
            top_k: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedMapping {
    pub binding: Binding,
    pub feasible: bool,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapOutcome {
    pub best: Evaluated,
    /// Best distinct bindings seen, best first.
    pub ranked: Vec<RankedMapping>,
    /// Number of bindings evaluated.
    pub explored: u64,
}

fn check_inputs(g: &WaveformGraph, bsp: &Bsp) -> Result<CandidateSet, MapFailure> {
    let violations = g.validate();
    if !violations.is_empty() {
        return Err(MapFailure::InvalidGraph(
            violations.into_iter().map(|v| v.message).collect(),
        ));
    }
    let candidates = enumerate_candidates(g, bsp);
    let empty = candidates.empty_kernels();
    if !empty.is_empty() {
        return Err(MapFailure::EmptyCandidates(empty));
    }
    Ok(candidates)
}

fn decode(candidates: &CandidateSet, mut index: u128) -> Binding {
    let mut picks = vec![0usize; candidates.per_kernel.len()];
    for (slot, (_, c)) in picks.iter_mut().zip(&candidates.per_kernel).rev() {
        let radix = c.len() as u128;
        *slot = (index % radix) as usize;
        index /= radix;
    }
    candidates
        .per_kernel
        .iter()
        .zip(picks)
        .map(|((k, c), i)| (k.clone(), c[i].target.clone()))
        .collect()
}

#[derive(Clone, Copy, Debug)]
struct Scored {
    feasible: bool,
    score: f64,
    index: u128,
}

impl Scored {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .feasible
            .cmp(&self.feasible)
            .then_with(|| self.score.total_cmp(&other.score))
            .then_with(|| self.index.cmp(&other.index))
    }
}

#[derive(Clone, Debug, Default)]
struct Tally {
    top: Vec<Scored>,
    first_error: Option<(u128, MapError)>,
    explored: u64,
}

impl Tally {
    fn push(&mut self, s: Scored, k: usize) {
        let pos = self
            .top
            .binary_search_by(|x| x.cmp(&s))
            .unwrap_or_else(|p| p);
        if pos < k {
            self.top.insert(pos, s);
            self.top.truncate(k);
        }
    }

    fn merge(mut self, other: Tally, k: usize) -> Tally {
        for s in other.top {
            self.push(s, k);
        }
        self.first_error = match (self.first_error, other.first_error) {
            (Some(a), Some(b)) => Some(if a.0 <= b.0 { a } else { b }),
            (a, b) => a.or(b),
        };
        self.explored += other.explored;
        self
    }
}

fn infeasibility_reasons(report: &EvaluationReport) -> Vec<String> {
    report
        .verdicts
        .iter()
        .filter(|v| !v.satisfied)
        .map(|v| {
            format!(
                "constraint `{}` violated (measured {} {}, bound {} {})",
                v.constraint, v.measured, v.unit, v.bound, v.unit
            )
        })
        .collect()
}

/// Evaluates every total binding and returns the best feasible one. Ties are
/// broken toward the lexicographically smallest choice of candidate ids,
/// taken in kernel-id order.
pub fn map_exhaustive(
    g: &WaveformGraph,
    bsp: &Bsp,
    evaluator: &Evaluator,
    options: &SearchOptions,
) -> Result<MapOutcome, MapFailure> {
    evaluator.config.weights.validate()?;
    let candidates = check_inputs(g, bsp)?;
    let product = candidates.product();
    if product > options.enumeration_bound as u128 {
        return Err(MapFailure::BoundExceeded {
            product,
            bound: options.enumeration_bound,
        });
    }
    let k = options.top_k.max(1);
    let tally = (0..product as u64)
        .into_par_iter()
        .fold(Tally::default, |mut t, i| {
            let index = i as u128;
            t.explored += 1;
            match evaluate_binding(g, bsp, decode(&candidates, index), evaluator) {
                Ok(ev) => t.push(
                    Scored {
                        feasible: ev.report.feasible,
                        score: ev.report.score,
                        index,
                    },
                    k,
                ),
                Err(e) => {
                    if t.first_error.as_ref().is_none_or(|(j, _)| index < *j) {
                        t.first_error = Some((index, e));
                    }
                }
            }
            t
        })
        .reduce(Tally::default, |a, b| a.merge(b, k));

    let Some(best) = tally.top.first().copied() else {
        let reasons = tally
            .first_error
            .map(|(_, e)| vec![e.to_string()])
            .unwrap_or_default();
        return Err(MapFailure::NoFeasible { reasons });
    };
    let best_eval = evaluate_binding(g, bsp, decode(&candidates, best.index), evaluator)
        .expect("binding evaluated successfully during the search");
    if !best.feasible {
        return Err(MapFailure::NoFeasible {
            reasons: infeasibility_reasons(&best_eval.report),
        });
    }
    let ranked = tally
        .top
        .iter()
        .map(|s| RankedMapping {
            binding: decode(&candidates, s.index),
            feasible: s.feasible,
            score: s.score,
        })
        .collect();
    Ok(MapOutcome {
        best: best_eval,
        ranked,
        explored: tally.explored,
    })
}

fn glue_penalty(
    g: &WaveformGraph,
    bsp: &Bsp,
    binding: &Binding,
    kernel: &str,
) -> f64 {
    g.edges
        .iter()
        .filter(|e| {
            (e.src == kernel || e.dst == kernel)
                && binding.contains_key(&e.src)
                && binding.contains_key(&e.dst)
        })
        .map(|e| {
            let (from, to) = port_formats(bsp, binding, e);
            if from == to {
                0.0
            } else {
                bsp.glue
                    .cycles_per_sample(from.kind(), to.kind())
                    .map_or(f64::INFINITY, |rate| (rate * e.tokens) as f64)
            }
        })
        .sum()
}

fn better(candidate: &Result<Evaluated, MapError>, current: &Result<Evaluated, MapError>) -> bool {
    match (candidate, current) {
        (Ok(a), Ok(b)) => a.report.rank_cmp(&b.report) == Ordering::Less,
        (Ok(_), Err(_)) => true,
        (Err(_), _) => false,
    }
}

/// Builds a binding kernel by kernel in topological order, each time taking
/// the candidate with the lowest estimated cycles plus glue cost against
/// already-bound neighbors; then applies single-kernel rebinds while they
/// strictly improve the evaluation, up to the move budget.
pub fn map_greedy(
    g: &WaveformGraph,
    bsp: &Bsp,
    evaluator: &Evaluator,
    options: &SearchOptions,
) -> Result<MapOutcome, MapFailure> {
    evaluator.config.weights.validate()?;
    let candidates = check_inputs(g, bsp)?;
    let order = g
        .topological_order()
        .expect("validated graphs are acyclic");

    let mut binding = Binding::new();
    for kernel in order {
        let mut best: Option<(f64, &Target)> = None;
        for c in candidates.for_kernel(kernel) {
            binding.insert(kernel.to_string(), c.target.clone());
            let penalty = glue_penalty(g, bsp, &binding, kernel);
            let cost = c.est_cycles + penalty;
            if best.is_none_or(|(b, _)| cost < b) {
                best = Some((cost, &c.target));
            }
        }
        let (_, target) = best.expect("candidate lists are non-empty");
        binding.insert(kernel.to_string(), target.clone());
    }

    let mut seen: BTreeMap<Binding, (bool, f64)> = BTreeMap::new();
    let mut record = |b: &Binding, r: &Result<Evaluated, MapError>| {
        if let Ok(ev) = r {
            seen.insert(b.clone(), (ev.report.feasible, ev.report.score));
        }
    };

    let mut current = evaluate_binding(g, bsp, binding.clone(), evaluator);
    record(&binding, &current);
    let mut explored = 1u64;
    let mut moves = 0usize;
    'search: loop {
        let mut improved = false;
        for (kernel, cands) in &candidates.per_kernel {
            for c in cands {
                if binding.get(kernel) == Some(&c.target) {
                    continue;
                }
                if moves >= options.move_budget {
                    break 'search;
                }
                moves += 1;
                let mut trial = binding.clone();
                trial.insert(kernel.clone(), c.target.clone());
                let result = evaluate_binding(g, bsp, trial.clone(), evaluator);
                explored += 1;
                record(&trial, &result);
                if better(&result, &current) {
                    binding = trial;
                    current = result;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }

    let best = match current {
        Ok(ev) if ev.report.feasible => ev,
        Ok(ev) => {
            return Err(MapFailure::NoFeasible {
                reasons: infeasibility_reasons(&ev.report),
            })
        }
        Err(e) => {
            return Err(MapFailure::NoFeasible {
                reasons: vec![e.to_string()],
            })
        }
    };
    let mut ranked: Vec<RankedMapping> = seen
        .into_iter()
        .map(|(binding, (feasible, score))| RankedMapping {
            binding,
            feasible,
            score,
        })
        .collect();
    ranked.sort_by(|a, b| {
        b.feasible
            .cmp(&a.feasible)
            .then_with(|| a.score.total_cmp(&b.score))
            .then_with(|| a.binding.cmp(&b.binding))
    });
    ranked.truncate(options.top_k.max(1));
    Ok(MapOutcome {
        best,
        ranked,
        explored,
    })
}
