//! Static, non-preemptive list scheduling of kernels, glue tasks and link
//! transfers.
//!
//! Priorities follow the upward rank (longest path to a sink counting task
//! and transfer durations). Each task starts once all of its inputs have
//! arrived and its PE is free; transfers are serialized per link.

use std::collections::HashMap;

use thiserror::Error;

use crate::model::{
    cycles_of, port_formats, Bsp, EdgeKey, EdgeSpec, KernelKind, LinkEntry, Mapping, ModelError,
    Platform, Schedule, ScheduleEntry, Target, TaskRef, WaveformGraph,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("kernel `{0}` is not in the waveform")]
    UnknownKernel(String),
    #[error("kernel `{0}` has no binding")]
    Unbound(String),
    #[error("flavor `{0}` is not in the BSP")]
    UnknownFlavor(String),
    #[error("processing element `{0}` is not in the platform")]
    UnknownPe(String),
    #[error("kernel `{0}` is bound to a PE but has no generic implementation")]
    NoGenericImplementation(String),
    #[error("edge {edge} cannot be routed from {from} to {to}")]
    Unroutable {
        edge: EdgeKey,
        from: String,
        to: String,
    },
    #[error("graph has a cycle")]
    Cyclic,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Execution time of one task under a mapping.
pub fn task_duration(
    task: &TaskRef,
    g: &WaveformGraph,
    bsp: &Bsp,
    mapping: &Mapping,
) -> Result<f64, ScheduleError> {
    match task {
        TaskRef::Kernel { id } => {
            let kernel = g
                .kernel(id)
                .ok_or_else(|| ScheduleError::UnknownKernel(id.clone()))?;
            let target = mapping
                .binding
                .get(id)
                .ok_or_else(|| ScheduleError::Unbound(id.clone()))?;
            let invocations = kernel.invocations as f64;
            match target {
                Target::Flavor(fid) => {
                    let flavor = bsp
                        .flavor(fid)
                        .ok_or_else(|| ScheduleError::UnknownFlavor(fid.clone()))?;
                    let pe = pe_or_err(&bsp.platform, &flavor.pe)?;
                    let size = kernel
                        .size()
                        .ok_or_else(|| ScheduleError::NoGenericImplementation(id.clone()))?;
                    Ok(invocations * cycles_of(&flavor.cost, size)? / pe.clock_hz())
                }
                Target::Pe(pid) => {
                    let pe = pe_or_err(&bsp.platform, pid)?;
                    let load = generic_load(&kernel.kind)
                        .ok_or_else(|| ScheduleError::NoGenericImplementation(id.clone()))?;
                    Ok(invocations * load as f64 / (pe.gpp_efficiency * pe.clock_hz()))
                }
            }
        }
        TaskRef::Glue { edge } => {
            let glue = mapping.glue_for(edge).ok_or_else(|| {
                ScheduleError::UnknownKernel(format!("glue({})", edge))
            })?;
            let pe = pe_or_err(&bsp.platform, &glue.placed_on)?;
            Ok(glue.cycles as f64 / pe.clock_hz())
        }
    }
}

/// Operation load of a kernel executed as plain code.
pub(crate) fn generic_load(kind: &KernelKind) -> Option<u64> {
    match kind {
        KernelKind::NonNucleus { load_ops } => Some(*load_ops),
        KernelKind::Nucleus { fallback_load, .. } => *fallback_load,
    }
}

fn pe_or_err<'a>(
    platform: &'a Platform,
    id: &str,
) -> Result<&'a crate::model::ProcessingElement, ScheduleError> {
    platform
        .pe(id)
        .ok_or_else(|| ScheduleError::UnknownPe(id.to_string()))
}

/// A single hop of a transfer.
#[derive(Clone, Debug, PartialEq)]
pub struct Leg {
    pub link: usize,
    pub duration_s: f64,
}

/// How data moves between two PEs.
#[derive(Clone, Debug, PartialEq)]
pub enum Route {
    Local,
    Links(Vec<Leg>),
}

impl Route {
    pub fn duration_s(&self) -> f64 {
        match self {
            Route::Local => 0.0,
            Route::Links(legs) => legs.iter().map(|l| l.duration_s).fold(0.0, |a, b| a + b),
        }
    }
}

fn leg(platform: &Platform, link: usize, bytes: u64) -> Leg {
    let l = &platform.links[link];
    Leg {
        link,
        duration_s: l.latency_s() + bytes as f64 / l.bandwidth_bytes_per_s(),
    }
}

/// Route between two PEs: local, the direct link, or the cheapest path
/// through one intermediate PE (ties resolved by intermediate PE id).
pub fn route(platform: &Platform, from: &str, to: &str, bytes: u64) -> Option<Route> {
    if from == to {
        return Some(Route::Local);
    }
    if let Some(i) = platform.links.iter().position(|l| l.connects(from, to)) {
        return Some(Route::Links(vec![leg(platform, i, bytes)]));
    }
    let mut best: Option<(f64, &str, Vec<Leg>)> = None;
    for (i, first) in platform.links.iter().enumerate() {
        let Some(mid) = first.other_end(from) else {
            continue;
        };
        if mid == to {
            continue;
        }
        let Some(j) = platform.links.iter().position(|l| l.connects(mid, to)) else {
            continue;
        };
        let legs = vec![leg(platform, i, bytes), leg(platform, j, bytes)];
        let d: f64 = legs.iter().map(|l| l.duration_s).fold(0.0, |a, b| a + b);
        let better = match &best {
            None => true,
            Some((bd, bmid, _)) => d < *bd || (d == *bd && mid < *bmid),
        };
        if better {
            best = Some((d, mid, legs));
        }
    }
    best.map(|(_, _, legs)| Route::Links(legs))
}

/// Bytes an edge puts on the interconnect (in the producer's format).
pub fn edge_bytes(bsp: &Bsp, mapping: &Mapping, edge: &EdgeSpec) -> u64 {
    let (produced, _) = port_formats(bsp, &mapping.binding, edge);
    edge.tokens * produced.bytes_per_sample()
}

/// Time to move an edge's data from producer PE to consumer PE.
pub fn transfer_duration(
    edge: &EdgeSpec,
    bsp: &Bsp,
    mapping: &Mapping,
) -> Result<f64, ScheduleError> {
    edge_route(edge, bsp, mapping).map(|r| r.duration_s())
}

fn edge_route(edge: &EdgeSpec, bsp: &Bsp, mapping: &Mapping) -> Result<Route, ScheduleError> {
    let from = mapping
        .pe_of(bsp, &edge.src)
        .ok_or_else(|| ScheduleError::Unbound(edge.src.clone()))?;
    let to = mapping
        .pe_of(bsp, &edge.dst)
        .ok_or_else(|| ScheduleError::Unbound(edge.dst.clone()))?;
    route(&bsp.platform, from, to, edge_bytes(bsp, mapping, edge)).ok_or_else(|| {
        ScheduleError::Unroutable {
            edge: edge.key(),
            from: from.to_string(),
            to: to.to_string(),
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub task: TaskRef,
    pub pe: String,
    pub duration_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dependency {
    pub from: usize,
    pub to: usize,
    pub edge: EdgeKey,
    pub bytes: u64,
    pub route: Route,
}

/// The scheduling problem derived from a graph and a mapping: one task per
/// kernel and glue conversion, one dependency per data hand-off.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskGraph {
    pub tasks: Vec<Task>,
    pub deps: Vec<Dependency>,
    pub links: Vec<String>,
}

impl TaskGraph {
    pub fn build(g: &WaveformGraph, bsp: &Bsp, mapping: &Mapping) -> Result<Self, ScheduleError> {
        let mut tasks = Vec::with_capacity(g.kernels.len() + mapping.glue.len());
        let mut index = HashMap::new();
        for k in &g.kernels {
            let task = TaskRef::kernel(&k.id);
            let duration_s = task_duration(&task, g, bsp, mapping)?;
            let pe = mapping
                .pe_of(bsp, &k.id)
                .ok_or_else(|| ScheduleError::Unbound(k.id.clone()))?
                .to_string();
            index.insert(k.id.as_str(), tasks.len());
            tasks.push(Task {
                task,
                pe,
                duration_s,
            });
        }
        let mut deps = Vec::with_capacity(g.edges.len() + mapping.glue.len());
        for e in &g.edges {
            let (Some(&src), Some(&dst)) = (index.get(e.src.as_str()), index.get(e.dst.as_str()))
            else {
                return Err(ScheduleError::UnknownKernel(format!("{}->{}", e.src, e.dst)));
            };
            let route = edge_route(e, bsp, mapping)?;
            let bytes = edge_bytes(bsp, mapping, e);
            let key = e.key();
            match mapping.glue_for(&key) {
                Some(glue) => {
                    let task = TaskRef::Glue { edge: key.clone() };
                    let duration_s = task_duration(&task, g, bsp, mapping)?;
                    let glue_idx = tasks.len();
                    tasks.push(Task {
                        task,
                        pe: glue.placed_on.clone(),
                        duration_s,
                    });
                    deps.push(Dependency {
                        from: src,
                        to: glue_idx,
                        edge: key.clone(),
                        bytes,
                        route,
                    });
                    deps.push(Dependency {
                        from: glue_idx,
                        to: dst,
                        edge: key,
                        bytes: 0,
                        route: Route::Local,
                    });
                }
                None => deps.push(Dependency {
                    from: src,
                    to: dst,
                    edge: key,
                    bytes,
                    route,
                }),
            }
        }
        Ok(TaskGraph {
            tasks,
            deps,
            links: bsp.platform.links.iter().map(|l| l.id.clone()).collect(),
        })
    }

    /// Longest path from each task to a sink, counting its own duration and
    /// every transfer on the way.
    pub fn upward_ranks(&self) -> Result<Vec<f64>, ScheduleError> {
        let order = self.topological_order().ok_or(ScheduleError::Cyclic)?;
        let mut rank = vec![0.0f64; self.tasks.len()];
        for &t in order.iter().rev() {
            let tail = self
                .deps
                .iter()
                .filter(|d| d.from == t)
                .map(|d| d.route.duration_s() + rank[d.to])
                .fold(0.0, f64::max);
            rank[t] = self.tasks[t].duration_s + tail;
        }
        Ok(rank)
    }

    fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg = vec![0usize; self.tasks.len()];
        for d in &self.deps {
            indeg[d.to] += 1;
        }
        let mut stack: Vec<usize> = (0..self.tasks.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(t) = stack.pop() {
            order.push(t);
            for d in self.deps.iter().filter(|d| d.from == t) {
                indeg[d.to] -= 1;
                if indeg[d.to] == 0 {
                    stack.push(d.to);
                }
            }
        }
        (order.len() == self.tasks.len()).then_some(order)
    }

    /// Task indices by decreasing upward rank, ties by task name.
    pub fn priority_order(&self) -> Result<Vec<usize>, ScheduleError> {
        let rank = self.upward_ranks()?;
        let mut order: Vec<usize> = (0..self.tasks.len()).collect();
        order.sort_by(|&a, &b| {
            rank[b]
                .total_cmp(&rank[a])
                .then_with(|| self.tasks[a].task.cmp(&self.tasks[b].task))
        });
        Ok(order)
    }

    /// Runs the list scheduler with a fixed priority list: whenever a task
    /// becomes eligible, the ready task appearing first in `priority` goes
    /// next. Every task index must appear exactly once.
    pub fn simulate(&self, priority: &[usize]) -> Result<Schedule, ScheduleError> {
        let n = self.tasks.len();
        let mut position = vec![usize::MAX; n];
        for (p, &t) in priority.iter().enumerate() {
            position[t] = p;
        }
        let mut incoming: Vec<Vec<&Dependency>> = vec![Vec::new(); n];
        let mut missing = vec![0usize; n];
        for d in &self.deps {
            incoming[d.to].push(d);
            missing[d.to] += 1;
        }
        let mut finish = vec![f64::NAN; n];
        let mut done = vec![false; n];
        let mut pe_free: HashMap<&str, f64> = HashMap::new();
        let mut link_free = vec![0.0f64; self.links.len()];
        let mut schedule = Schedule::default();

        for _ in 0..n {
            let next = (0..n)
                .filter(|&t| !done[t] && missing[t] == 0)
                .min_by_key(|&t| position[t])
                .ok_or(ScheduleError::Cyclic)?;
            let mut ready = 0.0f64;
            for d in &incoming[next] {
                let mut arrival = finish[d.from];
                if let Route::Links(legs) = &d.route {
                    for leg in legs {
                        let start = arrival.max(link_free[leg.link]);
                        let end = start + leg.duration_s;
                        link_free[leg.link] = end;
                        schedule.link_entries.push(LinkEntry {
                            edge: d.edge.clone(),
                            link: self.links[leg.link].clone(),
                            bytes: d.bytes,
                            start_s: start,
                            end_s: end,
                        });
                        arrival = end;
                    }
                }
                ready = ready.max(arrival);
            }
            let task = &self.tasks[next];
            let pe_ready = pe_free.get(task.pe.as_str()).copied().unwrap_or(0.0);
            let start = ready.max(pe_ready);
            let end = start + task.duration_s;
            pe_free.insert(task.pe.as_str(), end);
            finish[next] = end;
            done[next] = true;
            for d in self.deps.iter().filter(|d| d.from == next) {
                missing[d.to] -= 1;
            }
            schedule.entries.push(ScheduleEntry {
                task: task.task.clone(),
                pe: task.pe.clone(),
                start_s: start,
                end_s: end,
            });
            schedule.makespan_s = schedule.makespan_s.max(end);
        }
        if let Some(last) = schedule.link_entries.iter().map(|l| l.end_s).reduce(f64::max) {
            schedule.makespan_s = schedule.makespan_s.max(last);
        }
        Ok(schedule)
    }
}

/// Static schedule of every task of a mapped waveform.
pub fn list_schedule(
    g: &WaveformGraph,
    bsp: &Bsp,
    mapping: &Mapping,
) -> Result<Schedule, ScheduleError> {
    let tg = TaskGraph::build(g, bsp, mapping)?;
    let order = tg.priority_order()?;
    tg.simulate(&order)
}

/// Frames per second when frames are pipelined: the busiest PE or link sets
/// the initiation interval. Infinite for an empty schedule.
pub fn steady_state_throughput(schedule: &Schedule, platform: &Platform) -> f64 {
    let pe_busy = platform
        .pes
        .iter()
        .map(|p| schedule.busy_time_on_pe(&p.id))
        .fold(0.0, f64::max);
    let link_busy = platform
        .links
        .iter()
        .map(|l| schedule.busy_time_on_link(&l.id))
        .fold(0.0, f64::max);
    let bottleneck = pe_busy.max(link_busy);
    if bottleneck > 0.0 {
        1.0 / bottleneck
    } else {
        f64::INFINITY
    }
}
