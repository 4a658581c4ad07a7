//! Shared domain types: waveform graphs, platforms, flavors, mappings and
//! schedules. Everything here is plain immutable data once constructed.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of a nucleus (e.g. `FFT`). Exact, case-sensitive equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NucleusId(String);

impl NucleusId {
    pub fn new(name: impl Into<String>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyIdentifier("nucleus"));
        }
        Ok(NucleusId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NucleusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{0} identifier must not be empty")]
    EmptyIdentifier(&'static str),
    #[error("cost model evaluated at n = 0; sizes start at 1")]
    ZeroSize,
    #[error("Q-format data requires a rounding mode")]
    MissingRounding,
    #[error("floating-point data formats take no rounding mode")]
    UnexpectedRounding,
}

// ---------------------------------------------------------------------------
// Data formats
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatKind {
    Q15,
    Q31,
    CFloat32,
    Float32,
}

impl FormatKind {
    pub const ALL: [FormatKind; 4] = [
        FormatKind::Q15,
        FormatKind::Q31,
        FormatKind::CFloat32,
        FormatKind::Float32,
    ];

    pub fn is_fixed_point(self) -> bool {
        matches!(self, FormatKind::Q15 | FormatKind::Q31)
    }

    pub fn bytes_per_sample(self) -> u64 {
        match self {
            FormatKind::Q15 => 2,
            FormatKind::Q31 => 4,
            FormatKind::CFloat32 => 8,
            FormatKind::Float32 => 4,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            FormatKind::Q15 => "q15",
            FormatKind::Q31 => "q31",
            FormatKind::CFloat32 => "cfloat32",
            FormatKind::Float32 => "float32",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        FormatKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for FormatKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scaling {
    None,
    PerStage,
    Block,
}

impl Scaling {
    pub fn keyword(self) -> &'static str {
        match self {
            Scaling::None => "none",
            Scaling::PerStage => "perstage",
            Scaling::Block => "block",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Truncate,
    RoundNearest,
}

impl Rounding {
    pub fn keyword(self) -> &'static str {
        match self {
            Rounding::Truncate => "trunc",
            Rounding::RoundNearest => "nearest",
        }
    }
}

/// Data representation on a port: sample kind, block structure, scaling and
/// rounding discipline. Two formats are interchangeable only if all fields match.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataFormat {
    kind: FormatKind,
    block_size: u64,
    scaling: Scaling,
    rounding: Option<Rounding>,
}

impl DataFormat {
    pub fn new(
        kind: FormatKind,
        block_size: u64,
        scaling: Scaling,
        rounding: Option<Rounding>,
    ) -> Result<Self, ModelError> {
        match (kind.is_fixed_point(), rounding) {
            (true, None) => return Err(ModelError::MissingRounding),
            (false, Some(_)) => return Err(ModelError::UnexpectedRounding),
            _ => {}
        }
        Ok(DataFormat {
            kind,
            block_size: block_size.max(1),
            scaling,
            rounding,
        })
    }

    pub fn q15(block_size: u64, scaling: Scaling, rounding: Rounding) -> Self {
        DataFormat {
            kind: FormatKind::Q15,
            block_size: block_size.max(1),
            scaling,
            rounding: Some(rounding),
        }
    }

    pub fn q31(block_size: u64, scaling: Scaling, rounding: Rounding) -> Self {
        DataFormat {
            kind: FormatKind::Q31,
            block_size: block_size.max(1),
            scaling,
            rounding: Some(rounding),
        }
    }

    pub fn cfloat32(block_size: u64) -> Self {
        DataFormat {
            kind: FormatKind::CFloat32,
            block_size: block_size.max(1),
            scaling: Scaling::None,
            rounding: None,
        }
    }

    pub fn float32(block_size: u64) -> Self {
        DataFormat {
            kind: FormatKind::Float32,
            block_size: block_size.max(1),
            scaling: Scaling::None,
            rounding: None,
        }
    }

    pub fn kind(&self) -> FormatKind {
        self.kind
    }

    pub fn block_size(&self) -> u64 {
        self.block_size
    }

    pub fn scaling(&self) -> Scaling {
        self.scaling
    }

    pub fn rounding(&self) -> Option<Rounding> {
        self.rounding
    }

    pub fn bytes_per_sample(&self) -> u64 {
        self.kind.bytes_per_sample()
    }
}

impl fmt::Display for DataFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(block={}", self.kind, self.block_size)?;
        if self.kind.is_fixed_point() || self.scaling != Scaling::None {
            write!(f, ", scaling={}", self.scaling.keyword())?;
        }
        if let Some(r) = self.rounding {
            write!(f, ", rounding={}", r.keyword())?;
        }
        f.write_str(")")
    }
}

// ---------------------------------------------------------------------------
// Waveform graph
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelKind {
    Nucleus {
        nucleus: NucleusId,
        /// Named integer parameters; `size` is mandatory.
        params: BTreeMap<String, u64>,
        /// Operation load used when no flavor in the BSP implements the
        /// nucleus; without it such a kernel is unmappable.
        fallback_load: Option<u64>,
    },
    NonNucleus {
        load_ops: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub id: String,
    pub kind: KernelKind,
    /// Executions per frame.
    pub invocations: u64,
}

impl KernelSpec {
    pub fn nucleus(id: impl Into<String>, nucleus: &str, size: u64) -> Self {
        let mut params = BTreeMap::new();
        params.insert("size".to_string(), size);
        KernelSpec {
            id: id.into(),
            kind: KernelKind::Nucleus {
                nucleus: NucleusId(nucleus.to_string()),
                params,
                fallback_load: None,
            },
            invocations: 1,
        }
    }

    pub fn non_nucleus(id: impl Into<String>, load_ops: u64) -> Self {
        KernelSpec {
            id: id.into(),
            kind: KernelKind::NonNucleus { load_ops },
            invocations: 1,
        }
    }

    pub fn with_invocations(mut self, invocations: u64) -> Self {
        self.invocations = invocations;
        self
    }

    pub fn with_fallback(mut self, load: u64) -> Self {
        if let KernelKind::Nucleus { fallback_load, .. } = &mut self.kind {
            *fallback_load = Some(load);
        }
        self
    }

    pub fn nucleus_id(&self) -> Option<&NucleusId> {
        match &self.kind {
            KernelKind::Nucleus { nucleus, .. } => Some(nucleus),
            KernelKind::NonNucleus { .. } => None,
        }
    }

    /// The `size` parameter of a nucleus kernel.
    pub fn size(&self) -> Option<u64> {
        match &self.kind {
            KernelKind::Nucleus { params, .. } => params.get("size").copied(),
            KernelKind::NonNucleus { .. } => None,
        }
    }

    pub fn is_nucleus(&self) -> bool {
        matches!(self.kind, KernelKind::Nucleus { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub src: String,
    pub dst: String,
    /// Samples per frame.
    pub tokens: u64,
    pub format: DataFormat,
}

impl EdgeSpec {
    pub fn new(src: &str, dst: &str, tokens: u64, format: DataFormat) -> Self {
        EdgeSpec {
            src: src.to_string(),
            dst: dst.to_string(),
            tokens,
            format,
        }
    }

    pub fn key(&self) -> EdgeKey {
        EdgeKey {
            src: self.src.clone(),
            dst: self.dst.clone(),
        }
    }
}

/// Identifies an edge by its endpoints; graphs allow at most one edge per
/// ordered kernel pair.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeKey {
    pub src: String,
    pub dst: String,
}

impl fmt::Display for EdgeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.src, self.dst)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintSpec {
    PathLatency { path: Vec<String>, bound_us: f64 },
    Throughput { min_frames_per_s: f64 },
}

impl fmt::Display for ConstraintSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintSpec::PathLatency { path, bound_us } => {
                write!(f, "latency([{}]) <= {} us", path.join(", "), bound_us)
            }
            ConstraintSpec::Throughput { min_frames_per_s } => {
                write!(f, "throughput >= {} fps", min_frames_per_s)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WaveformGraph {
    pub name: String,
    pub kernels: Vec<KernelSpec>,
    pub edges: Vec<EdgeSpec>,
    pub constraints: Vec<ConstraintSpec>,
}

/// What a [`Violation`] is about, so callers can attach source locations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subject {
    Graph,
    Kernel(usize),
    Edge(usize),
    Constraint(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    DuplicateKernel,
    MissingSize,
    ZeroValue,
    DanglingEdge,
    SelfLoop,
    DuplicateEdge,
    Cycle,
    UnknownPathKernel,
    PathNotConnected,
    NonPositiveBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: Subject,
    pub message: String,
}

impl WaveformGraph {
    pub fn new(name: impl Into<String>) -> Self {
        WaveformGraph {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn kernel(&self, id: &str) -> Option<&KernelSpec> {
        self.kernels.iter().find(|k| k.id == id)
    }

    pub fn edge(&self, src: &str, dst: &str) -> Option<&EdgeSpec> {
        self.edges.iter().find(|e| e.src == src && e.dst == dst)
    }

    /// Kernel ids in a topological order; ties resolve by declaration order.
    /// Returns `None` when the graph has a cycle or dangling edges.
    pub fn topological_order(&self) -> Option<Vec<&str>> {
        let index: HashMap<&str, usize> = self
            .kernels
            .iter()
            .enumerate()
            .map(|(i, k)| (k.id.as_str(), i))
            .collect();
        let mut indegree = vec![0usize; self.kernels.len()];
        let mut succ = vec![Vec::new(); self.kernels.len()];
        for e in &self.edges {
            let (s, d) = (*index.get(e.src.as_str())?, *index.get(e.dst.as_str())?);
            succ[s].push(d);
            indegree[d] += 1;
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..self.kernels.len()).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(self.kernels.len());
        while let Some(i) = ready.pop_first() {
            order.push(self.kernels[i].id.as_str());
            for &d in &succ[i] {
                indegree[d] -= 1;
                if indegree[d] == 0 {
                    ready.insert(d);
                }
            }
        }
        (order.len() == self.kernels.len()).then_some(order)
    }

    /// Reports every structural problem with the graph. An empty list means
    /// the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (i, k) in self.kernels.iter().enumerate() {
            if !seen.insert(k.id.as_str()) {
                out.push(Violation {
                    kind: ViolationKind::DuplicateKernel,
                    subject: Subject::Kernel(i),
                    message: format!("duplicate kernel id `{}`", k.id),
                });
            }
            if k.invocations == 0 {
                out.push(Violation {
                    kind: ViolationKind::ZeroValue,
                    subject: Subject::Kernel(i),
                    message: format!("kernel `{}` must have invocations >= 1", k.id),
                });
            }
            match &k.kind {
                KernelKind::Nucleus {
                    params,
                    fallback_load,
                    ..
                } => match params.get("size") {
                    None => out.push(Violation {
                        kind: ViolationKind::MissingSize,
                        subject: Subject::Kernel(i),
                        message: format!("nucleus kernel `{}` lacks a `size` parameter", k.id),
                    }),
                    Some(0) => out.push(Violation {
                        kind: ViolationKind::ZeroValue,
                        subject: Subject::Kernel(i),
                        message: format!("nucleus kernel `{}` must have size >= 1", k.id),
                    }),
                    Some(_) if *fallback_load == Some(0) => out.push(Violation {
                        kind: ViolationKind::ZeroValue,
                        subject: Subject::Kernel(i),
                        message: format!("kernel `{}` must have fallback_load >= 1", k.id),
                    }),
                    Some(_) => {}
                },
                KernelKind::NonNucleus { load_ops } => {
                    if *load_ops == 0 {
                        out.push(Violation {
                            kind: ViolationKind::ZeroValue,
                            subject: Subject::Kernel(i),
                            message: format!("kernel `{}` must have load >= 1", k.id),
                        });
                    }
                }
            }
        }

        let mut edge_keys = HashSet::new();
        let mut structurally_sound = true;
        for (i, e) in self.edges.iter().enumerate() {
            for end in [&e.src, &e.dst] {
                if !seen.contains(end.as_str()) {
                    structurally_sound = false;
                    out.push(Violation {
                        kind: ViolationKind::DanglingEdge,
                        subject: Subject::Edge(i),
                        message: format!("edge {}->{} references unknown kernel `{}`", e.src, e.dst, end),
                    });
                }
            }
            if e.src == e.dst {
                structurally_sound = false;
                out.push(Violation {
                    kind: ViolationKind::SelfLoop,
                    subject: Subject::Edge(i),
                    message: format!("edge {}->{} connects a kernel to itself", e.src, e.dst),
                });
            }
            if !edge_keys.insert((e.src.as_str(), e.dst.as_str())) {
                out.push(Violation {
                    kind: ViolationKind::DuplicateEdge,
                    subject: Subject::Edge(i),
                    message: format!("duplicate edge {}->{}", e.src, e.dst),
                });
            }
            if e.tokens == 0 {
                out.push(Violation {
                    kind: ViolationKind::ZeroValue,
                    subject: Subject::Edge(i),
                    message: format!("edge {}->{} must carry tokens >= 1", e.src, e.dst),
                });
            }
        }

        if structurally_sound && self.topological_order().is_none() {
            out.push(Violation {
                kind: ViolationKind::Cycle,
                subject: self.first_cycle_edge().map_or(Subject::Graph, Subject::Edge),
                message: "cycle detected; waveform graphs must be acyclic".to_string(),
            });
        }

        for (i, c) in self.constraints.iter().enumerate() {
            match c {
                ConstraintSpec::PathLatency { path, bound_us } => {
                    if *bound_us <= 0.0 || !bound_us.is_finite() {
                        out.push(Violation {
                            kind: ViolationKind::NonPositiveBound,
                            subject: Subject::Constraint(i),
                            message: "latency bound must be a positive finite duration".to_string(),
                        });
                    }
                    if path.is_empty() {
                        out.push(Violation {
                            kind: ViolationKind::PathNotConnected,
                            subject: Subject::Constraint(i),
                            message: "latency path is empty".to_string(),
                        });
                        continue;
                    }
                    let unknown: Vec<_> =
                        path.iter().filter(|p| !seen.contains(p.as_str())).collect();
                    for p in &unknown {
                        out.push(Violation {
                            kind: ViolationKind::UnknownPathKernel,
                            subject: Subject::Constraint(i),
                            message: format!("latency path references unknown kernel `{}`", p),
                        });
                    }
                    if unknown.is_empty() {
                        for w in path.windows(2) {
                            if !edge_keys.contains(&(w[0].as_str(), w[1].as_str())) {
                                out.push(Violation {
                                    kind: ViolationKind::PathNotConnected,
                                    subject: Subject::Constraint(i),
                                    message: format!(
                                        "path not connected: no edge {}->{}",
                                        w[0], w[1]
                                    ),
                                });
                            }
                        }
                    }
                }
                ConstraintSpec::Throughput { min_frames_per_s } => {
                    if *min_frames_per_s <= 0.0 || !min_frames_per_s.is_finite() {
                        out.push(Violation {
                            kind: ViolationKind::NonPositiveBound,
                            subject: Subject::Constraint(i),
                            message: "throughput bound must be a positive finite rate".to_string(),
                        });
                    }
                }
            }
        }
        out
    }

    /// Index of some edge that lies on a cycle.
    fn first_cycle_edge(&self) -> Option<usize> {
        // Kernels that survive repeated removal of sources and sinks all lie
        // on or between cycles. The last edge joining two of them in
        // declaration order is the one that closes a cycle.
        let mut alive: HashSet<&str> = self.kernels.iter().map(|k| k.id.as_str()).collect();
        loop {
            let before = alive.len();
            let live_edges: Vec<_> = self
                .edges
                .iter()
                .filter(|e| alive.contains(e.src.as_str()) && alive.contains(e.dst.as_str()))
                .collect();
            alive.retain(|k| {
                live_edges.iter().any(|e| e.dst == *k) && live_edges.iter().any(|e| e.src == *k)
            });
            if alive.len() == before {
                break;
            }
        }
        self.edges
            .iter()
            .rposition(|e| alive.contains(e.src.as_str()) && alive.contains(e.dst.as_str()))
    }
}

/// Convenience wrapper matching the free-function form used by the tools.
pub fn validate_graph(g: &WaveformGraph) -> Vec<Violation> {
    g.validate()
}

// ---------------------------------------------------------------------------
// Platform
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeClass {
    Dsp,
    Asip,
    Gpp,
    Hwacc,
}

impl PeClass {
    pub fn keyword(self) -> &'static str {
        match self {
            PeClass::Dsp => "dsp",
            PeClass::Asip => "asip",
            PeClass::Gpp => "gpp",
            PeClass::Hwacc => "hwacc",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        [PeClass::Dsp, PeClass::Asip, PeClass::Gpp, PeClass::Hwacc]
            .into_iter()
            .find(|c| c.keyword() == s)
    }

    /// Hardware accelerators only run flavors, never generic code.
    pub fn runs_generic_code(self) -> bool {
        self != PeClass::Hwacc
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessingElement {
    pub id: String,
    pub class: PeClass,
    pub clock_mhz: f64,
    /// Operations per cycle for non-nucleus code.
    pub gpp_efficiency: f64,
}

impl ProcessingElement {
    pub fn new(id: &str, class: PeClass, clock_mhz: f64) -> Self {
        ProcessingElement {
            id: id.to_string(),
            class,
            clock_mhz,
            gpp_efficiency: 1.0,
        }
    }

    pub fn clock_hz(&self) -> f64 {
        self.clock_mhz * 1e6
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterconnectLink {
    pub id: String,
    pub endpoints: (String, String),
    pub bandwidth_mbps: f64,
    pub latency_us: f64,
    pub energy_per_byte_j: f64,
}

impl InterconnectLink {
    pub fn new(id: &str, a: &str, b: &str, bandwidth_mbps: f64, latency_us: f64) -> Self {
        InterconnectLink {
            id: id.to_string(),
            endpoints: (a.to_string(), b.to_string()),
            bandwidth_mbps,
            latency_us,
            energy_per_byte_j: 0.0,
        }
    }

    pub fn bandwidth_bytes_per_s(&self) -> f64 {
        self.bandwidth_mbps * 1e6
    }

    pub fn latency_s(&self) -> f64 {
        self.latency_us * 1e-6
    }

    pub fn connects(&self, a: &str, b: &str) -> bool {
        let (x, y) = (&self.endpoints.0, &self.endpoints.1);
        (x == a && y == b) || (x == b && y == a)
    }

    pub fn other_end(&self, pe: &str) -> Option<&str> {
        if self.endpoints.0 == pe {
            Some(&self.endpoints.1)
        } else if self.endpoints.1 == pe {
            Some(&self.endpoints.0)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Platform {
    pub pes: Vec<ProcessingElement>,
    pub links: Vec<InterconnectLink>,
}

impl Platform {
    pub fn pe(&self, id: &str) -> Option<&ProcessingElement> {
        self.pes.iter().find(|p| p.id == id)
    }

    pub fn link_between(&self, a: &str, b: &str) -> Option<&InterconnectLink> {
        self.links.iter().find(|l| l.connects(a, b))
    }
}

// ---------------------------------------------------------------------------
// Flavors
// ---------------------------------------------------------------------------

/// `cycles(n) = a + b·n + c·n·log2(n)`, `energy(n) = e0 + e1·n` joules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub e0: f64,
    pub e1: f64,
}

impl CostModel {
    pub fn cycles(a: f64, b: f64, c: f64) -> Self {
        CostModel {
            a,
            b,
            c,
            e0: 0.0,
            e1: 0.0,
        }
    }

    pub fn with_energy(mut self, e0: f64, e1: f64) -> Self {
        self.e0 = e0;
        self.e1 = e1;
        self
    }

    pub fn energy_j(&self, n: u64) -> f64 {
        self.e0 + self.e1 * n as f64
    }
}

/// Cycle count of one invocation at size `n`, floored at one cycle.
pub fn cycles_of(cost: &CostModel, n: u64) -> Result<f64, ModelError> {
    if n == 0 {
        return Err(ModelError::ZeroSize);
    }
    let n = n as f64;
    let raw = cost.a + cost.b * n + cost.c * n * n.log2();
    Ok(raw.max(1.0))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SizeSet {
    /// Every power of two in `[min, max]`.
    Pow2Range { min: u64, max: u64 },
    List { sizes: Vec<u64> },
}

impl SizeSet {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            SizeSet::Pow2Range { min, max } => n.is_power_of_two() && *min <= n && n <= *max,
            SizeSet::List { sizes } => sizes.contains(&n),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SizeSet::Pow2Range { min, max } => {
                let lo = min.max(&1).next_power_of_two();
                lo > *max
            }
            SizeSet::List { sizes } => sizes.is_empty(),
        }
    }

    pub fn max(&self) -> Option<u64> {
        match self {
            SizeSet::Pow2Range { max, .. } if !self.is_empty() => {
                Some(1u64 << (63 - max.leading_zeros()))
            }
            SizeSet::Pow2Range { .. } => None,
            SizeSet::List { sizes } => sizes.iter().copied().max(),
        }
    }
}

/// An optimized implementation of one nucleus bound to one processing element.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flavor {
    pub id: String,
    pub nucleus: NucleusId,
    pub pe: String,
    pub algorithm: String,
    pub vendor: String,
    pub supported_sizes: SizeSet,
    pub input_format: DataFormat,
    pub output_format: DataFormat,
    pub cost: CostModel,
}

/// Conversion costs between format kinds, in cycles per sample.
///
/// Every ordered pair of kinds has a default of [`DEFAULT_GLUE_CYCLES`]
/// except complex-to-real, which would silently drop the imaginary part.
/// BSP files can override individual pairs or forbid them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GlueTable {
    pub overrides: BTreeMap<(FormatKind, FormatKind), Option<u64>>,
}

pub const DEFAULT_GLUE_CYCLES: u64 = 2;

impl GlueTable {
    pub fn default_rule(from: FormatKind, to: FormatKind) -> Option<u64> {
        if from == FormatKind::CFloat32 && to == FormatKind::Float32 {
            None
        } else {
            Some(DEFAULT_GLUE_CYCLES)
        }
    }

    /// Cycles per sample for converting `from` into `to`; `None` when no
    /// conversion exists.
    pub fn cycles_per_sample(&self, from: FormatKind, to: FormatKind) -> Option<u64> {
        match self.overrides.get(&(from, to)) {
            Some(rule) => *rule,
            None => Self::default_rule(from, to),
        }
    }
}

/// A board-support package: the hardware platform plus its flavors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Bsp {
    pub name: String,
    pub platform: Platform,
    pub flavors: Vec<Flavor>,
    pub glue: GlueTable,
}

impl Bsp {
    pub fn flavor(&self, id: &str) -> Option<&Flavor> {
        self.flavors.iter().find(|f| f.id == id)
    }

    pub fn pe(&self, id: &str) -> Option<&ProcessingElement> {
        self.platform.pe(id)
    }
}

// ---------------------------------------------------------------------------
// Mappings and schedules
// ---------------------------------------------------------------------------

/// Where a kernel runs: a flavor (nucleus kernels) or directly on a PE.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Target {
    Flavor(String),
    Pe(String),
}

impl Target {
    pub fn id(&self) -> &str {
        match self {
            Target::Flavor(id) | Target::Pe(id) => id,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Flavor(id) => write!(f, "flavor {}", id),
            Target::Pe(id) => write!(f, "pe {}", id),
        }
    }
}

/// Kernel id to target.
pub type Binding = BTreeMap<String, Target>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueTask {
    pub edge: EdgeKey,
    pub from_format: DataFormat,
    pub to_format: DataFormat,
    pub placed_on: String,
    pub cycles: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Mapping {
    pub binding: Binding,
    pub glue: Vec<GlueTask>,
}

impl Mapping {
    pub fn glue_for(&self, edge: &EdgeKey) -> Option<&GlueTask> {
        self.glue.iter().find(|g| &g.edge == edge)
    }

    /// PE hosting a kernel under this mapping.
    pub fn pe_of<'a>(&'a self, bsp: &'a Bsp, kernel: &str) -> Option<&'a str> {
        match self.binding.get(kernel)? {
            Target::Pe(pe) => Some(pe),
            Target::Flavor(f) => bsp.flavor(f).map(|f| f.pe.as_str()),
        }
    }
}

/// Formats on both ends of an edge under a binding: what the producer emits
/// and what the consumer expects. Kernels running directly on a PE adopt the
/// edge's declared format; flavors impose their own.
pub fn port_formats(bsp: &Bsp, binding: &Binding, edge: &EdgeSpec) -> (DataFormat, DataFormat) {
    let flavor_of = |k: &str| match binding.get(k) {
        Some(Target::Flavor(f)) => bsp.flavor(f),
        _ => None,
    };
    let produced = flavor_of(&edge.src).map_or(edge.format, |f| f.output_format);
    let consumed = flavor_of(&edge.dst).map_or(edge.format, |f| f.input_format);
    (produced, consumed)
}

/// A schedulable unit: a kernel or an inserted format conversion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskRef {
    Kernel { id: String },
    Glue { edge: EdgeKey },
}

impl TaskRef {
    pub fn kernel(id: &str) -> Self {
        TaskRef::Kernel { id: id.to_string() }
    }
}

impl fmt::Display for TaskRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskRef::Kernel { id } => f.write_str(id),
            TaskRef::Glue { edge } => write!(f, "glue({})", edge),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub task: TaskRef,
    pub pe: String,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkEntry {
    pub edge: EdgeKey,
    pub link: String,
    pub bytes: u64,
    pub start_s: f64,
    pub end_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub entries: Vec<ScheduleEntry>,
    pub link_entries: Vec<LinkEntry>,
    pub makespan_s: f64,
}

impl Schedule {
    pub fn entry(&self, task: &TaskRef) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| &e.task == task)
    }

    pub fn kernel_entry(&self, id: &str) -> Option<&ScheduleEntry> {
        self.entries
            .iter()
            .find(|e| matches!(&e.task, TaskRef::Kernel { id: k } if k == id))
    }

    // Folding from +0.0: an empty float `sum` yields -0.0, which leaks into reports.
    pub fn busy_time_on_pe(&self, pe: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.pe == pe)
            .map(|e| e.end_s - e.start_s)
            .fold(0.0, |a, b| a + b)
    }

    pub fn busy_time_on_link(&self, link: &str) -> f64 {
        self.link_entries
            .iter()
            .filter(|e| e.link == link)
            .map(|e| e.end_s - e.start_s)
            .fold(0.0, |a, b| a + b)
    }
}
