//! Instance generators and reference computations shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use nucleus_core::model::{GlueTable, InterconnectLink, Platform};
use nucleus_core::{
    Binding, Bsp, ConstraintSpec, CostModel, DataFormat, EdgeSpec, Flavor, FormatKind, KernelKind,
    KernelSpec, Mapping, NucleusId, PeClass, ProcessingElement, Rounding, Scaling, Schedule,
    SizeSet, Target, TaskRef, WaveformGraph,
};
use proptest::prelude::*;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Direct evaluation of `Σ x[n]·exp(∓2πi·nk/N)`.
pub fn naive_dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let table: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, sign * 2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut out: Vec<Complex64> = (0..n).map(|k| table_sum(x, &table, k)).collect();
    if inverse {
        for v in &mut out {
            *v /= n as f64;
        }
    }
    out
}

/// `Σ x[j]·table[j·k mod len]`, stepping the index instead of multiplying.
fn table_sum<T, W>(x: &[T], table: &[W], k: usize) -> T
where
    T: Copy + std::ops::Mul<W, Output = T> + std::ops::Add<Output = T> + Default,
    W: Copy,
{
    let len = table.len();
    let step = k % len;
    let mut idx = 0;
    let mut acc = T::default();
    for &v in x {
        acc = acc + v * table[idx];
        idx += step;
        if idx >= len {
            idx -= len;
        }
    }
    acc
}

/// `Σ x[i]·cos(π(2i+1)k / 2N)`.
pub fn naive_dct2(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    // cos(π·m / 2N) for m in 0..4N covers every (2i+1)k mod 4N.
    let table: Vec<f64> = (0..4 * n)
        .map(|m| (PI * m as f64 / (2 * n) as f64).cos())
        .collect();
    (0..n)
        .map(|k| {
            let step = (2 * k) % (4 * n);
            let mut idx = k % (4 * n);
            let mut acc = 0.0;
            for &v in x {
                acc += v * table[idx];
                idx += step;
                if idx >= 4 * n {
                    idx -= 4 * n;
                }
            }
            acc
        })
        .collect()
}

/// `Σ x[i]·cas(2π·ik/N)` with cas = cos + sin.
pub fn naive_dht(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let cas: Vec<f64> = (0..n)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / n as f64;
            t.cos() + t.sin()
        })
        .collect();
    (0..n).map(|k| table_sum(x, &cas, k)).collect()
}

pub fn random_complex(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_real(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn max_abs_err_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs_err(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn kid(i: usize) -> String {
    format!("k{i:02}")
}

/// Fully connected platform of generic PEs with distinct clocks.
pub fn mesh_platform(rng: &mut impl Rng, pes: usize) -> Bsp {
    let mut bsp = Bsp {
        name: "mesh".into(),
        ..Default::default()
    };
    for p in 0..pes {
        let class = [PeClass::Dsp, PeClass::Gpp, PeClass::Asip][p % 3];
        let mut pe = ProcessingElement::new(&format!("pe{p}"), class, rng.gen_range(100..1000) as f64);
        pe.gpp_efficiency = rng.gen_range(1..4) as f64 * 0.5;
        bsp.platform.pes.push(pe);
    }
    for a in 0..pes {
        for b in a + 1..pes {
            let mut l = InterconnectLink::new(
                &format!("l{a}{b}"),
                &format!("pe{a}"),
                &format!("pe{b}"),
                rng.gen_range(10..1000) as f64,
                rng.gen_range(0..5) as f64 * 0.1,
            );
            l.energy_per_byte_j = rng.gen_range(0..3) as f64 * 1e-11;
            bsp.platform.links.push(l);
        }
    }
    bsp
}

/// Random DAG of non-nucleus kernels; edges only go from lower to higher
/// index so the graph is acyclic by construction.
pub fn random_dag(rng: &mut impl Rng, n: usize, edge_p: f64) -> WaveformGraph {
    let mut g = WaveformGraph::new("dag");
    for i in 0..n {
        g.kernels.push(
            KernelSpec::non_nucleus(kid(i), rng.gen_range(100..10_000))
                .with_invocations(rng.gen_range(1..3)),
        );
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(edge_p) {
                let format = if rng.gen_bool(0.5) {
                    DataFormat::cfloat32(64)
                } else {
                    DataFormat::float32(64)
                };
                g.edges.push(EdgeSpec::new(&kid(i), &kid(j), rng.gen_range(1..512), format));
            }
        }
    }
    g
}

/// Binds every kernel directly to a random PE.
pub fn random_pe_mapping(rng: &mut impl Rng, g: &WaveformGraph, bsp: &Bsp) -> Mapping {
    let binding: Binding = g
        .kernels
        .iter()
        .map(|k| {
            let p = rng.gen_range(0..bsp.platform.pes.len());
            (k.id.clone(), Target::Pe(bsp.platform.pes[p].id.clone()))
        })
        .collect();
    Mapping {
        binding,
        glue: Vec::new(),
    }
}

pub fn fft_flavor(id: &str, pe: &str, input: DataFormat, output: DataFormat, c: f64) -> Flavor {
    Flavor {
        id: id.into(),
        nucleus: NucleusId::new("FFT").unwrap(),
        pe: pe.into(),
        algorithm: "radix2".into(),
        vendor: String::new(),
        supported_sizes: SizeSet::Pow2Range { min: 8, max: 4096 },
        input_format: input,
        output_format: output,
        cost: CostModel::cycles(50.0, 0.0, c).with_energy(1e-7, 1e-10),
    }
}

/// One instance of the mapping corpus.
pub struct MapCase {
    pub name: String,
    pub g: WaveformGraph,
    pub bsp: Bsp,
}

/// Every combination of up to four kernels (each nucleus or not), one or
/// two PEs, one to three FFT flavors and zero or one format-mismatched
/// flavor. Nucleus kernels have at most three candidates, others at most two.
pub fn mapping_corpus() -> Vec<MapCase> {
    use nucleus_core::{ConstraintSpec, Rounding, Scaling};
    let stream = DataFormat::cfloat32(256);
    let mut out = Vec::new();
    for n in 1..=4usize {
        for mask in 0..(1u32 << n) {
            for pes in 1..=2usize {
                for mismatch in 0..=1usize {
                    for flavors in 1..=3usize {
                        let mut bsp = Bsp {
                            name: "corpus".into(),
                            ..Default::default()
                        };
                        bsp.platform.pes.push(ProcessingElement::new("p0", PeClass::Dsp, 400.0));
                        if pes == 2 {
                            let mut gpp = ProcessingElement::new("p1", PeClass::Gpp, 1000.0);
                            gpp.gpp_efficiency = 1.5;
                            bsp.platform.pes.push(gpp);
                            let mut l = InterconnectLink::new("l01", "p0", "p1", 200.0, 0.5);
                            l.energy_per_byte_j = 1e-11;
                            bsp.platform.links.push(l);
                        }
                        for j in 0..flavors {
                            let fmt = if mismatch == 1 && j == 0 {
                                DataFormat::q15(256, Scaling::PerStage, Rounding::RoundNearest)
                            } else {
                                stream
                            };
                            let pe = format!("p{}", j % pes);
                            bsp.flavors
                                .push(fft_flavor(&format!("f{j}"), &pe, fmt, fmt, 3.0 + j as f64));
                        }
                        let mut g = WaveformGraph::new(format!(
                            "n{n}_m{mask:04b}_pe{pes}_x{mismatch}_f{flavors}"
                        ));
                        for i in 0..n {
                            g.kernels.push(if mask >> i & 1 == 1 {
                                KernelSpec::nucleus(kid(i), "FFT", 256)
                            } else {
                                KernelSpec::non_nucleus(kid(i), 2000 + 300 * i as u64)
                            });
                        }
                        for i in 1..n {
                            g.edges.push(EdgeSpec::new(&kid(i - 1), &kid(i), 256, stream));
                        }
                        if n >= 3 {
                            g.edges.push(EdgeSpec::new(&kid(0), &kid(2), 64, stream));
                        }
                        if n >= 2 {
                            g.constraints.push(ConstraintSpec::PathLatency {
                                path: (0..n).map(kid).collect(),
                                bound_us: 1e6,
                            });
                        }
                        out.push(MapCase {
                            name: g.name.clone(),
                            g,
                            bsp,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Legal targets per kernel, derived straight from the BSP.
pub fn oracle_targets(g: &WaveformGraph, bsp: &Bsp) -> Vec<(String, Vec<Target>)> {
    use nucleus_core::KernelKind;
    g.kernels
        .iter()
        .map(|k| {
            let generic: Vec<Target> = bsp
                .platform
                .pes
                .iter()
                .filter(|p| p.class != PeClass::Hwacc)
                .map(|p| Target::Pe(p.id.clone()))
                .collect();
            let targets = match &k.kind {
                KernelKind::NonNucleus { .. } => generic,
                KernelKind::Nucleus {
                    nucleus,
                    params,
                    fallback_load,
                } => {
                    let size = params["size"];
                    let fl: Vec<Target> = bsp
                        .flavors
                        .iter()
                        .filter(|f| &f.nucleus == nucleus && f.supported_sizes.contains(size))
                        .map(|f| Target::Flavor(f.id.clone()))
                        .collect();
                    if fl.is_empty() && fallback_load.is_some() {
                        generic
                    } else {
                        fl
                    }
                }
            };
            (k.id.clone(), targets)
        })
        .collect()
}

/// Every total binding, by plain nested enumeration.
pub fn all_bindings(targets: &[(String, Vec<Target>)]) -> Vec<Binding> {
    let mut out = vec![Binding::new()];
    for (k, ts) in targets {
        out = out
            .into_iter()
            .flat_map(|b| {
                ts.iter().map(move |t| {
                    let mut b = b.clone();
                    b.insert(k.clone(), t.clone());
                    b
                })
            })
            .collect();
    }
    out
}

/// Best (feasible, score) over all bindings that evaluate without error.
pub fn oracle_optimum(
    g: &WaveformGraph,
    bsp: &Bsp,
    evaluator: &nucleus_core::Evaluator,
) -> Option<(bool, f64)> {
    all_bindings(&oracle_targets(g, bsp))
        .into_iter()
        .filter_map(|b| nucleus_core::mapper::evaluate_binding(g, bsp, b, evaluator).ok())
        .map(|ev| (ev.report.feasible, ev.report.score))
        .min_by(|a, b| b.0.cmp(&a.0).then(a.1.total_cmp(&b.1)))
}

/// Bytes crossing PE boundaries, recounted edge by edge: tokens times the
/// size of what the producer emits.
pub fn recount_comm_bytes(g: &WaveformGraph, bsp: &Bsp, binding: &Binding) -> u64 {
    let pe_of = |k: &str| match &binding[k] {
        Target::Pe(p) => p.clone(),
        Target::Flavor(f) => bsp.flavors.iter().find(|x| &x.id == f).unwrap().pe.clone(),
    };
    let mut total = 0;
    for e in &g.edges {
        if pe_of(&e.src) == pe_of(&e.dst) {
            continue;
        }
        let sample = match &binding[&e.src] {
            Target::Flavor(f) => {
                let f = bsp.flavors.iter().find(|x| &x.id == f).unwrap();
                f.output_format.bytes_per_sample()
            }
            Target::Pe(_) => e.format.bytes_per_sample(),
        };
        total += e.tokens * sample;
    }
    total
}

// -- scheduling reference -----------------------------------------------------

pub const EPS: f64 = 1e-12;

/// Task durations and per-edge transfer times recomputed from the inputs.
pub struct Instance {
    pub durations: Vec<f64>,
    pub pe: Vec<String>,
    /// (src, dst, link id or None when local, transfer time)
    pub edges: Vec<(usize, usize, Option<String>, f64)>,
}

pub fn instance(g: &WaveformGraph, bsp: &Bsp, m: &Mapping) -> Instance {
    let index: HashMap<&str, usize> = g
        .kernels
        .iter()
        .enumerate()
        .map(|(i, k)| (k.id.as_str(), i))
        .collect();
    let mut durations = Vec::new();
    let mut pe = Vec::new();
    for k in &g.kernels {
        let p = bsp.pe(m.pe_of(bsp, &k.id).unwrap()).unwrap();
        let load = match k.kind {
            nucleus_core::KernelKind::NonNucleus { load_ops } => load_ops,
            _ => unreachable!("generator only makes non-nucleus kernels"),
        };
        durations.push(k.invocations as f64 * load as f64 / (p.gpp_efficiency * p.clock_mhz * 1e6));
        pe.push(p.id.clone());
    }
    let edges = g
        .edges
        .iter()
        .map(|e| {
            let (s, d) = (index[e.src.as_str()], index[e.dst.as_str()]);
            if pe[s] == pe[d] {
                (s, d, None, 0.0)
            } else {
                let l = bsp.platform.link_between(&pe[s], &pe[d]).unwrap();
                let bytes = e.tokens * e.format.bytes_per_sample();
                let t = l.latency_us * 1e-6 + bytes as f64 / (l.bandwidth_mbps * 1e6);
                (s, d, Some(l.id.clone()), t)
            }
        })
        .collect();
    Instance {
        durations,
        pe,
        edges,
    }
}

/// Independent list-scheduling simulator over a direct-link platform:
/// the highest-priority ready task runs next, its inbound transfers are
/// booked on their links first come first served.
pub fn simulate(inst: &Instance, priority: &[usize]) -> f64 {
    let n = inst.durations.len();
    let mut finish: Vec<Option<f64>> = vec![None; n];
    let mut pe_free: HashMap<&str, f64> = HashMap::new();
    let mut link_free: HashMap<&str, f64> = HashMap::new();
    let mut makespan = 0.0f64;
    for _ in 0..n {
        let t = *priority
            .iter()
            .find(|&&t| {
                finish[t].is_none()
                    && inst
                        .edges
                        .iter()
                        .filter(|e| e.1 == t)
                        .all(|e| finish[e.0].is_some())
            })
            .unwrap();
        let mut ready = 0.0f64;
        for (s, _, link, dur) in inst.edges.iter().filter(|e| e.1 == t) {
            let produced = finish[*s].unwrap();
            let arrive = match link {
                None => produced,
                Some(l) => {
                    let free = link_free.entry(l.as_str()).or_insert(0.0);
                    let end = produced.max(*free) + dur;
                    *free = end;
                    makespan = makespan.max(end);
                    end
                }
            };
            ready = ready.max(arrive);
        }
        let free = pe_free.entry(inst.pe[t].as_str()).or_insert(0.0);
        let end = ready.max(*free) + inst.durations[t];
        *free = end;
        finish[t] = Some(end);
        makespan = makespan.max(end);
    }
    makespan
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn kernel_index(s: &Schedule, id: &str) -> usize {
    s.entries
        .iter()
        .position(|e| e.task == TaskRef::kernel(id))
        .unwrap()
}

/// Precedence, resource exclusivity and the serial upper bound.
pub fn check_schedule(g: &WaveformGraph, inst: &Instance, s: &Schedule) -> Result<(), String> {
    if s.entries.len() != g.kernels.len() {
        return Err(format!("{} entries for {} kernels", s.entries.len(), g.kernels.len()));
    }
    for (s_idx, d_idx, _, dur) in &inst.edges {
        let p = &s.entries[kernel_index(s, &g.kernels[*s_idx].id)];
        let c = &s.entries[kernel_index(s, &g.kernels[*d_idx].id)];
        if c.start_s + EPS < p.end_s + dur {
            return Err(format!("precedence {} -> {}", p.task, c.task));
        }
    }
    let mut by_pe: HashMap<&str, Vec<(f64, f64)>> = HashMap::new();
    for e in &s.entries {
        by_pe.entry(e.pe.as_str()).or_default().push((e.start_s, e.end_s));
    }
    let mut by_link: HashMap<&str, Vec<(f64, f64)>> = HashMap::new();
    for l in &s.link_entries {
        by_link.entry(l.link.as_str()).or_default().push((l.start_s, l.end_s));
    }
    for intervals in by_pe.values_mut().chain(by_link.values_mut()) {
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in intervals.windows(2) {
            if w[1].0 + EPS < w[0].1 {
                return Err(format!("overlap {:?}", w));
            }
        }
    }
    let total: f64 =
        inst.durations.iter().sum::<f64>() + inst.edges.iter().map(|e| e.3).sum::<f64>();
    if s.makespan_s > total + EPS {
        return Err(format!("makespan {} above serial bound {total}", s.makespan_s));
    }
    Ok(())
}

// -- random models -------------------------------------------------------------

pub fn format_strategy() -> impl Strategy<Value = DataFormat> {
    let scaling = prop_oneof![Just(Scaling::None), Just(Scaling::PerStage), Just(Scaling::Block)];
    let rounding = prop_oneof![Just(Rounding::Truncate), Just(Rounding::RoundNearest)];
    (0usize..4, 1u64..5000, scaling, rounding).prop_map(|(k, block, s, r)| {
        let kind = FormatKind::ALL[k];
        let rounding = kind.is_fixed_point().then_some(r);
        DataFormat::new(kind, block, s, rounding).unwrap()
    })
}

pub fn positive() -> impl Strategy<Value = f64> {
    prop_oneof![1e-6f64..1e6, (1u32..10_000).prop_map(f64::from)]
}

pub fn nonnegative() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0f64..1e4, 1e-12f64..1e-6]
}

pub fn kernel_strategy(i: usize) -> impl Strategy<Value = KernelSpec> {
    let nucleus = (
        "[A-Z][A-Z0-9_]{0,6}",
        1u64..1 << 20,
        prop::collection::btree_map("[a-z][a-z_]{0,5}", 0u64..u64::MAX, 0..3),
        prop::option::of(1u64..1_000_000),
    )
        .prop_map(|(name, size, mut params, fallback_load)| {
            params.retain(|k, _| k != "invocations" && k != "fallback_load");
            params.insert("size".into(), size);
            KernelKind::Nucleus {
                nucleus: NucleusId::new(name).unwrap(),
                params,
                fallback_load,
            }
        });
    let generic = (1u64..u64::MAX).prop_map(|load_ops| KernelKind::NonNucleus { load_ops });
    (prop_oneof![nucleus, generic], 1u64..100).prop_map(move |(kind, invocations)| KernelSpec {
        id: format!("k{i}"),
        kind,
        invocations,
    })
}

prop_compose! {
    pub fn waveform_strategy()(n in 0usize..7)(
        name in "[ -~&&[^\"\\\\]]{0,12}",
        kernels in (0..n).map(kernel_strategy).collect::<Vec<_>>(),
        extra in prop::collection::vec((0usize..7, 0usize..7), 0..6),
        formats in prop::collection::vec(format_strategy(), 12),
        tokens in prop::collection::vec(1u64..100_000, 12),
        latency in prop::option::of((0usize..7, 0usize..7, positive())),
        throughput in prop::option::of(positive()),
    ) -> WaveformGraph {
        let mut g = WaveformGraph::new(name);
        g.kernels = kernels;
        let n = g.kernels.len();
        let mut pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        for (a, b) in extra {
            let (a, b) = (a.min(b), a.max(b));
            if b < n && a != b && b != a + 1 && !pairs.contains(&(a, b)) {
                pairs.push((a, b));
            }
        }
        for (i, (a, b)) in pairs.into_iter().enumerate() {
            g.edges.push(EdgeSpec::new(&format!("k{a}"), &format!("k{b}"), tokens[i % 12], formats[i % 12]));
        }
        if let (Some((a, b, bound)), true) = (latency, n > 0) {
            let (a, b) = (a.min(b) % n, a.max(b) % n);
            let (a, b) = (a.min(b), a.max(b));
            g.constraints.push(ConstraintSpec::PathLatency {
                path: (a..=b).map(|i| format!("k{i}")).collect(),
                bound_us: bound,
            });
        }
        if let Some(t) = throughput {
            g.constraints.push(ConstraintSpec::Throughput { min_frames_per_s: t });
        }
        g
    }
}

pub fn sizes_strategy() -> impl Strategy<Value = SizeSet> {
    prop_oneof![
        (0u32..12, 0u32..12).prop_map(|(a, b)| SizeSet::Pow2Range {
            min: 1 << a.min(b),
            max: 1 << a.max(b)
        }),
        prop::collection::vec(1u64..1_000_000, 1..5).prop_map(|sizes| SizeSet::List { sizes }),
    ]
}

pub fn pe_class() -> impl Strategy<Value = PeClass> {
    prop_oneof![Just(PeClass::Dsp), Just(PeClass::Asip), Just(PeClass::Gpp), Just(PeClass::Hwacc)]
}

prop_compose! {
    pub fn bsp_strategy()(n in 1usize..5)(
        name in "[a-z ]{0,10}",
        pes in prop::collection::vec((pe_class(), positive(), positive()), n),
        links in prop::collection::vec((0usize..5, 0usize..5, positive(), nonnegative(), nonnegative()), 0..5),
        flavors in prop::collection::vec((
            "[A-Z]{1,5}", 0usize..5, "[a-z0-9 _-]{0,8}", "[a-z]{0,6}", sizes_strategy(),
            format_strategy(), format_strategy(),
            (nonnegative(), nonnegative(), nonnegative(), nonnegative(), nonnegative()),
        ), 0..4),
        glue in prop::collection::btree_map((0usize..4, 0usize..4), prop::option::of(1u64..100), 0..5),
    ) -> Bsp {
        let pes: Vec<ProcessingElement> = pes
            .into_iter()
            .enumerate()
            .map(|(i, (class, clock, eff))| {
                let mut pe = ProcessingElement::new(&format!("pe{i}"), class, clock);
                pe.gpp_efficiency = eff;
                pe
            })
            .collect();
        let n = pes.len();
        let mut platform = Platform { pes, links: Vec::new() };
        for (i, (a, b, bw, lat, epb)) in links.into_iter().enumerate() {
            let (a, b) = (a % n, b % n);
            let (pa, pb) = (format!("pe{a}"), format!("pe{b}"));
            if a == b || platform.link_between(&pa, &pb).is_some() {
                continue;
            }
            let mut l = InterconnectLink::new(&format!("link{i}"), &pa, &pb, bw, lat);
            l.energy_per_byte_j = epb;
            platform.links.push(l);
        }
        let flavors = flavors
            .into_iter()
            .enumerate()
            .map(|(i, (nucleus, pe, algorithm, vendor, sizes, input, output, (a, b, c, e0, e1)))| Flavor {
                id: format!("fl{i}"),
                nucleus: NucleusId::new(nucleus).unwrap(),
                pe: format!("pe{}", pe % n),
                algorithm,
                vendor,
                supported_sizes: sizes,
                input_format: input,
                output_format: output,
                cost: CostModel::cycles(a, b, c).with_energy(e0, e1),
            })
            .collect();
        let overrides = glue
            .into_iter()
            .map(|((f, t), rule)| ((FormatKind::ALL[f], FormatKind::ALL[t]), rule))
            .collect();
        Bsp { name, platform, flavors, glue: GlueTable { overrides } }
    }
}
