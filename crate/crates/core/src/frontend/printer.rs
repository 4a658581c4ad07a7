//! Canonical text form. Printing then parsing yields an equal model.

use std::fmt::Write;

use crate::model::{Bsp, ConstraintSpec, KernelKind, SizeSet, WaveformGraph};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn tag(s: &str) -> String {
    if is_ident(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

pub fn print_waveform(g: &WaveformGraph) -> String {
    let mut out = format!("waveform {} {{\n", quote(&g.name));
    for k in &g.kernels {
        match &k.kind {
            KernelKind::Nucleus {
                nucleus,
                params,
                fallback_load,
            } => {
                let _ = write!(out, "  kernel {} : nucleus({}) {{", k.id, nucleus);
                if let Some(size) = params.get("size") {
                    let _ = write!(out, " size = {size};");
                }
                for (key, v) in params.iter().filter(|(key, _)| *key != "size") {
                    let _ = write!(out, " {key} = {v};");
                }
                let _ = write!(out, " invocations = {};", k.invocations);
                if let Some(load) = fallback_load {
                    let _ = write!(out, " fallback_load = {load};");
                }
            }
            KernelKind::NonNucleus { load_ops } => {
                let _ = write!(
                    out,
                    "  kernel {} : nonnucleus {{ load = {}; invocations = {};",
                    k.id, load_ops, k.invocations
                );
            }
        }
        out.push_str(" }\n");
    }
    for e in &g.edges {
        let _ = writeln!(
            out,
            "  edge {} -> {} {{ tokens = {}; format = {}; }}",
            e.src, e.dst, e.tokens, e.format
        );
    }
    for c in &g.constraints {
        match c {
            ConstraintSpec::PathLatency { path, bound_us } => {
                let _ = writeln!(
                    out,
                    "  constraint latency(path = [{}]) <= {} us;",
                    path.join(", "),
                    bound_us
                );
            }
            ConstraintSpec::Throughput { min_frames_per_s } => {
                let _ = writeln!(out, "  constraint throughput >= {min_frames_per_s} fps;");
            }
        }
    }
    out.push_str("}\n");
    out
}

pub fn print_bsp(bsp: &Bsp) -> String {
    let mut out = format!("bsp {} {{\n", quote(&bsp.name));
    for pe in &bsp.platform.pes {
        let _ = write!(
            out,
            "  pe {} : {} {{ clock = {} MHz;",
            pe.id,
            pe.class.keyword(),
            pe.clock_mhz
        );
        if pe.gpp_efficiency != 1.0 {
            let _ = write!(out, " efficiency = {};", pe.gpp_efficiency);
        }
        out.push_str(" }\n");
    }
    for l in &bsp.platform.links {
        let _ = write!(
            out,
            "  link {} : {} <-> {} {{ bandwidth = {} MBps; latency = {} us;",
            l.id, l.endpoints.0, l.endpoints.1, l.bandwidth_mbps, l.latency_us
        );
        if l.energy_per_byte_j != 0.0 {
            let _ = write!(out, " energy_per_byte = {};", l.energy_per_byte_j);
        }
        out.push_str(" }\n");
    }
    for f in &bsp.flavors {
        let _ = writeln!(out, "  flavor {} : {} on {} {{", f.id, f.nucleus, f.pe);
        let _ = writeln!(out, "    algorithm = {};", tag(&f.algorithm));
        if !f.vendor.is_empty() {
            let _ = writeln!(out, "    vendor = {};", tag(&f.vendor));
        }
        let sizes = match &f.supported_sizes {
            SizeSet::Pow2Range { min, max } => format!("[{min}..{max} pow2]"),
            SizeSet::List { sizes } => {
                let items: Vec<String> = sizes.iter().map(u64::to_string).collect();
                format!("[{}]", items.join(", "))
            }
        };
        let _ = writeln!(out, "    sizes = {sizes};");
        let _ = writeln!(out, "    input = {};", f.input_format);
        let _ = writeln!(out, "    output = {};", f.output_format);
        let c = &f.cost;
        let _ = writeln!(out, "    cycles = {} + {}*n + {}*nlogn;", c.a, c.b, c.c);
        let _ = writeln!(out, "    energy = {} + {}*n;", c.e0, c.e1);
        out.push_str("  }\n");
    }
    for ((from, to), rule) in &bsp.glue.overrides {
        match rule {
            Some(cycles) => {
                let _ = writeln!(out, "  glue {from} -> {to} = {cycles};");
            }
            None => {
                let _ = writeln!(out, "  glue {from} -> {to} = none;");
            }
        }
    }
    out.push_str("}\n");
    out
}
