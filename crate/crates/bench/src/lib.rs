//! Deterministic inputs shared by the benchmarks.

use nucleus_core::model::InterconnectLink;
use nucleus_core::{
    Bsp, CostModel, DataFormat, EdgeSpec, Flavor, KernelSpec, NucleusId, PeClass,
    ProcessingElement, Rounding, Scaling, SizeSet, WaveformGraph,
};
use num_complex::Complex64;

/// A chirp-like complex signal of length `n`.
pub fn signal(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            Complex64::from_polar(1.0, 40.0 * t * t) * (1.0 + 0.25 * (7.0 * t).sin())
        })
        .collect()
}

pub fn real_signal(n: usize) -> Vec<f64> {
    signal(n).iter().map(|c| c.re).collect()
}

/// A chain of `kernels` alternating FFT nuclei and plain kernels on a
/// two-PE board with three FFT flavors (one of them in Q15).
pub fn mapping_instance(kernels: usize) -> (WaveformGraph, Bsp) {
    let mut bsp = Bsp {
        name: "bench".into(),
        ..Default::default()
    };
    bsp.platform.pes.push(ProcessingElement::new("dsp", PeClass::Dsp, 600.0));
    let mut gpp = ProcessingElement::new("gpp", PeClass::Gpp, 1000.0);
    gpp.gpp_efficiency = 2.0;
    bsp.platform.pes.push(gpp);
    bsp.platform
        .links
        .push(InterconnectLink::new("bus", "dsp", "gpp", 400.0, 0.5));

    let f = DataFormat::cfloat32(256);
    let q = DataFormat::q15(256, Scaling::Block, Rounding::RoundNearest);
    for (id, pe, fmt, c) in [("f_dsp", "dsp", f, 6.0), ("q_dsp", "dsp", q, 2.0), ("f_gpp", "gpp", f, 10.0)] {
        bsp.flavors.push(Flavor {
            id: id.into(),
            nucleus: NucleusId::new("FFT").unwrap(),
            pe: pe.into(),
            algorithm: "radix2".into(),
            vendor: String::new(),
            supported_sizes: SizeSet::Pow2Range { min: 8, max: 4096 },
            input_format: fmt,
            output_format: fmt,
            cost: CostModel::cycles(100.0, 0.0, c).with_energy(1e-7, 1e-10),
        });
    }

    let mut g = WaveformGraph::new("bench");
    for i in 0..kernels {
        let id = format!("k{i:02}");
        g.kernels.push(if i % 2 == 0 {
            KernelSpec::nucleus(&id, "FFT", 256)
        } else {
            KernelSpec::non_nucleus(&id, 5000)
        });
        if i > 0 {
            g.edges.push(EdgeSpec::new(&format!("k{:02}", i - 1), &id, 256, f));
        }
    }
    (g, bsp)
}
