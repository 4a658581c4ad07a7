mod common;

use common::*;
use nucleus_core::mapper::{enumerate_candidates, evaluate_binding, insert_glue};
use nucleus_core::{
    map_exhaustive, map_greedy, Binding, DataFormat, EdgeSpec, EvalConfig, Evaluator, KernelSpec,
    MapFailure, Rounding, Scaling, SearchOptions, Target, WaveformGraph,
};

const SCORE_TOL: f64 = 1e-12;

fn evaluator(c: &MapCase) -> Evaluator {
    Evaluator::new(&c.g, &c.bsp, EvalConfig::default()).unwrap()
}

#[test]
fn candidate_sets_agree_with_direct_derivation() {
    for c in mapping_corpus() {
        let mine = enumerate_candidates(&c.g, &c.bsp);
        for (kernel, targets) in oracle_targets(&c.g, &c.bsp) {
            let mut expected: Vec<_> = targets.iter().map(|t| t.id().to_string()).collect();
            expected.sort();
            let got: Vec<_> = mine
                .for_kernel(&kernel)
                .iter()
                .map(|c| c.target.id().to_string())
                .collect();
            assert_eq!(got, expected, "{} {kernel}", c.name);
            assert!(got.len() <= 3);
        }
    }
}

#[test]
fn exhaustive_matches_enumeration_oracle_and_greedy_is_no_better() {
    let corpus = mapping_corpus();
    assert!(corpus.len() >= 300);
    for c in &corpus {
        let ev = evaluator(c);
        let (feasible, optimum) = oracle_optimum(&c.g, &c.bsp, &ev).expect("some binding evaluates");
        assert!(feasible, "{}", c.name);
        let ex = map_exhaustive(&c.g, &c.bsp, &ev, &SearchOptions::default()).unwrap();
        assert!(
            (ex.best.report.score - optimum).abs() <= SCORE_TOL,
            "{}: {} vs {}",
            c.name,
            ex.best.report.score,
            optimum
        );
        let gr = map_greedy(&c.g, &c.bsp, &ev, &SearchOptions::default()).unwrap();
        assert!(gr.best.report.feasible);
        assert!(gr.best.report.score + SCORE_TOL >= optimum, "{}", c.name);
    }
}

#[test]
fn two_by_two_best_is_no_worse_than_the_other_three() {
    let case = mapping_corpus()
        .into_iter()
        .find(|c| c.name == "n2_m0011_pe2_x0_f2")
        .unwrap();
    let ev = evaluator(&case);
    let best = map_exhaustive(&case.g, &case.bsp, &ev, &SearchOptions::default()).unwrap();
    let all = all_bindings(&oracle_targets(&case.g, &case.bsp));
    assert_eq!(all.len(), 4);
    for b in all {
        let other = evaluate_binding(&case.g, &case.bsp, b, &ev).unwrap();
        assert!(best.best.report.score <= other.report.score + SCORE_TOL);
    }
}

#[test]
fn ranked_table_is_sorted_and_led_by_the_best() {
    for c in mapping_corpus().iter().filter(|c| c.name.starts_with("n4")).take(20) {
        let ev = evaluator(c);
        let opts = SearchOptions {
            top_k: 5,
            ..Default::default()
        };
        let out = map_exhaustive(&c.g, &c.bsp, &ev, &opts).unwrap();
        assert!(!out.ranked.is_empty() && out.ranked.len() <= 5);
        assert_eq!(out.ranked[0].binding, out.best.mapping.binding);
        for w in out.ranked.windows(2) {
            assert!(w[0].score <= w[1].score);
        }
    }
}

#[test]
fn glue_tasks_match_a_scan_of_mismatched_edges() {
    for c in mapping_corpus() {
        for b in all_bindings(&oracle_targets(&c.g, &c.bsp)) {
            let glue = insert_glue(&c.g, &c.bsp, &b).unwrap();
            let fmt_out = |k: &str, e: &EdgeSpec| match &b[k] {
                Target::Flavor(f) => c.bsp.flavor(f).unwrap().output_format,
                Target::Pe(_) => e.format,
            };
            let fmt_in = |k: &str, e: &EdgeSpec| match &b[k] {
                Target::Flavor(f) => c.bsp.flavor(f).unwrap().input_format,
                Target::Pe(_) => e.format,
            };
            let expected = c
                .g
                .edges
                .iter()
                .filter(|e| fmt_out(&e.src, e) != fmt_in(&e.dst, e))
                .count();
            assert_eq!(glue.len(), expected, "{}", c.name);
        }
    }
}

#[test]
fn one_mismatched_edge_yields_one_glue_task() {
    use nucleus_core::model::{Bsp, PeClass, ProcessingElement};
    let mut bsp = Bsp::default();
    bsp.platform.pes.push(ProcessingElement::new("p", PeClass::Dsp, 100.0));
    let q = DataFormat::q15(64, Scaling::Block, Rounding::Truncate);
    bsp.flavors.push(fft_flavor("fq", "p", q, q, 2.0));
    let mut g = WaveformGraph::new("three");
    g.kernels.push(KernelSpec::non_nucleus("a", 10));
    g.kernels.push(KernelSpec::non_nucleus("b", 10));
    g.kernels.push(KernelSpec::nucleus("fft", "FFT", 64));
    g.kernels.push(KernelSpec::non_nucleus("c", 10));
    let f = DataFormat::cfloat32(64);
    g.edges.push(EdgeSpec::new("a", "b", 64, f));
    g.edges.push(EdgeSpec::new("b", "fft", 64, q));
    g.edges.push(EdgeSpec::new("fft", "c", 64, f));
    let binding: Binding = [
        ("a", Target::Pe("p".into())),
        ("b", Target::Pe("p".into())),
        ("fft", Target::Flavor("fq".into())),
        ("c", Target::Pe("p".into())),
    ]
    .into_iter()
    .map(|(k, t)| (k.to_string(), t))
    .collect();
    let glue = insert_glue(&g, &bsp, &binding).unwrap();
    assert_eq!(glue.len(), 1);
    assert_eq!(glue[0].edge.to_string(), "fft->c");
    assert_eq!(glue[0].placed_on, "p");
}

#[test]
fn nucleus_without_flavor_or_fallback_is_reported() {
    let case = &mapping_corpus()[0];
    let mut g = case.g.clone();
    g.kernels.push(KernelSpec::nucleus("viterbi", "VITERBI", 128));
    let ev = Evaluator::new(&g, &case.bsp, EvalConfig::default()).unwrap();
    for r in [
        map_exhaustive(&g, &case.bsp, &ev, &SearchOptions::default()),
        map_greedy(&g, &case.bsp, &ev, &SearchOptions::default()),
    ] {
        match r {
            Err(MapFailure::EmptyCandidates(k)) => assert_eq!(k, vec!["viterbi".to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }
    // With a fallback load the kernel runs as plain code.
    let mut g2 = case.g.clone();
    g2.kernels
        .push(KernelSpec::nucleus("viterbi", "VITERBI", 128).with_fallback(5000));
    let ev = Evaluator::new(&g2, &case.bsp, EvalConfig::default()).unwrap();
    let out = map_exhaustive(&g2, &case.bsp, &ev, &SearchOptions::default()).unwrap();
    assert!(matches!(out.best.mapping.binding["viterbi"], Target::Pe(_)));
}

#[test]
fn enumeration_bound_is_enforced() {
    let case = mapping_corpus()
        .into_iter()
        .find(|c| c.name == "n4_m1111_pe2_x0_f3")
        .unwrap();
    let ev = evaluator(&case);
    let opts = SearchOptions {
        enumeration_bound: 80,
        ..Default::default()
    };
    match map_exhaustive(&case.g, &case.bsp, &ev, &opts) {
        Err(e @ MapFailure::BoundExceeded { product: 81, bound: 80 }) => {
            assert!(e.to_string().contains("greedy"));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(map_greedy(&case.g, &case.bsp, &ev, &opts).is_ok());
}

#[test]
fn greedy_respects_its_move_budget() {
    let case = mapping_corpus()
        .into_iter()
        .find(|c| c.name == "n4_m1111_pe2_x1_f3")
        .unwrap();
    let ev = evaluator(&case);
    for budget in [0usize, 1, 3, 10] {
        let opts = SearchOptions {
            move_budget: budget,
            ..Default::default()
        };
        let out = map_greedy(&case.g, &case.bsp, &ev, &opts).unwrap();
        assert!(out.explored <= 1 + budget as u64);
    }
}

#[test]
fn exhaustive_is_deterministic() {
    let case = mapping_corpus()
        .into_iter()
        .find(|c| c.name == "n4_m0101_pe2_x1_f3")
        .unwrap();
    let ev = evaluator(&case);
    let opts = SearchOptions {
        top_k: 4,
        ..Default::default()
    };
    let a = map_exhaustive(&case.g, &case.bsp, &ev, &opts).unwrap();
    for _ in 0..5 {
        assert_eq!(map_exhaustive(&case.g, &case.bsp, &ev, &opts).unwrap(), a);
    }
}
