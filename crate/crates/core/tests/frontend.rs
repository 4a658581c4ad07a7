mod common;

use std::fs;
use std::path::{Path, PathBuf};

use nucleus_core::frontend::{
    parse_bsp, parse_bsp_named, parse_waveform, parse_waveform_named, print_bsp, print_waveform,
    ParseDiagnostic,
};
use common::{bsp_strategy, waveform_strategy};
use proptest::prelude::*;

fn corpus(dir: &str) -> Vec<PathBuf> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(dir);
    let mut files: Vec<PathBuf> = fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("wdl" | "bsp")))
        .collect();
    files.sort();
    files
}

fn is_wdl(p: &Path) -> bool {
    p.extension().unwrap() == "wdl"
}

#[test]
fn hand_written_corpus_round_trips() {
    let files = corpus("valid");
    assert!(files.len() >= 30);
    for path in files {
        let src = fs::read_to_string(&path).unwrap();
        let name = path.display().to_string();
        if is_wdl(&path) {
            let g = parse_waveform_named(&name, &src).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            let printed = print_waveform(&g);
            let again = parse_waveform(&printed).unwrap();
            assert_eq!(again, g, "{name}");
            assert_eq!(print_waveform(&again), printed, "{name}");
        } else {
            let b = parse_bsp_named(&name, &src).unwrap_or_else(|d| panic!("{name}: {d:?}"));
            let printed = print_bsp(&b);
            let again = parse_bsp(&printed).unwrap();
            assert_eq!(again, b, "{name}");
            assert_eq!(print_bsp(&again), printed, "{name}");
        }
    }
}

/// Malformed files start with `// expect E0000 line N`.
fn expectation(src: &str) -> (String, usize) {
    let head = src.lines().next().unwrap();
    let parts: Vec<&str> = head.split_whitespace().collect();
    assert_eq!(&parts[..2], ["//", "expect"], "bad header: {head}");
    (parts[2].to_string(), parts[4].parse().unwrap())
}

#[test]
fn malformed_corpus_reports_the_right_line() {
    let files = corpus("malformed");
    assert!(files.len() >= 15);
    for path in files {
        let src = fs::read_to_string(&path).unwrap();
        let (code, line) = expectation(&src);
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let diags: Vec<ParseDiagnostic> = if is_wdl(&path) {
            parse_waveform_named(&name, &src).err()
        } else {
            parse_bsp_named(&name, &src).err()
        }
        .unwrap_or_else(|| panic!("{name} parsed without errors"));
        assert!(diags.iter().any(|d| d.is_error()), "{name}");
        assert!(
            diags
                .iter()
                .any(|d| d.code.as_str() == code && d.span.line == line),
            "{name}: expected {code} at line {line}, got {:?}",
            diags.iter().map(ToString::to_string).collect::<Vec<_>>()
        );
        assert!(diags[0].to_string().starts_with(&format!("{name}:")));
    }
}

#[test]
fn three_kernel_file_round_trips() {
    let src = "waveform \"w\" {\n  kernel a : nonnucleus { load = 5; }\n  kernel b : nucleus(FFT) { size = 64; }\n  kernel c : nonnucleus { load = 7; }\n  edge a -> b { tokens = 64; format = cfloat32(block=64); }\n  edge b -> c { tokens = 64; format = cfloat32(block=64); }\n  constraint latency(path = [a, b, c]) <= 100 us;\n}\n";
    let g = parse_waveform(src).unwrap();
    assert_eq!(g.kernels.len(), 3);
    assert_eq!(g.edges.len(), 2);
    assert_eq!(g.constraints.len(), 1);
    assert_eq!(parse_waveform(&print_waveform(&g)).unwrap(), g);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_waveforms_round_trip(g in waveform_strategy()) {
        prop_assert!(g.validate().is_empty());
        let text = print_waveform(&g);
        let parsed = parse_waveform(&text);
        prop_assert!(parsed.is_ok(), "{}\n{:?}", text, parsed);
        prop_assert_eq!(parsed.unwrap(), g);
    }

    #[test]
    fn random_bsps_round_trip(b in bsp_strategy()) {
        let text = print_bsp(&b);
        let parsed = parse_bsp(&text);
        prop_assert!(parsed.is_ok(), "{}\n{:?}", text, parsed);
        prop_assert_eq!(parsed.unwrap(), b);
    }

    #[test]
    fn parser_never_panics(src in "[ -~\n]{0,200}") {
        let _ = parse_waveform(&src);
        let _ = parse_bsp(&src);
    }
}
