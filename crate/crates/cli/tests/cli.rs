use std::fs;
use std::path::Path;

use gpnorm_cli::run;
use gpnorm_core::presentation::parse_presentation;

fn gpnorm(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["gpnorm"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = gpnorm(&["gen-corpus", "--out", s(dir.path()), "--count", "0"]);
    assert_eq!(code, 0, "{err}");
    dir
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_dinf_is_bounded() {
    let dir = corpus_dir();
    let (code, out, _) = gpnorm(&["classify", s(&dir.path().join("dinf.json"))]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bounded"], true);
    assert_eq!(v["certificate"]["kind"], "BOUNDED_DECOMPOSITION");
}

#[test]
fn normal_form_of_a_power() {
    let dir = corpus_dir();
    let (code, out, _) = gpnorm(&["nf", s(&dir.path().join("psl.json")), "b^4"]);
    assert_eq!((code, out.as_str()), (0, "b\n"));
    let (code, _, err) = gpnorm(&["nf", s(&dir.path().join("psl.json")), "q^2"]);
    assert_eq!(code, 1);
    assert!(err.contains("error"));
}

#[test]
fn distortion_lower_column_is_n_over_six() {
    let dir = corpus_dir();
    let graph = dir.path().join("psl.json");
    let cert = dir.path().join("out.cert");
    let (code, _, _) = gpnorm(&["classify", s(&graph), "--out", s(&cert)]);
    assert_eq!(code, 0);
    let svg = dir.path().join("plot.svg");
    let (code, out, _) = gpnorm(&[
        "distortion",
        s(&graph),
        "a b",
        "--nmax",
        "6",
        "--cert",
        s(&cert),
        "--svg",
        s(&svg),
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,lower,upper");
    let lowers: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(lowers, ["1/6", "1/3", "1/2", "2/3", "5/6", "1"]);
    assert!(fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn norm_reports_both_bounds() {
    let dir = corpus_dir();
    let graph = dir.path().join("z.json");
    let cert = dir.path().join("z.cert");
    gpnorm(&["classify", s(&graph), "--out", s(&cert)]);
    let (code, out, _) = gpnorm(&["norm", s(&graph), "a^3", "--radius", "3", "--cert", s(&cert)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lower"], "3");
    assert_eq!(v["upper"], 3);
    let (_, out, _) = gpnorm(&["norm", s(&graph), "a^5", "--radius", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["upper"], "UNKNOWN");
}

#[test]
fn verify_passes_and_rejects_tampering() {
    let dir = corpus_dir();
    let graph = dir.path().join("path.json");
    let cert = dir.path().join("path.cert");
    gpnorm(&["classify", s(&graph), "--out", s(&cert)]);
    let (code, out, _) = gpnorm(&["verify", s(&graph), s(&cert), "--seed", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.ends_with("PASS\n"));

    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    v["certificate"]["kind"] = "HOMOMORPHISM".into();
    v["certificate"]["retraction_chain"] = serde_json::json!([["b"]]);
    v["certificate"]["payload"] = serde_json::json!({"type": "homomorphism", "vertex": "b"});
    v["certificate"]["witness"] = "b".into();
    let bad = dir.path().join("bad.cert");
    fs::write(&bad, v.to_string()).unwrap();
    let (code, out, _) = gpnorm(&["verify", s(&graph), s(&bad)]);
    assert_eq!(code, 2);
    assert!(out.contains("tv(a,b)"), "{out}");
}

#[test]
fn classes_as_json_and_dot() {
    let dir = corpus_dir();
    let graph = dir.path().join("path.json");
    let (code, out, _) = gpnorm(&["classes", s(&graph)]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["bounded_form"], false);
    let (_, dot, _) = gpnorm(&["classes", s(&graph), "--format", "dot"]);
    assert!(dot.starts_with("digraph"));
}

#[test]
fn orbit_lists_dihedral_conjugates() {
    let dir = corpus_dir();
    let (code, out, _) = gpnorm(&["orbit", s(&dir.path().join("dinf.json")), "--depth", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "a\nb\na b a\nb a b\n");
    let (code, out, _) = gpnorm(&[
        "orbit",
        s(&dir.path().join("z2.json")),
        "--seeds",
        "a",
        "--gens",
        "tv(a,b)",
        "--depth",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "a\na b^-2\na b^-1\na b\na b^2\n");
}

#[test]
fn corpus_generation_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (code, _, _) = gpnorm(&["gen-corpus", "--out", s(d.path()), "--max-vertices", "4", "--seed", "1"]);
        assert_eq!(code, 0);
    }
    let list = |d: &Path| {
        let mut names: Vec<_> = fs::read_dir(d).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        names
            .into_iter()
            .map(|n| (n.clone(), fs::read(d.join(n)).unwrap()))
            .collect::<Vec<_>>()
    };
    assert_eq!(list(a.path()), list(b.path()));

    let dinf = parse_presentation(&fs::read_to_string(a.path().join("dinf.json")).unwrap()).unwrap();
    assert_eq!(dinf.len(), 2);
    assert!(dinf.edges().is_empty());
}

#[test]
fn exhaustive_corpus_counts_labelled_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = gpnorm(&[
        "gen-corpus",
        "--out",
        s(dir.path()),
        "--max-vertices",
        "3",
        "--orders",
        "2,inf",
        "--exhaustive",
    ]);
    assert_eq!(code, 0);
    let labelled = fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_str().unwrap().starts_with("labelled_"))
        .count();
    assert_eq!(labelled, 8 * 8);
}

#[test]
fn emitted_files_parse_back() {
    let dir = corpus_dir();
    for entry in fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let text = fs::read_to_string(&path).unwrap();
        let p = parse_presentation(&text).unwrap();
        assert_eq!(p.to_json(), text);
    }
}

#[test]
fn bad_inputs_exit_one() {
    let (code, _, err) = gpnorm(&["classify", "/nonexistent/graph.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("reading"));
    let (code, _, _) = gpnorm(&["distortion", "x.json", "a", "--nmax", "0"]);
    assert_eq!(code, 1);
}
