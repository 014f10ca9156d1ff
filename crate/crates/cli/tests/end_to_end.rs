mod common;

use common::{corpus_dir, corpus_files, orbitkit};
use orbitkit::format::{load_instance, parse_instance, to_text};
use serde_json::Value;

fn path_str(p: &std::path::Path) -> String {
    p.display().to_string()
}

#[test]
fn pass_corpus_validates() {
    let files: Vec<String> = corpus_files("pass").iter().map(|p| path_str(p)).collect();
    for f in &files {
        let out = orbitkit(&["validate", f]);
        assert_eq!(out.status.code(), Some(0), "{f}\n{}", String::from_utf8_lossy(&out.stdout));
    }
    let mut args = vec!["validate"];
    args.extend(files.iter().map(String::as_str));
    assert_eq!(orbitkit(&args).status.code(), Some(0));
}

#[test]
fn fail_corpus_reports_witnesses() {
    for f in corpus_files("fail") {
        let out = orbitkit(&["--json", "validate", &path_str(&f)]);
        assert_eq!(out.status.code(), Some(1), "{}", f.display());
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["passed"], Value::Bool(false));
        let failed: Vec<&Value> =
            report["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
        assert!(!failed.is_empty());
        for c in failed {
            assert!(!c["witnesses"].as_array().unwrap().is_empty(), "{c}");
        }
    }
}

#[test]
fn axiom_failures_cite_their_clause() {
    for (file, clause) in [
        ("bad_identity.inst", "identity"),
        ("bad_inverse.inst", "inverse"),
        ("bad_composition.inst", "composition"),
    ] {
        let out = orbitkit(&["validate", &path_str(&corpus_dir("fail").join(file))]);
        let text = String::from_utf8(out.stdout).unwrap();
        assert!(text.lines().any(|l| l.contains("witness:") && l.contains(clause)), "{file}: {text}");
    }
}

#[test]
fn json_output_is_byte_stable() {
    for f in corpus_files("pass").iter().chain(corpus_files("fail").iter()) {
        let f = path_str(f);
        let first = orbitkit(&["--json", "validate", &f]).stdout;
        let second = orbitkit(&["--json", "validate", &f]).stdout;
        assert_eq!(first, second);
        let value: Value = serde_json::from_slice(&first).unwrap();
        let again = serde_json::to_string_pretty(&value).unwrap();
        assert_eq!(again.trim_end(), String::from_utf8(first).unwrap().trim_end());
    }
}

#[test]
fn instance_text_is_byte_stable() {
    for f in corpus_files("pass").iter().chain(corpus_files("fail").iter()) {
        let once = to_text(&load_instance(f).unwrap());
        let twice = to_text(&parse_instance(&once).unwrap());
        assert_eq!(once.as_bytes(), twice.as_bytes(), "{}", f.display());
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("none.inst");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let broken = dir.path().join("broken.inst");
    std::fs::write(&broken, "[space x]\n[bogus]\n").unwrap();
    for args in [
        vec!["validate", empty.to_str().unwrap()],
        vec!["validate", broken.to_str().unwrap()],
        vec!["validate", "/nonexistent/file.inst"],
        vec!["equiv", "--mode", "sideways", empty.to_str().unwrap(), empty.to_str().unwrap()],
        vec!["frobnicate"],
    ] {
        assert_eq!(orbitkit(&args).status.code(), Some(2), "{args:?}");
    }
    let out = orbitkit(&["--json", "validate", broken.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("line 2"));
}

#[test]
fn other_commands_run_on_the_corpus() {
    let pass = |f: &str| path_str(&corpus_dir("pass").join(f));
    let out = orbitkit(&["groupoid", &pass("swap.inst")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("4 arrows, 2 units"));

    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let out = orbitkit(&["groupoid", "--dot", dot.to_str().unwrap(), &pass("swap.inst")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));

    for mode in ["iso", "coe", "ec"] {
        let out = orbitkit(&["equiv", "--mode", mode, &pass("swap.inst"), &pass("swap_relabeled.inst")]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
        let out = orbitkit(&["equiv", "--mode", mode, &pass("two_shift.inst"), &pass("two_shift_relabeled.inst")]);
        assert_eq!(out.status.code(), Some(0), "{mode}");
    }
    assert_eq!(orbitkit(&["equiv", &pass("loop.inst"), &pass("two_shift.inst")]).status.code(), Some(1));

    assert_eq!(orbitkit(&["recognize", &pass("recognize_z2.inst")]).status.code(), Some(0));
    assert_eq!(orbitkit(&["recognize", &pass("recognize_pair.inst")]).status.code(), Some(0));
    let bad = path_str(&corpus_dir("fail").join("bad_partition.inst"));
    assert_eq!(orbitkit(&["recognize", &bad]).status.code(), Some(1));

    let out = orbitkit(&["--depth", "2", "paths", &pass("loop.inst")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(a)"));
}
