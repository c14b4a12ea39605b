use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use separator_cli::parse;

const CORPUS: [&str; 5] = ["twisted_plane", "nodal_cover", "crossing_lines", "doubled_line", "trivial_glue"];

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../corpus/{name}.sep"))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn sep(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sep"));
    cmd.args(args).env_remove("SEP_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn statuses(out: &Output) -> Vec<String> {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["records"].as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap().to_string()).collect()
}

#[test]
fn corpus_round_trips_through_the_printer() {
    for name in CORPUS {
        let m = parse(&std::fs::read_to_string(corpus(name)).unwrap()).unwrap();
        let printed = m.to_string();
        assert_eq!(parse(&printed).unwrap(), m, "{name}:\n{printed}");
    }
}

#[test]
fn empty_manifest_is_a_clean_no_op() {
    let f = scratch("empty.sep", "# nothing to do\n");
    let out = sep(&["check", f.to_str().unwrap(), "--format", "json"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(statuses(&out).is_empty());
    let out = sep(&["check", f.to_str().unwrap()], &[]);
    assert!(out.stdout.is_empty());
}

#[test]
fn syntax_errors_name_line_and_column() {
    let f = scratch("unclosed.sep", "ring A = QQ[x]/(x\n");
    let out = sep(&["check", f.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("unclosed.sep:1:16: unclosed `(`"), "{err}");
    assert!(out.stdout.is_empty());

    let f = scratch("undeclared.sep", "ring A = QQ[x]\nmap f : A -> B { x -> x }\n");
    let err = String::from_utf8(sep(&["check", f.to_str().unwrap()], &[]).stderr).unwrap();
    assert!(err.contains("undeclared.sep:2:1: no ring named `B`"), "{err}");
}

#[test]
fn text_reports_name_the_criterion() {
    let out = sep(&["check", corpus("twisted_plane").to_str().unwrap()], &[]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("C flat over Gamma(U)? NOT FLAT, witness ideal (X, X*Z - Z) (hypersurface criterion"), "{text}");
    assert!(text.contains("separator T: NoSeparator"));
}

#[test]
fn exhausted_budget_is_undecided_not_an_error() {
    let file = corpus("nodal_cover");
    let file = file.to_str().unwrap();
    let tight = sep(&["check", file, "--format", "json", "--budget", "1000"], &[]);
    assert_eq!(tight.status.code(), Some(0));
    assert!(statuses(&tight).iter().any(|s| s == "Undecided"), "{:?}", statuses(&tight));
    let from_env = sep(&["check", file, "--format", "json"], &[("SEP_BUDGET", "1000")]);
    assert_eq!(from_env.stdout, tight.stdout);
    // the flag wins over the environment
    let flag = sep(&["check", file, "--format", "json", "--budget", "20000000"], &[("SEP_BUDGET", "10")]);
    assert!(!statuses(&flag).iter().any(|s| s == "Undecided"));
    let bad = sep(&["check", file], &[("SEP_BUDGET", "lots")]);
    assert_eq!(bad.status.code(), Some(2));
    // a budget too small to elaborate the declarations is an error
    let starved = sep(&["check", file, "--budget", "10"], &[]);
    assert_eq!(starved.status.code(), Some(2));
    assert!(String::from_utf8(starved.stderr).unwrap().contains("budget of 10 exceeded"));
}

#[test]
fn seeded_suite_is_reproducible() {
    let f = scratch("suite.sep", "");
    let args = ["check", f.to_str().unwrap(), "--format", "json", "--seed", "5"];
    let (a, b) = (sep(&args, &[]), sep(&args, &[]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(statuses(&a), ["Passed"]);
    let other = sep(&["check", f.to_str().unwrap(), "--format", "json", "--seed", "6"], &[]);
    assert_ne!(a.stdout, other.stdout);
}
