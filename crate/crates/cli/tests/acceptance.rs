//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines appear in the test log.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

use separator_cli::run::RunOptions;
use separator_cli::{check, parse, CheckOptions, Session};
use separator_core::cas::{GroebnerBasis, Ideal, MonomialOrder, Poly};
use separator_core::flatness::{flatness, is_etale, EtaleVerdict, FlatMethod, FlatVerdict};
use separator_core::oracle::{truncated_membership, Membership};
use separator_core::properties::flatness_suite;
use separator_core::rings::FpAlgebra;
use separator_core::scheme::{
    diagonal_closure, identified_in_separator, is_separated, separator_check, Assertions, Chart, Identification,
    SeparatorVerdict, TwoOpenScheme,
};

type Outcome = Result<String, String>;

const CORPUS: [&str; 5] = ["twisted_plane", "nodal_cover", "crossing_lines", "doubled_line", "trivial_glue"];

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn corpus_file(name: &str, ext: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.{ext}"))
}

fn session(name: &str) -> Session {
    let text = std::fs::read_to_string(corpus_file(name, "sep")).unwrap();
    Session::load(&parse(&text).unwrap()).unwrap()
}

fn p(a: &FpAlgebra, e: &str) -> Poly {
    Poly::parse(a.ring(), e).unwrap()
}

fn ideal(a: &FpAlgebra, gens: &[&str]) -> Ideal {
    Ideal::new(a.ring(), gens.iter().map(|g| p(a, g)).collect()).unwrap()
}

fn ensure(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn witness(report: Option<&separator_core::flatness::FlatReport>) -> Result<Vec<Poly>, String> {
    match report.map(|r| &r.verdict) {
        Some(FlatVerdict::NotFlat { witness, .. }) => Ok(witness.clone()),
        other => Err(format!("expected NotFlat, got {other:?}")),
    }
}

fn smooth_counterexample() -> Outcome {
    let s = session("twisted_plane");
    let t = &s.schemes["T"];
    let d = diagonal_closure(t).map_err(|e| e.to_string())?;
    let c = &d.algebra;
    let expected = ideal(c, &["(1 - X)*Z0 - X*Z1"]);
    let rel = c.relations();
    ensure(
        rel.contains_ideal(&expected).unwrap() && expected.contains_ideal(rel).unwrap(),
        format!("closure presented by {}", c),
    )?;
    let report = separator_check(t).unwrap();
    ensure(
        matches!(&report.verdict, SeparatorVerdict::NoSeparator { failing } if failing == &[Chart::U, Chart::V]),
        format!("verdict {:?}", report.verdict.status()),
    )?;
    let a = t.u();
    for (c, gens) in [(Chart::U, ["X", "(1 - X)*Z"]), (Chart::V, ["1 - X", "X*Z"])] {
        let w = Ideal::new(a.ring(), witness(report.over(c))?).unwrap();
        ensure(w.equals(&ideal(a, &gens)).unwrap(), format!("witness over {c}: {:?}", w.generators()))?;
        ensure(!w.is_unit().unwrap(), format!("witness over {c} is the unit ideal"))?;
    }
    Ok(format!("C = {c}, witnesses (X, (1 - X)Z) and (1 - X, XZ)"))
}

fn hypersurface_suite() -> Outcome {
    let mut total = 0;
    let mut oracle = 0;
    for seed in [11, 12] {
        let r = flatness_suite(seed, 60, 101).map_err(|e| e.to_string())?;
        ensure(r.passed(), format!("seed {seed}: {:?}", r.failures))?;
        ensure(r.regular >= 50, format!("seed {seed}: only {} regular instances", r.regular))?;
        ensure(r.flat > 0 && r.not_flat > 0, format!("seed {seed}: one-sided sample {r:?}"))?;
        ensure(r.oracle_checked > 0, format!("seed {seed}: no module-finite instance checked"))?;
        total += r.regular;
        oracle += r.oracle_checked;
    }
    Ok(format!("{total} regular instances, {oracle} module-finite instances checked over GF(101)"))
}

fn crossing_lines() -> Outcome {
    let s = session("crossing_lines");
    let t = &s.schemes["T"];
    let bare = t.clone().with_assertions(Assertions::default());
    ensure(
        matches!(separator_check(&bare).unwrap().verdict, SeparatorVerdict::Undecided { .. }),
        "verdict without assertions should be Undecided",
    )?;
    let d = diagonal_closure(t).unwrap();
    ensure(d.algebra.names() == ["X"] && d.algebra.relations().is_zero().unwrap(), format!("C = {}", d.algebra))?;
    let a = t.v();
    ensure(d.from_v.is_surjective().unwrap(), "B -> C is not surjective")?;
    let k = d.from_v.kernel().unwrap();
    ensure(k.equals(&ideal(a, &["Y", "X*Y"])).unwrap(), format!("kernel {:?}", k.generators()))?;
    let report = separator_check(t).unwrap();
    ensure(report.verdict.status() == "NoSeparator", format!("verdict {}", report.verdict.status()))?;
    let over_v = report.over(Chart::V).unwrap();
    ensure(over_v.verdict.method() == Some(FlatMethod::Fitting), "not decided by Fitting ideals")?;
    witness(Some(over_v))?;
    Ok("C = A/YA = QQ[X], not flat over A, no separator".into())
}

fn doubled_line() -> Outcome {
    let s = session("doubled_line");
    let t = &s.schemes["T"];
    let report = separator_check(t).unwrap();
    let SeparatorVerdict::SeparatorExists(sep) = &report.verdict else {
        return Err(format!("verdict {}", report.verdict.status()));
    };
    let e = &sep.scheme;
    let c = e.overlap();
    ensure(c.names() == ["x"] && c.relations().is_zero().unwrap(), format!("gluing ring {c}"))?;
    let closure = report.closure.as_ref().unwrap();
    ensure(
        closure.from_u.is_isomorphism().unwrap() && closure.from_v.is_isomorphism().unwrap() && sep.isomorphic == (true, true),
        "structure maps are not isomorphisms",
    )?;
    ensure(is_separated(e).unwrap(), "E is not separated")?;
    let pt = |n: &str| &s.points[n].point;
    let same = identified_in_separator(t, pt("O1"), pt("O2")).unwrap();
    let apart = identified_in_separator(t, pt("P"), pt("Q")).unwrap();
    ensure(same == Identification::Identified, format!("origins: {same:?}"))?;
    ensure(apart == Identification::Distinct, format!("x = 1 and x = 2: {apart:?}"))?;
    Ok("E glued along QQ[x], origins identified, (x - 1), (x - 2) distinct".into())
}

fn triangle_cover() -> Outcome {
    let s = session("nodal_cover");
    let t = &s.schemes["T"];
    let u0 = t.overlap();
    let d = diagonal_closure(t).unwrap();
    let gens: Vec<Poly> = t.rho_u().images().iter().chain(t.rho_v().images()).cloned().collect();
    let from_b = d.from_u.then(&d.inclusion).unwrap();
    // idempotents of the three lines, and (t, 0, 0) with t = e1 on the line e2 = 0
    for (e, name) in [("e1*e3*w", "pi1"), ("e1*e2*w", "pi2"), ("e2*e3*w", "pi3"), ("e1^2*e3*w", "(t,0,0)")] {
        let f = p(u0, e);
        ensure(d.inclusion.in_image(&f).unwrap(), format!("{name} not in Im(phi)"))?;
        let m = truncated_membership(u0, &f, &gens, 4, 101).unwrap();
        ensure(m == Some(Membership::Yes), format!("{name}: truncated membership {m:?}"))?;
        ensure(!from_b.in_image(&f).unwrap(), format!("{name} already comes from B"))?;
    }
    let nu = &s.maps["normalization"];
    let r = flatness(&nu.map, s.ring_connected(&nu.source).unwrap()).unwrap();
    ensure(
        r.verdict.is_not_flat() && r.verdict.method() == Some(FlatMethod::Fitting),
        format!("normalization: {:?}", r.verdict),
    )?;
    let cover = &s.maps["cover"];
    let v = is_etale(&cover.map, s.ring_connected(&cover.source).unwrap()).unwrap();
    ensure(matches!(v, EtaleVerdict::Etale), format!("cover: {v:?}"))?;
    let verdict = separator_check(t).unwrap().verdict;
    ensure(verdict.status() == "NoSeparator", format!("verdict {}", verdict.status()))?;
    Ok("idempotents and (t, 0, 0) in Im(phi), normalization not flat, cover etale, no separator".into())
}

fn corpus_schemes() -> Vec<(String, TwoOpenScheme)> {
    let mut out = Vec::new();
    for name in CORPUS {
        for (k, t) in session(name).schemes {
            out.push((format!("{name}/{k}"), t));
        }
    }
    out
}

fn invariants() -> Outcome {
    // Gröbner bases: same input gives the same basis, generator order does
    // not matter, and a basis is its own basis
    let mut ideals: Vec<Ideal> = Vec::new();
    for (_, t) in corpus_schemes() {
        ideals.push(t.overlap().relations().clone());
        ideals.push(diagonal_closure(&t).unwrap().algebra.relations().clone());
    }
    for i in &ideals {
        for order in [MonomialOrder::GrevLex, MonomialOrder::Lex] {
            let g1 = GroebnerBasis::compute(i.ring(), i.generators(), &order).unwrap();
            let g2 = GroebnerBasis::compute(i.ring(), i.generators(), &order).unwrap();
            let reversed: Vec<Poly> = i.generators().iter().rev().cloned().collect();
            let g3 = GroebnerBasis::compute(i.ring(), &reversed, &order).unwrap();
            let again = GroebnerBasis::compute(i.ring(), g1.polys(), &order).unwrap();
            ensure(
                g1.polys() == g2.polys() && g1.polys() == g3.polys() && g1.polys() == again.polys(),
                format!("unstable basis for {:?}", i.generators()),
            )?;
        }
    }
    let mut separators = 0;
    let mut chains = 0;
    for (name, t) in corpus_schemes() {
        let r = separator_check(&t).unwrap();
        let s = separator_check(&t.swap()).unwrap();
        ensure(r.verdict.status() == s.verdict.status(), format!("{name}: swap changes the verdict"))?;
        for c in [Chart::U, Chart::V] {
            let a = r.over(c).map(|x| x.verdict.status());
            let b = s.over(c.other()).map(|x| x.verdict.status());
            ensure(a == b, format!("{name}: swap does not mirror flatness over {c}"))?;
            if let Some(m) = r.over(c).and_then(|x| x.module.as_ref()) {
                let f = m.fitting_ideals().unwrap();
                for k in 0..f.len() - 1 {
                    ensure(f[k + 1].contains_ideal(&f[k]).unwrap(), format!("{name}: F_{k} not in F_{}", k + 1))?;
                }
                chains += 1;
            }
        }
        if let SeparatorVerdict::SeparatorExists(sep) = &r.verdict {
            let closure = r.closure.as_ref().unwrap();
            ensure(is_separated(&sep.scheme).unwrap(), format!("{name}: E not separated"))?;
            for c in [Chart::U, Chart::V] {
                let m = closure.from_chart(c);
                ensure(
                    flatness(m, true).unwrap().verdict.is_flat() && m.is_epimorphism().unwrap(),
                    format!("{name}: chart {c} of E is not a flat epimorphism"),
                )?;
            }
            separators += 1;
        }
    }
    // oracle agreement on every module-finite map of the corpus
    let opts = CheckOptions { run: RunOptions { oracle: vec![101, 103], seed: None }, ..Default::default() };
    let mut checks = 0;
    for name in CORPUS {
        let text = std::fs::read_to_string(corpus_file(name, "sep")).unwrap();
        let out = check(name, &text, &opts).map_err(|e| e.to_string())?;
        ensure(!out.report.failed(), format!("{name}: a query failed or an oracle disagreed"))?;
        for r in &out.report.records {
            for (k, v) in &r.details {
                if k.starts_with("oracle") {
                    for c in v.as_array().unwrap() {
                        ensure(c["agrees"] != Value::Bool(false), format!("{name}: {}: {c}", r.query))?;
                        checks += usize::from(c["agrees"] == Value::Bool(true));
                    }
                }
            }
        }
    }
    ensure(checks > 0, "no oracle check ran")?;
    Ok(format!(
        "{} bases stable, swap symmetric, separator soundness on {separators} case(s), {chains} Fitting chains increasing, {checks} oracle checks agree",
        ideals.len() * 2
    ))
}

fn sep(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_sep")).args(args).output().expect("run sep");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn cli_contract() -> Outcome {
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    for name in CORPUS {
        let file = corpus_file(name, "sep");
        let file = file.to_str().unwrap();
        let args = ["check", file, "--format", "json", "--oracle", "101,103"];
        let (c1, a) = sep(&args);
        let (c2, b) = sep(&args);
        ensure(c1 == 0 && c2 == 0, format!("{name}: exit codes {c1}, {c2}"))?;
        ensure(a == b && !a.is_empty(), format!("{name}: JSON differs between runs"))?;
        serde_json::from_slice::<Value>(&a).map_err(|e| format!("{name}: invalid JSON: {e}"))?;
        let expect = corpus_file(name, "expect");
        let (code, _) = sep(&["check", file, "--strict-expect", expect.to_str().unwrap()]);
        ensure(code == 0, format!("{name}: recorded expectations give exit {code}"))?;
    }
    let twisted = corpus_file("twisted_plane", "sep");
    let twisted = twisted.to_str().unwrap();
    let wrong = tmp.join("wrong.expect");
    std::fs::write(&wrong, "separator T => SeparatorExists\n").unwrap();
    let (code, _) = sep(&["check", twisted, "--strict-expect", wrong.to_str().unwrap()]);
    ensure(code == 1, format!("expectation mismatch gives exit {code}"))?;
    let broken = tmp.join("broken.sep");
    std::fs::write(&broken, "ring A = QQ[x]/(x\n").unwrap();
    let (code, _) = sep(&["check", broken.to_str().unwrap()]);
    ensure(code == 2, format!("syntax error gives exit {code}"))?;
    let bad_query = tmp.join("bad_query.sep");
    std::fs::write(&bad_query, "ring A = QQ[x]\nquery flat nowhere\n").unwrap();
    let (code, _) = sep(&["check", bad_query.to_str().unwrap()]);
    ensure(code == 2, format!("failing query gives exit {code}"))?;
    let (code, _) = sep(&["check", tmp.join("missing.sep").to_str().unwrap()]);
    ensure(code == 2, format!("missing file gives exit {code}"))?;
    Ok("corpus JSON byte-identical across runs; exits 0 / 1 / 2 as specified".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("smooth surface without separator", smooth_counterexample),
        ("hypersurface flatness suite", hypersurface_suite),
        ("crossing lines", crossing_lines),
        ("doubled line", doubled_line),
        ("etale triangle over the node", triangle_cover),
        ("invariant suites", invariants),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS in {secs:.2}s: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL in {secs:.2}s: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
}
