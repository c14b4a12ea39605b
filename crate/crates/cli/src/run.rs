//! Query execution and report rendering.

use serde_json::{json, Map, Value};

use separator_core::flatness::{flatness, is_etale, show, EtaleVerdict, FlatMethod, FlatReport, FlatVerdict};
use separator_core::oracle::{enumerate_points, fiber_length, Fiber};
use separator_core::properties::flatness_suite;
use separator_core::rings::{FpAlgebra, RingMap};
use separator_core::scheme::{
    apparented, identified_in_separator, is_separated, separator_check, Chart, Dominance, SeparatorReport,
    SeparatorVerdict,
};
use separator_core::Error;

use crate::manifest::{Item, Manifest, Pos, Query};
use crate::session::{ElabError, Session};

/// Fiber-length samples per prime and map.
const ORACLE_POINTS: usize = 8;
/// Extra samples taken on the non-flat locus.
const ORACLE_LOCUS_POINTS: usize = 4;
/// Regular instances drawn by `--seed`.
const SUITE_SIZE: usize = 50;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Primes for the fiber-length cross-check; empty disables it.
    pub oracle: Vec<u32>,
    /// Seed for the randomized flatness suite.
    pub seed: Option<u64>,
}

/// Outcome of one query.
#[derive(Debug, Clone)]
pub struct Record {
    pub query: String,
    pub line: usize,
    pub status: String,
    /// Human-readable lines for text mode.
    pub lines: Vec<String>,
    pub details: Map<String, Value>,
    /// The query failed with an error, or a cross-check disagreed.
    pub failed: bool,
}

impl Record {
    fn new(query: String, line: usize) -> Record {
        Record { query, line, status: String::new(), lines: Vec::new(), details: Map::new(), failed: false }
    }

    fn set(&mut self, key: &str, value: Value) {
        self.details.insert(key.into(), value);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "query": self.query,
            "line": self.line,
            "status": self.status,
            "details": Value::Object(self.details.clone()),
        })
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub source: String,
    pub records: Vec<Record>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA_VERSION,
            "source": self.source,
            "records": self.records.iter().map(Record::to_json).collect::<Vec<_>>(),
        })
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&format!("{}:{}: {}: {}\n", self.source, r.line, r.query, r.status));
            for l in &r.lines {
                out.push_str(&format!("    {l}\n"));
            }
        }
        out
    }

    pub fn failed(&self) -> bool {
        self.records.iter().any(|r| r.failed)
    }
}

pub fn run(source: &str, m: &Manifest, session: &Session, opts: &RunOptions) -> Report {
    let mut records: Vec<Record> = m.queries.iter().map(|q| run_query(session, q, opts)).collect();
    if let Some(seed) = opts.seed {
        records.push(suite_record(seed, opts.oracle.first().copied().unwrap_or(101)));
    }
    Report { source: source.to_string(), records }
}

fn run_query(session: &Session, q: &Item<Query>, opts: &RunOptions) -> Record {
    let mut rec = Record::new(q.node.to_string(), q.at.line);
    match answer(session, &q.node, q.at, opts, &mut rec) {
        Ok(()) => {}
        Err(QueryError::Core(Error::Undecided(reason))) => {
            rec.status = "Undecided".into();
            rec.lines.push(format!("undecided: {reason}"));
            rec.set("reason", json!(reason));
        }
        Err(e) => {
            rec.status = "Error".into();
            rec.lines.push(e.to_string());
            rec.set("error", json!(e.to_string()));
            rec.failed = true;
        }
    }
    rec
}

#[derive(Debug, thiserror::Error)]
enum QueryError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Elab(#[from] ElabError),
}

fn answer(session: &Session, q: &Query, at: Pos, opts: &RunOptions, rec: &mut Record) -> Result<(), QueryError> {
    match q {
        Query::Flat(f) => {
            let entry = session.map_named(f, at)?;
            let report = flatness(&entry.map, session.ring_connected(&entry.source)?)?;
            rec.status = report.verdict.status().into();
            describe_flat(&report, "", rec);
            oracle_checks(&entry.map, &report, opts, None, rec)?;
        }
        Query::Etale(f) => {
            let entry = session.map_named(f, at)?;
            let v = is_etale(&entry.map, session.ring_connected(&entry.source)?)?;
            rec.status = v.status().into();
            match &v {
                EtaleVerdict::Etale => rec.lines.push("flat, and the module of differentials vanishes".into()),
                EtaleVerdict::NotEtale { reason } | EtaleVerdict::Undecided { reason } => {
                    rec.lines.push(reason.clone());
                    rec.set("reason", json!(reason));
                }
            }
        }
        Query::Kernel(f) => {
            let k = session.map_named(f, at)?.map.kernel()?;
            rec.status = "Computed".into();
            let gens: Vec<String> = k.generators().iter().map(|g| g.to_string()).collect();
            rec.lines.push(format!("kernel generated by {}", show(k.generators())));
            rec.set("generators", json!(gens));
        }
        Query::Image(f) => {
            let im = session.map_named(f, at)?.map.image()?;
            let simple = im.algebra.simplify()?;
            rec.status = "Computed".into();
            rec.lines.push(format!("image presented as {}", simple.algebra));
            rec.set("image", algebra_json(&simple.algebra));
        }
        Query::Separated(s) => {
            let sep = is_separated(session.scheme_named(s, at)?)?;
            rec.status = if sep { "Separated" } else { "NotSeparated" }.into();
            rec.lines.push(format!(
                "the restriction maps {} jointly surjective onto the common open",
                if sep { "are" } else { "are not" }
            ));
        }
        Query::Separator(s) | Query::BuildSeparator(s) => {
            let t = session.scheme_named(s, at)?;
            let report = separator_check(t)?;
            rec.status = report.verdict.status().into();
            describe_separator(&report, matches!(q, Query::BuildSeparator(_)), rec)?;
            for c in [Chart::U, Chart::V] {
                if let (Some(r), Some(closure)) = (report.over(c), &report.closure) {
                    oracle_checks(closure.from_chart(c), r, opts, Some(c), rec)?;
                }
            }
        }
        Query::Apparented(a, b) | Query::Identified(a, b) => {
            let (x, y) = (session.point_named(a, at)?, session.point_named(b, at)?);
            if x.scheme != y.scheme {
                return Err(ElabError {
                    at,
                    message: format!("`{a}` lies on {} and `{b}` on {}", x.scheme, y.scheme),
                }
                .into());
            }
            let t = session.scheme_named(&x.scheme, at)?;
            if matches!(q, Query::Apparented(..)) {
                let yes = apparented(t, &x.point, &y.point)?;
                rec.status = if yes { "Apparented" } else { "NotApparented" }.into();
                rec.lines.push(format!(
                    "the points {} in the closure of the diagonal",
                    if yes { "meet" } else { "do not meet" }
                ));
            } else {
                let v = identified_in_separator(t, &x.point, &y.point)?;
                rec.status = v.status().into();
                if let separator_core::scheme::Identification::Undecided { reason } = &v {
                    rec.lines.push(reason.clone());
                }
            }
        }
    }
    Ok(())
}

fn algebra_json(a: &FpAlgebra) -> Value {
    let rels: Vec<String> = a.relations().generators().iter().map(|g| g.to_string()).collect();
    json!({ "generators": a.names(), "relations": rels, "field": a.field().to_string() })
}

fn method_text(m: FlatMethod) -> &'static str {
    match m {
        FlatMethod::Trivial => "isomorphism",
        FlatMethod::Hypersurface => "hypersurface criterion: A[T]/(sT - t) with s, t regular is flat iff (s, t) = (1)",
        FlatMethod::Fitting => "Fitting criterion: a finite module is flat iff some F_r is (1) and F_(r-1) is 0",
    }
}

fn method_key(m: FlatMethod) -> &'static str {
    match m {
        FlatMethod::Trivial => "isomorphism",
        FlatMethod::Hypersurface => "hypersurface",
        FlatMethod::Fitting => "fitting",
    }
}

fn flat_json(r: &FlatReport) -> Value {
    let mut m = Map::new();
    m.insert("status".into(), json!(r.verdict.status()));
    if let Some(method) = r.verdict.method() {
        m.insert("method".into(), json!(method_key(method)));
    }
    match &r.verdict {
        FlatVerdict::Flat { rank: Some(k), .. } => {
            m.insert("rank".into(), json!(k));
        }
        FlatVerdict::NotFlat { witness, .. } => {
            m.insert("witness".into(), json!(witness.iter().map(|g| g.to_string()).collect::<Vec<_>>()));
        }
        FlatVerdict::Undecided { reason } => {
            m.insert("reason".into(), json!(reason));
        }
        _ => {}
    }
    if let Some((s, t)) = &r.hypersurface {
        m.insert("hypersurface".into(), json!({ "s": s.to_string(), "t": t.to_string() }));
    }
    Value::Object(m)
}

/// Text lines for a flatness verdict; `prefix` names the base in separator reports.
fn flat_lines(r: &FlatReport, prefix: &str) -> Vec<String> {
    let mut out = Vec::new();
    match &r.verdict {
        FlatVerdict::Flat { method, rank } => {
            let rank = rank.map(|k| format!(" of rank {k}")).unwrap_or_default();
            out.push(format!("{prefix}FLAT{rank} ({})", method_text(*method)));
        }
        FlatVerdict::NotFlat { method, witness } => {
            out.push(format!("{prefix}NOT FLAT, witness ideal {} ({})", show(witness), method_text(*method)));
        }
        FlatVerdict::Undecided { reason } => out.push(format!("{prefix}UNDECIDED: {reason}")),
    }
    if let Some((s, t)) = &r.hypersurface {
        out.push(format!("{}target is A[T]/(sT - t) with s = {s}, t = {t}", " ".repeat(prefix.len())));
    }
    out
}

fn describe_flat(r: &FlatReport, prefix: &str, rec: &mut Record) {
    rec.lines.extend(flat_lines(r, prefix));
    if let Value::Object(m) = flat_json(r) {
        for (k, v) in m {
            if k != "status" {
                rec.details.insert(k, v);
            }
        }
    }
}

fn describe_separator(report: &SeparatorReport, build: bool, rec: &mut Record) -> Result<(), Error> {
    let dominance = match report.dominance {
        Dominance::Yes => "Yes",
        Dominance::No => "No",
        Dominance::Undecided => "Undecided",
    };
    rec.lines.push(format!("diagonal dominant: {dominance}"));
    rec.set("dominance", json!(dominance));
    if let Some(c) = &report.closure {
        rec.lines.push(format!("closure of the diagonal: C = Im(phi) = {}", c.algebra));
        rec.set("closure", algebra_json(&c.algebra));
    }
    let mut over = Map::new();
    for c in [Chart::U, Chart::V] {
        if let Some(r) = report.over(c) {
            rec.lines.extend(flat_lines(r, &format!("C flat over Gamma({c})? ")));
            over.insert(c.to_string(), flat_json(r));
        }
    }
    if !over.is_empty() {
        rec.set("over", Value::Object(over));
    }
    match &report.verdict {
        SeparatorVerdict::AlreadySeparated => rec.lines.push("already separated: the scheme is its own separator".into()),
        SeparatorVerdict::NoSeparator { failing } => {
            let names: Vec<String> = failing.iter().map(|c| c.to_string()).collect();
            rec.lines.push(format!(
                "no separator: a separator would make C flat over every chart, and it is not over {}",
                names.join(", ")
            ));
            rec.set("failing", json!(names));
        }
        SeparatorVerdict::Undecided { reason } => {
            rec.lines.push(format!("undecided: {reason}"));
            rec.set("reason", json!(reason));
        }
        SeparatorVerdict::SeparatorExists(sep) => {
            let e = &sep.scheme;
            rec.lines.push(format!("separator E: U and V glued along Spec {}", e.overlap()));
            let iso = |b: bool| if b { "isomorphism" } else { "open immersion" };
            rec.lines.push(format!("T -> E on U: {}; on V: {}", iso(sep.isomorphic.0), iso(sep.isomorphic.1)));
            if build {
                let separated = is_separated(e)?;
                rec.lines.push(format!("E separated: {separated}"));
                rec.set(
                    "separator",
                    json!({
                        "gluing_ring": algebra_json(e.overlap()),
                        "isomorphism": { "U": sep.isomorphic.0, "V": sep.isomorphic.1 },
                        "separated": separated,
                    }),
                );
            }
        }
    }
    if !report.notes.is_empty() {
        rec.lines.extend(report.notes.iter().cloned());
        rec.set("notes", json!(report.notes));
    }
    Ok(())
}

fn fiber_text(f: Fiber) -> String {
    match f {
        Fiber::Length(k) => k.to_string(),
        Fiber::Infinite => "infinite".into(),
    }
}

/// Points spread evenly through `points`.
fn spread(points: &[Vec<u32>], k: usize) -> Vec<Vec<u32>> {
    if points.len() <= k {
        return points.to_vec();
    }
    (0..k).map(|i| points[i * points.len() / k].clone()).collect()
}

/// Fiber lengths over `GF(p)` for a decided verdict on a module-finite map:
/// flat maps must have constant finite length at the samples, non-flat ones a
/// jump, with samples taken on the witness locus as well.
pub fn oracle_agreement(phi: &RingMap, verdict: &FlatVerdict, p: u32) -> Result<Option<(bool, Vec<String>, usize)>, Error> {
    let Some(sample) = enumerate_points(phi.source(), p)? else { return Ok(None) };
    let mut points = spread(&sample.points, ORACLE_POINTS);
    if let FlatVerdict::NotFlat { witness, .. } = verdict {
        let src = phi.source();
        let mut rels = src.relations().generators().to_vec();
        rels.extend(witness.iter().cloned());
        let locus = FpAlgebra::new(src.ring(), rels)?;
        if let Some(s) = enumerate_points(&locus, p)? {
            points.extend(spread(&s.points, ORACLE_LOCUS_POINTS));
        }
    }
    points.sort();
    points.dedup();
    let mut lengths = Vec::new();
    for pt in &points {
        match fiber_length(phi, pt, p)? {
            Some(f) => lengths.push(f),
            None => return Ok(None),
        }
    }
    let constant = lengths.windows(2).all(|w| w[0] == w[1]) && !lengths.contains(&Fiber::Infinite);
    let agrees = match verdict {
        FlatVerdict::Flat { .. } => constant,
        FlatVerdict::NotFlat { .. } => !constant,
        FlatVerdict::Undecided { .. } => return Ok(None),
    };
    let mut distinct: Vec<String> = Vec::new();
    for f in lengths {
        let s = fiber_text(f);
        if !distinct.contains(&s) {
            distinct.push(s);
        }
    }
    distinct.sort();
    Ok(Some((agrees, distinct, points.len())))
}

fn oracle_checks(phi: &RingMap, r: &FlatReport, opts: &RunOptions, over: Option<Chart>, rec: &mut Record) -> Result<(), Error> {
    let prefix = over.map(|c| format!("over {c}: ")).unwrap_or_default();
    let module_finite = r.module.is_some() || r.verdict.method() == Some(FlatMethod::Trivial);
    if opts.oracle.is_empty() || !module_finite || matches!(r.verdict, FlatVerdict::Undecided { .. }) {
        return Ok(());
    }
    let mut checks = Vec::new();
    for &p in &opts.oracle {
        match oracle_agreement(phi, &r.verdict, p)? {
            Some((agrees, lengths, n)) => {
                rec.lines.push(format!(
                    "{prefix}GF({p}) fiber lengths at {n} points: {{{}}}, {}",
                    lengths.join(", "),
                    if agrees { "agrees" } else { "DISAGREES" }
                ));
                if !agrees {
                    rec.failed = true;
                }
                checks.push(json!({ "p": p, "points": n, "lengths": lengths, "agrees": agrees }));
            }
            None => {
                rec.lines.push(format!("{prefix}GF({p}): skipped, p divides a denominator"));
                checks.push(json!({ "p": p, "agrees": Value::Null }));
            }
        }
    }
    let key = over.map(|c| format!("oracle_{c}")).unwrap_or_else(|| "oracle".into());
    rec.set(&key, Value::Array(checks));
    Ok(())
}

fn suite_record(seed: u64, p: u32) -> Record {
    let mut rec = Record::new(format!("properties seed={seed}"), 0);
    match flatness_suite(seed, SUITE_SIZE, p) {
        Ok(r) => {
            rec.status = if r.passed() { "Passed" } else { "Failed" }.into();
            rec.failed = !r.passed();
            rec.lines.push(format!(
                "{} regular instances ({} flat, {} not flat) from {} draws; {} checked against GF({p}) fibers",
                r.regular, r.flat, r.not_flat, r.drawn, r.oracle_checked
            ));
            rec.lines.extend(r.failures.iter().cloned());
            rec.set(
                "suite",
                json!({
                    "drawn": r.drawn, "regular": r.regular, "flat": r.flat, "not_flat": r.not_flat,
                    "oracle_checked": r.oracle_checked, "failures": r.failures,
                }),
            );
        }
        Err(e) => {
            rec.status = "Error".into();
            rec.failed = true;
            rec.lines.push(e.to_string());
        }
    }
    rec
}
