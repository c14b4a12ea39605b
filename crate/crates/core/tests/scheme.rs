use std::sync::Arc;

use separator_core::cas::{Field, Ideal, Poly, PolyRing};
use separator_core::flatness::{FlatMethod, FlatVerdict};
use separator_core::rings::{FpAlgebra, RingMap};
use separator_core::scheme::{
    apparented, build_twisted, diagonal_closure, diagonal_dominant, identified_in_separator, is_separated,
    separator_check, Assertions, Chart, Dominance, Identification, PointRef, SeparatorVerdict, TwistSpec,
    TwoOpenScheme,
};
use separator_core::Error;

fn algebra(names: &[&str], rels: &[&str]) -> Arc<FpAlgebra> {
    let ring = PolyRing::new(Field::Rationals, names);
    let rels = rels.iter().map(|r| Poly::parse(&ring, r).unwrap()).collect();
    Arc::new(FpAlgebra::new(&ring, rels).unwrap())
}

fn p(a: &FpAlgebra, e: &str) -> Poly {
    Poly::parse(a.ring(), e).unwrap()
}

fn ideal(a: &FpAlgebra, gens: &[&str]) -> Ideal {
    Ideal::new(a.ring(), gens.iter().map(|g| p(a, g)).collect()).unwrap()
}

fn twisted(a: &Arc<FpAlgebra>, invert: &[&str], tau: &[&str]) -> TwoOpenScheme {
    let spec = TwistSpec::new(a.clone(), invert.iter().map(|e| p(a, e)).collect()).unwrap();
    let u0 = spec.overlap().clone();
    let spec = if tau.is_empty() { spec } else { spec.with_twist(tau.iter().map(|e| p(&u0, e)).collect()).unwrap() };
    build_twisted(&spec).unwrap()
}

/// `Z -> X Z / (1 - X)` on `QQ[X, Z][1/(X(1-X))]`; `1/(1-X) = X w`.
fn smooth_counterexample() -> TwoOpenScheme {
    let a = algebra(&["X", "Z"], &[]);
    twisted(&a, &["X", "1 - X"], &["X", "X^2*Z*w"])
}

fn doubled_line() -> TwoOpenScheme {
    twisted(&algebra(&["x"], &[]), &["x"], &[])
}

fn crossing_lines() -> TwoOpenScheme {
    let a = algebra(&["X", "Y"], &["X*Y"]);
    twisted(&a, &["X"], &[]).with_assertions(Assertions { dominant: true, connected: true, ..Default::default() })
}

fn point(t: &TwoOpenScheme, chart: Chart, gens: &[&str]) -> PointRef {
    let ring = t.chart(chart);
    PointRef::new(t, chart, gens.iter().map(|g| p(ring, g)).collect()).unwrap()
}

fn witness(report: &separator_core::flatness::FlatReport) -> Vec<Poly> {
    match &report.verdict {
        FlatVerdict::NotFlat { witness, .. } => witness.clone(),
        other => panic!("expected NotFlat, got {other:?}"),
    }
}

#[test]
fn smooth_counterexample_has_no_separator() {
    let t = smooth_counterexample();
    assert_eq!(t.inverted(Chart::V), [p(t.v(), "X"), p(t.v(), "1 - X")]);
    assert!(!is_separated(&t).unwrap());
    assert_eq!(diagonal_dominant(&t).unwrap(), Dominance::Yes);

    let d = diagonal_closure(&t).unwrap();
    let c = &d.algebra;
    let mut names = c.names().to_vec();
    names.sort();
    assert_eq!(names, ["X", "Z0", "Z1"]);
    assert!(c.relations().equals(&ideal(c, &["(1 - X)*Z0 - X*Z1"])).unwrap());
    assert!(d.inclusion.is_injective().unwrap());

    let report = separator_check(&t).unwrap();
    assert!(matches!(&report.verdict, SeparatorVerdict::NoSeparator { failing } if failing == &[Chart::U, Chart::V]));
    let wu = witness(report.over_u.as_ref().unwrap());
    let wv = witness(report.over_v.as_ref().unwrap());
    for (w, expected) in [(&wu, ["X", "(1 - X)*Z"]), (&wv, ["1 - X", "X*Z"])] {
        let a = t.u();
        let got = Ideal::new(a.ring(), w.clone()).unwrap();
        assert!(got.equals(&ideal(a, &expected)).unwrap(), "witness {w:?}");
        assert!(!got.is_unit().unwrap());
    }
    assert_eq!(report.over_u.as_ref().unwrap().verdict.method(), Some(FlatMethod::Hypersurface));
}

#[test]
fn doubled_line_separator_is_the_line() {
    let t = doubled_line();
    assert!(!is_separated(&t).unwrap());
    let report = separator_check(&t).unwrap();
    let SeparatorVerdict::SeparatorExists(sep) = &report.verdict else { panic!("{:?}", report.verdict) };
    let c = sep.scheme.overlap();
    assert_eq!(c.names(), ["x"]);
    assert!(c.relations().is_zero().unwrap());
    assert_eq!(sep.isomorphic, (true, true));
    assert!(is_separated(&sep.scheme).unwrap());
    assert!(sep.scheme.rho_u().is_epimorphism().unwrap() && sep.scheme.rho_v().is_epimorphism().unwrap());

    let origins = (point(&t, Chart::U, &["x"]), point(&t, Chart::V, &["x"]));
    assert!(apparented(&t, &origins.0, &origins.1).unwrap());
    assert_eq!(identified_in_separator(&t, &origins.0, &origins.1).unwrap(), Identification::Identified);
    let (a, b) = (point(&t, Chart::U, &["x - 1"]), point(&t, Chart::V, &["x - 2"]));
    assert!(!apparented(&t, &a, &b).unwrap());
    assert_eq!(identified_in_separator(&t, &a, &b).unwrap(), Identification::Distinct);
}

#[test]
fn crossing_lines_glued_along_an_axis() {
    let t = crossing_lines();
    let bare = t.clone().with_assertions(Assertions::default());
    assert_eq!(diagonal_dominant(&bare).unwrap(), Dominance::Undecided);
    assert!(matches!(separator_check(&bare).unwrap().verdict, SeparatorVerdict::Undecided { .. }));

    let d = diagonal_closure(&t).unwrap();
    // the V side presents A/YA = QQ[X]
    assert_eq!(d.algebra.names(), ["X"]);
    assert!(d.algebra.relations().is_zero().unwrap());
    assert!(d.from_v.is_surjective().unwrap());
    let a = t.v();
    assert!(d.from_v.kernel().unwrap().equals(&ideal(a, &["X*Y", "Y"])).unwrap());

    let report = separator_check(&t).unwrap();
    assert_eq!(report.verdict.status(), "NoSeparator");
    let over_v = report.over_v.as_ref().unwrap();
    assert_eq!(over_v.verdict.method(), Some(FlatMethod::Fitting));
    let w = Ideal::new(a.ring(), witness(over_v)).unwrap();
    assert!(w.with_generators(a.relations().generators()).unwrap().equals(&ideal(a, &["Y"])).unwrap());
}

#[test]
fn trivial_gluing_is_separated() {
    let a = algebra(&["x", "y"], &[]);
    let t = twisted(&a, &[], &[]);
    assert!(is_separated(&t).unwrap());
    assert_eq!(separator_check(&t).unwrap().verdict.status(), "AlreadySeparated");
    let id = RingMap::identity(&a);
    let glued = TwoOpenScheme::new(id.clone(), id).unwrap();
    assert!(is_separated(&glued).unwrap());
}

#[test]
fn restriction_maps_must_be_localizations() {
    let a = algebra(&["x"], &[]);
    let b = algebra(&["x", "y"], &[]);
    let inc = RingMap::new(a.clone(), b.clone(), vec![p(&b, "x")]).unwrap();
    let err = TwoOpenScheme::new(inc, RingMap::identity(&b)).unwrap_err();
    assert!(matches!(err, Error::Invalid(_)));

    let spec = TwistSpec::new(a.clone(), vec![p(&a, "x")]).unwrap();
    let u0 = spec.overlap().clone();
    // x -> x^2 is not invertible on QQ[x, 1/x]
    assert!(spec.with_twist(vec![p(&u0, "x^2")]).is_err());
}

#[test]
fn swapping_charts_mirrors_the_verdict() {
    for t in [smooth_counterexample(), doubled_line(), crossing_lines()] {
        let r = separator_check(&t).unwrap();
        let s = separator_check(&t.swap()).unwrap();
        assert_eq!(r.verdict.status(), s.verdict.status());
        if let (SeparatorVerdict::NoSeparator { failing: f }, SeparatorVerdict::NoSeparator { failing: g }) =
            (&r.verdict, &s.verdict)
        {
            let mut mirrored: Vec<Chart> = f.iter().map(|c| c.other()).collect();
            mirrored.sort();
            assert_eq!(&mirrored, g);
        }
        for c in [Chart::U, Chart::V] {
            let (a, b) = (r.over(c), s.over(c.other()));
            assert_eq!(a.map(|x| x.verdict.status()), b.map(|x| x.verdict.status()));
        }
    }
}

#[test]
fn separator_charts_factor_through_the_closure() {
    let t = doubled_line();
    let d = diagonal_closure(&t).unwrap();
    assert!(d.inclusion.is_injective().unwrap());
    for c in [Chart::U, Chart::V] {
        let through = d.from_chart(c).then(&d.inclusion).unwrap();
        assert!(through.agrees_with(t.restriction(c)).unwrap());
    }
}

#[test]
fn points_on_the_common_open_are_apparented_to_their_copies() {
    let t = smooth_counterexample();
    let x = point(&t, Chart::U, &["X - 1/2", "Z"]);
    let y = point(&t, Chart::V, &["X - 1/2", "Z"]);
    assert!(apparented(&t, &x, &y).unwrap());
    // Z = 1 on U corresponds to Z = 1 on V at X = 1/2, not Z = 2
    let y2 = point(&t, Chart::V, &["X - 1/2", "Z - 2"]);
    assert!(!apparented(&t, &point(&t, Chart::U, &["X - 1/2", "Z - 1"]), &y2).unwrap());
    assert_eq!(identified_in_separator(&t, &x, &y).unwrap(), Identification::NoSeparator);

    assert!(PointRef::new(&t, Chart::U, vec![p(t.u(), "X")]).is_err());
    assert!(PointRef::new(&t, Chart::U, vec![p(t.u(), "1")]).is_err());
    assert!(apparented(&t, &x, &x).is_err());
}
