use std::sync::Arc;

use separator_core::cas::{Field, Poly, PolyRing};
use separator_core::oracle::{enumerate_points, fiber_length, truncated_membership, Fiber, Membership};
use separator_core::rings::{FpAlgebra, RingMap};

fn algebra(names: &[&str], rels: &[&str]) -> Arc<FpAlgebra> {
    let ring = PolyRing::new(Field::Rationals, names);
    let rels = rels.iter().map(|r| Poly::parse(&ring, r).unwrap()).collect();
    Arc::new(FpAlgebra::new(&ring, rels).unwrap())
}

fn p(a: &FpAlgebra, e: &str) -> Poly {
    Poly::parse(a.ring(), e).unwrap()
}

fn nodal_normalization() -> RingMap {
    let a = algebra(&["u", "v"], &["u^3 + u^2 - v^2"]);
    let line = algebra(&["x"], &[]);
    RingMap::new(a, line.clone(), vec![p(&line, "x^2 - 1"), p(&line, "x^3 - x")]).unwrap()
}

#[test]
fn points_over_small_fields() {
    let a = algebra(&["x"], &["x^2 - 1"]);
    assert_eq!(enumerate_points(&a, 5).unwrap().unwrap().points, vec![vec![1], vec![4]]);

    let cubic = algebra(&["u", "v"], &["u^3 + u^2 - v^2"]);
    let pts = enumerate_points(&cubic, 5).unwrap().unwrap().points;
    assert!(pts.contains(&vec![0, 0]));
    for pt in &pts {
        let (u, v) = (pt[0] as i64, pt[1] as i64);
        assert_eq!((u * u * u + u * u - v * v).rem_euclid(5), 0);
    }
    // one point over each u with u + 1 a nonzero square or zero: brute count
    let brute = (0..5).flat_map(|u| (0..5).map(move |v| (u, v))).filter(|(u, v)| (u * u * u + u * u - v * v) % 5 == 0);
    assert_eq!(pts.len(), brute.count());

    let unit = algebra(&["x"], &["1"]);
    assert!(enumerate_points(&unit, 7).unwrap().unwrap().points.is_empty());

    assert!(enumerate_points(&a, 4).is_err());
    let half = algebra(&["x"], &["x - 1/2"]);
    assert!(enumerate_points(&half, 2).unwrap().is_none());
    assert_eq!(enumerate_points(&half, 3).unwrap().unwrap().points, vec![vec![2]]);
}

#[test]
fn fiber_lengths() {
    let nu = nodal_normalization();
    assert_eq!(fiber_length(&nu, &[0, 0], 101).unwrap(), Some(Fiber::Length(2)));
    // u = 3, v^2 = 36: the point (3, 6) has one preimage x = 2
    assert_eq!(fiber_length(&nu, &[3, 6], 101).unwrap(), Some(Fiber::Length(1)));
    let id = RingMap::identity(nu.target());
    assert_eq!(fiber_length(&id, &[7], 101).unwrap(), Some(Fiber::Length(1)));

    let x = algebra(&["x"], &[]);
    let xy = algebra(&["x", "y"], &[]);
    let inc = RingMap::new(x, xy.clone(), vec![p(&xy, "x")]).unwrap();
    assert_eq!(fiber_length(&inc, &[0], 101).unwrap(), Some(Fiber::Infinite));
}

#[test]
fn membership_up_to_a_degree() {
    let x = algebra(&["x"], &[]);
    let yes = truncated_membership(&x, &p(&x, "x"), &[p(&x, "x")], 1, 101).unwrap();
    assert_eq!(yes, Some(Membership::Yes));

    let xw = algebra(&["x", "w"], &["x*w - 1"]);
    let no = truncated_membership(&xw, &p(&xw, "w"), &[p(&xw, "x")], 4, 101).unwrap();
    assert_eq!(no, Some(Membership::NoWithinBound));

    let sq = truncated_membership(&x, &p(&x, "x^4 + 3*x^2 + 1"), &[p(&x, "x^2")], 2, 101).unwrap();
    assert_eq!(sq, Some(Membership::Yes));
    let odd = truncated_membership(&x, &p(&x, "x^3"), &[p(&x, "x^2")], 4, 101).unwrap();
    assert_eq!(odd, Some(Membership::NoWithinBound));
}
