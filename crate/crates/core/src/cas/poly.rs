use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::monomial::{Monomial, MonomialOrder};
use super::scalar::{Field, Scalar};
use crate::error::{Error, Result};

/// Ordered variable list plus coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    names: Vec<String>,
    field: Field,
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(field: Field, names: &[S]) -> Arc<PolyRing> {
        Arc::new(PolyRing { names: names.iter().map(|s| s.as_ref().to_string()).collect(), field })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// A name not already used in this ring, derived from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh_name(&self.names, base)
    }

    pub fn with_field(&self, field: Field) -> Arc<PolyRing> {
        Arc::new(PolyRing { names: self.names.clone(), field })
    }
}

pub(crate) fn fresh_name(taken: &[String], base: &str) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

pub(crate) fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Multivariate polynomial. Terms are kept sorted descending in grevlex,
/// without duplicate monomials and without zero coefficients.
#[derive(Clone)]
pub struct Poly {
    ring: Arc<PolyRing>,
    terms: Vec<(Monomial, Scalar)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Poly {
    pub fn zero(ring: &Arc<PolyRing>) -> Poly {
        Poly { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(ring);
        }
        Poly { ring: ring.clone(), terms: vec![(Monomial::one(ring.nvars()), c)] }
    }

    pub fn one(ring: &Arc<PolyRing>) -> Poly {
        Poly::constant(ring, ring.field().one())
    }

    pub fn from_i64(ring: &Arc<PolyRing>, n: i64) -> Poly {
        Poly::constant(ring, ring.field().from_i64(n))
    }

    pub fn var(ring: &Arc<PolyRing>, index: usize) -> Poly {
        Poly { ring: ring.clone(), terms: vec![(Monomial::var(ring.nvars(), index, 1), ring.field().one())] }
    }

    pub fn monomial(ring: &Arc<PolyRing>, m: Monomial, c: Scalar) -> Poly {
        Poly::from_terms(ring, vec![(m, c)])
    }

    /// Builds a polynomial from arbitrary terms, combining duplicates.
    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, Scalar)>) -> Poly {
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.nvars(), ring.nvars());
            match acc.get_mut(&m) {
                Some(v) => *v = v.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let ord = MonomialOrder::GrevLex;
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Poly { ring: ring.clone(), terms }
    }

    /// Terms already sorted descending under `order`; re-sorted into storage order.
    pub(crate) fn from_sorted_under(ring: &Arc<PolyRing>, mut terms: Vec<(Monomial, Scalar)>, order: &MonomialOrder) -> Poly {
        if *order != MonomialOrder::GrevLex {
            let ord = MonomialOrder::GrevLex;
            terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        }
        Poly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.as_slice() {
            [] => Some(self.ring.field().zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponents()[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exponents()[var] > 0)
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        self.terms.iter().any(|(m, _)| m.involves_any(vars))
    }

    /// Indices of the variables that occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&v| self.involves(v)).collect()
    }

    /// Leading term under `order`.
    pub fn leading_term(&self, order: &MonomialOrder) -> Option<&(Monomial, Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(&a.0, &b.0))
    }

    pub fn leading_coefficient(&self, order: &MonomialOrder) -> Option<&Scalar> {
        self.leading_term(order).map(|t| &t.1)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, a)| (m.clone(), a.mul(c))).collect() }
    }

    /// Divides by the leading coefficient under `order`.
    pub fn monic(&self, order: &MonomialOrder) -> Poly {
        match self.leading_coefficient(order) {
            Some(c) => self.scale(&c.inv()),
            None => self.clone(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.ring);
        }
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(t, a)| (t.mul(m), a.mul(c))).collect() }
    }

    pub fn neg(&self) -> Poly {
        Poly { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    fn check_ring(&self, other: &Poly) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!("{:?} vs {:?}", self.ring.names(), other.ring.names())))
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(self.merge(other, false))
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        Ok(self.merge(other, true))
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_ring(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.ring));
        }
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match acc.get_mut(&m) {
                    Some(v) => *v = v.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let ord = MonomialOrder::GrevLex;
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        Ok(Poly { ring: self.ring.clone(), terms })
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(&self.ring);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn merge(&self, other: &Poly, subtract: bool) -> Poly {
        let ord = MonomialOrder::GrevLex;
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let pick = if i == self.terms.len() {
                Ordering::Less
            } else if j == other.terms.len() {
                Ordering::Greater
            } else {
                ord.cmp(&self.terms[i].0, &other.terms[j].0)
            };
            match pick {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((m.clone(), if subtract { c.neg() } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if subtract {
                        self.terms[i].1.sub(&other.terms[j].1)
                    } else {
                        self.terms[i].1.add(&other.terms[j].1)
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { ring: self.ring.clone(), terms: out }
    }

    /// Ring homomorphism evaluation: variable `i` is sent to `images[i]`.
    pub fn substitute(&self, target: &Arc<PolyRing>, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.ring.nvars() {
            return Err(Error::RingMismatch(format!(
                "substitution needs {} images, got {}",
                self.ring.nvars(),
                images.len()
            )));
        }
        if self.ring.field() != target.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", self.ring.field(), target.field())));
        }
        for img in images {
            if !same_ring(img.ring(), target) {
                return Err(Error::RingMismatch("substitution image in foreign ring".into()));
            }
        }
        let mut powers: Vec<Vec<Poly>> = vec![vec![Poly::one(target)]; images.len()];
        let mut acc = Poly::zero(target);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[v].len() <= e as usize {
                    let next = &powers[v][powers[v].len() - 1] * &images[v];
                    powers[v].push(next);
                }
                t = &t * &powers[v][e as usize];
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Renames variables into `target`: variable `i` becomes `target` variable `map[i]`.
    pub fn map_vars(&self, target: &Arc<PolyRing>, map: &[usize]) -> Poly {
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (i, &x) in m.exponents().iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Monomial::from_exponents(e), c.clone())
            })
            .collect();
        Poly::from_terms(target, terms)
    }

    /// Inverse of [`Poly::map_vars`] on polynomials that only involve `vars`:
    /// variable `vars[k]` becomes variable `k` of `target`.
    pub fn restrict_to(&self, target: &Arc<PolyRing>, vars: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                debug_assert_eq!(m.degree(), vars.iter().map(|&v| m.exponents()[v]).sum::<u32>());
                (Monomial::from_exponents(vars.iter().map(|&v| m.exponents()[v]).collect()), c.clone())
            })
            .collect();
        Poly::from_terms(target, terms)
    }

    /// Reinterprets a polynomial over a ring with identical variables but a
    /// different name list (no reordering).
    pub fn with_ring(&self, target: &Arc<PolyRing>) -> Poly {
        debug_assert_eq!(target.nvars(), self.ring.nvars());
        Poly { ring: target.clone(), terms: self.terms.clone() }
    }

    /// Reduction of a rational polynomial into `GF(p)`; `None` when `p`
    /// divides a denominator.
    pub fn reduce_mod(&self, target: &Arc<PolyRing>) -> Option<Poly> {
        let field = target.field();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let img = match c {
                Scalar::Rational(q) => field.from_rational(q)?,
                Scalar::Modular { .. } => c.clone(),
            };
            terms.push((m.clone(), img));
        }
        Some(Poly::from_terms(target, terms))
    }

    /// Partial derivative.
    pub fn derivative(&self, var: usize) -> Poly {
        let field = self.ring.field();
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponents()[var] > 0)
            .map(|(m, c)| {
                let mut e = m.exponents().to_vec();
                let k = e[var];
                e[var] -= 1;
                (Monomial::from_exponents(e), c.mul(&field.from_i64(k as i64)))
            })
            .collect();
        Poly::from_terms(&self.ring, terms)
    }

    /// Evaluation at a point given as field elements.
    pub fn evaluate(&self, point: &[Scalar]) -> Scalar {
        let mut acc = self.ring.field().zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&point[v]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Exact division; `None` if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        let (lm, lc) = divisor.terms[0].clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero(&self.ring);
        while let Some((m, c)) = rem.terms.first().cloned() {
            if !lm.divides(&m) {
                return None;
            }
            let q = lm.quotient_of(&m);
            let k = c.div(&lc);
            quot = &quot + &Poly::monomial(&self.ring, q.clone(), k.clone());
            rem = &rem - &divisor.mul_monomial(&q, &k);
        }
        Some(quot)
    }

    /// Splits into homogeneous components with respect to the total degree in `vars`.
    pub fn components_by_degree_in(&self, vars: &[usize]) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let d: u32 = vars.iter().map(|&v| m.exponents()[v]).sum();
            out.entry(d).or_default().push((m.clone(), c.clone()));
        }
        out.into_iter().map(|(d, t)| (d, Poly::from_terms(&self.ring, t))).collect()
    }

    /// Coefficient of `var^k` as a polynomial free of `var`.
    pub fn coefficient_of_power(&self, var: usize, k: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.exponents()[var] == k)
            .map(|(m, c)| {
                let mut e = m.exponents().to_vec();
                e[var] = 0;
                (Monomial::from_exponents(e), c.clone())
            })
            .collect();
        Poly::from_terms(&self.ring, terms)
    }

    /// Clears denominators and content so that rational polynomials have
    /// coprime integer coefficients and a positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.ring.field() != Field::Rationals || self.is_zero() {
            return self.monic(&MonomialOrder::GrevLex);
        }
        use num_integer::Integer;
        use num_traits::{One, Zero};
        let mut lcm = BigInt::one();
        for (_, c) in &self.terms {
            lcm = lcm.lcm(c.as_rational().unwrap().denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            let q = c.as_rational().unwrap();
            let n = q.numer() * (&lcm / q.denom());
            g = g.gcd(&n);
        }
        let mut factor = BigRational::new(lcm, g);
        if self.terms[0].1.is_negative() {
            factor = -factor;
        }
        self.scale(&Scalar::Rational(factor))
    }
}

impl<'a> std::ops::Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        self.try_add(rhs).expect("polynomial ring mismatch")
    }
}

impl<'a> std::ops::Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        self.try_sub(rhs).expect("polynomial ring mismatch")
    }
}

impl<'a> std::ops::Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial ring mismatch")
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

/// Arithmetic operations of the public `poly_arith` entry point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Result<Poly> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg() } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_monomial(&self.ring, m);
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

fn format_monomial(ring: &PolyRing, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ring.names()[i].clone()),
            _ => parts.push(format!("{}^{}", ring.names()[i], e)),
        }
    }
    parts.join("*")
}

/// Convenience constructor for tests and examples: integer-coefficient
/// polynomial from `(coefficient, exponents)` pairs.
pub fn poly_from_ints(ring: &Arc<PolyRing>, terms: &[(i64, &[u32])]) -> Poly {
    Poly::from_terms(
        ring,
        terms
            .iter()
            .map(|(c, e)| (Monomial::from_exponents(e.to_vec()), ring.field().from_i64(*c)))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(Field::Rationals, names)
    }

    #[test]
    fn difference_of_squares() {
        let r = ring(&["x"]);
        let x = Poly::var(&r, 0);
        let one = Poly::one(&r);
        let p = &(&x + &one) * &(&x - &one);
        assert_eq!(p.to_string(), "x^2 - 1");
    }

    #[test]
    fn adding_zero_is_identity() {
        let r = ring(&["x", "y"]);
        let p = poly_from_ints(&r, &[(3, &[2, 1]), (-1, &[0, 1])]);
        assert_eq!(poly_arith(&p, &Poly::zero(&r), ArithOp::Add).unwrap(), p);
    }

    #[test]
    fn crossing_lines_relation() {
        let r = ring(&["X", "Y"]);
        let xy = poly_arith(&Poly::var(&r, 0), &Poly::var(&r, 1), ArithOp::Mul).unwrap();
        assert_eq!(xy.to_string(), "X*Y");
    }

    #[test]
    fn mismatched_rings_are_rejected() {
        let a = Poly::var(&ring(&["x"]), 0);
        let b = Poly::var(&ring(&["y"]), 0);
        assert!(matches!(poly_arith(&a, &b, ArithOp::Add), Err(Error::RingMismatch(_))));
    }

    #[test]
    fn exact_division_and_substitution() {
        let r = ring(&["x", "y"]);
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let f = &(&x * &y) - &(&x * &x);
        assert_eq!(f.exact_div(&x).unwrap(), &y - &x);
        assert!(f.exact_div(&y).is_none());
        let t = ring(&["t"]);
        let tt = Poly::var(&t, 0);
        let img = f.substitute(&t, &[tt.clone(), tt.pow(2)]).unwrap();
        assert_eq!(img.to_string(), "t^3 - t^2");
    }

    #[test]
    fn primitive_part_clears_denominators() {
        let r = ring(&["x"]);
        let f = Poly::from_terms(
            &r,
            vec![
                (Monomial::var(1, 0, 1), Scalar::Rational(BigRational::new((-1).into(), 2.into()))),
                (Monomial::one(1), Scalar::Rational(BigRational::new(1.into(), 3.into()))),
            ],
        );
        assert_eq!(f.primitive().to_string(), "3*x - 2");
    }
}
