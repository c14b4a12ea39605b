use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::groebner::GroebnerBasis;
use super::monomial::{Monomial, MonomialOrder};
use super::poly::{same_ring, Poly, PolyRing};
use crate::error::{Error, Result};

/// Ideal given by generators, with reduced Gröbner bases cached per order.
pub struct Ideal {
    ring: Arc<PolyRing>,
    gens: Vec<Poly>,
    cache: Mutex<HashMap<MonomialOrder, Arc<GroebnerBasis>>>,
}

impl Clone for Ideal {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().unwrap().clone();
        Ideal { ring: self.ring.clone(), gens: self.gens.clone(), cache: Mutex::new(cache) }
    }
}

impl std::fmt::Debug for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Ideal{:?}", self.gens)
    }
}

impl std::fmt::Display for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write_generators(f, &self.gens)
    }
}

pub(crate) fn write_generators(f: &mut std::fmt::Formatter<'_>, gens: &[Poly]) -> std::fmt::Result {
    write!(f, "(")?;
    for (i, g) in gens.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{g}")?;
    }
    if gens.is_empty() {
        write!(f, "0")?;
    }
    write!(f, ")")
}

impl Ideal {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Poly>) -> Result<Ideal> {
        for g in &gens {
            if !same_ring(g.ring(), ring) {
                return Err(Error::RingMismatch(format!(
                    "generator over {:?} in an ideal of {:?}",
                    g.ring().names(),
                    ring.names()
                )));
            }
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Ideal { ring: ring.clone(), gens, cache: Mutex::new(HashMap::new()) })
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Ideal {
        Ideal { ring: ring.clone(), gens: Vec::new(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }

    /// Reduced Gröbner basis for `order`, computed once and cached.
    pub fn groebner(&self, order: &MonomialOrder) -> Result<Arc<GroebnerBasis>> {
        if let Some(gb) = self.cache.lock().unwrap().get(order) {
            return Ok(gb.clone());
        }
        // computed outside the lock; a concurrent duplicate computation yields the same basis
        let gb = Arc::new(GroebnerBasis::compute(&self.ring, &self.gens, order)?);
        self.cache.lock().unwrap().entry(order.clone()).or_insert(gb.clone());
        Ok(gb)
    }

    pub fn default_basis(&self) -> Result<Arc<GroebnerBasis>> {
        self.groebner(&MonomialOrder::GrevLex)
    }

    pub fn normal_form(&self, f: &Poly, order: &MonomialOrder) -> Result<Poly> {
        self.groebner(order)?.normal_form(f)
    }

    pub fn reduce(&self, f: &Poly) -> Result<Poly> {
        self.normal_form(f, &MonomialOrder::GrevLex)
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.reduce(f)?.is_zero())
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        for g in other.generators() {
            if !self.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch("comparing ideals of different rings".into()));
        }
        Ok(self.default_basis()?.polys() == other.default_basis()?.polys())
    }

    pub fn is_unit(&self) -> Result<bool> {
        Ok(self.default_basis()?.is_unit())
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.default_basis()?.is_zero_ideal())
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    pub fn with_generators(&self, extra: &[Poly]) -> Result<Ideal> {
        let mut gens = self.gens.clone();
        gens.extend(extra.iter().cloned());
        Ideal::new(&self.ring, gens)
    }

    /// Generators of `I ∩ k[keep]`, using a block order with the discarded
    /// variables first.
    pub fn eliminate(&self, keep: &[usize]) -> Result<Ideal> {
        let n = self.ring.nvars();
        if keep.iter().any(|&k| k >= n) {
            return Err(Error::Invalid("eliminate: variable index out of range".into()));
        }
        let drop: Vec<usize> = (0..n).filter(|v| !keep.contains(v)).collect();
        if drop.is_empty() {
            return Ideal::new(&self.ring, self.default_basis()?.polys().to_vec());
        }
        // permuted ring: dropped variables first
        let mut perm: Vec<usize> = drop.clone();
        perm.extend((0..n).filter(|v| keep.contains(v)));
        let names: Vec<String> = perm.iter().map(|&v| self.ring.names()[v].clone()).collect();
        let pring = PolyRing::new(self.ring.field(), &names);
        let mut to_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            to_perm[old] = new;
        }
        let gens: Vec<Poly> = self.gens.iter().map(|g| g.map_vars(&pring, &to_perm)).collect();
        let order = MonomialOrder::Block { split: drop.len() };
        let gb = GroebnerBasis::compute(&pring, &gens, &order)?;
        let dropped_new: Vec<usize> = (0..drop.len()).collect();
        let kept: Vec<Poly> = gb
            .polys()
            .iter()
            .filter(|p| !p.involves_any(&dropped_new))
            .map(|p| p.map_vars(&self.ring, &perm))
            .collect();
        Ideal::new(&self.ring, kept)
    }

    /// Intersection via a tag variable: `t·I + (1 - t)·J`, then eliminate `t`.
    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch("intersecting ideals of different rings".into()));
        }
        let n = self.ring.nvars();
        let mut names = vec![self.ring.fresh_name("t")];
        names.extend(self.ring.names().iter().cloned());
        let tring = PolyRing::new(self.ring.field(), &names);
        let shift: Vec<usize> = (1..=n).collect();
        let t = Poly::var(&tring, 0);
        let one_minus_t = &Poly::one(&tring) - &t;
        let mut gens = Vec::new();
        for g in &self.gens {
            gens.push(&t * &g.map_vars(&tring, &shift));
        }
        for g in &other.gens {
            gens.push(&one_minus_t * &g.map_vars(&tring, &shift));
        }
        let gb = GroebnerBasis::compute(&tring, &gens, &MonomialOrder::Block { split: 1 })?;
        let out = gb
            .polys()
            .iter()
            .filter(|p| !p.involves(0))
            .map(|p| {
                let terms = p
                    .terms()
                    .iter()
                    .map(|(m, c)| {
                        (Monomial::from_exponents(m.exponents()[1..].to_vec()), c.clone())
                    })
                    .collect();
                Poly::from_terms(&self.ring, terms)
            })
            .collect();
        Ideal::new(&self.ring, out)
    }

    /// The colon ideal `(I : f) = { g : g·f ∈ I }`.
    pub fn quotient(&self, f: &Poly) -> Result<Ideal> {
        if !same_ring(f.ring(), &self.ring) {
            return Err(Error::RingMismatch("colon by a foreign polynomial".into()));
        }
        if f.is_zero() || self.contains(f)? {
            return Ideal::new(&self.ring, vec![Poly::one(&self.ring)]);
        }
        let principal = Ideal::new(&self.ring, vec![f.clone()])?;
        let inter = self.intersect(&principal)?;
        let mut gens = Vec::new();
        for g in inter.generators() {
            match g.exact_div(f) {
                Some(q) => gens.push(q),
                None => return Err(Error::Internal(format!("{g} in (f) but not divisible by {f}"))),
            }
        }
        Ideal::new(&self.ring, gens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cas::poly::poly_from_ints;
    use crate::cas::scalar::Field;

    fn qq(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(Field::Rationals, names)
    }

    #[test]
    fn normal_form_examples() {
        let r = qq(&["x", "y"]);
        let xy = poly_from_ints(&r, &[(1, &[1, 1])]);
        let i = Ideal::new(&r, vec![xy.clone()]).unwrap();
        assert!(i.reduce(&xy).unwrap().is_zero());
        let x = Poly::var(&r, 0);
        assert_eq!(i.reduce(&x).unwrap(), x);
        // 1 = x + (1 - x) lies in (x, 1 - x)
        let s = qq(&["x"]);
        let x1 = Poly::var(&s, 0);
        let one = Poly::one(&s);
        let j = Ideal::new(&s, vec![x1.clone(), &one - &x1]).unwrap();
        assert!(j.reduce(&one).unwrap().is_zero());
        assert!(j.is_unit().unwrap());
    }

    #[test]
    fn unit_ideal_tests() {
        let r = qq(&["s", "t"]);
        let i = Ideal::new(&r, vec![Poly::var(&r, 0), Poly::var(&r, 1)]).unwrap();
        assert!(!i.is_unit().unwrap());
        let q = qq(&["X", "Z1"]);
        let one_minus_x = poly_from_ints(&q, &[(1, &[0, 0]), (-1, &[1, 0])]);
        let xz = poly_from_ints(&q, &[(1, &[1, 1])]);
        assert!(!Ideal::new(&q, vec![one_minus_x, xz]).unwrap().is_unit().unwrap());
    }

    #[test]
    fn elimination_of_parametrised_cusp() {
        let r = qq(&["x", "u", "v"]);
        let f = poly_from_ints(&r, &[(1, &[0, 1, 0]), (-1, &[2, 0, 0])]);
        let g = poly_from_ints(&r, &[(1, &[0, 0, 1]), (-1, &[3, 0, 0])]);
        let i = Ideal::new(&r, vec![f, g]).unwrap();
        let e = i.eliminate(&[1, 2]).unwrap();
        let cusp = poly_from_ints(&r, &[(1, &[0, 3, 0]), (-1, &[0, 0, 2])]);
        assert_eq!(e.generators().len(), 1);
        assert_eq!(e.generators()[0].primitive(), cusp);
        assert!(i.contains(&cusp).unwrap());
        let z = Ideal::zero(&r).eliminate(&[1]).unwrap();
        assert!(z.generators().is_empty());
    }

    #[test]
    fn colon_examples() {
        let r = qq(&["x", "y"]);
        let x = Poly::var(&r, 0);
        let y = Poly::var(&r, 1);
        let i = Ideal::new(&r, vec![&x * &y]).unwrap();
        let q = i.quotient(&x).unwrap();
        assert!(q.equals(&Ideal::new(&r, vec![y.clone()]).unwrap()).unwrap());
        let x2 = Ideal::new(&r, vec![x.pow(2)]).unwrap();
        assert!(x2.quotient(&x).unwrap().equals(&Ideal::new(&r, vec![x.clone()]).unwrap()).unwrap());
        let s = qq(&["x"]);
        let zero = Ideal::zero(&s).quotient(&Poly::var(&s, 0)).unwrap();
        assert!(zero.is_zero().unwrap());
    }
}
