//! Buchberger's algorithm with the Gebauer–Möller pair criteria.
//!
//! Pair selection is the sugar strategy: smallest sugar degree, then smallest
//! lcm in the monomial order, then the indices of the two generators. Sugar
//! keeps elimination orders from chasing high-degree pairs. Reducers are
//! always searched in insertion order, so the output only depends on the input
//! list and the order.

use std::cell::Cell;
use std::cmp::Ordering;
use std::sync::Arc;

use super::monomial::{Monomial, MonomialOrder};
use super::poly::{Poly, PolyRing};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Resource bounds for Gröbner computations. Exceeding any of them yields
/// [`Error::Undecided`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_basis: usize,
    pub max_degree: u32,
    pub max_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_basis: 4000, max_degree: 60, max_steps: 20_000_000 }
    }
}

thread_local! {
    static BUDGET: Cell<Budget> = Cell::new(Budget::default());
}

/// Budget used by Gröbner computations on the current thread.
pub fn current_budget() -> Budget {
    BUDGET.with(|b| b.get())
}

pub fn set_thread_budget(budget: Budget) {
    BUDGET.with(|b| b.set(budget));
}

/// Runs `f` with `budget` installed, restoring the previous one afterwards.
pub fn with_budget<R>(budget: Budget, f: impl FnOnce() -> R) -> R {
    let old = current_budget();
    set_thread_budget(budget);
    let out = f();
    set_thread_budget(old);
    out
}

type Term = (Monomial, Scalar);

struct Steps {
    used: u64,
    limit: u64,
}

impl Steps {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::Undecided(format!("Gröbner step budget of {} exceeded", self.limit)));
        }
        Ok(())
    }
}

fn sort_terms(terms: &mut [Term], order: &MonomialOrder) {
    terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
}

/// `p - c * m * q` for term lists sorted descending under `order`.
fn sub_scaled(p: &[Term], q: &[Term], m: &Monomial, c: &Scalar, order: &MonomialOrder) -> Vec<Term> {
    let mut out = Vec::with_capacity(p.len() + q.len());
    let (mut i, mut j) = (0, 0);
    let mut qj: Option<Term> = q.first().map(|(qm, qc)| (qm.mul(m), qc.mul(c)));
    while i < p.len() || qj.is_some() {
        let ord = match (&qj, i < p.len()) {
            (None, _) => Ordering::Greater,
            (Some(_), false) => Ordering::Less,
            (Some((qm, _)), true) => order.cmp(&p[i].0, qm),
        };
        match ord {
            Ordering::Greater => {
                out.push(p[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let (qm, qc) = qj.take().unwrap();
                out.push((qm, qc.neg()));
                j += 1;
                qj = q.get(j).map(|(qm, qc)| (qm.mul(m), qc.mul(c)));
            }
            Ordering::Equal => {
                let (qm, qc) = qj.take().unwrap();
                let v = p[i].1.sub(&qc);
                if !v.is_zero() {
                    out.push((qm, v));
                }
                i += 1;
                j += 1;
                qj = q.get(j).map(|(qm, qc)| (qm.mul(m), qc.mul(c)));
            }
        }
    }
    out
}

fn make_monic(p: &mut [Term]) {
    if let Some((_, lc)) = p.first() {
        if !lc.is_one() {
            let inv = lc.inv();
            for t in p.iter_mut() {
                t.1 = t.1.mul(&inv);
            }
        }
    }
}

/// Reduction of `p` by monic `reducers`. With `full`, every term is reduced;
/// otherwise only until the leading term is irreducible. `sugar` tracks the
/// sugar degree when reducer sugars are supplied.
fn reduce_terms(
    mut p: Vec<Term>,
    reducers: &[&[Term]],
    order: &MonomialOrder,
    steps: &mut Steps,
    full: bool,
    mut sugar: Option<(&mut u32, &[u32])>,
) -> Result<Vec<Term>> {
    let mut done: Vec<Term> = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let lm = &p[start].0;
        match reducers.iter().position(|g| g[0].0.divides(lm)) {
            Some(k) => {
                steps.tick()?;
                let g = reducers[k];
                let q = g[0].0.quotient_of(lm);
                let c = p[start].1.clone();
                if let Some((s, sugars)) = sugar.as_mut() {
                    **s = (**s).max(q.degree() + sugars[k]);
                }
                p = sub_scaled(&p[start..], g, &q, &c, order);
                start = 0;
            }
            None if full => {
                done.push(p[start].clone());
                start += 1;
            }
            None => {
                done.extend(p.drain(start..));
                return Ok(done);
            }
        }
    }
    Ok(done)
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

struct Engine<'a> {
    order: &'a MonomialOrder,
    polys: Vec<Vec<Term>>,
    sugars: Vec<u32>,
    active: Vec<usize>,
    pairs: Vec<Pair>,
    steps: Steps,
    budget: Budget,
}

impl<'a> Engine<'a> {
    fn lm(&self, i: usize) -> &Monomial {
        &self.polys[i][0].0
    }

    /// Top-reduction by the active basis, updating `sugar`.
    fn reduce(&mut self, p: Vec<Term>, sugar: &mut u32) -> Result<Vec<Term>> {
        let reducers: Vec<&[Term]> = self.active.iter().map(|&k| self.polys[k].as_slice()).collect();
        let sugars: Vec<u32> = self.active.iter().map(|&k| self.sugars[k]).collect();
        reduce_terms(p, &reducers, self.order, &mut self.steps, false, Some((sugar, &sugars)))
    }

    fn insert(&mut self, mut h: Vec<Term>, sugar: u32) -> Result<()> {
        make_monic(&mut h);
        let deg = h.iter().map(|t| t.0.degree()).max().unwrap_or(0);
        if deg > self.budget.max_degree {
            return Err(Error::Undecided(format!("Gröbner degree bound {} exceeded", self.budget.max_degree)));
        }
        if self.polys.len() >= self.budget.max_basis {
            return Err(Error::Undecided(format!("Gröbner basis size bound {} exceeded", self.budget.max_basis)));
        }
        let hi = self.polys.len();
        self.polys.push(h);
        self.sugars.push(sugar);
        self.update(hi);
        Ok(())
    }

    fn update(&mut self, h: usize) {
        let lh = self.lm(h).clone();
        let candidates: Vec<usize> = self.active.clone();
        let lcms: Vec<Monomial> = candidates.iter().map(|&g| lh.lcm(self.lm(g))).collect();
        let mut kept: Vec<usize> = Vec::new();
        for (idx, &g1) in candidates.iter().enumerate() {
            let l1 = &lcms[idx];
            let coprime = lh.is_coprime(self.lm(g1));
            let dominated = || {
                lcms[idx + 1..].iter().any(|l2| l2.divides(l1))
                    || kept.iter().any(|&k| {
                        let pos = candidates.iter().position(|&c| c == k).unwrap();
                        lcms[pos].divides(l1)
                    })
            };
            if coprime || !dominated() {
                kept.push(g1);
            }
        }
        let new_pairs: Vec<Pair> = kept
            .into_iter()
            .filter(|&g| !lh.is_coprime(self.lm(g)))
            .map(|g| {
                let lcm = lh.lcm(self.lm(g));
                let sugar = (self.sugars[g] + lcm.degree() - self.lm(g).degree())
                    .max(self.sugars[h] + lcm.degree() - lh.degree());
                Pair { i: g, j: h, lcm, sugar }
            })
            .collect();

        let old = std::mem::take(&mut self.pairs);
        for p in old {
            let drop = lh.divides(&p.lcm)
                && lh.lcm(self.lm(p.i)) != p.lcm
                && lh.lcm(self.lm(p.j)) != p.lcm;
            if !drop {
                self.pairs.push(p);
            }
        }
        self.pairs.extend(new_pairs);

        let lh_ref = &lh;
        let polys = &self.polys;
        self.active.retain(|&g| !lh_ref.divides(&polys[g][0].0));
        self.active.push(h);
    }

    fn next_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let best = (0..self.pairs.len())
            .min_by(|&a, &b| {
                let pa = &self.pairs[a];
                let pb = &self.pairs[b];
                pa.sugar
                    .cmp(&pb.sugar)
                    .then_with(|| self.order.cmp(&pa.lcm, &pb.lcm))
                    .then(pa.i.cmp(&pb.i))
                    .then(pa.j.cmp(&pb.j))
            })
            .unwrap();
        Some(self.pairs.swap_remove(best))
    }

    fn s_poly(&self, p: &Pair) -> Vec<Term> {
        let f = &self.polys[p.i];
        let g = &self.polys[p.j];
        let mf = f[0].0.quotient_of(&p.lcm);
        let mg = g[0].0.quotient_of(&p.lcm);
        let one = f[0].1.field().one();
        let fm: Vec<Term> = f.iter().map(|(m, c)| (m.mul(&mf), c.clone())).collect();
        sub_scaled(&fm, g, &mg, &one, self.order)
    }
}

/// Reduced Gröbner basis of an ideal for a fixed monomial order.
#[derive(Debug, Clone)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    order: MonomialOrder,
    polys: Vec<Poly>,
    sorted: Vec<Vec<Term>>,
}

impl GroebnerBasis {
    /// Buchberger's algorithm under the thread's current [`Budget`].
    pub fn compute(ring: &Arc<PolyRing>, gens: &[Poly], order: &MonomialOrder) -> Result<GroebnerBasis> {
        let budget = current_budget();
        let mut engine = Engine {
            order,
            polys: Vec::new(),
            sugars: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            steps: Steps { used: 0, limit: budget.max_steps },
            budget,
        };
        for g in gens {
            if !super::poly::same_ring(g.ring(), ring) {
                return Err(Error::RingMismatch("generator outside the ambient ring".into()));
            }
            let mut t: Vec<Term> = g.terms().to_vec();
            sort_terms(&mut t, order);
            let mut sugar = g.total_degree();
            let r = engine.reduce(t, &mut sugar)?;
            if r.is_empty() {
                continue;
            }
            if r[0].0.is_one() {
                return Ok(GroebnerBasis::unit(ring, order));
            }
            engine.insert(r, sugar)?;
        }
        while let Some(pair) = engine.next_pair() {
            let s = engine.s_poly(&pair);
            let mut sugar = pair.sugar;
            let r = engine.reduce(s, &mut sugar)?;
            if r.is_empty() {
                continue;
            }
            if r[0].0.is_one() {
                return Ok(GroebnerBasis::unit(ring, order));
            }
            engine.insert(r, sugar)?;
        }

        // interreduce the minimal basis
        let active = engine.active.clone();
        let mut reduced: Vec<Vec<Term>> = Vec::with_capacity(active.len());
        for (k, &g) in active.iter().enumerate() {
            let others: Vec<&[Term]> =
                active.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &h)| engine.polys[h].as_slice()).collect();
            let p = engine.polys[g].clone();
            let head = p[0].clone();
            let tail = reduce_terms(p[1..].to_vec(), &others, order, &mut engine.steps, true, None)?;
            let mut full = vec![head];
            full.extend(tail);
            make_monic(&mut full);
            reduced.push(full);
        }
        reduced.sort_by(|a, b| order.cmp(&a[0].0, &b[0].0));
        let polys = reduced.iter().map(|t| Poly::from_sorted_under(ring, t.clone(), order)).collect();
        Ok(GroebnerBasis { ring: ring.clone(), order: order.clone(), polys, sorted: reduced })
    }

    fn unit(ring: &Arc<PolyRing>, order: &MonomialOrder) -> GroebnerBasis {
        let one = Poly::one(ring);
        GroebnerBasis {
            ring: ring.clone(),
            order: order.clone(),
            sorted: vec![one.terms().to_vec()],
            polys: vec![one],
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    /// Basis elements, monic, sorted ascending by leading monomial.
    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.sorted.iter().map(|t| t[0].0.clone()).collect()
    }

    pub fn is_unit(&self) -> bool {
        self.sorted.len() == 1 && self.sorted[0][0].0.is_one()
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Unique remainder of `f` modulo the basis.
    pub fn normal_form(&self, f: &Poly) -> Result<Poly> {
        if !super::poly::same_ring(f.ring(), &self.ring) {
            return Err(Error::RingMismatch(format!(
                "normal form of a polynomial over {:?} modulo an ideal of {:?}",
                f.ring().names(),
                self.ring.names()
            )));
        }
        let mut t = f.terms().to_vec();
        sort_terms(&mut t, &self.order);
        let reducers: Vec<&[Term]> = self.sorted.iter().map(|v| v.as_slice()).collect();
        let mut steps = Steps { used: 0, limit: current_budget().max_steps };
        let r = reduce_terms(t, &reducers, &self.order, &mut steps, true, None)?;
        Ok(Poly::from_sorted_under(&self.ring, r, &self.order))
    }

    pub fn contains(&self, f: &Poly) -> Result<bool> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// Monomials outside the initial ideal, when there are finitely many and
    /// at most `limit` of them.
    pub fn standard_monomials(&self, limit: usize) -> Option<Vec<Monomial>> {
        let n = self.ring.nvars();
        let lms = self.leading_monomials();
        let bounds = (0..n)
            .map(|v| lms.iter().filter(|&m| m.pure_power_of() == Some(v)).map(|m| m.exponents()[v]).min())
            .collect::<Option<Vec<u32>>>()?;
        let mut out = Vec::new();
        let mut exps = vec![0u32; n];
        fn rec(
            v: usize,
            exps: &mut Vec<u32>,
            bounds: &[u32],
            lms: &[Monomial],
            out: &mut Vec<Monomial>,
            limit: usize,
        ) -> bool {
            if v == exps.len() {
                let m = Monomial::from_exponents(exps.clone());
                if !lms.iter().any(|l| l.divides(&m)) {
                    if out.len() >= limit {
                        return false;
                    }
                    out.push(m);
                }
                return true;
            }
            for e in 0..bounds[v] {
                exps[v] = e;
                if !rec(v + 1, exps, bounds, lms, out, limit) {
                    return false;
                }
            }
            exps[v] = 0;
            true
        }
        if !rec(0, &mut exps, &bounds, &lms, &mut out, limit) {
            return None;
        }
        let ord = &self.order;
        out.sort_by(|a, b| ord.cmp(a, b));
        Some(out)
    }
}
