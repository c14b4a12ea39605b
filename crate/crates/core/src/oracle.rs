//! Brute-force cross-checks over small prime fields, independent of the
//! elimination machinery: point enumeration, fiber lengths and
//! degree-truncated subalgebra membership.

use std::collections::HashMap;
use std::sync::Arc;

use log::info;

use crate::cas::scalar::is_prime;
use crate::cas::{Field, Ideal, Monomial, Poly, Scalar};
use crate::error::{Error, Result};
use crate::rings::{FpAlgebra, RingMap};

/// Largest prime and generator count accepted by [`enumerate_points`].
pub const MAX_PRIME: u32 = 257;
pub const MAX_GENERATORS: usize = 4;
/// Cap on the number of partial assignments visited during enumeration.
pub const VISIT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSample {
    pub p: u32,
    /// Generator values, each in `[0, p)`.
    pub points: Vec<Vec<u32>>,
}

/// Relation compiled for fast evaluation mod `p`.
struct ModPoly {
    terms: Vec<(Vec<u32>, u64)>,
    /// highest variable index with a positive exponent, or `None` for constants
    last_var: Option<usize>,
}

impl ModPoly {
    fn compile(f: &Poly, p: u32) -> Option<ModPoly> {
        let field = Field::prime(p)?;
        let mut terms = Vec::new();
        let mut last_var = None;
        for (m, c) in f.terms() {
            let c = match c {
                Scalar::Rational(q) => field.from_rational(q)?,
                other => other.clone(),
            };
            let Scalar::Modular { value, .. } = c else { return None };
            let e = m.exponents().to_vec();
            if let Some(v) = e.iter().rposition(|&x| x > 0) {
                last_var = last_var.max(Some(v));
            }
            terms.push((e, value as u64));
        }
        Some(ModPoly { terms, last_var })
    }

    fn eval(&self, point: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = t * point[v] % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }
}

/// All `GF(p)`-points of `A`. `Ok(None)` when `p` divides a denominator in
/// the relations (the caller skips that prime).
pub fn enumerate_points(a: &FpAlgebra, p: u32) -> Result<Option<PointSample>> {
    if !is_prime(p) || p > MAX_PRIME {
        return Err(Error::Invalid(format!("point enumeration needs a prime p <= {MAX_PRIME}, got {p}")));
    }
    let n = a.ngens();
    if n > MAX_GENERATORS {
        return Err(Error::Undecided(format!("point enumeration is limited to {MAX_GENERATORS} generators, got {n}")));
    }
    let mut rels = Vec::new();
    for g in a.relations().generators() {
        match ModPoly::compile(g, p) {
            Some(m) => rels.push(m),
            None => {
                info!("skipping p = {p}: it divides a denominator of {g}");
                return Ok(None);
            }
        }
    }
    // a relation is checked as soon as all its variables are assigned
    let mut by_level: Vec<Vec<&ModPoly>> = vec![Vec::new(); n + 1];
    for r in &rels {
        match r.last_var {
            Some(v) => by_level[v + 1].push(r),
            None => by_level[0].push(r),
        }
    }
    let pp = p as u64;
    if by_level[0].iter().any(|r| r.eval(&[], pp) != 0) {
        return Ok(Some(PointSample { p, points: Vec::new() }));
    }
    let mut points = Vec::new();
    let mut point = vec![0u64; n];
    let mut visits = 0u64;
    fn rec(
        level: usize,
        point: &mut Vec<u64>,
        by_level: &[Vec<&ModPoly>],
        pp: u64,
        visits: &mut u64,
        out: &mut Vec<Vec<u32>>,
    ) -> Result<()> {
        if level == point.len() {
            out.push(point.iter().map(|&x| x as u32).collect());
            return Ok(());
        }
        for x in 0..pp {
            *visits += 1;
            if *visits > VISIT_BUDGET {
                return Err(Error::Undecided(format!("point enumeration exceeded {VISIT_BUDGET} visits")));
            }
            point[level] = x;
            if by_level[level + 1].iter().all(|r| r.eval(point, pp) == 0) {
                rec(level + 1, point, by_level, pp, visits, out)?;
            }
        }
        point[level] = 0;
        Ok(())
    }
    rec(0, &mut point, &by_level, pp, &mut visits, &mut points)?;
    Ok(Some(PointSample { p, points }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fiber {
    Length(usize),
    /// The fiber has positive dimension.
    Infinite,
}

/// `dim_{GF(p)} T ⊗_S κ(a)` for a `GF(p)`-point `a` of the source, computed
/// by counting standard monomials of `J_T + (φ_i - a_i)` mod `p`.
/// `Ok(None)` when `p` divides a denominator.
pub fn fiber_length(phi: &RingMap, point: &[u32], p: u32) -> Result<Option<Fiber>> {
    if point.len() != phi.source().ngens() {
        return Err(Error::Invalid(format!(
            "point has {} coordinates, source has {} generators",
            point.len(),
            phi.source().ngens()
        )));
    }
    let Some(target) = phi.target().reduce_mod(p)? else {
        info!("skipping p = {p}: it divides a denominator of the target relations");
        return Ok(None);
    };
    let field = target.field();
    let mut gens: Vec<Poly> = target.relations().generators().to_vec();
    for (img, &a) in phi.images().iter().zip(point) {
        let Some(img) = img.reduce_mod(target.ring()) else {
            info!("skipping p = {p}: it divides a denominator of {img}");
            return Ok(None);
        };
        gens.push(&img - &Poly::constant(target.ring(), field.from_i64(a as i64)));
    }
    let fiber = Ideal::new(target.ring(), gens)?;
    let gb = fiber.default_basis()?;
    if gb.is_unit() {
        return Ok(Some(Fiber::Length(0)));
    }
    Ok(Some(match gb.standard_monomials(100_000) {
        Some(ms) => Fiber::Length(ms.len()),
        None => Fiber::Infinite,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Yes,
    NoWithinBound,
}

/// Whether `f` is, modulo the relations of `ambient` reduced mod `p`, a
/// linear combination of products of `generators` of total degree at most
/// `bound`. `Ok(None)` when `p` divides a denominator.
pub fn truncated_membership(
    ambient: &FpAlgebra,
    f: &Poly,
    generators: &[Poly],
    bound: u32,
    p: u32,
) -> Result<Option<Membership>> {
    let Some(amb) = ambient.reduce_mod(p)? else {
        info!("skipping p = {p}: it divides a denominator of the ambient relations");
        return Ok(None);
    };
    let amb = Arc::new(amb);
    let ring = amb.ring().clone();
    let mut gens = Vec::new();
    for g in generators {
        match g.reduce_mod(&ring) {
            Some(x) => gens.push(x),
            None => {
                info!("skipping p = {p}: it divides a denominator of {g}");
                return Ok(None);
            }
        }
    }
    let Some(f) = f.reduce_mod(&ring) else {
        info!("skipping p = {p}: it divides a denominator of {f}");
        return Ok(None);
    };
    let m = gens.len();
    let max_products = 200_000usize;
    // all exponent vectors of total degree <= bound, built degree by degree
    let mut products: Vec<Poly> = vec![amb.one()];
    let mut frontier: Vec<(Vec<u32>, Poly)> = vec![(vec![0; m], amb.one())];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (e, prod) in &frontier {
            // extend only at or after the last used generator to avoid repeats
            let start = e.iter().rposition(|&x| x > 0).unwrap_or(0);
            for (i, g) in gens.iter().enumerate().skip(start) {
                let mut e2 = e.clone();
                e2[i] += 1;
                let p2 = amb.reduce(&(prod * g))?;
                products.push(p2.clone());
                next.push((e2, p2));
                if products.len() > max_products {
                    return Err(Error::Undecided(format!("truncated membership exceeded {max_products} products")));
                }
            }
        }
        frontier = next;
    }
    let target = amb.reduce(&f)?;
    Ok(Some(if in_span(&products, &target, p) { Membership::Yes } else { Membership::NoWithinBound }))
}

/// Gaussian elimination over `GF(p)` on coefficient vectors.
fn in_span(vectors: &[Poly], f: &Poly, p: u32) -> bool {
    let pp = p as u64;
    let mut index: HashMap<Monomial, usize> = HashMap::new();
    let to_row = |poly: &Poly, index: &mut HashMap<Monomial, usize>| -> HashMap<usize, u64> {
        let mut row = HashMap::new();
        for (m, c) in poly.terms() {
            let len = index.len();
            let k = *index.entry(m.clone()).or_insert(len);
            if let Scalar::Modular { value, .. } = c {
                row.insert(k, *value as u64);
            }
        }
        row
    };
    // echelon form keyed by pivot column
    let mut pivots: HashMap<usize, HashMap<usize, u64>> = HashMap::new();
    let reduce = |mut row: HashMap<usize, u64>, pivots: &HashMap<usize, HashMap<usize, u64>>| {
        loop {
            let Some(col) = row.keys().copied().filter(|c| pivots.contains_key(c)).min() else { return row };
            let factor = row[&col];
            for (&c, &v) in &pivots[&col] {
                let cur = row.get(&c).copied().unwrap_or(0);
                let nv = (cur + pp - factor * v % pp) % pp;
                if nv == 0 {
                    row.remove(&c);
                } else {
                    row.insert(c, nv);
                }
            }
        }
    };
    for v in vectors {
        let row = reduce(to_row(v, &mut index), &pivots);
        if let Some(&col) = row.keys().min() {
            let inv = crate::cas::scalar::mod_inverse(row[&col] as u32, p) as u64;
            let normalized: HashMap<usize, u64> = row.into_iter().map(|(c, x)| (c, x * inv % pp)).collect();
            pivots.insert(col, normalized);
        }
    }
    reduce(to_row(f, &mut index), &pivots).is_empty()
}
