use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::cas::poly::same_ring;
use crate::cas::{Ideal, Poly};
use crate::error::{Error, Result};

use super::algebra::FpAlgebra;

/// A finitely presented module `base^n / rows`, with a label per generator.
#[derive(Clone)]
pub struct PresentedModule {
    base: Arc<FpAlgebra>,
    generators: Vec<Poly>,
    rows: Vec<Vec<Poly>>,
}

impl fmt::Debug for PresentedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PresentedModule(base {}, {} generators, rows {:?})", self.base, self.generators.len(), self.rows)
    }
}

impl PresentedModule {
    /// `generators` are labels only (e.g. the target elements they stand
    /// for); rows are reduced modulo the base relations.
    pub fn new(base: Arc<FpAlgebra>, generators: Vec<Poly>, rows: Vec<Vec<Poly>>) -> Result<PresentedModule> {
        let n = generators.len();
        let mut reduced = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != n {
                return Err(Error::Invalid(format!("relation row of length {} for {n} generators", row.len())));
            }
            let mut r = Vec::with_capacity(n);
            for e in &row {
                if !same_ring(e.ring(), base.ring()) {
                    return Err(Error::RingMismatch("matrix entry outside the base ring".into()));
                }
                r.push(base.reduce(e)?);
            }
            if r.iter().any(|e| !e.is_zero()) {
                reduced.push(r);
            }
        }
        Ok(PresentedModule { base, generators, rows: reduced })
    }

    /// `base^n`.
    pub fn free(base: Arc<FpAlgebra>, n: usize) -> PresentedModule {
        let generators = vec![base.one(); n];
        PresentedModule { base, generators, rows: Vec::new() }
    }

    pub fn base(&self) -> &Arc<FpAlgebra> {
        &self.base
    }

    pub fn generators(&self) -> &[Poly] {
        &self.generators
    }

    pub fn ngens(&self) -> usize {
        self.generators.len()
    }

    pub fn rows(&self) -> &[Vec<Poly>] {
        &self.rows
    }

    /// `Fitt_k`: the ideal of `(n - k)`-minors, together with the base
    /// relations. `Fitt_k = (1)` for `k >= n`.
    pub fn fitting_ideal(&self, k: usize) -> Result<Ideal> {
        let n = self.ngens();
        if k >= n {
            return self.base.ideal(&[self.base.one()]);
        }
        let size = n - k;
        if self.rows.len() < size {
            return Ok(self.base.relations().clone());
        }
        if self.rows.len() > 64 || n > 64 {
            return Err(Error::Undecided(format!("presentation matrix of {}x{n} is too large for minors", self.rows.len())));
        }
        let mut minors = Minors { rows: &self.rows, base: &self.base, memo: HashMap::new() };
        let mut gens = Vec::new();
        for rmask in subsets(self.rows.len(), size) {
            for cmask in subsets(n, size) {
                let d = minors.det(rmask, cmask)?;
                if !d.is_zero() && !gens.contains(&d) {
                    gens.push(d);
                }
            }
        }
        self.base.ideal(&gens)
    }

    /// `Fitt_0 ⊆ Fitt_1 ⊆ ... ⊆ Fitt_n = (1)`.
    pub fn fitting_ideals(&self) -> Result<Vec<Ideal>> {
        (0..=self.ngens()).map(|k| self.fitting_ideal(k)).collect()
    }

    /// Same module over `GF(p)`; `None` when `p` divides a denominator.
    pub fn reduce_mod(&self, p: u32) -> Result<Option<PresentedModule>> {
        let Some(base) = self.base.reduce_mod(p)? else { return Ok(None) };
        let base = Arc::new(base);
        let mut rows = Vec::new();
        for row in &self.rows {
            let mut r = Vec::new();
            for e in row {
                match e.reduce_mod(base.ring()) {
                    Some(x) => r.push(x),
                    None => return Ok(None),
                }
            }
            rows.push(r);
        }
        let mut gens = Vec::new();
        for g in &self.generators {
            match g.reduce_mod(&g.ring().with_field(base.field())) {
                Some(x) => gens.push(x),
                None => return Ok(None),
            }
        }
        PresentedModule::new(base, gens, rows).map(Some)
    }
}

/// Bitmasks of all `size`-subsets of `0..n`, in increasing order.
fn subsets(n: usize, size: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, acc | (1 << i), out);
        }
    }
    if size <= n {
        rec(0, n, size, 0, &mut out);
    }
    out
}

/// Laplace expansion along the first column, memoised on (rows, columns).
struct Minors<'a> {
    rows: &'a [Vec<Poly>],
    base: &'a FpAlgebra,
    memo: HashMap<(u64, u64), Poly>,
}

impl Minors<'_> {
    fn det(&mut self, rmask: u64, cmask: u64) -> Result<Poly> {
        if cmask == 0 {
            return Ok(self.base.one());
        }
        if let Some(d) = self.memo.get(&(rmask, cmask)) {
            return Ok(d.clone());
        }
        let col = cmask.trailing_zeros() as usize;
        let rest = cmask & !(1 << col);
        let mut acc = Poly::zero(self.base.ring());
        let mut sign = true;
        let mut bits = rmask;
        while bits != 0 {
            let r = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let e = &self.rows[r][col];
            if !e.is_zero() {
                let sub = self.det(rmask & !(1 << r), rest)?;
                if !sub.is_zero() {
                    let term = e * &sub;
                    acc = if sign { &acc + &term } else { &acc - &term };
                }
            }
            sign = !sign;
        }
        let acc = self.base.reduce(&acc)?;
        self.memo.insert((rmask, cmask), acc.clone());
        Ok(acc)
    }
}
