use std::fmt;
use std::sync::Arc;

use crate::cas::poly::{fresh_name, same_ring};
use crate::cas::{Field, GroebnerBasis, Ideal, MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};

use super::ringmap::RingMap;

/// A finitely presented algebra `k[generators] / relations`.
///
/// Elements are represented by polynomials in the generator ring; two
/// polynomials denote the same element when their difference reduces to 0.
#[derive(Clone)]
pub struct FpAlgebra {
    ring: Arc<PolyRing>,
    relations: Ideal,
}

impl fmt::Debug for FpAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FpAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.ring.field(), self.ring.names().join(", "))?;
        if !self.relations.generators().is_empty() {
            write!(f, " / {}", self.relations)?;
        }
        Ok(())
    }
}

impl FpAlgebra {
    pub fn new(ring: &Arc<PolyRing>, relations: Vec<Poly>) -> Result<FpAlgebra> {
        Ok(FpAlgebra { ring: ring.clone(), relations: Ideal::new(ring, relations)? })
    }

    pub fn from_ideal(relations: Ideal) -> FpAlgebra {
        FpAlgebra { ring: relations.ring().clone(), relations }
    }

    /// The polynomial ring `k[names]`.
    pub fn polynomial<S: AsRef<str>>(field: Field, names: &[S]) -> FpAlgebra {
        let ring = PolyRing::new(field, names);
        FpAlgebra { relations: Ideal::zero(&ring), ring }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn relations(&self) -> &Ideal {
        &self.relations
    }

    pub fn field(&self) -> Field {
        self.ring.field()
    }

    pub fn names(&self) -> &[String] {
        self.ring.names()
    }

    pub fn ngens(&self) -> usize {
        self.ring.nvars()
    }

    pub fn generator(&self, i: usize) -> Poly {
        Poly::var(&self.ring, i)
    }

    pub fn generators(&self) -> Vec<Poly> {
        (0..self.ngens()).map(|i| self.generator(i)).collect()
    }

    pub fn one(&self) -> Poly {
        Poly::one(&self.ring)
    }

    pub fn basis(&self) -> Result<Arc<GroebnerBasis>> {
        self.relations.default_basis()
    }

    /// Canonical representative (grevlex normal form).
    pub fn reduce(&self, f: &Poly) -> Result<Poly> {
        self.relations.reduce(f)
    }

    pub fn is_zero(&self, f: &Poly) -> Result<bool> {
        self.relations.contains(f)
    }

    pub fn equal(&self, f: &Poly, g: &Poly) -> Result<bool> {
        self.is_zero(&f.try_sub(g)?)
    }

    pub fn is_zero_ring(&self) -> Result<bool> {
        self.relations.is_unit()
    }

    /// Same presentation, i.e. same generator names and equal relation ideals.
    pub fn same_presentation(&self, other: &FpAlgebra) -> Result<bool> {
        if !same_ring(&self.ring, &other.ring) {
            return Ok(false);
        }
        self.relations.equals(&other.relations)
    }

    /// The ideal of this algebra generated by `gens`, as an ideal of the
    /// presentation ring (relations included).
    pub fn ideal(&self, gens: &[Poly]) -> Result<Ideal> {
        self.relations.with_generators(gens)
    }

    /// Inverse of `f` when it is a unit, computed from `J + (f·z - 1)` with
    /// `z` eliminated first.
    pub fn unit_inverse(&self, f: &Poly) -> Result<Option<Poly>> {
        if self.is_zero_ring()? {
            return Ok(Some(Poly::zero(&self.ring)));
        }
        if let Some(c) = self.reduce(f)?.constant_value() {
            return Ok((!c.is_zero()).then(|| Poly::constant(&self.ring, c.inv())));
        }
        let n = self.ngens();
        let mut names = vec![self.ring.fresh_name("z")];
        names.extend(self.names().iter().cloned());
        let zring = PolyRing::new(self.field(), &names);
        let shift: Vec<usize> = (1..=n).collect();
        let z = Poly::var(&zring, 0);
        let mut gens: Vec<Poly> = self.basis()?.polys().iter().map(|g| g.map_vars(&zring, &shift)).collect();
        gens.push(&(&f.map_vars(&zring, &shift) * &z) - &Poly::one(&zring));
        let gb = GroebnerBasis::compute(&zring, &gens, &MonomialOrder::Block { split: 1 })?;
        for (g, lt) in gb.polys().iter().zip(gb.leading_monomials()) {
            let is_z = lt.pure_power_of() == Some(0) && lt.exponents()[0] == 1;
            if is_z && g.degree_in(0) == 1 && g.coefficient_of_power(0, 1).is_constant() {
                let rest = &g.coefficient_of_power(0, 0).neg();
                let h = rest.restrict_to(&self.ring, &shift);
                return Ok(Some(self.reduce(&h)?));
            }
        }
        Ok(None)
    }

    /// `A_f = A[w] / (f·w - 1)` and the canonical map `A -> A_f`.
    pub fn localize(self: &Arc<Self>, f: &Poly) -> Result<(Arc<FpAlgebra>, RingMap)> {
        if self.is_zero(f)? {
            return Err(Error::Invalid(format!("cannot localize at {f}: it is zero in {self}")));
        }
        let n = self.ngens();
        let mut names = self.names().to_vec();
        names.push(self.ring.fresh_name("w"));
        let ring = PolyRing::new(self.field(), &names);
        let embed: Vec<usize> = (0..n).collect();
        let mut rels: Vec<Poly> = self.relations.generators().iter().map(|g| g.map_vars(&ring, &embed)).collect();
        let w = Poly::var(&ring, n);
        rels.push(&(&f.map_vars(&ring, &embed) * &w) - &Poly::one(&ring));
        let loc = Arc::new(FpAlgebra::new(&ring, rels)?);
        let images = (0..n).map(|i| Poly::var(&ring, i)).collect();
        let map = RingMap::new(self.clone(), loc.clone(), images)?;
        Ok((loc, map))
    }

    /// `A ⊗_k B`. Clashing names get suffix `_0` on the `A` side and `_1` on the
    /// `B` side; the `A` generators come first.
    pub fn tensor(a: &Arc<FpAlgebra>, b: &Arc<FpAlgebra>) -> Result<Tensor> {
        let base = Arc::new(FpAlgebra::polynomial::<&str>(a.field(), &[]));
        let ea = RingMap::new(base.clone(), a.clone(), vec![])?;
        let eb = RingMap::new(base, b.clone(), vec![])?;
        FpAlgebra::tensor_over(&ea, &eb)
    }

    /// `A ⊗_R B` for structure maps `alpha: R -> A` and `beta: R -> B`.
    ///
    /// When `R` is a polynomial ring and both maps send its generators to
    /// distinct generators, those generators are merged (keeping the names of
    /// `R`, placed first). Otherwise the identification relations
    /// `alpha(r) - beta(r)` are added.
    pub fn tensor_over(alpha: &RingMap, beta: &RingMap) -> Result<Tensor> {
        let (a, b, base) = (alpha.target(), beta.target(), alpha.source());
        if !Arc::ptr_eq(base, beta.source()) && !base.same_presentation(beta.source())? {
            return Err(Error::RingMismatch("tensor_over: structure maps have different sources".into()));
        }
        if a.field() != b.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", a.field(), b.field())));
        }
        let merge_a = variable_targets(alpha, base)?;
        let merge_b = variable_targets(beta, base)?;
        let merged = match (merge_a, merge_b) {
            (Some(ma), Some(mb)) => Some((ma, mb)),
            _ => None,
        };
        let nb = base.ngens();
        let mut names: Vec<String> = Vec::new();
        let (mut a_pos, mut b_pos) = (vec![usize::MAX; a.ngens()], vec![usize::MAX; b.ngens()]);
        if let Some((ma, mb)) = &merged {
            for r in 0..nb {
                a_pos[ma[r]] = names.len();
                b_pos[mb[r]] = names.len();
                names.push(base.names()[r].clone());
            }
        }
        let a_rest: Vec<usize> = (0..a.ngens()).filter(|&i| a_pos[i] == usize::MAX).collect();
        let b_rest: Vec<usize> = (0..b.ngens()).filter(|&i| b_pos[i] == usize::MAX).collect();
        let a_names: Vec<&String> = a_rest.iter().map(|&i| &a.names()[i]).collect();
        let b_names: Vec<&String> = b_rest.iter().map(|&i| &b.names()[i]).collect();
        let clash = |n: &String, others: &[&String]| others.contains(&n) || names.contains(n);
        let mut a_final = Vec::new();
        for n in &a_names {
            a_final.push(if clash(n, &b_names) { copy_name(n, 0) } else { (*n).clone() });
        }
        let mut b_final = Vec::new();
        for n in &b_names {
            b_final.push(if clash(n, &a_names) { copy_name(n, 1) } else { (*n).clone() });
        }
        for (k, &i) in a_rest.iter().enumerate() {
            a_pos[i] = names.len();
            let n = fresh_name(&names, &a_final[k]);
            names.push(n);
        }
        for (k, &i) in b_rest.iter().enumerate() {
            b_pos[i] = names.len();
            let n = fresh_name(&names, &b_final[k]);
            names.push(n);
        }
        let ring = PolyRing::new(a.field(), &names);
        let mut rels: Vec<Poly> = Vec::new();
        rels.extend(a.relations().generators().iter().map(|g| g.map_vars(&ring, &a_pos)));
        rels.extend(b.relations().generators().iter().map(|g| g.map_vars(&ring, &b_pos)));
        if merged.is_none() {
            for r in 0..nb {
                let ia = alpha.images()[r].map_vars(&ring, &a_pos);
                let ib = beta.images()[r].map_vars(&ring, &b_pos);
                rels.push(&ia - &ib);
            }
        }
        let algebra = Arc::new(FpAlgebra::new(&ring, rels)?);
        let left = RingMap::new(a.clone(), algebra.clone(), a_pos.iter().map(|&p| Poly::var(&ring, p)).collect())?;
        let right = RingMap::new(b.clone(), algebra.clone(), b_pos.iter().map(|&p| Poly::var(&ring, p)).collect())?;
        Ok(Tensor { algebra, left, right })
    }

    /// Removes generators that the relations express linearly in the others,
    /// then renames a survivor `name0`/`name1` back to `name` when its sibling
    /// was removed. Returns the new algebra with mutually inverse maps.
    pub fn simplify(self: &Arc<Self>) -> Result<Simplified> {
        let mut current: Arc<FpAlgebra> = self.clone();
        // images of the original generators in `current`
        let mut forward: Vec<Poly> = self.generators();
        // images of the `current` generators in the original algebra
        let mut backward_idx: Vec<usize> = (0..self.ngens()).collect();
        let mut eliminated: Vec<String> = Vec::new();
        loop {
            let gb = current.basis()?;
            let mut pick = None;
            for g in gb.polys() {
                let lm = &g.terms()[0].0;
                if lm.degree() == 1 {
                    let v = lm.pure_power_of().unwrap();
                    pick = Some((v, g.clone()));
                    break;
                }
            }
            let Some((v, g)) = pick else { break };
            // g = v - h, with h free of v
            let h = &Poly::var(current.ring(), v) - &g;
            let n = current.ngens();
            let keep: Vec<usize> = (0..n).filter(|&i| i != v).collect();
            let names: Vec<String> = keep.iter().map(|&i| current.names()[i].clone()).collect();
            let ring = PolyRing::new(current.field(), &names);
            let mut images: Vec<Poly> = Vec::with_capacity(n);
            let mut k = 0;
            for i in 0..n {
                if i == v {
                    images.push(Poly::zero(&ring));
                } else {
                    images.push(Poly::var(&ring, k));
                    k += 1;
                }
            }
            let hv = h.substitute(&ring, &images)?;
            images[v] = hv;
            let rels: Vec<Poly> =
                gb.polys().iter().map(|p| p.substitute(&ring, &images)).collect::<Result<Vec<_>>>()?;
            let next = Arc::new(FpAlgebra::new(&ring, rels)?);
            forward = forward.iter().map(|f| f.substitute(&ring, &images)).collect::<Result<Vec<_>>>()?;
            eliminated.push(current.names()[v].clone());
            backward_idx = keep.iter().map(|&i| backward_idx[i]).collect();
            current = next;
        }
        // restore base names for surviving halves of split pairs
        let mut names = current.names().to_vec();
        for i in 0..names.len() {
            let Some((base, k)) = split_copy_name(&names[i]) else { continue };
            let sibling = copy_name(base, 1 - k);
            let unique = !names.iter().any(|m| m == base) && !self.names().iter().any(|m| m == base);
            if eliminated.contains(&sibling) && unique {
                names[i] = base.to_string();
            }
        }
        let ring = PolyRing::new(current.field(), &names);
        let rels: Vec<Poly> = current.relations().generators().iter().map(|g| g.with_ring(&ring)).collect();
        let out = Arc::new(FpAlgebra::new(&ring, rels)?);
        let forward: Vec<Poly> = forward.iter().map(|f| out.reduce(&f.with_ring(&ring))).collect::<Result<_>>()?;
        let to = RingMap::new(self.clone(), out.clone(), forward)?;
        let backward: Vec<Poly> = backward_idx.iter().map(|&i| self.generator(i)).collect();
        let from = RingMap::new(out.clone(), self.clone(), backward)?;
        Ok(Simplified { algebra: out, to, from })
    }

    /// The same algebra over `GF(p)`; `None` if `p` divides a denominator of
    /// a relation.
    pub fn reduce_mod(&self, p: u32) -> Result<Option<FpAlgebra>> {
        let field = Field::prime(p).ok_or_else(|| Error::Invalid(format!("{p} is not a usable prime")))?;
        let ring = self.ring.with_field(field);
        let mut rels = Vec::new();
        for g in self.relations.generators() {
            match g.reduce_mod(&ring) {
                Some(r) => rels.push(r),
                None => return Ok(None),
            }
        }
        Ok(Some(FpAlgebra::new(&ring, rels)?))
    }
}

/// For a map out of a polynomial ring sending generators to distinct
/// generators of the target, the target indices.
fn variable_targets(map: &RingMap, base: &FpAlgebra) -> Result<Option<Vec<usize>>> {
    if !base.relations().generators().is_empty() {
        return Ok(None);
    }
    let mut out = Vec::new();
    for img in map.images() {
        let t = img.terms();
        if t.len() != 1 || !t[0].1.is_one() || t[0].0.degree() != 1 {
            return Ok(None);
        }
        let v = t[0].0.pure_power_of().unwrap();
        if out.contains(&v) {
            return Ok(None);
        }
        out.push(v);
    }
    Ok(Some(out))
}

/// Name of copy `k` of a generator that occurs on both sides of a tensor
/// product: `Z0`, `Z1`, or `e1_0`, `e1_1` when the name already ends in a digit.
fn copy_name(base: &str, k: u8) -> String {
    if base.ends_with(|c: char| c.is_ascii_digit()) {
        format!("{base}_{k}")
    } else {
        format!("{base}{k}")
    }
}

fn split_copy_name(name: &str) -> Option<(&str, u8)> {
    let k = match name.chars().last()? {
        '0' => 0,
        '1' => 1,
        _ => return None,
    };
    let stem = &name[..name.len() - 1];
    let base = match stem.strip_suffix('_') {
        Some(b) if b.ends_with(|c: char| c.is_ascii_digit()) => b,
        _ if stem.ends_with(|c: char| c.is_ascii_digit()) => return None,
        _ => stem,
    };
    (!base.is_empty()).then_some((base, k))
}

/// Result of [`FpAlgebra::tensor_over`]: the algebra and both coprojections.
#[derive(Debug, Clone)]
pub struct Tensor {
    pub algebra: Arc<FpAlgebra>,
    pub left: RingMap,
    pub right: RingMap,
}

/// Result of [`FpAlgebra::simplify`].
#[derive(Debug, Clone)]
pub struct Simplified {
    pub algebra: Arc<FpAlgebra>,
    /// original -> simplified
    pub to: RingMap,
    /// simplified -> original
    pub from: RingMap,
}
