use std::collections::HashSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::cas::poly::same_ring;
use crate::cas::{Ideal, Monomial, MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};

use super::algebra::FpAlgebra;
use super::module::PresentedModule;

/// Largest order tried when inverting an endomorphism by its powers.
const FINITE_ORDER_PROBE: usize = 6;

/// Homomorphism of finitely presented algebras, given by the images of the
/// source generators. Images are stored as target normal forms.
#[derive(Clone)]
pub struct RingMap {
    source: Arc<FpAlgebra>,
    target: Arc<FpAlgebra>,
    images: Vec<Poly>,
    graph: Arc<OnceLock<Graph>>,
}

/// `k[y, x] / (J_T(y), x_i - φ_i(y))`, with the target variables `y` first.
struct Graph {
    ring: Arc<PolyRing>,
    ideal: Ideal,
}

impl fmt::Debug for RingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (name, img)) in self.source.names().iter().zip(&self.images).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name} -> {img}")?;
        }
        write!(f, "}}")
    }
}

/// Factorisation `source -> C -> target` through the image.
#[derive(Debug, Clone)]
pub struct Image {
    pub algebra: Arc<FpAlgebra>,
    pub projection: RingMap,
    pub inclusion: RingMap,
}

/// Monic integral relations showing a target is a finite source-module.
#[derive(Debug, Clone)]
pub struct FiniteWitness {
    /// One relation per target generator, in the graph ring `k[y, x]`; its
    /// leading monomial is a pure power of that generator.
    pub relations: Vec<Poly>,
    /// Target monomials spanning the target as a source-module.
    pub module_generators: Vec<Poly>,
}

impl RingMap {
    pub fn new(source: Arc<FpAlgebra>, target: Arc<FpAlgebra>, images: Vec<Poly>) -> Result<RingMap> {
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(format!("{} vs {}", source.field(), target.field())));
        }
        if images.len() != source.ngens() {
            return Err(Error::IllDefined(format!(
                "{} images given for {} source generators",
                images.len(),
                source.ngens()
            )));
        }
        for img in &images {
            if !same_ring(img.ring(), target.ring()) {
                return Err(Error::RingMismatch(format!(
                    "image {img} is not written in the generators {:?}",
                    target.names()
                )));
            }
        }
        let images: Vec<Poly> = images.iter().map(|g| target.reduce(g)).collect::<Result<_>>()?;
        for rel in source.relations().generators() {
            let r = rel.substitute(target.ring(), &images)?;
            if !target.is_zero(&r)? {
                return Err(Error::IllDefined(format!("relation {rel} does not map to zero")));
            }
        }
        Ok(RingMap { source, target, images, graph: Arc::new(OnceLock::new()) })
    }

    pub fn identity(a: &Arc<FpAlgebra>) -> RingMap {
        RingMap { source: a.clone(), target: a.clone(), images: a.generators(), graph: Arc::new(OnceLock::new()) }
    }

    pub fn source(&self) -> &Arc<FpAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FpAlgebra> {
        &self.target
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    /// Image of a source element, as a target normal form.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        if !same_ring(f.ring(), self.source.ring()) {
            return Err(Error::RingMismatch(format!("{f} is not an element of {}", self.source)));
        }
        self.target.reduce(&f.substitute(self.target.ring(), &self.images)?)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &RingMap) -> Result<RingMap> {
        if !Arc::ptr_eq(&self.target, &next.source) && !self.target.same_presentation(&next.source)? {
            return Err(Error::RingMismatch("composing maps whose rings do not match".into()));
        }
        let images = self
            .images
            .iter()
            .map(|g| next.apply(&g.with_ring(next.source.ring())))
            .collect::<Result<Vec<_>>>()?;
        Ok(RingMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images,
            graph: Arc::new(OnceLock::new()),
        })
    }

    /// Same images (as elements of the target).
    pub fn agrees_with(&self, other: &RingMap) -> Result<bool> {
        if self.images.len() != other.images.len() || !same_ring(self.target.ring(), other.target.ring()) {
            return Ok(false);
        }
        for (a, b) in self.images.iter().zip(&other.images) {
            if !self.target.equal(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn ny(&self) -> usize {
        self.target.ngens()
    }

    fn graph(&self) -> &Graph {
        self.graph.get_or_init(|| {
            let (ny, nx) = (self.target.ngens(), self.source.ngens());
            let mut names: Vec<String> = self.target.names().to_vec();
            for n in self.source.names() {
                let fresh = crate::cas::poly::fresh_name(&names, n);
                names.push(fresh);
            }
            let ring = PolyRing::new(self.target.field(), &names);
            let ys: Vec<usize> = (0..ny).collect();
            let mut gens: Vec<Poly> =
                self.target.relations().generators().iter().map(|g| g.map_vars(&ring, &ys)).collect();
            for i in 0..nx {
                gens.push(&Poly::var(&ring, ny + i) - &self.images[i].map_vars(&ring, &ys));
            }
            let ideal = Ideal::new(&ring, gens).expect("graph generators live in the graph ring");
            Graph { ring, ideal }
        })
    }

    fn elimination_order(&self) -> MonomialOrder {
        MonomialOrder::Block { split: self.ny() }
    }

    fn source_vars(&self) -> Vec<usize> {
        (self.ny()..self.ny() + self.source.ngens()).collect()
    }

    /// `ker φ` as an ideal of the source presentation ring. It contains the
    /// source relations.
    pub fn kernel(&self) -> Result<Ideal> {
        let g = self.graph();
        let gb = g.ideal.groebner(&self.elimination_order())?;
        let ys: Vec<usize> = (0..self.ny()).collect();
        let xs = self.source_vars();
        let gens = gb
            .polys()
            .iter()
            .filter(|p| !p.involves_any(&ys))
            .map(|p| p.restrict_to(self.source.ring(), &xs))
            .collect();
        Ideal::new(self.source.ring(), gens)
    }

    /// A source element mapping to `f`, if there is one.
    pub fn preimage(&self, f: &Poly) -> Result<Option<Poly>> {
        if !same_ring(f.ring(), self.target.ring()) {
            return Err(Error::RingMismatch(format!("{f} is not an element of {}", self.target)));
        }
        let g = self.graph();
        let ys: Vec<usize> = (0..self.ny()).collect();
        let nf = g.ideal.normal_form(&f.map_vars(&g.ring, &ys), &self.elimination_order())?;
        if nf.involves_any(&ys) {
            return Ok(None);
        }
        let pre = nf.restrict_to(self.source.ring(), &self.source_vars());
        Ok(Some(self.source.reduce(&pre)?))
    }

    pub fn in_image(&self, f: &Poly) -> Result<bool> {
        Ok(self.preimage(f)?.is_some())
    }

    pub fn is_surjective(&self) -> Result<bool> {
        for y in self.target.generators() {
            if !self.in_image(&y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_injective(&self) -> Result<bool> {
        self.source.relations().contains_ideal(&self.kernel()?)
    }

    pub fn is_isomorphism(&self) -> Result<bool> {
        Ok(self.is_surjective()? && self.is_injective()?)
    }

    /// The inverse map when `self` is an isomorphism.
    pub fn inverse(&self) -> Result<Option<RingMap>> {
        // endomorphisms of small finite order invert without elimination
        if Arc::ptr_eq(&self.source, &self.target) {
            let id = RingMap::identity(&self.source);
            let mut power = self.clone();
            for _ in 1..FINITE_ORDER_PROBE {
                let next = power.then(self)?;
                if next.agrees_with(&id)? {
                    return Ok(Some(power));
                }
                power = next;
            }
        }
        if !self.is_injective()? {
            return Ok(None);
        }
        let mut images = Vec::new();
        for y in self.target.generators() {
            match self.preimage(&y)? {
                Some(p) => images.push(p),
                None => return Ok(None),
            }
        }
        RingMap::new(self.target.clone(), self.source.clone(), images).map(Some)
    }

    /// `C = source / ker φ` with the factorisation `source -> C -> target`.
    /// `C` keeps the source generator names.
    pub fn image(&self) -> Result<Image> {
        let algebra = Arc::new(FpAlgebra::from_ideal(self.kernel()?));
        let projection = RingMap::new(self.source.clone(), algebra.clone(), algebra.generators())?;
        let images = self.images.iter().map(|g| g.with_ring(self.target.ring())).collect();
        let inclusion = RingMap::new(algebra.clone(), self.target.clone(), images)?;
        Ok(Image { algebra, projection, inclusion })
    }

    /// Whether the two coprojections `T ⇉ T ⊗_S T` agree, which is the case
    /// exactly when `φ` is an epimorphism of rings.
    pub fn is_epimorphism(&self) -> Result<bool> {
        let ny = self.ny();
        let mut names: Vec<String> = self.target.names().iter().map(|n| format!("{n}'")).collect();
        for n in self.target.names() {
            let fresh = crate::cas::poly::fresh_name(&names, &format!("{n}''"));
            names.push(fresh);
        }
        let ring = PolyRing::new(self.target.field(), &names);
        let first: Vec<usize> = (0..ny).collect();
        let second: Vec<usize> = (ny..2 * ny).collect();
        let mut gens = Vec::new();
        for g in self.target.relations().generators() {
            gens.push(g.map_vars(&ring, &first));
            gens.push(g.map_vars(&ring, &second));
        }
        for img in &self.images {
            gens.push(&img.map_vars(&ring, &first) - &img.map_vars(&ring, &second));
        }
        let both = Ideal::new(&ring, gens)?;
        for j in 0..ny {
            if !both.contains(&(&Poly::var(&ring, j) - &Poly::var(&ring, ny + j)))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Searches the elimination basis of the graph for monic integral
    /// relations. `None` is inconclusive, not a proof of non-finiteness.
    pub fn module_finite_witness(&self) -> Result<Option<FiniteWitness>> {
        let ny = self.ny();
        let g = self.graph();
        let gb = g.ideal.groebner(&self.elimination_order())?;
        let lms = gb.leading_monomials();
        let mut relations = Vec::with_capacity(ny);
        for j in 0..ny {
            match gb.polys().iter().zip(&lms).find(|(_, m)| m.pure_power_of() == Some(j)) {
                Some((p, _)) => relations.push(p.clone()),
                None => return Ok(None),
            }
        }
        // target monomials not divisible by a leading monomial free of x
        let pure_y: Vec<Vec<u32>> = lms
            .iter()
            .filter(|m| m.exponents()[ny..].iter().all(|&e| e == 0))
            .map(|m| m.exponents()[..ny].to_vec())
            .collect();
        let bounds: Vec<u32> = (0..ny)
            .map(|j| pure_y.iter().filter(|e| e.iter().enumerate().all(|(i, &x)| i == j || x == 0)).map(|e| e[j]).min().unwrap())
            .collect();
        let mut monomials = Vec::new();
        let mut exps = vec![0u32; ny];
        loop {
            let divisible = pure_y.iter().any(|l| l.iter().zip(&exps).all(|(a, b)| a <= b));
            if !divisible {
                monomials.push(Poly::monomial(self.target.ring(), Monomial::from_exponents(exps.clone()), self.target.field().one()));
            }
            // odometer over the box of exponents
            let mut k = 0;
            loop {
                if k == ny {
                    monomials.sort_by(|a, b| {
                        MonomialOrder::GrevLex.cmp(&a.terms()[0].0, &b.terms()[0].0)
                    });
                    return Ok(Some(FiniteWitness { relations, module_generators: monomials }));
                }
                exps[k] += 1;
                if exps[k] < bounds[k] {
                    break;
                }
                exps[k] = 0;
                k += 1;
            }
        }
    }

    /// Presentation of the target as a module over the source on the given
    /// generators (default: the monomials of [`RingMap::module_finite_witness`]).
    ///
    /// Works in `k[y, s, x, t_1..t_n] / (J_T, x - φ(y), t_i - g_i·s)`. The
    /// relations among the `g_i` are the `t`-linear part of the ideal's
    /// intersection with `k[x, t]`; the constant part annihilates the module.
    pub fn module_presentation(&self, generators: Option<&[Poly]>) -> Result<PresentedModule> {
        let witness = self
            .module_finite_witness()?
            .ok_or_else(|| Error::Undecided(format!("no integral relations found for {}", self.target)))?;
        let gens: Vec<Poly> = match generators {
            Some(g) => g.iter().map(|p| self.target.reduce(p)).collect::<Result<_>>()?,
            None => witness.module_generators.clone(),
        };
        let (ny, nx, n) = (self.ny(), self.source.ngens(), gens.len());
        let mut names: Vec<String> = self.target.names().to_vec();
        let push = |names: &mut Vec<String>, base: &str| {
            let fresh = crate::cas::poly::fresh_name(names, base);
            names.push(fresh);
        };
        push(&mut names, "s");
        for x in self.source.names() {
            push(&mut names, x);
        }
        for i in 0..n {
            push(&mut names, &format!("t{i}"));
        }
        let ring = PolyRing::new(self.target.field(), &names);
        let ys: Vec<usize> = (0..ny).collect();
        let s = Poly::var(&ring, ny);
        let xs: Vec<usize> = (ny + 1..ny + 1 + nx).collect();
        let ts: Vec<usize> = (ny + 1 + nx..ny + 1 + nx + n).collect();
        let mut rels: Vec<Poly> = self.target.relations().generators().iter().map(|g| g.map_vars(&ring, &ys)).collect();
        for (&x, image) in xs.iter().zip(&self.images) {
            rels.push(&Poly::var(&ring, x) - &image.map_vars(&ring, &ys));
        }
        for i in 0..n {
            rels.push(&Poly::var(&ring, ts[i]) - &(&gens[i].map_vars(&ring, &ys) * &s));
        }
        let ideal = Ideal::new(&ring, rels)?;
        let order = MonomialOrder::Block { split: ny + 1 };
        let gb = ideal.groebner(&order)?;

        // the g_i span: 1 and y_j·g_i lie in their span
        let eliminated: Vec<usize> = (0..=ny).collect();
        let mut probes = vec![s.clone()];
        for j in 0..ny {
            for g in &gens {
                probes.push(&(&Poly::var(&ring, j) * &g.map_vars(&ring, &ys)) * &s);
            }
        }
        for p in probes {
            if gb.normal_form(&p)?.involves_any(&eliminated) {
                return Err(Error::Invalid(format!(
                    "the generators {gens:?} do not span {} over {}",
                    self.target, self.source
                )));
            }
        }

        let base = &self.source;
        let mut rows: HashSet<Vec<Poly>> = HashSet::new();
        let mut ordered_rows: Vec<Vec<Poly>> = Vec::new();
        let mut add_row = |row: Vec<Poly>| {
            if row.iter().all(|e| e.is_zero()) {
                return;
            }
            if rows.insert(row.clone()) {
                ordered_rows.push(row);
            }
        };
        for p in gb.polys() {
            if p.involves_any(&eliminated) {
                continue;
            }
            for (deg, comp) in p.components_by_degree_in(&ts) {
                match deg {
                    0 => {
                        let c = base.reduce(&comp.restrict_to(base.ring(), &xs))?;
                        if c.is_zero() {
                            continue;
                        }
                        for i in 0..n {
                            let mut row = vec![Poly::zero(base.ring()); n];
                            row[i] = c.clone();
                            add_row(row);
                        }
                    }
                    1 => {
                        let mut row = Vec::with_capacity(n);
                        for &t in &ts {
                            let coeff = comp.coefficient_of_power(t, 1);
                            let coeff = coeff.restrict_to(base.ring(), &xs);
                            row.push(base.reduce(&coeff)?);
                        }
                        add_row(row);
                    }
                    _ => {}
                }
            }
        }
        PresentedModule::new(self.source.clone(), gens, ordered_rows)
    }
}
