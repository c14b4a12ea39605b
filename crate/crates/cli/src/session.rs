//! Elaboration of a parsed manifest into rings, maps, schemes and points.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use separator_core::cas::{Field, Poly, PolyRing};
use separator_core::rings::{FpAlgebra, RingMap};
use separator_core::scheme::{build_twisted, structurally_prime, Assertions, PointRef, TwistSpec, TwoOpenScheme};
use thiserror::Error;

use crate::manifest::*;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{at}: {message}")]
pub struct ElabError {
    pub at: Pos,
    pub message: String,
}

fn fail<T>(at: Pos, message: impl Into<String>) -> Result<T, ElabError> {
    Err(ElabError { at, message: message.into() })
}

trait At<T> {
    fn at(self, at: Pos) -> Result<T, ElabError>;
}

impl<T> At<T> for separator_core::Result<T> {
    fn at(self, at: Pos) -> Result<T, ElabError> {
        self.map_err(|e| ElabError { at, message: e.to_string() })
    }
}

#[derive(Debug, Clone)]
pub struct MapEntry {
    pub map: RingMap,
    pub source: String,
}

#[derive(Debug, Clone)]
pub struct PointEntry {
    pub scheme: String,
    pub point: PointRef,
}

#[derive(Debug, Default)]
pub struct Session {
    pub field: Option<Field>,
    pub rings: BTreeMap<String, Arc<FpAlgebra>>,
    pub ring_assertions: BTreeMap<String, Assertions>,
    pub maps: BTreeMap<String, MapEntry>,
    pub schemes: BTreeMap<String, TwoOpenScheme>,
    pub points: BTreeMap<String, PointEntry>,
    declared: BTreeSet<String>,
    last_scheme: Option<String>,
}

/// Where an expression is read: the ring, and on the common open of a twist
/// the inverted elements with `w = 1/(f_1 ... f_k)`.
struct Scope<'a> {
    ring: &'a Arc<PolyRing>,
    label: &'a str,
    units: Option<(&'a [Poly], Poly)>,
}

fn eval(e: &Expr, s: &Scope) -> Result<Poly, ElabError> {
    Ok(match e {
        Expr::Num(n) => Poly::parse(s.ring, n).expect("digits parse as a constant"),
        Expr::Var(v, at) => match s.ring.index_of(v) {
            Some(i) => Poly::var(s.ring, i),
            None => return fail(*at, format!("`{v}` is not a generator of {}", s.label)),
        },
        Expr::Neg(a) => eval(a, s)?.neg(),
        Expr::Add(a, b) => &eval(a, s)? + &eval(b, s)?,
        Expr::Sub(a, b) => &eval(a, s)? - &eval(b, s)?,
        Expr::Mul(a, b) => &eval(a, s)? * &eval(b, s)?,
        Expr::Div(a, b, at) => match eval(b, s)?.constant_value() {
            Some(c) if !c.is_zero() => eval(a, s)?.scale(&c.inv()),
            _ => return fail(*at, "division is only by nonzero constants; use inv(...) for inverted elements"),
        },
        Expr::Pow(a, k) => eval(a, s)?.pow(*k),
        Expr::Inv(a, at) => {
            let Some((factors, w)) = &s.units else {
                return fail(*at, "inv(...) is only available in twist bodies, on the inverted elements");
            };
            let g = eval(a, s)?;
            invert(&g, factors, w).ok_or_else(|| ElabError {
                at: *at,
                message: format!("{g} is not a constant times a product of the inverted elements"),
            })?
        }
    })
}

/// `1/g` for `g = c f_1^{a_1} ... f_k^{a_k}`, using `1/f_i = w * prod_{j != i} f_j`.
fn invert(g: &Poly, factors: &[Poly], w: &Poly) -> Option<Poly> {
    let mut rest = g.clone();
    let mut exps = vec![0u32; factors.len()];
    'peel: while !rest.is_constant() {
        for (i, f) in factors.iter().enumerate() {
            if f.is_constant() {
                continue;
            }
            if let Some(q) = rest.exact_div(f) {
                rest = q;
                exps[i] += 1;
                continue 'peel;
            }
        }
        return None;
    }
    let c = rest.constant_value().filter(|c| !c.is_zero())?;
    let mut out = Poly::constant(w.ring(), c.inv());
    for (i, &k) in exps.iter().enumerate() {
        let mut inv_f = w.clone();
        for (j, f) in factors.iter().enumerate() {
            if j != i {
                inv_f = &inv_f * f;
            }
        }
        out = &out * &inv_f.pow(k);
    }
    Some(out)
}

fn lift(f: &Poly, ring: &Arc<PolyRing>) -> Poly {
    let idx: Vec<usize> = (0..f.ring().nvars()).collect();
    f.map_vars(ring, &idx)
}

impl Session {
    pub fn load(m: &Manifest) -> Result<Session, ElabError> {
        let mut s = Session::default();
        for item in &m.decls {
            s.declare(&item.node, item.at)?;
        }
        Ok(s)
    }

    fn declare(&mut self, d: &Decl, at: Pos) -> Result<(), ElabError> {
        if let Some(name) = d.name() {
            if !self.declared.insert(name.to_string()) {
                return fail(at, format!("`{name}` is already declared"));
            }
        }
        match d {
            Decl::Ring(r) => self.ring(r, at),
            Decl::Map(m) => self.map(m, at),
            Decl::Twist(t) => self.twist(t, at),
            Decl::Scheme(g) => self.glue(g, at),
            Decl::Point(p) => self.point(p, at),
            Decl::Assert(a) => self.assertion(a, at),
        }
    }

    pub fn ring_named(&self, name: &str, at: Pos) -> Result<&Arc<FpAlgebra>, ElabError> {
        self.rings.get(name).ok_or_else(|| ElabError { at, message: format!("no ring named `{name}`") })
    }

    pub fn map_named(&self, name: &str, at: Pos) -> Result<&MapEntry, ElabError> {
        self.maps.get(name).ok_or_else(|| ElabError { at, message: format!("no map named `{name}`") })
    }

    pub fn scheme_named(&self, name: &str, at: Pos) -> Result<&TwoOpenScheme, ElabError> {
        self.schemes.get(name).ok_or_else(|| ElabError { at, message: format!("no scheme named `{name}`") })
    }

    pub fn point_named(&self, name: &str, at: Pos) -> Result<&PointEntry, ElabError> {
        self.points.get(name).ok_or_else(|| ElabError { at, message: format!("no point named `{name}`") })
    }

    /// Connectedness of `Spec A`, from an assertion or visible primality.
    pub fn ring_connected(&self, name: &str) -> separator_core::Result<bool> {
        let a = self.ring_assertions.get(name).copied().unwrap_or_default();
        if a.integral || a.connected {
            return Ok(true);
        }
        structurally_prime(&self.rings[name])
    }

    fn ring(&mut self, r: &RingDecl, at: Pos) -> Result<(), ElabError> {
        let field = match r.field {
            FieldSpec::Rationals => Field::Rationals,
            FieldSpec::Prime(p) => match Field::prime(p) {
                Some(f) => f,
                None => return fail(at, format!("{p} is not a prime")),
            },
        };
        match self.field {
            Some(f) if f != field => return fail(at, format!("a manifest uses one coefficient field; {} differs", r.field)),
            _ => self.field = Some(field),
        }
        let mut seen = BTreeSet::new();
        if let Some(v) = r.vars.iter().find(|v| !seen.insert(v.as_str())) {
            return fail(at, format!("generator `{v}` is listed twice"));
        }
        let ring = PolyRing::new(field, &r.vars);
        let scope = Scope { ring: &ring, label: &r.name, units: None };
        let rels = r.relations.iter().map(|e| eval(e, &scope)).collect::<Result<Vec<_>, _>>()?;
        let a = FpAlgebra::new(&ring, rels).at(at)?;
        self.rings.insert(r.name.clone(), Arc::new(a));
        Ok(())
    }

    fn images(
        &self,
        source: &FpAlgebra,
        bindings: &[Binding],
        scope: &Scope,
        default_identity: bool,
        at: Pos,
    ) -> Result<Vec<Poly>, ElabError> {
        let mut images: Vec<Option<Poly>> = vec![None; source.ngens()];
        for b in bindings {
            let Some(i) = source.ring().index_of(&b.var) else {
                return fail(b.at, format!("`{}` is not a generator of the source", b.var));
            };
            if images[i].is_some() {
                return fail(b.at, format!("`{}` is given two images", b.var));
            }
            images[i] = Some(eval(&b.value, scope)?);
        }
        images
            .into_iter()
            .enumerate()
            .map(|(i, img)| match img {
                Some(p) => Ok(p),
                None if default_identity => Ok(Poly::var(scope.ring, i)),
                None => fail(at, format!("no image given for `{}`", source.names()[i])),
            })
            .collect()
    }

    fn map(&mut self, m: &MapDecl, at: Pos) -> Result<(), ElabError> {
        let src = self.ring_named(&m.source, at)?.clone();
        let tgt = self.ring_named(&m.target, at)?.clone();
        let scope = Scope { ring: tgt.ring(), label: &m.target, units: None };
        let images = self.images(&src, &m.images, &scope, false, at)?;
        let map = RingMap::new(src, tgt, images).at(at)?;
        self.maps.insert(m.name.clone(), MapEntry { map, source: m.source.clone() });
        Ok(())
    }

    fn twist(&mut self, t: &TwistDecl, at: Pos) -> Result<(), ElabError> {
        let a = self.ring_named(&t.chart, at)?.clone();
        let scope = Scope { ring: a.ring(), label: &t.chart, units: None };
        let invert = t.invert.iter().map(|e| eval(e, &scope)).collect::<Result<Vec<_>, _>>()?;
        let spec = TwistSpec::new(a.clone(), invert.clone()).at(at)?;
        let u0 = spec.overlap().clone();
        let factors: Vec<Poly> = invert.iter().map(|f| lift(f, u0.ring())).collect();
        let w = Poly::var(u0.ring(), u0.ngens() - 1);
        let label = format!("the common open of {}", t.name);
        let scope = Scope { ring: u0.ring(), label: &label, units: (!invert.is_empty()).then_some((&factors[..], w)) };
        let tau = self.images(&a, &t.tau, &scope, true, at)?;
        let mut spec = spec.with_twist(tau).at(at)?;
        if let Some(inv) = &t.inverse {
            let inv = self.images(&a, inv, &scope, true, at)?;
            spec = spec.with_inverse(inv).at(at)?;
        }
        self.schemes.insert(t.name.clone(), build_twisted(&spec).at(at)?);
        self.last_scheme = Some(t.name.clone());
        Ok(())
    }

    fn glue(&mut self, g: &GlueDecl, at: Pos) -> Result<(), ElabError> {
        let along = self.ring_named(&g.along, at)?.clone();
        let mut rho = Vec::new();
        for (chart, f) in [(&g.u, &g.rho_u), (&g.v, &g.rho_v)] {
            let a = self.ring_named(chart, at)?;
            let m = &self.map_named(f, at)?.map;
            if !Arc::ptr_eq(m.source(), a) || !Arc::ptr_eq(m.target(), &along) {
                return fail(at, format!("`{f}` is not a map {chart} -> {}", g.along));
            }
            rho.push(m.clone());
        }
        let rho_v = rho.pop().expect("two maps");
        let rho_u = rho.pop().expect("two maps");
        self.schemes.insert(g.name.clone(), TwoOpenScheme::new(rho_u, rho_v).at(at)?);
        self.last_scheme = Some(g.name.clone());
        Ok(())
    }

    fn point(&mut self, p: &PointDecl, at: Pos) -> Result<(), ElabError> {
        let scheme = match (&p.scheme, &self.last_scheme) {
            (Some(s), _) | (None, Some(s)) => s.clone(),
            (None, None) => return fail(at, "a point needs a scheme declared before it"),
        };
        let t = self.scheme_named(&scheme, at)?;
        let ring = t.chart(p.chart);
        let label = format!("chart {} of {scheme}", p.chart);
        let scope = Scope { ring: ring.ring(), label: &label, units: None };
        let gens = p.ideal.iter().map(|e| eval(e, &scope)).collect::<Result<Vec<_>, _>>()?;
        let point = PointRef::new(t, p.chart, gens).at(at)?;
        self.points.insert(p.name.clone(), PointEntry { scheme, point });
        Ok(())
    }

    fn assertion(&mut self, a: &AssertDecl, at: Pos) -> Result<(), ElabError> {
        let set = |x: &mut Assertions| match a.property {
            Property::Integral => x.integral = true,
            Property::Dominant => x.dominant = true,
            Property::Connected => x.connected = true,
        };
        if let Some(t) = self.schemes.get_mut(&a.subject) {
            let mut x = t.assertions();
            set(&mut x);
            *t = t.clone().with_assertions(x);
        } else if self.rings.contains_key(&a.subject) {
            if a.property == Property::Dominant {
                return fail(at, "dominance is asserted on schemes, not rings");
            }
            set(self.ring_assertions.entry(a.subject.clone()).or_default());
        } else {
            return fail(at, format!("no scheme or ring named `{}`", a.subject));
        }
        Ok(())
    }
}
