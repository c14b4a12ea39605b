//! Schemes glued from two affine charts, and the separator test.
//!
//! A [`TwoOpenScheme`] is `T = U ∪ V` with `U = Spec A`, `V = Spec B` and
//! `U ∩ V = Spec C₀`. The closure of the diagonal meets `U × V` in
//! `Spec C` where `C` is the image of `A ⊗ B -> C₀`; a separator exists iff
//! `C` is flat over both `A` and `B` (finite type is automatic here).

mod prime;

use std::fmt;
use std::sync::Arc;

use log::debug;

use crate::cas::{Field, Poly};
use crate::error::{Error, Result};
use crate::flatness::{flatness, FlatReport, FlatVerdict};
use crate::rings::{FpAlgebra, RingMap};

pub use prime::structurally_prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    U,
    V,
}

impl Chart {
    pub fn other(self) -> Chart {
        match self {
            Chart::U => Chart::V,
            Chart::V => Chart::U,
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::U => "U",
            Chart::V => "V",
        })
    }
}

/// Facts about a scheme supplied by the user rather than computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Assertions {
    /// All three rings are domains.
    pub integral: bool,
    /// The diagonal is schematically dominant in its closure.
    pub dominant: bool,
    /// Both chart rings have no nontrivial idempotents.
    pub connected: bool,
}

#[derive(Debug, Clone)]
pub struct TwoOpenScheme {
    rho_u: RingMap,
    rho_v: RingMap,
    inverted_u: Vec<Poly>,
    inverted_v: Vec<Poly>,
    assertions: Assertions,
}

impl TwoOpenScheme {
    /// Glues along `rho_u: A -> C₀` and `rho_v: B -> C₀`. Each map must
    /// present `C₀` as a localization of its source at finitely many
    /// elements; this is checked. Both charts are affine and the overlap is a
    /// principal open of each, so quasi-compactness needs no runtime check.
    pub fn new(rho_u: RingMap, rho_v: RingMap) -> Result<TwoOpenScheme> {
        if !Arc::ptr_eq(rho_u.target(), rho_v.target()) && !rho_u.target().same_presentation(rho_v.target())? {
            return Err(Error::RingMismatch("the two restriction maps have different targets".into()));
        }
        let inverted_u = localization_certificate(&rho_u)
            .map_err(|e| Error::Invalid(format!("restriction from U is not an open immersion: {e}")))?;
        let inverted_v = localization_certificate(&rho_v)
            .map_err(|e| Error::Invalid(format!("restriction from V is not an open immersion: {e}")))?;
        Ok(TwoOpenScheme { rho_u, rho_v, inverted_u, inverted_v, assertions: Assertions::default() })
    }

    pub fn with_assertions(mut self, assertions: Assertions) -> TwoOpenScheme {
        self.assertions = assertions;
        self
    }

    pub fn assertions(&self) -> Assertions {
        self.assertions
    }

    pub fn u(&self) -> &Arc<FpAlgebra> {
        self.rho_u.source()
    }

    pub fn v(&self) -> &Arc<FpAlgebra> {
        self.rho_v.source()
    }

    pub fn chart(&self, c: Chart) -> &Arc<FpAlgebra> {
        match c {
            Chart::U => self.u(),
            Chart::V => self.v(),
        }
    }

    pub fn overlap(&self) -> &Arc<FpAlgebra> {
        self.rho_u.target()
    }

    pub fn rho_u(&self) -> &RingMap {
        &self.rho_u
    }

    pub fn rho_v(&self) -> &RingMap {
        &self.rho_v
    }

    pub fn restriction(&self, c: Chart) -> &RingMap {
        match c {
            Chart::U => &self.rho_u,
            Chart::V => &self.rho_v,
        }
    }

    /// Elements of the chart ring whose inverses generate `C₀` over it.
    pub fn inverted(&self, c: Chart) -> &[Poly] {
        match c {
            Chart::U => &self.inverted_u,
            Chart::V => &self.inverted_v,
        }
    }

    pub fn field(&self) -> Field {
        self.overlap().field()
    }

    /// The same scheme with the charts exchanged.
    pub fn swap(&self) -> TwoOpenScheme {
        TwoOpenScheme {
            rho_u: self.rho_v.clone(),
            rho_v: self.rho_u.clone(),
            inverted_u: self.inverted_v.clone(),
            inverted_v: self.inverted_u.clone(),
            assertions: self.assertions,
        }
    }

    fn chart_connected(&self, c: Chart) -> Result<bool> {
        Ok(self.assertions.integral || self.assertions.connected || structurally_prime(self.chart(c))?)
    }

    /// `φ_UV: A ⊗ B -> C₀`, with the tensor coprojections.
    pub fn restriction_product(&self) -> Result<(RingMap, RingMap, RingMap)> {
        let t = FpAlgebra::tensor(self.u(), self.v())?;
        // the tensor lists the generators of `A` first, then those of `B`
        let images = self.rho_u.images().iter().chain(self.rho_v.images()).cloned().collect();
        let phi = RingMap::new(t.algebra.clone(), self.overlap().clone(), images)?;
        Ok((phi, t.left, t.right))
    }
}

/// Elements `a_1, ..., a_k` of the source such that `rho` identifies the
/// target with `source[1/(a_1 ... a_k)]`: the `a_i` are the preimages of the
/// inverses of those target generators that are units outside the image, and
/// the induced map from the localization must be an isomorphism.
pub fn localization_certificate(rho: &RingMap) -> Result<Vec<Poly>> {
    let (src, tgt) = (rho.source(), rho.target());
    let mut inverted: Vec<Poly> = Vec::new();
    let mut inverses: Vec<Poly> = Vec::new();
    for c in tgt.generators() {
        if rho.in_image(&c)? {
            continue;
        }
        let Some(inv) = tgt.unit_inverse(&c)? else { continue };
        if let Some(a) = rho.preimage(&inv)? {
            inverted.push(src.reduce(&a)?);
            inverses.push(c);
        }
    }
    let iso = if inverted.is_empty() {
        rho.is_isomorphism()?
    } else {
        let product = inverted.iter().skip(1).fold(inverted[0].clone(), |acc, a| &acc * a);
        let (loc, _) = src.localize(&product)?;
        let mut images = rho.images().to_vec();
        images.push(inverses.iter().skip(1).fold(inverses[0].clone(), |acc, c| &acc * c));
        RingMap::new(loc, tgt.clone(), images)?.is_isomorphism()?
    };
    if !iso {
        return Err(Error::Invalid(format!(
            "{} is not the localization of {} at the inverted elements",
            tgt,
            src
        )));
    }
    Ok(inverted)
}

/// A chart ring, the elements inverted on the common open `U₀`, and an
/// automorphism `τ` of `Γ(U₀)` with its inverse.
#[derive(Debug, Clone)]
pub struct TwistSpec {
    ring: Arc<FpAlgebra>,
    invert: Vec<Poly>,
    canonical: RingMap,
    tau: RingMap,
    tau_inverse: RingMap,
}

impl TwistSpec {
    /// `U₀ = Spec A[1/(f_1 ... f_k)]` with the identity twist. With no
    /// elements `U₀ = U`.
    pub fn new(ring: Arc<FpAlgebra>, invert: Vec<Poly>) -> Result<TwistSpec> {
        let canonical = if invert.is_empty() {
            RingMap::identity(&ring)
        } else {
            let product = invert.iter().skip(1).fold(invert[0].clone(), |acc, f| &acc * f);
            ring.localize(&product)?.1
        };
        let id = RingMap::identity(canonical.target());
        Ok(TwistSpec { ring, invert, canonical, tau: id.clone(), tau_inverse: id })
    }

    pub fn ring(&self) -> &Arc<FpAlgebra> {
        &self.ring
    }

    pub fn invert(&self) -> &[Poly] {
        &self.invert
    }

    pub fn overlap(&self) -> &Arc<FpAlgebra> {
        self.canonical.target()
    }

    pub fn canonical(&self) -> &RingMap {
        &self.canonical
    }

    pub fn tau(&self) -> &RingMap {
        &self.tau
    }

    pub fn tau_inverse(&self) -> &RingMap {
        &self.tau_inverse
    }

    /// Sets `τ` from the images of the chart generators in `Γ(U₀)`; the image
    /// of the inverted element's inverse is derived. The inverse twist is
    /// computed unless given with [`TwistSpec::with_inverse`].
    pub fn with_twist(mut self, images: Vec<Poly>) -> Result<TwistSpec> {
        self.tau = self.extend(images)?;
        self.tau_inverse = self
            .tau
            .inverse()?
            .ok_or_else(|| Error::Invalid("the twist is not an automorphism of the common open".into()))?;
        Ok(self)
    }

    pub fn with_inverse(mut self, images: Vec<Poly>) -> Result<TwistSpec> {
        let inv = self.extend(images)?;
        let id = RingMap::identity(self.overlap());
        if !self.tau.then(&inv)?.agrees_with(&id)? || !inv.then(&self.tau)?.agrees_with(&id)? {
            return Err(Error::Invalid("the supplied inverse does not invert the twist".into()));
        }
        self.tau_inverse = inv;
        Ok(self)
    }

    /// Endomorphism of `Γ(U₀)` from images of the chart generators.
    fn extend(&self, mut images: Vec<Poly>) -> Result<RingMap> {
        let u0 = self.overlap();
        if images.len() != self.ring.ngens() {
            return Err(Error::Invalid(format!(
                "twist gives {} images for {} chart generators",
                images.len(),
                self.ring.ngens()
            )));
        }
        if !self.invert.is_empty() {
            // τ(w) = 1 / τ(f) for the inverted product f
            let f = self.canonical.apply(&self.invert.iter().skip(1).fold(self.invert[0].clone(), |a, g| &a * g))?;
            let mut with_w = images.clone();
            with_w.push(Poly::var(u0.ring(), u0.ngens() - 1));
            let tf = u0.reduce(&f.substitute(u0.ring(), &with_w)?)?;
            let w = u0
                .unit_inverse(&tf)?
                .ok_or_else(|| Error::Invalid(format!("the twist sends the inverted element to {tf}, not a unit")))?;
            images.push(w);
        }
        RingMap::new(u0.clone(), u0.clone(), images)
    }
}

/// `T = U ⊔_{U₀} U`, glued along `τ`: the `U` chart restricts through the
/// twist, the `V` chart canonically, so that `φ_UV(a ⊗ b) = τ(a)·b`.
pub fn build_twisted(spec: &TwistSpec) -> Result<TwoOpenScheme> {
    // `canonical` is a localization by construction and `τ` is an
    // automorphism, so both maps invert exactly the listed elements.
    let rho_u = spec.canonical.then(&spec.tau)?;
    Ok(TwoOpenScheme {
        rho_u,
        rho_v: spec.canonical.clone(),
        inverted_u: spec.invert.clone(),
        inverted_v: spec.invert.clone(),
        assertions: Assertions::default(),
    })
}

/// `C = Im(φ_UV)` with its structure maps from both charts.
#[derive(Debug, Clone)]
pub struct DiagonalClosure {
    pub algebra: Arc<FpAlgebra>,
    /// `A -> C`, the projection to the `U` factor.
    pub from_u: RingMap,
    /// `B -> C`.
    pub from_v: RingMap,
    /// `C -> C₀`, injective.
    pub inclusion: RingMap,
}

impl DiagonalClosure {
    pub fn from_chart(&self, c: Chart) -> &RingMap {
        match c {
            Chart::U => &self.from_u,
            Chart::V => &self.from_v,
        }
    }
}

pub fn diagonal_closure(t: &TwoOpenScheme) -> Result<DiagonalClosure> {
    let (phi, left, right) = t.restriction_product()?;
    let im = phi.image()?;
    let simple = im.algebra.simplify()?;
    let proj = im.projection.then(&simple.to)?;
    Ok(DiagonalClosure {
        algebra: simple.algebra.clone(),
        from_u: left.then(&proj)?,
        from_v: right.then(&proj)?,
        inclusion: simple.from.then(&im.inclusion)?,
    })
}

/// Separated iff `φ_UV` is surjective.
pub fn is_separated(t: &TwoOpenScheme) -> Result<bool> {
    t.restriction_product()?.0.is_surjective()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Yes,
    No,
    Undecided,
}

impl fmt::Display for Dominance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dominance::Yes => "Yes",
            Dominance::No => "No",
            Dominance::Undecided => "Undecided",
        })
    }
}

/// Whether the diagonal is schematically dominant in its closure. Answered
/// `Yes` from an assertion, or when both chart rings are visibly domains
/// (then so is `C₀`, a localization); never `No`.
pub fn diagonal_dominant(t: &TwoOpenScheme) -> Result<Dominance> {
    let a = t.assertions;
    if a.integral || a.dominant {
        return Ok(Dominance::Yes);
    }
    if structurally_prime(t.u())? && structurally_prime(t.v())? {
        return Ok(Dominance::Yes);
    }
    Ok(Dominance::Undecided)
}

/// The constructed separator `h: T -> E`.
#[derive(Debug, Clone)]
pub struct Separator {
    /// `E`, glued from the same charts along `Spec C`.
    pub scheme: TwoOpenScheme,
    /// Chart components of `h`; identities.
    pub chart_maps: (RingMap, RingMap),
    /// Whether `C` equals each chart ring (structure map an isomorphism).
    pub isomorphic: (bool, bool),
}

#[derive(Debug, Clone)]
pub enum SeparatorVerdict {
    AlreadySeparated,
    SeparatorExists(Box<Separator>),
    /// `C` is not flat over the listed charts; the flatness reports carry the
    /// witness ideals.
    NoSeparator { failing: Vec<Chart> },
    Undecided { reason: String },
}

impl SeparatorVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            SeparatorVerdict::AlreadySeparated => "AlreadySeparated",
            SeparatorVerdict::SeparatorExists(_) => "SeparatorExists",
            SeparatorVerdict::NoSeparator { .. } => "NoSeparator",
            SeparatorVerdict::Undecided { .. } => "Undecided",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SeparatorReport {
    pub verdict: SeparatorVerdict,
    pub dominance: Dominance,
    pub closure: Option<DiagonalClosure>,
    /// Flatness of `C` over `A` and over `B`.
    pub over_u: Option<FlatReport>,
    pub over_v: Option<FlatReport>,
    pub notes: Vec<String>,
}

impl SeparatorReport {
    fn bare(verdict: SeparatorVerdict, dominance: Dominance) -> SeparatorReport {
        SeparatorReport { verdict, dominance, closure: None, over_u: None, over_v: None, notes: Vec::new() }
    }

    pub fn over(&self, c: Chart) -> Option<&FlatReport> {
        match c {
            Chart::U => self.over_u.as_ref(),
            Chart::V => self.over_v.as_ref(),
        }
    }
}

pub const FINITE_TYPE_NOTE: &str =
    "finite type: C is generated over each chart ring by the images of the other chart's generators";

/// Decides whether `T` has a separator, and builds it when it does.
pub fn separator_check(t: &TwoOpenScheme) -> Result<SeparatorReport> {
    let dominance = match diagonal_dominant(t) {
        Err(Error::Undecided(reason)) => {
            return Ok(SeparatorReport::bare(SeparatorVerdict::Undecided { reason }, Dominance::Undecided))
        }
        other => other?,
    };
    match check_inner(t, dominance) {
        Err(Error::Undecided(reason)) => Ok(SeparatorReport::bare(SeparatorVerdict::Undecided { reason }, dominance)),
        other => other,
    }
}

fn check_inner(t: &TwoOpenScheme, dominance: Dominance) -> Result<SeparatorReport> {
    if dominance != Dominance::Yes {
        let reason = "diagonal dominance is not certified: the charts are not visibly domains and no assertion was made";
        return Ok(SeparatorReport::bare(SeparatorVerdict::Undecided { reason: reason.into() }, dominance));
    }
    if is_separated(t)? {
        return Ok(SeparatorReport::bare(SeparatorVerdict::AlreadySeparated, dominance));
    }
    let closure = diagonal_closure(t)?;
    debug!("closure of the diagonal: {}", closure.algebra);
    let over_u = flatness(&closure.from_u, t.chart_connected(Chart::U)?)?;
    let over_v = flatness(&closure.from_v, t.chart_connected(Chart::V)?)?;
    let mut failing = Vec::new();
    let mut undecided = Vec::new();
    for (c, r) in [(Chart::U, &over_u), (Chart::V, &over_v)] {
        match &r.verdict {
            FlatVerdict::NotFlat { .. } => failing.push(c),
            FlatVerdict::Undecided { reason } => undecided.push(format!("over {c}: {reason}")),
            FlatVerdict::Flat { .. } => {}
        }
    }
    let verdict = if !failing.is_empty() {
        SeparatorVerdict::NoSeparator { failing }
    } else if !undecided.is_empty() {
        SeparatorVerdict::Undecided { reason: undecided.join("; ") }
    } else {
        SeparatorVerdict::SeparatorExists(Box::new(build_separator(t, &closure, &over_u, &over_v)?))
    };
    Ok(SeparatorReport {
        verdict,
        dominance,
        closure: Some(closure),
        over_u: Some(over_u),
        over_v: Some(over_v),
        notes: vec![FINITE_TYPE_NOTE.into()],
    })
}

/// `E` glued from `U` and `V` along `Spec C`. Each structure map must be a
/// flat epimorphism of finite type, hence an open immersion; a failure here
/// means an internal invariant broke.
pub fn build_separator(
    t: &TwoOpenScheme,
    closure: &DiagonalClosure,
    over_u: &FlatReport,
    over_v: &FlatReport,
) -> Result<Separator> {
    for (c, r) in [(Chart::U, over_u), (Chart::V, over_v)] {
        if !r.verdict.is_flat() {
            return Err(Error::Internal(format!("separator requested but C is not known to be flat over {c}")));
        }
        if !closure.from_chart(c).is_epimorphism()? {
            return Err(Error::Internal(format!("structure map from {c} is flat but not an epimorphism")));
        }
    }
    let scheme = TwoOpenScheme::new(closure.from_u.clone(), closure.from_v.clone())
        .map_err(|e| Error::Internal(format!("separator charts do not glue: {e}")))?
        .with_assertions(t.assertions);
    if !is_separated(&scheme)? {
        return Err(Error::Internal("constructed separator is not separated".into()));
    }
    Ok(Separator {
        chart_maps: (RingMap::identity(t.u()), RingMap::identity(t.v())),
        isomorphic: (closure.from_u.is_isomorphism()?, closure.from_v.is_isomorphism()?),
        scheme,
    })
}

/// A rational point of one chart, given by its maximal ideal.
#[derive(Debug, Clone)]
pub struct PointRef {
    pub chart: Chart,
    pub generators: Vec<Poly>,
}

impl PointRef {
    /// Checks that the ideal is maximal with residue field the coefficient field.
    pub fn new(t: &TwoOpenScheme, chart: Chart, generators: Vec<Poly>) -> Result<PointRef> {
        let ring = t.chart(chart);
        let ideal = ring.ideal(&generators)?;
        let gb = ideal.default_basis()?;
        if gb.is_unit() {
            return Err(Error::Invalid("point ideal is the unit ideal".into()));
        }
        match gb.standard_monomials(2) {
            Some(ms) if ms.len() == 1 => Ok(PointRef { chart, generators }),
            _ => Err(Error::Invalid("point ideal is not a rational maximal ideal".into())),
        }
    }
}

/// Whether the local rings at `x` and `y` are apparented: the ideal generated
/// by both points in `C` is proper.
pub fn apparented(t: &TwoOpenScheme, x: &PointRef, y: &PointRef) -> Result<bool> {
    let closure = diagonal_closure(t)?;
    apparented_in(&closure, x, y)
}

fn apparented_in(closure: &DiagonalClosure, x: &PointRef, y: &PointRef) -> Result<bool> {
    if x.chart == y.chart {
        return Err(Error::Invalid("apparented needs one point on each chart".into()));
    }
    let mut gens = Vec::new();
    for p in [x, y] {
        let d = closure.from_chart(p.chart);
        for g in &p.generators {
            gens.push(d.apply(g)?);
        }
    }
    Ok(!closure.algebra.ideal(&gens)?.is_unit()?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Identification {
    Identified,
    Distinct,
    NoSeparator,
    Undecided { reason: String },
}

impl Identification {
    pub fn status(&self) -> &'static str {
        match self {
            Identification::Identified => "Identified",
            Identification::Distinct => "Distinct",
            Identification::NoSeparator => "NoSeparator",
            Identification::Undecided { .. } => "Undecided",
        }
    }
}

/// Whether the separator identifies `x` and `y`: with a separator,
/// apparented points have equal local rings, so this is apparentedness.
pub fn identified_in_separator(t: &TwoOpenScheme, x: &PointRef, y: &PointRef) -> Result<Identification> {
    let report = separator_check(t)?;
    match report.verdict {
        SeparatorVerdict::NoSeparator { .. } => Ok(Identification::NoSeparator),
        SeparatorVerdict::Undecided { reason } => Ok(Identification::Undecided { reason }),
        SeparatorVerdict::AlreadySeparated | SeparatorVerdict::SeparatorExists(_) => {
            let closure = match report.closure {
                Some(c) => c,
                None => diagonal_closure(t)?,
            };
            Ok(if apparented_in(&closure, x, y)? { Identification::Identified } else { Identification::Distinct })
        }
    }
}
