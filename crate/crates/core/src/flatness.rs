//! Flatness of ring maps in two certified situations: targets of the form
//! `A[T]/(sT - t)` for a regular sequence `(s, t)`, and module-finite targets
//! via Fitting ideals. Everything else is reported as undecided.

use std::fmt;
use std::sync::Arc;

use crate::cas::{Ideal, MonomialOrder, Poly, PolyRing};
use crate::error::{Error, Result};
use crate::rings::{FpAlgebra, PresentedModule, RingMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatMethod {
    /// The map is an isomorphism.
    Trivial,
    /// `A[T]/(sT - t)` with `(s, t)` regular: flat iff `(s, t) = (1)`.
    Hypersurface,
    /// Finite module: flat iff some `Fitt_{r-1} = 0` and `Fitt_r = (1)`.
    Fitting,
}

impl fmt::Display for FlatMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlatMethod::Trivial => "trivial",
            FlatMethod::Hypersurface => "hypersurface",
            FlatMethod::Fitting => "fitting",
        })
    }
}

#[derive(Debug, Clone)]
pub enum FlatVerdict {
    Flat { method: FlatMethod, rank: Option<usize> },
    /// `witness` generates, together with the base relations, an ideal that
    /// certifies non-flatness: the non-unit ideal `(s, t)`, or the nonzero
    /// Fitting ideal below the first unit one.
    NotFlat { method: FlatMethod, witness: Vec<Poly> },
    Undecided { reason: String },
}

impl FlatVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            FlatVerdict::Flat { .. } => "Flat",
            FlatVerdict::NotFlat { .. } => "NotFlat",
            FlatVerdict::Undecided { .. } => "Undecided",
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, FlatVerdict::Flat { .. })
    }

    pub fn is_not_flat(&self) -> bool {
        matches!(self, FlatVerdict::NotFlat { .. })
    }

    pub fn method(&self) -> Option<FlatMethod> {
        match self {
            FlatVerdict::Flat { method, .. } | FlatVerdict::NotFlat { method, .. } => Some(*method),
            FlatVerdict::Undecided { .. } => None,
        }
    }

    fn undecided(reason: impl Into<String>) -> FlatVerdict {
        FlatVerdict::Undecided { reason: reason.into() }
    }
}

/// Display form of an ideal's generators: primitive, deduplicated.
fn tidy(gens: impl IntoIterator<Item = Poly>) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for g in gens {
        let g = g.primitive();
        if !g.is_zero() && !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// `(0 : s) = 0` and `((s) : t) = (s)` in `A`.
pub fn is_regular_sequence(a: &FpAlgebra, s: &Poly, t: &Poly) -> Result<bool> {
    let j = a.relations();
    if !j.quotient(s)?.equals(j)? {
        return Ok(false);
    }
    let js = j.with_generators(std::slice::from_ref(s))?;
    js.quotient(t)?.equals(&js)
}

/// Flatness of `A[T]/(sT - t)` over `A`.
pub fn flat_hypersurface(a: &FpAlgebra, s: &Poly, t: &Poly) -> Result<FlatVerdict> {
    if !is_regular_sequence(a, s, t)? {
        return Ok(FlatVerdict::undecided(format!("({s}, {t}) is not a regular sequence; the unit-ideal criterion does not apply")));
    }
    if a.ideal(&[s.clone(), t.clone()])?.is_unit()? {
        Ok(FlatVerdict::Flat { method: FlatMethod::Hypersurface, rank: None })
    } else {
        Ok(FlatVerdict::NotFlat { method: FlatMethod::Hypersurface, witness: tidy([s.clone(), t.clone()]) })
    }
}

/// Flatness of a finite module over a base with no nontrivial idempotents.
///
/// Finds the least `r` with `Fitt_r = (1)` and then requires `Fitt_{r-1} = 0`.
/// The scan runs downward from `n`, which finds the same `r` as an upward scan
/// because the Fitting ideals increase with `k`.
pub fn flat_finite(m: &PresentedModule, base_connected: bool) -> Result<FlatVerdict> {
    if !base_connected {
        return Ok(FlatVerdict::undecided(format!(
            "connectedness of {} is not asserted; the Fitting criterion needs it",
            m.base()
        )));
    }
    let mut r = m.ngens();
    while r > 0 && m.fitting_ideal(r - 1)?.is_unit()? {
        r -= 1;
    }
    if r == 0 {
        return Ok(FlatVerdict::Flat { method: FlatMethod::Fitting, rank: Some(0) });
    }
    let below = m.fitting_ideal(r - 1)?;
    let base = m.base();
    if base.relations().contains_ideal(&below)? {
        return Ok(FlatVerdict::Flat { method: FlatMethod::Fitting, rank: Some(r) });
    }
    let gb = below.default_basis()?;
    let mut witness = Vec::new();
    for g in gb.polys() {
        if !base.is_zero(g)? {
            witness.push(g.clone());
        }
    }
    Ok(FlatVerdict::NotFlat { method: FlatMethod::Fitting, witness: tidy(witness) })
}

/// `Ω_{T/S}` on the generators `d y_j`: Jacobian rows of the target relations
/// and `d φ(x_i) = 0`.
pub fn kaehler_differentials(phi: &RingMap) -> Result<PresentedModule> {
    let t = phi.target();
    let n = t.ngens();
    let jac = |f: &Poly| (0..n).map(|j| f.derivative(j)).collect::<Vec<_>>();
    let mut rows: Vec<Vec<Poly>> = t.relations().generators().iter().map(jac).collect();
    rows.extend(phi.images().iter().map(jac));
    PresentedModule::new(t.clone(), t.generators(), rows)
}

#[derive(Debug, Clone)]
pub enum EtaleVerdict {
    Etale,
    NotEtale { reason: String },
    Undecided { reason: String },
}

impl EtaleVerdict {
    pub fn status(&self) -> &'static str {
        match self {
            EtaleVerdict::Etale => "Etale",
            EtaleVerdict::NotEtale { .. } => "NotEtale",
            EtaleVerdict::Undecided { .. } => "Undecided",
        }
    }
}

/// Étale = flat and `Ω = 0` (characteristic 0).
pub fn is_etale(phi: &RingMap, base_connected: bool) -> Result<EtaleVerdict> {
    let report = flatness(phi, base_connected)?;
    match &report.verdict {
        FlatVerdict::Undecided { reason } => {
            return Ok(EtaleVerdict::Undecided { reason: format!("flatness undecided: {reason}") })
        }
        FlatVerdict::NotFlat { witness, .. } => {
            return Ok(EtaleVerdict::NotEtale { reason: format!("not flat, witness ideal {}", show(witness)) })
        }
        FlatVerdict::Flat { .. } => {}
    }
    let omega = kaehler_differentials(phi)?;
    let f0 = match omega.fitting_ideal(0) {
        Ok(f) => f,
        Err(Error::Undecided(r)) => return Ok(EtaleVerdict::Undecided { reason: r }),
        Err(e) => return Err(e),
    };
    if f0.is_unit()? {
        Ok(EtaleVerdict::Etale)
    } else {
        Ok(EtaleVerdict::NotEtale { reason: "ramified: the module of differentials is nonzero".into() })
    }
}

/// Comma-separated generator list in parentheses.
pub fn show(gens: &[Poly]) -> String {
    let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Verdict plus the data that selected the method.
#[derive(Debug, Clone)]
pub struct FlatReport {
    pub verdict: FlatVerdict,
    /// `(s, t)` when the target was recognised as `A[T]/(sT - t)`.
    pub hypersurface: Option<(Poly, Poly)>,
    /// Rank-candidate module when the Fitting path was used.
    pub module: Option<PresentedModule>,
}

impl FlatReport {
    fn plain(verdict: FlatVerdict) -> FlatReport {
        FlatReport { verdict, hypersurface: None, module: None }
    }
}

/// Flatness of `φ: A -> T`, trying in order: isomorphism, the hypersurface
/// criterion, the Fitting criterion. Budget exhaustion becomes `Undecided`.
pub fn flatness(phi: &RingMap, base_connected: bool) -> Result<FlatReport> {
    match flatness_inner(phi, base_connected) {
        Err(Error::Undecided(reason)) => Ok(FlatReport::plain(FlatVerdict::undecided(reason))),
        other => other,
    }
}

fn flatness_inner(phi: &RingMap, base_connected: bool) -> Result<FlatReport> {
    if phi.is_isomorphism()? {
        return Ok(FlatReport::plain(FlatVerdict::Flat { method: FlatMethod::Trivial, rank: Some(1) }));
    }
    if let Some((s, t)) = hypersurface_form(phi)? {
        let verdict = flat_hypersurface(phi.source(), &s, &t)?;
        if !matches!(verdict, FlatVerdict::Undecided { .. }) {
            return Ok(FlatReport { verdict, hypersurface: Some((s, t)), module: None });
        }
    }
    if phi.module_finite_witness()?.is_some() {
        let m = phi.module_presentation(None)?;
        let verdict = flat_finite(&m, base_connected)?;
        return Ok(FlatReport { verdict, hypersurface: None, module: Some(m) });
    }
    Ok(FlatReport::plain(FlatVerdict::undecided(format!(
        "{} over {} is neither of the form A[T]/(sT - t) nor visibly module-finite",
        phi.target(),
        phi.source()
    ))))
}

/// Recognises `T ≅ A[T]/(J_A + (sT - t))`: exactly one target generator lies
/// outside the image, and the kernel of `A[T] -> T` is generated over `J_A`
/// by one element of degree 1 in `T`. Returns `(s, t)` as elements of `A`,
/// scaled so that `s` has leading coefficient 1.
pub fn hypersurface_form(phi: &RingMap) -> Result<Option<(Poly, Poly)>> {
    let (src, tgt) = (phi.source(), phi.target());
    let mut free = Vec::new();
    for (j, y) in tgt.generators().iter().enumerate() {
        if !phi.in_image(y)? {
            free.push(j);
        }
    }
    let [j] = free[..] else { return Ok(None) };
    // A[T] with T first, so that a block order sorts by T-degree
    let n = src.ngens();
    let mut names = vec![crate::cas::poly::fresh_name(src.names(), "T")];
    names.extend(src.names().iter().cloned());
    let ring = PolyRing::new(src.field(), &names);
    let shift: Vec<usize> = (1..=n).collect();
    let rels: Vec<Poly> = src.relations().generators().iter().map(|g| g.map_vars(&ring, &shift)).collect();
    let at = Arc::new(FpAlgebra::new(&ring, rels.clone())?);
    let mut images = vec![tgt.generator(j)];
    images.extend(phi.images().iter().cloned());
    let psi = RingMap::new(at.clone(), tgt.clone(), images)?;
    let k = psi.kernel()?;
    let gb = k.groebner(&MonomialOrder::Block { split: 1 })?;
    for g in gb.polys() {
        if g.degree_in(0) != 1 {
            continue;
        }
        let s = g.coefficient_of_power(0, 1);
        let t = g.coefficient_of_power(0, 0).neg();
        let candidate = Ideal::new(&ring, rels.iter().cloned().chain(std::iter::once(g.clone())).collect())?;
        if !candidate.equals(&k)? {
            continue;
        }
        let s = s.restrict_to(src.ring(), &shift);
        let t = t.restrict_to(src.ring(), &shift);
        let lc = s.leading_coefficient(&MonomialOrder::GrevLex).cloned();
        let Some(lc) = lc else { continue };
        let inv = lc.inv();
        return Ok(Some((s.scale(&inv), t.scale(&inv))));
    }
    Ok(None)
}
