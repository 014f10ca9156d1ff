//! Orbit morphisms between partial dynamical systems.
//!
//! An orbit morphism `(phi, a)` from `G ↷ X` to `H ↷ Y` is a point map
//! `phi : X -> Y` together with a cocycle `a(g, x) ∈ H` defined on the pairs
//! `x ∈ U_{g^-1}`, such that `phi(g.x) = a(g, x).phi(x)`. Such morphisms are
//! exactly the homomorphisms of the transformation groupoids, and this module
//! implements both directions of that correspondence together with the
//! isomorphism tests and continuous-orbit-equivalence triples.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, GroupoidHom};
use crate::groups::GroupElement;
use crate::pds::FinitePds;

/// Largest space size accepted by the exhaustive enumerators.
pub const ENUMERATION_MAX_POINTS: usize = 4;
/// Largest group order accepted by the exhaustive enumerators.
pub const ENUMERATION_MAX_ORDER: usize = 3;

/// Values of a cocycle on the pairs `(g, x)` with `x ∈ U_{g^-1}`.
pub type CocycleTable = BTreeMap<(GroupElement, usize), GroupElement>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbitMorphism {
    pub phi: Vec<usize>,
    pub cocycle: CocycleTable,
}

/// Pairs `(g, x)` with `x ∈ U_{g^-1}`, in table order.
pub fn supported_pairs(pds: &FinitePds) -> Vec<(GroupElement, usize)> {
    pds.table()
        .iter()
        .flat_map(|(g, m)| m.pairs().map(move |(x, _)| (g.clone(), x)))
        .collect()
}

impl OrbitMorphism {
    /// `(id_X, i)` with `i(g, x) = g`.
    pub fn identity(pds: &FinitePds) -> Self {
        OrbitMorphism {
            phi: (0..pds.space().len()).collect(),
            cocycle: supported_pairs(pds).into_iter().map(|(g, x)| ((g.clone(), x), g)).collect(),
        }
    }

    /// `(phi, a)` with `a(g, x) = f(g)` independent of the point.
    pub fn equivariant(src: &FinitePds, phi: Vec<usize>, f: impl Fn(&GroupElement) -> GroupElement) -> Self {
        let cocycle = supported_pairs(src).into_iter().map(|(g, x)| {
            let h = f(&g);
            ((g, x), h)
        });
        OrbitMorphism { phi, cocycle: cocycle.collect() }
    }

    pub fn value(&self, g: &GroupElement, x: usize) -> Option<&GroupElement> {
        self.cocycle.get(&(g.clone(), x))
    }
}

/// A failed condition of an orbit morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MorphismViolation {
    /// `phi` does not map into the target space.
    Shape,
    /// `a(g, x)` is missing for a supported pair.
    Missing { g: GroupElement, x: usize },
    /// `phi(x) ∉ V_{a(g,x)^-1}` or `phi(g.x) != a(g,x).phi(x)`.
    Intertwining { g: GroupElement, x: usize },
    /// `a(e, x) != e`.
    Unit { x: usize },
    /// `a(g1 g2, x) != a(g1, g2.x) a(g2, x)`.
    Cocycle { g1: GroupElement, g2: GroupElement, x: usize },
}

/// Composable triples `(g1, g2, x)` where the cocycle identity fails.
pub fn cocycle_failures(
    pds: &FinitePds,
    table: &CocycleTable,
    target_group: &crate::groups::GroupDescriptor,
) -> Vec<(GroupElement, GroupElement, usize)> {
    let mut at: BTreeMap<usize, Vec<(&GroupElement, &GroupElement)>> = BTreeMap::new();
    for ((g, x), a) in table {
        at.entry(*x).or_default().push((g, a));
    }
    let group = pds.group();
    let mut out = Vec::new();
    for ((g2, x), a2) in table {
        let Some(y) = pds.act(g2, *x) else { continue };
        for &(g1, a1) in at.get(&y).map(Vec::as_slice).unwrap_or(&[]) {
            let Ok(g12) = group.multiply(g1, g2) else { continue };
            let Some(a12) = table.get(&(g12, *x)) else { continue };
            match target_group.multiply(a1, a2) {
                Ok(p) if p == *a12 => {}
                _ => out.push((g1.clone(), g2.clone(), *x)),
            }
        }
    }
    out
}

/// Checks the intertwining condition, `a(e, x) = e` and the cocycle identity.
///
/// Products outside a truncated table are skipped.
pub fn validate_orbit_morphism(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Vec<MorphismViolation> {
    if m.phi.len() != src.space().len() || m.phi.iter().any(|&y| y >= tgt.space().len()) {
        return vec![MorphismViolation::Shape];
    }
    let mut out = Vec::new();
    for (g, x) in supported_pairs(src) {
        let Some(h) = m.cocycle.get(&(g.clone(), x)) else {
            out.push(MorphismViolation::Missing { g, x });
            continue;
        };
        let gx = src.act(&g, x).expect("supported pair");
        if !tgt.group().contains(h) || tgt.act(h, m.phi[x]) != Some(m.phi[gx]) {
            out.push(MorphismViolation::Intertwining { g: g.clone(), x });
        }
    }
    let e = src.group().identity();
    for x in 0..src.space().len() {
        if m.cocycle.get(&(e.clone(), x)).is_some_and(|h| !tgt.group().is_identity(h)) {
            out.push(MorphismViolation::Unit { x });
        }
    }
    for (g1, g2, x) in cocycle_failures(src, &m.cocycle, tgt.group()) {
        out.push(MorphismViolation::Cocycle { g1, g2, x });
    }
    out
}

fn check_shapes(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Result<()> {
    if m.phi.len() != src.space().len() || m.phi.iter().any(|&y| y >= tgt.space().len()) {
        return Err(Error::Morphism("point map does not match the systems".into()));
    }
    Ok(())
}

/// `(psi, b) ∘ (phi, a) = (psi ∘ phi, c)` with `c(g, x) = b(a(g, x), phi(x))`.
pub fn compose(mid: &FinitePds, second: &OrbitMorphism, first: &OrbitMorphism) -> Result<OrbitMorphism> {
    if second.phi.len() != mid.space().len() || first.phi.iter().any(|&y| y >= mid.space().len()) {
        return Err(Error::Morphism("endpoints do not match".into()));
    }
    let mut cocycle = BTreeMap::new();
    for ((g, x), h) in &first.cocycle {
        let k = second.cocycle.get(&(h.clone(), first.phi[*x])).ok_or_else(|| {
            Error::Morphism(format!("second cocycle undefined at ({:?}, #{})", h, first.phi[*x]))
        })?;
        cocycle.insert((g.clone(), *x), k.clone());
    }
    Ok(OrbitMorphism { phi: first.phi.iter().map(|&y| second.phi[y]).collect(), cocycle })
}

fn payload_index(gpd: &FiniteGroupoid) -> HashMap<(GroupElement, usize), usize> {
    gpd.arrows()
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.payload.clone().map(|p| (p, i)))
        .collect()
}

/// `Θ(g, x) = (a(g, x), phi(x))` between transformation groupoids.
pub fn functor_apply(
    src_gpd: &FiniteGroupoid,
    tgt_gpd: &FiniteGroupoid,
    m: &OrbitMorphism,
) -> Result<GroupoidHom> {
    let index = payload_index(tgt_gpd);
    if m.phi.len() != src_gpd.unit_count() || m.phi.iter().any(|&y| y >= tgt_gpd.unit_count()) {
        return Err(Error::Morphism("point map does not match the unit spaces".into()));
    }
    let mut arrow_map = Vec::with_capacity(src_gpd.arrow_count());
    for a in src_gpd.arrows() {
        let (g, x) = a.payload.as_ref().ok_or_else(|| Error::Morphism("source arrow lacks a payload".into()))?;
        let h = m
            .cocycle
            .get(&(g.clone(), *x))
            .ok_or_else(|| Error::Morphism(format!("cocycle undefined at `{}`", a.label)))?;
        let j = index
            .get(&(h.clone(), m.phi[*x]))
            .copied()
            .ok_or_else(|| Error::Morphism(format!("image of `{}` is not an arrow", a.label)))?;
        arrow_map.push(j);
    }
    Ok(GroupoidHom { unit_map: m.phi.clone(), arrow_map })
}

/// Reads `phi` off the unit map and `a` off the group coordinate of each image.
pub fn functor_invert(src_gpd: &FiniteGroupoid, tgt_gpd: &FiniteGroupoid, hom: &GroupoidHom) -> Result<OrbitMorphism> {
    if hom.unit_map.len() != src_gpd.unit_count() || hom.arrow_map.len() != src_gpd.arrow_count() {
        return Err(Error::Morphism("map does not match the source groupoid".into()));
    }
    for u in 0..src_gpd.unit_count() {
        let image = hom.arrow_map[src_gpd.unit_arrow(u)];
        if hom.unit_map[u] >= tgt_gpd.unit_count() || image != tgt_gpd.unit_arrow(hom.unit_map[u]) {
            return Err(Error::Morphism(format!("unit `{}` is not sent to a unit", src_gpd.units()[u])));
        }
    }
    let mut cocycle = BTreeMap::new();
    for (i, a) in src_gpd.arrows().iter().enumerate() {
        let (g, x) = a.payload.clone().ok_or_else(|| Error::Morphism("source arrow lacks a payload".into()))?;
        let (h, _) = tgt_gpd
            .arrow(hom.arrow_map[i])
            .payload
            .clone()
            .ok_or_else(|| Error::Morphism("target arrow lacks a payload".into()))?;
        cocycle.insert((g, x), h);
    }
    Ok(OrbitMorphism { phi: hom.unit_map.clone(), cocycle })
}

/// Why a morphism is not an isomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoFailure {
    PhiNotInjective { x1: usize, x2: usize },
    PhiNotSurjective { y: usize },
    /// `a(g1, x) = a(g2, x)` for `g1 != g2` in `G_x`.
    CocycleNotInjective { x: usize, g1: GroupElement, g2: GroupElement },
    /// `h ∈ H_{phi(x)}` is not a value of `a(., x)`.
    CocycleNotSurjective { x: usize, h: GroupElement },
}

/// `phi` is bijective and each `a(., x) : G_x -> H_{phi(x)}` is bijective.
///
/// Returns the failures found; an empty list means the morphism is an
/// isomorphism. Truncated systems are refused.
pub fn is_isomorphism(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Result<Vec<IsoFailure>> {
    if src.is_truncated() || tgt.is_truncated() {
        return Err(Error::Truncated("bijectivity on infinite element sets cannot be read off a table".into()));
    }
    check_shapes(src, tgt, m)?;
    let mut out = Vec::new();
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (x, &y) in m.phi.iter().enumerate() {
        if let Some(&x1) = seen.get(&y) {
            out.push(IsoFailure::PhiNotInjective { x1, x2: x });
        } else {
            seen.insert(y, x);
        }
    }
    for y in 0..tgt.space().len() {
        if !seen.contains_key(&y) {
            out.push(IsoFailure::PhiNotSurjective { y });
        }
    }
    for x in 0..src.space().len() {
        let gx = src.element_set(x)?.elements;
        let hy: BTreeSet<GroupElement> = tgt.element_set(m.phi[x])?.elements.into_iter().collect();
        let mut images: BTreeMap<GroupElement, GroupElement> = BTreeMap::new();
        for g in gx {
            let Some(h) = m.cocycle.get(&(g.clone(), x)) else { continue };
            if let Some(g1) = images.get(h) {
                out.push(IsoFailure::CocycleNotInjective { x, g1: g1.clone(), g2: g.clone() });
            } else {
                images.insert(h.clone(), g);
            }
        }
        for h in hy {
            if !images.contains_key(&h) {
                out.push(IsoFailure::CocycleNotSurjective { x, h });
            }
        }
    }
    Ok(out)
}

/// `(phi^-1, b)` with `b(h, y) = a(., phi^-1(y))^-1(h)`.
pub fn invert_isomorphism(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Result<OrbitMorphism> {
    if !is_isomorphism(src, tgt, m)?.is_empty() {
        return Err(Error::Morphism("not an isomorphism".into()));
    }
    let mut phi = vec![0; tgt.space().len()];
    for (x, &y) in m.phi.iter().enumerate() {
        phi[y] = x;
    }
    let mut cocycle = BTreeMap::new();
    for ((g, x), h) in &m.cocycle {
        cocycle.insert((h.clone(), m.phi[*x]), g.clone());
    }
    Ok(OrbitMorphism { phi, cocycle })
}

/// A continuous orbit equivalence `(phi, a, b)`.
///
/// `a` lives on the source pairs and `b` on the target pairs; neither is
/// assumed to be a cocycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeTriple {
    pub phi: Vec<usize>,
    pub a: CocycleTable,
    pub b: CocycleTable,
}

impl CoeTriple {
    pub fn identity(pds: &FinitePds) -> Self {
        let m = OrbitMorphism::identity(pds);
        CoeTriple { phi: m.phi, a: m.cocycle.clone(), b: m.cocycle }
    }

    /// The triple `(phi, a, b)` where `(phi^-1, b)` inverts the isomorphism `(phi, a)`.
    pub fn from_isomorphism(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Result<Self> {
        let inv = invert_isomorphism(src, tgt, m)?;
        Ok(CoeTriple { phi: m.phi.clone(), a: m.cocycle.clone(), b: inv.cocycle })
    }

    pub fn inverse_phi(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.phi.len()];
        for (x, &y) in self.phi.iter().enumerate() {
            if y < out.len() {
                out[y] = x;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoeReport {
    /// Pairs `(g, x)` where `phi(g.x) = a(g, x).phi(x)` fails.
    pub forward: Vec<(GroupElement, usize)>,
    /// Pairs `(h, y)` where `phi^-1(h.y) = b(h, y).phi^-1(y)` fails.
    pub backward: Vec<(GroupElement, usize)>,
    pub a_is_cocycle: bool,
    pub b_is_cocycle: bool,
}

impl CoeReport {
    pub fn equations_hold(&self) -> bool {
        self.forward.is_empty() && self.backward.is_empty()
    }
}

fn is_bijection(phi: &[usize], n: usize) -> bool {
    phi.len() == n && phi.iter().copied().collect::<BTreeSet<_>>().len() == n && phi.iter().all(|&y| y < n)
}

/// Checks both transfer equations and records whether `a` and `b` are cocycles.
pub fn validate_coe(src: &FinitePds, tgt: &FinitePds, t: &CoeTriple) -> Result<CoeReport> {
    if src.space().len() != tgt.space().len() || !is_bijection(&t.phi, tgt.space().len()) {
        return Err(Error::Morphism("phi is not a bijection".into()));
    }
    let inv = t.inverse_phi();
    let mut report = CoeReport::default();
    let one_side = |sys: &FinitePds, other: &FinitePds, phi: &[usize], table: &CocycleTable| {
        let mut bad = Vec::new();
        for (g, x) in supported_pairs(sys) {
            let gx = sys.act(&g, x).expect("supported pair");
            let ok = table
                .get(&(g.clone(), x))
                .is_some_and(|h| other.group().contains(h) && other.act(h, phi[x]) == Some(phi[gx]));
            if !ok {
                bad.push((g, x));
            }
        }
        bad
    };
    report.forward = one_side(src, tgt, &t.phi, &t.a);
    report.backward = one_side(tgt, src, &inv, &t.b);
    report.a_is_cocycle = cocycle_failures(src, &t.a, tgt.group()).is_empty();
    report.b_is_cocycle = cocycle_failures(tgt, &t.b, src.group()).is_empty();
    Ok(report)
}

/// A point where `a(., x)` fails to restrict to a bijection of stabilisers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabFailure {
    /// `a(g, x)` is not in the stabiliser of `phi(x)`.
    Outside { x: usize, g: GroupElement },
    NotInjective { x: usize, g1: GroupElement, g2: GroupElement },
    NotSurjective { x: usize, h: GroupElement },
}

/// Whether `a(., x)` maps `Stab(x)` (or `Stab^ess(x)`) bijectively onto the
/// corresponding group at `phi(x)`, for every `x`.
pub fn check_preserves_stabilisers(
    src: &FinitePds,
    tgt: &FinitePds,
    t: &CoeTriple,
    essential: bool,
) -> Result<Vec<StabFailure>> {
    if src.is_truncated() || tgt.is_truncated() {
        return Err(Error::Truncated("stabilisers of infinite groups are not tabulated".into()));
    }
    let stab = |p: &FinitePds, x: usize| if essential { p.essential_stabiliser(x) } else { p.stabiliser(x) };
    let mut out = Vec::new();
    for x in 0..src.space().len() {
        let y = *t.phi.get(x).ok_or_else(|| Error::Morphism("phi too short".into()))?;
        let sx = stab(src, x)?.elements;
        let sy: BTreeSet<GroupElement> = stab(tgt, y)?.elements.into_iter().collect();
        let mut images: BTreeMap<GroupElement, GroupElement> = BTreeMap::new();
        for g in sx {
            let Some(h) = t.a.get(&(g.clone(), x)) else {
                out.push(StabFailure::Outside { x, g });
                continue;
            };
            if !sy.contains(h) {
                out.push(StabFailure::Outside { x, g: g.clone() });
            }
            if let Some(g1) = images.get(h) {
                out.push(StabFailure::NotInjective { x, g1: g1.clone(), g2: g.clone() });
            } else {
                images.insert(h.clone(), g);
            }
        }
        for h in sy {
            if !images.contains_key(&h) {
                out.push(StabFailure::NotSurjective { x, h });
            }
        }
    }
    Ok(out)
}

/// A hypothesis needed to turn an orbit equivalence into an isomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    TransferEquations,
    CocycleIdentity,
    EssentialStabilisers,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::TransferEquations => "transfer equations",
            Hypothesis::CocycleIdentity => "a is a cocycle",
            Hypothesis::EssentialStabilisers => "a preserves essential stabilisers",
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `(phi, a)` from a triple whose `a` is a cocycle preserving essential
/// stabilisers; the inverse need not be `(phi^-1, b)`.
pub fn coe_to_isomorphism(src: &FinitePds, tgt: &FinitePds, t: &CoeTriple) -> Result<OrbitMorphism> {
    let report = validate_coe(src, tgt, t)?;
    if !report.equations_hold() {
        return Err(Error::Hypothesis(Hypothesis::TransferEquations));
    }
    if !report.a_is_cocycle {
        return Err(Error::Hypothesis(Hypothesis::CocycleIdentity));
    }
    if !check_preserves_stabilisers(src, tgt, t, true)?.is_empty() {
        return Err(Error::Hypothesis(Hypothesis::EssentialStabilisers));
    }
    let m = OrbitMorphism { phi: t.phi.clone(), cocycle: t.a.clone() };
    if !validate_orbit_morphism(src, tgt, &m).is_empty() || !is_isomorphism(src, tgt, &m)?.is_empty() {
        return Err(Error::Morphism("reconstructed pair is not an isomorphism".into()));
    }
    Ok(m)
}

fn check_enumeration_bounds(p: &FinitePds) -> Result<()> {
    let ok = !p.is_truncated()
        && p.space().len() <= ENUMERATION_MAX_POINTS
        && p.group().order().is_some_and(|n| n <= ENUMERATION_MAX_ORDER);
    if ok {
        Ok(())
    } else {
        Err(Error::Morphism(format!(
            "exhaustive enumeration needs explicit systems with at most {ENUMERATION_MAX_POINTS} points and group order at most {ENUMERATION_MAX_ORDER}"
        )))
    }
}

/// Every orbit morphism between two small explicit systems.
pub fn enumerate_orbit_morphisms(src: &FinitePds, tgt: &FinitePds) -> Result<Vec<OrbitMorphism>> {
    check_enumeration_bounds(src)?;
    check_enumeration_bounds(tgt)?;
    let (nx, ny) = (src.space().len(), tgt.space().len());
    let pairs = supported_pairs(src);
    let h_elems = tgt.group().elements().expect("finite target group");
    let mut out = Vec::new();
    if ny == 0 && nx > 0 {
        return Ok(out);
    }
    let total = ny.pow(nx as u32);
    for code in 0..total {
        let mut phi = Vec::with_capacity(nx);
        let mut c = code;
        for _ in 0..nx {
            phi.push(c % ny.max(1));
            c /= ny.max(1);
        }
        let options: Vec<Vec<GroupElement>> = pairs
            .iter()
            .map(|(g, x)| {
                let gx = src.act(g, *x).expect("supported");
                if src.group().is_identity(g) {
                    return vec![tgt.group().identity()];
                }
                h_elems.iter().filter(|h| tgt.act(h, phi[*x]) == Some(phi[gx])).cloned().collect()
            })
            .collect();
        let mut chosen: Vec<usize> = vec![0; pairs.len()];
        enumerate_choices(src, tgt, &phi, &pairs, &options, 0, &mut chosen, &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn enumerate_choices(
    src: &FinitePds,
    tgt: &FinitePds,
    phi: &[usize],
    pairs: &[(GroupElement, usize)],
    options: &[Vec<GroupElement>],
    depth: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<OrbitMorphism>,
) {
    if depth == pairs.len() {
        let cocycle: CocycleTable = pairs
            .iter()
            .zip(chosen.iter())
            .enumerate()
            .map(|(i, (p, &c))| (p.clone(), options[i][c].clone()))
            .collect();
        let m = OrbitMorphism { phi: phi.to_vec(), cocycle };
        if cocycle_failures(src, &m.cocycle, tgt.group()).is_empty() {
            out.push(m);
        }
        return;
    }
    for c in 0..options[depth].len() {
        chosen[depth] = c;
        enumerate_choices(src, tgt, phi, pairs, options, depth + 1, chosen, out);
    }
}

/// Every groupoid homomorphism between two complete groupoids, found from the
/// composition tables alone.
pub fn enumerate_groupoid_homs(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<Vec<GroupoidHom>> {
    if a.is_truncated() || b.is_truncated() {
        return Err(Error::Truncated("homomorphism enumeration needs complete tables".into()));
    }
    let (nu, mu) = (a.unit_count(), b.unit_count());
    let mut out = Vec::new();
    if mu == 0 && nu > 0 {
        return Ok(out);
    }
    let order: Vec<usize> = (0..a.arrow_count()).filter(|&i| !a.is_unit_arrow(i)).collect();
    for code in 0..mu.pow(nu as u32) {
        let mut unit_map = Vec::with_capacity(nu);
        let mut c = code;
        for _ in 0..nu {
            unit_map.push(c % mu.max(1));
            c /= mu.max(1);
        }
        let mut arrow_map: Vec<Option<usize>> = vec![None; a.arrow_count()];
        for u in 0..nu {
            arrow_map[a.unit_arrow(u)] = Some(b.unit_arrow(unit_map[u]));
        }
        extend_hom(a, b, &unit_map, &order, 0, &mut arrow_map, &mut out);
    }
    Ok(out)
}

fn extend_hom(
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
    unit_map: &[usize],
    order: &[usize],
    depth: usize,
    arrow_map: &mut Vec<Option<usize>>,
    out: &mut Vec<GroupoidHom>,
) {
    if depth == order.len() {
        let hom = GroupoidHom {
            unit_map: unit_map.to_vec(),
            arrow_map: arrow_map.iter().map(|x| x.expect("assigned")).collect(),
        };
        if crate::groupoid::validate_hom(a, b, &hom).is_empty() {
            out.push(hom);
        }
        return;
    }
    let i = order[depth];
    if arrow_map[i].is_some() {
        extend_hom(a, b, unit_map, order, depth + 1, arrow_map, out);
        return;
    }
    let (s, r) = (unit_map[a.source(i)], unit_map[a.range(i)]);
    for j in 0..b.arrow_count() {
        if b.source(j) != s || b.range(j) != r {
            continue;
        }
        let mut trial = arrow_map.clone();
        if force(a, b, &mut trial, i, j) {
            extend_hom(a, b, unit_map, order, depth + 1, &mut trial, out);
        }
    }
}

fn force(a: &FiniteGroupoid, b: &FiniteGroupoid, map: &mut [Option<usize>], start: usize, image: usize) -> bool {
    let mut queue = vec![(start, image)];
    while let Some((x, y)) = queue.pop() {
        match map[x] {
            Some(z) if z == y => continue,
            Some(_) => return false,
            None => {}
        }
        map[x] = Some(y);
        queue.push((a.inverse(x), b.inverse(y)));
        for other in 0..a.arrow_count() {
            let Some(oy) = map[other] else { continue };
            if let Some(p) = a.compose(x, other) {
                match b.compose(y, oy) {
                    Some(q) => queue.push((p, q)),
                    None => return false,
                }
            }
            if let Some(p) = a.compose(other, x) {
                match b.compose(oy, y) {
                    Some(q) => queue.push((p, q)),
                    None => return false,
                }
            }
        }
    }
    true
}
