//! Finite groupoids given by composition tables.
//!
//! Arrows are numbered densely. Composition is stored as a table over
//! composable pairs `(g, h)` with `s(g) = r(h)`, so groupoids that do not come
//! from a partial action are first-class. Transformation groupoids carry the
//! pair `(g, x)` of each arrow as a payload.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupDescriptor, GroupElement};
use crate::pds::{FinitePds, FiniteSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub source: usize,
    pub range: usize,
    pub payload: Option<(GroupElement, usize)>,
}

/// A groupoid with finitely many arrows.
///
/// When `truncated` is set the composition table may omit composable pairs;
/// everything present is still checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    units: Vec<String>,
    arrows: Vec<Arrow>,
    unit_arrow: Vec<usize>,
    inverse: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
    truncated: bool,
    index: HashMap<String, usize>,
}

impl FiniteGroupoid {
    /// Builds and validates a groupoid.
    ///
    /// `unit_arrow[u]` is the identity arrow at unit `u`, `inverse[i]` the
    /// inverse of arrow `i`, and `compose[(g, h)]` the product `gh`.
    pub fn new(
        units: Vec<String>,
        arrows: Vec<Arrow>,
        unit_arrow: Vec<usize>,
        inverse: Vec<usize>,
        compose: BTreeMap<(usize, usize), usize>,
        truncated: bool,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidGroupoid(m));
        let (nu, na) = (units.len(), arrows.len());
        let mut index = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if a.source >= nu || a.range >= nu {
                return bad(format!("arrow `{}` has an unknown endpoint", a.label));
            }
            if index.insert(a.label.clone(), i).is_some() {
                return bad(format!("duplicate arrow `{}`", a.label));
            }
        }
        if unit_arrow.len() != nu || inverse.len() != na {
            return bad("unit or inverse table has the wrong length".into());
        }
        for (u, &i) in unit_arrow.iter().enumerate() {
            if i >= na || arrows[i].source != u || arrows[i].range != u {
                return bad(format!("identity at `{}` is not a loop there", units[u]));
            }
        }
        for (i, &j) in inverse.iter().enumerate() {
            if j >= na || inverse[j] != i {
                return bad(format!("inverse of `{}` is not an involution", arrows[i].label));
            }
            if arrows[j].source != arrows[i].range || arrows[j].range != arrows[i].source {
                return bad(format!("inverse of `{}` has the wrong endpoints", arrows[i].label));
            }
        }
        for (&(g, h), &k) in &compose {
            if g >= na || h >= na || k >= na {
                return bad("composition refers to an unknown arrow".into());
            }
            if arrows[g].source != arrows[h].range {
                return bad(format!(
                    "`{}` and `{}` are not composable",
                    arrows[g].label, arrows[h].label
                ));
            }
            if arrows[k].source != arrows[h].source || arrows[k].range != arrows[g].range {
                return bad(format!(
                    "`{}{}` has the wrong endpoints",
                    arrows[g].label, arrows[h].label
                ));
            }
        }
        let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); nu];
        for (i, a) in arrows.iter().enumerate() {
            by_source[a.source].push(i);
        }
        for (h, ah) in arrows.iter().enumerate() {
            for &g in &by_source[ah.range] {
                if !compose.contains_key(&(g, h)) && !truncated {
                    return bad(format!("`{}{}` is missing", arrows[g].label, arrows[h].label));
                }
            }
        }
        for (i, a) in arrows.iter().enumerate() {
            let checks = [
                ((unit_arrow[a.range], i), i),
                ((i, unit_arrow[a.source]), i),
                ((i, inverse[i]), unit_arrow[a.range]),
                ((inverse[i], i), unit_arrow[a.source]),
            ];
            for (pair, want) in checks {
                match compose.get(&pair) {
                    Some(&k) if k != want => {
                        return bad(format!(
                            "unit or inverse law fails for `{}`",
                            arrows[i].label
                        ))
                    }
                    None if !truncated => unreachable!("completeness checked above"),
                    _ => {}
                }
            }
        }
        for (&(g, h), &gh) in &compose {
            // (f g) h = f (g h) for every f composable with g
            for &f in &by_source[arrows[g].range] {
                let (Some(&fg), Some(&f_gh)) = (compose.get(&(f, g)), compose.get(&(f, gh))) else {
                    continue;
                };
                if let Some(&fg_h) = compose.get(&(fg, h)) {
                    if fg_h != f_gh {
                        return bad(format!(
                            "composition is not associative at (`{}`, `{}`, `{}`)",
                            arrows[f].label, arrows[g].label, arrows[h].label
                        ));
                    }
                }
            }
        }
        Ok(FiniteGroupoid { units, arrows, unit_arrow, inverse, compose, truncated, index })
    }

    pub fn units(&self) -> &[String] {
        &self.units
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow(&self, i: usize) -> &Arrow {
        &self.arrows[i]
    }

    pub fn source(&self, i: usize) -> usize {
        self.arrows[i].source
    }

    pub fn range(&self, i: usize) -> usize {
        self.arrows[i].range
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn unit_arrow(&self, u: usize) -> usize {
        self.unit_arrow[u]
    }

    pub fn is_unit_arrow(&self, i: usize) -> bool {
        self.unit_arrow[self.arrows[i].source] == i
    }

    /// `gh`, when `s(g) = r(h)` and the product is tabulated.
    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.compose.get(&(g, h)).copied()
    }

    pub fn composition_table(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.compose
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn lookup_arrow(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn lookup_unit(&self, name: &str) -> Option<usize> {
        self.units.iter().position(|u| u == name)
    }

    /// Arrows with `s = r = u`.
    pub fn isotropy(&self, u: usize) -> Result<Vec<usize>> {
        if u >= self.units.len() {
            return Err(Error::UnknownPoint(format!("unit #{u}")));
        }
        Ok((0..self.arrows.len())
            .filter(|&i| self.arrows[i].source == u && self.arrows[i].range == u)
            .collect())
    }

    /// Arrows with source `u`.
    pub fn arrows_from(&self, u: usize) -> Vec<usize> {
        (0..self.arrows.len()).filter(|&i| self.arrows[i].source == u).collect()
    }

    /// The groupoid obtained by renaming units and reordering arrows.
    ///
    /// `unit_perm[u]` and `arrow_perm[i]` give new positions.
    pub fn relabeled(&self, unit_perm: &[usize], arrow_perm: &[usize], tag: &str) -> Result<Self> {
        let nu = self.units.len();
        let na = self.arrows.len();
        let mut units = vec![String::new(); nu];
        for (u, name) in self.units.iter().enumerate() {
            units[unit_perm[u]] = format!("{name}{tag}");
        }
        let mut arrows: Vec<Option<Arrow>> = vec![None; na];
        for (i, a) in self.arrows.iter().enumerate() {
            arrows[arrow_perm[i]] = Some(Arrow {
                label: format!("{}{tag}", a.label),
                source: unit_perm[a.source],
                range: unit_perm[a.range],
                payload: a.payload.clone().map(|(g, x)| (g, unit_perm[x])),
            });
        }
        let mut unit_arrow = vec![0; nu];
        for (u, &i) in self.unit_arrow.iter().enumerate() {
            unit_arrow[unit_perm[u]] = arrow_perm[i];
        }
        let mut inverse = vec![0; na];
        for (i, &j) in self.inverse.iter().enumerate() {
            inverse[arrow_perm[i]] = arrow_perm[j];
        }
        let compose = self
            .compose
            .iter()
            .map(|(&(g, h), &k)| ((arrow_perm[g], arrow_perm[h]), arrow_perm[k]))
            .collect();
        FiniteGroupoid::new(
            units,
            arrows.into_iter().map(|a| a.expect("arrow_perm is a permutation")).collect(),
            unit_arrow,
            inverse,
            compose,
            self.truncated,
        )
    }

    /// Graphviz rendering: units as boxes and non-identity arrows as edges from
    /// source to range, labelled by their group element when known.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph groupoid {\n");
        let mut units: Vec<usize> = (0..self.units.len()).collect();
        units.sort_by(|&a, &b| self.units[a].cmp(&self.units[b]));
        for u in units {
            let _ = writeln!(out, "  \"{}\" [shape=box];", escape(&self.units[u]));
        }
        let mut edges: Vec<(String, String, String)> = self
            .arrows
            .iter()
            .enumerate()
            .filter(|&(i, _)| !self.is_unit_arrow(i))
            .map(|(_, a)| {
                let label = match &a.payload {
                    Some(_) => a.label.split('@').next().unwrap_or(&a.label).to_string(),
                    None => a.label.clone(),
                };
                (self.units[a.source].clone(), self.units[a.range].clone(), label)
            })
            .collect();
        edges.sort();
        for (s, r, l) in edges {
            let _ = writeln!(out, "  \"{}\" -> \"{}\" [label=\"{}\"];", escape(&s), escape(&r), escape(&l));
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds a groupoid from labelled arrows and a product closure.
///
/// `product(g, h)` returns the label of `gh` or `None` when it falls outside the
/// tabulated part, in which case the result is flagged truncated.
pub(crate) fn assemble(
    units: Vec<String>,
    arrows: Vec<Arrow>,
    unit_labels: Vec<String>,
    inverse_label: impl Fn(&Arrow) -> String,
    product: impl Fn(&Arrow, &Arrow) -> Option<String>,
    force_truncated: bool,
) -> Result<FiniteGroupoid> {
    let index: HashMap<&str, usize> = arrows.iter().enumerate().map(|(i, a)| (a.label.as_str(), i)).collect();
    let find = |l: &str| {
        index
            .get(l)
            .copied()
            .ok_or_else(|| Error::InvalidGroupoid(format!("arrow `{l}` is not present")))
    };
    let unit_arrow = unit_labels.iter().map(|l| find(l)).collect::<Result<Vec<_>>>()?;
    let inverse = arrows.iter().map(|a| find(&inverse_label(a))).collect::<Result<Vec<_>>>()?;
    let mut by_source: Vec<Vec<usize>> = vec![Vec::new(); units.len()];
    for (i, a) in arrows.iter().enumerate() {
        by_source[a.source].push(i);
    }
    let mut compose = BTreeMap::new();
    let mut truncated = force_truncated;
    for (h, ah) in arrows.iter().enumerate() {
        for &g in &by_source[ah.range] {
            match product(&arrows[g], ah).and_then(|l| index.get(l.as_str()).copied()) {
                Some(k) => {
                    compose.insert((g, h), k);
                }
                None => truncated = true,
            }
        }
    }
    FiniteGroupoid::new(units, arrows, unit_arrow, inverse, compose, truncated)
}

/// Arrow label of the pair `(g, x)` in a transformation groupoid.
pub fn payload_label(group: &GroupDescriptor, space: &FiniteSpace, g: &GroupElement, x: usize) -> String {
    format!("{}@{}", group.format_element(g), space.name(x))
}

/// `G ⋉ X`: arrows `(g, x)` with `x ∈ U_{g^-1}`, `s(g, x) = x`, `r(g, x) = g.x`,
/// `(g1, g2.x)(g2, x) = (g1 g2, x)` and `(g, x)^-1 = (g^-1, g.x)`.
///
/// For generated systems only the tabulated words give arrows; products
/// leaving the table are omitted and the result is flagged truncated.
pub fn transformation_groupoid(pds: &FinitePds) -> Result<FiniteGroupoid> {
    let violations = pds.validate();
    if let Some(v) = violations.first() {
        return Err(Error::InvalidSystem(v.describe(pds)));
    }
    let group = pds.group();
    let space = pds.space();
    let mut arrows = Vec::new();
    for (g, map) in pds.table() {
        for (x, y) in map.pairs() {
            arrows.push(Arrow {
                label: payload_label(group, space, g, x),
                source: x,
                range: y,
                payload: Some((g.clone(), x)),
            });
        }
    }
    let e = group.identity();
    let unit_labels = (0..space.len()).map(|x| payload_label(group, space, &e, x)).collect();
    let inverse_label = |a: &Arrow| {
        let (g, _) = a.payload.as_ref().expect("payload set above");
        payload_label(group, space, &group.inverse(g).expect("member"), a.range)
    };
    let product = |a: &Arrow, b: &Arrow| {
        let (g1, _) = a.payload.as_ref()?;
        let (g2, x) = b.payload.as_ref()?;
        let g = group.multiply(g1, g2).ok()?;
        Some(payload_label(group, space, &g, *x))
    };
    assemble(
        space.names().to_vec(),
        arrows,
        unit_labels,
        inverse_label,
        product,
        pds.is_truncated(),
    )
}

/// The pair groupoid `X × X` on `n` units, with arrow `(i, j)` going from `j` to `i`.
pub fn pair_groupoid(n: usize) -> FiniteGroupoid {
    let units: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let label = |i: usize, j: usize| if i == j { format!("u{i}") } else { format!("p{i}_{j}") };
    let mut arrows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            arrows.push(Arrow { label: label(i, j), source: j, range: i, payload: None });
        }
    }
    let unit_labels = (0..n).map(|i| label(i, i)).collect();
    assemble(
        units,
        arrows,
        unit_labels,
        |a| label(a.source, a.range),
        |a, b| Some(label(a.range, b.source)),
        false,
    )
    .expect("pair groupoid is a groupoid")
}

/// `G × X` with `G` acting trivially, where `X` has `n` points.
pub fn group_bundle(group: &FiniteGroup, n: usize) -> FiniteGroupoid {
    transformation_groupoid(&crate::pds::instances::trivial(group.clone(), n)).expect("trivial action is valid")
}

/// A finite group as a groupoid with one unit.
pub fn group_as_groupoid(group: &FiniteGroup) -> FiniteGroupoid {
    group_bundle(group, 1)
}

/// Payload-free groupoid with only identity arrows.
pub fn unit_groupoid(n: usize) -> FiniteGroupoid {
    let units: Vec<String> = (0..n).map(|i| format!("u{i}")).collect();
    let arrows = units
        .iter()
        .enumerate()
        .map(|(i, u)| Arrow { label: u.clone(), source: i, range: i, payload: None })
        .collect();
    let compose = (0..n).map(|i| ((i, i), i)).collect();
    FiniteGroupoid::new(units, arrows, (0..n).collect(), (0..n).collect(), compose, false)
        .expect("unit groupoid is a groupoid")
}

/// `Iso(G ⋉ X)°` as the pairs `(g, x)` with `g ∈ Stab^ess(x)`.
pub fn isotropy_interior(pds: &FinitePds) -> Result<Vec<(GroupElement, usize)>> {
    let mut out = Vec::new();
    for x in 0..pds.space().len() {
        for g in pds.essential_stabiliser(x)?.elements {
            out.push((g, x));
        }
    }
    Ok(out)
}

/// Outcome of a torsion-freeness and commutativity probe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TorsionReport {
    /// `(unit, g, h)` with `gh != hg`.
    pub noncommuting: Vec<(usize, String, String)>,
    /// `(unit, g, m)` with `g != 1` and `g^m = 1`.
    pub torsion: Vec<(usize, String, u32)>,
    /// Some products needed by the probe were not available.
    pub truncated: bool,
}

impl TorsionReport {
    pub fn torsion_free_abelian(&self) -> bool {
        self.noncommuting.is_empty() && self.torsion.is_empty()
    }
}

/// Checks every isotropy group for commutativity and for elements of order
/// `2..=max_exponent`.
pub fn check_torsion_free_abelian(gpd: &FiniteGroupoid, max_exponent: u32) -> TorsionReport {
    let mut report = TorsionReport { truncated: gpd.is_truncated(), ..Default::default() };
    for u in 0..gpd.unit_count() {
        let iso = gpd.isotropy(u).expect("unit in range");
        let unit = gpd.unit_arrow(u);
        for &g in &iso {
            for &h in &iso {
                if g < h {
                    if let (Some(gh), Some(hg)) = (gpd.compose(g, h), gpd.compose(h, g)) {
                        if gh != hg {
                            report.noncommuting.push((u, gpd.arrow(g).label.clone(), gpd.arrow(h).label.clone()));
                        }
                    }
                }
            }
            if g == unit {
                continue;
            }
            let mut power = g;
            for m in 2..=max_exponent {
                match gpd.compose(power, g) {
                    Some(p) => power = p,
                    None => break,
                }
                if power == unit {
                    report.torsion.push((u, gpd.arrow(g).label.clone(), m));
                    break;
                }
            }
        }
    }
    report
}

/// The same probe run on the stabilisers of a partial action.
pub fn check_stabilisers_torsion_free_abelian(pds: &FinitePds, max_exponent: u32) -> TorsionReport {
    let group = pds.group();
    let mut report = TorsionReport { truncated: pds.is_truncated(), ..Default::default() };
    let e = group.identity();
    for x in 0..pds.space().len() {
        let stab = pds.essential_stabiliser(x).expect("point in range").elements;
        for g in &stab {
            for h in &stab {
                if g < h && group.multiply(g, h).ok() != group.multiply(h, g).ok() {
                    report.noncommuting.push((x, group.format_element(g), group.format_element(h)));
                }
            }
            if *g == e {
                continue;
            }
            for m in 2..=max_exponent {
                if group.pow(g, m as i64).ok().as_ref() == Some(&e) {
                    report.torsion.push((x, group.format_element(g), m));
                    break;
                }
            }
        }
    }
    report
}

/// A map of units and arrows between two groupoids.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidHom {
    pub unit_map: Vec<usize>,
    pub arrow_map: Vec<usize>,
}

impl GroupoidHom {
    pub fn identity(gpd: &FiniteGroupoid) -> Self {
        GroupoidHom { unit_map: (0..gpd.unit_count()).collect(), arrow_map: (0..gpd.arrow_count()).collect() }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &GroupoidHom) -> Self {
        GroupoidHom {
            unit_map: first.unit_map.iter().map(|&u| self.unit_map[u]).collect(),
            arrow_map: first.arrow_map.iter().map(|&a| self.arrow_map[a]).collect(),
        }
    }

    /// Inverse of a bijective map.
    pub fn inverse(&self) -> Option<Self> {
        let inv = |v: &[usize]| {
            let mut out = vec![usize::MAX; v.len()];
            for (i, &j) in v.iter().enumerate() {
                if j >= v.len() || out[j] != usize::MAX {
                    return None;
                }
                out[j] = i;
            }
            Some(out)
        };
        Some(GroupoidHom { unit_map: inv(&self.unit_map)?, arrow_map: inv(&self.arrow_map)? })
    }
}

/// Why a map fails to be a groupoid homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomViolation {
    Shape,
    UnitNotPreserved { unit: usize },
    SourceRange { arrow: usize },
    Composability { g: usize, h: usize },
    Composition { g: usize, h: usize },
    Inverse { arrow: usize },
}

/// Checks units, endpoints, composability, composition and inverses.
pub fn validate_hom(src: &FiniteGroupoid, tgt: &FiniteGroupoid, hom: &GroupoidHom) -> Vec<HomViolation> {
    if hom.unit_map.len() != src.unit_count()
        || hom.arrow_map.len() != src.arrow_count()
        || hom.unit_map.iter().any(|&u| u >= tgt.unit_count())
        || hom.arrow_map.iter().any(|&a| a >= tgt.arrow_count())
    {
        return vec![HomViolation::Shape];
    }
    let mut out = Vec::new();
    for u in 0..src.unit_count() {
        if hom.arrow_map[src.unit_arrow(u)] != tgt.unit_arrow(hom.unit_map[u]) {
            out.push(HomViolation::UnitNotPreserved { unit: u });
        }
    }
    for i in 0..src.arrow_count() {
        let j = hom.arrow_map[i];
        if tgt.source(j) != hom.unit_map[src.source(i)] || tgt.range(j) != hom.unit_map[src.range(i)] {
            out.push(HomViolation::SourceRange { arrow: i });
        }
        if hom.arrow_map[src.inverse(i)] != tgt.inverse(j) {
            out.push(HomViolation::Inverse { arrow: i });
        }
    }
    for (&(g, h), &gh) in src.composition_table() {
        let (tg, th) = (hom.arrow_map[g], hom.arrow_map[h]);
        if tgt.source(tg) != tgt.range(th) {
            out.push(HomViolation::Composability { g, h });
            continue;
        }
        match tgt.compose(tg, th) {
            Some(k) if k == hom.arrow_map[gh] => {}
            None if tgt.is_truncated() => {}
            _ => out.push(HomViolation::Composition { g, h }),
        }
    }
    out
}

#[derive(Clone)]
struct SearchState {
    arrow_map: Vec<Option<usize>>,
    arrow_used: Vec<bool>,
    unit_map: Vec<Option<usize>>,
    unit_used: Vec<bool>,
}

fn arrow_signature(g: &FiniteGroupoid, i: usize, iso_sizes: &[usize], out_sizes: &[usize]) -> (bool, bool, usize, usize, usize, usize) {
    let a = g.arrow(i);
    let order = if a.source == a.range {
        let unit = g.unit_arrow(a.source);
        let mut p = i;
        let mut m = 1;
        while p != unit && m <= g.arrow_count() {
            p = g.compose(p, i).unwrap_or(unit);
            m += 1;
        }
        m
    } else {
        0
    };
    (
        g.is_unit_arrow(i),
        a.source == a.range,
        iso_sizes[a.source],
        iso_sizes[a.range],
        out_sizes[a.source],
        order,
    )
}

/// Searches for an isomorphism by propagating forced arrow images.
///
/// Refuses truncated groupoids: a truncated table cannot witness that a map is
/// a homomorphism on the whole groupoid.
pub fn find_groupoid_isomorphism(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<Option<GroupoidHom>> {
    if a.is_truncated() || b.is_truncated() {
        return Err(Error::Truncated("isomorphism search needs complete composition tables".into()));
    }
    if a.unit_count() != b.unit_count() || a.arrow_count() != b.arrow_count() {
        return Ok(None);
    }
    let sizes = |g: &FiniteGroupoid| {
        let iso: Vec<usize> = (0..g.unit_count()).map(|u| g.isotropy(u).map(|v| v.len()).unwrap_or(0)).collect();
        let out: Vec<usize> = (0..g.unit_count()).map(|u| g.arrows_from(u).len()).collect();
        (iso, out)
    };
    let (ia, oa) = sizes(a);
    let (ib, ob) = sizes(b);
    let sig_a: Vec<_> = (0..a.arrow_count()).map(|i| arrow_signature(a, i, &ia, &oa)).collect();
    let sig_b: Vec<_> = (0..b.arrow_count()).map(|i| arrow_signature(b, i, &ib, &ob)).collect();
    let mut sa = sig_a.clone();
    let mut sb = sig_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return Ok(None);
    }
    let state = SearchState {
        arrow_map: vec![None; a.arrow_count()],
        arrow_used: vec![false; b.arrow_count()],
        unit_map: vec![None; a.unit_count()],
        unit_used: vec![false; b.unit_count()],
    };
    let found = search(a, b, &sig_a, &sig_b, state);
    Ok(found.map(|s| GroupoidHom {
        unit_map: s.unit_map.into_iter().map(|u| u.expect("complete")).collect(),
        arrow_map: s.arrow_map.into_iter().map(|x| x.expect("complete")).collect(),
    }))
}

fn search<S: PartialEq>(
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
    sig_a: &[S],
    sig_b: &[S],
    state: SearchState,
) -> Option<SearchState> {
    let Some(next) = (0..a.arrow_count()).find(|&i| state.arrow_map[i].is_none()) else {
        let hom = GroupoidHom {
            unit_map: state.unit_map.iter().map(|u| u.expect("complete")).collect(),
            arrow_map: state.arrow_map.iter().map(|x| x.expect("complete")).collect(),
        };
        return validate_hom(a, b, &hom).is_empty().then_some(state);
    };
    for cand in 0..b.arrow_count() {
        if state.arrow_used[cand] || sig_a[next] != sig_b[cand] {
            continue;
        }
        let mut trial = state.clone();
        if propagate(a, b, &mut trial, next, cand) {
            if let Some(done) = search(a, b, sig_a, sig_b, trial) {
                return Some(done);
            }
        }
    }
    None
}

fn propagate(a: &FiniteGroupoid, b: &FiniteGroupoid, st: &mut SearchState, start: usize, image: usize) -> bool {
    let mut queue = vec![(start, image)];
    while let Some((x, y)) = queue.pop() {
        match st.arrow_map[x] {
            Some(z) if z == y => continue,
            Some(_) => return false,
            None => {}
        }
        if st.arrow_used[y] || a.is_unit_arrow(x) != b.is_unit_arrow(y) {
            return false;
        }
        for (ua, ub) in [(a.source(x), b.source(y)), (a.range(x), b.range(y))] {
            match st.unit_map[ua] {
                Some(v) if v != ub => return false,
                Some(_) => {}
                None => {
                    if st.unit_used[ub] {
                        return false;
                    }
                    st.unit_map[ua] = Some(ub);
                    st.unit_used[ub] = true;
                    queue.push((a.unit_arrow(ua), b.unit_arrow(ub)));
                }
            }
        }
        st.arrow_map[x] = Some(y);
        st.arrow_used[y] = true;
        queue.push((a.inverse(x), b.inverse(y)));
        for other in 0..a.arrow_count() {
            let Some(oy) = st.arrow_map[other] else { continue };
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

/// Unit names of `pds` as a set, for cross-checks against isotropy.
pub fn isotropy_pairs(gpd: &FiniteGroupoid) -> BTreeSet<(GroupElement, usize)> {
    gpd.arrows()
        .iter()
        .filter(|a| a.source == a.range)
        .filter_map(|a| a.payload.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pds::instances::*;

    #[test]
    fn swap_groupoid() {
        let g = transformation_groupoid(&swap()).unwrap();
        assert_eq!(g.arrow_count(), 4);
        assert_eq!(g.unit_count(), 2);
        let gx0 = g.lookup_arrow("g@x0").unwrap();
        assert_eq!(g.range(gx0), 1);
        assert_eq!(g.source(gx0), 0);
        assert_eq!(g.isotropy(0).unwrap(), vec![g.lookup_arrow("e@x0").unwrap()]);
        assert!(!g.is_truncated());
        assert!(check_torsion_free_abelian(&g, 5).torsion_free_abelian());
    }

    #[test]
    fn truncated_shift_groupoid() {
        let g = transformation_groupoid(&z_shift(2)).unwrap();
        // two units, 1@x0 and -1@x1, nothing of length two
        assert_eq!(g.arrow_count(), 4);
        assert!(g.is_truncated());
        assert!(find_groupoid_isomorphism(&g, &g).is_err());
    }

    #[test]
    fn trivial_action_is_a_bundle() {
        let b = group_bundle(&FiniteGroup::cyclic(2), 1);
        assert_eq!(b.arrow_count(), 2);
        assert_eq!(b.isotropy(0).unwrap().len(), 2);
        let r = check_torsion_free_abelian(&b, 5);
        assert_eq!(r.torsion.len(), 1);
        assert_eq!(r.torsion[0].2, 2);
    }

    #[test]
    fn pair_groupoid_is_principal() {
        let p = pair_groupoid(2);
        assert_eq!(p.arrow_count(), 4);
        for u in 0..2 {
            assert_eq!(p.isotropy(u).unwrap(), vec![p.unit_arrow(u)]);
        }
        assert!(check_torsion_free_abelian(&p, 5).torsion_free_abelian());
    }

    #[test]
    fn interior_matches_isotropy() {
        for pds in [swap(), trivial(FiniteGroup::cyclic(3), 2), z_swap(3)] {
            let g = transformation_groupoid(&pds).unwrap();
            let interior: BTreeSet<_> = isotropy_interior(&pds).unwrap().into_iter().collect();
            assert_eq!(interior, isotropy_pairs(&g));
        }
    }

    #[test]
    fn homomorphism_checks() {
        let s = transformation_groupoid(&swap()).unwrap();
        assert!(validate_hom(&s, &s, &GroupoidHom::identity(&s)).is_empty());

        let bundle = group_bundle(&FiniteGroup::cyclic(2), 1);
        let units = unit_groupoid(1);
        let collapse = GroupoidHom { unit_map: vec![0], arrow_map: vec![0, 0] };
        assert!(validate_hom(&bundle, &units, &collapse).is_empty());

        let p = pair_groupoid(2);
        let mut swapped = GroupoidHom::identity(&p);
        swapped.unit_map = vec![1, 0];
        assert!(!validate_hom(&p, &p, &swapped).is_empty());
    }

    #[test]
    fn isomorphism_search() {
        let s = transformation_groupoid(&swap()).unwrap();
        let h = find_groupoid_isomorphism(&s, &s).unwrap().unwrap();
        assert!(validate_hom(&s, &s, &h).is_empty());

        let bundle = group_bundle(&FiniteGroup::cyclic(2), 2);
        let pair = pair_groupoid(2);
        assert_eq!(bundle.arrow_count(), pair.arrow_count());
        assert_eq!(find_groupoid_isomorphism(&bundle, &pair).unwrap(), None);
        let b2 = group_bundle(&FiniteGroup::cyclic(2), 1);
        let p2 = pair_groupoid(2);
        assert_eq!(find_groupoid_isomorphism(&b2, &p2).unwrap(), None);

        let k = group_bundle(&FiniteGroup::klein_four(), 2);
        let relabeled = k.relabeled(&[1, 0], &(0..8).rev().collect::<Vec<_>>(), "'").unwrap();
        let h = find_groupoid_isomorphism(&k, &relabeled).unwrap().unwrap();
        assert!(validate_hom(&k, &relabeled, &h).is_empty());
        let c4 = group_bundle(&FiniteGroup::cyclic(4), 2);
        assert_eq!(find_groupoid_isomorphism(&k, &c4).unwrap(), None);
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let p = pair_groupoid(2);
        let mut compose = p.composition_table().clone();
        let first = *compose.keys().next().unwrap();
        compose.remove(&first);
        let r = FiniteGroupoid::new(
            p.units().to_vec(),
            p.arrows().to_vec(),
            (0..2).map(|u| p.unit_arrow(u)).collect(),
            (0..4).map(|i| p.inverse(i)).collect(),
            compose,
            false,
        );
        assert!(r.is_err());
    }

    #[test]
    fn dot_output_is_sorted() {
        let dot = transformation_groupoid(&swap()).unwrap().to_dot();
        assert_eq!(
            dot,
            "digraph groupoid {\n  \"x0\" [shape=box];\n  \"x1\" [shape=box];\n  \"x0\" -> \"x1\" [label=\"g\"];\n  \"x1\" -> \"x0\" [label=\"g\"];\n}\n"
        );
    }
}
