//! Partial dynamical systems on finite discrete spaces.
//!
//! A system assigns to each group element `g` a partial bijection
//! `phi_g : U_{g^-1} -> U_g`. Systems are stored either explicitly, as a finite
//! table whose missing entries are empty maps, or as semi-saturated actions of
//! a free group (or the integers) generated by one partial bijection per
//! generator and tabulated up to a word-length bound.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::groups::{ball_size, FreeWord, GroupDescriptor, GroupElement, Letter, MAX_BALL_SIZE};

/// Ordered set of named points.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FiniteSpace {
    points: Vec<String>,
    index: HashMap<String, usize>,
}

impl FiniteSpace {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(points: I) -> Result<Self> {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if p.is_empty() || p.chars().any(|c| c.is_whitespace() || ",()[]#=".contains(c)) {
                return Err(Error::UnknownPoint(p.clone()));
            }
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::InvalidSystem(format!("duplicate point `{p}`")));
            }
        }
        Ok(FiniteSpace { points, index })
    }

    /// Points named `prefix0, prefix1, ...`.
    pub fn numbered(prefix: &str, n: usize) -> Self {
        FiniteSpace::new((0..n).map(|i| format!("{prefix}{i}"))).expect("numbered names are distinct")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.points
    }

    pub fn name(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }
}

/// An injective partial map on point indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialBijection {
    map: BTreeMap<usize, usize>,
}

impl PartialBijection {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn identity(n: usize) -> Self {
        PartialBijection { map: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for (x, y) in pairs {
            if let Some(old) = map.insert(x, y) {
                if old != y {
                    return Err(Error::NotInjective(format!("point #{x} has two images")));
                }
                continue;
            }
            if !seen.insert(y) {
                return Err(Error::NotInjective(format!("point #{y} has two preimages")));
            }
        }
        Ok(PartialBijection { map })
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    /// `U_{g^-1}` for the map `phi_g`.
    pub fn domain(&self) -> BTreeSet<usize> {
        self.map.keys().copied().collect()
    }

    /// `U_g` for the map `phi_g`.
    pub fn range(&self) -> BTreeSet<usize> {
        self.map.values().copied().collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.map.contains_key(&x)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&x, &y)| (x, y))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn inverse(&self) -> Self {
        PartialBijection { map: self.map.iter().map(|(&x, &y)| (y, x)).collect() }
    }

    /// `self ∘ first`, defined where `first` lands in the domain of `self`.
    pub fn after(&self, first: &PartialBijection) -> Self {
        PartialBijection {
            map: first
                .map
                .iter()
                .filter_map(|(&x, y)| self.map.get(y).map(|&z| (x, z)))
                .collect(),
        }
    }

    pub fn max_point(&self) -> Option<usize> {
        self.map.iter().map(|(&x, &y)| x.max(y)).max()
    }

    /// Conjugates by a point relabeling `perm` (old index to new index).
    pub fn relabel(&self, perm: &[usize]) -> Self {
        PartialBijection { map: self.map.iter().map(|(&x, &y)| (perm[x], perm[y])).collect() }
    }
}

/// How the table of a system was produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generation {
    /// A finite table; unlisted elements act by the empty map.
    Explicit,
    /// Semi-saturated extension of generator maps, tabulated for words of length `<= bound`.
    SemiSaturated { generators: BTreeMap<u32, PartialBijection>, bound: usize },
    /// Every word of length `<= bound`, tabulated by the caller.
    Bounded { bound: usize },
}

/// A partial action of a group on a finite discrete space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePds {
    space: FiniteSpace,
    group: GroupDescriptor,
    table: BTreeMap<GroupElement, PartialBijection>,
    generation: Generation,
}

/// The clause of the partial-action axioms a violation breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Clause {
    /// `U_e = X` and `phi_e = id_X`.
    Identity,
    /// `g` is stored but `g^-1` is not.
    MissingInverse,
    /// `phi_{g^-1}` is not the inverse of `phi_g`.
    InverseMismatch,
    /// `g2.(U_{(g1 g2)^-1} ∩ U_{g2^-1}) = U_{g2} ∩ U_{g1^-1}`.
    DomainCompatibility,
    /// `g1.(U_{g1^-1} ∩ U_{g2}) = U_{g1} ∩ U_{g1 g2}`.
    DualDomainCompatibility,
    /// `(g1 g2).x = g1.(g2.x)` on `U_{g2^-1} ∩ U_{(g1 g2)^-1}`.
    Composition,
}

impl Clause {
    pub fn code(self) -> &'static str {
        match self {
            Clause::Identity => "identity",
            Clause::MissingInverse => "inverse-closure",
            Clause::InverseMismatch => "inverse-map",
            Clause::DomainCompatibility => "domain-compatibility",
            Clause::DualDomainCompatibility => "dual-domain-compatibility",
            Clause::Composition => "composition",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Clause::Identity => "U_e = X and phi_e = id_X",
            Clause::MissingInverse => "U_g and U_{g^-1} are given together",
            Clause::InverseMismatch => "phi_{g^-1} = phi_g^-1",
            Clause::DomainCompatibility => "g2.(U_{(g1g2)^-1} ∩ U_{g2^-1}) = U_{g2} ∩ U_{g1^-1}",
            Clause::DualDomainCompatibility => "g1.(U_{g1^-1} ∩ U_{g2}) = U_{g1} ∩ U_{g1g2}",
            Clause::Composition => "(g1g2).x = g1.(g2.x) on U_{g2^-1} ∩ U_{(g1g2)^-1}",
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// One failed instance of an axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub g1: Option<GroupElement>,
    pub g2: Option<GroupElement>,
    pub point: Option<usize>,
}

impl Violation {
    pub fn describe(&self, pds: &FinitePds) -> String {
        let mut out = format!("{}: {}", self.clause.code(), self.clause.statement());
        let g = pds.group();
        if let Some(g1) = &self.g1 {
            out.push_str(&format!("; g1 = {}", g.format_element(g1)));
        }
        if let Some(g2) = &self.g2 {
            out.push_str(&format!("; g2 = {}", g.format_element(g2)));
        }
        if let Some(x) = self.point {
            if x < pds.space().len() {
                out.push_str(&format!("; x = {}", pds.space().name(x)));
            }
        }
        out
    }
}

/// A list of group elements, flagged when it comes from a bounded table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementList {
    pub elements: Vec<GroupElement>,
    /// Word-length bound the list is relative to, if any.
    pub truncated_at: Option<usize>,
}

impl ElementList {
    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_at.is_some()
    }
}

impl FinitePds {
    /// An explicitly tabulated system.
    ///
    /// The identity is added as `id_X` and every entry whose inverse is absent
    /// gets the inverse map; entries given for both `g` and `g^-1` are kept as
    /// they are, so inconsistent input is reported by [`validate`](Self::validate).
    pub fn explicit(
        space: FiniteSpace,
        group: GroupDescriptor,
        entries: impl IntoIterator<Item = (GroupElement, PartialBijection)>,
    ) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (g, map) in entries {
            if !group.contains(&g) {
                return Err(Error::DescriptorMismatch {
                    element: format!("{g:?}"),
                    group: format!("{} group", group.kind_name()),
                });
            }
            if table.insert(g.clone(), map).is_some() {
                return Err(Error::InvalidSystem(format!(
                    "element `{}` listed twice",
                    group.format_element(&g)
                )));
            }
        }
        table
            .entry(group.identity())
            .or_insert_with(|| PartialBijection::identity(space.len()));
        let missing: Vec<(GroupElement, PartialBijection)> = table
            .iter()
            .filter_map(|(g, map)| {
                let gi = group.inverse(g).ok()?;
                (!table.contains_key(&gi)).then(|| (gi, map.inverse()))
            })
            .collect();
        table.extend(missing);
        Self::from_parts(space, group, table, Generation::Explicit)
    }

    /// Assembles a system from a table without adding anything.
    pub fn from_parts(
        space: FiniteSpace,
        group: GroupDescriptor,
        table: BTreeMap<GroupElement, PartialBijection>,
        generation: Generation,
    ) -> Result<Self> {
        for (g, map) in &table {
            if !group.contains(g) {
                return Err(Error::DescriptorMismatch {
                    element: format!("{g:?}"),
                    group: format!("{} group", group.kind_name()),
                });
            }
            if map.max_point().is_some_and(|m| m >= space.len()) {
                return Err(Error::UnknownPoint(format!("#{}", map.max_point().unwrap_or(0))));
            }
        }
        if let Generation::SemiSaturated { generators, .. } = &generation {
            if generators.values().any(|m| m.max_point().is_some_and(|p| p >= space.len())) {
                return Err(Error::InvalidSystem("generator map leaves the space".into()));
            }
        }
        Ok(FinitePds { space, group, table, generation })
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn generation(&self) -> &Generation {
        &self.generation
    }

    pub fn table(&self) -> &BTreeMap<GroupElement, PartialBijection> {
        &self.table
    }

    /// Word-length bound for generated systems.
    pub fn truncation(&self) -> Option<usize> {
        match &self.generation {
            Generation::Explicit => None,
            Generation::SemiSaturated { bound, .. } | Generation::Bounded { bound } => Some(*bound),
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation().is_some()
    }

    /// Supported elements in table order.
    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.table.keys()
    }

    pub fn map(&self, g: &GroupElement) -> Option<&PartialBijection> {
        self.table.get(g)
    }

    /// Returns a copy with the entry for `g` replaced and nothing else touched.
    pub fn with_entry(&self, g: GroupElement, map: PartialBijection) -> Self {
        let mut out = self.clone();
        out.table.insert(g, map);
        out
    }

    /// Returns a copy without the entry for `g`.
    pub fn without_entry(&self, g: &GroupElement) -> Self {
        let mut out = self.clone();
        out.table.remove(g);
        out
    }

    fn stored_or_empty(&self, g: &GroupElement) -> PartialBijection {
        self.table.get(g).cloned().unwrap_or_default()
    }

    fn in_bound(&self, g: &GroupElement) -> bool {
        match self.truncation() {
            None => true,
            Some(n) => self.group.norm(g).is_some_and(|l| l <= n),
        }
    }

    /// Evaluates `phi_g` by composing generator maps along the reduced spelling.
    fn generated_map(&self, g: &GroupElement) -> Option<PartialBijection> {
        let Generation::SemiSaturated { generators, .. } = &self.generation else {
            return None;
        };
        let word = match g {
            GroupElement::Word(w) => w.clone(),
            GroupElement::Int(n) => crate::groups::int_to_word(*n),
            _ => return None,
        };
        Some(spell(&self.space, generators, &word))
    }

    /// `g.x`, or `None` when `x ∉ U_{g^-1}`.
    pub fn act(&self, g: &GroupElement, x: usize) -> Option<usize> {
        match self.table.get(g) {
            Some(map) => map.apply(x),
            None => self.generated_map(g).and_then(|m| m.apply(x)),
        }
    }

    /// Checks both forms of the domain axiom, the composition law, the
    /// identity axiom and inverse consistency.
    ///
    /// Explicit tables are checked on every pair of stored elements, with
    /// missing products read as empty maps. Generated tables are checked on
    /// pairs whose product lies within the bound.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.space.len();
        let e = self.group.identity();
        match self.table.get(&e) {
            Some(m) if *m == PartialBijection::identity(n) => {}
            Some(m) => {
                let witness = (0..n).find(|&x| m.apply(x) != Some(x));
                out.push(Violation { clause: Clause::Identity, g1: Some(e.clone()), g2: None, point: witness });
            }
            None => out.push(Violation { clause: Clause::Identity, g1: Some(e.clone()), g2: None, point: None }),
        }
        for (g, map) in &self.table {
            let Ok(gi) = self.group.inverse(g) else { continue };
            match self.table.get(&gi) {
                None if self.in_bound(&gi) => out.push(Violation {
                    clause: Clause::MissingInverse,
                    g1: Some(g.clone()),
                    g2: None,
                    point: None,
                }),
                None => {}
                Some(inv) => {
                    if *inv != map.inverse() {
                        let witness = map
                            .pairs()
                            .find(|&(x, y)| inv.apply(y) != Some(x))
                            .map(|(x, _)| x)
                            .or_else(|| inv.pairs().find(|&(y, x)| map.apply(x) != Some(y)).map(|(y, _)| y));
                        out.push(Violation {
                            clause: Clause::InverseMismatch,
                            g1: Some(g.clone()),
                            g2: None,
                            point: witness,
                        });
                    }
                }
            }
        }
        let elems: Vec<&GroupElement> = self.table.keys().collect();
        for &g1 in &elems {
            for &g2 in &elems {
                let Ok(g12) = self.group.multiply(g1, g2) else { continue };
                if !self.in_bound(&g12) {
                    continue;
                }
                self.check_pair(g1, g2, &g12, &mut out);
            }
        }
        out
    }

    fn check_pair(&self, g1: &GroupElement, g2: &GroupElement, g12: &GroupElement, out: &mut Vec<Violation>) {
        let m1 = self.stored_or_empty(g1);
        let m2 = self.stored_or_empty(g2);
        let m12 = self.stored_or_empty(g12);
        let viol = |clause, x| Violation { clause, g1: Some(g1.clone()), g2: Some(g2.clone()), point: Some(x) };

        // g2.(U_{(g1g2)^-1} ∩ U_{g2^-1}) against U_{g2} ∩ U_{g1^-1}
        let dom12 = m12.domain();
        let lhs: BTreeSet<usize> = m2.pairs().filter(|(x, _)| dom12.contains(x)).map(|(_, y)| y).collect();
        let rhs: BTreeSet<usize> = m2.range().intersection(&m1.domain()).copied().collect();
        if let Some(&x) = lhs.symmetric_difference(&rhs).next() {
            out.push(viol(Clause::DomainCompatibility, x));
        }

        // g1.(U_{g1^-1} ∩ U_{g2}) against U_{g1} ∩ U_{g1g2}
        let ran2 = m2.range();
        let lhs: BTreeSet<usize> = m1.pairs().filter(|(x, _)| ran2.contains(x)).map(|(_, y)| y).collect();
        let rhs: BTreeSet<usize> = m1.range().intersection(&m12.range()).copied().collect();
        if let Some(&x) = lhs.symmetric_difference(&rhs).next() {
            out.push(viol(Clause::DualDomainCompatibility, x));
        }

        for (x, y) in m2.pairs() {
            if let Some(z) = m12.apply(x) {
                if m1.apply(y) != Some(z) {
                    out.push(viol(Clause::Composition, x));
                    break;
                }
            }
        }
    }

    fn collect(&self, x: usize, keep: impl Fn(&GroupElement, usize) -> bool) -> Result<ElementList> {
        if x >= self.space.len() {
            return Err(Error::UnknownPoint(format!("#{x}")));
        }
        let elements = self
            .table
            .iter()
            .filter_map(|(g, m)| m.apply(x).filter(|&y| keep(g, y)).map(|_| g.clone()))
            .collect();
        Ok(ElementList { elements, truncated_at: self.truncation() })
    }

    /// `G_x = {g : x ∈ U_{g^-1}}` over the stored support.
    pub fn element_set(&self, x: usize) -> Result<ElementList> {
        self.collect(x, |_, _| true)
    }

    /// `{g : x ∈ U_{g^-1} and g.x = x}` over the stored support.
    pub fn stabiliser(&self, x: usize) -> Result<ElementList> {
        self.collect(x, |_, y| y == x)
    }

    /// Equal to the stabiliser: `{x}` is an open neighbourhood of `x`.
    pub fn essential_stabiliser(&self, x: usize) -> Result<ElementList> {
        self.stabiliser(x)
    }

    /// Renames points along `perm` (old index to new index) and elements along `relabel_g`.
    pub fn relabel(
        &self,
        space: FiniteSpace,
        perm: &[usize],
        relabel_g: impl Fn(&GroupElement) -> GroupElement,
    ) -> Result<Self> {
        let table = self.table.iter().map(|(g, m)| (relabel_g(g), m.relabel(perm))).collect();
        let generation = match &self.generation {
            Generation::Explicit => Generation::Explicit,
            Generation::Bounded { bound } => Generation::Bounded { bound: *bound },
            Generation::SemiSaturated { generators, bound } => Generation::SemiSaturated {
                generators: generators.iter().map(|(&s, m)| (s, m.relabel(perm))).collect(),
                bound: *bound,
            },
        };
        Self::from_parts(space, self.group.clone(), table, generation)
    }
}

fn spell(space: &FiniteSpace, generators: &BTreeMap<u32, PartialBijection>, word: &FreeWord) -> PartialBijection {
    let mut acc = PartialBijection::identity(space.len());
    // rightmost letter acts first
    for l in word.letters().iter().rev() {
        let base = generators.get(&l.symbol).cloned().unwrap_or_default();
        let step = if l.inverse { base.inverse() } else { base };
        acc = step.after(&acc);
    }
    acc
}

pub(crate) fn too_large(bound: usize) -> Error {
    Error::InvalidSystem(format!("bound {bound} needs a table of more than {MAX_BALL_SIZE} elements"))
}

/// The semi-saturated system generated by one partial bijection per generator,
/// tabulated for every reduced word of length at most `bound`.
///
/// For the integers the single generator is `1` and must be given as symbol 0.
/// Empty maps are kept in the table.
pub fn extend_semi_saturated(
    space: FiniteSpace,
    group: GroupDescriptor,
    generators: BTreeMap<u32, PartialBijection>,
    bound: usize,
) -> Result<FinitePds> {
    let words: Vec<GroupElement> = match &group {
        GroupDescriptor::Free(a) => {
            if let Some(s) = generators.keys().find(|&&s| s >= a.rank()) {
                return Err(Error::UnknownSymbol(format!("#{s}")));
            }
            if ball_size(a.rank(), bound).is_none() {
                return Err(too_large(bound));
            }
            group.ball(bound).unwrap_or_default()
        }
        GroupDescriptor::Integers => {
            if generators.keys().any(|&s| s != 0) {
                return Err(Error::InvalidSystem("the integers have a single generator".into()));
            }
            if bound > MAX_BALL_SIZE / 2 {
                return Err(too_large(bound));
            }
            group.ball(bound).unwrap_or_default()
        }
        _ => {
            return Err(Error::InvalidSystem(
                "semi-saturated generation needs a free group or the integers".into(),
            ))
        }
    };
    let mut table = BTreeMap::new();
    for g in words {
        let w = match &g {
            GroupElement::Word(w) => w.clone(),
            GroupElement::Int(n) => crate::groups::int_to_word(*n),
            _ => unreachable!("ball yields words or integers"),
        };
        table.insert(g, spell(&space, &generators, &w));
    }
    FinitePds::from_parts(space, group, table, Generation::SemiSaturated { generators, bound })
}

/// Letters `l` with `phi_l` nonempty, for orthogonality checks.
pub fn generator_ranges(pds: &FinitePds) -> Vec<(Letter, BTreeSet<usize>)> {
    match pds.generation() {
        Generation::SemiSaturated { generators, .. } => generators
            .iter()
            .map(|(&s, m)| (Letter::pos(s), m.range()))
            .collect(),
        Generation::Explicit | Generation::Bounded { .. } => Vec::new(),
    }
}

/// Common instances used across the test suites.
pub mod instances {
    use super::*;
    use crate::groups::FiniteGroup;

    /// `Z/2` swapping two points.
    pub fn swap() -> FinitePds {
        let space = FiniteSpace::new(["x0", "x1"]).unwrap();
        let group = GroupDescriptor::Finite(FiniteGroup::cyclic(2));
        let g = GroupElement::Finite(1);
        FinitePds::explicit(space, group, [(g, PartialBijection::from_pairs([(0, 1), (1, 0)]).unwrap())]).unwrap()
    }

    /// The integers acting on two points by `1: x0 -> x1`.
    pub fn z_shift(bound: usize) -> FinitePds {
        let space = FiniteSpace::new(["x0", "x1"]).unwrap();
        let gens = BTreeMap::from([(0, PartialBijection::from_pairs([(0, 1)]).unwrap())]);
        extend_semi_saturated(space, GroupDescriptor::Integers, gens, bound).unwrap()
    }

    /// The integers acting on two points by the swap.
    pub fn z_swap(bound: usize) -> FinitePds {
        let space = FiniteSpace::new(["x0", "x1"]).unwrap();
        let gens = BTreeMap::from([(0, PartialBijection::from_pairs([(0, 1), (1, 0)]).unwrap())]);
        extend_semi_saturated(space, GroupDescriptor::Integers, gens, bound).unwrap()
    }

    /// A finite group acting trivially on `n` points.
    pub fn trivial(group: FiniteGroup, n: usize) -> FinitePds {
        let space = FiniteSpace::numbered("p", n);
        let order = group.order();
        let group = GroupDescriptor::Finite(group);
        FinitePds::explicit(
            space,
            group,
            (0..order).map(|i| (GroupElement::Finite(i), PartialBijection::identity(n))),
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::instances::*;
    use super::*;
    use crate::groups::FiniteGroup;

    fn int(n: i64) -> GroupElement {
        GroupElement::Int(n)
    }

    #[test]
    fn swap_is_valid_and_acts() {
        let p = swap();
        assert!(p.validate().is_empty());
        let g = GroupElement::Finite(1);
        let e = GroupElement::Finite(0);
        assert_eq!(p.act(&g, 0), Some(1));
        assert_eq!(p.act(&g, p.act(&g, 0).unwrap()), Some(0));
        for x in 0..2 {
            assert_eq!(p.act(&e, x), Some(x));
        }
    }

    #[test]
    fn broken_identity_is_reported() {
        let p = swap().with_entry(GroupElement::Finite(0), PartialBijection::from_pairs([(0, 1), (1, 0)]).unwrap());
        let v = p.validate();
        assert!(v.iter().any(|v| v.clause == Clause::Identity && v.point == Some(0)));
    }

    #[test]
    fn corrupted_square_breaks_composition() {
        let p = z_shift(2);
        assert!(p.validate().is_empty());
        // phi_1 ∘ phi_1 is empty; store a nonempty phi_2 instead
        let bad = p.with_entry(int(2), PartialBijection::from_pairs([(0, 1)]).unwrap());
        let v = bad.validate();
        assert!(v.iter().any(|v| v.clause == Clause::Composition || v.clause == Clause::DomainCompatibility));
        let bad = p.with_entry(int(2), PartialBijection::from_pairs([(0, 0)]).unwrap())
            .with_entry(int(-2), PartialBijection::from_pairs([(0, 0)]).unwrap());
        assert!(!bad.validate().is_empty());
    }

    #[test]
    fn element_sets_and_stabilisers() {
        let p = swap();
        assert_eq!(p.element_set(0).unwrap().elements, vec![GroupElement::Finite(0), GroupElement::Finite(1)]);
        assert_eq!(p.stabiliser(0).unwrap().elements, vec![GroupElement::Finite(0)]);
        assert_eq!(p.essential_stabiliser(0).unwrap(), p.stabiliser(0).unwrap());

        let t = trivial(FiniteGroup::cyclic(2), 1);
        assert_eq!(t.element_set(0).unwrap().elements.len(), 2);
        assert_eq!(t.stabiliser(0).unwrap().elements.len(), 2);
        assert!(p.element_set(5).is_err());

        // phi_1 is defined on x0, so 1 ∈ G_x0; -1 needs x0 ∈ U_1 = {x1}
        let z = z_shift(1);
        let gx = z.element_set(0).unwrap();
        assert_eq!(gx.elements, vec![int(0), int(1)]);
        assert_eq!(gx.truncated_at, Some(1));

        let zs = z_swap(4);
        let st = zs.stabiliser(0).unwrap();
        assert_eq!(st.elements, vec![int(-4), int(-2), int(0), int(2), int(4)]);
        assert!(st.is_truncated());
        assert_eq!(zs.essential_stabiliser(0).unwrap(), st);
    }

    #[test]
    fn semi_saturated_examples() {
        let z = GroupDescriptor::free(["a"]).unwrap();
        let space = FiniteSpace::new(["x0", "x1"]).unwrap();
        let gens = BTreeMap::from([(0, PartialBijection::from_pairs([(0, 1)]).unwrap())]);
        let p = extend_semi_saturated(space, z.clone(), gens, 2).unwrap();
        let aa = z.parse_element("a.a").unwrap();
        assert!(p.map(&aa).unwrap().is_empty());
        let ai = z.parse_element("a^-1").unwrap();
        assert_eq!(p.map(&ai).unwrap().pairs().collect::<Vec<_>>(), vec![(1, 0)]);
        assert!(p.validate().is_empty());

        // orthogonal generators on three points: a: x1 -> x0, b: x2 -> x1
        let f = GroupDescriptor::free(["a", "b"]).unwrap();
        let space = FiniteSpace::numbered("x", 3);
        let a = PartialBijection::from_pairs([(1, 0)]).unwrap();
        let b = PartialBijection::from_pairs([(2, 1)]).unwrap();
        let p = extend_semi_saturated(space, f.clone(), BTreeMap::from([(0, a.clone()), (1, b.clone())]), 3).unwrap();
        let ab = f.parse_element("a.b").unwrap();
        assert_eq!(p.map(&ab).unwrap(), &a.after(&b));
        assert_eq!(p.act(&ab, 2), Some(0));
        assert!(p.validate().is_empty());
    }

    #[test]
    fn longer_bound_agrees_on_shorter_words() {
        let short = z_shift(2);
        let long = z_shift(5);
        for (g, m) in short.table() {
            assert_eq!(long.map(g), Some(m));
        }
    }

    #[test]
    fn act_beyond_the_table_follows_the_spelling() {
        let p = z_swap(1);
        assert_eq!(p.act(&int(3), 0), Some(1));
        assert_eq!(p.act(&int(-6), 1), Some(1));
    }

    #[test]
    fn explicit_inserts_inverses_and_identity() {
        let space = FiniteSpace::numbered("x", 3);
        let g = GroupDescriptor::Finite(FiniteGroup::cyclic(3));
        let p = FinitePds::explicit(
            space,
            g,
            [(GroupElement::Finite(1), PartialBijection::from_pairs([(0, 1)]).unwrap())],
        )
        .unwrap();
        assert_eq!(p.table().len(), 3);
        assert_eq!(p.map(&GroupElement::Finite(2)).unwrap().pairs().collect::<Vec<_>>(), vec![(1, 0)]);
        // 1 + 1 = 2 needs U_1 ∩ U_{-1} empty: {1} ∩ {0} is empty, fine
        assert!(p.validate().is_empty());
    }

    #[test]
    fn missing_inverse_is_reported() {
        let p = swap();
        let p = FinitePds::from_parts(
            p.space().clone(),
            GroupDescriptor::Finite(FiniteGroup::cyclic(3)),
            BTreeMap::from([
                (GroupElement::Finite(0), PartialBijection::identity(2)),
                (GroupElement::Finite(1), PartialBijection::from_pairs([(0, 1)]).unwrap()),
            ]),
            Generation::Explicit,
        )
        .unwrap();
        assert!(p.validate().iter().any(|v| v.clause == Clause::MissingInverse));
    }

    #[test]
    fn injectivity_is_enforced() {
        assert!(matches!(PartialBijection::from_pairs([(0, 1), (2, 1)]), Err(Error::NotInjective(_))));
    }
}
