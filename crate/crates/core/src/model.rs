//! Resolution of parsed instance files into core objects.
//!
//! Sections that own others (`space`, `vertices`, `atoms`) are followed by
//! their dependent sections:
//!
//! | owner          | dependents                          |
//! |----------------|-------------------------------------|
//! | `[space X]`    | `[group]`, `[gen s]`, `[elem g]`     |
//! | `[vertices E]` | `[edges]`                           |
//! | `[atoms B]`    | `[alphabet]`, `[theta l]`, `[ideal l]` |
//!
//! Every other section carries its own name. Names share one namespace.

use std::collections::{BTreeMap, HashMap};

use crate::booldyn::{AtomSet, FiniteBooleanAlgebra, Gbds};
use crate::category::{CocycleTable, CoeTriple, OrbitMorphism};
use crate::error::{Error, Result};
use crate::format::{split_list, Instance, Section};
use crate::groupoid::{
    group_as_groupoid, group_bundle, pair_groupoid, transformation_groupoid, unit_groupoid, FiniteGroupoid,
};
use crate::groups::{FiniteGroup, GroupDescriptor, GroupElement};
use crate::pds::{extend_semi_saturated, FinitePds, FiniteSpace, Generation, PartialBijection};
use crate::recognition::{canonical_partition, singleton_partition, BisectionPartition};
use crate::shift::{coe_ab_to_kl, CylinderTable, DrCoeData, Edge, FiniteGraph, PathMap, ShiftCoe};

/// Tabulation bound for generated systems without a `bound` entry.
pub const DEFAULT_BOUND: usize = 3;

#[derive(Clone, Debug)]
pub struct Named<T> {
    pub name: String,
    pub line: usize,
    pub value: T,
}

#[derive(Clone, Debug)]
pub struct BooleanSystem {
    pub gbds: Gbds,
    pub graph: FiniteGraph,
}

#[derive(Clone, Debug)]
pub struct MorphismDecl {
    pub source: String,
    pub target: String,
    pub morphism: OrbitMorphism,
}

#[derive(Clone, Debug)]
pub enum CoeData {
    Orbit(CoeTriple),
    Shift(ShiftCoe),
}

#[derive(Clone, Debug)]
pub struct CoeDecl {
    pub source: String,
    pub target: String,
    pub data: CoeData,
}

#[derive(Clone, Debug)]
pub struct DrCoeDecl {
    pub source: String,
    pub target: String,
    pub data: DrCoeData,
}

#[derive(Clone, Debug)]
pub struct PartitionDecl {
    pub groupoid: String,
    pub partition: BisectionPartition,
}

/// Everything declared in one instance, in input order.
#[derive(Clone, Debug, Default)]
pub struct Model {
    pub systems: Vec<Named<FinitePds>>,
    pub graphs: Vec<Named<FiniteGraph>>,
    pub boolean: Vec<Named<BooleanSystem>>,
    pub groupoids: Vec<Named<FiniteGroupoid>>,
    pub morphisms: Vec<Named<MorphismDecl>>,
    pub coes: Vec<Named<CoeDecl>>,
    pub dr_coes: Vec<Named<DrCoeDecl>>,
    pub partitions: Vec<Named<PartitionDecl>>,
}

fn find<'a, T>(items: &'a [Named<T>], name: &str) -> Option<&'a T> {
    items.iter().find(|n| n.name == name).map(|n| &n.value)
}

impl Model {
    pub fn system(&self, name: &str) -> Option<&FinitePds> {
        find(&self.systems, name)
    }

    /// A declared graph, or the graph of a boolean system.
    pub fn graph(&self, name: &str) -> Option<&FiniteGraph> {
        find(&self.graphs, name).or_else(|| find(&self.boolean, name).map(|b| &b.graph))
    }

    pub fn groupoid(&self, name: &str) -> Option<&FiniteGroupoid> {
        find(&self.groupoids, name)
    }

    pub fn is_empty(&self) -> bool {
        self.systems.is_empty()
            && self.graphs.is_empty()
            && self.boolean.is_empty()
            && self.groupoids.is_empty()
            && self.morphisms.is_empty()
            && self.coes.is_empty()
            && self.dr_coes.is_empty()
            && self.partitions.is_empty()
    }
}

fn at(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Re-anchors an error from a constructor at the line that caused it.
fn anchor<T>(line: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { .. } => e,
        other => at(line, other.to_string()),
    })
}

fn required<'a>(s: &'a Section, key: &str) -> Result<&'a str> {
    s.get(key).ok_or_else(|| at(s.line, format!("{} needs `{key} =`", s.header())))
}

fn name_arg(s: &Section) -> Result<&str> {
    match s.args.as_slice() {
        [n] => Ok(n),
        _ => Err(at(s.line, format!("{} needs exactly one name", s.header()))),
    }
}

fn parse_usize(line: usize, text: &str) -> Result<usize> {
    text.trim().parse().map_err(|_| at(line, format!("expected a number, found `{text}`")))
}

struct SpaceDraft<'a> {
    head: &'a Section,
    group: Option<&'a Section>,
    gens: Vec<&'a Section>,
    elems: Vec<&'a Section>,
}

struct GraphDraft<'a> {
    head: &'a Section,
    edges: Option<&'a Section>,
}

struct AtomsDraft<'a> {
    head: &'a Section,
    alphabet: Option<&'a Section>,
    thetas: Vec<&'a Section>,
    ideals: Vec<&'a Section>,
}

enum Owner {
    Space(usize),
    Graph(usize),
    Atoms(usize),
}

#[derive(Default)]
struct Drafts<'a> {
    spaces: Vec<SpaceDraft<'a>>,
    graphs: Vec<GraphDraft<'a>>,
    atoms: Vec<AtomsDraft<'a>>,
    rules: HashMap<String, &'a Section>,
    named: Vec<&'a Section>,
}

fn once<'a>(slot: &mut Option<&'a Section>, s: &'a Section) -> Result<()> {
    if slot.replace(s).is_some() {
        return Err(at(s.line, format!("second {} for the same owner", s.header())));
    }
    Ok(())
}

fn collect(instance: &Instance) -> Result<Drafts<'_>> {
    let mut d = Drafts::default();
    let mut owner: Option<Owner> = None;
    let mut names: HashMap<String, usize> = HashMap::new();
    for s in instance.sections() {
        let misplaced = || at(s.line, format!("{} does not follow its owning section", s.header()));
        match s.kind.as_str() {
            "group" | "gen" | "elem" => {
                let Some(Owner::Space(i)) = owner else { return Err(misplaced()) };
                let draft = &mut d.spaces[i];
                match s.kind.as_str() {
                    "group" => once(&mut draft.group, s)?,
                    "gen" => draft.gens.push(s),
                    _ => draft.elems.push(s),
                }
                continue;
            }
            "edges" => {
                let Some(Owner::Graph(i)) = owner else { return Err(misplaced()) };
                once(&mut d.graphs[i].edges, s)?;
                continue;
            }
            "alphabet" | "theta" | "ideal" => {
                let Some(Owner::Atoms(i)) = owner else { return Err(misplaced()) };
                let draft = &mut d.atoms[i];
                match s.kind.as_str() {
                    "alphabet" => once(&mut draft.alphabet, s)?,
                    "theta" => draft.thetas.push(s),
                    _ => draft.ideals.push(s),
                }
                continue;
            }
            _ => {}
        }
        let name = name_arg(s)?;
        if let Some(prev) = names.insert(name.to_string(), s.line) {
            return Err(at(s.line, format!("name `{name}` already declared on line {prev}")));
        }
        owner = None;
        match s.kind.as_str() {
            "space" => {
                owner = Some(Owner::Space(d.spaces.len()));
                d.spaces.push(SpaceDraft { head: s, group: None, gens: Vec::new(), elems: Vec::new() });
            }
            "vertices" => {
                owner = Some(Owner::Graph(d.graphs.len()));
                d.graphs.push(GraphDraft { head: s, edges: None });
            }
            "atoms" => {
                owner = Some(Owner::Atoms(d.atoms.len()));
                d.atoms.push(AtomsDraft { head: s, alphabet: None, thetas: Vec::new(), ideals: Vec::new() });
            }
            "rule" => {
                d.rules.insert(name.to_string(), s);
            }
            _ => d.named.push(s),
        }
    }
    Ok(d)
}

/// Resolves every declaration of an instance whose includes are already
/// expanded.
pub fn resolve(instance: &Instance) -> Result<Model> {
    let drafts = collect(instance)?;
    let mut model = Model::default();
    for sd in &drafts.spaces {
        model.systems.push(Named {
            name: sd.head.args[0].clone(),
            line: sd.head.line,
            value: resolve_system(sd)?,
        });
    }
    for gd in &drafts.graphs {
        model.graphs.push(Named { name: gd.head.args[0].clone(), line: gd.head.line, value: resolve_graph(gd)? });
    }
    for ad in &drafts.atoms {
        model.boolean.push(Named { name: ad.head.args[0].clone(), line: ad.head.line, value: resolve_boolean(ad)? });
    }
    for s in drafts.named.iter().filter(|s| s.kind == "groupoid") {
        let value = resolve_groupoid(&model, s)?;
        model.groupoids.push(Named { name: s.args[0].clone(), line: s.line, value });
    }
    for s in &drafts.named {
        let (name, line) = (s.args[0].clone(), s.line);
        match s.kind.as_str() {
            "groupoid" => {}
            "morphism" => {
                let value = resolve_morphism(&model, s)?;
                model.morphisms.push(Named { name, line, value });
            }
            "coe" => {
                let value = resolve_coe(&model, &drafts.rules, s)?;
                model.coes.push(Named { name, line, value });
            }
            "dr-coe" => {
                let value = resolve_dr_coe(&model, &drafts.rules, s)?;
                model.dr_coes.push(Named { name, line, value });
            }
            "partition" => {
                let value = resolve_partition(&model, s)?;
                model.partitions.push(Named { name, line, value });
            }
            other => return Err(at(line, format!("unexpected section `{other}`"))),
        }
    }
    Ok(model)
}

fn parse_finite_group(line: usize, text: &str) -> Result<FiniteGroup> {
    let words: Vec<&str> = text.split_whitespace().collect();
    match words.as_slice() {
        ["cyclic", n] => {
            let n = parse_usize(line, n)?;
            if n == 0 || n > crate::groups::MAX_FINITE_ORDER {
                return Err(at(line, format!("cyclic order must be in 1..={}", crate::groups::MAX_FINITE_ORDER)));
            }
            Ok(FiniteGroup::cyclic(n))
        }
        ["klein-four"] => Ok(FiniteGroup::klein_four()),
        _ => Err(at(line, format!("unknown finite group `{text}`"))),
    }
}

fn resolve_group(s: &Section) -> Result<GroupDescriptor> {
    let kind = required(s, "kind")?;
    let (head, rest) = kind.split_once(char::is_whitespace).unwrap_or((kind, ""));
    match head {
        "integers" => Ok(GroupDescriptor::Integers),
        "free" => anchor(s.line, GroupDescriptor::free(split_list(rest))),
        "table" => {
            let mut names = Vec::new();
            let mut rows = Vec::new();
            for (from, to, _) in s.maps() {
                names.push(from.to_string());
                rows.push(split_list(to));
            }
            let index = |n: &str| names.iter().position(|m| m == n);
            let mut table = Vec::new();
            for (row, (_, _, line)) in rows.iter().zip(s.maps()) {
                let r: Option<Vec<usize>> = row.iter().map(|n| index(n)).collect();
                table.push(r.ok_or_else(|| at(line, "table entry names an unknown element"))?);
            }
            let identity = match s.get("identity") {
                Some(e) => index(e).ok_or_else(|| at(s.line, format!("unknown identity `{e}`")))?,
                None => 0,
            };
            anchor(s.line, FiniteGroup::new(names, table, identity)).map(GroupDescriptor::Finite)
        }
        _ => parse_finite_group(s.line, kind).map(GroupDescriptor::Finite),
    }
}

fn point_map(space: &FiniteSpace, s: &Section) -> Result<PartialBijection> {
    let mut pairs = Vec::new();
    for (from, to, line) in s.maps() {
        pairs.push((anchor(line, space.lookup(from))?, anchor(line, space.lookup(to))?));
    }
    anchor(s.line, PartialBijection::from_pairs(pairs))
}

fn resolve_system(sd: &SpaceDraft) -> Result<FinitePds> {
    let head = sd.head;
    let space = anchor(head.line, FiniteSpace::new(split_list(required(head, "points")?)))?;
    let gs = sd.group.ok_or_else(|| at(head.line, format!("{} has no [group] section", head.header())))?;
    let group = resolve_group(gs)?;
    if !sd.gens.is_empty() && !sd.elems.is_empty() {
        return Err(at(head.line, "a system is given either by [gen] or by [elem] sections"));
    }
    if !sd.gens.is_empty() {
        let bound = gs.get("bound").map(|b| parse_usize(gs.line, b)).transpose()?.unwrap_or(DEFAULT_BOUND);
        let mut generators = BTreeMap::new();
        for s in &sd.gens {
            let sym = name_arg(s)?;
            let index = match &group {
                GroupDescriptor::Free(a) => a.lookup(sym),
                GroupDescriptor::Integers => (sym == "1").then_some(0),
                _ => None,
            };
            let index = index.ok_or_else(|| at(s.line, format!("`{sym}` is not a generator")))?;
            if generators.insert(index, point_map(&space, s)?).is_some() {
                return Err(at(s.line, format!("generator `{sym}` given twice")));
            }
        }
        return anchor(head.line, extend_semi_saturated(space, group, generators, bound));
    }
    let mut entries = Vec::new();
    for s in &sd.elems {
        let g = anchor(s.line, group.parse_element(name_arg(s)?))?;
        entries.push((g, point_map(&space, s)?));
    }
    anchor(head.line, FinitePds::explicit(space, group, entries))
}

fn resolve_graph(gd: &GraphDraft) -> Result<FiniteGraph> {
    let head = gd.head;
    let vertices: Vec<String> = split_list(required(head, "names")?).into_iter().map(String::from).collect();
    let mut edges = Vec::new();
    if let Some(es) = gd.edges {
        if let Some((_, _, line)) = es.maps().next() {
            return Err(at(line, "edges are written `name = range -> source`"));
        }
        for (name, ends, line) in es.pairs() {
            let (r, d) = ends.split_once("->").ok_or_else(|| at(line, "expected `range -> source`"))?;
            let lookup = |v: &str| {
                vertices.iter().position(|w| w == v.trim()).ok_or_else(|| at(line, format!("unknown vertex `{}`", v.trim())))
            };
            edges.push(Edge { name: name.to_string(), r: lookup(r)?, d: lookup(d)? });
        }
    }
    anchor(head.line, FiniteGraph::new(vertices, edges))
}

fn resolve_boolean(ad: &AtomsDraft) -> Result<BooleanSystem> {
    let head = ad.head;
    let algebra = anchor(head.line, FiniteBooleanAlgebra::new(split_list(required(head, "names")?)))?;
    let alpha = ad.alphabet.ok_or_else(|| at(head.line, format!("{} has no [alphabet] section", head.header())))?;
    let letters: Vec<String> = split_list(required(alpha, "letters")?).into_iter().map(String::from).collect();
    let letter_index = |s: &Section| -> Result<usize> {
        let l = name_arg(s)?;
        letters.iter().position(|m| m == l).ok_or_else(|| at(s.line, format!("unknown letter `{l}`")))
    };
    let mut theta = vec![vec![0 as AtomSet; algebra.atom_count()]; letters.len()];
    let mut ideal_top = vec![algebra.top(); letters.len()];
    for s in &ad.thetas {
        let i = letter_index(s)?;
        for (atom, image, line) in s.maps() {
            let j = anchor(line, algebra.lookup(atom))?;
            theta[i][j] = anchor(line, algebra.parse_set(image))?;
        }
    }
    for s in &ad.ideals {
        let i = letter_index(s)?;
        ideal_top[i] = anchor(s.line, algebra.parse_set(required(s, "generators")?))?;
    }
    let gbds = anchor(head.line, Gbds::new(algebra, letters, theta, ideal_top))?;
    let graph = anchor(head.line, gbds.build_graph())?;
    Ok(BooleanSystem { gbds, graph })
}

/// Largest unit count accepted by `[groupoid]` constructions.
pub const MAX_CONSTRUCTED_UNITS: usize = 24;

fn resolve_groupoid(model: &Model, s: &Section) -> Result<FiniteGroupoid> {
    let construct = required(s, "construct")?;
    let words: Vec<&str> = construct.split_whitespace().collect();
    let n = |t: &str| parse_usize(s.line, t);
    let units = |t: &str| {
        let k = n(t)?;
        if k > MAX_CONSTRUCTED_UNITS {
            return Err(at(s.line, format!("at most {MAX_CONSTRUCTED_UNITS} units")));
        }
        Ok(k)
    };
    match words.as_slice() {
        ["pair", k] => Ok(pair_groupoid(units(k)?)),
        ["units", k] => Ok(unit_groupoid(units(k)?)),
        ["group", rest @ ..] => Ok(group_as_groupoid(&parse_finite_group(s.line, &rest.join(" "))?)),
        ["bundle", rest @ .., "over", k] => Ok(group_bundle(&parse_finite_group(s.line, &rest.join(" "))?, units(k)?)),
        ["transformation", x] => {
            let pds = model.system(x).ok_or_else(|| at(s.line, format!("unknown system `{x}`")))?;
            anchor(s.line, transformation_groupoid(pds))
        }
        ["dr", e, "depth", d, "k", k] => {
            let g = model.graph(e).ok_or_else(|| at(s.line, format!("unknown graph `{e}`")))?;
            let (d, k) = (n(d)?, n(k)?);
            let paths = g.edge_count().checked_pow((d + d.max(1)) as u32);
            if k > d.max(1) + 1
                || paths.map_or(true, |p| p > MAX_CONSTRUCTED_UNITS * MAX_CONSTRUCTED_UNITS)
                || g.boundary_paths(d, d.max(1)).len() > MAX_CONSTRUCTED_UNITS
            {
                return Err(at(s.line, "truncation too large"));
            }
            anchor(s.line, g.truncated_dr_groupoid(d, k))
        }
        _ => Err(at(s.line, format!("unknown construction `{construct}`"))),
    }
}

fn systems<'m>(model: &'m Model, s: &Section) -> Result<(&'m FinitePds, &'m FinitePds)> {
    let get = |key: &str| -> Result<&'m FinitePds> {
        let name = required(s, key)?;
        model.system(name).ok_or_else(|| at(s.line, format!("unknown system `{name}`")))
    };
    Ok((get("source")?, get("target")?))
}

fn graphs<'m>(model: &'m Model, s: &Section) -> Result<(&'m FiniteGraph, &'m FiniteGraph)> {
    let get = |key: &str| -> Result<&'m FiniteGraph> {
        let name = required(s, key)?;
        model.graph(name).ok_or_else(|| at(s.line, format!("unknown graph `{name}`")))
    };
    Ok((get("source")?, get("target")?))
}

fn phi_of(src: &FinitePds, tgt: &FinitePds, s: &Section) -> Result<Vec<usize>> {
    let mut phi = vec![None; src.space().len()];
    for (from, to, line) in s.maps() {
        let x = anchor(line, src.space().lookup(from))?;
        if phi[x].replace(anchor(line, tgt.space().lookup(to))?).is_some() {
            return Err(at(line, format!("point `{from}` mapped twice")));
        }
    }
    phi.into_iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| at(s.line, format!("point `{}` is not mapped", src.space().name(x)))))
        .collect()
}

/// Parses `g@x = h` with `g` and `x` on the `on` side.
fn cocycle_entry(
    on: &FinitePds,
    values: &GroupDescriptor,
    key: &str,
    value: &str,
    line: usize,
) -> Result<((GroupElement, usize), GroupElement)> {
    let (g, x) = key.split_once('@').ok_or_else(|| at(line, format!("expected `g@x`, found `{key}`")))?;
    let g = anchor(line, on.group().parse_element(g))?;
    let x = anchor(line, on.space().lookup(x.trim()))?;
    let h = anchor(line, values.parse_element(value))?;
    Ok(((g, x), h))
}

fn identity_values(pds: &FinitePds) -> CocycleTable {
    OrbitMorphism::identity(pds).cocycle
}

fn same_group(src: &FinitePds, tgt: &FinitePds, line: usize) -> Result<()> {
    if src.group() != tgt.group() {
        return Err(at(line, "`identity` values need the same group on both sides"));
    }
    Ok(())
}

fn resolve_morphism(model: &Model, s: &Section) -> Result<MorphismDecl> {
    let (src, tgt) = systems(model, s)?;
    let phi = phi_of(src, tgt, s)?;
    let mut cocycle = CocycleTable::new();
    for (key, value, line) in s.pairs() {
        if matches!(key, "source" | "target" | "cocycle") {
            continue;
        }
        let (k, v) = cocycle_entry(src, tgt.group(), key, value, line)?;
        cocycle.insert(k, v);
    }
    match s.get("cocycle") {
        Some("identity") => {
            same_group(src, tgt, s.line)?;
            for (k, v) in identity_values(src) {
                cocycle.entry(k).or_insert(v);
            }
        }
        Some(other) => return Err(at(s.line, format!("unknown cocycle `{other}`"))),
        None => {}
    }
    Ok(MorphismDecl {
        source: required(s, "source")?.into(),
        target: required(s, "target")?.into(),
        morphism: OrbitMorphism { phi, cocycle },
    })
}

fn resolve_coe(model: &Model, rules: &HashMap<String, &Section>, s: &Section) -> Result<CoeDecl> {
    let source = required(s, "source")?.to_string();
    let target = required(s, "target")?.to_string();
    let data = if model.system(&source).is_some() {
        let (src, tgt) = systems(model, s)?;
        let phi = phi_of(src, tgt, s)?;
        let (mut a, mut b) = (CocycleTable::new(), CocycleTable::new());
        for (key, value, line) in s.pairs() {
            if let Some(k) = key.strip_prefix("a ") {
                let (k, v) = cocycle_entry(src, tgt.group(), k.trim(), value, line)?;
                a.insert(k, v);
            } else if let Some(k) = key.strip_prefix("b ") {
                let (k, v) = cocycle_entry(tgt, src.group(), k.trim(), value, line)?;
                b.insert(k, v);
            } else if !matches!(key, "source" | "target" | "transfer") {
                return Err(at(line, format!("unexpected key `{key}`")));
            }
        }
        match s.get("transfer") {
            Some("identity") => {
                same_group(src, tgt, s.line)?;
                for (k, v) in identity_values(src) {
                    a.entry(k).or_insert(v);
                }
                for (k, v) in identity_values(tgt) {
                    b.entry(k).or_insert(v);
                }
            }
            Some(other) => return Err(at(s.line, format!("unknown transfer `{other}`"))),
            None => {}
        }
        CoeData::Orbit(CoeTriple { phi, a, b })
    } else {
        let (src, tgt) = graphs(model, s)?;
        if s.maps().next().is_some() {
            let (vmap, emap) = graph_map(src, tgt, s)?;
            CoeData::Shift(anchor(s.line, ShiftCoe::relabeling(src, tgt, &vmap, &emap))?)
        } else {
            let rule = |key: &str| rule_section(rules, s, key);
            CoeData::Shift(ShiftCoe {
                phi: path_map(src, tgt, rule("phi")?)?,
                phi_inv: path_map(tgt, src, rule("phi-inv")?)?,
                a: word_table(src, tgt, rule("a")?)?,
                b: word_table(tgt, src, rule("b")?)?,
            })
        }
    };
    Ok(CoeDecl { source, target, data })
}

fn resolve_dr_coe(model: &Model, rules: &HashMap<String, &Section>, s: &Section) -> Result<DrCoeDecl> {
    let (src, tgt) = graphs(model, s)?;
    let data = if s.maps().next().is_some() {
        let (vmap, emap) = graph_map(src, tgt, s)?;
        let t = anchor(s.line, ShiftCoe::relabeling(src, tgt, &vmap, &emap))?;
        anchor(s.line, coe_ab_to_kl(src, tgt, &t))?
    } else {
        let rule = |key: &str| rule_section(rules, s, key);
        DrCoeData {
            phi: path_map(src, tgt, rule("phi")?)?,
            phi_inv: path_map(tgt, src, rule("phi-inv")?)?,
            k: count_table(src, rule("k")?)?,
            l: count_table(src, rule("l")?)?,
            k_prime: count_table(tgt, rule("k'")?)?,
            l_prime: count_table(tgt, rule("l'")?)?,
        }
    };
    Ok(DrCoeDecl { source: required(s, "source")?.into(), target: required(s, "target")?.into(), data })
}

fn rule_section<'a>(rules: &HashMap<String, &'a Section>, s: &Section, key: &str) -> Result<&'a Section> {
    let name = required(s, key)?;
    rules.get(name).copied().ok_or_else(|| at(s.line, format!("unknown rule `{name}`")))
}

/// Vertex and edge maps from `@v -> @w` and `e -> f` lines.
fn graph_map(src: &FiniteGraph, tgt: &FiniteGraph, s: &Section) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut vmap = vec![None; src.vertex_count()];
    let mut emap = vec![None; src.edge_count()];
    for (from, to, line) in s.maps() {
        let (slot, value) = match (from.strip_prefix('@'), to.strip_prefix('@')) {
            (Some(v), Some(w)) => (
                &mut vmap[anchor(line, src.lookup_vertex(v))?],
                anchor(line, tgt.lookup_vertex(w))?,
            ),
            (None, None) => (&mut emap[anchor(line, src.lookup_edge(from))?], anchor(line, tgt.lookup_edge(to))?),
            _ => return Err(at(line, "a vertex must be mapped to a vertex")),
        };
        if slot.replace(value).is_some() {
            return Err(at(line, format!("`{from}` mapped twice")));
        }
    }
    let complete = |m: Vec<Option<usize>>, what: &str| -> Result<Vec<usize>> {
        m.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| at(s.line, format!("some {what} is not mapped")))
    };
    Ok((complete(vmap, "vertex")?, complete(emap, "edge")?))
}

fn path_map(src: &FiniteGraph, tgt: &FiniteGraph, s: &Section) -> Result<PathMap> {
    let mut map = PathMap { rules: Vec::new(), vertex_rules: BTreeMap::new() };
    for (from, to, line) in s.maps() {
        match (from.strip_prefix('@'), to.strip_prefix('@')) {
            (Some(v), Some(w)) => {
                map.vertex_rules.insert(anchor(line, src.lookup_vertex(v))?, anchor(line, tgt.lookup_vertex(w))?);
            }
            (None, None) => {
                map.rules.push((anchor(line, src.parse_edges(from))?, anchor(line, tgt.parse_edges(to))?));
            }
            _ => return Err(at(line, "a vertex rule needs `@` on both sides")),
        }
    }
    Ok(map)
}

fn word_table(src: &FiniteGraph, tgt: &FiniteGraph, s: &Section) -> Result<CylinderTable<crate::groups::FreeWord>> {
    let alphabet = anchor(s.line, tgt.alphabet())?;
    let mut rules = Vec::new();
    for (cell, value, line) in s.maps() {
        let c = anchor(line, src.parse_cylinder(cell))?;
        let w = match anchor(line, alphabet.parse_element(value))? {
            GroupElement::Word(w) => w,
            _ => unreachable!("edge alphabets are free"),
        };
        rules.push((c, w));
    }
    Ok(CylinderTable::new(rules))
}

fn count_table(graph: &FiniteGraph, s: &Section) -> Result<CylinderTable<usize>> {
    let mut rules = Vec::new();
    for (cell, value, line) in s.maps() {
        rules.push((anchor(line, graph.parse_cylinder(cell))?, parse_usize(line, value)?));
    }
    Ok(CylinderTable::new(rules))
}

fn resolve_partition(model: &Model, s: &Section) -> Result<PartitionDecl> {
    let groupoid = required(s, "groupoid")?.to_string();
    let gpd = model.groupoid(&groupoid).ok_or_else(|| at(s.line, format!("unknown groupoid `{groupoid}`")))?;
    let partition = match s.get("construct") {
        Some("singleton") => singleton_partition(gpd),
        Some("canonical") => anchor(s.line, canonical_partition(gpd))?,
        Some(other) => return Err(at(s.line, format!("unknown construction `{other}`"))),
        None => {
            let mut names = Vec::new();
            let mut blocks = Vec::new();
            for (key, labels, line) in s.pairs() {
                if matches!(key, "groupoid" | "unit") {
                    continue;
                }
                let mut block = Vec::new();
                for l in split_list(labels) {
                    block.push(gpd.lookup_arrow(l).ok_or_else(|| at(line, format!("unknown arrow `{l}`")))?);
                }
                names.push(key.to_string());
                blocks.push(block);
            }
            let unit = s.get("unit").unwrap_or("X");
            let unit_block = names
                .iter()
                .position(|n| n == unit)
                .ok_or_else(|| at(s.line, format!("no block named `{unit}` for the units")))?;
            BisectionPartition { names, blocks, unit_block }
        }
    };
    Ok(PartitionDecl { groupoid, partition })
}

fn group_kind(group: &GroupDescriptor) -> Result<(String, Vec<(String, String)>)> {
    Ok(match group {
        GroupDescriptor::Integers => ("integers".into(), Vec::new()),
        GroupDescriptor::Free(a) => (format!("free {}", a.symbols().join(", ")), Vec::new()),
        GroupDescriptor::Finite(t) if *t == FiniteGroup::klein_four() => ("klein-four".into(), Vec::new()),
        GroupDescriptor::Finite(t) if *t == FiniteGroup::cyclic(t.order()) => {
            (format!("cyclic {}", t.order()), Vec::new())
        }
        GroupDescriptor::Finite(t) => {
            let rows = t
                .table()
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let products: Vec<&str> = row.iter().map(|&j| t.names()[j].as_str()).collect();
                    (t.names()[i].clone(), products.join(", "))
                })
                .collect();
            ("table".into(), rows)
        }
        GroupDescriptor::Presented(_) => {
            return Err(Error::InvalidSystem("presented groups have no text form".into()))
        }
    })
}

/// Sections describing `pds` under the name `name`.
pub fn pds_sections(name: &str, pds: &FinitePds) -> Result<Vec<Section>> {
    let space = pds.space();
    let mut out = vec![Section::new("space", &[name]).pair("points", space.names().join(", "))];
    let (kind, rows) = group_kind(pds.group())?;
    let mut group = Section::new("group", &[]).pair("kind", kind);
    if let GroupDescriptor::Finite(t) = pds.group() {
        if !rows.is_empty() {
            group = group.pair("identity", t.names()[t.identity()].clone());
        }
    }
    for (from, to) in rows {
        group = group.map(from, to);
    }
    let map_section = |kind: &str, arg: &str, map: &PartialBijection| {
        map.pairs().fold(Section::new(kind, &[arg]), |s, (x, y)| s.map(space.name(x), space.name(y)))
    };
    match pds.generation() {
        Generation::SemiSaturated { generators, bound } => {
            out.push(group.pair("bound", bound.to_string()));
            for (&sym, map) in generators {
                let name = match pds.group() {
                    GroupDescriptor::Free(a) => a.name(sym).to_string(),
                    _ => "1".to_string(),
                };
                out.push(map_section("gen", &name, map));
            }
        }
        Generation::Bounded { .. } => {
            return Err(Error::InvalidSystem("bounded tables have no text form".into()));
        }
        Generation::Explicit => {
            out.push(group);
            for (g, map) in pds.table() {
                out.push(map_section("elem", &pds.group().format_element(g), map));
            }
        }
    }
    Ok(out)
}

/// Sections describing `graph` under the name `name`.
pub fn graph_sections(name: &str, graph: &FiniteGraph) -> Vec<Section> {
    let v = graph.vertices();
    let edges = graph
        .edges()
        .iter()
        .fold(Section::new("edges", &[]), |s, e| s.pair(e.name.clone(), format!("{} -> {}", v[e.r], v[e.d])));
    vec![Section::new("vertices", &[name]).pair("names", v.join(", ")), edges]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_instance, to_text};
    use crate::pds::instances;
    use crate::shift::instances as graphs;

    fn model(text: &str) -> Model {
        resolve(&parse_instance(text).unwrap()).unwrap()
    }

    #[test]
    fn swap_resolves() {
        let m = model("[space swap]\npoints = x0, x1\n[group]\nkind = cyclic 2\n[elem g]\nx0 -> x1\nx1 -> x0\n");
        assert_eq!(m.system("swap"), Some(&instances::swap()));
    }

    #[test]
    fn systems_round_trip() {
        for pds in [instances::swap(), instances::z_shift(3), instances::z_swap(2), instances::trivial(FiniteGroup::klein_four(), 2)] {
            let text = to_text(&Instance::from_sections(pds_sections("s", &pds).unwrap()));
            let m = model(&text);
            assert_eq!(m.system("s"), Some(&pds), "{text}");
        }
    }

    #[test]
    fn custom_table_round_trips() {
        let names = vec!["one".to_string(), "t".to_string()];
        let group = FiniteGroup::new(names, vec![vec![0, 1], vec![1, 0]], 0).unwrap();
        let g = GroupDescriptor::Finite(FiniteGroup::new(group.names().to_vec(), group.table().to_vec(), 0).unwrap());
        let text = "[space s]\npoints = p\n[group]\nkind = table\nidentity = one\none -> one, t\nt -> t, one\n";
        let m = model(text);
        assert_eq!(m.system("s").unwrap().group(), &g);
        let printed = to_text(&Instance::from_sections(pds_sections("s", m.system("s").unwrap()).unwrap()));
        assert_eq!(model(&printed).system("s"), m.system("s"));
    }

    #[test]
    fn graphs_round_trip() {
        for g in [graphs::loop_graph(), graphs::two_shift(), graphs::sink_graph()] {
            let text = to_text(&Instance::from_sections(graph_sections("e", &g)));
            assert_eq!(model(&text).graph("e"), Some(&g));
        }
    }

    #[test]
    fn boolean_loop() {
        let m = model("[atoms b]\nnames = v\n[alphabet]\nletters = a\n[theta a]\nv -> v\n");
        let g = m.graph("b").unwrap();
        assert!(crate::booldyn::find_graph_isomorphism(g, &graphs::loop_graph()).is_some());
        assert_eq!(g, &graphs::loop_graph());
    }

    #[test]
    fn references_and_scoping() {
        let bad = [
            ("[group]\nkind = integers\n", 1),
            ("[space a]\npoints = x\n[space a]\npoints = y\n", 3),
            ("[space a]\npoints = x\n", 1),
            ("[groupoid g]\nconstruct = transformation nope\n", 1),
            ("[groupoid g]\nconstruct = pair 94\n", 1),
            ("[vertices e]\nnames = v\n[edges]\na = v -> v\nb = v -> v\n[groupoid g]\nconstruct = dr e depth 9 k 1\n", 6),
            ("[vertices e]\nnames = v\n[edges]\na = v -> w\n", 4),
            ("[space s]\npoints = x\n[group]\nkind = cyclic 2\n[elem h]\n", 5),
        ];
        for (text, line) in bad {
            match resolve(&parse_instance(text).unwrap()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn coe_and_partition_sections() {
        let text = "\
[space s]
points = x0, x1
[group]
kind = cyclic 2
[elem g]
x0 -> x1
x1 -> x0

[coe c]
source = s
target = s
transfer = identity
x0 -> x0
x1 -> x1

[groupoid p]
construct = pair 2

[partition q]
groupoid = p
X = u0, u1
A = p0_1
B = p1_0
";
        let m = model(text);
        match &m.coes[0].value.data {
            CoeData::Orbit(t) => assert_eq!(t, &CoeTriple::identity(m.system("s").unwrap())),
            CoeData::Shift(_) => panic!("orbit data expected"),
        }
        assert_eq!(m.partitions[0].value.partition.blocks.len(), 3);
    }

    #[test]
    fn shift_coe_from_rules() {
        let text = "\
[vertices e]
names = v
[edges]
a = v -> v
b = v -> v

[rule phi]
a -> b
b -> a
[rule a]
a -> b^-1
b -> a^-1

[coe c]
source = e
target = e
phi = phi
phi-inv = phi
a = a
b = a
";
        let m = model(text);
        let e = m.graph("e").unwrap();
        let CoeData::Shift(t) = &m.coes[0].value.data else { panic!() };
        let swap = ShiftCoe::relabeling(e, e, &[0], &[1, 0]).unwrap();
        assert_eq!(t, &swap);
    }
}
