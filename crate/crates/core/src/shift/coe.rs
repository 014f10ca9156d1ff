//! Locally constant data on boundary path spaces and continuous orbit
//! equivalences between the partial actions of two graphs and between
//! their Deaconu-Renault systems.

use std::collections::{BTreeMap, BTreeSet};

use super::{word_of, BoundaryPath, FiniteGraph};
use crate::category::OrbitMorphism;
use crate::error::{Error, Result};
use crate::groups::{FreeWord, GroupDescriptor, GroupElement, Letter};
use crate::pds::FinitePds;

/// Longest refinement below the cells of a table tried by [`coe_kl_to_ab`].
pub const MAX_REFINEMENT: usize = 64;

/// A basic open set of the boundary path space.
///
/// With `exact` unset this is the set of paths that start at `start` and begin
/// with `edges`; with `exact` set it is the single finite path `edges`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cylinder {
    pub start: usize,
    pub edges: Vec<usize>,
    pub exact: bool,
}

impl Cylinder {
    pub fn is_subset(&self, other: &Cylinder) -> bool {
        self.start == other.start
            && self.edges.starts_with(&other.edges)
            && (!other.exact || self == other)
    }

    pub fn is_disjoint(&self, other: &Cylinder) -> bool {
        !self.is_subset(other) && !other.is_subset(self)
    }
}

impl FiniteGraph {
    /// The cylinder of a nonempty path.
    pub fn cylinder(&self, edges: Vec<usize>) -> Result<Cylinder> {
        match edges.first() {
            Some(&e) if self.is_path(&edges) => Ok(Cylinder { start: self.edge(e).r, edges, exact: false }),
            _ => Err(Error::Graph(format!("`{}` is not a path", self.format_edges(&edges)))),
        }
    }

    /// All paths starting at `v`.
    pub fn vertex_cylinder(&self, v: usize) -> Result<Cylinder> {
        if v >= self.vertex_count() {
            return Err(Error::Graph(format!("unknown vertex {v}")));
        }
        Ok(Cylinder { start: v, edges: Vec::new(), exact: false })
    }

    /// The singleton of a finite boundary path.
    pub fn point_cylinder(&self, x: &BoundaryPath) -> Result<Cylinder> {
        match x {
            BoundaryPath::Finite { edges, .. } if self.contains(x) => {
                Ok(Cylinder { start: self.range_vertex(x), edges: edges.clone(), exact: true })
            }
            _ => Err(Error::Graph(format!("`{}` is not a finite boundary path", self.format_path(x)))),
        }
    }

    fn cylinder_end(&self, c: &Cylinder) -> usize {
        c.edges.last().map_or(c.start, |&e| self.edge(e).d)
    }

    pub fn cylinder_contains(&self, c: &Cylinder, x: &BoundaryPath) -> bool {
        if self.range_vertex(x) != c.start || !x.starts_with(&c.edges) {
            return false;
        }
        !c.exact || x.length() == Some(c.edges.len())
    }

    /// Partition of a cylinder into cylinders one edge longer.
    pub fn cylinder_children(&self, c: &Cylinder) -> Vec<Cylinder> {
        if c.exact {
            return Vec::new();
        }
        let end = self.cylinder_end(c);
        if self.is_singular(end) {
            return vec![Cylinder { exact: true, ..c.clone() }];
        }
        self.continuations(end)
            .iter()
            .map(|&e| {
                let mut edges = c.edges.clone();
                edges.push(e);
                Cylinder { start: c.start, edges, exact: false }
            })
            .collect()
    }

    /// A cylinder containing the image of `c` under the shift.
    pub fn cylinder_shift(&self, c: &Cylinder) -> Option<Cylinder> {
        let (&first, rest) = c.edges.split_first()?;
        Some(Cylinder { start: self.edge(first).d, edges: rest.to_vec(), exact: c.exact })
    }

    /// Sample points of a cylinder: the cylinder stem followed by every
    /// boundary path with prefix and cycle at most `depth`.
    pub fn representatives(&self, c: &Cylinder, depth: usize) -> Vec<BoundaryPath> {
        let end = self.cylinder_end(c);
        if c.exact {
            return vec![BoundaryPath::Finite { edges: c.edges.clone(), vertex: end }];
        }
        self.boundary_paths(depth, depth.max(1))
            .into_iter()
            .filter(|y| self.range_vertex(y) == end)
            .filter_map(|y| self.prepend(&c.edges, &y))
            .collect()
    }

    /// Cylinders `Z(e)`, one per edge, partitioning the domain of the shift.
    pub fn shift_domain(&self) -> Vec<Cylinder> {
        (0..self.edge_count())
            .map(|e| Cylinder { start: self.edge(e).r, edges: vec![e], exact: false })
            .collect()
    }

    /// Cylinders partitioning the whole boundary path space.
    pub fn whole_space(&self) -> Vec<Cylinder> {
        (0..self.vertex_count())
            .map(|v| Cylinder { start: v, edges: Vec::new(), exact: false })
            .collect()
    }

    /// `a.b` for a cylinder, `@v` for a vertex cylinder, and a trailing `$`
    /// for the single finite path.
    pub fn format_cylinder(&self, c: &Cylinder) -> String {
        let stem = if c.edges.is_empty() {
            format!("@{}", self.vertices()[c.start])
        } else {
            self.format_edges(&c.edges)
        };
        if c.exact {
            stem + "$"
        } else {
            stem
        }
    }

    pub fn parse_cylinder(&self, text: &str) -> Result<Cylinder> {
        let text = text.trim();
        let (stem, exact) = match text.strip_suffix('$') {
            Some(s) => (s.trim(), true),
            None => (text, false),
        };
        let c = if let Some(v) = stem.strip_prefix('@') {
            self.vertex_cylinder(self.lookup_vertex(v.trim())?)?
        } else {
            self.cylinder(self.parse_edges(stem)?)?
        };
        if !exact {
            return Ok(c);
        }
        let x = BoundaryPath::Finite { vertex: self.cylinder_end(&c), edges: c.edges };
        self.point_cylinder(&x)
    }
}

/// A problem with the cells of a rule table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TableIssue {
    Overlap(usize, usize),
    Gap(Cylinder),
    Outside(usize),
}

impl TableIssue {
    pub fn describe<V>(&self, graph: &FiniteGraph, table: &CylinderTable<V>) -> String {
        let cell = |i: usize| graph.format_cylinder(&table.rules[i].0);
        match self {
            TableIssue::Overlap(i, j) => format!("cells `{}` and `{}` overlap", cell(*i), cell(*j)),
            TableIssue::Gap(c) => format!("no cell covers `{}`", graph.format_cylinder(c)),
            TableIssue::Outside(i) => format!("cell `{}` lies outside the domain", cell(*i)),
        }
    }
}

/// A locally constant function given by its values on finitely many
/// cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderTable<V> {
    pub rules: Vec<(Cylinder, V)>,
}

impl<V> CylinderTable<V> {
    pub fn new(rules: Vec<(Cylinder, V)>) -> Self {
        CylinderTable { rules }
    }

    pub fn constant(cells: Vec<Cylinder>, value: V) -> Self
    where
        V: Clone,
    {
        CylinderTable { rules: cells.into_iter().map(|c| (c, value.clone())).collect() }
    }

    pub fn lookup(&self, graph: &FiniteGraph, x: &BoundaryPath) -> Option<(usize, &V)> {
        self.rules
            .iter()
            .enumerate()
            .find(|(_, (c, _))| graph.cylinder_contains(c, x))
            .map(|(i, (_, v))| (i, v))
    }

    pub fn value(&self, graph: &FiniteGraph, x: &BoundaryPath) -> Option<&V> {
        self.lookup(graph, x).map(|(_, v)| v)
    }

    pub fn max_len(&self) -> usize {
        self.rules.iter().map(|(c, _)| c.edges.len()).max().unwrap_or(0)
    }

    /// Checks that the cells partition the union of `domain`.
    pub fn cover_issues(&self, graph: &FiniteGraph, domain: &[Cylinder]) -> Vec<TableIssue> {
        let cells: Vec<&Cylinder> = self.rules.iter().map(|(c, _)| c).collect();
        let mut out = Vec::new();
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                if !cells[i].is_disjoint(cells[j]) {
                    out.push(TableIssue::Overlap(i, j));
                }
            }
            if !domain.iter().any(|d| cells[i].is_subset(d)) {
                out.push(TableIssue::Outside(i));
            }
        }
        let mut stack: Vec<Cylinder> = domain.to_vec();
        while let Some(c) = stack.pop() {
            if cells.iter().any(|r| c.is_subset(r)) {
                continue;
            }
            if cells.iter().any(|r| r.is_subset(&c)) {
                stack.extend(graph.cylinder_children(&c));
            } else {
                out.push(TableIssue::Gap(c));
            }
        }
        out
    }

    pub fn map<W>(&self, f: impl Fn(&V) -> W) -> CylinderTable<W> {
        CylinderTable { rules: self.rules.iter().map(|(c, v)| (c.clone(), f(v))).collect() }
    }
}

/// A homeomorphism between boundary path spaces given by a prefix code.
///
/// Each rule replaces an input prefix by an output path and the rest of the
/// point is processed the same way; `vertex_rules` send the remaining vertex
/// path at a singular vertex to one of the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathMap {
    pub rules: Vec<(Vec<usize>, Vec<usize>)>,
    pub vertex_rules: BTreeMap<usize, usize>,
}

impl PathMap {
    pub fn identity(graph: &FiniteGraph) -> Self {
        PathMap {
            rules: (0..graph.edge_count()).map(|e| (vec![e], vec![e])).collect(),
            vertex_rules: graph.singular_vertices().into_iter().map(|v| (v, v)).collect(),
        }
    }

    /// The map induced by a graph homomorphism, checked to respect `r`
    /// and `d`.
    pub fn from_graph_map(src: &FiniteGraph, tgt: &FiniteGraph, vmap: &[usize], emap: &[usize]) -> Result<Self> {
        if vmap.len() != src.vertex_count() || emap.len() != src.edge_count() {
            return Err(Error::Graph("graph map has the wrong size".into()));
        }
        for (e, &f) in emap.iter().enumerate() {
            let (a, b) = (src.edge(e), tgt.edges().get(f));
            match b {
                Some(b) if vmap[a.r] == b.r && vmap[a.d] == b.d => {}
                _ => return Err(Error::Graph(format!("edge `{}` is not mapped compatibly", a.name))),
            }
        }
        Ok(PathMap {
            rules: emap.iter().enumerate().map(|(e, &f)| (vec![e], vec![f])).collect(),
            vertex_rules: src.singular_vertices().into_iter().map(|v| (v, vmap[v])).collect(),
        })
    }

    /// Structural problems: rule inputs must be a prefix code covering the
    /// shift domain, outputs nonempty paths, and singular vertices must be
    /// sent to singular vertices.
    pub fn validate(&self, src: &FiniteGraph, tgt: &FiniteGraph) -> Vec<String> {
        let mut out = Vec::new();
        let mut cells = Vec::new();
        for (input, output) in &self.rules {
            match src.cylinder(input.clone()) {
                Ok(c) => cells.push((c, ())),
                Err(_) => out.push(format!("rule input `{}` is not a path", src.format_edges(input))),
            }
            if output.is_empty() || !tgt.is_path(output) {
                out.push(format!("rule output `{}` is not a nonempty path", tgt.format_edges(output)));
            }
        }
        let table = CylinderTable::new(cells);
        for issue in table.cover_issues(src, &src.shift_domain()) {
            out.push(format!("rule inputs: {}", issue.describe(src, &table)));
        }
        let singular: BTreeSet<usize> = src.singular_vertices().into_iter().collect();
        let keys: BTreeSet<usize> = self.vertex_rules.keys().copied().collect();
        if keys != singular {
            out.push("vertex rules must cover exactly the singular vertices".into());
        }
        for (&v, &w) in &self.vertex_rules {
            if w >= tgt.vertex_count() || !tgt.is_singular(w) {
                out.push(format!("vertex `{}` is not sent to a singular vertex", src.vertices()[v]));
            }
        }
        out
    }

    fn rule_for(&self, x: &BoundaryPath) -> Option<&(Vec<usize>, Vec<usize>)> {
        self.rules.iter().find(|(input, _)| x.starts_with(input))
    }

    pub fn apply(&self, src: &FiniteGraph, tgt: &FiniteGraph, x: &BoundaryPath) -> Result<BoundaryPath> {
        let fail = |m: &str| Error::Morphism(format!("path map at `{}`: {m}", src.format_path(x)));
        let mut out: Vec<usize> = Vec::new();
        let mut seen: BTreeMap<BoundaryPath, usize> = BTreeMap::new();
        let mut current = x.clone();
        loop {
            if let BoundaryPath::Finite { edges, vertex } = &current {
                if edges.is_empty() {
                    let &w = self.vertex_rules.get(vertex).ok_or_else(|| fail("no vertex rule"))?;
                    if out.is_empty() {
                        return tgt.vertex_path(w).map_err(|_| fail("vertex image is not singular"));
                    }
                    let y = tgt.finite_path(out).map_err(|_| fail("output is not a boundary path"))?;
                    return match y {
                        BoundaryPath::Finite { vertex, .. } if vertex == w => Ok(y),
                        _ => Err(fail("output ends away from the vertex image")),
                    };
                }
            } else if let Some(&start) = seen.get(&current) {
                let cycle = out.split_off(start);
                if cycle.is_empty() {
                    return Err(fail("output is finite on an infinite path"));
                }
                return tgt.periodic(out, cycle).map_err(|_| fail("output is not a path"));
            } else {
                seen.insert(current.clone(), out.len());
            }
            let (input, output) = self.rule_for(&current).ok_or_else(|| fail("no rule applies"))?;
            out.extend_from_slice(output);
            current = current.shift(input.len()).expect("rule input is a prefix");
        }
    }

    /// The output prefix shared by every point of `c`.
    pub fn determined_output(&self, src: &FiniteGraph, tgt: &FiniteGraph, c: &Cylinder) -> Vec<usize> {
        if c.exact {
            let x = BoundaryPath::Finite { edges: c.edges.clone(), vertex: src.cylinder_end(c) };
            return match self.apply(src, tgt, &x) {
                Ok(BoundaryPath::Finite { edges, .. }) => edges,
                _ => Vec::new(),
            };
        }
        let mut out = Vec::new();
        let mut pos = 0;
        while let Some((input, output)) =
            self.rules.iter().find(|(input, _)| c.edges[pos..].starts_with(input))
        {
            out.extend_from_slice(output);
            pos += input.len();
        }
        out
    }
}

/// A continuous orbit equivalence between the partial actions of two graphs.
///
/// `a` holds `a(e^-1, x)` on cells inside `Z(e)`; values on other words
/// follow from `a(e, x) = a(e^-1, e.x)^-1` and the cocycle identity. `b` is
/// the same for the inverse direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftCoe {
    pub phi: PathMap,
    pub phi_inv: PathMap,
    pub a: CylinderTable<FreeWord>,
    pub b: CylinderTable<FreeWord>,
}

/// A continuous orbit equivalence `(phi, k, l, k', l')` between the
/// Deaconu-Renault systems of two graphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrCoeData {
    pub phi: PathMap,
    pub phi_inv: PathMap,
    pub k: CylinderTable<usize>,
    pub l: CylinderTable<usize>,
    pub k_prime: CylinderTable<usize>,
    pub l_prime: CylinderTable<usize>,
}

fn generator_values(graph: &FiniteGraph, f: impl Fn(usize) -> FreeWord) -> CylinderTable<FreeWord> {
    CylinderTable::new(
        graph
            .shift_domain()
            .into_iter()
            .enumerate()
            .map(|(e, c)| (c, f(e)))
            .collect(),
    )
}

impl ShiftCoe {
    pub fn identity(graph: &FiniteGraph) -> Self {
        let a = generator_values(graph, |e| FreeWord::generator(e as u32).inverse());
        ShiftCoe { phi: PathMap::identity(graph), phi_inv: PathMap::identity(graph), b: a.clone(), a }
    }

    /// The triple induced by a graph isomorphism.
    pub fn relabeling(src: &FiniteGraph, tgt: &FiniteGraph, vmap: &[usize], emap: &[usize]) -> Result<Self> {
        let (vinv, einv) = (invert(vmap, tgt.vertex_count())?, invert(emap, tgt.edge_count())?);
        Ok(ShiftCoe {
            phi: PathMap::from_graph_map(src, tgt, vmap, emap)?,
            phi_inv: PathMap::from_graph_map(tgt, src, &vinv, &einv)?,
            a: generator_values(src, |e| FreeWord::generator(emap[e] as u32).inverse()),
            b: generator_values(tgt, |f| FreeWord::generator(einv[f] as u32).inverse()),
        })
    }

    pub fn a_value(&self, src: &FiniteGraph, g: &FreeWord, x: &BoundaryPath) -> Option<FreeWord> {
        cocycle_value(src, &self.a, g, x)
    }

    pub fn b_value(&self, tgt: &FiniteGraph, g: &FreeWord, y: &BoundaryPath) -> Option<FreeWord> {
        cocycle_value(tgt, &self.b, g, y)
    }
}

fn invert(map: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; n];
    for (i, &j) in map.iter().enumerate() {
        if j >= n || inv[j] != usize::MAX {
            return Err(Error::NotInjective("graph map".into()));
        }
        inv[j] = i;
    }
    if inv.contains(&usize::MAX) {
        return Err(Error::Graph("graph map is not onto".into()));
    }
    Ok(inv)
}

fn letter_value(graph: &FiniteGraph, table: &CylinderTable<FreeWord>, l: Letter, x: &BoundaryPath) -> Option<FreeWord> {
    let e = l.symbol as usize;
    if l.inverse {
        if x.edge_at(0) != Some(e) {
            return None;
        }
        table.value(graph, x).cloned()
    } else {
        let ex = graph.prepend(&[e], x)?;
        Some(table.value(graph, &ex)?.inverse())
    }
}

/// `a(g, x)` from the generator table by the cocycle identity along the
/// reduced spelling of `g`.
pub fn cocycle_value(
    graph: &FiniteGraph,
    table: &CylinderTable<FreeWord>,
    g: &FreeWord,
    x: &BoundaryPath,
) -> Option<FreeWord> {
    let mut acc = FreeWord::identity();
    let mut current = x.clone();
    for &l in g.letters().iter().rev() {
        let v = letter_value(graph, table, l, &current)?;
        acc = v.mul(&acc);
        current = graph.act_word(&FreeWord::from_letters([l]), &current)?;
    }
    Some(acc)
}

impl DrCoeData {
    /// `phi = id`, `k = 0`, `l = 1`.
    pub fn identity(graph: &FiniteGraph) -> Self {
        let zero = CylinderTable::constant(graph.shift_domain(), 0);
        let one = CylinderTable::constant(graph.shift_domain(), 1);
        DrCoeData {
            phi: PathMap::identity(graph),
            phi_inv: PathMap::identity(graph),
            k: zero.clone(),
            l: one.clone(),
            k_prime: zero,
            l_prime: one,
        }
    }
}

/// A check that failed at a sample point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointFailure {
    pub point: String,
    pub cells: Vec<String>,
    pub detail: String,
}

impl PointFailure {
    pub fn describe(&self) -> String {
        if self.cells.is_empty() {
            format!("at `{}`: {}", self.point, self.detail)
        } else {
            format!("at `{}` (cell {}): {}", self.point, self.cells.join(", "), self.detail)
        }
    }
}

fn cell_name<V>(graph: &FiniteGraph, table: &CylinderTable<V>, x: &BoundaryPath) -> String {
    match table.lookup(graph, x) {
        Some((i, _)) => graph.format_cylinder(&table.rules[i].0),
        None => "none".into(),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DrCoeReport {
    pub structure: Vec<String>,
    pub bijection: Vec<PointFailure>,
    pub forward: Vec<PointFailure>,
    pub backward: Vec<PointFailure>,
}

impl DrCoeReport {
    pub fn is_valid(&self) -> bool {
        self.structure.is_empty() && self.bijection.is_empty() && self.forward.is_empty() && self.backward.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShiftCoeReport {
    pub structure: Vec<String>,
    pub bijection: Vec<PointFailure>,
    pub forward: Vec<PointFailure>,
    pub backward: Vec<PointFailure>,
    pub a_cocycle: Vec<PointFailure>,
    pub b_cocycle: Vec<PointFailure>,
}

impl ShiftCoeReport {
    pub fn equations_hold(&self) -> bool {
        self.structure.is_empty() && self.bijection.is_empty() && self.forward.is_empty() && self.backward.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.equations_hold() && self.a_cocycle.is_empty() && self.b_cocycle.is_empty()
    }
}

fn table_structure<V>(out: &mut Vec<String>, name: &str, graph: &FiniteGraph, table: &CylinderTable<V>) {
    for issue in table.cover_issues(graph, &graph.shift_domain()) {
        out.push(format!("{name}: {}", issue.describe(graph, table)));
    }
}

fn sample_points<V>(graph: &FiniteGraph, tables: &[&CylinderTable<V>], depth: usize) -> Vec<BoundaryPath> {
    let mut pts: BTreeSet<BoundaryPath> = graph.boundary_paths(depth, depth.max(1)).into_iter().collect();
    for t in tables {
        for (c, _) in &t.rules {
            pts.extend(graph.representatives(c, depth));
        }
    }
    pts.into_iter().collect()
}

fn bijection_failures(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    phi: &PathMap,
    phi_inv: &PathMap,
    points: &[BoundaryPath],
    out: &mut Vec<PointFailure>,
) {
    for x in points {
        let back = phi.apply(src, tgt, x).and_then(|y| phi_inv.apply(tgt, src, &y));
        if back.as_ref() != Ok(x) {
            let detail = match back {
                Ok(z) => format!("the inverse map returns `{}`", src.format_path(&z)),
                Err(e) => e.to_string(),
            };
            out.push(PointFailure { point: src.format_path(x), cells: Vec::new(), detail });
        }
    }
}

fn structure_of_maps(out: &mut Vec<String>, src: &FiniteGraph, tgt: &FiniteGraph, phi: &PathMap, phi_inv: &PathMap) {
    out.extend(phi.validate(src, tgt).into_iter().map(|m| format!("phi: {m}")));
    out.extend(phi_inv.validate(tgt, src).into_iter().map(|m| format!("phi inverse: {m}")));
}

#[allow(clippy::too_many_arguments)]
fn dr_equation(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    phi: &PathMap,
    k: &CylinderTable<usize>,
    l: &CylinderTable<usize>,
    depth: usize,
    out: &mut Vec<PointFailure>,
) {
    for x in sample_points(src, &[k, l], depth) {
        let Some(sx) = x.shift(1) else { continue };
        let cells = vec![format!("k@{}", cell_name(src, k, &x)), format!("l@{}", cell_name(src, l, &x))];
        let (Some(&kx), Some(&lx)) = (k.value(src, &x), l.value(src, &x)) else {
            out.push(PointFailure { point: src.format_path(&x), cells, detail: "k or l undefined".into() });
            continue;
        };
        let lhs = phi.apply(src, tgt, &x).ok().and_then(|y| y.shift(lx));
        let rhs = phi.apply(src, tgt, &sx).ok().and_then(|y| y.shift(kx));
        if lhs.is_none() || lhs != rhs {
            let show = |p: &Option<BoundaryPath>| p.as_ref().map_or("undefined".to_string(), |p| tgt.format_path(p));
            out.push(PointFailure {
                point: src.format_path(&x),
                cells,
                detail: format!("shift^{lx} of the image is {} but shift^{kx} of the image of the shift is {}", show(&lhs), show(&rhs)),
            });
        }
    }
}

/// Checks the defining equations of a Deaconu-Renault orbit equivalence on
/// sample points of every cell, with sample depth `depth`.
pub fn validate_coe_dr(src: &FiniteGraph, tgt: &FiniteGraph, d: &DrCoeData, depth: usize) -> DrCoeReport {
    let mut r = DrCoeReport::default();
    structure_of_maps(&mut r.structure, src, tgt, &d.phi, &d.phi_inv);
    table_structure(&mut r.structure, "k", src, &d.k);
    table_structure(&mut r.structure, "l", src, &d.l);
    table_structure(&mut r.structure, "k'", tgt, &d.k_prime);
    table_structure(&mut r.structure, "l'", tgt, &d.l_prime);
    if !r.structure.is_empty() {
        return r;
    }
    bijection_failures(src, tgt, &d.phi, &d.phi_inv, &sample_points(src, &[&d.k], depth), &mut r.bijection);
    bijection_failures(tgt, src, &d.phi_inv, &d.phi, &sample_points(tgt, &[&d.k_prime], depth), &mut r.bijection);
    dr_equation(src, tgt, &d.phi, &d.k, &d.l, depth, &mut r.forward);
    dr_equation(tgt, src, &d.phi_inv, &d.k_prime, &d.l_prime, depth, &mut r.backward);
    r
}

#[allow(clippy::too_many_arguments)]
fn orbit_equation(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    phi: &PathMap,
    table: &CylinderTable<FreeWord>,
    depth: usize,
    max_word: usize,
    equations: &mut Vec<PointFailure>,
    cocycle: &mut Vec<PointFailure>,
) {
    let words = FreeWord::all_up_to(src.edge_count() as u32, max_word);
    let singles = FreeWord::all_up_to(src.edge_count() as u32, 1);
    let fmt_src = |g: &FreeWord| src.format_word(g);
    for x in sample_points(src, &[table], depth) {
        let fx = phi.apply(src, tgt, &x).ok();
        for g in &words {
            let Some(gx) = src.act_word(g, &x) else { continue };
            let cells = vec![cell_name(src, table, &x)];
            let point = src.format_path(&x);
            let Some(a) = cocycle_value(src, table, g, &x) else {
                equations.push(PointFailure { point, cells, detail: format!("cocycle undefined at `{}`", fmt_src(g)) });
                continue;
            };
            let lhs = phi.apply(src, tgt, &gx).ok();
            let rhs = fx.as_ref().and_then(|y| tgt.act_word(&a, y));
            if lhs.is_none() || lhs != rhs {
                equations.push(PointFailure {
                    point,
                    cells,
                    detail: format!("image of `{}` does not match `{}` acting on the image", fmt_src(g), tgt.format_word(&a)),
                });
            }
        }
        for g1 in &singles {
            for g2 in &singles {
                let Some(y) = src.act_word(g2, &x) else { continue };
                let g = g1.mul(g2);
                if src.act_word(&g, &x).is_none() {
                    continue;
                }
                let whole = cocycle_value(src, table, &g, &x);
                let split = cocycle_value(src, table, g1, &y)
                    .zip(cocycle_value(src, table, g2, &x))
                    .map(|(p, q)| p.mul(&q));
                if whole.is_none() || whole != split {
                    cocycle.push(PointFailure {
                        point: src.format_path(&x),
                        cells: vec![cell_name(src, table, &x)],
                        detail: format!("cocycle identity fails for `{}` then `{}`", fmt_src(g2), fmt_src(g1)),
                    });
                }
            }
        }
    }
}

/// Checks the orbit equivalence equations for all words of length at most
/// `max_word` and the cocycle identity for pairs of letters, on sample
/// points of every cell.
pub fn validate_shift_coe(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    t: &ShiftCoe,
    depth: usize,
    max_word: usize,
) -> ShiftCoeReport {
    let mut r = ShiftCoeReport::default();
    structure_of_maps(&mut r.structure, src, tgt, &t.phi, &t.phi_inv);
    table_structure(&mut r.structure, "a", src, &t.a);
    table_structure(&mut r.structure, "b", tgt, &t.b);
    for (name, table, g) in [("a", &t.a, tgt), ("b", &t.b, src)] {
        for (c, w) in &table.rules {
            if w.letters().iter().any(|l| l.symbol as usize >= g.edge_count()) {
                r.structure.push(format!("{name}: value on `{c:?}` uses an unknown generator"));
            }
        }
    }
    if !r.structure.is_empty() {
        return r;
    }
    bijection_failures(src, tgt, &t.phi, &t.phi_inv, &sample_points(src, &[&t.a], depth), &mut r.bijection);
    bijection_failures(tgt, src, &t.phi_inv, &t.phi, &sample_points(tgt, &[&t.b], depth), &mut r.bijection);
    orbit_equation(src, tgt, &t.phi, &t.a, depth, max_word, &mut r.forward, &mut r.a_cocycle);
    orbit_equation(tgt, src, &t.phi_inv, &t.b, depth, max_word, &mut r.backward, &mut r.b_cocycle);
    r
}

fn ab_table(graph: &FiniteGraph, table: &CylinderTable<FreeWord>) -> Result<(CylinderTable<usize>, CylinderTable<usize>)> {
    let mut k = Vec::new();
    let mut l = Vec::new();
    for (c, w) in &table.rules {
        let (mu, nu) = w.factor_positive().ok_or_else(|| {
            Error::Morphism(format!(
                "value `{w}` on `{}` is not of the form mu nu^-1 with mu, nu positive",
                graph.format_cylinder(c)
            ))
        })?;
        k.push((c.clone(), mu.len()));
        l.push((c.clone(), nu.len()));
    }
    Ok((CylinderTable::new(k), CylinderTable::new(l)))
}

/// `k(x) = |mu|` and `l(x) = |nu|` where `a(e^-1, x) = mu nu^-1` in reduced
/// form, and likewise for `b`.
pub fn coe_ab_to_kl(src: &FiniteGraph, tgt: &FiniteGraph, t: &ShiftCoe) -> Result<DrCoeData> {
    let (k, l) = ab_table(src, &t.a)?;
    let (k_prime, l_prime) = ab_table(tgt, &t.b)?;
    Ok(DrCoeData { phi: t.phi.clone(), phi_inv: t.phi_inv.clone(), k, l, k_prime, l_prime })
}

fn kl_table(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    phi: &PathMap,
    k: &CylinderTable<usize>,
    l: &CylinderTable<usize>,
) -> Result<CylinderTable<FreeWord>> {
    let limit = k.max_len().max(l.max_len()) + MAX_REFINEMENT;
    let mut rules = Vec::new();
    let mut stack = src.shift_domain();
    stack.reverse();
    while let Some(c) = stack.pop() {
        let err = |m: &str| Error::Morphism(format!("on `{}`: {m}", src.format_cylinder(&c)));
        let find = |t: &CylinderTable<usize>| t.rules.iter().find(|(r, _)| c.is_subset(r)).map(|(_, v)| *v);
        let split = |stack: &mut Vec<Cylinder>| -> Result<()> {
            if c.edges.len() >= limit || c.exact {
                return Err(err("the image does not determine mu and nu"));
            }
            let mut children = src.cylinder_children(&c);
            children.reverse();
            stack.extend(children);
            Ok(())
        };
        let (Some(kv), Some(lv)) = (find(k), find(l)) else {
            if k.rules.iter().chain(&l.rules).any(|(r, _)| r.is_subset(&c)) {
                split(&mut stack)?;
                continue;
            }
            return Err(err("k or l is undefined"));
        };
        let image = phi.determined_output(src, tgt, &c);
        let shifted = src
            .cylinder_shift(&c)
            .map(|s| phi.determined_output(src, tgt, &s))
            .unwrap_or_default();
        if image.len() >= lv && shifted.len() >= kv {
            let g = word_of(&shifted[..kv]).mul(&word_of(&image[..lv]).inverse());
            rules.push((c, g));
        } else {
            split(&mut stack)?;
        }
    }
    Ok(CylinderTable::new(rules))
}

/// `a(e^-1, x) = mu nu^-1` with `nu` the first `l(x)` edges of `phi(x)` and
/// `mu` the first `k(x)` edges of `phi(sigma(x))`, refining cells until both
/// are determined; likewise `b` from `k'`, `l'`.
pub fn coe_kl_to_ab(src: &FiniteGraph, tgt: &FiniteGraph, d: &DrCoeData) -> Result<ShiftCoe> {
    Ok(ShiftCoe {
        phi: d.phi.clone(),
        phi_inv: d.phi_inv.clone(),
        a: kl_table(src, tgt, &d.phi, &d.k, &d.l)?,
        b: kl_table(tgt, src, &d.phi_inv, &d.k_prime, &d.l_prime)?,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StabReport {
    pub sums: Vec<PointFailure>,
    pub finiteness: Vec<PointFailure>,
}

impl StabReport {
    pub fn holds(&self) -> bool {
        self.sums.is_empty() && self.finiteness.is_empty()
    }
}

#[allow(clippy::too_many_arguments)]
fn stab_side(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    phi: &PathMap,
    k: &CylinderTable<usize>,
    l: &CylinderTable<usize>,
    essential: bool,
    depth: usize,
    r: &mut StabReport,
) {
    let stab = |g: &FiniteGraph, x: &BoundaryPath| if essential { g.stab_min_ess(x) } else { g.stab_min(x) };
    let show = |p: Option<usize>| p.map_or("infinite".to_string(), |p| p.to_string());
    for x in src.boundary_paths(depth, depth.max(1)) {
        let Ok(y) = phi.apply(src, tgt, &x) else { continue };
        let (sx, sy) = (stab(src, &x), stab(tgt, &y));
        if sx.is_some() != sy.is_some() {
            r.finiteness.push(PointFailure {
                point: src.format_path(&x),
                cells: Vec::new(),
                detail: format!("minimal stabiliser {} but {} at the image", show(sx), show(sy)),
            });
        }
        let Some(p) = sx else { continue };
        if !x.is_purely_periodic() {
            continue;
        }
        let mut sum = 0i64;
        let mut cells = Vec::new();
        let mut current = x.clone();
        for _ in 0..p {
            let (Some(&kv), Some(&lv)) = (k.value(src, &current), l.value(src, &current)) else {
                sum = i64::MIN;
                break;
            };
            cells.push(cell_name(src, l, &current));
            sum += lv as i64 - kv as i64;
            current = current.shift(1).expect("infinite path");
        }
        if sum == i64::MIN || Some(sum.unsigned_abs() as usize) != sy {
            cells.dedup();
            r.sums.push(PointFailure {
                point: src.format_path(&x),
                cells,
                detail: format!("|sum of l - k| over one period is {} but the image has minimal stabiliser {}", sum.unsigned_abs(), show(sy)),
            });
        }
    }
}

/// Stabiliser preservation of Deaconu-Renault orbit equivalence data: the
/// sum of `l - k` over the orbit of each cycle point must equal the minimal
/// (essential) stabiliser of the image in absolute value, and finiteness of
/// minimal stabilisers must be preserved. Both directions are checked on
/// points with prefix and cycle at most `depth`.
pub fn check_stab_preserving_dr(
    src: &FiniteGraph,
    tgt: &FiniteGraph,
    d: &DrCoeData,
    essential: bool,
    depth: usize,
) -> StabReport {
    let mut r = StabReport::default();
    stab_side(src, tgt, &d.phi, &d.k, &d.l, essential, depth, &mut r);
    stab_side(tgt, src, &d.phi_inv, &d.k_prime, &d.l_prime, essential, depth, &mut r);
    r
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EcReport {
    pub failures: Vec<String>,
}

impl EcReport {
    pub fn eventually_conjugate(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `l(x) = k(x) + 1` on the shift domain, checked cell by cell on sample
/// points.
pub fn eventual_conjugacy_dr(src: &FiniteGraph, d: &DrCoeData, depth: usize) -> EcReport {
    let mut failures = Vec::new();
    for x in sample_points(src, &[&d.k, &d.l], depth) {
        if x.shift(1).is_none() {
            continue;
        }
        let (k, l) = (d.k.value(src, &x), d.l.value(src, &x));
        if !matches!((k, l), (Some(&k), Some(&l)) if l == k + 1) {
            failures.push(format!(
                "at `{}` (cell {}): l is not k + 1",
                src.format_path(&x),
                cell_name(src, &d.l, &x)
            ));
        }
    }
    failures.dedup();
    EcReport { failures }
}

/// The length condition on generator cells: `a(e^-1, x)` must have exponent
/// sum `-1`.
pub fn eventual_conjugacy_shift(src: &FiniteGraph, t: &ShiftCoe) -> EcReport {
    let failures = t
        .a
        .rules
        .iter()
        .filter(|(_, w)| w.length_cocycle() != -1)
        .map(|(c, w)| format!("cell `{}`: value `{w}` has length {}", src.format_cylinder(c), w.length_cocycle()))
        .collect();
    EcReport { failures }
}

fn ell(group: &GroupDescriptor, g: &GroupElement) -> Result<i64> {
    match g {
        GroupElement::Int(n) => Ok(*n),
        _ => group.length_cocycle(g),
    }
}

/// The length condition `l(a(g, x)) = l(g)` on the generator entries of an
/// orbit morphism between systems of free groups or the integers.
pub fn eventual_conjugacy_orbit(src: &FinitePds, tgt: &FinitePds, m: &OrbitMorphism) -> Result<EcReport> {
    let mut failures = Vec::new();
    for ((g, x), a) in &m.cocycle {
        if src.group().norm(g) != Some(1) {
            continue;
        }
        let (lg, la) = (ell(src.group(), g)?, ell(tgt.group(), a)?);
        if lg != la {
            failures.push(format!(
                "a({}, {}) = {} has length {la}, expected {lg}",
                src.group().format_element(g),
                src.space().name(*x),
                tgt.group().format_element(a)
            ));
        }
    }
    Ok(EcReport { failures })
}

#[cfg(test)]
mod tests {
    use super::super::instances::*;
    use super::*;

    fn cyl(g: &FiniteGraph, s: &str) -> Cylinder {
        g.parse_cylinder(s).unwrap()
    }

    fn relabel() -> (FiniteGraph, FiniteGraph, ShiftCoe) {
        let (e, f) = (two_shift(), two_shift_relabeled());
        let t = ShiftCoe::relabeling(&e, &f, &[0], &[0, 1]).unwrap();
        (e, f, t)
    }

    #[test]
    fn cylinders() {
        let g = two_shift();
        let a = cyl(&g, "a");
        assert!(g.cylinder_contains(&a, &g.parse_path("(a)").unwrap()));
        assert!(g.cylinder_contains(&a, &g.parse_path("a(b)").unwrap()));
        assert!(!g.cylinder_contains(&a, &g.parse_path("(b)").unwrap()));
        assert_eq!(g.format_cylinder(&cyl(&g, "@v")), "@v");
        let s = sink_graph();
        assert!(s.parse_cylinder("a$").is_ok());
        assert!(s.parse_cylinder("@v$").is_err());
        let bad = FiniteGraph::from_names(&["v", "w"], &[("a", "v", "w"), ("b", "v", "w")]).unwrap();
        assert!(bad.parse_cylinder("a.b").is_err());
    }

    #[test]
    fn cover_detection() {
        let g = two_shift();
        let t = CylinderTable::new(vec![(cyl(&g, "a"), 0), (cyl(&g, "b.a"), 0)]);
        assert_eq!(t.cover_issues(&g, &g.shift_domain()), vec![TableIssue::Gap(cyl(&g, "b.b"))]);
        let t = CylinderTable::new(vec![(cyl(&g, "a"), 0), (cyl(&g, "a.b"), 0), (cyl(&g, "b"), 1)]);
        assert_eq!(t.cover_issues(&g, &g.shift_domain()), vec![TableIssue::Overlap(0, 1)]);
    }

    #[test]
    fn substitution_map_is_bijective() {
        let g = two_shift();
        let (a, b) = (0, 1);
        let phi = PathMap {
            rules: vec![(vec![a], vec![b]), (vec![b, a], vec![a, a]), (vec![b, b], vec![a, b])],
            vertex_rules: BTreeMap::new(),
        };
        let inv = PathMap {
            rules: vec![(vec![b], vec![a]), (vec![a, a], vec![b, a]), (vec![a, b], vec![b, b])],
            vertex_rules: BTreeMap::new(),
        };
        assert!(phi.validate(&g, &g).is_empty());
        for x in g.boundary_paths(4, 4) {
            let y = phi.apply(&g, &g, &x).unwrap();
            assert_eq!(inv.apply(&g, &g, &y).unwrap(), x);
        }
        let x = g.parse_path("b(a)").unwrap();
        assert_eq!(phi.apply(&g, &g, &x).unwrap(), g.parse_path("a.a(b)").unwrap());
    }

    #[test]
    fn ab_to_kl_examples() {
        let g = two_shift();
        let d = coe_ab_to_kl(&g, &g, &ShiftCoe::identity(&g)).unwrap();
        assert!(d.k.rules.iter().all(|(_, v)| *v == 0));
        assert!(d.l.rules.iter().all(|(_, v)| *v == 1));
        let (e, f, t) = relabel();
        let d = coe_ab_to_kl(&e, &f, &t).unwrap();
        assert!(d.l.rules.iter().all(|(_, v)| *v == 1));
        assert!(validate_coe_dr(&e, &f, &d, 3).is_valid());

        let (a, b) = (FreeWord::generator(0), FreeWord::generator(1));
        let mut t = ShiftCoe::identity(&g);
        t.a.rules[0].1 = b.mul(&a.inverse());
        let d = coe_ab_to_kl(&g, &g, &t).unwrap();
        assert_eq!((d.k.rules[0].1, d.l.rules[0].1), (1, 1));
        t.a.rules[0].1 = a.inverse().mul(&b);
        assert!(coe_ab_to_kl(&g, &g, &t).is_err());
    }

    #[test]
    fn kl_to_ab_examples() {
        let g = two_shift();
        let t = coe_kl_to_ab(&g, &g, &DrCoeData::identity(&g)).unwrap();
        assert_eq!(t, ShiftCoe::identity(&g));
        let (e, f, t) = relabel();
        let d = coe_ab_to_kl(&e, &f, &t).unwrap();
        let back = coe_kl_to_ab(&e, &f, &d).unwrap();
        assert_eq!(back, t);
        assert!(validate_shift_coe(&e, &f, &back, 3, 2).is_valid());
    }

    #[test]
    fn corrupted_l_is_localized() {
        let g = two_shift();
        let mut d = DrCoeData::identity(&g);
        d.l.rules[0].1 = 2;
        let r = validate_coe_dr(&g, &g, &d, 2);
        assert!(!r.forward.is_empty() && r.backward.is_empty());
        assert!(r.forward.iter().all(|f| f.cells.contains(&"l@a".to_string())));
    }

    #[test]
    fn stabiliser_sums() {
        let g = two_shift();
        assert!(check_stab_preserving_dr(&g, &g, &DrCoeData::identity(&g), false, 2).holds());
        let (e, f, t) = relabel();
        let d = coe_ab_to_kl(&e, &f, &t).unwrap();
        assert!(check_stab_preserving_dr(&e, &f, &d, false, 2).holds());

        let l = loop_graph();
        let mut d = DrCoeData::identity(&l);
        d.k.rules[0].1 = 1;
        d.l.rules[0].1 = 0;
        assert!(validate_coe_dr(&l, &l, &d, 2).is_valid());
        assert!(check_stab_preserving_dr(&l, &l, &d, false, 2).sums.is_empty());
        d.l.rules[0].1 = 3;
        assert!(!check_stab_preserving_dr(&l, &l, &d, false, 2).sums.is_empty());
    }

    #[test]
    fn eventual_conjugacy_forms() {
        let (e, f, t) = relabel();
        assert!(eventual_conjugacy_shift(&e, &t).eventually_conjugate());
        assert!(eventual_conjugacy_dr(&e, &coe_ab_to_kl(&e, &f, &t).unwrap(), 2).eventually_conjugate());
        let g = two_shift();
        let (a, b) = (FreeWord::generator(0), FreeWord::generator(1));
        let mut t = ShiftCoe::identity(&g);
        t.a.rules[0].1 = b.mul(&a.inverse()).mul(&b.inverse());
        assert!(eventual_conjugacy_shift(&g, &t).eventually_conjugate());
        t.a.rules[0].1 = a.mul(&b).inverse();
        assert!(!eventual_conjugacy_shift(&g, &t).eventually_conjugate());
    }
}
