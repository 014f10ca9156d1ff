//! Boundary path spaces of finite graphs, the partial action of the free group
//! on the edges, and the associated Deaconu-Renault groupoid.
//!
//! Points are restricted to finite boundary paths and eventually periodic
//! infinite paths. Sets of points are described by cylinders (see
//! [`Cylinder`]), which is how locally constant data is tabulated.
//!
//! An edge `e` has a range `r(e)` and a source `d(e)`; `(e1, ..., en)` is a
//! path when `d(ei) = r(e(i+1))`. A vertex is singular when no edge has it as
//! its range, so finite boundary paths are exactly the paths that cannot be
//! continued.

mod coe;

pub use coe::*;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::groupoid::{assemble, Arrow, FiniteGroupoid};
use crate::groups::{is_identifier, FreeWord, GroupDescriptor, GroupElement};
use crate::pds::{FinitePds, FiniteSpace, Generation, PartialBijection};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub name: String,
    pub r: usize,
    pub d: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    /// `continuations[v]` holds the edges `e` with `r(e) = v`.
    continuations: Vec<Vec<usize>>,
}

/// A point of the boundary path space.
///
/// `Finite` covers paths ending at a singular vertex, including the length
/// zero path at such a vertex. `EvPeriodic` is `prefix` followed by `cycle`
/// repeated forever, kept in canonical form: the cycle is primitive and no
/// rotation of it absorbs the end of the prefix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryPath {
    Finite { edges: Vec<usize>, vertex: usize },
    EvPeriodic { prefix: Vec<usize>, cycle: Vec<usize> },
}

impl BoundaryPath {
    pub fn is_finite(&self) -> bool {
        matches!(self, BoundaryPath::Finite { .. })
    }

    /// Number of edges, `None` for infinite paths.
    pub fn length(&self) -> Option<usize> {
        match self {
            BoundaryPath::Finite { edges, .. } => Some(edges.len()),
            BoundaryPath::EvPeriodic { .. } => None,
        }
    }

    pub fn edge_at(&self, i: usize) -> Option<usize> {
        match self {
            BoundaryPath::Finite { edges, .. } => edges.get(i).copied(),
            BoundaryPath::EvPeriodic { prefix, cycle } => Some(if i < prefix.len() {
                prefix[i]
            } else {
                cycle[(i - prefix.len()) % cycle.len()]
            }),
        }
    }

    /// The first `n` edges.
    pub fn take(&self, n: usize) -> Option<Vec<usize>> {
        (0..n).map(|i| self.edge_at(i)).collect()
    }

    pub fn starts_with(&self, path: &[usize]) -> bool {
        path.iter().enumerate().all(|(i, &e)| self.edge_at(i) == Some(e))
    }

    /// `sigma^n`: drops the first `n` edges.
    pub fn shift(&self, n: usize) -> Option<BoundaryPath> {
        match self {
            BoundaryPath::Finite { edges, vertex } => (n <= edges.len())
                .then(|| BoundaryPath::Finite { edges: edges[n..].to_vec(), vertex: *vertex }),
            BoundaryPath::EvPeriodic { prefix, cycle } => Some(if n <= prefix.len() {
                BoundaryPath::EvPeriodic { prefix: prefix[n..].to_vec(), cycle: cycle.clone() }
            } else {
                let mut cycle = cycle.clone();
                let by = (n - prefix.len()) % cycle.len();
                cycle.rotate_left(by);
                BoundaryPath::EvPeriodic { prefix: Vec::new(), cycle }
            }),
        }
    }

    /// True when `sigma^p(x) = x` for the least period `p`.
    pub fn is_purely_periodic(&self) -> bool {
        matches!(self, BoundaryPath::EvPeriodic { prefix, .. } if prefix.is_empty())
    }
}

fn primitive_root(cycle: &[usize]) -> &[usize] {
    let n = cycle.len();
    for p in 1..n {
        if n % p == 0 && (0..n).all(|i| cycle[i] == cycle[i % p]) {
            return &cycle[..p];
        }
    }
    cycle
}

/// Canonical form of `prefix cycle^inf`. Composability is not checked.
pub(crate) fn canonical_periodic(mut prefix: Vec<usize>, cycle: &[usize]) -> BoundaryPath {
    let mut cycle = primitive_root(cycle).to_vec();
    while let (Some(&p), Some(&c)) = (prefix.last(), cycle.last()) {
        if p != c {
            break;
        }
        prefix.pop();
        cycle.rotate_right(1);
    }
    BoundaryPath::EvPeriodic { prefix, cycle }
}

fn graph_err(message: String) -> Error {
    Error::Graph(message)
}

impl FiniteGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(graph_err("a graph needs at least one vertex".into()));
        }
        let mut vertex_index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if !is_identifier(v) {
                return Err(graph_err(format!("`{v}` is not a valid vertex name")));
            }
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(graph_err(format!("duplicate vertex `{v}`")));
            }
        }
        let mut edge_index = HashMap::new();
        let mut continuations = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            if !is_identifier(&e.name) {
                return Err(graph_err(format!("`{}` is not a valid edge name", e.name)));
            }
            if e.r >= vertices.len() || e.d >= vertices.len() {
                return Err(graph_err(format!("edge `{}` has an unknown endpoint", e.name)));
            }
            if edge_index.insert(e.name.clone(), i).is_some() {
                return Err(graph_err(format!("duplicate edge `{}`", e.name)));
            }
            continuations[e.r].push(i);
        }
        Ok(FiniteGraph { vertices, edges, vertex_index, edge_index, continuations })
    }

    /// Builds a graph from names; edges are `(name, r, d)`.
    pub fn from_names(vertices: &[&str], edges: &[(&str, &str, &str)]) -> Result<Self> {
        let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let find = |n: &str| {
            vs.iter()
                .position(|v| v == n)
                .ok_or_else(|| graph_err(format!("unknown vertex `{n}`")))
        };
        let es = edges
            .iter()
            .map(|&(name, r, d)| Ok(Edge { name: name.to_string(), r: find(r)?, d: find(d)? }))
            .collect::<Result<Vec<_>>>()?;
        FiniteGraph::new(vs, es)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn lookup_vertex(&self, name: &str) -> Result<usize> {
        self.vertex_index
            .get(name)
            .copied()
            .ok_or_else(|| graph_err(format!("unknown vertex `{name}`")))
    }

    pub fn lookup_edge(&self, name: &str) -> Result<usize> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| graph_err(format!("unknown edge `{name}`")))
    }

    /// Edges that can follow a path ending at `v`.
    pub fn continuations(&self, v: usize) -> &[usize] {
        &self.continuations[v]
    }

    pub fn is_singular(&self, v: usize) -> bool {
        self.continuations[v].is_empty()
    }

    pub fn singular_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.is_singular(v)).collect()
    }

    /// The free group on the edge set.
    pub fn alphabet(&self) -> Result<GroupDescriptor> {
        if self.edges.is_empty() {
            return Err(graph_err("the graph has no edges".into()));
        }
        GroupDescriptor::free(self.edges.iter().map(|e| e.name.clone()))
    }

    pub fn is_path(&self, edges: &[usize]) -> bool {
        edges.iter().all(|&e| e < self.edges.len())
            && edges.windows(2).all(|w| self.edges[w[0]].d == self.edges[w[1]].r)
    }

    pub fn vertex_path(&self, v: usize) -> Result<BoundaryPath> {
        if v >= self.vertices.len() || !self.is_singular(v) {
            return Err(graph_err(format!("vertex {v} is not singular")));
        }
        Ok(BoundaryPath::Finite { edges: Vec::new(), vertex: v })
    }

    pub fn finite_path(&self, edges: Vec<usize>) -> Result<BoundaryPath> {
        let Some(&last) = edges.last() else {
            return Err(graph_err("use a vertex path for length zero".into()));
        };
        if !self.is_path(&edges) {
            return Err(graph_err(format!("`{}` is not a path", self.format_edges(&edges))));
        }
        let vertex = self.edges[last].d;
        if !self.is_singular(vertex) {
            return Err(graph_err(format!(
                "`{}` ends at `{}`, which is not singular",
                self.format_edges(&edges),
                self.vertices[vertex]
            )));
        }
        Ok(BoundaryPath::Finite { edges, vertex })
    }

    pub fn periodic(&self, prefix: Vec<usize>, cycle: Vec<usize>) -> Result<BoundaryPath> {
        let (Some(&first), Some(&last)) = (cycle.first(), cycle.last()) else {
            return Err(graph_err("empty cycle".into()));
        };
        let mut whole = prefix.clone();
        whole.extend_from_slice(&cycle);
        if !self.is_path(&whole) || self.edges[last].d != self.edges[first].r {
            return Err(graph_err(format!(
                "`{}({})` is not a valid periodic path",
                self.format_edges(&prefix),
                self.format_edges(&cycle)
            )));
        }
        Ok(canonical_periodic(prefix, &cycle))
    }

    /// Membership in the boundary path space, including canonical form.
    pub fn contains(&self, x: &BoundaryPath) -> bool {
        match x {
            BoundaryPath::Finite { edges, vertex } => {
                *vertex < self.vertices.len()
                    && self.is_singular(*vertex)
                    && self.is_path(edges)
                    && edges.last().map_or(true, |&e| self.edges[e].d == *vertex)
            }
            BoundaryPath::EvPeriodic { prefix, cycle } => self
                .periodic(prefix.clone(), cycle.clone())
                .is_ok_and(|c| &c == x),
        }
    }

    /// `r(x)`: the vertex a path starts from.
    pub fn range_vertex(&self, x: &BoundaryPath) -> usize {
        match x.edge_at(0) {
            Some(e) => self.edges[e].r,
            None => match x {
                BoundaryPath::Finite { vertex, .. } => *vertex,
                BoundaryPath::EvPeriodic { .. } => unreachable!("periodic paths are nonempty"),
            },
        }
    }

    pub fn sigma(&self, x: &BoundaryPath) -> Option<BoundaryPath> {
        x.shift(1)
    }

    pub fn sigma_n(&self, n: usize, x: &BoundaryPath) -> Option<BoundaryPath> {
        x.shift(n)
    }

    /// `path . x`, defined when `path` ends where `x` starts.
    pub fn prepend(&self, path: &[usize], x: &BoundaryPath) -> Option<BoundaryPath> {
        let Some(&last) = path.last() else {
            return Some(x.clone());
        };
        if !self.is_path(path) || self.edges[last].d != self.range_vertex(x) {
            return None;
        }
        let mut whole = path.to_vec();
        Some(match x {
            BoundaryPath::Finite { edges, vertex } => {
                whole.extend_from_slice(edges);
                BoundaryPath::Finite { edges: whole, vertex: *vertex }
            }
            BoundaryPath::EvPeriodic { prefix, cycle } => {
                whole.extend_from_slice(prefix);
                canonical_periodic(whole, cycle)
            }
        })
    }

    /// The semi-saturated action: `alpha beta^-1` strips `beta` and prepends
    /// `alpha`. Words with no such factorization act nowhere.
    pub fn act_word(&self, g: &FreeWord, x: &BoundaryPath) -> Option<BoundaryPath> {
        let (alpha, beta) = g.factor_positive()?;
        let alpha = symbols(&alpha);
        let beta = symbols(&beta);
        if !x.starts_with(&beta) {
            return None;
        }
        self.prepend(&alpha, &x.shift(beta.len())?)
    }

    pub fn format_edges(&self, edges: &[usize]) -> String {
        edges
            .iter()
            .map(|&e| self.edges.get(e).map_or("?", |e| e.name.as_str()))
            .collect::<Vec<_>>()
            .join(".")
    }

    /// `@w` for a vertex path, `a.b` for a finite path and `a.b(c.d)` for
    /// `a b (c d)^inf`.
    pub fn format_path(&self, x: &BoundaryPath) -> String {
        match x {
            BoundaryPath::Finite { edges, vertex } if edges.is_empty() => {
                format!("@{}", self.vertices[*vertex])
            }
            BoundaryPath::Finite { edges, .. } => self.format_edges(edges),
            BoundaryPath::EvPeriodic { prefix, cycle } => {
                format!("{}({})", self.format_edges(prefix), self.format_edges(cycle))
            }
        }
    }

    pub fn parse_edges(&self, text: &str) -> Result<Vec<usize>> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split('.').map(|n| self.lookup_edge(n.trim())).collect()
    }

    pub fn parse_path(&self, text: &str) -> Result<BoundaryPath> {
        let text = text.trim();
        if let Some(v) = text.strip_prefix('@') {
            return self.vertex_path(self.lookup_vertex(v.trim())?);
        }
        if let Some(body) = text.strip_suffix(')') {
            let (prefix, cycle) = body
                .split_once('(')
                .ok_or_else(|| graph_err(format!("unbalanced parenthesis in `{text}`")))?;
            return self.periodic(self.parse_edges(prefix)?, self.parse_edges(cycle)?);
        }
        self.finite_path(self.parse_edges(text)?)
    }

    /// All paths with exactly `len` edges, optionally starting at `start`.
    pub fn walks(&self, start: Option<usize>, len: usize) -> Vec<Vec<usize>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut frontier: Vec<Vec<usize>> = match start {
            Some(v) => self.continuations[v].iter().map(|&e| vec![e]).collect(),
            None => (0..self.edges.len()).map(|e| vec![e]).collect(),
        };
        for _ in 1..len {
            frontier = frontier
                .into_iter()
                .flat_map(|p| {
                    let v = self.edges[*p.last().unwrap()].d;
                    self.continuations[v].iter().map(move |&e| {
                        let mut q = p.clone();
                        q.push(e);
                        q
                    })
                })
                .collect();
        }
        frontier
    }

    /// Canonical boundary paths: finite ones with at most `max_prefix` edges
    /// and eventually periodic ones with prefix at most `max_prefix` and
    /// primitive cycle at most `max_cycle`. Sorted, without repeats.
    pub fn boundary_paths(&self, max_prefix: usize, max_cycle: usize) -> Vec<BoundaryPath> {
        let mut out = BTreeSet::new();
        let mut by_end: Vec<Vec<Vec<usize>>> = vec![Vec::new(); self.vertices.len()];
        for len in 1..=max_prefix {
            for p in self.walks(None, len) {
                let v = self.edges[*p.last().unwrap()].d;
                if self.is_singular(v) {
                    out.insert(BoundaryPath::Finite { edges: p.clone(), vertex: v });
                }
                by_end[v].push(p);
            }
        }
        for v in self.singular_vertices() {
            out.insert(BoundaryPath::Finite { edges: Vec::new(), vertex: v });
        }
        for len in 1..=max_cycle {
            for c in self.walks(None, len) {
                let (first, last) = (c[0], c[c.len() - 1]);
                if self.edges[last].d != self.edges[first].r || primitive_root(&c).len() != len {
                    continue;
                }
                out.insert(canonical_periodic(Vec::new(), &c));
                for p in &by_end[self.edges[first].r] {
                    out.insert(canonical_periodic(p.clone(), &c));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Purely periodic points with primitive period at most `max_cycle`.
    pub fn cycle_points(&self, max_cycle: usize) -> Vec<BoundaryPath> {
        self.boundary_paths(0, max_cycle)
            .into_iter()
            .filter(|x| x.is_purely_periodic())
            .collect()
    }

    /// Least positive element of the stabiliser of `x`; `None` is infinity.
    pub fn stab_min(&self, x: &BoundaryPath) -> Option<usize> {
        match x {
            BoundaryPath::Finite { .. } => None,
            BoundaryPath::EvPeriodic { cycle, .. } => Some(cycle.len()),
        }
    }

    /// Least positive element of the essential stabiliser.
    ///
    /// Finite only when every vertex on the cycle of `x` has a single
    /// continuation, so that a cylinder around `x` is the point itself.
    pub fn stab_min_ess(&self, x: &BoundaryPath) -> Option<usize> {
        match x {
            BoundaryPath::Finite { .. } => None,
            BoundaryPath::EvPeriodic { cycle, .. } => cycle
                .iter()
                .all(|&e| self.continuations[self.edges[e].r].len() == 1)
                .then_some(cycle.len()),
        }
    }

    /// Decides `p` in the essential stabiliser of `x` by exploring cylinder
    /// neighbourhoods of `x` directly.
    ///
    /// For each cylinder `Z(x[..l])` with `l` up to `|V| + |prefix|`, all
    /// extensions to depth `l + 2p` are generated; `sigma^(l+p)` and
    /// `sigma^l` agree on the cylinder iff every extension is `p`-periodic
    /// after position `l` and none stops at a singular vertex.
    pub fn is_essential_period_bruteforce(&self, x: &BoundaryPath, p: usize) -> bool {
        let BoundaryPath::EvPeriodic { prefix, .. } = x else {
            return false;
        };
        if p == 0 {
            return true;
        }
        let bound = self.vertices.len() + prefix.len();
        'cylinders: for l in 0..=bound {
            let stem = x.take(l).expect("infinite path");
            let depth = l + 2 * p;
            let mut frontier = vec![stem];
            while let Some(path) = frontier.pop() {
                if path.len() == depth {
                    if (l..l + p).any(|i| path[i] != path[i + p]) {
                        continue 'cylinders;
                    }
                    continue;
                }
                let v = match path.last() {
                    Some(&e) => self.edges[e].d,
                    None => self.range_vertex(x),
                };
                if self.is_singular(v) {
                    continue 'cylinders;
                }
                for &e in &self.continuations[v] {
                    let mut q = path.clone();
                    q.push(e);
                    frontier.push(q);
                }
            }
            return true;
        }
        false
    }

    /// Brute-force counterpart of [`FiniteGraph::stab_min_ess`].
    pub fn stab_min_ess_bruteforce(&self, x: &BoundaryPath) -> Option<usize> {
        let p = self.stab_min(x)?;
        self.is_essential_period_bruteforce(x, p).then_some(p)
    }

    pub fn induced_action(&self) -> Result<InducedAction<'_>> {
        Ok(InducedAction { graph: self, group: self.alphabet()? })
    }

    pub fn is_dr_arrow(&self, a: &DrArrow) -> bool {
        let (n, m) = a.witness;
        a.k == n as i64 - m as i64
            && self.contains(&a.x)
            && self.contains(&a.y)
            && matches!((a.x.shift(n), a.y.shift(m)), (Some(u), Some(v)) if u == v)
    }

    /// `(g.x, |alpha| - |beta|, x)` for `g = alpha beta^-1`.
    pub fn xi(&self, g: &FreeWord, x: &BoundaryPath) -> Result<DrArrow> {
        let gx = self
            .act_word(g, x)
            .ok_or_else(|| graph_err(format!("`{}` does not act on `{}`", self.format_word(g), self.format_path(x))))?;
        let (alpha, beta) = g.factor_positive().expect("act_word checked the factorization");
        let (n, m) = (alpha.len(), beta.len());
        Ok(DrArrow { x: gx, k: n as i64 - m as i64, y: x.clone(), witness: (n, m) })
    }

    /// Inverse of [`FiniteGraph::xi`]: reads `alpha` and `beta` off the
    /// witness and cancels their common tail.
    pub fn xi_inverse(&self, a: &DrArrow) -> Result<(FreeWord, BoundaryPath)> {
        if !self.is_dr_arrow(a) {
            return Err(graph_err(format!("witness {:?} does not certify {}", a.witness, self.format_arrow(a))));
        }
        let (n, m) = a.witness;
        let mut alpha = a.x.take(n).expect("checked");
        let mut beta = a.y.take(m).expect("checked");
        while let (Some(p), Some(q)) = (alpha.last(), beta.last()) {
            if p != q {
                break;
            }
            alpha.pop();
            beta.pop();
        }
        let g = word_of(&alpha).mul(&word_of(&beta).inverse());
        Ok((g, a.y.clone()))
    }

    /// Writes an isotropy arrow `(x, k, x)` as `delta gamma^{+-1} delta^-1`
    /// with `delta`, `gamma` positive and `|k| = |gamma|`.
    pub fn isotropy_decompose(&self, a: &DrArrow) -> Result<IsotropyDecomposition> {
        if a.x != a.y {
            return Err(graph_err(format!("{} is not an isotropy arrow", self.format_arrow(a))));
        }
        if !self.is_dr_arrow(a) {
            return Err(graph_err(format!("witness {:?} does not certify {}", a.witness, self.format_arrow(a))));
        }
        let (n, m) = a.witness;
        if n == m {
            return Ok(IsotropyDecomposition::Unit);
        }
        let (short, long) = (n.min(m), n.max(m));
        let mut delta = a.x.take(short).expect("checked");
        let mut gamma = a.x.take(long).expect("checked")[short..].to_vec();
        while delta.last().is_some() && delta.last() == gamma.last() {
            delta.pop();
            gamma.rotate_right(1);
        }
        let d = IsotropyDecomposition::Conjugate { delta, gamma, positive: n > m };
        if self.act_word(&d.word(), &a.x).as_ref() != Some(&a.x) {
            return Err(graph_err(format!("decomposition of {} does not fix the point", self.format_arrow(a))));
        }
        Ok(d)
    }

    pub fn format_word(&self, g: &FreeWord) -> String {
        match self.alphabet() {
            Ok(group) => group.format_element(&g.clone().into()),
            Err(_) => g.to_string(),
        }
    }

    pub fn format_arrow(&self, a: &DrArrow) -> String {
        format!("({}, {}, {})", self.format_path(&a.x), a.k, self.format_path(&a.y))
    }

    fn arrow_label(&self, x: &BoundaryPath, k: i64, y: &BoundaryPath) -> String {
        format!("{}|{}|{}", self.format_path(x), k, self.format_path(y))
    }

    /// All arrows `(x, k, y)` between the points of
    /// `boundary_paths(depth, max(depth, 1))` with `|k| <= max_k` that have a
    /// witness `(n, m)` with `n, m <= depth + max_k`.
    pub fn dr_arrows(&self, depth: usize, max_k: usize) -> Vec<DrArrow> {
        let points = self.boundary_paths(depth, depth.max(1));
        let w = depth + max_k;
        let mut tails: HashMap<BoundaryPath, Vec<(usize, usize)>> = HashMap::new();
        for (j, y) in points.iter().enumerate() {
            for m in 0..=w {
                let Some(t) = y.shift(m) else { break };
                tails.entry(t).or_default().push((j, m));
            }
        }
        let mut seen = BTreeMap::new();
        for (i, x) in points.iter().enumerate() {
            for n in 0..=w {
                let Some(sx) = x.shift(n) else { break };
                let Some(hits) = tails.get(&sx) else { continue };
                for &(j, m) in hits {
                    if n.abs_diff(m) <= max_k {
                        // smallest n wins, as k fixes m
                        seen.entry((i, n as i64 - m as i64, j)).or_insert((n, m));
                    }
                }
            }
        }
        let mut out: Vec<DrArrow> = seen
            .into_iter()
            .map(|((i, k, j), witness)| DrArrow { x: points[i].clone(), k, y: points[j].clone(), witness })
            .collect();
        out.sort_by(|a, b| (&a.x, a.k, &a.y).cmp(&(&b.x, b.k, &b.y)));
        out
    }

    /// A finite piece of the Deaconu-Renault groupoid, see
    /// [`FiniteGraph::dr_arrows`]. Always flagged truncated.
    pub fn truncated_dr_groupoid(&self, depth: usize, max_k: usize) -> Result<FiniteGroupoid> {
        let points = self.boundary_paths(depth, depth.max(1));
        let index: HashMap<&BoundaryPath, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let units: Vec<String> = points.iter().map(|p| self.format_path(p)).collect();
        let drs = self.dr_arrows(depth, max_k);
        let arrows: Vec<Arrow> = drs
            .iter()
            .map(|a| Arrow {
                label: self.arrow_label(&a.x, a.k, &a.y),
                source: index[&a.y],
                range: index[&a.x],
                payload: None,
            })
            .collect();
        let by_label: HashMap<&str, &DrArrow> =
            arrows.iter().zip(&drs).map(|(a, d)| (a.label.as_str(), d)).collect();
        let unit_labels = points.iter().map(|p| self.arrow_label(p, 0, p)).collect();
        assemble(
            units,
            arrows.clone(),
            unit_labels,
            |a| {
                let d = by_label[a.label.as_str()];
                self.arrow_label(&d.y, -d.k, &d.x)
            },
            |g, h| {
                let (g, h) = (by_label[g.label.as_str()], by_label[h.label.as_str()]);
                Some(self.arrow_label(&g.x, g.k + h.k, &h.y))
            },
            true,
        )
    }
}

pub(crate) fn symbols(w: &FreeWord) -> Vec<usize> {
    w.letters().iter().map(|l| l.symbol as usize).collect()
}

pub(crate) fn word_of(path: &[usize]) -> FreeWord {
    FreeWord::positive(path.iter().map(|&e| e as u32))
}

/// An arrow `(x, k, y)` of the Deaconu-Renault groupoid with a witness
/// `(n, m)`: `k = n - m` and `sigma^n(x) = sigma^m(y)`.
///
/// Equality and hashing ignore the witness.
#[derive(Clone, Debug)]
pub struct DrArrow {
    pub x: BoundaryPath,
    pub k: i64,
    pub y: BoundaryPath,
    pub witness: (usize, usize),
}

impl PartialEq for DrArrow {
    fn eq(&self, other: &Self) -> bool {
        self.x == other.x && self.k == other.k && self.y == other.y
    }
}

impl Eq for DrArrow {}

impl Hash for DrArrow {
    fn hash<H: Hasher>(&self, state: &mut H) {
        (&self.x, self.k, &self.y).hash(state);
    }
}

impl DrArrow {
    pub fn unit(x: BoundaryPath) -> Self {
        DrArrow { y: x.clone(), x, k: 0, witness: (0, 0) }
    }

    pub fn inverse(&self) -> Self {
        DrArrow { x: self.y.clone(), k: -self.k, y: self.x.clone(), witness: (self.witness.1, self.witness.0) }
    }

    /// `(x, k, y)(y, l, z) = (x, k + l, z)`.
    pub fn compose(&self, other: &DrArrow) -> Option<DrArrow> {
        if self.y != other.x {
            return None;
        }
        let (n1, m1) = self.witness;
        let (n2, m2) = other.witness;
        let t = m1.max(n2);
        Some(DrArrow {
            x: self.x.clone(),
            k: self.k + other.k,
            y: other.y.clone(),
            witness: (n1 + t - m1, m2 + t - n2),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsotropyDecomposition {
    Unit,
    /// `delta gamma delta^-1` when `positive`, else `delta gamma^-1 delta^-1`.
    Conjugate { delta: Vec<usize>, gamma: Vec<usize>, positive: bool },
}

impl IsotropyDecomposition {
    pub fn word(&self) -> FreeWord {
        match self {
            IsotropyDecomposition::Unit => FreeWord::identity(),
            IsotropyDecomposition::Conjugate { delta, gamma, positive } => {
                let d = word_of(delta);
                let g = if *positive { word_of(gamma) } else { word_of(gamma).inverse() };
                d.mul(&g).mul(&d.inverse())
            }
        }
    }

    pub fn k(&self) -> i64 {
        match self {
            IsotropyDecomposition::Unit => 0,
            IsotropyDecomposition::Conjugate { gamma, positive: true, .. } => gamma.len() as i64,
            IsotropyDecomposition::Conjugate { gamma, .. } => -(gamma.len() as i64),
        }
    }
}

/// The semi-saturated orthogonal partial action of the free group on the
/// edges: `U_a` is the set of paths beginning with `a` and `a` acts by
/// prepending itself.
#[derive(Clone, Debug)]
pub struct InducedAction<'g> {
    graph: &'g FiniteGraph,
    group: GroupDescriptor,
}

impl<'g> InducedAction<'g> {
    pub fn graph(&self) -> &'g FiniteGraph {
        self.graph
    }

    pub fn group(&self) -> &GroupDescriptor {
        &self.group
    }

    pub fn act(&self, g: &FreeWord, x: &BoundaryPath) -> Option<BoundaryPath> {
        self.graph.act_word(g, x)
    }

    /// Membership of `x` in `U_g`, the range of `g`.
    pub fn in_range(&self, g: &FreeWord, x: &BoundaryPath) -> bool {
        self.graph.act_word(&g.inverse(), x).is_some()
    }

    /// Points of `points` lying in `U_a` for two distinct generators.
    pub fn orthogonality_violations(&self, points: &[BoundaryPath]) -> Vec<(usize, usize, BoundaryPath)> {
        let mut out = Vec::new();
        let n = self.graph.edge_count();
        for x in points {
            let hits: Vec<usize> = (0..n).filter(|&a| self.in_range(&FreeWord::generator(a as u32), x)).collect();
            for (i, &a) in hits.iter().enumerate() {
                for &b in &hits[i + 1..] {
                    out.push((a, b, x.clone()));
                }
            }
        }
        out
    }

    /// Pairs `(g, h)` with `|gh| = |g| + |h|` and a point where
    /// `phi_gh` and `phi_g phi_h` differ, including their domains.
    pub fn semi_saturation_violations(
        &self,
        points: &[BoundaryPath],
        max_len: usize,
    ) -> Vec<(FreeWord, FreeWord, BoundaryPath)> {
        let words = FreeWord::all_up_to(self.graph.edge_count() as u32, max_len);
        let mut out = Vec::new();
        for g in &words {
            for h in &words {
                let gh = g.mul(h);
                if gh.len() != g.len() + h.len() {
                    continue;
                }
                for x in points {
                    let direct = self.act(&gh, x);
                    let stepwise = self.act(h, x).and_then(|y| self.act(g, &y));
                    if direct != stepwise {
                        out.push((g.clone(), h.clone(), x.clone()));
                    }
                }
            }
        }
        out
    }

    /// The restriction of the action to a finite set of points, tabulated
    /// for reduced words of length at most `bound`.
    ///
    /// `g` maps `x` to `g.x` whenever both lie in `points`. Restricting a
    /// partial action to a subset gives a partial action, so this is a finite
    /// system that can be checked against the axioms directly. Points are
    /// named by their path with the cycle in angle brackets, as in `a.<b>`.
    pub fn restrict(&self, points: &[BoundaryPath], bound: usize) -> Result<FinitePds> {
        let names: Vec<String> =
            points.iter().map(|x| self.graph.format_path(x).replace('(', "<").replace(')', ">")).collect();
        if crate::groups::ball_size(self.graph.edge_count() as u32, bound).is_none() {
            return Err(crate::pds::too_large(bound));
        }
        let space = FiniteSpace::new(names)?;
        let index: HashMap<&BoundaryPath, usize> = points.iter().enumerate().map(|(i, x)| (x, i)).collect();
        let mut table = BTreeMap::new();
        for g in FreeWord::all_up_to(self.graph.edge_count() as u32, bound) {
            let pairs: Vec<(usize, usize)> = points
                .iter()
                .enumerate()
                .filter_map(|(i, x)| self.act(&g, x).and_then(|y| index.get(&y).map(|&j| (i, j))))
                .collect();
            table.insert(GroupElement::Word(g), PartialBijection::from_pairs(pairs)?);
        }
        FinitePds::from_parts(space, self.group.clone(), table, Generation::Bounded { bound })
    }
}

/// Standard graphs used throughout the tests and examples.
pub mod instances {
    use super::FiniteGraph;

    /// One vertex with a single loop `a`.
    pub fn loop_graph() -> FiniteGraph {
        FiniteGraph::from_names(&["v"], &[("a", "v", "v")]).expect("valid graph")
    }

    /// One vertex with loops `a` and `b`.
    pub fn two_shift() -> FiniteGraph {
        FiniteGraph::from_names(&["v"], &[("a", "v", "v"), ("b", "v", "v")]).expect("valid graph")
    }

    /// The two-shift with loops named `c` and `d`.
    pub fn two_shift_relabeled() -> FiniteGraph {
        FiniteGraph::from_names(&["u"], &[("c", "u", "u"), ("d", "u", "u")]).expect("valid graph")
    }

    /// A single edge `a` with `r(a) = v` and `d(a) = w`; `w` is singular.
    pub fn sink_graph() -> FiniteGraph {
        FiniteGraph::from_names(&["v", "w"], &[("a", "v", "w")]).expect("valid graph")
    }
}
