//! Finite generalized Boolean dynamical systems and the graphs whose
//! boundary path spaces they determine.
//!
//! A finite Boolean algebra is the powerset of its atoms, stored as a bitmask.
//! Ultrafilters are principal, so they are identified with atoms, and a map
//! `theta` preserving the empty set and unions is determined by the images of
//! the atoms.

use crate::error::{Error, Result};
use crate::groups::is_identifier;
use crate::shift::{BoundaryPath, Cylinder, Edge, FiniteGraph};

/// Most atoms an algebra may have.
pub const MAX_ATOMS: usize = 64;

/// An element of a finite Boolean algebra: bit `i` is atom `i`.
pub type AtomSet = u64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBooleanAlgebra {
    atoms: Vec<String>,
}

impl FiniteBooleanAlgebra {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(atoms: I) -> Result<Self> {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.len() > MAX_ATOMS {
            return Err(Error::Boolean(format!("more than {MAX_ATOMS} atoms")));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !is_identifier(a) {
                return Err(Error::Boolean(format!("`{a}` is not a valid atom name")));
            }
            if atoms[..i].contains(a) {
                return Err(Error::Boolean(format!("duplicate atom `{a}`")));
            }
        }
        Ok(FiniteBooleanAlgebra { atoms })
    }

    /// The powerset of `{0, ..., n - 1}` with atoms named `x0`, `x1`, ...
    pub fn numbered(n: usize) -> Result<Self> {
        FiniteBooleanAlgebra::new((0..n).map(|i| format!("x{i}")))
    }

    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn lookup(&self, name: &str) -> Result<usize> {
        self.atoms
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Boolean(format!("unknown atom `{name}`")))
    }

    /// The largest element.
    pub fn top(&self) -> AtomSet {
        if self.atoms.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.atoms.len()) - 1
        }
    }

    pub fn contains(&self, a: AtomSet) -> bool {
        a & !self.top() == 0
    }

    pub fn format_set(&self, a: AtomSet) -> String {
        let names: Vec<&str> = members(a).map(|i| self.atoms[i].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Parses a comma separated list of atom names, optionally in braces.
    pub fn parse_set(&self, text: &str) -> Result<AtomSet> {
        let text = text.trim();
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .unwrap_or(text);
        let mut out = 0;
        for name in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            out |= 1 << self.lookup(name)?;
        }
        Ok(out)
    }
}

/// Indices of the atoms below `a`.
pub fn members(a: AtomSet) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| a >> i & 1 == 1)
}

/// The principal ultrafilter `{A : atom in A}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ultrafilter {
    pub atom: usize,
}

impl Ultrafilter {
    pub fn contains(self, a: AtomSet) -> bool {
        a >> self.atom & 1 == 1
    }
}

/// Ultrafilters of the ideal of all elements below `top`.
///
/// Pass the top of an algebra to get the ultrafilters of the algebra itself.
pub fn ultrafilters(top: AtomSet) -> Vec<Ultrafilter> {
    members(top).map(|atom| Ultrafilter { atom }).collect()
}

/// `Z(A)`: the ultrafilters containing `A`.
pub fn z_set(a: AtomSet) -> Vec<Ultrafilter> {
    ultrafilters(a)
}

/// A generalized Boolean dynamical system over a finite algebra.
///
/// `theta[i][j]` is the image of atom `j` under the action of letter `i`,
/// and `ideal_top[i]` generates the ideal of letter `i` as a lower set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gbds {
    algebra: FiniteBooleanAlgebra,
    alphabet: Vec<String>,
    theta: Vec<Vec<AtomSet>>,
    ideal_top: Vec<AtomSet>,
}

impl Gbds {
    /// Validates the system: every `theta` preserves intersections (the
    /// atom images are pairwise disjoint) and lands in its ideal.
    pub fn new(
        algebra: FiniteBooleanAlgebra,
        alphabet: Vec<String>,
        theta: Vec<Vec<AtomSet>>,
        ideal_top: Vec<AtomSet>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::Boolean(m));
        if theta.len() != alphabet.len() || ideal_top.len() != alphabet.len() {
            return bad("one theta and one ideal are needed per letter".into());
        }
        for (i, name) in alphabet.iter().enumerate() {
            if !is_identifier(name) || alphabet[..i].contains(name) {
                return bad(format!("invalid or duplicate letter `{name}`"));
            }
            if theta[i].len() != algebra.atom_count() {
                return bad(format!("theta of `{name}` needs one image per atom"));
            }
            if !algebra.contains(ideal_top[i]) {
                return bad(format!("ideal of `{name}` is not in the algebra"));
            }
            let mut seen = 0;
            for (j, &img) in theta[i].iter().enumerate() {
                if !algebra.contains(img) {
                    return bad(format!("theta of `{name}` leaves the algebra"));
                }
                if img & seen != 0 {
                    return bad(format!(
                        "theta of `{name}` does not preserve intersections at atom `{}`",
                        algebra.atoms()[j]
                    ));
                }
                if img & !ideal_top[i] != 0 {
                    return bad(format!(
                        "theta of `{name}` sends atom `{}` outside its ideal",
                        algebra.atoms()[j]
                    ));
                }
                seen |= img;
            }
        }
        Ok(Gbds { algebra, alphabet, theta, ideal_top })
    }

    pub fn algebra(&self) -> &FiniteBooleanAlgebra {
        &self.algebra
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn ideal_top(&self, letter: usize) -> AtomSet {
        self.ideal_top[letter]
    }

    pub fn lookup_letter(&self, name: &str) -> Result<usize> {
        self.alphabet
            .iter()
            .position(|a| a == name)
            .ok_or_else(|| Error::Boolean(format!("unknown letter `{name}`")))
    }

    /// `theta_letter(A)`.
    pub fn theta(&self, letter: usize, a: AtomSet) -> AtomSet {
        members(a).fold(0, |acc, j| acc | self.theta[letter][j])
    }

    /// `{A : theta(A) in eta}` as an ultrafilter of the algebra, or `None`
    /// when that set is not a filter.
    pub fn theta_hat(&self, letter: usize, eta: Ultrafilter) -> Result<Option<Ultrafilter>> {
        if letter >= self.alphabet.len() {
            return Err(Error::Boolean(format!("unknown letter {letter}")));
        }
        if !eta.contains(self.ideal_top[letter]) {
            return Err(Error::Boolean(format!(
                "`{}` is not an ultrafilter of the ideal of `{}`",
                self.algebra.atoms().get(eta.atom).map_or("?", |s| s.as_str()),
                self.alphabet[letter]
            )));
        }
        Ok(self.theta[letter]
            .iter()
            .position(|&img| eta.contains(img))
            .map(|atom| Ultrafilter { atom }))
    }

    /// Edges `e(letter, eta)` with `d = eta` and `r = theta_hat(eta)`.
    ///
    /// Edges whose range would be the empty marker are dropped unless
    /// `empty_vertex` is set, in which case they end at an extra vertex
    /// `empty`. An edge is named after its letter when the ideal of that
    /// letter has a single atom and `letter_atom` otherwise.
    pub fn build_graph_with(&self, empty_vertex: bool) -> Result<FiniteGraph> {
        let mut vertices = self.algebra.atoms().to_vec();
        let empty = vertices.len();
        if empty_vertex {
            if vertices.iter().any(|v| v == "empty") {
                return Err(Error::Boolean("an atom is already called `empty`".into()));
            }
            vertices.push("empty".into());
        }
        let mut edges = Vec::new();
        for (i, letter) in self.alphabet.iter().enumerate() {
            let etas = ultrafilters(self.ideal_top[i]);
            let single = etas.len() == 1;
            for eta in etas {
                let r = match self.theta_hat(i, eta)? {
                    Some(u) => u.atom,
                    None if empty_vertex => empty,
                    None => continue,
                };
                let name = if single {
                    letter.clone()
                } else {
                    format!("{letter}_{}", self.algebra.atoms()[eta.atom])
                };
                edges.push(Edge { name, r, d: eta.atom });
            }
        }
        FiniteGraph::new(vertices, edges)
    }

    pub fn build_graph(&self) -> Result<FiniteGraph> {
        self.build_graph_with(false)
    }
}

/// The cylinder of a nonempty path, or of a vertex when `mu` is empty.
pub fn cylinder(graph: &FiniteGraph, mu: &[usize], vertex: Option<usize>) -> Result<Cylinder> {
    match (mu.is_empty(), vertex) {
        (true, Some(v)) => graph.vertex_cylinder(v),
        (true, None) => Err(Error::Graph("an empty path needs a vertex".into())),
        (false, _) => graph.cylinder(mu.to_vec()),
    }
}

/// Boundary paths with prefix and cycle at most `depth`.
pub fn boundary_paths(graph: &FiniteGraph, depth: usize) -> Vec<BoundaryPath> {
    graph.boundary_paths(depth, depth)
}

/// Checks on sample points that the shift maps `Z(e mu)` bijectively onto
/// `Z(mu)` for every cylinder with at most `depth` edges.
pub fn shift_local_homeomorphism_failures(graph: &FiniteGraph, depth: usize) -> Vec<String> {
    let mut out = Vec::new();
    for len in 1..=depth {
        for path in graph.walks(None, len) {
            let whole = graph.cylinder(path.clone()).expect("walks are paths");
            let tail = graph.cylinder_shift(&whole).expect("nonempty");
            let mut image: Vec<BoundaryPath> = graph
                .representatives(&whole, depth)
                .iter()
                .filter_map(|x| x.shift(1))
                .collect();
            let count = image.len();
            image.sort();
            image.dedup();
            let mut expected = graph.representatives(&tail, depth);
            expected.sort();
            if image.len() != count || image != expected {
                out.push(format!("shift is not a bijection on `{}`", graph.format_cylinder(&whole)));
            }
        }
    }
    out
}

/// A graph isomorphism `(vertex map, edge map)` found by exhaustive search.
pub fn find_graph_isomorphism(g: &FiniteGraph, h: &FiniteGraph) -> Option<(Vec<usize>, Vec<usize>)> {
    if g.vertex_count() != h.vertex_count() || g.edge_count() != h.edge_count() {
        return None;
    }
    let n = g.vertex_count();
    let mut vmap = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn search(
        g: &FiniteGraph,
        h: &FiniteGraph,
        v: usize,
        vmap: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> Option<Vec<usize>> {
        if v == vmap.len() {
            return match_edges(g, h, vmap);
        }
        for w in 0..vmap.len() {
            if used[w] || g.continuations(v).len() != h.continuations(w).len() {
                continue;
            }
            used[w] = true;
            vmap[v] = w;
            if let Some(e) = search(g, h, v + 1, vmap, used) {
                return Some(e);
            }
            used[w] = false;
        }
        vmap[v] = usize::MAX;
        None
    }
    let emap = search(g, h, 0, &mut vmap, &mut used)?;
    Some((vmap, emap))
}

fn match_edges(g: &FiniteGraph, h: &FiniteGraph, vmap: &[usize]) -> Option<Vec<usize>> {
    let mut taken = vec![false; h.edge_count()];
    let mut emap = Vec::with_capacity(g.edge_count());
    for e in g.edges() {
        let f = (0..h.edge_count()).find(|&f| {
            !taken[f] && h.edge(f).r == vmap[e.r] && h.edge(f).d == vmap[e.d]
        })?;
        taken[f] = true;
        emap.push(f);
    }
    Some(emap)
}
