#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use orbitkit::groups::{FiniteGroup, GroupDescriptor, GroupElement};
use orbitkit::pds::{FinitePds, FiniteSpace, PartialBijection};
use orbitkit::shift::{Edge, FiniteGraph};
use rand::seq::SliceRandom;
use rand::Rng;

pub const EDGE_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

pub fn corpus_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(kind)
}

pub fn corpus_files(kind: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "inst"))
        .collect();
    files.sort();
    files
}

pub fn orbitkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbitkit")).args(args).output().unwrap()
}

pub fn partial_bijections(n: usize) -> Vec<PartialBijection> {
    fn go(x: usize, n: usize, used: &mut Vec<bool>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<PartialBijection>) {
        if x == n {
            out.push(PartialBijection::from_pairs(acc.iter().copied()).unwrap());
            return;
        }
        go(x + 1, n, used, acc, out);
        for y in 0..n {
            if !used[y] {
                used[y] = true;
                acc.push((x, y));
                go(x + 1, n, used, acc, out);
                acc.pop();
                used[y] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, n, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Valid explicit partial actions of `Z/order` on `n` points.
pub fn cyclic_actions(order: usize, n: usize) -> Vec<FinitePds> {
    let group = GroupDescriptor::Finite(FiniteGroup::cyclic(order));
    let space = FiniteSpace::numbered("x", n);
    let mut out = Vec::new();
    for m in partial_bijections(n) {
        let mut entries = vec![(GroupElement::Finite(1), m.clone())];
        if order == 3 {
            entries.push((GroupElement::Finite(2), m.inverse()));
        }
        if let Ok(p) = FinitePds::explicit(space.clone(), group.clone(), entries) {
            if p.validate().is_empty() {
                out.push(p);
            }
        }
    }
    out
}

/// `Z/2` and `Z/3` on at most `max_points` points.
pub fn small_corpus(max_points: usize) -> Vec<FinitePds> {
    let mut out = Vec::new();
    for order in [2, 3] {
        for n in 1..=max_points {
            out.extend(cyclic_actions(order, n));
        }
    }
    out
}

pub fn graph_from(n: usize, edges: &[(usize, usize)]) -> FiniteGraph {
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, &(r, d))| Edge { name: EDGE_NAMES[i].to_string(), r, d })
        .collect();
    FiniteGraph::new(vertices, edges).unwrap()
}

/// A graph with at most 4 vertices and 6 edges.
pub fn random_graph(rng: &mut impl Rng) -> FiniteGraph {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6);
    let edges: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    graph_from(n, &edges)
}

/// Every graph on `n` vertices with at most `max_edges` edges, up to edge order.
pub fn all_graphs(n: usize, max_edges: usize) -> Vec<FiniteGraph> {
    let slots: Vec<(usize, usize)> = (0..n).flat_map(|r| (0..n).map(move |d| (r, d))).collect();
    let mut out = Vec::new();
    fn go(
        start: usize,
        slots: &[(usize, usize)],
        max: usize,
        n: usize,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<FiniteGraph>,
    ) {
        out.push(graph_from(n, acc));
        if acc.len() == max {
            return;
        }
        for i in start..slots.len() {
            acc.push(slots[i]);
            go(i, slots, max, n, acc, out);
            acc.pop();
        }
    }
    go(0, &slots, max_edges, n, &mut Vec::new(), &mut out);
    out
}

/// A copy of `g` with shuffled vertices and edges under new names, and the
/// maps `(vertex, edge)` from `g` into it.
pub fn shuffled(g: &FiniteGraph, rng: &mut impl Rng) -> (FiniteGraph, Vec<usize>, Vec<usize>) {
    let mut vmap: Vec<usize> = (0..g.vertex_count()).collect();
    let mut emap: Vec<usize> = (0..g.edge_count()).collect();
    vmap.shuffle(rng);
    emap.shuffle(rng);
    let vertices = (0..g.vertex_count()).map(|i| format!("w{i}")).collect();
    let mut edges = vec![None; g.edge_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        edges[emap[e]] = Some(Edge { name: format!("{}_new", edge.name), r: vmap[edge.r], d: vmap[edge.d] });
    }
    let h = FiniteGraph::new(vertices, edges.into_iter().map(Option::unwrap).collect()).unwrap();
    (h, vmap, emap)
}
