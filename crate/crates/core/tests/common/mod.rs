#![allow(dead_code)]

use orbitkit::groups::{FiniteGroup, GroupDescriptor, GroupElement};
use orbitkit::pds::{FinitePds, FiniteSpace, PartialBijection};
use orbitkit::shift::{Edge, FiniteGraph};
use proptest::prelude::*;

const EDGE_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// Every partial bijection of `{0, .., n-1}`.
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

/// All valid explicit partial actions of `Z/order` on `n` points, generated
/// by the map of `1`.
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

/// The exhaustive corpus: `Z/2` and `Z/3` on 1 to 3 points.
pub fn small_corpus() -> Vec<FinitePds> {
    let mut out = Vec::new();
    for order in [2, 3] {
        for n in 1..=3 {
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

/// Graphs with at most 4 vertices and 6 edges.
pub fn arb_graph() -> impl Strategy<Value = FiniteGraph> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..=6).prop_map(move |edges| graph_from(n, &edges))
    })
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
