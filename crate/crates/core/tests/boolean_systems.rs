use orbitkit::booldyn::{members, shift_local_homeomorphism_failures, ultrafilters, z_set, AtomSet, FiniteBooleanAlgebra, Gbds};
use proptest::prelude::*;

fn is_ultrafilter(family: &[bool], top: AtomSet) -> bool {
    let n = family.len();
    let inside = |a: usize| family[a];
    if inside(0) || !inside(top as usize) {
        return false;
    }
    (0..n).all(|a| {
        let complement = top as usize & !a;
        (inside(a) != inside(complement))
            && (0..n).all(|b| {
                let meet_ok = !(inside(a) && inside(b)) || inside(a & b);
                let up_ok = !(inside(a) && a & b == a) || inside(b);
                meet_ok && up_ok
            })
    })
}

#[test]
fn ultrafilters_by_exhaustion() {
    for atoms in 1..=4usize {
        let size = 1usize << atoms;
        let top = (size - 1) as AtomSet;
        let mut found = Vec::new();
        for mask in 0u64..(1u64 << size) {
            let family: Vec<bool> = (0..size).map(|a| mask >> a & 1 == 1).collect();
            if is_ultrafilter(&family, top) {
                found.push(family);
            }
        }
        assert_eq!(found.len(), atoms);
        let listed = ultrafilters(top);
        assert_eq!(listed.len(), atoms);
        for u in listed {
            let family: Vec<bool> = (0..size).map(|a| u.contains(a as AtomSet)).collect();
            assert!(found.contains(&family));
        }
    }
}

fn arb_gbds() -> impl Strategy<Value = Gbds> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(atoms, letters)| {
        let per_letter = (1u64..(1 << atoms), prop::collection::vec(0..=atoms, atoms));
        prop::collection::vec(per_letter, letters).prop_map(move |spec| {
            let alg = FiniteBooleanAlgebra::numbered(atoms).unwrap();
            let names = (0..spec.len()).map(|i| format!("l{i}")).collect();
            let mut theta = Vec::new();
            let mut ideals = Vec::new();
            for (ideal, owner) in spec {
                // atom k of the ideal is hit by the atom owner[k], or by nothing
                let mut images = vec![0; atoms];
                for k in members(ideal) {
                    if owner[k] < atoms {
                        images[owner[k]] |= 1 << k;
                    }
                }
                theta.push(images);
                ideals.push(ideal);
            }
            Gbds::new(alg, names, theta, ideals).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn ultrafilter_count_is_atom_count(atoms in 1usize..=6) {
        let alg = FiniteBooleanAlgebra::numbered(atoms).unwrap();
        let us = ultrafilters(alg.top());
        prop_assert_eq!(us.len(), alg.atom_count());
        for u in &us {
            prop_assert!(u.contains(alg.top()) && !u.contains(0));
        }
    }

    #[test]
    fn z_sets_count_atoms(a in 0u64..64) {
        prop_assert_eq!(z_set(a).len(), a.count_ones() as usize);
        prop_assert!(z_set(a).iter().all(|u| u.contains(a)));
    }

    #[test]
    fn theta_preserves_joins_and_meets(g in arb_gbds(), a in 0u64..64, b in 0u64..64) {
        let top = g.algebra().top();
        let (a, b) = (a & top, b & top);
        for l in 0..g.alphabet().len() {
            prop_assert_eq!(g.theta(l, a | b), g.theta(l, a) | g.theta(l, b));
            prop_assert_eq!(g.theta(l, a & b), g.theta(l, a) & g.theta(l, b));
            prop_assert_eq!(g.theta(l, 0), 0);
        }
    }

    #[test]
    fn built_graph_follows_theta_hat(g in arb_gbds()) {
        let graph = g.build_graph().unwrap();
        prop_assert_eq!(graph.vertex_count(), g.algebra().atom_count());
        let mut expected = 0;
        for l in 0..g.alphabet().len() {
            for eta in ultrafilters(g.ideal_top(l)) {
                if let Some(xi) = g.theta_hat(l, eta).unwrap() {
                    expected += 1;
                    prop_assert!(graph.edges().iter().any(|e| e.d == eta.atom && e.r == xi.atom));
                }
            }
        }
        prop_assert_eq!(graph.edge_count(), expected);
        prop_assert!(shift_local_homeomorphism_failures(&graph, 2).is_empty());
    }
}
