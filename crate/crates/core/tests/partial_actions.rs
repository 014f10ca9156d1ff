mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{cyclic_actions, partial_bijections};
use orbitkit::groupoid::{isotropy_pairs, transformation_groupoid};
use orbitkit::groups::{FiniteGroup, GroupDescriptor, GroupElement};
use orbitkit::pds::{extend_semi_saturated, FinitePds, FiniteSpace, PartialBijection};
use proptest::prelude::*;

// phi_e = id, phi_{g^-1} = phi_g^-1 and phi_g phi_h ⊆ phi_{gh}
fn is_partial_action(group: &FiniteGroup, maps: &[PartialBijection], n: usize) -> bool {
    if maps[group.identity()] != PartialBijection::identity(n) {
        return false;
    }
    for g in 0..group.order() {
        if maps[group.inv(g)] != maps[g].inverse() {
            return false;
        }
        for h in 0..group.order() {
            let gh = group.mul(g, h);
            for x in 0..n {
                if let Some(y) = maps[h].apply(x).and_then(|y| maps[g].apply(y)) {
                    if maps[gh].apply(x) != Some(y) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn count_involutions(k: usize) -> usize {
    match k {
        0 | 1 => 1,
        _ => count_involutions(k - 1) + (k - 1) * count_involutions(k - 2),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn validate_agrees_with_inclusion_characterisation() {
    let z3 = FiniteGroup::cyclic(3);
    for n in 0..=3 {
        let space = FiniteSpace::numbered("x", n);
        let all = partial_bijections(n);
        for m1 in &all {
            for m2 in &all {
                let maps = [PartialBijection::identity(n), m1.clone(), m2.clone()];
                let pds = FinitePds::explicit(
                    space.clone(),
                    GroupDescriptor::Finite(z3.clone()),
                    [(GroupElement::Finite(1), m1.clone()), (GroupElement::Finite(2), m2.clone())],
                )
                .unwrap();
                assert_eq!(pds.validate().is_empty(), is_partial_action(&z3, &maps, n), "{m1:?} {m2:?}");
            }
        }
    }
}

#[test]
fn z2_actions_are_partial_involutions() {
    for n in 0..=4 {
        let expected: usize = (0..=n).map(|k| binomial(n, k) * count_involutions(k)).sum();
        assert_eq!(cyclic_actions(2, n).len(), expected, "{n} points");
    }
}

#[test]
fn mutated_tables_match_the_oracle() {
    for pds in cyclic_actions(3, 3) {
        for (g, map) in pds.table() {
            for extra in partial_bijections(3) {
                if &extra == map {
                    continue;
                }
                let broken = pds.with_entry(g.clone(), extra);
                let maps: Vec<PartialBijection> =
                    (0..3).map(|i| broken.map(&GroupElement::Finite(i)).cloned().unwrap_or_default()).collect();
                let oracle = is_partial_action(&FiniteGroup::cyclic(3), &maps, 3);
                assert_eq!(broken.validate().is_empty(), oracle);
            }
        }
    }
}

fn stabiliser_oracle(pds: &FinitePds) -> BTreeSet<(GroupElement, usize)> {
    pds.table()
        .iter()
        .flat_map(|(g, m)| m.pairs().filter(|(x, y)| x == y).map(move |(x, _)| (g.clone(), x)))
        .collect()
}

#[test]
fn isotropy_is_the_union_of_stabilisers() {
    for order in [2, 3] {
        for n in 1..=3 {
            for pds in cyclic_actions(order, n) {
                let gpd = transformation_groupoid(&pds).unwrap();
                let iso = isotropy_pairs(&gpd);
                assert_eq!(iso, stabiliser_oracle(&pds));
                for x in 0..n {
                    let stab: BTreeSet<GroupElement> = pds.stabiliser(x).unwrap().elements.into_iter().collect();
                    let from_iso: BTreeSet<GroupElement> =
                        iso.iter().filter(|(_, y)| *y == x).map(|(g, _)| g.clone()).collect();
                    assert_eq!(stab, from_iso);
                }
            }
        }
    }
}

#[test]
fn transformation_groupoid_counts() {
    for pds in cyclic_actions(3, 3) {
        let gpd = transformation_groupoid(&pds).unwrap();
        let expected: usize = pds.table().values().map(PartialBijection::len).sum();
        assert_eq!(gpd.arrow_count(), expected);
        assert_eq!(gpd.unit_count(), 3);
        for i in 0..gpd.arrow_count() {
            let inv = gpd.inverse(i);
            assert_eq!(gpd.compose(i, inv), Some(gpd.unit_arrow(gpd.range(i))));
            assert_eq!(gpd.compose(inv, i), Some(gpd.unit_arrow(gpd.source(i))));
        }
    }
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn z3_system() -> impl Strategy<Value = FinitePds> {
    let all = cyclic_actions(3, 3);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

proptest! {
    #[test]
    fn relabel_commutes_with_transformation_groupoid(pds in z3_system(), perm in perm_strategy(3)) {
        let space = FiniteSpace::new(["y0", "y1", "y2"]).unwrap();
        let q = pds.relabel(space, &perm, |g| g.clone()).unwrap();
        prop_assert!(q.validate().is_empty());
        let (gp, gq) = (transformation_groupoid(&pds).unwrap(), transformation_groupoid(&q).unwrap());
        prop_assert_eq!(gp.arrow_count(), gq.arrow_count());
        let mut moved = BTreeMap::new();
        for a in gp.arrows() {
            let (g, x) = a.payload.clone().unwrap();
            moved.insert((g, perm[x]), perm[a.range]);
        }
        let direct: BTreeMap<(GroupElement, usize), usize> =
            gq.arrows().iter().map(|a| (a.payload.clone().unwrap(), a.range)).collect();
        prop_assert_eq!(moved, direct);
    }

    #[test]
    fn semi_saturated_extensions_are_partial_actions(
        maps in prop::collection::vec(prop::sample::select(partial_bijections(4)), 1..=2),
        bound in 1usize..=3,
    ) {
        let names: Vec<String> = (0..maps.len()).map(|i| format!("g{i}")).collect();
        let group = GroupDescriptor::free(names).unwrap();
        let gens: BTreeMap<u32, PartialBijection> = maps.into_iter().enumerate().map(|(i, m)| (i as u32, m)).collect();
        let pds = extend_semi_saturated(FiniteSpace::numbered("p", 4), group, gens.clone(), bound).unwrap();
        prop_assert!(pds.validate().is_empty());
        // each tabulated word acts by spelling its letters
        for (g, m) in pds.table() {
            let w = g.as_word().unwrap();
            for x in 0..4 {
                let mut cur = Some(x);
                for l in w.letters().iter().rev() {
                    let base = &gens[&l.symbol];
                    cur = cur.and_then(|p| if l.inverse { base.inverse().apply(p) } else { base.apply(p) });
                }
                prop_assert_eq!(m.apply(x), cur);
            }
        }
        prop_assert_eq!(pds.truncation(), Some(bound));
    }
}
