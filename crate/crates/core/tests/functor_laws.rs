mod common;

use common::{cyclic_actions, small_corpus};
use orbitkit::category::{
    compose, enumerate_groupoid_homs, enumerate_orbit_morphisms, functor_apply, functor_invert,
    validate_orbit_morphism, OrbitMorphism,
};
use orbitkit::groupoid::{transformation_groupoid, validate_hom, GroupoidHom};
use orbitkit::pds::FinitePds;
use proptest::prelude::*;

fn upto_two_points() -> Vec<FinitePds> {
    let mut out = Vec::new();
    for order in [2, 3] {
        for n in 1..=2 {
            out.extend(cyclic_actions(order, n));
        }
    }
    out
}

#[test]
fn identity_goes_to_identity() {
    for p in small_corpus() {
        let gp = transformation_groupoid(&p).unwrap();
        let id = OrbitMorphism::identity(&p);
        assert!(validate_orbit_morphism(&p, &p, &id).is_empty());
        assert_eq!(functor_apply(&gp, &gp, &id).unwrap(), GroupoidHom::identity(&gp));
    }
}

#[test]
fn hom_sets_have_equal_size() {
    let corpus = upto_two_points();
    for p in &corpus {
        let gp = transformation_groupoid(p).unwrap();
        for q in &corpus {
            let gq = transformation_groupoid(q).unwrap();
            let morphisms = enumerate_orbit_morphisms(p, q).unwrap();
            let homs = enumerate_groupoid_homs(&gp, &gq).unwrap();
            assert_eq!(morphisms.len(), homs.len());
            for m in &morphisms {
                let h = functor_apply(&gp, &gq, m).unwrap();
                assert!(validate_hom(&gp, &gq, &h).is_empty());
                assert_eq!(&functor_invert(&gp, &gq, &h).unwrap(), m);
            }
            for h in &homs {
                let m = functor_invert(&gp, &gq, h).unwrap();
                assert!(validate_orbit_morphism(p, q, &m).is_empty());
                assert_eq!(&functor_apply(&gp, &gq, &m).unwrap(), h);
            }
        }
    }
}

fn corpus_index() -> impl Strategy<Value = usize> {
    0..small_corpus().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_preserved(
        i in corpus_index(),
        j in corpus_index(),
        k in corpus_index(),
        a in any::<prop::sample::Index>(),
        b in any::<prop::sample::Index>(),
    ) {
        let corpus = small_corpus();
        let (p, q, r) = (&corpus[i], &corpus[j], &corpus[k]);
        let ms = enumerate_orbit_morphisms(p, q).unwrap();
        let ns = enumerate_orbit_morphisms(q, r).unwrap();
        prop_assume!(!ms.is_empty() && !ns.is_empty());
        let (m, n) = (a.get(&ms), b.get(&ns));
        let nm = compose(q, n, m).unwrap();
        prop_assert!(validate_orbit_morphism(p, r, &nm).is_empty());
        let (gp, gq, gr) = (
            transformation_groupoid(p).unwrap(),
            transformation_groupoid(q).unwrap(),
            transformation_groupoid(r).unwrap(),
        );
        let lhs = functor_apply(&gp, &gr, &nm).unwrap();
        let rhs = functor_apply(&gq, &gr, n).unwrap().after(&functor_apply(&gp, &gq, m).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}
