use orbitkit::groups::{FiniteGroup, FreeWord, GroupDescriptor, GroupElement, Letter};
use proptest::prelude::*;

fn letters() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0u32..3, any::<bool>()), 0..12)
        .prop_map(|v| v.into_iter().map(|(s, neg)| if neg { Letter::neg(s) } else { Letter::pos(s) }).collect())
}

// free reduction with an explicit stack, independent of FreeWord
fn stack_reduce(letters: &[Letter]) -> Vec<(u32, bool)> {
    let mut out: Vec<(u32, bool)> = Vec::new();
    for l in letters {
        let cur = (l.symbol, l.inverse);
        if out.last() == Some(&(cur.0, !cur.1)) {
            out.pop();
        } else {
            out.push(cur);
        }
    }
    out
}

fn abc() -> GroupDescriptor {
    GroupDescriptor::free(["a", "b", "c"]).unwrap()
}

fn word(l: Vec<Letter>) -> GroupElement {
    GroupElement::Word(FreeWord::from_letters(l))
}

proptest! {
    #[test]
    fn reduction_matches_stack_oracle(u in letters()) {
        let w = FreeWord::from_letters(u.clone());
        let got: Vec<(u32, bool)> = w.letters().iter().map(|l| (l.symbol, l.inverse)).collect();
        prop_assert_eq!(got, stack_reduce(&u));
    }

    #[test]
    fn free_group_axioms(u in letters(), v in letters(), w in letters()) {
        let g = abc();
        let (x, y, z) = (word(u), word(v), word(w));
        let e = g.identity();
        let xy_z = g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap();
        let x_yz = g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        prop_assert_eq!(g.multiply(&x, &e).unwrap(), x.clone());
        prop_assert_eq!(g.multiply(&e, &x).unwrap(), x.clone());
        let xi = g.inverse(&x).unwrap();
        prop_assert!(g.is_identity(&g.multiply(&x, &xi).unwrap()));
        prop_assert!(g.is_identity(&g.multiply(&xi, &x).unwrap()));
    }

    #[test]
    fn parse_format_round_trip(u in letters()) {
        let g = abc();
        let x = word(u);
        let text = g.format_element(&x);
        prop_assert_eq!(g.parse_element(&text).unwrap(), x);
    }

    #[test]
    fn powers_add(u in letters(), m in -4i64..5, n in -4i64..5) {
        let g = abc();
        let x = word(u);
        let lhs = g.multiply(&g.pow(&x, m).unwrap(), &g.pow(&x, n).unwrap()).unwrap();
        prop_assert_eq!(lhs, g.pow(&x, m + n).unwrap());
    }

    #[test]
    fn integers_agree_with_i64(m in -50i64..50, n in -50i64..50) {
        let z = GroupDescriptor::Integers;
        let (a, b) = (GroupElement::Int(m), GroupElement::Int(n));
        prop_assert_eq!(z.multiply(&a, &b).unwrap(), GroupElement::Int(m + n));
        prop_assert_eq!(z.inverse(&a).unwrap(), GroupElement::Int(-m));
        prop_assert_eq!(z.length(&a).unwrap(), m.unsigned_abs() as usize);
        prop_assert_eq!(z.parse_element(&z.format_element(&a)).unwrap(), a);
    }
}

#[test]
fn ball_sizes_match_the_counting_formula() {
    for rank in 1..=3u32 {
        let names: Vec<String> = (0..rank).map(|i| format!("g{i}")).collect();
        let g = GroupDescriptor::free(names).unwrap();
        for n in 0..=4usize {
            let r = rank as usize;
            let expected = 1 + (1..=n).map(|k| 2 * r * (2 * r - 1).pow(k as u32 - 1)).sum::<usize>();
            assert_eq!(g.ball(n).unwrap().len(), expected, "rank {rank}, radius {n}");
            assert_eq!(FreeWord::all_up_to(rank, n).len(), expected);
        }
    }
    assert_eq!(GroupDescriptor::Integers.ball(5).unwrap().len(), 11);
}

#[test]
fn finite_tables_are_groups() {
    for group in [FiniteGroup::cyclic(1), FiniteGroup::cyclic(4), FiniteGroup::cyclic(5), FiniteGroup::klein_four()] {
        let n = group.order();
        let e = group.identity();
        for a in 0..n {
            assert_eq!(group.mul(a, e), a);
            assert_eq!(group.mul(a, group.inv(a)), e);
            for b in 0..n {
                for c in 0..n {
                    assert_eq!(group.mul(group.mul(a, b), c), group.mul(a, group.mul(b, c)));
                }
            }
        }
    }
    let k = FiniteGroup::klein_four();
    assert!((0..4).all(|a| k.mul(a, a) == k.identity()));
}

#[test]
fn finite_table_rejects_non_groups() {
    let names = vec!["e".to_string(), "x".to_string()];
    assert!(FiniteGroup::new(names.clone(), vec![vec![0, 1], vec![1, 1]], 0).is_err());
    assert!(FiniteGroup::new(names.clone(), vec![vec![0, 1]], 0).is_err());
    assert!(FiniteGroup::new(names, vec![vec![0, 1], vec![1, 0]], 0).is_ok());
}
