use sheafbm_core::alcove::{CartanType, RootSystem, WeylGroup};
use sheafbm_core::graded::RankPolynomial;
use sheafbm_core::kl::{Coxeter, KlTable};
use sheafbm_core::sheaf::{bm_build, ExtensionOrder, SheafWindow};
use sheafbm_core::Rationals;

fn as_kl_string(r: &RankPolynomial) -> String {
    r.to_string()
}

/// Stalk ranks of `ℬ(w)` in classical mode equal `P_{x,w}` at every `x ≤ w`.
fn check_type(cartan: CartanType, name: &str, cutoff: i64, only: Option<&[&str]>) {
    let rs = RootSystem::new(cartan);
    let weyl = WeylGroup::new(&rs);
    let win = SheafWindow::classical(&weyl);
    let kl = KlTable::new(Coxeter::new(name).unwrap());
    let g = kl.group();
    assert_eq!(g.len(), weyl.len());
    let ws: Vec<usize> = match only {
        Some(list) => list.iter().map(|s| weyl.parse(s).unwrap()).collect(),
        None => (0..weyl.len()).collect(),
    };
    for w in ws {
        let b = bm_build(&Rationals, &win, w, cutoff, ExtensionOrder::Lexicographic).unwrap();
        let kw = g.parse(&weyl.name(w)).unwrap();
        assert_eq!(g.name(kw), weyl.name(w));
        for x in 0..weyl.len() {
            let kx = g.parse(&weyl.name(x)).unwrap();
            let rank = b.stalk_rank(x);
            match kl.polynomial(kx, kw) {
                Ok(p) => assert_eq!(as_kl_string(&rank), p.to_string(), "{} at {} for {}", name, weyl.name(x), weyl.name(w)),
                Err(_) => assert!(rank.is_zero(), "{} at {} for {}", name, weyl.name(x), weyl.name(w)),
            }
        }
    }
}

#[test]
fn rank_two_types_agree() {
    check_type(CartanType::A2, "A2", 6, None);
    check_type(CartanType::B2, "B2", 6, None);
    check_type(CartanType::G2, "G2", 6, None);
}

#[test]
fn a3_singular_elements_agree() {
    check_type(CartanType::A3, "A3", 8, Some(&["s2s1s3s2", "s1s3s2s1s3", "s2s3s2s1", "longest"]));
}
