use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sheafbm_core::fixtures::{random_open, random_window, DEFAULT_SEED};
use sheafbm_core::graded::{sym_component_dim, DegreewiseModule, GradedMap};
use sheafbm_core::graph::Label;
use sheafbm_core::linalg::{Matrix, Subspace};
use sheafbm_core::order::Poset;
use sheafbm_core::sheaf::{bm_build, ExtensionOrder};
use sheafbm_core::verify::{bm_verify, rank_table, section_hilbert};
use sheafbm_core::{Field, PrimeField, Rationals};

fn matrix_strategy() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-3i64..=3, r * c)))
}

fn to_matrix<F: Field>(f: &F, r: usize, c: usize, e: &[i64]) -> Matrix<F> {
    let rows: Vec<Vec<i64>> = e.chunks(c).map(|x| x.to_vec()).collect();
    let m = Matrix::from_i64_rows(f, &rows);
    assert_eq!((m.rows(), m.cols()), (r, c));
    m
}

/// Fixed seed so that every run sees the same cases.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(DEFAULT_SEED), failure_persistence: None, ..ProptestConfig::default() }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn rank_plus_nullity((r, c, e) in matrix_strategy()) {
        let f = Rationals;
        let m = to_matrix(&f, r, c, &e);
        let ker = m.kernel_basis(&f);
        prop_assert_eq!(m.rank(&f) + ker.len(), c);
        for v in &ker {
            prop_assert!(m.mul_vec(&f, v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn rref_is_idempotent((r, c, e) in matrix_strategy()) {
        let f = Rationals;
        let m = to_matrix(&f, r, c, &e);
        let (a, p) = m.rref(&f);
        let (b, q) = a.rref(&f);
        prop_assert_eq!(a, b);
        prop_assert_eq!(p, q);
    }

    #[test]
    fn preimage_solves_images((r, c, e) in matrix_strategy(), v in prop::collection::vec(-4i64..=4, 6)) {
        let f = PrimeField::new(7).unwrap();
        let m = to_matrix(&f, r, c, &e);
        let x: Vec<u64> = v[..c].iter().map(|&a| f.from_i64(a)).collect();
        let b = m.mul_vec(&f, &x);
        let y = m.preimage_solve(&f, &b).unwrap();
        prop_assert_eq!(m.mul_vec(&f, &y), b);
    }

    #[test]
    fn subspace_dimension_formula(
        (r, c1, c2, e1, e2) in (1usize..6, 1usize..5, 1usize..5).prop_flat_map(|(r, c1, c2)| {
            (Just(r), Just(c1), Just(c2), prop::collection::vec(-2i64..=2, r * c1), prop::collection::vec(-2i64..=2, r * c2))
        })
    ) {
        let f = Rationals;
        let a = Subspace::column_space(&f, &to_matrix(&f, r, c1, &e1));
        let b = Subspace::column_space(&f, &to_matrix(&f, r, c2, &e2));
        prop_assert_eq!(a.sum(&f, &b).dim() + a.intersection(&f, &b).dim(), a.dim() + b.dim());
        prop_assert!(a.sum(&f, &b).contains_subspace(&f, &a));
        prop_assert!(a.contains_subspace(&f, &a.intersection(&f, &b)));
    }

    #[test]
    fn prime_field_inverses(p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101]), a in 1i64..1000) {
        let f = PrimeField::new(p).unwrap();
        let x = f.from_i64(a);
        match f.inv(&x) {
            Some(y) => prop_assert!(f.is_one(&f.mul(&x, &y))),
            None => prop_assert_eq!(a as u64 % p, 0),
        }
    }

    #[test]
    fn symmetric_power_dimensions(rank in 1usize..5, k in 0i64..8) {
        let d = sym_component_dim(rank, 2 * k).unwrap();
        prop_assert_eq!(d as u64, binomial(k as u64 + rank as u64 - 1, rank as u64 - 1));
    }

    #[test]
    fn free_module_actions_commute(nvars in 1usize..4, degs in prop::collection::vec(0i64..3, 1..4)) {
        let f = Rationals;
        let degrees: Vec<i64> = degs.iter().map(|d| 2 * d).collect();
        let m = DegreewiseModule::free(&f, nvars, 8, &degrees);
        prop_assert!(m.check_commutes());
        prop_assert!(GradedMap::identity(&m).is_module_map(&m, &m));
    }

    #[test]
    fn labels_are_sign_normalized(v in prop::collection::vec(-5i64..=5, 1..4)) {
        match Label::new(v.clone()) {
            Err(_) => prop_assert!(v.iter().all(|&c| c == 0)),
            Ok(l) => {
                let first = l.coords().iter().find(|&&c| c != 0).copied().unwrap();
                prop_assert!(first > 0);
                let neg: Vec<i64> = v.iter().map(|c| -c).collect();
                prop_assert_eq!(Label::new(neg).unwrap(), l);
            }
        }
    }

    #[test]
    fn open_hulls_are_open(n in 1usize..8, rel in prop::collection::vec((0usize..8, 0usize..8), 0..12), set in prop::collection::btree_set(0usize..8, 0..5)) {
        let rel: Vec<(usize, usize)> = rel.into_iter().filter(|&(a, b)| a < b && b < n).collect();
        let p = Poset::from_relations(n, &rel).unwrap();
        let set: BTreeSet<usize> = set.into_iter().filter(|&x| x < n).collect();
        let h = p.open_hull(&set);
        prop_assert!(p.is_open(&h));
        prop_assert!(set.is_subset(&h));
        for (y, x) in p.covers() {
            prop_assert!(p.lt(y, x));
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn random_sheaves_verify(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_window(&mut rng, 5);
        let b = bm_build(&Rationals, &w, 0, 6, ExtensionOrder::Lexicographic).unwrap();
        let report = bm_verify(&b);
        prop_assert!(report.all_passed(), "{:?}", report.failed());
        let u = random_open(&mut rng, &w.order);
        prop_assert!(b.sections(&u).is_ok());
    }

    #[test]
    fn construction_is_independent_of_extension(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_window(&mut rng, 5);
        let b1 = bm_build(&Rationals, &w, 0, 6, ExtensionOrder::Lexicographic).unwrap();
        let b2 = bm_build(&Rationals, &w, 0, 6, ExtensionOrder::ReverseLexicographic).unwrap();
        prop_assert_eq!(rank_table(&b1), rank_table(&b2));
        prop_assert_eq!(section_hilbert(&b1), section_hilbert(&b2));
    }
}
