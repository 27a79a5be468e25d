use sheafbm_core::fixtures::{run_suites, Lemma, DEFAULT_SEED};

#[test]
fn lemma_suites_on_random_fixtures() {
    for r in run_suites(&Lemma::ALL, 100, DEFAULT_SEED, 6, 6) {
        assert!(r.fixtures >= 100);
        assert!(r.all_passed(), "{}: {:?}", r.lemma.name(), r.failures);
    }
}
