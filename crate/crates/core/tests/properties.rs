use separator_core::properties::flatness_suite;

#[test]
fn random_hypersurfaces_follow_the_unit_ideal_test() {
    for seed in [1, 2, 3] {
        let r = flatness_suite(seed, 60, 101).unwrap();
        assert!(r.passed(), "seed {seed}: {:#?}", r.failures);
        assert!(r.regular >= 60, "{r:?}");
        assert!(r.flat > 0 && r.not_flat > 0, "{r:?}");
        assert!(r.oracle_checked >= 10, "{r:?}");
    }
}
