use proptest::prelude::*;
use texrig_core::validate::{check_export_round_trip, check_psd_closure, check_sampler_oracle, run_gradient_checks};

#[test]
fn suites_are_deterministic_per_seed() {
    assert_eq!(check_sampler_oracle(300, 8).detail, check_sampler_oracle(300, 8).detail);
    assert_eq!(check_psd_closure(20, 8).detail, check_psd_closure(20, 8).detail);
    assert_eq!(check_export_round_trip(30, 8).detail, check_export_round_trip(30, 8).detail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn analytic_gradient_matches_finite_differences(seed in any::<u64>()) {
        let stats = run_gradient_checks(1, seed).unwrap();
        prop_assert_eq!(stats.failures, 0, "{:?}", stats.worst);
    }
}
