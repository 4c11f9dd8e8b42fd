use wickquant::suite as common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_product(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::graded_product).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn associativity(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::associativity).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn representation(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::representation).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn anti_homomorphism(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::anti_homomorphism).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn exp_round_trip(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::exp_round_trip).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn fock_closure(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::fock_closure).map_err(TestCaseError::fail)?;
    }
}
