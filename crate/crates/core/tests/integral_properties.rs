use wickquant::suite as common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn filtration(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::filtration).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn hermitian(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::hermitian).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn orthonormal_and_leading(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::orthonormal_and_leading).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn symbol_leading_term(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::symbol_leading_term).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn defining_identity(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::defining_identity).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn adjoint(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::adjoint).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn route_equivalence(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::route_equivalence).map_err(TestCaseError::fail)?;
    }
}
