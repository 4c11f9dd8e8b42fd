use wickquant::suite as common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normalize_round_trip(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::normalize_round_trip).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn volume_log_vanishing(seed in any::<u64>(), order in 2u32..=6) {
        common::run_cases(seed, 1, |r| common::volume_log_vanishing(r, order))
            .map_err(TestCaseError::fail)?;
    }
}
