mod common;

use common::props;
use proptest::prelude::*;
use qdecomp::asymmetry::OptimizerConfig;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn data_processing_inequality(seed in any::<u64>(), alpha in 0.5f64..6.0) {
        props::data_processing(seed, alpha).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn data_processing_at_one(seed in any::<u64>()) {
        props::data_processing(seed, 1.0).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn mu_is_symmetric(seed in any::<u64>()) {
        props::mu_symmetry(seed).map_err(TestCaseError::fail)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn asymmetry_between_lower_bound_and_conjugate_entropy(
        seed in any::<u64>(),
        alpha in prop::sample::select(vec![0.5, 0.7, 1.0, 2.0, 4.0]),
    ) {
        let cfg = OptimizerConfig { restarts: 8, ..Default::default() };
        props::asymmetry_bracket(seed, alpha, &cfg).map_err(TestCaseError::fail)?;
    }
}
