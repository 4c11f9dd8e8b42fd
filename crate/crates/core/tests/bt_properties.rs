use wickquant::suite as common;

use proptest::prelude::*;
use wickquant::bt::{bt_star_eval, rep_act, BTContext};
use wickquant::random;
use wickquant::wick::wick_star;
use wickquant::{Coefficient, FockSeries, FunctionJets, HbarSeries, WickSeries};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flat_reduction(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::flat_reduction).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn self_adjoint(seed in any::<u64>()) {
        common::run_cases(seed, 1, common::self_adjoint).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn vacuum(seed in any::<u64>()) {
        common::run_cases(seed, 1, |r| common::vacuum(r, 6)).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn unit_and_associativity_at_a_point(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let ctx = BTContext::fubini_study(6);
        let jet = |rng: &mut random::SuiteRng| {
            FunctionJets::from_series(&random::series(rng, 1, 6, 0, 6, 3).filter(|k| k.k2 == 0))
        };
        let (f, g, h) = (jet(&mut rng), jet(&mut rng), jet(&mut rng));
        let one = FunctionJets::constant(1, Coefficient::one());
        let unit = bt_star_eval(&one, &g, &ctx).unwrap();
        prop_assert_eq!(unit.coeff_vec(3)[1..].iter().filter(|c| !c.is_zero()).count(), 0);
        let (of, og, oh) = (ctx.symbol(&f).unwrap(), ctx.symbol(&g).unwrap(), ctx.symbol(&h).unwrap());
        let l = wick_star(&wick_star(&of, &og).unwrap(), &oh).unwrap();
        let r = wick_star(&of, &wick_star(&og, &oh).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        let _ = HbarSeries::zero(0);
    }

    #[test]
    fn holomorphic_right_factor(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let ctx = BTContext::fubini_study(6);
        let g = FunctionJets::from_series(&random::series(&mut rng, 1, 6, 0, 6, 3).filter(|k| k.k2 == 0));
        let fh = random::holomorphic(&mut rng, 1, 6, 0, 6, 3).filter(|k| k.k2 == 0);
        let og = ctx.symbol(&g).unwrap();
        prop_assert_eq!(wick_star(&og, &fh).unwrap(), og.mul(&fh).unwrap());
        let f = FunctionJets::from_series(&fh);
        prop_assert_eq!(ctx.symbol(&f).unwrap(), fh);
    }

    #[test]
    fn locality(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let t = 5;
        let ctx = BTContext::fubini_study(t);
        let base = random::series(&mut rng, 1, t, 0, t as u32, 3).filter(|k| k.k2 == 0);
        let tail = random::series(&mut rng, 1, t + 3, (t + 1) as u32, (t + 3) as u32, 3)
            .filter(|k| k.k2 == 0);
        let f = FunctionJets::from_series(&base);
        let g = FunctionJets::polynomial(&base.with_trunc(t + 3).add(&tail).unwrap());
        let s = FockSeries::new(random::holomorphic(&mut rng, 1, t, 0, t as u32, 2)).unwrap();
        prop_assert_eq!(rep_act(&f, &s, &ctx).unwrap(), rep_act(&g, &s, &ctx).unwrap());
        let _ = WickSeries::zero(1, t);
    }
}
