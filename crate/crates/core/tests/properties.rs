use ocean_core::{
    branch_and_bound, categorize, pair_discoveries, simes_positive, Alpha, BranchOptions,
    HommelConstant, SelectionBlock,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn categorize_is_monotone(p1 in 0.0..=1.0f64, p2 in 0.0..=1.0f64, h in 0u64..5000, a in 0.001..0.5f64) {
        let h = HommelConstant::new(h, 5000).unwrap();
        let alpha = Alpha::new(a).unwrap();
        let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        prop_assert!(categorize(lo, h, alpha, 5001) <= categorize(hi, h, alpha, 5001));
    }

    #[test]
    fn simes_is_monotone_under_union(a in prop::collection::vec(1u32..40, 1..30), b in prop::collection::vec(1u32..40, 0..30)) {
        let union: Vec<u32> = a.iter().chain(&b).copied().collect();
        if simes_positive(&a) {
            prop_assert!(simes_positive(&union));
        }
    }

    #[test]
    fn pair_bound_positive_iff_simes(c in prop::collection::vec(1u32..60, 1..50)) {
        prop_assert_eq!(pair_discoveries(&c).unwrap().d_bar > 0, simes_positive(&c));
    }

    #[test]
    fn pair_bound_is_coherent(t in prop::collection::vec(1u32..60, 1..40), extra in prop::collection::vec(1u32..60, 0..40)) {
        let sup: Vec<u32> = t.iter().chain(&extra).copied().collect();
        let small = pair_discoveries(&t).unwrap().d_bar;
        let large = pair_discoveries(&sup).unwrap().d_bar;
        prop_assert!(small <= large);
        prop_assert!(large <= small + extra.len() as u64);
    }

    #[test]
    fn pair_bound_ignores_order(mut c in prop::collection::vec(1u32..60, 1..50), seed in any::<u64>()) {
        let before = (pair_discoveries(&c).unwrap(), simes_positive(&c));
        let n = c.len();
        c.rotate_left((seed as usize) % n);
        c.reverse();
        prop_assert_eq!(before, (pair_discoveries(&c).unwrap(), simes_positive(&c)));
    }

    #[test]
    fn branch_and_bound_is_deterministic(data in prop::collection::vec(1u32..30, 12)) {
        let block = SelectionBlock::new(4, 3, data).unwrap();
        let opts = BranchOptions::with_max_iter(7);
        prop_assert_eq!(branch_and_bound(&block, &opts).unwrap(), branch_and_bound(&block, &opts).unwrap());
    }
}
