use fieldrank_core::proofcheck::{check_interval_fact, prop_q_witness, prop_r_witness, theorem_chain, Rat};
use fieldrank_core::Error;
use proptest::prelude::*;

/// Smallest integer in both closed intervals, by walking [a, b].
fn scan(a: i128, b: i128, x: Rat, y: Rat) -> Option<i128> {
    (a..=b).find(|&k| {
        let k = Rat::from_integer(k);
        x <= k && k <= y
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn interval_fact_matches_scan(a in -50i128..50, len in 0i128..40, xn in -2000i128..2000, xd in 1i128..40, gap in 0i128..400, yd in 1i128..40) {
        let b = a + len;
        let x = Rat::new(xn, xd);
        let y = x + Rat::new(gap, yd);
        let r = check_interval_fact(a, b, x, y);
        prop_assert_eq!(r.witness, scan(a, b, x, y));
        prop_assert!(r.consistent());
    }

    #[test]
    fn rank_witness_bounds(d in 2u64..6, li in 0usize..8, n in 2u64..5000) {
        // Prime powers from 8d upward.
        let ells: Vec<u64> = [16u64, 17, 19, 23, 25, 27, 32, 37, 41, 43, 47, 49, 53, 59, 61, 64]
            .into_iter()
            .filter(|&l| l >= 8 * d)
            .collect();
        let ell = ells[li % ells.len()];
        let w = prop_r_witness(d, ell, n).unwrap();
        prop_assert!(w.all_pass(), "{:?}", w.failures());
        prop_assert!(w.big_n >= (2 * d * n) as i128 && w.big_n <= (8 * d * d * n - 1) as i128);
    }

    #[test]
    fn subrank_witness_bounds(d in 2u64..6, ell in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 64]), n in 8u64..100_000) {
        prop_assume!(n >= 4 * d);
        let w = prop_q_witness(d, ell, n).unwrap();
        prop_assert!(w.all_pass(), "{:?}", w.failures());
        prop_assert!(4 * d as i128 * w.big_n >= n as i128);
    }
}

#[test]
fn witness_examples() {
    let w = prop_r_witness(3, 25, 2).unwrap();
    assert_eq!((w.i, w.big_n), (0, 12));
    let w = prop_q_witness(3, 2, 16).unwrap();
    assert_eq!((w.i, w.big_n), (1, 2));
    assert!(matches!(prop_r_witness(3, 8, 5), Err(Error::HypothesisViolated(_))));
    assert!(matches!(prop_q_witness(3, 2, 11), Err(Error::HypothesisViolated(_))));
    assert!(matches!(prop_r_witness(2, 18, 4), Err(Error::HypothesisViolated(_))));
}

#[test]
fn constants_chain() {
    let r = theorem_chain(3, 2, Some(10)).unwrap();
    // 2^10 ≥ 576 > 2^8.
    assert_eq!(r.r, 10);
    assert_eq!(r.rank_chain_lhs, "7200");
    assert_eq!(r.subrank.as_ref().unwrap().m, Some(2));
    assert!(r.all_pass());
    // 64² ≥ 256.
    assert_eq!(theorem_chain(2, 64, None).unwrap().r, 2);
    assert!(theorem_chain(1, 2, None).is_err());
    assert!(theorem_chain(2, 6, None).is_err());
}
