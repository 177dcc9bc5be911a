use fieldrank_core::analytic::{bias, bias_via_characters, bias_with_pivot};
use fieldrank_core::bounds::matrix_rank;
use fieldrank_core::stability::random_tensor;
use fieldrank_core::tensor::advance;
use fieldrank_core::{Field, LinearMap, Tensor};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// Zero-slice count by enumerating every assignment of the non-pivot legs
/// and testing the slice functional directly.
fn naive_count(t: &Tensor, pivot: usize) -> u64 {
    let q = t.field().order();
    let dims = t.dims();
    let total: usize = dims.iter().enumerate().filter(|&(j, _)| j != pivot).map(|(_, &n)| n).sum();
    let mut flat = vec![0u64; total];
    let mut count = 0;
    loop {
        let mut xs = Vec::new();
        let mut off = 0;
        for (j, &n) in dims.iter().enumerate() {
            if j == pivot {
                xs.push(vec![0; n]);
            } else {
                xs.push(flat[off..off + n].to_vec());
                off += n;
            }
        }
        if t.slice_form(pivot, &xs).unwrap().iter().all(|&c| c == 0) {
            count += 1;
        }
        if !advance(&mut flat, q) {
            return count;
        }
    }
}

fn small_fields() -> Vec<Field> {
    [2u64, 3, 4, 5].iter().map(|&q| Field::of_order(q).unwrap()).collect()
}

#[test]
fn count_matches_naive_enumeration_for_every_pivot() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for f in small_fields() {
        for dims in [vec![2, 2, 2], vec![1, 3, 2], vec![2, 2, 1, 2]] {
            for _ in 0..5 {
                let t = random_tensor(&f, &dims, &mut rng).unwrap();
                let ratios: Vec<BigRational> = (0..dims.len())
                    .map(|p| {
                        let b = bias_with_pivot(&t, p).unwrap();
                        assert_eq!(b.count, BigUint::from(naive_count(&t, p)));
                        b.ratio()
                    })
                    .collect();
                assert!(ratios.windows(2).all(|w| w[0] == w[1]), "{ratios:?}");
            }
        }
    }
}

#[test]
fn character_sum_agrees() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for f in small_fields().into_iter().chain([Field::of_order(9).unwrap()]) {
        for dims in [vec![2, 2, 2], vec![2, 3], vec![1, 2, 2]] {
            for _ in 0..4 {
                let t = random_tensor(&f, &dims, &mut rng).unwrap();
                let exact = bias(&t).unwrap().to_f64();
                let chars = bias_via_characters(&t).unwrap();
                assert!((exact - chars).abs() < TOL, "{exact} vs {chars}");
            }
        }
    }
}

#[test]
fn matrix_analytic_rank_is_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..100 {
        let f = Field::of_order([2, 3, 4][rng.gen_range(0..3)]).unwrap();
        let dims = vec![rng.gen_range(1..=5), rng.gen_range(1..=5)];
        let t = random_tensor(&f, &dims, &mut rng).unwrap();
        let ar = bias(&t).unwrap().analytic_rank();
        assert!((ar - matrix_rank(&t).unwrap() as f64).abs() < TOL);
    }
}

#[test]
fn direct_sum_multiplies_bias() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for f in small_fields().into_iter().take(3) {
        for _ in 0..5 {
            let a = random_tensor(&f, &[2, 1, 2], &mut rng).unwrap();
            let b = random_tensor(&f, &[1, 2, 1], &mut rng).unwrap();
            let s = a.direct_sum(&b).unwrap();
            let lhs = bias(&s).unwrap().ratio();
            let rhs = bias(&a).unwrap().ratio() * bias(&b).unwrap().ratio();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn restriction_does_not_increase_analytic_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for f in small_fields() {
        for _ in 0..8 {
            let t = random_tensor(&f, &[2, 2, 2], &mut rng).unwrap();
            let maps: Vec<LinearMap> = (0..3)
                .map(|_| {
                    let cols = rng.gen_range(1..=2);
                    let e = (0..2 * cols).map(|_| rng.gen_range(0..f.order())).collect();
                    LinearMap::new(&f, 2, cols, e).unwrap()
                })
                .collect();
            let s = t.restrict(&maps).unwrap();
            assert!(bias(&s).unwrap().analytic_rank() <= bias(&t).unwrap().analytic_rank() + TOL);
        }
    }
}

#[test]
fn matrices_are_stable_under_extension() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for f in small_fields().into_iter().take(3) {
        for k in 2..=3 {
            let ext = f.extend(k).unwrap();
            for _ in 0..5 {
                let t = random_tensor(&f, &[3, 3], &mut rng).unwrap();
                let a = bias(&t).unwrap().analytic_rank();
                let b = bias(&t.base_change(&ext).unwrap()).unwrap().analytic_rank();
                assert!((a - b).abs() < TOL);
            }
        }
    }
}

#[test]
fn unit_tensor_bias() {
    // ⟨r⟩ of order 3 has zero slice iff x_i y_i = 0 for all i: ((2q-1)/q²)^r.
    for q in [2u64, 3, 4] {
        let f = Field::of_order(q).unwrap();
        for r in 1..4 {
            let b = bias(&Tensor::diagonal(r, 3, &f).unwrap()).unwrap();
            assert_eq!(b.count, BigUint::from((2 * q - 1).pow(r as u32)));
        }
    }
}
