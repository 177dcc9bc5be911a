use fieldrank_core::field::relative_trace;
use fieldrank_core::linalg;
use fieldrank_core::{Error, Field};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Schoolbook arithmetic on digit vectors, recursing down the tower. Shares
/// nothing with the library except the modulus it is handed.
struct Oracle {
    p: u64,
    /// (order of base, modulus codes) from the bottom level up.
    levels: Vec<(u64, Vec<u64>)>,
}

impl Oracle {
    fn of(f: &Field) -> Oracle {
        let mut levels = Vec::new();
        let tower = f.tower();
        for w in tower.windows(2) {
            levels.push((w[0].order(), w[1].modulus().to_vec()));
        }
        Oracle { p: f.p(), levels }
    }

    fn add(&self, level: usize, a: u64, b: u64) -> u64 {
        // Digitwise mod p at every level.
        let mut out = 0;
        let mut place = 1;
        let (mut a, mut b) = (a, b);
        let size = self.order(level);
        while place < size {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg(&self, level: usize, a: u64) -> u64 {
        let mut out = 0;
        let mut place = 1;
        let mut a = a;
        while place < self.order(level) {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn order(&self, level: usize) -> u64 {
        if level == 0 {
            self.p
        } else {
            let (s, m) = &self.levels[level - 1];
            s.pow((m.len() - 1) as u32)
        }
    }

    fn mul(&self, level: usize, a: u64, b: u64) -> u64 {
        if level == 0 {
            return a * b % self.p;
        }
        let (s, modulus) = &self.levels[level - 1];
        let m = modulus.len() - 1;
        let da: Vec<u64> = (0..m).map(|i| a / s.pow(i as u32) % s).collect();
        let db: Vec<u64> = (0..m).map(|i| b / s.pow(i as u32) % s).collect();
        let mut prod = vec![0u64; 2 * m - 1];
        for i in 0..m {
            for j in 0..m {
                let t = self.mul(level - 1, da[i], db[j]);
                prod[i + j] = self.add(level - 1, prod[i + j], t);
            }
        }
        for k in (m..prod.len()).rev() {
            let c = prod[k];
            prod[k] = 0;
            for (i, &mi) in modulus[..m].iter().enumerate() {
                let t = self.neg(level - 1, self.mul(level - 1, c, mi));
                prod[k - m + i] = self.add(level - 1, prod[k - m + i], t);
            }
        }
        prod[..m]
            .iter()
            .enumerate()
            .map(|(i, &c)| c * s.pow(i as u32))
            .sum()
    }
}

fn fields() -> Vec<Field> {
    let f2 = Field::prime(2).unwrap();
    let f3 = Field::prime(3).unwrap();
    let f4 = f2.extend(2).unwrap();
    let f9 = f3.extend(2).unwrap();
    let mut v: Vec<Field> = [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81, 121, 128, 243, 256, 1024, 3125]
        .iter()
        .map(|&q| Field::of_order(q).unwrap())
        .collect();
    v.push(f4.extend(2).unwrap());
    v.push(f4.extend(3).unwrap());
    v.push(f9.extend(2).unwrap());
    v.push(f2.extend(20).unwrap());
    v.push(f3.extend(13).unwrap());
    v
}

#[test]
fn multiplication_matches_schoolbook_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in fields() {
        let o = Oracle::of(&f);
        let level = f.tower().len() - 1;
        for _ in 0..300 {
            let a = rng.gen_range(0..f.order());
            let b = rng.gen_range(0..f.order());
            assert_eq!(f.mul(a, b), o.mul(level, a, b), "F_{} {a}*{b}", f.order());
            assert_eq!(f.add(a, b), o.add(level, a, b));
        }
    }
}

#[test]
fn field_axioms_spot_checks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for f in fields() {
        let q = f.order();
        for _ in 0..200 {
            let (a, b, c) = (rng.gen_range(0..q), rng.gen_range(0..q), rng.gen_range(0..q));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.add(a, f.neg(a)), 0);
            assert_eq!(f.mul(a, 1), a);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
        assert!(matches!(f.inv(0), Err(Error::DivisionByZero)));
    }
}

#[test]
fn frobenius_is_additive() {
    for f in fields().into_iter().filter(|f| f.order() <= 64) {
        let p = f.p() as u128;
        for a in 0..f.order() {
            for b in 0..f.order() {
                assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
            }
        }
    }
}

#[test]
fn multiplicative_group_order() {
    for f in fields().into_iter().filter(|f| f.order() <= 4096) {
        let q = f.order() as u128;
        for a in 1..f.order().min(200) {
            assert_eq!(f.pow(a, q - 1), 1);
        }
    }
}

#[test]
fn f9_inverses_exhaustive() {
    let f9 = Field::of_order(9).unwrap();
    for a in 1..9 {
        let inv = f9.inv(a).unwrap();
        assert_eq!(f9.mul(a, inv), 1);
        assert_eq!(f9.inv(inv).unwrap(), a);
    }
}

#[test]
fn f8_power_basis_has_rank_three() {
    let f8 = Field::of_order(8).unwrap();
    let f2 = Field::prime(2).unwrap();
    let alpha = f8.generator().unwrap().code();
    let mut m = Vec::new();
    for i in 0..3 {
        m.extend(f8.coords(f8.pow(alpha, i), &f2).unwrap());
    }
    assert_eq!(linalg::rank(&f2, 3, 3, &m), 3);
}

#[test]
fn one_is_neutral_in_large_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    for f in [
        Field::prime(2).unwrap().extend(40).unwrap(),
        Field::prime(3).unwrap().extend(20).unwrap(),
    ] {
        for _ in 0..100 {
            let x = rng.gen_range(0..f.order());
            assert_eq!(f.mul(x, 1), x);
            assert_eq!(f.mul(1, x), x);
        }
    }
}

#[test]
fn trace_is_linear_and_surjective() {
    let f4 = Field::of_order(4).unwrap();
    let f2 = Field::prime(2).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            let lhs = f4.trace(f4.add(a, b), &f2).unwrap();
            let rhs = f2.add(f4.trace(a, &f2).unwrap(), f4.trace(b, &f2).unwrap());
            assert_eq!(lhs, rhs);
        }
    }
    for f in fields().into_iter().filter(|f| f.order() <= 256) {
        let sub = Field::prime(f.p()).unwrap();
        let mut hit = vec![0u64; f.p() as usize];
        for a in 0..f.order() {
            hit[f.trace(a, &sub).unwrap() as usize] += 1;
        }
        // Each value is taken q/p times.
        assert!(hit.iter().all(|&h| h == f.order() / f.p()), "F_{}", f.order());
    }
}

#[test]
fn relative_trace_surjects_onto_intermediate_field() {
    let f4 = Field::of_order(4).unwrap();
    let f16 = f4.extend(2).unwrap();
    let mut seen = [false; 4];
    for a in 0..16 {
        let t = relative_trace(&f16.element(a).unwrap(), &f4).unwrap();
        assert_eq!(t.field(), &f4);
        seen[t.code() as usize] = true;
    }
    assert!(seen.iter().all(|&s| s));
}

#[test]
fn subfield_arithmetic_is_preserved() {
    let f4 = Field::of_order(4).unwrap();
    let f64_ = f4.extend(3).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert_eq!(f64_.mul(a, b), f4.mul(a, b));
            assert_eq!(f64_.add(a, b), f4.add(a, b));
        }
    }
}

#[test]
fn construction_is_deterministic() {
    for q in [4u64, 8, 9, 16, 27, 81, 256] {
        let a = Field::of_order(q).unwrap();
        let b = Field::of_order(q).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(Field::from_json(&a.to_json()).unwrap(), a);
    }
}

#[test]
fn rejects_bad_orders() {
    assert!(matches!(Field::prime(4), Err(Error::CompositeModulus(4))));
    assert!(Field::of_order(6).is_err());
    assert!(Field::of_order(1).is_err());
    let f2 = Field::prime(2).unwrap();
    assert!(matches!(f2.generator(), Err(Error::NotAnExtension)));
    assert!(matches!(f2.extend(64), Err(Error::SizeGuard { .. })));
    let f3 = Field::prime(3).unwrap();
    assert!(matches!(f3.element(0).unwrap().add(&f2.one()), Err(Error::MixedFields)));
}

proptest! {
    #[test]
    fn element_json_round_trips(code in 0u64..(1 << 12)) {
        let f16 = Field::of_order(4).unwrap().extend(2).unwrap();
        let f4096 = Field::of_order(2).unwrap().extend(12).unwrap();
        let c = code % 16;
        prop_assert_eq!(f16.element_from_json(&f16.element_to_json(c)).unwrap(), c);
        prop_assert_eq!(f4096.element_from_json(&f4096.element_to_json(code)).unwrap(), code);
    }

    #[test]
    fn coords_round_trip(code in 0u64..729) {
        let f3 = Field::prime(3).unwrap();
        let f9 = f3.extend(2).unwrap();
        let f729 = f9.extend(3).unwrap();
        for sub in [&f3, &f9, &f729] {
            let c = f729.coords(code, sub).unwrap();
            prop_assert_eq!(f729.from_coords(&c, sub).unwrap(), code);
        }
    }

    #[test]
    fn division_inverts_multiplication(a in 0u64..243, b in 1u64..243) {
        let f = Field::of_order(243).unwrap();
        let x = f.element(a).unwrap();
        let y = f.element(b).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().div(&y).unwrap(), x);
    }
}
