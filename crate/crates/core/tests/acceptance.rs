use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fieldrank_core::analytic::{bias, bias_via_characters};
use fieldrank_core::bounds::{
    brute_force_rank, brute_force_subrank, chudnovsky_rank, chudnovsky_subrank, compose_rank, compose_subrank,
    count_places_rational, find_unit_restriction, max_chudnovsky_subrank, BruteRank,
};
use fieldrank_core::mult::{mult_tensor, verify_qmon};
use fieldrank_core::proofcheck::{prop_grid, theorem_chain};
use fieldrank_core::stability::{random_tensor, stability_experiment};
use fieldrank_core::suite::{fact_sweep, run_suite, SuiteConfig};
use fieldrank_core::tensor::advance;
use fieldrank_core::{Error, Field, MultSpec, Tensor};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

/// r* = brute_force_subrank(Mult_3(F_4/F_2)); an independent exhaustive
/// search over all map triples found no restriction onto ⟨2⟩.
const R_STAR: usize = 1;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: Error) -> String {
    err.to_string()
}

fn zero_slices(t: &Tensor, pivot: usize) -> u64 {
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

/// Row reduction written against the field operations only.
fn gauss_rank(f: &Field, rows: usize, cols: usize, m: &[u64]) -> usize {
    let mut a: Vec<Vec<u64>> = (0..rows).map(|i| m[i * cols..(i + 1) * cols].to_vec()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        let inv = f.inv(a[rank][c]).unwrap();
        for r in 0..rows {
            if r != rank && a[r][c] != 0 {
                let k = f.mul(a[r][c], inv);
                for j in 0..cols {
                    let sub = f.mul(k, a[rank][j]);
                    a[r][j] = f.add(a[r][j], f.neg(sub));
                }
            }
        }
        rank += 1;
    }
    rank
}

fn c1() -> Outcome {
    for q in [2u64, 3, 4, 5] {
        let f = Field::of_order(q).map_err(e)?;
        for n in 1..=5 {
            let b = bias(&Tensor::diagonal(n, 2, &f).map_err(e)?).map_err(e)?;
            ensure(b.count == BigUint::from(1u32) && b.exponent as usize == n, format!("identity q={q} n={n}"))?;
            ensure(b.analytic_rank() == n as f64, format!("AR(I_{n}) over F_{q} = {}", b.analytic_rank()))?;
        }
    }
    let t = mult_tensor(&MultSpec::standard(2, 2, 3).map_err(e)?).map_err(e)?;
    let b = bias(&t).map_err(e)?;
    let oracle = zero_slices(&t, 2);
    ensure(
        b.count == BigUint::from(7u32) && b.exponent == 4 && b.q == BigUint::from(2u32) && oracle == 7,
        format!("Mult_3(F_4/F_2): count {} exponent {} oracle {oracle}", b.count, b.exponent),
    )?;
    let chars = bias_via_characters(&t).map_err(e)?;
    ensure((chars - 7.0 / 16.0).abs() < TOL, format!("character sum {chars}"))?;
    Ok("bias(Mult_3(F_4/F_2)) = 7/16; identities AR = n".into())
}

fn c2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fields: Vec<Field> = [2u64, 3, 4].iter().map(|&q| Field::of_order(q).unwrap()).collect();
    for i in 0..200 {
        let f = &fields[i % 3];
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let t = random_tensor(f, &[r, c], &mut rng).map_err(e)?;
        let rank = gauss_rank(f, r, c, t.coeffs());
        let ar = bias(&t).map_err(e)?.analytic_rank();
        ensure((ar - rank as f64).abs() < TOL, format!("sample {i}: AR {ar} vs rank {rank}"))?;
        for k in 2..=4 {
            let ext = f.extend(k).map_err(e)?;
            let ar_k = bias(&t.base_change(&ext).map_err(e)?).map_err(e)?.analytic_rank();
            ensure((ar_k - ar).abs() < TOL, format!("sample {i} K degree {k}: {ar_k} vs {ar}"))?;
        }
    }
    Ok("200 matrices, extensions of degree 2..4".into())
}

fn c3() -> Outcome {
    let (mut ranks, mut subs) = (0, 0);
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let f = Field::of_order(q).map_err(e)?;
        for d in 2..=4usize {
            for n in 1..=4u32 {
                let r = (d - 1) * (n as usize - 1) + 1;
                if r as u64 <= q + 1 {
                    let dec = chudnovsky_rank(d, n, &f).map_err(e)?;
                    ensure(dec.rank() == r, format!("rank terms {} != {r} at d={d} n={n} q={q}", dec.rank()))?;
                    ensure(dec.verify().map_err(e)?, format!("rank certificate d={d} n={n} q={q}"))?;
                    ranks += 1;
                }
                for big_n in 1..=max_chudnovsky_subrank(d, n, q) {
                    let c = chudnovsky_subrank(d, n, &f, big_n).map_err(e)?;
                    ensure(
                        c.diagonal_size() == Some(big_n) && c.verify().map_err(e)?,
                        format!("subrank certificate d={d} n={n} q={q} N={big_n}"),
                    )?;
                    subs += 1;
                }
            }
        }
    }
    Ok(format!("{ranks} rank and {subs} subrank certificates verified"))
}

fn c4() -> Outcome {
    let t = mult_tensor(&MultSpec::standard(2, 2, 3).map_err(e)?).map_err(e)?;
    let brute = brute_force_rank(&t, 4).map_err(e)?;
    ensure(matches!(brute, BruteRank::Exact(3, _)), format!("brute rank {brute:?}"))?;
    let dec = chudnovsky_rank(3, 2, &Field::prime(2).map_err(e)?).map_err(e)?;
    ensure(dec.rank() == 3 && dec.verify().map_err(e)?, "3-term certificate")?;
    let flat = t.flattening_rank();
    ensure(flat == 2, format!("flattening bound {flat}"))?;
    let sub = brute_force_subrank(&t, 3).map_err(e)?;
    ensure(sub == R_STAR, format!("brute subrank {sub} != r* = {R_STAR}"))?;
    let maps = find_unit_restriction(&t, sub).map_err(e)?.ok_or("no witness for r*")?;
    let unit = Tensor::diagonal(sub, 3, t.field()).map_err(e)?;
    ensure(t.restrict(&maps).map_err(e)? == unit, "r* witness does not restrict to the unit tensor")?;
    Ok(format!("rank 3 > flattening 2; subrank r* = {sub} certified"))
}

fn c5() -> Outcome {
    let f2 = Field::prime(2).map_err(e)?;
    let f4 = f2.extend(2).map_err(e)?;
    let outer = chudnovsky_rank(3, 2, &f4).map_err(e)?;
    let inner = chudnovsky_rank(3, 2, &f2).map_err(e)?;
    let c = compose_rank(&outer, &inner).map_err(e)?;
    ensure(c.rank() == 9 && c.verify().map_err(e)?, format!("composed rank {}", c.rank()))?;
    let o = chudnovsky_subrank(3, 3, &f4, 2).map_err(e)?;
    let i = chudnovsky_subrank(3, 2, &f2, 1).map_err(e)?;
    let s = compose_subrank(&o, &i).map_err(e)?;
    ensure(s.diagonal_size() == Some(2) && s.verify().map_err(e)?, "⟨2⟩ ≤ Mult_3(F_64/F_2)")?;
    let top = match &s.source {
        fieldrank_core::TensorSpec::Mult(spec) => (spec.base().order(), spec.top().order()),
        _ => (0, 0),
    };
    ensure(top == (2, 64), format!("source field pair {top:?}"))?;
    Ok("9-term Mult_3(F_16/F_2); ⟨2⟩ ≤ Mult_3(F_64/F_2)".into())
}

fn c6() -> Outcome {
    let (mut ok, mut violated) = (0, 0);
    for q in [2u64, 3] {
        for m in 1..=3u32 {
            for n in 1..=5u32 {
                for d in 2..=4usize {
                    let holds = n - 1 >= (d as u32 - 1) * (m - 1);
                    match verify_qmon(q, m, n, d) {
                        Ok(c) if holds => {
                            ensure(c.verify().map_err(e)?, format!("({q},{m},{n},{d})"))?;
                            ok += 1;
                        }
                        Err(Error::HypothesisViolated(_)) if !holds => violated += 1,
                        other => return Err(format!("({q},{m},{n},{d}) hypothesis {holds}: {:?}", other.map(|_| ()))),
                    }
                }
            }
        }
    }
    Ok(format!("{ok} verified, {violated} rejected"))
}

fn monic(f: &Field, n: usize) -> Vec<Vec<u64>> {
    let q = f.order();
    (0..q.pow(n as u32))
        .map(|code| {
            let mut c: Vec<u64> = (0..n).map(|i| code / q.pow(i as u32) % q).collect();
            c.push(1);
            c
        })
        .collect()
}

/// Monic degree-n polynomials that are not a product of two monic factors
/// of positive degree.
fn irreducibles(f: &Field, n: usize) -> u64 {
    let mut reducible = std::collections::HashSet::new();
    for k in 1..=n / 2 {
        for a in monic(f, k) {
            for b in monic(f, n - k) {
                let mut p = vec![0; n + 1];
                for (i, &x) in a.iter().enumerate() {
                    for (j, &y) in b.iter().enumerate() {
                        p[i + j] = f.add(p[i + j], f.mul(x, y));
                    }
                }
                reducible.insert(p);
            }
        }
    }
    f.order().pow(n as u32) - reducible.len() as u64
}

fn c7() -> Outcome {
    for q in [2u64, 3, 4] {
        let f = Field::of_order(q).map_err(e)?;
        for n in 1..=6usize {
            // Degree-one places are the q monic linear polynomials plus infinity.
            let count = irreducibles(&f, n) + u64::from(n == 1);
            let got = count_places_rational(q, n as u64);
            ensure(got == BigUint::from(count), format!("q={q} n={n}: {got} vs {count}"))?;
        }
    }
    ensure(irreducibles(&Field::prime(2).map_err(e)?, 2) == 1, "(2,2) != 1")?;
    ensure(irreducibles(&Field::prime(3).map_err(e)?, 3) == 8, "(3,3) != 8")?;
    Ok("q ∈ {2,3,4}, n ≤ 6 match enumeration".into())
}

fn c8() -> Outcome {
    let r = fact_sweep(100_000, 8);
    ensure(
        r.witnesses == 100_000 && r.counterexamples == 0 && r.scan_disagreements == 0,
        format!("{r:?}"),
    )?;
    Ok("100000 tuples, all witnessed, scan agrees".into())
}

fn c9() -> Outcome {
    let (rank, sub) = prop_grid(2..=5, 64, &|| Box::new(1..=1_000_000u64)).map_err(e)?;
    ensure(rank.failures == 0, format!("rank: {:?}", rank.first_failure))?;
    ensure(sub.failures == 0, format!("subrank: {:?}", sub.first_failure))?;
    Ok(format!("{} rank and {} subrank witnesses", rank.cases, sub.cases))
}

fn c10() -> Outcome {
    let mut cases = 0;
    for d in 2..=6u64 {
        let c_d = 8.0 * (d * d) as f64 * (2.0 * (d as f64).log2() + 8.0).powi(d as i32 - 1);
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25] {
            let target = 64 * d * d;
            let mut r = 2u32;
            while (q as u128).pow(r) < target as u128 {
                r += 2;
            }
            let lhs = (r as f64).powi(d as i32 - 1) * (8 * d * d) as f64;
            ensure(r <= 8 || 1u64 << (r - 8) <= d * d, format!("2^(r-8) <= d^2 at d={d} q={q}"))?;
            ensure(lhs <= c_d * (1.0 + TOL), format!("r^(d-1) 8d^2 <= C_d at d={d} q={q}"))?;
            for n in d * d + 1..=d * d + 50 {
                let rep = theorem_chain(d, q, Some(n)).map_err(e)?;
                ensure(rep.r == r && rep.r_minimal && rep.all_pass(), format!("chain d={d} q={q} n={n}"))?;
                let m = n.div_ceil(2 * d);
                let chain = rep.subrank.as_ref().ok_or("missing subrank chain")?;
                ensure(chain.m == Some(m), format!("m at d={d} n={n}"))?;
                ensure((d - 1) * (2 * m - 1) <= n - 1, format!("qmon step d={d} n={n}"))?;
                // m/(4d) ≥ n/(8d²)  ⇔  2dm ≥ n
                ensure(2 * d * m >= n, format!("final step d={d} n={n}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} (d, q, n) cases"))
}

fn c11() -> Outcome {
    let mut total = 0;
    for (q, n) in [(2u64, 2u32), (2, 3), (2, 4), (3, 2)] {
        let rep = stability_experiment(q, n, 3, &[2, 2, 2], 50, 1000 + q * 10 + n as u64).map_err(e)?;
        let (r_hat, q_hat) = (rep.rank_bound.value as f64, rep.subrank_bound.value as f64);
        for s in &rep.samples {
            let lo = q_hat / n as f64 * s.ar;
            let hi = r_hat / n as f64 * s.ar;
            ensure(
                lo <= s.ar_ext + TOL && s.ar_ext <= hi + TOL,
                format!("q={q} n={n} sample {}: {lo} <= {} <= {hi}", s.index, s.ar_ext),
            )?;
        }
        ensure(rep.violations == 0 && rep.samples.len() == 50, format!("q={q} n={n}"))?;
        total += rep.samples.len();
    }
    Ok(format!("{total} samples, zero violations"))
}

fn c12() -> Outcome {
    let cfg = SuiteConfig::default_suite();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("suites");
    let a = run_suite(&cfg, &dir);
    let b = run_suite(&cfg, &dir);
    ensure(a.exit_code() == 0, format!("suite exit code {}", a.exit_code()))?;
    let (ja, jb) = (a.to_json_string(), b.to_json_string());
    ensure(ja.as_bytes() == jb.as_bytes(), "JSON reports differ")?;
    ensure(a.to_csv_string() == b.to_csv_string(), "CSV reports differ")?;
    Ok(format!("{} bytes identical", ja.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 12] = [
        ("analytic rank ground truth", c1, Duration::from_secs(1)),
        ("matrix rank equivalence", c2, Duration::from_secs(10)),
        ("interpolation certificates", c3, Duration::from_secs(30)),
        ("brute-force oracle equivalence", c4, Duration::from_secs(60)),
        ("composition", c5, Duration::from_secs(10)),
        ("subfield restriction", c6, Duration::from_secs(10)),
        ("place counting", c7, Duration::from_secs(5)),
        ("interval fact sweep", c8, Duration::from_secs(5)),
        ("witness grid", c9, Duration::from_secs(60)),
        ("constants chain", c10, Duration::from_secs(5)),
        ("extension stability", c11, Duration::from_secs(300)),
        ("determinism", c12, Duration::from_secs(300)),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = run();
        let took = start.elapsed();
        let res = res.and_then(|s| {
            if took <= *limit {
                Ok(s)
            } else {
                Err(format!("{s}; took {took:.2?} > {limit:?}"))
            }
        });
        match res {
            Ok(s) => println!("criterion {:>2} PASS  {name} [{took:.2?}] {s}", k + 1),
            Err(s) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} [{took:.2?}] {s}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
