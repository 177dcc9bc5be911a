//! Certified upper bounds on `R_d(n, q)` and lower bounds on `Q_d(n, q)`.
//!
//! The constructive route is evaluation–interpolation on the rational
//! function field over `F_q`: its degree-one places are the `q` finite
//! points and `∞`, and a polynomial of degree `< n` is recovered from its
//! values at enough of them. At `∞` the value of a polynomial of capped
//! degree is its top coefficient, and the top coefficient of a product of
//! capped polynomials is the product of their top coefficients.

use std::collections::{BTreeSet, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::cert::{RankDecomposition, RestrictionCertificate, TensorSpec};
use crate::error::{guard, Error, Result, OP_BUDGET};
use crate::field::Field;
use crate::linalg::{self, LinearMap};
use crate::mult::{mult_tensor, MultSpec};
use crate::poly;
use crate::tensor::{accumulate_outer, advance, Tensor};

/// A degree-one place of the rational function field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Point {
    Finite(u64),
    Infinity,
}

/// The first `count` places in canonical order: field elements by code,
/// then `∞`.
pub fn rational_points(field: &Field, count: usize) -> Result<Vec<Point>> {
    let q = field.order();
    if count as u64 > q + 1 {
        return Err(Error::NotEnoughPoints {
            needed: count as u64,
            available: q + 1,
        });
    }
    let mut pts: Vec<Point> = (0..(count as u64).min(q)).map(Point::Finite).collect();
    if count as u64 == q + 1 {
        pts.push(Point::Infinity);
    }
    Ok(pts)
}

fn finite_points(pts: &[Point]) -> Vec<u64> {
    pts.iter()
        .filter_map(|p| match p {
            Point::Finite(a) => Some(*a),
            Point::Infinity => None,
        })
        .collect()
}

/// Interpolation basis for polynomials of degree `< pts.len()`: the basis
/// polynomial of a finite point takes value 1 there and 0 at the other
/// finite points; when `∞` is present its basis polynomial is the monic
/// `Π (t - a)` and the finite ones have degree `< pts.len() - 1`.
fn interpolation_basis(f: &Field, pts: &[Point]) -> Vec<Vec<u64>> {
    let finite = finite_points(pts);
    pts.iter()
        .map(|p| match p {
            Point::Finite(a) => {
                let j = finite.iter().position(|x| x == a).unwrap();
                poly::lagrange_basis(f, &finite, j)
            }
            Point::Infinity => poly::from_roots(f, &finite),
        })
        .collect()
}

fn pad(mut v: Vec<u64>, len: usize) -> Vec<u64> {
    assert!(v.len() <= len, "polynomial longer than {len}");
    v.resize(len, 0);
    v
}

fn evaluation_functional(f: &Field, a: u64, n: usize) -> Vec<u64> {
    (0..n).map(|i| f.pow(a, i as u128)).collect()
}

fn unit_vector(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn top_generator(spec: &MultSpec) -> Result<u64> {
    if spec.n() == 1 {
        Ok(0)
    } else {
        Ok(spec.top().generator()?.code())
    }
}

/// Rank decomposition of `Mult_d(F_{q^n}/F_q)` with `(d-1)(n-1)+1` terms
/// from evaluation at degree-one places and interpolation. For `d = 2` the
/// identity decomposition with `n` terms is returned.
pub fn chudnovsky_rank(d: usize, n: u32, base: &Field) -> Result<RankDecomposition> {
    let top = base.extend(n)?;
    let spec = MultSpec::new(base, &top, d)?;
    let n = n as usize;
    if d == 2 {
        let terms = (0..n)
            .map(|i| vec![unit_vector(n, i), unit_vector(n, i)])
            .collect();
        return Ok(RankDecomposition {
            target: TensorSpec::Mult(spec),
            terms,
        });
    }
    let r = (d - 1) * (n - 1) + 1;
    let pts = rational_points(base, r)?;
    let alpha = top_generator(&spec)?;
    let basis = interpolation_basis(base, &pts);
    let finite = finite_points(&pts);
    let mut terms = Vec::with_capacity(r);
    for (p, l) in pts.iter().zip(&basis) {
        let input = match p {
            Point::Finite(a) => evaluation_functional(base, *a, n),
            Point::Infinity => unit_vector(n, n - 1),
        };
        let output_elem = match p {
            Point::Finite(_) => poly::eval(&top, l, alpha),
            // α^{r-1} minus its interpolant through the finite points.
            Point::Infinity => {
                let lead = top.pow(alpha, (r - 1) as u128);
                let interp = finite.iter().enumerate().fold(0, |acc, (j, &a)| {
                    let lj = poly::lagrange_basis(base, &finite, j);
                    let w = base.pow(a, (r - 1) as u128);
                    top.add(acc, top.mul(w, poly::eval(&top, &lj, alpha)))
                });
                top.sub(lead, interp)
            }
        };
        let mut term = vec![input; d - 1];
        term.push(top.coords(output_elem, base)?);
        terms.push(term);
    }
    Ok(RankDecomposition {
        target: TensorSpec::Mult(spec),
        terms,
    })
}

/// Certificate `⟨N⟩ ≤ Mult_d(F_{q^n}/F_q)` valid when `(d-1)(N-1) < n` and
/// `N ≤ q + 1`: inputs are interpolated to polynomials of degree `< N`,
/// whose product has degree `< n` and is read off at the `N` places.
pub fn chudnovsky_subrank(
    d: usize,
    n: u32,
    base: &Field,
    big_n: usize,
) -> Result<RestrictionCertificate> {
    if d < 2 || big_n < 1 {
        return Err(Error::InvalidInput("need d >= 2 and N >= 1".into()));
    }
    let prod_deg = (d - 1) * (big_n - 1);
    if prod_deg >= n as usize {
        return Err(Error::HypothesisViolated(format!(
            "(d-1)(N-1) < n fails: {prod_deg} >= {n}"
        )));
    }
    let pts = rational_points(base, big_n)?;
    let top = base.extend(n)?;
    let spec = MultSpec::new(base, &top, d)?;
    let n = n as usize;
    let basis = interpolation_basis(base, &pts);
    let columns: Vec<Vec<u64>> = basis.into_iter().map(|b| pad(b, n)).collect();
    let input = LinearMap::from_columns(base, n, &columns)?;
    let out_cols: Vec<Vec<u64>> = pts
        .iter()
        .map(|p| match p {
            Point::Finite(a) => evaluation_functional(base, *a, n),
            Point::Infinity => unit_vector(n, prod_deg),
        })
        .collect();
    let output = LinearMap::from_columns(base, n, &out_cols)?;
    let mut maps = vec![input; d - 1];
    maps.push(output);
    Ok(RestrictionCertificate {
        source: TensorSpec::Mult(spec),
        target: TensorSpec::Diagonal {
            field: base.clone(),
            r: big_n,
            d,
        },
        maps,
    })
}

/// Largest `N` accepted by [`chudnovsky_subrank`] for `(d, n, q)`.
pub fn max_chudnovsky_subrank(d: usize, n: u32, q: u64) -> usize {
    let by_degree = (n as usize - 1) / (d - 1) + 1;
    by_degree.min(q as usize + 1)
}

/// The `n^{d-1}`-term decomposition obtained by expanding every product of
/// basis elements.
pub fn schoolbook_rank(d: usize, n: u32, base: &Field) -> Result<RankDecomposition> {
    let top = base.extend(n)?;
    schoolbook_for(&MultSpec::new(base, &top, d)?)
}

pub fn schoolbook_for(spec: &MultSpec) -> Result<RankDecomposition> {
    let n = spec.n();
    let d = spec.d();
    guard(
        "schoolbook terms",
        (n as u128).pow(d as u32),
        OP_BUDGET,
    )?;
    let top = spec.top();
    let mut terms = Vec::new();
    let mut idx = vec![0u64; d - 1];
    loop {
        let prod = idx
            .iter()
            .fold(1, |acc, &i| top.mul(acc, spec.basis(i as usize)));
        let mut term: Vec<Vec<u64>> = idx.iter().map(|&i| unit_vector(n, i as usize)).collect();
        term.push(top.coords(prod, spec.base())?);
        terms.push(term);
        if !advance(&mut idx, n as u64) {
            break;
        }
    }
    Ok(RankDecomposition {
        target: TensorSpec::Mult(spec.clone()),
        terms,
    })
}

fn mult_target(spec: &TensorSpec, role: &str) -> Result<MultSpec> {
    match spec {
        TensorSpec::Mult(s) => Ok(s.clone()),
        _ => Err(Error::TowerMismatch(format!(
            "{role} must target a multiplication tensor"
        ))),
    }
}

/// Composite decomposition of `Mult_d(L/F)` from one of `Mult_d(L/Q)` over
/// `Q` and one of `Mult_d(Q/F)` over `F`.
///
/// Each outer term evaluates `d-1` `Q`-linear functionals and multiplies the
/// results in `Q`; that product is expanded with the inner decomposition.
pub fn compose_rank(
    outer: &RankDecomposition,
    inner: &RankDecomposition,
) -> Result<RankDecomposition> {
    let os = mult_target(&outer.target, "outer")?;
    let is = mult_target(&inner.target, "inner")?;
    if os.base() != is.top() {
        return Err(Error::TowerMismatch(
            "outer base field differs from inner top field".into(),
        ));
    }
    if os.d() != is.d() {
        return Err(Error::TowerMismatch(format!(
            "arity {} vs {}",
            os.d(),
            is.d()
        )));
    }
    let (f, q_field) = (is.base(), is.top());
    let (m, n, d) = (is.n(), os.n(), os.d());
    let q_basis: Vec<u64> = (0..m).map(|a| is.basis(a)).collect();
    let terms_cap = (outer.rank() as u128) * (inner.rank() as u128) * (m * n * d) as u128;
    guard("composed decomposition size", terms_cap, OP_BUDGET)?;

    // lam[t][k][(a + m j)] = coords over F of u_{t,k}[j] · α^a
    let mut lam: Vec<Vec<Vec<Vec<u64>>>> = Vec::with_capacity(outer.rank());
    for term in &outer.terms {
        let mut per_leg = Vec::with_capacity(d - 1);
        for u in &term[..d - 1] {
            let mut cols = Vec::with_capacity(m * n);
            for &uj in u {
                for &ba in &q_basis {
                    cols.push(q_field.coords(q_field.mul(uj, ba), f)?);
                }
            }
            per_leg.push(cols);
        }
        lam.push(per_leg);
    }
    let mut terms = Vec::with_capacity(outer.rank() * inner.rank());
    for (t, oterm) in outer.terms.iter().enumerate() {
        let w = &oterm[d - 1];
        for iterm in &inner.terms {
            let mut composite = Vec::with_capacity(d);
            for k in 0..d - 1 {
                let v = &iterm[k];
                let vec: Vec<u64> = lam[t][k]
                    .iter()
                    .map(|c| {
                        c.iter()
                            .zip(v)
                            .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
                    })
                    .collect();
                composite.push(vec);
            }
            let y = q_field.from_coords(&iterm[d - 1], f)?;
            let mut out = Vec::with_capacity(m * n);
            for &wj in w {
                out.extend(q_field.coords(q_field.mul(y, wj), f)?);
            }
            composite.push(out);
            terms.push(composite);
        }
    }
    Ok(RankDecomposition {
        target: TensorSpec::Mult(MultSpec::new(f, os.top(), d)?),
        terms,
    })
}

fn diagonal_target(spec: &TensorSpec, role: &str) -> Result<usize> {
    match spec {
        TensorSpec::Diagonal { r, .. } => Ok(*r),
        _ => Err(Error::InvalidInput(format!(
            "{role} certificate must target a unit tensor"
        ))),
    }
}

/// Composite certificate `⟨N_o N_i⟩ ≤ Mult_d(L/F)` from `⟨N_o⟩ ≤ Mult_d(L/Q)`
/// over `Q` and `⟨N_i⟩ ≤ Mult_d(Q/F)` over `F`.
///
/// Input legs: each block of `N_i` coordinates is mapped into `Q` by the
/// inner map, then the outer `Q`-linear map is applied. The output leg uses
/// the transposed multiplication matrices because the last leg of `Mult`
/// pairs with coordinates rather than through a trace form.
pub fn compose_subrank(
    outer: &RestrictionCertificate,
    inner: &RestrictionCertificate,
) -> Result<RestrictionCertificate> {
    let os = mult_target(&outer.source, "outer")?;
    let is = mult_target(&inner.source, "inner")?;
    if os.base() != is.top() {
        return Err(Error::TowerMismatch(
            "outer base field differs from inner top field".into(),
        ));
    }
    if os.d() != is.d() {
        return Err(Error::TowerMismatch(format!(
            "arity {} vs {}",
            os.d(),
            is.d()
        )));
    }
    let no = diagonal_target(&outer.target, "outer")?;
    let ni = diagonal_target(&inner.target, "inner")?;
    let (f, q_field) = (is.base(), is.top());
    let (m, n, d) = (is.n(), os.n(), os.d());
    let q_basis: Vec<u64> = (0..m).map(|a| is.basis(a)).collect();
    let mut maps = Vec::with_capacity(d);
    for k in 0..d {
        let a = &outer.maps[k];
        let b = &inner.maps[k];
        let last = k == d - 1;
        let mut c = LinearMap::zero(f, m * n, no * ni);
        for j in 0..n {
            for l in 0..no {
                let x = a.get(j, l);
                // mblock[ai][bi] = coords_ai(x·α^bi), or its transpose on the last leg
                let mut mblock = vec![vec![0u64; m]; m];
                for (bi, &ba) in q_basis.iter().enumerate() {
                    let col = q_field.coords(q_field.mul(x, ba), f)?;
                    for (ai, &v) in col.iter().enumerate() {
                        if last {
                            mblock[bi][ai] = v;
                        } else {
                            mblock[ai][bi] = v;
                        }
                    }
                }
                for ai in 0..m {
                    for ji in 0..ni {
                        let v = (0..m).fold(0, |acc, bi| {
                            f.add(acc, f.mul(mblock[ai][bi], b.get(bi, ji)))
                        });
                        c.set(ai + m * j, ji + ni * l, v);
                    }
                }
            }
        }
        maps.push(c);
    }
    Ok(RestrictionCertificate {
        source: TensorSpec::Mult(MultSpec::new(f, os.top(), d)?),
        target: TensorSpec::Diagonal {
            field: f.clone(),
            r: no * ni,
            d,
        },
        maps,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BruteRank {
    /// Minimal rank, with a witnessing decomposition.
    Exact(usize, Vec<Vec<Vec<u64>>>),
    Exceeds(usize),
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Vectors of `F_q^n` whose first nonzero coordinate is 1.
fn normalized_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut v = vec![0u64; n];
    while advance(&mut v, q) {
        if v.iter().find(|&&c| c != 0) == Some(&1) {
            out.push(v.clone());
        }
    }
    out
}

fn nonzero_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut v = vec![0u64; n];
    while advance(&mut v, q) {
        out.push(v.clone());
    }
    out
}

/// Smallest `r ≤ r_max` such that `t` is a sum of `r` rank-one tensors, by
/// exhaustive search over sets of distinct normalized rank-one tensors,
/// starting from the flattening-rank lower bound.
pub fn brute_force_rank(t: &Tensor, r_max: usize) -> Result<BruteRank> {
    if t.is_zero() {
        return Ok(BruteRank::Exact(0, Vec::new()));
    }
    let f = t.field();
    let q = f.order();
    let dims = t.dims();
    let d = dims.len();
    let count: u128 = dims[..d - 1]
        .iter()
        .map(|&n| ((q as u128).pow(n as u32) - 1) / (q as u128 - 1))
        .product::<u128>()
        * ((q as u128).pow(dims[d - 1] as u32) - 1);
    guard("rank-one tensors", count * t.coeffs().len() as u128, OP_BUDGET)?;

    // Enumerate rank-one tensors; normalized factors make them distinct.
    let factor_sets: Vec<Vec<Vec<u64>>> = dims
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            if k + 1 < d {
                normalized_vectors(q, n)
            } else {
                nonzero_vectors(q, n)
            }
        })
        .collect();
    let mut factors: Vec<Vec<Vec<u64>>> = Vec::new();
    let mut tensors: Vec<Vec<u64>> = Vec::new();
    let mut choice = vec![0usize; d];
    'outer: loop {
        let vecs: Vec<Vec<u64>> = (0..d).map(|k| factor_sets[k][choice[k]].clone()).collect();
        let mut coeffs = vec![0u64; t.coeffs().len()];
        accumulate_outer(f, &mut coeffs, &vecs);
        tensors.push(coeffs);
        factors.push(vecs);
        for k in (0..d).rev() {
            choice[k] += 1;
            if choice[k] < factor_sets[k].len() {
                continue 'outer;
            }
            choice[k] = 0;
        }
        break;
    }
    let index: HashMap<&[u64], usize> = tensors
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_slice(), i))
        .collect();

    let lower = t.flattening_rank().max(1);
    for r in lower..=r_max {
        guard(
            "rank search combinations",
            binomial(tensors.len() as u128, (r - 1) as u128),
            OP_BUDGET,
        )?;
        let mut chosen = Vec::with_capacity(r);
        if search_sum(f, t.coeffs(), &tensors, &index, r, 0, &mut chosen) {
            let terms = chosen.iter().map(|&i| factors[i].clone()).collect();
            return Ok(BruteRank::Exact(r, terms));
        }
    }
    Ok(BruteRank::Exceeds(r_max))
}

fn search_sum(
    f: &Field,
    residual: &[u64],
    tensors: &[Vec<u64>],
    index: &HashMap<&[u64], usize>,
    remaining: usize,
    start: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if remaining == 1 {
        if let Some(&i) = index.get(residual) {
            if i >= start {
                chosen.push(i);
                return true;
            }
        }
        return false;
    }
    for i in start..tensors.len() {
        let next: Vec<u64> = residual
            .iter()
            .zip(&tensors[i])
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        chosen.push(i);
        if search_sum(f, &next, tensors, index, remaining - 1, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Largest `r ≤ r_max` with `⟨r⟩ ≤ t`, by enumerating the maps on all but
/// the last leg and solving linearly for the last one.
pub fn brute_force_subrank(t: &Tensor, r_max: usize) -> Result<usize> {
    if t.is_zero() {
        return Ok(0);
    }
    let mut best = 0;
    let cap = r_max.min(*t.dims().iter().min().unwrap());
    for r in 1..=cap {
        if find_unit_restriction(t, r)?.is_some() {
            best = r;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Maps witnessing `⟨r⟩ ≤ t`, if any.
pub fn find_unit_restriction(t: &Tensor, r: usize) -> Result<Option<Vec<LinearMap>>> {
    let f = t.field();
    let q = f.order();
    let dims = t.dims().to_vec();
    let d = dims.len();
    let work = dims[..d - 1]
        .iter()
        .try_fold(1u128, |acc, &n| {
            (q as u128)
                .checked_pow((n * r) as u32)
                .and_then(|x| x.checked_mul(acc))
        })
        .unwrap_or(u128::MAX);
    guard("subrank map enumeration", work, OP_BUDGET)?;

    // Candidate maps per leg: n_k × r matrices of full column rank.
    let candidates: Vec<Vec<LinearMap>> = dims[..d - 1]
        .iter()
        .map(|&n| {
            let mut out = Vec::new();
            let mut entries = vec![0u64; n * r];
            loop {
                let m = LinearMap::new(f, n, r, entries.clone()).unwrap();
                if m.rank() == r {
                    out.push(m);
                }
                if !advance(&mut entries, q) {
                    break;
                }
            }
            out
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let unit = Tensor::diagonal(r, d, f)?;
    let n_last = dims[d - 1];
    let mut choice = vec![0usize; d - 1];
    loop {
        let mut maps: Vec<LinearMap> = (0..d - 1)
            .map(|k| candidates[k][choice[k]].clone())
            .collect();
        maps.push(LinearMap::identity(f, n_last));
        let u = t.restrict(&maps)?;
        // Rows of the system: U[idx, :] for idx ∈ [r]^{d-1}.
        let rows = r.pow((d - 1) as u32);
        let system = LinearMap::new(f, rows, n_last, u.coeffs().to_vec())?;
        let mut cols = Vec::with_capacity(r);
        for c in 0..r {
            let rhs: Vec<u64> = (0..rows)
                .map(|i| unit.coeffs()[i * r + c])
                .collect();
            match linalg::solve(&system, &rhs) {
                Some(x) => cols.push(x),
                None => break,
            }
        }
        if cols.len() == r {
            maps.pop();
            maps.push(LinearMap::from_columns(f, n_last, &cols)?);
            debug_assert_eq!(t.restrict(&maps)?, unit);
            return Ok(Some(maps));
        }
        let mut k = d - 1;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < candidates[k].len() {
                break;
            }
            choice[k] = 0;
        }
    }
}

fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Number of degree-`n` places of the rational function field over `F_q`:
/// `q + 1` for `n = 1`, otherwise the number of monic irreducible
/// polynomials of degree `n`, `(1/n) Σ_{m|n} μ(m) q^{n/m}`.
pub fn count_places_rational(q: u64, n: u64) -> BigUint {
    assert!(n >= 1, "place degree must be positive");
    if n == 1 {
        return BigUint::from(q) + 1u32;
    }
    let qb = BigInt::from(q);
    let mut sum = BigInt::zero();
    for m in (1..=n).filter(|m| n % m == 0) {
        let mu = mobius(m);
        if mu != 0 {
            sum += BigInt::from(mu) * num_traits::pow(qb.clone(), (n / m) as usize);
        }
    }
    let count = sum / BigInt::from(n);
    debug_assert!(!count.is_negative());
    count.to_biguint().unwrap()
}

/// How the presence of a degree-`n` place is established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlaceStatus {
    KnownPresent,
    /// `2g + 1 ≤ q^{n/2} - q^{(n-1)/2}` with `q = ℓ²` and `N_1 ≥ 1`.
    KnownByHighDegreeBound,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Rational { q: u64 },
    Tower { ell: u64, i: u32 },
    User,
}

/// Claimed invariants of a function field: a genus upper bound, a lower
/// bound on the number of degree-one places, and what is known about
/// places of higher degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionFieldProfile {
    pub genus_bound: u64,
    pub n1_lower: u64,
    /// Degrees with a known place, when listed explicitly.
    pub known_degrees: BTreeSet<u64>,
    /// Every degree has a place (rational function field).
    pub all_degrees: bool,
    /// `ℓ` when the constant field has order `ℓ²`.
    pub square_root_order: Option<u64>,
    pub provenance: Provenance,
}

/// `2g + 1 ≤ ℓ^n - ℓ^{n-1}`, evaluated exactly.
pub fn high_degree_bound_holds(genus: u64, ell: u64, n: u64) -> bool {
    if n == 0 || ell < 2 {
        return false;
    }
    let lhs = 2 * genus as u128 + 1;
    let mut rhs = ell as u128 - 1;
    for _ in 0..n - 1 {
        if rhs >= lhs {
            return true;
        }
        rhs = rhs.saturating_mul(ell as u128);
    }
    rhs >= lhs
}

impl FunctionFieldProfile {
    /// `F_q(x)`: genus 0, `q + 1` degree-one places, places of every degree.
    pub fn rational(q: u64) -> Self {
        FunctionFieldProfile {
            genus_bound: 0,
            n1_lower: q + 1,
            known_degrees: BTreeSet::new(),
            all_degrees: true,
            square_root_order: None,
            provenance: Provenance::Rational { q },
        }
    }

    /// Claimed tower field over `F_{ℓ²}`: genus `< ℓ^i`, at least
    /// `ℓ^i(ℓ-1)` degree-one places.
    pub fn tower(ell: u64, i: u32) -> Result<Self> {
        let li = ell
            .checked_pow(i)
            .ok_or(Error::Overflow("tower profile"))?;
        Ok(FunctionFieldProfile {
            genus_bound: li - 1,
            n1_lower: li.checked_mul(ell - 1).ok_or(Error::Overflow("tower profile"))?,
            known_degrees: BTreeSet::new(),
            all_degrees: false,
            square_root_order: Some(ell),
            provenance: Provenance::Tower { ell, i },
        })
    }

    pub fn user(
        genus_bound: u64,
        n1_lower: u64,
        known_degrees: impl IntoIterator<Item = u64>,
        square_root_order: Option<u64>,
    ) -> Self {
        FunctionFieldProfile {
            genus_bound,
            n1_lower,
            known_degrees: known_degrees.into_iter().collect(),
            all_degrees: false,
            square_root_order,
            provenance: Provenance::User,
        }
    }

    pub fn degree_place(&self, n: u64) -> PlaceStatus {
        if self.all_degrees || self.known_degrees.contains(&n) {
            return PlaceStatus::KnownPresent;
        }
        match self.square_root_order {
            Some(ell)
                if self.n1_lower >= 1 && high_degree_bound_holds(self.genus_bound, ell, n) =>
            {
                PlaceStatus::KnownByHighDegreeBound
            }
            _ => PlaceStatus::Unknown,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Rank,
    Subrank,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub direction: Direction,
    pub d: u64,
    pub n: u64,
    pub big_n: u64,
    /// `N_1 ≥ g + 1`
    pub a: bool,
    /// rank: `(d-1)(n + g - 1) < N`; subrank: `(d-1)(N + g - 1) < n`
    pub b: bool,
    /// `N_1 ≥ N`
    pub c: bool,
    /// `N_n ≥ 1`
    pub d_place: bool,
    pub place_status: PlaceStatus,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d_place
    }
}

/// Evaluates conditions (a)–(d) with the worst-case genus of the profile.
pub fn check_ff_conditions(
    profile: &FunctionFieldProfile,
    direction: Direction,
    d: u64,
    n: u64,
    big_n: u64,
) -> ConditionReport {
    let g = profile.genus_bound as i128;
    let (d_, n_, nn) = (d as i128, n as i128, big_n as i128);
    let a = profile.n1_lower as i128 >= g + 1;
    let b = match direction {
        Direction::Rank => (d_ - 1) * (n_ + g - 1) < nn,
        Direction::Subrank => (d_ - 1) * (nn + g - 1) < n_,
    };
    let c = profile.n1_lower >= big_n;
    let place_status = profile.degree_place(n);
    ConditionReport {
        direction,
        d,
        n,
        big_n,
        a,
        b,
        c,
        d_place: place_status != PlaceStatus::Unknown,
        place_status,
    }
}

/// Best certified rank upper bound available for `Mult_d(F_{q^n}/F_q)`:
/// evaluation–interpolation when there are enough points, otherwise a
/// two-level composition through `F_{q^a}` for some factorization
/// `n = a·b`, otherwise schoolbook.
pub fn best_rank_certificate(d: usize, n: u32, base: &Field) -> Result<RankDecomposition> {
    if let Ok(c) = chudnovsky_rank(d, n, base) {
        return Ok(c);
    }
    let mut best = schoolbook_rank(d, n, base)?;
    for a in 2..n {
        if n % a != 0 {
            continue;
        }
        let b = n / a;
        let inner = chudnovsky_rank(d, a, base).or_else(|_| schoolbook_rank(d, a, base))?;
        let mid = base.extend(a)?;
        let outer = chudnovsky_rank(d, b, &mid).or_else(|_| schoolbook_rank(d, b, &mid))?;
        if outer.rank() * inner.rank() < best.rank() {
            best = compose_rank(&outer, &inner)?;
        }
    }
    Ok(best)
}

/// Rank of `t` as a matrix; `d = 2` only.
pub fn matrix_rank(t: &Tensor) -> Result<usize> {
    if t.order() != 2 {
        return Err(Error::OrderMismatch(t.order(), 2));
    }
    let dims = t.dims();
    Ok(linalg::rank(t.field(), dims[0], dims[1], t.coeffs()))
}

/// Rank of the flattening of `mult_tensor(spec)` grouping the last leg,
/// a lower bound on `R_d`.
pub fn mult_flattening_bound(spec: &MultSpec) -> Result<usize> {
    Ok(mult_tensor(spec)?.flattening_rank())
}

pub fn biguint_to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}
