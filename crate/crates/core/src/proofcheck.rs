//! Mechanical checks of the integer/rational arithmetic behind the
//! asymptotic rank and subrank bounds: the interval fact, the two
//! square-order witnesses, and the constants chain for general `q`.
//!
//! Tower fields are not constructed; the witnesses only check the stated
//! inequalities against the claimed tower profile (genus `< ℓ^i`, at least
//! `ℓ^i(ℓ-1)` degree-one places). Reports mark them profile-conditional.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, Pow, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::bounds::{check_ff_conditions, ConditionReport, Direction, FunctionFieldProfile};
use crate::error::{Error, Result};
use crate::field::prime_power;

pub type Rat = Ratio<i128>;

/// Global tolerance for the few comparisons that need floating point.
pub const TOLERANCE: f64 = 1e-9;

fn rat(n: i128, d: i128) -> Rat {
    Ratio::new_raw(n, d)
}

/// Below 2^62 in magnitude, so products of two fit in `i128` unchecked.
fn narrow(xs: [i128; 4]) -> bool {
    xs.iter().all(|x| x.unsigned_abs() < 1 << 62)
}

/// `a ≤ b` by cross-multiplication; denominators of `Rat` are positive.
fn rat_le(a: &Rat, b: &Rat) -> bool {
    let (an, ad, bn, bd) = (*a.numer(), *a.denom(), *b.numer(), *b.denom());
    if narrow([an, ad, bn, bd]) {
        return an * bd <= bn * ad;
    }
    match (an.checked_mul(bd), bn.checked_mul(ad)) {
        (Some(l), Some(r)) => l <= r,
        _ => a <= b,
    }
}

/// `y - x ≥ 1`, i.e. `y_n x_d - x_n y_d ≥ x_d y_d`.
fn gap_at_least_one(x: &Rat, y: &Rat) -> bool {
    let (xn, xd, yn, yd) = (*x.numer(), *x.denom(), *y.numer(), *y.denom());
    if narrow([xn, xd, yn, yd]) {
        return yn * xd - xn * yd >= xd * yd;
    }
    let exact = || -> Option<bool> {
        let lhs = yn.checked_mul(xd)?.checked_sub(xn.checked_mul(yd)?)?;
        Some(lhs >= xd.checked_mul(yd)?)
    };
    exact().unwrap_or_else(|| y - x >= Rat::one())
}

fn ceil(x: &Rat) -> i128 {
    -floor(&-x)
}

fn floor(x: &Rat) -> i128 {
    match (i64::try_from(*x.numer()), i64::try_from(*x.denom())) {
        (Ok(n), Ok(d)) => n.div_euclid(d) as i128,
        _ => x.numer().div_euclid(*x.denom()),
    }
}

fn ser_rat<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub holds: bool,
}

fn check(name: &'static str, holds: bool) -> Check {
    Check { name, holds }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactResult {
    pub a: i128,
    pub b: i128,
    #[serde(serialize_with = "ser_rat")]
    pub x: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub y: Rat,
    pub hypotheses: [Check; 4],
    /// Smallest integer in `[a,b] ∩ [x,y]`, if any.
    pub witness: Option<i128>,
}

impl FactResult {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.holds)
    }

    pub fn first_failed(&self) -> Option<&'static str> {
        self.hypotheses.iter().find(|c| !c.holds).map(|c| c.name)
    }

    /// The fact's claim: hypotheses imply a witness.
    pub fn consistent(&self) -> bool {
        !self.hypotheses_hold() || self.witness.is_some()
    }
}

/// Evaluates the hypotheses `a ≤ b`, `a ≤ y`, `x ≤ b`, `y - x ≥ 1` and
/// returns the smallest integer of `[a,b] ∩ [x,y]` (closed intervals).
pub fn check_interval_fact(a: i128, b: i128, x: Rat, y: Rat) -> FactResult {
    debug_assert!(*x.denom() > 0 && *y.denom() > 0);
    let hypotheses = [
        check("a <= b", a <= b),
        check("a <= y", rat_le(&Rat::from_integer(a), &y)),
        check("x <= b", rat_le(&x, &Rat::from_integer(b))),
        check("y - x >= 1", gap_at_least_one(&x, &y)),
    ];
    let lo = a.max(ceil(&x));
    let hi = b.min(floor(&y));
    FactResult {
        a,
        b,
        x,
        y,
        hypotheses,
        witness: (lo <= hi).then_some(lo),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Interval {
    #[serde(serialize_with = "ser_rat")]
    pub lo: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub hi: Rat,
}

impl Interval {
    fn contains(&self, n: i128) -> bool {
        let n = Rat::from_integer(n);
        rat_le(&self.lo, &n) && rat_le(&n, &self.hi)
    }
}

/// `N ≤ 8d²n - 1` for rank, `N ≥ n/(4d)` for subrank.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImpliedBound {
    pub big_n: i128,
    pub relation: &'static str,
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropWitness {
    pub direction: Direction,
    pub d: u64,
    pub ell: u64,
    pub n: u64,
    pub i: u32,
    pub big_n: i128,
    pub genus_bound: u64,
    pub n1_lower: u64,
    pub intervals: [Interval; 2],
    pub conditions: ConditionReport,
    pub checks: Vec<Check>,
    pub implied_bound: ImpliedBound,
    pub profile_conditional: bool,
}

impl PropWitness {
    pub fn all_pass(&self) -> bool {
        self.conditions.all() && self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        let c = &self.conditions;
        for (name, ok) in [("(a)", c.a), ("(b)", c.b), ("(c)", c.c), ("(d)", c.d_place)] {
            if !ok {
                out.push(name);
            }
        }
        out.extend(self.checks.iter().filter(|c| !c.holds).map(|c| c.name));
        out
    }
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b)
        .ok_or(Error::Overflow("product in witness arithmetic"))
}

fn require_prime_power(ell: u64) -> Result<()> {
    if prime_power(ell).is_none() {
        return Err(Error::HypothesisViolated(format!(
            "ell = {ell} is not a prime power"
        )));
    }
    Ok(())
}

fn tower_profile(ell: u64, i: u32) -> Result<FunctionFieldProfile> {
    FunctionFieldProfile::tower(ell, i)
}

/// Witness for `R_d(n, ℓ²) ≤ 8d²n` when `ℓ ≥ 8d`, `n ≥ 2`.
pub fn prop_r_witness(d: u64, ell: u64, n: u64) -> Result<PropWitness> {
    if d < 2 || n < 2 {
        return Err(Error::HypothesisViolated(format!(
            "need d >= 2 and n >= 2, got d = {d}, n = {n}"
        )));
    }
    require_prime_power(ell)?;
    if ell < 8 * d {
        return Err(Error::HypothesisViolated(format!(
            "ell >= 8d fails: {ell} < {}",
            8 * d
        )));
    }
    let (di, ni) = (d as i128, n as i128);
    let four_dn = mul(4 * di, ni)?;
    // ℓ^i < 4dn ≤ ℓ^{i+1}
    let (mut i, mut li, mut li1) = (0u32, 1i128, ell as i128);
    while li1 < four_dn {
        (i, li, li1) = (i + 1, li1, mul(li1, ell as i128)?);
    }
    let a = 2 * di * ni;
    let b = mul(8 * di * di, ni)? - 1;
    let x = rat(2 * di * li, 1);
    let y = rat(li1, 2);
    let fact = check_interval_fact(a, b, x, y);
    let big_n = fact.witness.unwrap_or(0);
    let intervals = [
        Interval {
            lo: Rat::from_integer(a),
            hi: Rat::from_integer(b),
        },
        Interval { lo: x, hi: y },
    ];
    let profile = tower_profile(ell, i)?;
    let g = profile.genus_bound as i128;
    let conditions = check_ff_conditions(&profile, Direction::Rank, d, n, big_n.max(0) as u64);
    let checks = vec![
        check("i chosen with l^i < 4dn <= l^(i+1)", li < four_dn && four_dn <= li1),
        check("interval fact hypotheses", fact.hypotheses_hold()),
        check("N in both intervals", fact.witness.is_some()
            && intervals[0].contains(big_n)
            && intervals[1].contains(big_n)),
        check("N >= dn + dl^i", big_n >= di * ni + di * li),
        check("dn + dl^i > (d-1)(n+g-1)", di * ni + di * li > (di - 1) * (ni + g - 1)),
        check("l^i(l-1) >= l^(i+1)/2", 2 * li * (ell as i128 - 1) >= li1),
        check("l^(i+1)/2 >= N", li1 >= 2 * big_n),
        check("n >= i+2", ni >= i as i128 + 2),
        check("N <= 8d^2 n - 1", big_n <= b),
    ];
    Ok(PropWitness {
        direction: Direction::Rank,
        d,
        ell,
        n,
        i,
        big_n,
        genus_bound: profile.genus_bound,
        n1_lower: profile.n1_lower,
        intervals,
        conditions,
        checks,
        implied_bound: ImpliedBound {
            big_n,
            relation: "<=",
            bound: Rat::from_integer(b),
        },
        profile_conditional: true,
    })
}

/// Witness for `Q_d(n, ℓ²) ≥ n/(4d)` when `n ≥ 4d`.
pub fn prop_q_witness(d: u64, ell: u64, n: u64) -> Result<PropWitness> {
    if d < 2 {
        return Err(Error::HypothesisViolated(format!("need d >= 2, got {d}")));
    }
    require_prime_power(ell)?;
    if n < 4 * d {
        return Err(Error::HypothesisViolated(format!(
            "n >= 4d fails: {n} < {}",
            4 * d
        )));
    }
    let (di, ni) = (d as i128, n as i128);
    // 2dℓ^i ≤ n < 2dℓ^{i+1}
    let (mut i, mut li, mut li1) = (0u32, 1i128, ell as i128);
    while mul(2 * di, li1)? <= ni {
        (i, li, li1) = (i + 1, li1, mul(li1, ell as i128)?);
    }
    let ceil_half = (li1 + 1) / 2;
    let x = rat(ni, 4 * di);
    let y = rat(ni, 2 * di);
    let fact = check_interval_fact(li, ceil_half, x, y);
    let big_n = fact.witness.unwrap_or(0);
    let intervals = [
        Interval {
            lo: Rat::from_integer(li),
            hi: Rat::from_integer(ceil_half),
        },
        Interval { lo: x, hi: y },
    ];
    let profile = tower_profile(ell, i)?;
    let g = profile.genus_bound as i128;
    let conditions = check_ff_conditions(&profile, Direction::Subrank, d, n, big_n.max(0) as u64);
    let checks = vec![
        check("i chosen with 2dl^i <= n < 2dl^(i+1)", 2 * di * li <= ni && ni < 2 * di * li1),
        check("interval fact hypotheses", fact.hypotheses_hold()),
        check("N in both intervals", fact.witness.is_some()
            && intervals[0].contains(big_n)
            && intervals[1].contains(big_n)),
        check("(d-1)(N+g-1) < d(N+l^i)", (di - 1) * (big_n + g - 1) < di * (big_n + li)),
        check("d(N+l^i) <= 2dN", di * (big_n + li) <= 2 * di * big_n),
        check("2dN <= n", 2 * di * big_n <= ni),
        check("l^i(l-1) >= ceil(l^(i+1)/2)", li * (ell as i128 - 1) >= ceil_half),
        check("ceil(l^(i+1)/2) >= N", ceil_half >= big_n),
        check("n >= 2dl^i >= 2^(i+2) >= i+2", ni >= 2 * di * li
            && 2 * di * li >= 1i128 << (i + 2).min(126)
            && (1i128 << (i + 2).min(126)) >= i as i128 + 2),
        check("N >= n/(4d)", 4 * di * big_n >= ni),
    ];
    Ok(PropWitness {
        direction: Direction::Subrank,
        d,
        ell,
        n,
        i,
        big_n,
        genus_bound: profile.genus_bound,
        n1_lower: profile.n1_lower,
        intervals,
        conditions,
        checks,
        implied_bound: ImpliedBound {
            big_n,
            relation: ">=",
            bound: x,
        },
        profile_conditional: true,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GridSummary {
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl GridSummary {
    fn record(&mut self, w: &PropWitness) {
        self.cases += 1;
        if !w.all_pass() {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!(
                    "{:?} d={} l={} n={}: {:?}",
                    w.direction,
                    w.d,
                    w.ell,
                    w.n,
                    w.failures()
                ));
            }
        }
    }
}

pub fn prime_powers_up_to(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&l| prime_power(l).is_some()).collect()
}

/// Runs both witnesses over `d ∈ d_range`, prime powers `ℓ ≤ l_max` meeting
/// each hypothesis, and every `n` yielded by `ns`.
pub fn prop_grid(
    d_range: std::ops::RangeInclusive<u64>,
    l_max: u64,
    ns: &dyn Fn() -> Box<dyn Iterator<Item = u64>>,
) -> Result<(GridSummary, GridSummary)> {
    let ells = prime_powers_up_to(l_max);
    let mut rank = GridSummary::default();
    let mut subrank = GridSummary::default();
    for d in d_range {
        for &ell in &ells {
            for n in ns() {
                if ell >= 8 * d && n >= 2 {
                    rank.record(&prop_r_witness(d, ell, n)?);
                }
                if n >= 4 * d {
                    subrank.record(&prop_q_witness(d, ell, n)?);
                }
            }
        }
    }
    Ok((rank, subrank))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubrankChain {
    pub n: u64,
    /// `None` when `n ≤ d²`, where the bound is trivial.
    pub m: Option<u64>,
    pub qmon_step: bool,
    pub final_step: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub d: u64,
    pub q: u64,
    pub r: u32,
    pub r_minimal: bool,
    pub r_log_bound: bool,
    /// `R_d(r, q) ≤ r^{d-1}` by schoolbook.
    pub schoolbook_rank: String,
    pub rank_chain_lhs: String,
    pub c_d: f64,
    pub small_c_d: String,
    pub rank_chain: bool,
    pub subrank: Option<SubrankChain>,
}

impl ConstantsReport {
    pub fn all_pass(&self) -> bool {
        self.r_minimal
            && self.r_log_bound
            && self.rank_chain
            && self
                .subrank
                .as_ref()
                .map_or(true, |s| s.qmon_step && s.final_step)
    }
}

/// Checks the lift of the square-order bounds to arbitrary `q`.
pub fn theorem_chain(d: u64, q: u64, n: Option<u64>) -> Result<ConstantsReport> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("need d >= 2, got {d}")));
    }
    if prime_power(q).is_none() {
        return Err(Error::InvalidInput(format!("q = {q} is not a prime power")));
    }
    let target = BigUint::from(64 * d * d);
    let qb = BigUint::from(q);
    let mut r = 2u32;
    while Pow::pow(&qb, r) < target {
        r += 2;
    }
    let r_minimal = Pow::pow(&qb, r) >= target && Pow::pow(&qb, r - 2) < target;
    // r ≤ 2 log₂ d + 8  ⇔  2^{r-8} ≤ d²
    let r_log_bound = r <= 8 || Pow::pow(&BigUint::from(2u32), r - 8) <= BigUint::from(d * d);
    let school = Pow::pow(&BigUint::from(r), (d - 1) as u32);
    let lhs = &school * BigUint::from(8 * d * d);
    let c_d = 8.0 * (d * d) as f64 * (2.0 * (d as f64).log2() + 8.0).powi(d as i32 - 1);
    let lhs_f = lhs.to_f64().unwrap_or(f64::INFINITY);
    let rank_chain = r_log_bound && lhs_f <= c_d * (1.0 + TOLERANCE);
    let subrank = n.map(|n| {
        if n <= d * d {
            return SubrankChain {
                n,
                m: None,
                qmon_step: true,
                final_step: true,
            };
        }
        let m = n.div_ceil(2 * d);
        SubrankChain {
            n,
            m: Some(m),
            qmon_step: (d - 1) * (2 * m - 1) <= n - 1,
            // m/(4d) ≥ n/(8d²)  ⇔  2dm ≥ n
            final_step: 2 * d * m >= n,
        }
    });
    Ok(ConstantsReport {
        d,
        q,
        r,
        r_minimal,
        r_log_bound,
        schoolbook_rank: school.to_string(),
        rank_chain_lhs: lhs.to_string(),
        c_d,
        small_c_d: format!("1/{}", 8 * d * d),
        rank_chain,
        subrank,
    })
}
