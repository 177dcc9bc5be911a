//! Declarative check suites: a TOML config lists the checks to run, and the
//! result is a deterministic JSON report (plus a flat CSV view).

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cert::Certificate;
use crate::error::{Error, Result};
use crate::proofcheck::{
    check_interval_fact, prime_powers_up_to, prop_q_witness, prop_r_witness, theorem_chain, Rat,
};
use crate::stability::stability_experiment;

pub const SCHEMA_VERSION: u32 = 1;

/// The suite run when no config is given.
pub const DEFAULT_CONFIG: &str = include_str!("../suites/default.toml");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expect {
    #[default]
    Pass,
    Violation,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactCase {
    pub a: i64,
    pub b: i64,
    /// Exact rationals as `"p/q"` or integers.
    pub x: String,
    pub y: String,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactSweep {
    pub samples: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropCase {
    pub d: u64,
    pub l: u64,
    pub n: u64,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropGrid {
    #[serde(default = "two")]
    pub d_min: u64,
    pub d_max: u64,
    pub l_max: u64,
    pub n_max: u64,
    /// Every `n ≤ dense` is checked; above it only every `stride`-th value
    /// plus the values where the chosen `i` changes.
    pub dense: Option<u64>,
    #[serde(default = "one")]
    pub stride: u64,
}

fn two() -> u64 {
    2
}

fn one() -> u64 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsCase {
    pub d: u64,
    pub q: u64,
    pub n: Option<u64>,
    #[serde(default)]
    pub expect: Expect,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityCase {
    pub q: u64,
    pub n: u32,
    pub d: usize,
    pub format: Vec<usize>,
    pub samples: usize,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateCase {
    pub path: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    #[serde(default)]
    pub fact: Vec<FactCase>,
    pub fact_sweep: Option<FactSweep>,
    #[serde(default)]
    pub prop_r: Vec<PropCase>,
    #[serde(default)]
    pub prop_q: Vec<PropCase>,
    #[serde(default)]
    pub prop_grid: Vec<PropGrid>,
    #[serde(default)]
    pub constants: Vec<ConstantsCase>,
    #[serde(default)]
    pub stability: Vec<StabilityCase>,
    #[serde(default)]
    pub certificate: Vec<CertificateCase>,
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<SuiteConfig> {
        toml::from_str(text).map_err(|e| Error::ConfigError(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<SuiteConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::ConfigError(format!("{}: {e}", path.display())))?;
        SuiteConfig::parse(&text)
    }

    pub fn default_suite() -> SuiteConfig {
        SuiteConfig::parse(DEFAULT_CONFIG).expect("built-in suite parses")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Pass,
    Violation,
    /// Invalid input or an invalid certificate.
    Invalid,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub kind: &'static str,
    pub params: String,
    pub expect: Expect,
    pub outcome: Outcome,
    pub ok: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub ok: usize,
    pub failed: usize,
    pub invalid: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub seed: u64,
    pub entries: Vec<Entry>,
    pub summary: Summary,
}

impl SuiteReport {
    /// 0 when every entry matches its expectation, 2 when any entry had
    /// invalid input or an invalid certificate, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.invalid > 0 {
            2
        } else if self.summary.failed > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv_string(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["kind", "params", "expect", "outcome", "ok"])
            .expect("in-memory write");
        for e in &self.entries {
            let expect = serde_json::to_value(e.expect).unwrap();
            let outcome = serde_json::to_value(e.outcome).unwrap();
            w.write_record([
                e.kind,
                &e.params,
                expect.as_str().unwrap(),
                outcome.as_str().unwrap(),
                if e.ok { "true" } else { "false" },
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

pub fn parse_rational(s: &str) -> Result<Rat> {
    let bad = || Error::InvalidInput(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: i128 = n.parse().map_err(|_| bad())?;
    let d: i128 = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

/// Random tuple satisfying the interval fact's hypotheses: small integer
/// endpoints and rationals with denominators up to 12.
pub fn random_fact_tuple<R: Rng>(rng: &mut R) -> (i128, i128, Rat, Rat) {
    loop {
        let a = rng.gen_range(-60i128..=60);
        let b = a + rng.gen_range(0i128..=40);
        let den_x = rng.gen_range(1i128..=12);
        let den_y = rng.gen_range(1i128..=12);
        let x = Rat::new(rng.gen_range((a - 30) * den_x..=b * den_x), den_x);
        let y = x + Rat::new(rng.gen_range(den_y..=40 * den_y), den_y);
        if Rat::from_integer(a) <= y {
            return (a, b, x, y);
        }
    }
}

/// The integers of `[a,b]` lying in `[x,y]`, by scanning.
pub fn scan_intersection(a: i128, b: i128, x: Rat, y: Rat) -> Option<i128> {
    (a..=b).find(|&k| {
        let k = Rat::from_integer(k);
        x <= k && k <= y
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactSweepResult {
    pub samples: u64,
    pub witnesses: u64,
    pub scan_disagreements: u64,
    pub counterexamples: u64,
}

pub fn fact_sweep(samples: u64, seed: u64) -> FactSweepResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut res = FactSweepResult {
        samples,
        witnesses: 0,
        scan_disagreements: 0,
        counterexamples: 0,
    };
    for _ in 0..samples {
        let (a, b, x, y) = random_fact_tuple(&mut rng);
        let r = check_interval_fact(a, b, x, y);
        debug_assert!(r.hypotheses_hold());
        match r.witness {
            Some(_) => res.witnesses += 1,
            None => res.counterexamples += 1,
        }
        if r.witness != scan_intersection(a, b, x, y) {
            res.scan_disagreements += 1;
        }
    }
    res
}

/// The `n` values checked by a grid entry for a given `(d, ℓ)`.
pub fn grid_ns(grid: &PropGrid, d: u64, ell: u64) -> Vec<u64> {
    let dense = grid.dense.unwrap_or(grid.n_max).min(grid.n_max);
    let mut ns: Vec<u64> = (1..=dense).collect();
    let stride = grid.stride.max(1);
    let mut n = dense + stride;
    while n <= grid.n_max {
        ns.push(n);
        n += stride;
    }
    // Around each ℓ^k: where 4dn crosses it (rank) and where 2dn does (subrank).
    let mut p: u64 = 1;
    while p <= 4 * d * grid.n_max {
        for c in [p / (4 * d), p / (2 * d)] {
            for v in c.saturating_sub(1)..=c + 1 {
                if v > dense && v <= grid.n_max {
                    ns.push(v);
                }
            }
        }
        p = match p.checked_mul(ell) {
            Some(v) => v,
            None => break,
        };
    }
    ns.sort_unstable();
    ns.dedup();
    ns
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GridResult {
    pub rank_cases: u64,
    pub subrank_cases: u64,
    pub failures: u64,
    pub errors: u64,
    pub first_failure: Option<String>,
}

pub fn run_prop_grid(grid: &PropGrid) -> GridResult {
    let mut res = GridResult::default();
    let note = |res: &mut GridResult, msg: String| {
        if res.first_failure.is_none() {
            res.first_failure = Some(msg);
        }
    };
    for d in grid.d_min..=grid.d_max {
        for ell in prime_powers_up_to(grid.l_max) {
            for n in grid_ns(grid, d, ell) {
                if ell >= 8 * d && n >= 2 {
                    res.rank_cases += 1;
                    match prop_r_witness(d, ell, n) {
                        Ok(w) if w.all_pass() => {}
                        Ok(w) => {
                            res.failures += 1;
                            note(&mut res, format!("rank d={d} l={ell} n={n}: {:?}", w.failures()));
                        }
                        Err(e) => {
                            res.errors += 1;
                            note(&mut res, format!("rank d={d} l={ell} n={n}: {e}"));
                        }
                    }
                }
                if n >= 4 * d {
                    res.subrank_cases += 1;
                    match prop_q_witness(d, ell, n) {
                        Ok(w) if w.all_pass() => {}
                        Ok(w) => {
                            res.failures += 1;
                            note(&mut res, format!("subrank d={d} l={ell} n={n}: {:?}", w.failures()));
                        }
                        Err(e) => {
                            res.errors += 1;
                            note(&mut res, format!("subrank d={d} l={ell} n={n}: {e}"));
                        }
                    }
                }
            }
        }
    }
    res
}

fn entry(kind: &'static str, params: String, expect: Expect, outcome: Outcome, detail: Value) -> Entry {
    let ok = match (expect, outcome) {
        (Expect::Pass, Outcome::Pass) | (Expect::Violation, Outcome::Violation) => true,
        _ => false,
    };
    Entry {
        kind,
        params,
        expect,
        outcome,
        ok,
        detail,
    }
}

fn error_outcome(e: &Error) -> Outcome {
    match e {
        Error::HypothesisViolated(_) => Outcome::Violation,
        _ => Outcome::Invalid,
    }
}

fn error_detail(e: &Error) -> Value {
    let kind = format!("{e:?}");
    let name = kind.split(['(', ' ', '{']).next().unwrap_or("").to_string();
    json!({ "error": name, "message": e.to_string() })
}

/// Runs every check in `config`; relative certificate paths resolve
/// against `base_dir`.
pub fn run_suite(config: &SuiteConfig, base_dir: &Path) -> SuiteReport {
    let mut entries = Vec::new();

    for c in &config.fact {
        let params = format!("a={} b={} x={} y={}", c.a, c.b, c.x, c.y);
        let e = match (parse_rational(&c.x), parse_rational(&c.y)) {
            (Ok(x), Ok(y)) => {
                let r = check_interval_fact(c.a as i128, c.b as i128, x, y);
                let outcome = if !r.hypotheses_hold() {
                    Outcome::Violation
                } else if r.witness.is_some() {
                    Outcome::Pass
                } else {
                    Outcome::Invalid
                };
                entry("fact", params, c.expect, outcome, serde_json::to_value(&r).unwrap())
            }
            (Err(e), _) | (_, Err(e)) => {
                entry("fact", params, c.expect, Outcome::Invalid, error_detail(&e))
            }
        };
        entries.push(e);
    }

    if let Some(s) = &config.fact_sweep {
        let r = fact_sweep(s.samples, config.seed);
        let outcome = if r.counterexamples == 0 && r.scan_disagreements == 0 {
            Outcome::Pass
        } else {
            Outcome::Violation
        };
        entries.push(entry(
            "fact-sweep",
            format!("samples={} seed={}", s.samples, config.seed),
            Expect::Pass,
            outcome,
            serde_json::to_value(&r).unwrap(),
        ));
    }

    for (kind, cases, f) in [
        ("prop-r", &config.prop_r, prop_r_witness as fn(u64, u64, u64) -> Result<_>),
        ("prop-q", &config.prop_q, prop_q_witness),
    ] {
        for c in cases {
            let params = format!("d={} l={} n={}", c.d, c.l, c.n);
            let e = match f(c.d, c.l, c.n) {
                Ok(w) => {
                    let outcome = if w.all_pass() {
                        Outcome::Pass
                    } else {
                        Outcome::Violation
                    };
                    entry(kind, params, c.expect, outcome, serde_json::to_value(&w).unwrap())
                }
                Err(e) => entry(kind, params, c.expect, error_outcome(&e), error_detail(&e)),
            };
            entries.push(e);
        }
    }

    for g in &config.prop_grid {
        let r = run_prop_grid(g);
        let outcome = if r.errors > 0 {
            Outcome::Invalid
        } else if r.failures > 0 {
            Outcome::Violation
        } else {
            Outcome::Pass
        };
        entries.push(entry(
            "prop-grid",
            format!(
                "d={}..{} l<={} n<={} dense={} stride={}",
                g.d_min,
                g.d_max,
                g.l_max,
                g.n_max,
                g.dense.unwrap_or(g.n_max),
                g.stride
            ),
            Expect::Pass,
            outcome,
            serde_json::to_value(&r).unwrap(),
        ));
    }

    for c in &config.constants {
        let params = match c.n {
            Some(n) => format!("d={} q={} n={n}", c.d, c.q),
            None => format!("d={} q={}", c.d, c.q),
        };
        let e = match theorem_chain(c.d, c.q, c.n) {
            Ok(r) => {
                let outcome = if r.all_pass() {
                    Outcome::Pass
                } else {
                    Outcome::Violation
                };
                entry("constants", params, c.expect, outcome, serde_json::to_value(&r).unwrap())
            }
            Err(e) => entry("constants", params, c.expect, error_outcome(&e), error_detail(&e)),
        };
        entries.push(e);
    }

    for c in &config.stability {
        let seed = c.seed.unwrap_or(config.seed);
        let params = format!(
            "q={} n={} d={} format={:?} samples={} seed={seed}",
            c.q, c.n, c.d, c.format, c.samples
        );
        let e = match stability_experiment(c.q, c.n, c.d, &c.format, c.samples, seed) {
            Ok(r) => {
                let outcome = if r.violations == 0 {
                    Outcome::Pass
                } else {
                    Outcome::Violation
                };
                entry("stability", params, Expect::Pass, outcome, serde_json::to_value(&r).unwrap())
            }
            Err(e) => entry("stability", params, Expect::Pass, Outcome::Invalid, error_detail(&e)),
        };
        entries.push(e);
    }

    for c in &config.certificate {
        let path = base_dir.join(&c.path);
        let params = format!("path={}", c.path.display());
        let res = load_and_verify(&path);
        let e = match res {
            Ok(detail) => entry("certificate", params, Expect::Pass, Outcome::Pass, detail),
            Err(e) => entry("certificate", params, Expect::Pass, Outcome::Invalid, error_detail(&e)),
        };
        entries.push(e);
    }

    let total = entries.len();
    let ok = entries.iter().filter(|e| e.ok).count();
    let invalid = entries
        .iter()
        .filter(|e| !e.ok && e.outcome == Outcome::Invalid)
        .count();
    SuiteReport {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        summary: Summary {
            total,
            ok,
            failed: total - ok - invalid,
            invalid,
        },
        entries,
    }
}

/// Reads a certificate file and checks it exactly.
pub fn load_and_verify(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::CertificateInvalid(format!("{}: {e}", path.display())))?;
    let cert = Certificate::from_json(&v).map_err(|e| match e {
        Error::CertificateInvalid(_) => e,
        other => Error::CertificateInvalid(other.to_string()),
    })?;
    if !cert.verify()? {
        return Err(Error::CertificateInvalid(format!(
            "{}: identity does not hold",
            path.display()
        )));
    }
    Ok(match &cert {
        Certificate::Rank(d) => json!({ "type": "rank_decomposition", "rank": d.rank(), "verified": true }),
        Certificate::Restriction(c) => json!({
            "type": "restriction_certificate",
            "diagonal": c.diagonal_size(),
            "verified": true,
        }),
    })
}
