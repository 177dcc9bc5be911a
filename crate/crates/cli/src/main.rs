use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use fieldrank_core::analytic::{bias, bias_via_characters, ArValue};
use fieldrank_core::bounds::{
    best_rank_certificate, chudnovsky_rank, chudnovsky_subrank, count_places_rational,
    schoolbook_rank,
};
use fieldrank_core::cert::Certificate;
use fieldrank_core::mult::{mult_tensor, verify_qmon, MultSpec};
use fieldrank_core::proofcheck::{check_interval_fact, prop_q_witness, prop_r_witness, theorem_chain};
use fieldrank_core::stability::stability_experiment;
use fieldrank_core::suite::{parse_rational, run_suite, SuiteConfig};
use fieldrank_core::tensor::for_each_index;
use fieldrank_core::{Error, Field, Tensor};

/// Exact finite-field tensor toolkit: multiplication tensors, analytic
/// rank, rank/subrank certificates and proof-arithmetic checks.
#[derive(Parser)]
#[command(name = "fieldrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect or re-serialize tensor JSON files.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Structure tensor of Mult_d(F_{q^n}/F_q).
    Mult {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        /// Emit tensor JSON instead of a listing.
        #[arg(long)]
        json: bool,
    },
    /// Certificate Mult_d(F_{q^m}/F_q) ≤ Mult_d(F_{q^n}/F_q).
    Qmon {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Analytic rank of a tensor file.
    Ar {
        #[arg(long)]
        tensor: PathBuf,
        #[arg(long, value_enum, default_value = "exact")]
        method: ArMethod,
    },
    /// Rank decomposition of Mult_d(F_{q^n}/F_q).
    RankDecomp {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "best")]
        method: RankMethod,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Certificate ⟨N⟩ ≤ Mult_d(F_{q^n}/F_q).
    SubrankCert {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        #[arg(long = "N")]
        big_n: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate file exactly.
    VerifyCert { file: PathBuf },
    /// Number of degree-n places of F_q(x).
    Places {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u64,
    },
    /// Proof-arithmetic checks and experiments.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum TensorCmd {
    /// List dimensions and nonzero coefficients.
    Print { file: PathBuf },
    /// Parse and write back in canonical form.
    Convert {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ArMethod {
    Exact,
    Char,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankMethod {
    Chudnovsky,
    Schoolbook,
    Best,
}

#[derive(Args)]
struct ReportOut {
    /// Also write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write a CSV view here (suite only).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Integer in [a,b] ∩ [x,y].
    Fact {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Rank witness over F_{l^2}.
    PropR {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Subrank witness over F_{l^2}.
    PropQ {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        l: u64,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Constants chain for general q.
    Constants {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: Option<u64>,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Analytic rank before and after extending the field.
    Stability {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: usize,
        /// Leg dimensions, e.g. 2x2x2.
        #[arg(long)]
        format: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: ReportOut,
    },
    /// Run a TOML suite (built-in default when no config is given).
    Suite {
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        out: ReportOut,
    },
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(v: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(v)? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Prints a report and optionally saves it; exit code 0 or 1 by `pass`.
fn report<T: Serialize>(r: &T, pass: bool, out: &ReportOut) -> Result<u8> {
    let v = serde_json::to_value(r)?;
    emit(&v, None)?;
    if let Some(p) = &out.json {
        emit(&v, Some(p))?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn parse_format(s: &str) -> Result<Vec<usize>> {
    s.split(['x', ',', '×'])
        .map(|t| t.trim().parse::<usize>().with_context(|| format!("bad format {s:?}")))
        .collect()
}

fn print_tensor(t: &Tensor) {
    let f = t.field();
    println!("field: F_{} (p = {}, degree {})", f.order(), f.p(), f.abs_degree());
    println!("dims: {:?}", t.dims());
    let mut nonzero = 0;
    for_each_index(t.dims(), |idx| {
        let c = t.get(idx);
        if c != 0 {
            nonzero += 1;
            println!("  {idx:?} = {}", f.element_to_json(c));
        }
    });
    println!("nonzero: {nonzero}");
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Tensor(TensorCmd::Print { file }) => {
            print_tensor(&Tensor::from_json(&read_json(&file)?)?);
            Ok(0)
        }
        Command::Tensor(TensorCmd::Convert { file, out }) => {
            let t = Tensor::from_json(&read_json(&file)?)?;
            emit(&t.to_json(), out.as_deref())?;
            Ok(0)
        }
        Command::Mult { q, n, d, json } => {
            let t = mult_tensor(&MultSpec::standard(q, n, d)?)?;
            if json {
                emit(&t.to_json(), None)?;
            } else {
                print_tensor(&t);
            }
            Ok(0)
        }
        Command::Qmon { q, m, n, d, out } => {
            let cert = verify_qmon(q, m, n, d)?;
            emit(&cert.to_json(), out.as_deref())?;
            Ok(0)
        }
        Command::Ar { tensor, method } => {
            let t = Tensor::from_json(&read_json(&tensor)?)?;
            let exact = || -> Result<Value> {
                Ok(serde_json::to_value(ArValue::from_bias(&bias(&t)?))?)
            };
            let chars = || -> Result<Value> {
                let b = bias_via_characters(&t)?;
                Ok(json!({
                    "bias": b,
                    "ar_float": -b.ln() / (t.field().order() as f64).ln(),
                }))
            };
            let v = match method {
                ArMethod::Exact => exact()?,
                ArMethod::Char => chars()?,
                ArMethod::Both => {
                    let e = exact()?;
                    let c = chars()?;
                    let agree = (e["ar_float"].as_f64().unwrap() - c["ar_float"].as_f64().unwrap())
                        .abs()
                        < 1e-9;
                    emit(&json!({ "exact": e, "characters": c, "agree": agree }), None)?;
                    return Ok(if agree { 0 } else { 1 });
                }
            };
            emit(&v, None)?;
            Ok(0)
        }
        Command::RankDecomp { q, n, d, method, out } => {
            let base = Field::of_order(q)?;
            let dec = match method {
                RankMethod::Chudnovsky => chudnovsky_rank(d, n, &base)?,
                RankMethod::Schoolbook => schoolbook_rank(d, n, &base)?,
                RankMethod::Best => best_rank_certificate(d, n, &base)?,
            };
            if !dec.verify()? {
                return Err(Error::CertificateInvalid("generated decomposition".into()).into());
            }
            emit(&dec.to_json(), out.as_deref())?;
            Ok(0)
        }
        Command::SubrankCert { q, n, d, big_n, out } => {
            let cert = chudnovsky_subrank(d, n, &Field::of_order(q)?, big_n)?;
            if !cert.verify()? {
                return Err(Error::CertificateInvalid("generated certificate".into()).into());
            }
            emit(&cert.to_json(), out.as_deref())?;
            Ok(0)
        }
        Command::VerifyCert { file } => {
            let v = read_json(&file).map_err(|e| Error::CertificateInvalid(format!("{e:#}")))?;
            let cert = Certificate::from_json(&v)?;
            if !cert.verify()? {
                return Err(Error::CertificateInvalid(format!(
                    "{}: identity does not hold",
                    file.display()
                ))
                .into());
            }
            let summary = match &cert {
                Certificate::Rank(d) => json!({ "type": "rank_decomposition", "rank": d.rank(), "verified": true }),
                Certificate::Restriction(c) => json!({
                    "type": "restriction_certificate",
                    "diagonal": c.diagonal_size(),
                    "verified": true,
                }),
            };
            emit(&summary, None)?;
            Ok(0)
        }
        Command::Places { q, n } => {
            if n == 0 {
                bail!("place degree must be positive");
            }
            Field::of_order(q)?;
            emit(&json!({ "q": q, "n": n, "places": count_places_rational(q, n).to_string() }), None)?;
            Ok(0)
        }
        Command::Verify(v) => run_verify(v),
    }
}

fn run_verify(cmd: VerifyCmd) -> Result<u8> {
    match cmd {
        VerifyCmd::Fact { a, b, x, y, out } => {
            let r = check_interval_fact(a as i128, b as i128, parse_rational(&x)?, parse_rational(&y)?);
            report(&r, r.hypotheses_hold() && r.witness.is_some(), &out)
        }
        VerifyCmd::PropR { d, l, n, out } => {
            let w = prop_r_witness(d, l, n)?;
            report(&w, w.all_pass(), &out)
        }
        VerifyCmd::PropQ { d, l, n, out } => {
            let w = prop_q_witness(d, l, n)?;
            report(&w, w.all_pass(), &out)
        }
        VerifyCmd::Constants { d, q, n, out } => {
            let r = theorem_chain(d, q, n)?;
            report(&r, r.all_pass(), &out)
        }
        VerifyCmd::Stability {
            q,
            n,
            d,
            format,
            samples,
            seed,
            out,
        } => {
            let r = stability_experiment(q, n, d, &parse_format(&format)?, samples, seed)?;
            report(&r, r.violations == 0, &out)
        }
        VerifyCmd::Suite { config, out } => {
            let (cfg, base) = match &config {
                Some(p) => (
                    SuiteConfig::load(p)?,
                    p.parent().map(Path::to_path_buf).unwrap_or_default(),
                ),
                None => (SuiteConfig::default_suite(), PathBuf::from(".")),
            };
            let rep = run_suite(&cfg, &base);
            let text = rep.to_json_string();
            match &out.json {
                Some(p) => fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            if let Some(p) = &out.csv {
                fs::write(p, rep.to_csv_string()).with_context(|| format!("writing {}", p.display()))?;
            }
            for e in rep.entries.iter().filter(|e| !e.ok) {
                eprintln!("FAIL {} {}: {:?}", e.kind, e.params, e.outcome);
            }
            eprintln!(
                "{} of {} entries ok ({} failed, {} invalid)",
                rep.summary.ok, rep.summary.total, rep.summary.failed, rep.summary.invalid
            );
            Ok(rep.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
