//! Desk-scale check that analytic rank is stable under field extension:
//! `(Q̂/n)·AR(T) ≤ AR(T^K) ≤ (R̂/n)·AR(T)` for `K = F_{q^n}`, where `R̂` is
//! the size of a verified rank decomposition of `Mult_d(F_{q^n}/F_q)` and
//! `Q̂` the size of a verified unit-tensor restriction of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::bias;
use crate::bounds::{
    best_rank_certificate, chudnovsky_rank, chudnovsky_subrank, max_chudnovsky_subrank,
};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::proofcheck::TOLERANCE;
use crate::tensor::Tensor;

/// Tensor with i.i.d. uniform coefficients.
pub fn random_tensor<R: Rng>(field: &Field, dims: &[usize], rng: &mut R) -> Result<Tensor> {
    let q = field.order();
    let len = dims.iter().product();
    let coeffs = (0..len).map(|_| rng.gen_range(0..q)).collect();
    Tensor::new(field, dims.to_vec(), coeffs)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifiedBound {
    pub value: usize,
    pub certificate: String,
}

/// Smallest verified rank decomposition available for `Mult_d(F_{q^n}/F_q)`.
pub fn certified_rank(d: usize, n: u32, base: &Field) -> Result<CertifiedBound> {
    let q = base.order();
    let dec = best_rank_certificate(d, n, base)?;
    if !dec.verify()? {
        return Err(Error::CertificateInvalid(format!(
            "rank decomposition for d={d}, n={n}, q={q}"
        )));
    }
    let kind = if chudnovsky_rank(d, n, base).is_ok() {
        "chudnovsky_rank"
    } else if dec.rank() < (n as usize).pow(d as u32 - 1) {
        "compose_rank"
    } else {
        "schoolbook_rank"
    };
    Ok(CertifiedBound {
        value: dec.rank(),
        certificate: format!("{kind}(d={d},n={n},q={q})"),
    })
}

/// Largest verified `⟨N⟩ ≤ Mult_d(F_{q^n}/F_q)` from interpolation, else 1.
pub fn certified_subrank(d: usize, n: u32, base: &Field) -> Result<CertifiedBound> {
    let q = base.order();
    let big_n = max_chudnovsky_subrank(d, n, q);
    let cert = chudnovsky_subrank(d, n, base, big_n)?;
    if !cert.verify()? {
        return Err(Error::CertificateInvalid(format!(
            "subrank certificate for d={d}, n={n}, q={q}, N={big_n}"
        )));
    }
    Ok(CertifiedBound {
        value: big_n,
        certificate: format!("chudnovsky_subrank(d={d},n={n},q={q},N={big_n})"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilitySample {
    pub index: usize,
    pub coeffs: Vec<u64>,
    pub count: String,
    pub count_ext: String,
    pub ar: f64,
    pub ar_ext: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub q: u64,
    pub n: u32,
    pub d: usize,
    pub format: Vec<usize>,
    pub seed: u64,
    pub rank_bound: CertifiedBound,
    pub subrank_bound: CertifiedBound,
    pub samples: Vec<StabilitySample>,
    pub violations: usize,
}

/// Compares `AR(T)` and `AR(T^{F_{q^n}})` for a single tensor.
pub fn stability_sample(
    t: &Tensor,
    ext: &Field,
    n: u32,
    r_hat: usize,
    q_hat: usize,
    index: usize,
) -> Result<StabilitySample> {
    let b = bias(t)?;
    let bk = bias(&t.base_change(ext)?)?;
    let ar = b.analytic_rank();
    let ar_ext = bk.analytic_rank();
    let lower = q_hat as f64 / n as f64 * ar;
    let upper = r_hat as f64 / n as f64 * ar;
    Ok(StabilitySample {
        index,
        coeffs: t.coeffs().to_vec(),
        count: b.count.to_string(),
        count_ext: bk.count.to_string(),
        ar,
        ar_ext,
        lower,
        upper,
        lower_margin: ar_ext - lower,
        upper_margin: upper - ar_ext,
        ok: lower <= ar_ext + TOLERANCE && ar_ext <= upper + TOLERANCE,
    })
}

pub fn stability_experiment(
    q: u64,
    n: u32,
    d: usize,
    format: &[usize],
    samples: usize,
    seed: u64,
) -> Result<StabilityReport> {
    if format.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "format {format:?} has {} legs, d = {d}",
            format.len()
        )));
    }
    let base = Field::of_order(q)?;
    let ext = base.extend(n)?;
    let rank_bound = certified_rank(d, n, &base)?;
    let subrank_bound = certified_subrank(d, n, &base)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for index in 0..samples {
        let t = random_tensor(&base, format, &mut rng)?;
        out.push(stability_sample(
            &t,
            &ext,
            n,
            rank_bound.value,
            subrank_bound.value,
            index,
        )?);
    }
    let violations = out.iter().filter(|s| !s.ok).count();
    Ok(StabilityReport {
        q,
        n,
        d,
        format: format.to_vec(),
        seed,
        rank_bound,
        subrank_bound,
        samples: out,
        violations,
    })
}
