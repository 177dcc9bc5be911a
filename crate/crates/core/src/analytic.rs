//! Analytic rank through exact bias counting.
//!
//! For a d-linear form `T` over `F_q`, averaging a nontrivial additive
//! character over the pivot leg gives 1 exactly when the pivot slice
//! functional vanishes and 0 otherwise. So
//! `bias(T) = #{assignments to the other legs with zero slice} / q^N`,
//! `N = Σ_{j≠pivot} n_j`, and `AR(T) = -log_q bias(T)`.
//!
//! [`bias_via_characters`] computes the same quantity as a floating-point
//! character sum `E[e^{2πi Tr(T(x))/p}]` and serves as an independent check.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::error::{guard, Error, Result, OP_BUDGET};
use crate::field::Field;
use crate::linalg;
use crate::tensor::{advance, contract_front, Tensor};

/// Limit on `q^{Σ n_j}` for the character-sum oracle.
pub const CHAR_BUDGET: u128 = 10_000_000;

/// `bias = count / q^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactBias {
    pub count: BigUint,
    pub exponent: u32,
    pub q: BigUint,
}

impl ExactBias {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(
            self.count.clone().into(),
            num_traits::pow(self.q.clone(), self.exponent as usize).into(),
        )
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.q.to_f64().unwrap_or(f64::INFINITY);
        (big_ln(&self.count) - self.exponent as f64 * q.ln()).exp()
    }

    /// `-log_q(bias)`.
    pub fn analytic_rank(&self) -> f64 {
        let q = self.q.to_f64().unwrap_or(f64::INFINITY);
        let ar = self.exponent as f64 - big_ln(&self.count) / q.ln();
        if self.count == num_traits::pow(self.q.clone(), self.exponent as usize) {
            0.0
        } else {
            ar
        }
    }
}

fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArValue {
    pub count: String,
    pub exponent: u32,
    pub q: u64,
    pub ar_float: f64,
}

impl ArValue {
    pub fn from_bias(b: &ExactBias) -> ArValue {
        ArValue {
            count: b.count.to_string(),
            exponent: b.exponent,
            q: b.q.to_u64().unwrap_or(u64::MAX),
            ar_float: b.analytic_rank(),
        }
    }
}

/// The first leg of maximal dimension.
pub fn default_pivot(t: &Tensor) -> usize {
    let max = *t.dims().iter().max().unwrap();
    t.dims().iter().position(|&n| n == max).unwrap()
}

pub fn bias(t: &Tensor) -> Result<ExactBias> {
    bias_with_pivot(t, default_pivot(t))
}

/// Bias computed by counting zero slices of the given pivot leg.
pub fn bias_with_pivot(t: &Tensor, pivot: usize) -> Result<ExactBias> {
    if pivot >= t.order() {
        return Err(Error::DimensionMismatch(format!("no leg {pivot}")));
    }
    let q = t.field().order();
    let dims = t.dims();
    let exponent: u32 = dims
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != pivot)
        .map(|(_, &n)| n as u32)
        .sum();
    let qb = BigUint::from(q);
    if dims.iter().any(|&n| n == 0) {
        return Ok(ExactBias {
            count: num_traits::pow(qb.clone(), exponent as usize),
            exponent,
            q: qb,
        });
    }
    // The largest remaining leg is not enumerated: for fixed values of the
    // others the slice is a matrix in it, with q^{n - rank} zero slices.
    let kernel = (0..dims.len())
        .filter(|&j| j != pivot)
        .max_by_key(|&j| (dims[j], std::cmp::Reverse(j)))
        .unwrap();
    let enumerated = exponent - dims[kernel] as u32;
    let work = (q as u128)
        .checked_pow(enumerated)
        .and_then(|w| w.checked_mul((dims[pivot] * dims[kernel]) as u128))
        .unwrap_or(u128::MAX);
    guard("bias enumeration", work, OP_BUDGET)?;
    if (q as u128).checked_pow(exponent).is_none() {
        return Err(Error::Overflow("bias count exceeds u128"));
    }
    let mut perm: Vec<usize> = (0..dims.len()).filter(|&j| j != pivot && j != kernel).collect();
    perm.push(kernel);
    perm.push(pivot);
    let moved = t.permute(&perm);
    let mut counter = ZeroSliceCounter::new(t.field(), moved.dims());
    let count = counter.count(moved.coeffs(), 0);
    Ok(ExactBias {
        count: BigUint::from(count),
        exponent,
        q: qb,
    })
}

/// Recursive contraction of the leading legs with per-level scratch buffers;
/// the last free leg is handled by a rank computation.
struct ZeroSliceCounter<'a> {
    field: &'a Field,
    dims: &'a [usize],
    q: u64,
    /// `q^{Σ dims[level..d-1]}`: assignments remaining below a level.
    tail: Vec<u128>,
    buffers: Vec<Vec<u64>>,
    vectors: Vec<Vec<u64>>,
}

impl<'a> ZeroSliceCounter<'a> {
    fn new(field: &'a Field, dims: &'a [usize]) -> Self {
        let q = field.order();
        let free = dims.len() - 1;
        let mut tail = vec![1u128; free + 1];
        for l in (0..free).rev() {
            tail[l] = tail[l + 1] * (q as u128).pow(dims[l] as u32);
        }
        ZeroSliceCounter {
            field,
            dims,
            q,
            tail,
            buffers: vec![Vec::new(); free],
            vectors: dims[..free].iter().map(|&n| vec![0; n]).collect(),
        }
    }

    fn count(&mut self, data: &[u64], level: usize) -> u128 {
        if data.iter().all(|&c| c == 0) {
            return self.tail[level];
        }
        let d = self.dims.len();
        if level == d - 1 {
            return 0;
        }
        if level == d - 2 {
            let r = linalg::rank(self.field, self.dims[level], self.dims[d - 1], data);
            return (self.q as u128).pow((self.dims[level] - r) as u32);
        }
        let mut total = 0;
        let mut x = std::mem::take(&mut self.vectors[level]);
        let mut buf = std::mem::take(&mut self.buffers[level]);
        x.iter_mut().for_each(|c| *c = 0);
        loop {
            contract_front(self.field, data, &x, &mut buf);
            total += self.count(&buf, level + 1);
            if !advance(&mut x, self.q) {
                break;
            }
        }
        self.vectors[level] = x;
        self.buffers[level] = buf;
        total
    }
}

pub fn analytic_rank(t: &Tensor) -> Result<ArValue> {
    Ok(ArValue::from_bias(&bias(t)?))
}

/// `E_x[e^{2πi Tr(T(x))/p}]` over all inputs, with `Tr` the absolute trace.
/// Returns the real part; the imaginary part is checked to vanish.
pub fn bias_via_characters(t: &Tensor) -> Result<f64> {
    let f = t.field();
    let q = f.order();
    let total_dim: u32 = t.dims().iter().map(|&n| n as u32).sum();
    let inputs = (q as u128).checked_pow(total_dim).unwrap_or(u128::MAX);
    guard("character sum inputs", inputs, CHAR_BUDGET)?;
    if t.dims().iter().any(|&n| n == 0) {
        return Ok(1.0);
    }
    let p = f.p();
    let prime = Field::prime(p)?;
    let traces = (0..q)
        .map(|x| f.trace(x, &prime))
        .collect::<Result<Vec<u64>>>()?;
    // histogram[v] = #{x : Tr(T(x)) = v}
    let mut histogram = vec![0u64; p as usize];
    let d = t.order();
    let mut xs: Vec<Vec<u64>> = t.dims().iter().map(|&n| vec![0; n]).collect();
    let mut stack: Vec<Vec<u64>> = vec![Vec::new(); d];
    character_walk(f, t.coeffs(), &mut xs, &mut stack, 0, &traces, &mut histogram);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for (v, &c) in histogram.iter().enumerate() {
        let theta = 2.0 * std::f64::consts::PI * v as f64 / p as f64;
        re += c as f64 * theta.cos();
        im += c as f64 * theta.sin();
    }
    let n = inputs as f64;
    let (re, im) = (re / n, im / n);
    assert!(
        im.abs() < 1e-9,
        "character average has imaginary part {im}"
    );
    Ok(re)
}

fn character_walk(
    f: &Field,
    data: &[u64],
    xs: &mut [Vec<u64>],
    stack: &mut [Vec<u64>],
    level: usize,
    traces: &[u64],
    histogram: &mut [u64],
) {
    let q = f.order();
    let mut x = std::mem::take(&mut xs[level]);
    x.iter_mut().for_each(|c| *c = 0);
    let mut buf = std::mem::take(&mut stack[level]);
    loop {
        contract_front(f, data, &x, &mut buf);
        if level + 1 == xs.len() {
            histogram[traces[buf[0] as usize] as usize] += 1;
        } else {
            character_walk(f, &buf, xs, stack, level + 1, traces, histogram);
        }
        if !advance(&mut x, q) {
            break;
        }
    }
    xs[level] = x;
    stack[level] = buf;
}

/// `bias(T) = 1` iff `T = 0`.
pub fn is_unbiased(b: &ExactBias) -> bool {
    b.ratio().is_one()
}
