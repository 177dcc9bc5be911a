//! Dense univariate polynomials over a [`Field`], stored as coefficient codes
//! from the constant term upward.

use crate::field::Field;

/// Drops trailing zero coefficients. The zero polynomial becomes empty.
pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Degree, or `None` for the zero polynomial.
pub fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub fn add(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            f.add(x, y)
        })
        .collect();
    trim(out)
}

pub fn sub(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            f.sub(x, y)
        })
        .collect();
    trim(out)
}

pub fn scale(f: &Field, a: &[u64], c: u64) -> Vec<u64> {
    trim(a.iter().map(|&x| f.mul(x, c)).collect())
}

pub fn mul(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.add(out[i + j], f.mul(x, y));
        }
    }
    trim(out)
}

/// Remainder of `a` modulo a nonzero `m`.
pub fn rem(f: &Field, a: &[u64], m: &[u64]) -> Vec<u64> {
    let dm = degree(m).expect("division by the zero polynomial");
    let lead_inv = f.inv(m[dm]).expect("leading coefficient is nonzero");
    let mut r = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < dm {
            break;
        }
        let c = f.mul(r[dr], lead_inv);
        let shift = dr - dm;
        for (t, &mt) in m[..=dm].iter().enumerate() {
            r[shift + t] = f.sub(r[shift + t], f.mul(c, mt));
        }
        r = trim(r);
    }
    r
}

pub fn mulmod(f: &Field, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    rem(f, &mul(f, a, b), m)
}

pub fn powmod(f: &Field, a: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
    let mut result = rem(f, &[1], m);
    let mut base = rem(f, a, m);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(f, &result, &base, m);
        }
        base = mulmod(f, &base, &base, m);
        e >>= 1;
    }
    result
}

/// Monic greatest common divisor (empty when both inputs are zero).
pub fn gcd(f: &Field, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(f, &a, &b);
        a = b;
        b = r;
    }
    match degree(&a) {
        Some(d) => {
            let inv = f.inv(a[d]).expect("nonzero leading coefficient");
            scale(f, &a, inv)
        }
        None => a,
    }
}

pub fn eval(f: &Field, a: &[u64], x: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Product of `(t - p)` over the given points.
pub fn from_roots(f: &Field, roots: &[u64]) -> Vec<u64> {
    roots
        .iter()
        .fold(vec![1], |acc, &r| mul(f, &acc, &[f.neg(r), 1]))
}

/// Lagrange basis polynomial for `points[j]`: value 1 there, 0 at the other points.
pub fn lagrange_basis(f: &Field, points: &[u64], j: usize) -> Vec<u64> {
    let others: Vec<u64> = points
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &p)| p)
        .collect();
    let num = from_roots(f, &others);
    let denom = eval(f, &num, points[j]);
    let inv = f.inv(denom).expect("interpolation points are distinct");
    scale(f, &num, inv)
}

/// Irreducibility over `f` for a polynomial of degree at least 1.
///
/// Rejects polynomials with a root in `f`, then checks
/// `gcd(m, x^(s^j) - x) = 1` for every `1 <= j <= deg/2`.
pub fn is_irreducible(f: &Field, m: &[u64]) -> bool {
    let deg = match degree(m) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if deg == 1 {
        return true;
    }
    if f.order() <= 1 << 16 && (0..f.order()).any(|x| eval(f, m, x) == 0) {
        return false;
    }
    let s = f.order() as u128;
    let x = vec![0, 1];
    let mut h = x.clone();
    for _ in 1..=deg / 2 {
        h = powmod(f, &h, s, m);
        let g = gcd(f, &sub(f, &h, &x), m);
        if degree(&g) != Some(0) {
            return false;
        }
    }
    true
}
