//! Towers of finite fields `F_p ⊂ F_q ⊂ F_{q^n} ⊂ …` with exact arithmetic.
//!
//! Every field is either a prime field or a relative extension of a named
//! base by a monic irreducible modulus. Elements are identified by their
//! canonical code: a prime-field residue, or `Σ c_i s^i` where `c_i` are the
//! codes of the coefficients over the base and `s` is the base order. The
//! base-`p` digits of a code are therefore the absolute coordinates in the
//! tower basis, and the inclusion of a base field into its extension is the
//! identity on codes.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly;

/// Largest prime accepted by [`Field::prime`].
pub const MAX_PRIME: u64 = 1 << 31;
/// Largest field order accepted by [`Field::extend`].
pub const MAX_ORDER: u64 = 1 << 63;
/// Fields up to this order get log/antilog multiplication tables.
const TABLE_ORDER: u64 = 1 << 16;
/// Odd-characteristic extensions up to this order get an addition table.
const ADD_TABLE_ORDER: u64 = 1 << 8;

#[derive(Clone)]
pub struct Field(Arc<Inner>);

struct Inner {
    p: u64,
    base: Option<Field>,
    /// Monic, low-to-high, codes over `base`. Empty for prime fields.
    modulus: Vec<u64>,
    degree: u32,
    abs_degree: u32,
    order: u64,
    tables: Option<MulTables>,
    add_table: Option<Vec<u32>>,
}

struct MulTables {
    /// `exp[k] = g^k` for `k < 2(q-1)`.
    exp: Vec<u32>,
    log: Vec<u32>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..)
        .take_while(|d| d * d <= q)
        .find(|d| q % d == 0)
        .unwrap_or(q);
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Field> {
        if p > MAX_PRIME {
            return Err(Error::SizeGuard {
                what: "prime modulus",
                needed: p as u128,
                limit: MAX_PRIME as u128,
            });
        }
        if !is_prime(p) {
            return Err(Error::CompositeModulus(p));
        }
        Ok(Field(Arc::new(Inner {
            p,
            base: None,
            modulus: Vec::new(),
            degree: 1,
            abs_degree: 1,
            order: p,
            tables: None,
            add_table: None,
        })))
    }

    /// `F_q` built as `extend(F_p, e)` for `q = p^e`.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, e) = prime_power(q)
            .ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Field::prime(p)?.extend(e)
    }

    /// Degree-`m` extension by the lexicographically smallest monic
    /// irreducible modulus. Candidates are compared on their coefficient
    /// lists read from the constant term upward, each coefficient by its
    /// code. `m = 1` returns `self`.
    pub fn extend(&self, m: u32) -> Result<Field> {
        if m == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        if m == 1 {
            return Ok(self.clone());
        }
        let s = self.order();
        let order = s
            .checked_pow(m)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(Error::SizeGuard {
                what: "field order",
                needed: (s as u128).saturating_pow(m),
                limit: MAX_ORDER as u128,
            })?;
        let m_us = m as usize;
        let mut coeffs = vec![0u64; m_us + 1];
        coeffs[m_us] = 1;
        // c_0 = 0 leaves x as a factor, so the search starts at c_0 = 1.
        coeffs[0] = 1;
        // Odometer over (c_0, ..., c_{m-1}) with c_{m-1} varying fastest.
        loop {
            if poly::is_irreducible(self, &coeffs) {
                return Field::build(self, coeffs, order);
            }
            let mut pos = m_us;
            loop {
                if pos == 0 {
                    unreachable!("irreducible polynomials of every degree exist");
                }
                pos -= 1;
                coeffs[pos] += 1;
                if coeffs[pos] < s {
                    break;
                }
                coeffs[pos] = 0;
            }
        }
    }

    /// Extension by an explicitly supplied modulus (verified monic and irreducible).
    pub fn with_modulus(base: &Field, modulus: Vec<u64>) -> Result<Field> {
        let m = poly::degree(&modulus)
            .filter(|&d| d >= 1 && d + 1 == modulus.len())
            .ok_or_else(|| Error::InvalidInput("modulus must have degree >= 1".into()))?;
        if modulus[m] != 1 {
            return Err(Error::InvalidInput("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= base.order()) {
            return Err(Error::InvalidInput("modulus coefficient out of range".into()));
        }
        if m < 2 {
            return Err(Error::InvalidInput(
                "extension modulus must have degree >= 2".into(),
            ));
        }
        let order = base
            .order()
            .checked_pow(m as u32)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(Error::SizeGuard {
                what: "field order",
                needed: (base.order() as u128).saturating_pow(m as u32),
                limit: MAX_ORDER as u128,
            })?;
        if !poly::is_irreducible(base, &modulus) {
            return Err(Error::InvalidInput("modulus is reducible".into()));
        }
        Field::build(base, modulus, order)
    }

    fn build(base: &Field, modulus: Vec<u64>, order: u64) -> Result<Field> {
        let degree = (modulus.len() - 1) as u32;
        let bare = Inner {
            p: base.p(),
            base: Some(base.clone()),
            modulus,
            degree,
            abs_degree: base.abs_degree() * degree,
            order,
            tables: None,
            add_table: None,
        };
        let field = Field(Arc::new(bare));
        if order > TABLE_ORDER {
            return Ok(field);
        }
        let tables = field.mul_tables();
        let add_table = (field.p() != 2 && order <= ADD_TABLE_ORDER).then(|| {
            let q = order as usize;
            let mut t = vec![0u32; q * q];
            for a in 0..q {
                for b in 0..q {
                    t[a * q + b] = field.add_digits(a as u64, b as u64) as u32;
                }
            }
            t
        });
        let inner = Arc::try_unwrap(field.0).unwrap_or_else(|_| unreachable!());
        Ok(Field(Arc::new(Inner {
            tables: Some(tables),
            add_table,
            ..inner
        })))
    }

    fn mul_tables(&self) -> MulTables {
        let q = self.order();
        let factors = prime_factors(q - 1);
        let g = (2..q)
            .find(|&g| factors.iter().all(|&r| self.pow(g, ((q - 1) / r) as u128) != 1))
            .expect("multiplicative group is cyclic");
        let n = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * n];
        let mut log = vec![0u32; q as usize];
        let mut x = 1u64;
        for k in 0..n {
            exp[k] = x as u32;
            exp[k + n] = x as u32;
            log[x as usize] = k as u32;
            x = self.mul_generic(x, g);
        }
        MulTables { exp, log }
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn order(&self) -> u64 {
        self.0.order
    }

    /// Degree over the immediate base (1 for prime fields).
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    /// Degree over the prime field.
    pub fn abs_degree(&self) -> u32 {
        self.0.abs_degree
    }

    pub fn base(&self) -> Option<&Field> {
        self.0.base.as_ref()
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.base.is_none()
    }

    /// Fields from the prime field up to and including `self`.
    pub fn tower(&self) -> Vec<Field> {
        let mut out = vec![self.clone()];
        while let Some(b) = out.last().unwrap().base() {
            let b = b.clone();
            out.push(b);
        }
        out.reverse();
        out
    }

    /// True when `sub` is `self` or one of its (iterated) bases.
    pub fn contains_subfield(&self, sub: &Field) -> bool {
        let mut cur = Some(self);
        while let Some(f) = cur {
            if f == sub {
                return true;
            }
            cur = f.base();
        }
        false
    }

    /// `[self : sub]` for `sub` in the tower of `self`.
    pub fn degree_over(&self, sub: &Field) -> Result<u32> {
        if !self.contains_subfield(sub) {
            return Err(Error::NotInTower);
        }
        Ok(self.abs_degree() / sub.abs_degree())
    }

    pub fn element(&self, code: u64) -> Result<FieldElement> {
        if code >= self.order() {
            return Err(Error::InvalidInput(format!(
                "code {code} out of range for field of order {}",
                self.order()
            )));
        }
        Ok(FieldElement {
            field: self.clone(),
            code,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            code: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            code: 1,
        }
    }

    /// Residue class of the tower variable; `1, α, …, α^{m-1}` is a basis
    /// over the immediate base.
    pub fn generator(&self) -> Result<FieldElement> {
        let base = self.base().ok_or(Error::NotAnExtension)?;
        Ok(FieldElement {
            field: self.clone(),
            code: base.order(),
        })
    }

    // Raw arithmetic on codes. Callers guarantee codes are in range.

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let p = self.0.p;
        if p == 2 {
            return a ^ b;
        }
        if self.0.base.is_none() {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        if let Some(t) = &self.0.add_table {
            return t[(a * self.0.order + b) as usize] as u64;
        }
        self.add_digits(a, b)
    }

    fn add_digits(&self, mut a: u64, mut b: u64) -> u64 {
        let p = self.0.p;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.0.abs_degree {
            let s = (a % p + b % p) % p;
            out += s * place;
            place = place.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        let p = self.0.p;
        if p == 2 || a == 0 {
            return a;
        }
        if self.0.base.is_none() {
            return p - a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.0.abs_degree {
            out += ((p - a % p) % p) * place;
            place = place.wrapping_mul(p);
            a /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if let Some(t) = &self.0.tables {
            let k = t.log[a as usize] + t.log[b as usize];
            return t.exp[k as usize] as u64;
        }
        if self.0.base.is_none() {
            return ((a as u128 * b as u128) % self.0.p as u128) as u64;
        }
        self.mul_generic(a, b)
    }

    fn mul_generic(&self, a: u64, b: u64) -> u64 {
        let base = self.base().expect("extension field");
        let m = self.0.degree as usize;
        let s = base.order();
        let ac = digits(a, s, m);
        let bc = digits(b, s, m);
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in ac.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in bc.iter().enumerate() {
                prod[i + j] = base.add(prod[i + j], base.mul(x, y));
            }
        }
        let modulus = &self.0.modulus;
        for k in (m..2 * m - 1).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for t in 0..m {
                prod[k - m + t] = base.sub(prod[k - m + t], base.mul(c, modulus[t]));
            }
            prod[k] = 0;
        }
        undigits(&prod[..m], s)
    }

    pub fn pow(&self, a: u64, mut e: u128) -> u64 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.0.tables {
            let n = (self.0.order - 1) as u128;
            let k = (t.log[a as usize] as u128 * (e % n)) % n;
            return t.exp[k as usize] as u64;
        }
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.0.tables {
            let n = self.0.order - 1;
            let k = (n - t.log[a as usize] as u64) % n;
            return Ok(t.exp[k as usize] as u64);
        }
        Ok(self.pow(a, (self.0.order - 2) as u128))
    }

    /// Coordinates of `code` over the subfield `sub` in the tower basis.
    pub fn coords(&self, code: u64, sub: &Field) -> Result<Vec<u64>> {
        let k = self.degree_over(sub)? as usize;
        Ok(digits(code, sub.order(), k))
    }

    /// Inverse of [`Field::coords`].
    pub fn from_coords(&self, coords: &[u64], sub: &Field) -> Result<u64> {
        let k = self.degree_over(sub)? as usize;
        if coords.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "expected {k} coordinates, got {}",
                coords.len()
            )));
        }
        Ok(undigits(coords, sub.order()))
    }

    /// `Tr_{self/sub}(a) = Σ_{i<k} a^{s^i}` with `s = |sub|`.
    pub fn trace(&self, a: u64, sub: &Field) -> Result<u64> {
        let k = self.degree_over(sub)?;
        let s = sub.order() as u128;
        let mut acc = 0;
        let mut y = a;
        for _ in 0..k {
            acc = self.add(acc, y);
            y = self.pow(y, s);
        }
        debug_assert!(acc < sub.order());
        Ok(acc)
    }

    /// Nested little-endian coefficient lists down the tower.
    pub fn element_to_json(&self, code: u64) -> Value {
        match self.base() {
            None => json!(code),
            Some(b) => Value::Array(
                digits(code, b.order(), self.degree() as usize)
                    .into_iter()
                    .map(|c| b.element_to_json(c))
                    .collect(),
            ),
        }
    }

    pub fn element_from_json(&self, v: &Value) -> Result<u64> {
        match self.base() {
            None => {
                let c = v
                    .as_u64()
                    .filter(|&c| c < self.p())
                    .ok_or_else(|| Error::InvalidInput(format!("bad F_{} residue: {v}", self.p())))?;
                Ok(c)
            }
            Some(b) => {
                let arr = v
                    .as_array()
                    .filter(|a| a.len() == self.degree() as usize)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "expected {} coefficients, got {v}",
                            self.degree()
                        ))
                    })?;
                let cs = arr
                    .iter()
                    .map(|c| b.element_from_json(c))
                    .collect::<Result<Vec<_>>>()?;
                Ok(undigits(&cs, b.order()))
            }
        }
    }

    /// `{p, tower: [modulus, …]}` with moduli listed bottom-up, low-to-high.
    pub fn to_json(&self) -> Value {
        let tower: Vec<Value> = self
            .tower()
            .iter()
            .skip(1)
            .map(|f| {
                let b = f.base().unwrap();
                Value::Array(f.modulus().iter().map(|&c| b.element_to_json(c)).collect())
            })
            .collect();
        json!({ "p": self.p(), "tower": tower })
    }

    pub fn from_json(v: &Value) -> Result<Field> {
        let p = v
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidInput("field: missing p".into()))?;
        let mut f = Field::prime(p)?;
        if let Some(tower) = v.get("tower") {
            let tower = tower
                .as_array()
                .ok_or_else(|| Error::InvalidInput("field: tower must be an array".into()))?;
            for m in tower {
                let coeffs = m
                    .as_array()
                    .ok_or_else(|| Error::InvalidInput("field: modulus must be an array".into()))?
                    .iter()
                    .map(|c| f.element_from_json(c))
                    .collect::<Result<Vec<_>>>()?;
                f = Field::with_modulus(&f, coeffs)?;
            }
        }
        Ok(f)
    }
}

/// Base-`s` digits of `code`, least significant first.
pub(crate) fn digits(mut code: u64, s: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(code % s);
        code /= s;
    }
    out
}

pub(crate) fn undigits(ds: &[u64], s: u64) -> u64 {
    ds.iter().rev().fold(0, |acc, &d| acc * s + d)
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.0.p == other.0.p
            && self.0.order == other.0.order
            && self.0.modulus == other.0.modulus
            && self.0.base == other.0.base
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p(), self.abs_degree())?;
        if !self.is_prime_field() {
            write!(f, "{:?}", self.0.modulus)?;
        }
        Ok(())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

/// An element bound to its owning field.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    field: Field,
    code: u64,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn is_zero(&self) -> bool {
        self.code == 0
    }

    fn same(&self, other: &FieldElement) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields)
        }
    }

    fn with(&self, code: u64) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            code,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.with(self.field.add(self.code, other.code)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.with(self.field.sub(self.code, other.code)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        Ok(self.with(self.field.mul(self.code, other.code)))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.same(other)?;
        let inv = self.field.inv(other.code)?;
        Ok(self.with(self.field.mul(self.code, inv)))
    }

    pub fn neg(&self) -> FieldElement {
        self.with(self.field.neg(self.code))
    }

    pub fn inv(&self) -> Result<FieldElement> {
        Ok(self.with(self.field.inv(self.code)?))
    }

    pub fn pow(&self, e: u128) -> FieldElement {
        self.with(self.field.pow(self.code, e))
    }

    /// Coefficients over the immediate base (a single residue for prime fields).
    pub fn coefficients(&self) -> Vec<FieldElement> {
        match self.field.base() {
            None => vec![self.clone()],
            Some(b) => digits(self.code, b.order(), self.field.degree() as usize)
                .into_iter()
                .map(|c| FieldElement {
                    field: b.clone(),
                    code: c,
                })
                .collect(),
        }
    }

    pub fn trace(&self, down_to: &Field) -> Result<FieldElement> {
        let code = self.field.trace(self.code, down_to)?;
        down_to.element(code)
    }

    /// The same element viewed in an extension of its field.
    pub fn embed(&self, into: &Field) -> Result<FieldElement> {
        if !into.contains_subfield(&self.field) {
            return Err(Error::NotInTower);
        }
        Ok(FieldElement {
            field: into.clone(),
            code: self.code,
        })
    }

    pub fn to_json(&self) -> Value {
        self.field.element_to_json(self.code)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

/// `Tr_{self/sub}` of `x`.
pub fn relative_trace(x: &FieldElement, down_to: &Field) -> Result<FieldElement> {
    x.trace(down_to)
}
