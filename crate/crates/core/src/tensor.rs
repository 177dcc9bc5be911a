//! Dense order-d tensors, viewed as d-linear forms over a field.
//!
//! Coefficients are stored row-major with leg 0 slowest. A tensor `T` with
//! dims `(n_1, …, n_d)` represents the form
//! `T(x_1, …, x_d) = Σ_i T[i_1, …, i_d] Π_j x_j[i_j]`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::LinearMap;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tensor {
    field: Field,
    dims: Vec<usize>,
    coeffs: Vec<u64>,
}

/// `Σ_i x[i] · data[i*block .. (i+1)*block]`, contracting the slowest leg.
pub(crate) fn contract_front(f: &Field, data: &[u64], x: &[u64], out: &mut Vec<u64>) {
    let block = if x.is_empty() { 0 } else { data.len() / x.len() };
    out.clear();
    out.resize(block, 0);
    for (i, &xi) in x.iter().enumerate() {
        if xi == 0 {
            continue;
        }
        let chunk = &data[i * block..(i + 1) * block];
        if xi == 1 {
            for (o, &c) in out.iter_mut().zip(chunk) {
                *o = f.add(*o, c);
            }
        } else {
            for (o, &c) in out.iter_mut().zip(chunk) {
                *o = f.add(*o, f.mul(xi, c));
            }
        }
    }
}

impl Tensor {
    pub fn new(field: &Field, dims: Vec<usize>, coeffs: Vec<u64>) -> Result<Tensor> {
        if dims.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "tensor order must be at least 2, got {}",
                dims.len()
            )));
        }
        let len: usize = dims.iter().product();
        if coeffs.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "dims {dims:?} need {len} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= field.order()) {
            return Err(Error::InvalidInput("coefficient out of range".into()));
        }
        Ok(Tensor {
            field: field.clone(),
            dims,
            coeffs,
        })
    }

    pub fn zeros(field: &Field, dims: Vec<usize>) -> Result<Tensor> {
        let len = dims.iter().product();
        Tensor::new(field, dims, vec![0; len])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.dims)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn get(&self, idx: &[usize]) -> u64 {
        self.coeffs[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: u64) {
        let o = self.offset(idx);
        self.coeffs[o] = v;
    }

    fn check_vectors(&self, xs: &[Vec<u64>], skip: Option<usize>) -> Result<()> {
        if xs.len() != self.dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for an order-{} tensor",
                xs.len(),
                self.dims.len()
            )));
        }
        for (j, (x, &n)) in xs.iter().zip(&self.dims).enumerate() {
            if Some(j) == skip {
                continue;
            }
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "leg {j} has dimension {n}, vector has length {}",
                    x.len()
                )));
            }
            if x.iter().any(|&c| c >= self.field.order()) {
                return Err(Error::InvalidInput("vector entry out of range".into()));
            }
        }
        Ok(())
    }

    /// Value of the d-linear form at `(x_1, …, x_d)`.
    pub fn evaluate(&self, xs: &[Vec<u64>]) -> Result<u64> {
        self.check_vectors(xs, None)?;
        let f = &self.field;
        let mut cur = self.coeffs.clone();
        let mut next = Vec::new();
        for x in xs {
            contract_front(f, &cur, x, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur.first().copied().unwrap_or(0))
    }

    /// Coefficients of the linear functional obtained by fixing every leg
    /// except `pivot`. The entry of `fixed` at `pivot` is ignored.
    pub fn slice_form(&self, pivot: usize, fixed: &[Vec<u64>]) -> Result<Vec<u64>> {
        if pivot >= self.order() {
            return Err(Error::DimensionMismatch(format!("no leg {pivot}")));
        }
        self.check_vectors(fixed, Some(pivot))?;
        let f = &self.field;
        let moved = self.move_leg_last(pivot);
        let mut cur = moved.coeffs;
        let mut next = Vec::new();
        for (j, x) in fixed.iter().enumerate() {
            if j == pivot {
                continue;
            }
            contract_front(f, &cur, x, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }

    /// Reorders legs so that `leg` becomes the last one.
    pub fn move_leg_last(&self, leg: usize) -> Tensor {
        let mut perm: Vec<usize> = (0..self.order()).filter(|&j| j != leg).collect();
        perm.push(leg);
        self.permute(&perm)
    }

    /// Tensor `S` with `S[i_0, …] = T[i_{perm^{-1}}]`, i.e. leg `k` of the
    /// result is leg `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Tensor {
        let dims: Vec<usize> = perm.iter().map(|&j| self.dims[j]).collect();
        let len = self.coeffs.len();
        let mut coeffs = vec![0u64; len];
        let d = self.order();
        let mut idx = vec![0usize; d];
        let mut src = vec![0usize; d];
        for c in coeffs.iter_mut() {
            for (k, &j) in perm.iter().enumerate() {
                src[j] = idx[k];
            }
            *c = self.get(&src);
            for k in (0..d).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Tensor {
            field: self.field.clone(),
            dims,
            coeffs,
        }
    }

    /// `S(y_1, …, y_d) = T(A_1 y_1, …, A_d y_d)`.
    pub fn restrict(&self, maps: &[LinearMap]) -> Result<Tensor> {
        if maps.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} maps for an order-{} tensor",
                maps.len(),
                self.order()
            )));
        }
        for (j, a) in maps.iter().enumerate() {
            if a.field() != &self.field {
                return Err(Error::MixedFields);
            }
            if a.rows() != self.dims[j] {
                return Err(Error::DimensionMismatch(format!(
                    "map {j} has {} rows, leg has dimension {}",
                    a.rows(),
                    self.dims[j]
                )));
            }
        }
        let mut cur = self.clone();
        for (j, a) in maps.iter().enumerate() {
            cur = cur.apply_leg(j, a);
        }
        Ok(cur)
    }

    /// Replaces leg `leg` (dim `n`) by `a.cols()`: `S[.., k, ..] = Σ_i T[.., i, ..] a[i, k]`.
    fn apply_leg(&self, leg: usize, a: &LinearMap) -> Tensor {
        let f = &self.field;
        let outer: usize = self.dims[..leg].iter().product();
        let inner: usize = self.dims[leg + 1..].iter().product();
        let n = self.dims[leg];
        let m = a.cols();
        let mut coeffs = vec![0u64; outer * m * inner];
        for o in 0..outer {
            for i in 0..n {
                let src = &self.coeffs[(o * n + i) * inner..(o * n + i + 1) * inner];
                if src.iter().all(|&c| c == 0) {
                    continue;
                }
                for k in 0..m {
                    let w = a.get(i, k);
                    if w == 0 {
                        continue;
                    }
                    let dst = &mut coeffs[(o * m + k) * inner..(o * m + k + 1) * inner];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d = f.add(*d, f.mul(w, s));
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims[leg] = m;
        Tensor {
            field: f.clone(),
            dims,
            coeffs,
        }
    }

    /// The natural image of `self` over an extension field.
    pub fn base_change(&self, into: &Field) -> Result<Tensor> {
        if !into.contains_subfield(&self.field) {
            return Err(Error::NotInTower);
        }
        Ok(Tensor {
            field: into.clone(),
            dims: self.dims.clone(),
            coeffs: self.coeffs.clone(),
        })
    }

    /// Unit tensor `⟨r⟩` of order `d`. `r = 0` gives the empty tensor.
    pub fn diagonal(r: usize, d: usize, field: &Field) -> Result<Tensor> {
        if d < 2 {
            return Err(Error::InvalidInput("tensor order must be at least 2".into()));
        }
        let mut t = Tensor::zeros(field, vec![r; d])?;
        for i in 0..r {
            t.set(&vec![i; d], 1);
        }
        Ok(t)
    }

    /// Block-diagonal sum with `self` in the leading block.
    pub fn direct_sum(&self, other: &Tensor) -> Result<Tensor> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch(self.order(), other.order()));
        }
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        let dims: Vec<usize> = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        let mut out = Tensor::zeros(&self.field, dims)?;
        for_each_index(&self.dims, |idx| {
            out.set(idx, self.get(idx));
        });
        for_each_index(&other.dims, |idx| {
            let shifted: Vec<usize> = idx.iter().zip(&self.dims).map(|(i, n)| i + n).collect();
            out.set(&shifted, other.get(idx));
        });
        Ok(out)
    }

    /// Sum of two tensors of identical shape.
    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(Tensor {
            field: f.clone(),
            dims: self.dims.clone(),
            coeffs,
        })
    }

    /// Outer product `v_1 ⊗ ⋯ ⊗ v_d`.
    pub fn outer(field: &Field, vectors: &[Vec<u64>]) -> Result<Tensor> {
        let dims: Vec<usize> = vectors.iter().map(Vec::len).collect();
        let mut t = Tensor::new(field, dims.clone(), vec![0; dims.iter().product()])?;
        accumulate_outer(field, &mut t.coeffs, vectors);
        Ok(t)
    }

    /// Matrix of the flattening that groups `leg` against all other legs.
    pub fn flattening(&self, leg: usize) -> LinearMap {
        let moved = self.move_leg_last(leg);
        let n = self.dims[leg];
        let rest = if n == 0 { 0 } else { self.coeffs.len() / n };
        LinearMap::new(&self.field, rest, n, moved.coeffs)
            .expect("consistent dimensions")
            .transpose()
    }

    /// Largest flattening rank over all legs; a lower bound on tensor rank.
    pub fn flattening_rank(&self) -> usize {
        (0..self.order())
            .map(|j| self.flattening(j).rank())
            .max()
            .unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "field": self.field.to_json(),
            "dims": self.dims,
            "coeffs": self
                .coeffs
                .iter()
                .map(|&c| self.field.element_to_json(c))
                .collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Tensor> {
        let field = Field::from_json(
            v.get("field")
                .ok_or_else(|| Error::InvalidInput("tensor: missing field".into()))?,
        )?;
        let dims = v
            .get("dims")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("tensor: missing dims".into()))?
            .iter()
            .map(|d| {
                d.as_u64()
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidInput("tensor: bad dim".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let coeffs = v
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("tensor: missing coeffs".into()))?
            .iter()
            .map(|c| field.element_from_json(c))
            .collect::<Result<Vec<_>>>()?;
        Tensor::new(&field, dims, coeffs)
    }
}

/// Adds `v_1 ⊗ ⋯ ⊗ v_d` into a row-major coefficient buffer.
pub(crate) fn accumulate_outer(f: &Field, coeffs: &mut [u64], vectors: &[Vec<u64>]) {
    let mut partial = vec![1u64];
    for v in vectors {
        let mut next = Vec::with_capacity(partial.len() * v.len());
        for &a in &partial {
            for &b in v {
                next.push(f.mul(a, b));
            }
        }
        partial = next;
    }
    for (c, p) in coeffs.iter_mut().zip(partial) {
        *c = f.add(*c, p);
    }
}

/// Calls `visit` on every multi-index of the given shape in row-major order.
pub fn for_each_index(dims: &[usize], mut visit: impl FnMut(&[usize])) {
    if dims.iter().any(|&n| n == 0) {
        return;
    }
    let mut idx = vec![0usize; dims.len()];
    loop {
        visit(&idx);
        let mut k = dims.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Steps `v` to the next vector of `F_q^n` in code order (last coordinate
/// fastest). Returns `false` after wrapping around to zero.
pub fn advance(v: &mut [u64], q: u64) -> bool {
    for k in (0..v.len()).rev() {
        v[k] += 1;
        if v[k] < q {
            return true;
        }
        v[k] = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn diagonal_evaluates_to_single_term() {
        let t = Tensor::diagonal(2, 3, &f(2)).unwrap();
        assert_eq!(t.evaluate(&[vec![1, 0], vec![1, 0], vec![1, 0]]).unwrap(), 1);
        assert_eq!(t.evaluate(&[vec![0, 0], vec![1, 1], vec![1, 1]]).unwrap(), 0);
        let one = Tensor::diagonal(1, 3, &f(2)).unwrap();
        assert_eq!(one.coeffs(), &[1]);
        let id = Tensor::diagonal(2, 2, &f(3)).unwrap();
        assert_eq!(id.coeffs(), &[1, 0, 0, 1]);
        let empty = Tensor::diagonal(0, 3, &f(3)).unwrap();
        assert_eq!(empty.dims(), &[0, 0, 0]);
    }

    #[test]
    fn slice_form_of_identity() {
        let id = Tensor::diagonal(2, 2, &f(2)).unwrap();
        assert_eq!(id.slice_form(0, &[vec![], vec![1, 0]]).unwrap(), vec![1, 0]);
        let z = Tensor::zeros(&f(3), vec![2, 3]).unwrap();
        assert_eq!(z.slice_form(1, &[vec![2, 1], vec![]]).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn restrict_identity_and_zero_maps() {
        let f3 = f(3);
        let t = Tensor::new(&f3, vec![2, 2, 2], vec![0, 1, 2, 0, 1, 1, 2, 2]).unwrap();
        let ids = vec![LinearMap::identity(&f3, 2); 3];
        assert_eq!(t.restrict(&ids).unwrap(), t);
        let mut maps = ids.clone();
        maps[1] = LinearMap::zero(&f3, 2, 2);
        assert!(t.restrict(&maps).unwrap().is_zero());
        maps[1] = LinearMap::zero(&f3, 3, 2);
        assert!(matches!(t.restrict(&maps), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn direct_sum_of_units() {
        let f2 = f(2);
        let one = Tensor::diagonal(1, 3, &f2).unwrap();
        assert_eq!(one.direct_sum(&one).unwrap(), Tensor::diagonal(2, 3, &f2).unwrap());
        let empty = Tensor::diagonal(0, 3, &f2).unwrap();
        let t = Tensor::new(&f2, vec![1, 2, 1], vec![1, 1]).unwrap();
        assert_eq!(t.direct_sum(&empty).unwrap(), t);
        let m = Tensor::diagonal(1, 2, &f2).unwrap();
        assert_eq!(one.direct_sum(&m).unwrap_err(), Error::OrderMismatch(3, 2));
    }

    #[test]
    fn evaluate_rejects_bad_lengths() {
        let t = Tensor::diagonal(2, 2, &f(2)).unwrap();
        assert!(matches!(
            t.evaluate(&[vec![1], vec![1, 0]]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn flattening_rank_of_unit() {
        let t = Tensor::diagonal(3, 3, &f(5)).unwrap();
        assert_eq!(t.flattening_rank(), 3);
    }
}
