//! Dense matrices over a [`Field`] and exact Gaussian elimination.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;

/// A `rows × cols` matrix acting on coordinate column vectors.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearMap {
    field: Field,
    rows: usize,
    cols: usize,
    /// Row-major.
    entries: Vec<u64>,
}

impl LinearMap {
    pub fn new(field: &Field, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|&e| e >= field.order()) {
            return Err(Error::InvalidInput("matrix entry out of range".into()));
        }
        Ok(LinearMap {
            field: field.clone(),
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(field: &Field, rows: usize, cols: usize) -> Self {
        LinearMap {
            field: field.clone(),
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = LinearMap::zero(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<u64>]) -> Result<Self> {
        let cols = columns.len();
        let mut m = LinearMap::zero(field, rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::DimensionMismatch(format!(
                    "column {j} has length {}, expected {rows}",
                    c.len()
                )));
            }
            for (i, &v) in c.iter().enumerate() {
                m.entries[i * cols + j] = v;
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> LinearMap {
        let mut t = LinearMap::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} applied to {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        if self.field != other.field {
            return Err(Error::MixedFields);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = LinearMap::zero(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = f.add(out.get(i, j), f.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// The same matrix over an extension field.
    pub fn base_change(&self, into: &Field) -> Result<LinearMap> {
        if !into.contains_subfield(&self.field) {
            return Err(Error::NotInTower);
        }
        Ok(LinearMap {
            field: into.clone(),
            ..self.clone()
        })
    }

    pub fn rank(&self) -> usize {
        rank(&self.field, self.rows, self.cols, &self.entries)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| {
                Value::Array(
                    (0..self.cols)
                        .map(|j| self.field.element_to_json(self.get(i, j)))
                        .collect(),
                )
            })
            .collect();
        json!({ "rows": self.rows, "cols": self.cols, "entries": rows })
    }

    pub fn from_json(field: &Field, v: &Value) -> Result<LinearMap> {
        let dim = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::InvalidInput(format!("matrix: missing {k}")))
        };
        let (rows, cols) = (dim("rows")?, dim("cols")?);
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("matrix: missing entries".into()))?;
        if entries.len() != rows {
            return Err(Error::DimensionMismatch("matrix row count".into()));
        }
        let mut out = Vec::with_capacity(rows * cols);
        for r in entries {
            let r = r
                .as_array()
                .filter(|r| r.len() == cols)
                .ok_or_else(|| Error::DimensionMismatch("matrix row length".into()))?;
            for e in r {
                out.push(field.element_from_json(e)?);
            }
        }
        LinearMap::new(field, rows, cols, out)
    }
}

/// Reduces `m` (row-major, `rows × cols`) to row echelon form in place and
/// returns the pivot columns.
pub fn row_reduce(f: &Field, rows: usize, cols: usize, m: &mut [u64]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            m[r * cols + j] = f.mul(m[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = m[i * cols + c];
            if factor == 0 {
                continue;
            }
            for j in c..cols {
                let v = f.mul(factor, m[r * cols + j]);
                m[i * cols + j] = f.sub(m[i * cols + j], v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(f: &Field, rows: usize, cols: usize, m: &[u64]) -> usize {
    let mut work = m.to_vec();
    row_reduce(f, rows, cols, &mut work).len()
}

/// Some solution of `A x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &LinearMap, b: &[u64]) -> Option<Vec<u64>> {
    let (rows, cols) = (a.rows, a.cols);
    let f = &a.field;
    let w = cols + 1;
    let mut aug = vec![0u64; rows * w];
    for i in 0..rows {
        aug[i * w..i * w + cols].copy_from_slice(&a.entries[i * cols..(i + 1) * cols]);
        aug[i * w + cols] = b[i];
    }
    let pivots = row_reduce(f, rows, w, &mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![0u64; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[r * w + cols];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_over_f3() {
        let f3 = Field::prime(3).unwrap();
        // rows (1,2), (2,1): det = 1 - 4 = -3 = 0 mod 3
        assert_eq!(rank(&f3, 2, 2, &[1, 2, 2, 1]), 1);
        assert_eq!(rank(&f3, 2, 2, &[1, 0, 0, 1]), 2);
        assert_eq!(rank(&f3, 2, 3, &[0, 0, 0, 0, 0, 0]), 0);
    }

    #[test]
    fn solve_consistent_and_not() {
        let f5 = Field::prime(5).unwrap();
        let a = LinearMap::new(&f5, 2, 2, vec![1, 2, 3, 4]).unwrap();
        let x = solve(&a, &[1, 0]).unwrap();
        assert_eq!(a.apply(&x).unwrap(), vec![1, 0]);
        let sing = LinearMap::new(&f5, 2, 2, vec![1, 2, 2, 4]).unwrap();
        assert!(solve(&sing, &[1, 0]).is_none());
    }

    #[test]
    fn compose_matches_apply() {
        let f7 = Field::prime(7).unwrap();
        let a = LinearMap::new(&f7, 2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let b = LinearMap::new(&f7, 3, 1, vec![2, 0, 5]).unwrap();
        let ab = a.compose(&b).unwrap();
        assert_eq!(ab.apply(&[1]).unwrap(), a.apply(&b.apply(&[1]).unwrap()).unwrap());
    }
}
