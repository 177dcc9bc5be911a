//! Rank decompositions and restriction certificates, their exact verifiers,
//! and their JSON wire format.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::LinearMap;
use crate::mult::{mult_tensor, MultSpec};
use crate::tensor::{accumulate_outer, Tensor};

/// A tensor named either by construction or by value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TensorSpec {
    Mult(MultSpec),
    Diagonal { field: Field, r: usize, d: usize },
    Explicit(Tensor),
}

impl TensorSpec {
    pub fn field(&self) -> &Field {
        match self {
            TensorSpec::Mult(s) => s.base(),
            TensorSpec::Diagonal { field, .. } => field,
            TensorSpec::Explicit(t) => t.field(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        match self {
            TensorSpec::Mult(s) => vec![s.n(); s.d()],
            TensorSpec::Diagonal { r, d, .. } => vec![*r; *d],
            TensorSpec::Explicit(t) => t.dims().to_vec(),
        }
    }

    pub fn materialize(&self) -> Result<Tensor> {
        match self {
            TensorSpec::Mult(s) => mult_tensor(s),
            TensorSpec::Diagonal { field, r, d } => Tensor::diagonal(*r, *d, field),
            TensorSpec::Explicit(t) => Ok(t.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TensorSpec::Mult(s) => json!({
                "kind": "mult",
                "field": s.top().to_json(),
                "base_degree": s.base().abs_degree(),
                "d": s.d(),
            }),
            TensorSpec::Diagonal { field, r, d } => json!({
                "kind": "diagonal",
                "field": field.to_json(),
                "r": r,
                "d": d,
            }),
            TensorSpec::Explicit(t) => json!({ "kind": "tensor", "tensor": t.to_json() }),
        }
    }

    pub fn from_json(v: &Value) -> Result<TensorSpec> {
        let bad = |m: &str| Error::InvalidInput(format!("tensor spec: {m}"));
        let uint = |k: &str| {
            v.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(&format!("missing {k}")))
        };
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| bad("missing kind"))?;
        match kind {
            "mult" => {
                let top = Field::from_json(v.get("field").ok_or_else(|| bad("missing field"))?)?;
                let k = uint("base_degree")? as u32;
                let base = top
                    .tower()
                    .into_iter()
                    .find(|f| f.abs_degree() == k)
                    .ok_or(Error::NotInTower)?;
                Ok(TensorSpec::Mult(MultSpec::new(&base, &top, uint("d")? as usize)?))
            }
            "diagonal" => {
                let field = Field::from_json(v.get("field").ok_or_else(|| bad("missing field"))?)?;
                Ok(TensorSpec::Diagonal {
                    field,
                    r: uint("r")? as usize,
                    d: uint("d")? as usize,
                })
            }
            "tensor" => Ok(TensorSpec::Explicit(Tensor::from_json(
                v.get("tensor").ok_or_else(|| bad("missing tensor"))?,
            )?)),
            other => Err(bad(&format!("unknown kind {other}"))),
        }
    }
}

/// A list of rank-one terms whose sum should equal the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecomposition {
    pub target: TensorSpec,
    /// Each term is one coordinate vector per leg.
    pub terms: Vec<Vec<Vec<u64>>>,
}

impl RankDecomposition {
    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn field(&self) -> &Field {
        self.target.field()
    }

    /// Sum of the rank-one terms as a dense tensor.
    pub fn materialize(&self) -> Result<Tensor> {
        let dims = self.target.dims();
        self.check_shapes(&dims)?;
        let f = self.field();
        let mut coeffs = vec![0u64; dims.iter().product()];
        for term in &self.terms {
            accumulate_outer(f, &mut coeffs, term);
        }
        Tensor::new(f, dims, coeffs)
    }

    fn check_shapes(&self, dims: &[usize]) -> Result<()> {
        for (t, term) in self.terms.iter().enumerate() {
            let lens: Vec<usize> = term.iter().map(Vec::len).collect();
            if lens != dims {
                return Err(Error::DimensionMismatch(format!(
                    "term {t} has shape {lens:?}, target has {dims:?}"
                )));
            }
            if term.iter().flatten().any(|&c| c >= self.field().order()) {
                return Err(Error::InvalidInput(format!("term {t}: entry out of range")));
            }
        }
        Ok(())
    }

    pub fn verify(&self) -> Result<bool> {
        verify_decomposition(&self.target.materialize()?, self)
    }

    pub fn to_json(&self) -> Value {
        let f = self.field();
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|term| {
                Value::Array(
                    term.iter()
                        .map(|v| Value::Array(v.iter().map(|&c| f.element_to_json(c)).collect()))
                        .collect(),
                )
            })
            .collect();
        json!({ "type": "rank_decomposition", "target": self.target.to_json(), "rank": self.terms.len(), "terms": terms })
    }

    pub fn from_json(v: &Value) -> Result<RankDecomposition> {
        let target = TensorSpec::from_json(
            v.get("target")
                .ok_or_else(|| Error::InvalidInput("decomposition: missing target".into()))?,
        )?;
        let f = target.field().clone();
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("decomposition: missing terms".into()))?
            .iter()
            .map(|term| {
                term.as_array()
                    .ok_or_else(|| Error::InvalidInput("decomposition: term must be an array".into()))?
                    .iter()
                    .map(|vec| {
                        vec.as_array()
                            .ok_or_else(|| Error::InvalidInput("decomposition: bad vector".into()))?
                            .iter()
                            .map(|c| f.element_from_json(c))
                            .collect::<Result<Vec<u64>>>()
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RankDecomposition { target, terms })
    }
}

/// Exact check that the terms of `dec` sum to `t`.
pub fn verify_decomposition(t: &Tensor, dec: &RankDecomposition) -> Result<bool> {
    if dec.field() != t.field() {
        return Err(Error::MixedFields);
    }
    if dec.target.dims() != t.dims() {
        return Err(Error::DimensionMismatch(format!(
            "decomposition shape {:?} vs tensor {:?}",
            dec.target.dims(),
            t.dims()
        )));
    }
    Ok(&dec.materialize()? == t)
}

/// Maps `A_1..A_d` with `restrict(source, A) = target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionCertificate {
    pub source: TensorSpec,
    pub target: TensorSpec,
    pub maps: Vec<LinearMap>,
}

impl RestrictionCertificate {
    pub fn verify(&self) -> Result<bool> {
        verify_restriction(self)
    }

    /// Size of the unit tensor certified, when the target is diagonal.
    pub fn diagonal_size(&self) -> Option<usize> {
        match &self.target {
            TensorSpec::Diagonal { r, .. } => Some(*r),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "type": "restriction_certificate",
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "maps": self.maps.iter().map(LinearMap::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<RestrictionCertificate> {
        let spec = |k: &str| {
            TensorSpec::from_json(
                v.get(k)
                    .ok_or_else(|| Error::InvalidInput(format!("certificate: missing {k}")))?,
            )
        };
        let source = spec("source")?;
        let target = spec("target")?;
        let f = source.field().clone();
        let maps = v
            .get("maps")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidInput("certificate: missing maps".into()))?
            .iter()
            .map(|m| LinearMap::from_json(&f, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(RestrictionCertificate {
            source,
            target,
            maps,
        })
    }
}

/// Exact check of `restrict(source, maps) = target`.
pub fn verify_restriction(c: &RestrictionCertificate) -> Result<bool> {
    let source = c.source.materialize()?;
    let target = c.target.materialize()?;
    if source.field() != target.field() {
        return Err(Error::MixedFields);
    }
    let restricted = source.restrict(&c.maps)?;
    if restricted.dims() != target.dims() {
        return Err(Error::DimensionMismatch(format!(
            "restriction has shape {:?}, target {:?}",
            restricted.dims(),
            target.dims()
        )));
    }
    Ok(restricted == target)
}

/// Either kind of certificate, as read from a file.
#[derive(Clone, Debug)]
pub enum Certificate {
    Rank(RankDecomposition),
    Restriction(RestrictionCertificate),
}

impl Certificate {
    pub fn from_json(v: &Value) -> Result<Certificate> {
        match v.get("type").and_then(Value::as_str) {
            Some("rank_decomposition") => Ok(Certificate::Rank(RankDecomposition::from_json(v)?)),
            Some("restriction_certificate") => Ok(Certificate::Restriction(
                RestrictionCertificate::from_json(v)?,
            )),
            _ if v.get("terms").is_some() => Ok(Certificate::Rank(RankDecomposition::from_json(v)?)),
            _ if v.get("maps").is_some() => Ok(Certificate::Restriction(
                RestrictionCertificate::from_json(v)?,
            )),
            _ => Err(Error::InvalidInput("unrecognized certificate".into())),
        }
    }

    pub fn verify(&self) -> Result<bool> {
        match self {
            Certificate::Rank(d) => d.verify(),
            Certificate::Restriction(c) => c.verify(),
        }
    }
}
