//! Structure tensors of `(d-1)`-ary multiplication `Mult_d(K/F)` and the
//! explicit restriction `Mult_d(F_{q^m}/F_q) ≤ Mult_d(F_{q^n}/F_q)` for
//! `n - 1 ≥ (d-1)(m-1)`.

use crate::cert::{RestrictionCertificate, TensorSpec};
use crate::error::{guard, Error, Result, OP_BUDGET};
use crate::field::Field;
use crate::linalg::LinearMap;
use crate::tensor::{advance, Tensor};

/// `Mult_d(top/base)`: the d-linear form
/// `(x_1, …, x_{d-1}, z) ↦ ⟨z, coords(x_1 ⋯ x_{d-1})⟩` over `base`, in the
/// tower basis of `top` over `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultSpec {
    base: Field,
    top: Field,
    d: usize,
}

impl MultSpec {
    pub fn new(base: &Field, top: &Field, d: usize) -> Result<MultSpec> {
        if d < 2 {
            return Err(Error::InvalidInput(format!("arity d must be >= 2, got {d}")));
        }
        if !top.contains_subfield(base) {
            return Err(Error::NotInTower);
        }
        Ok(MultSpec {
            base: base.clone(),
            top: top.clone(),
            d,
        })
    }

    /// `Mult_d(F_{q^n}/F_q)` with `F_q` built by [`Field::of_order`] and
    /// `F_{q^n}` its direct degree-`n` extension.
    pub fn standard(q: u64, n: u32, d: usize) -> Result<MultSpec> {
        let base = Field::of_order(q)?;
        let top = base.extend(n)?;
        MultSpec::new(&base, &top, d)
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn top(&self) -> &Field {
        &self.top
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// `[top : base]`.
    pub fn n(&self) -> usize {
        (self.top.abs_degree() / self.base.abs_degree()) as usize
    }

    /// Code of the `i`-th tower basis element of `top` over `base`.
    pub fn basis(&self, i: usize) -> u64 {
        self.base.order().pow(i as u32)
    }
}

pub fn mult_tensor(spec: &MultSpec) -> Result<Tensor> {
    let n = spec.n();
    let d = spec.d;
    guard("mult tensor entries", (n as u128).pow(d as u32), OP_BUDGET)?;
    let top = &spec.top;
    let basis: Vec<u64> = (0..n).map(|i| spec.basis(i)).collect();
    let mut coeffs = Vec::with_capacity(n.pow(d as u32));
    let mut idx = vec![0u64; d - 1];
    loop {
        let prod = idx
            .iter()
            .fold(1, |acc, &i| top.mul(acc, basis[i as usize]));
        coeffs.extend(top.coords(prod, &spec.base)?);
        if !advance(&mut idx, n as u64) {
            break;
        }
    }
    Tensor::new(&spec.base, vec![n; d], coeffs)
}

/// The linear maps `f: F_{q^m} → F_{q^n}` and `g: F_{q^n} → F_{q^m}` with
/// `f(α^i) = β^i` (`i < m`) and `g(β^i) = α^i` (`i < n`), as matrices over
/// `F_q` in the power bases.
#[derive(Clone, Debug)]
pub struct QmonMaps {
    pub base: Field,
    pub small: Field,
    pub large: Field,
    pub d: usize,
    pub f: LinearMap,
    pub g: LinearMap,
}

pub fn qmon_maps(q: u64, m: u32, n: u32, d: usize) -> Result<QmonMaps> {
    if d < 2 || m < 1 || n < 1 {
        return Err(Error::InvalidInput("need d >= 2, m >= 1, n >= 1".into()));
    }
    let lhs = n as u64 - 1;
    let rhs = (d as u64 - 1) * (m as u64 - 1);
    if lhs < rhs {
        return Err(Error::HypothesisViolated(format!(
            "n-1 >= (d-1)(m-1) fails: {lhs} < {rhs}"
        )));
    }
    let base = Field::of_order(q)?;
    let small = base.extend(m)?;
    let large = base.extend(n)?;
    let (m, n) = (m as usize, n as usize);
    let mut f = LinearMap::zero(&base, n, m);
    for i in 0..m {
        f.set(i, i, 1);
    }
    // For m = 1 any α ∈ F_q works; α = 0 makes g the constant-term projection.
    let alpha = if m == 1 { 0 } else { small.generator()?.code() };
    let columns = (0..n)
        .map(|i| small.coords(small.pow(alpha, i as u128), &base))
        .collect::<Result<Vec<_>>>()?;
    let g = LinearMap::from_columns(&base, m, &columns)?;
    Ok(QmonMaps {
        base,
        small,
        large,
        d,
        f,
        g,
    })
}

impl QmonMaps {
    /// Certificate maps `(f, …, f, gᵀ)`: the last leg of `Mult` carries
    /// coordinate functionals, so `⟨z, g(P)⟩ = ⟨gᵀ z, P⟩`.
    pub fn certificate(&self) -> Result<RestrictionCertificate> {
        let mut maps = vec![self.f.clone(); self.d - 1];
        maps.push(self.g.transpose());
        Ok(RestrictionCertificate {
            source: TensorSpec::Mult(MultSpec::new(&self.base, &self.large, self.d)?),
            target: TensorSpec::Mult(MultSpec::new(&self.base, &self.small, self.d)?),
            maps,
        })
    }

    /// Checks `g(f(x_1) ⋯ f(x_k)) = x_1 ⋯ x_k` for every tuple of elements
    /// of `F_{q^m}`, `k = d - 1`.
    pub fn check_all_products(&self) -> Result<bool> {
        let k = self.d - 1;
        let qm = self.small.order();
        guard(
            "qmon product enumeration",
            (qm as u128).saturating_pow(k as u32),
            OP_BUDGET,
        )?;
        let embed = |x: u64| -> Result<u64> {
            let c = self.small.coords(x, &self.base)?;
            self.large.from_coords(&self.f.apply(&c)?, &self.base)
        };
        let images = (0..qm).map(embed).collect::<Result<Vec<_>>>()?;
        let mut idx = vec![0u64; k];
        loop {
            let prod_large = idx
                .iter()
                .fold(1, |acc, &x| self.large.mul(acc, images[x as usize]));
            let pulled = self
                .g
                .apply(&self.large.coords(prod_large, &self.base)?)?;
            let lhs = self.small.from_coords(&pulled, &self.base)?;
            let rhs = idx.iter().fold(1, |acc, &x| self.small.mul(acc, x));
            if lhs != rhs {
                return Ok(false);
            }
            if !advance(&mut idx, qm) {
                return Ok(true);
            }
        }
    }
}

/// Builds the certificate `Mult_d(F_{q^m}/F_q) ≤ Mult_d(F_{q^n}/F_q)` and
/// checks it exactly, both as a coefficientwise restriction identity and
/// on every tuple of field elements.
pub fn verify_qmon(q: u64, m: u32, n: u32, d: usize) -> Result<RestrictionCertificate> {
    let maps = qmon_maps(q, m, n, d)?;
    let cert = maps.certificate()?;
    if !cert.verify()? {
        return Err(Error::CertificateInvalid(format!(
            "restriction identity fails for (q,m,n,d) = ({q},{m},{n},{d})"
        )));
    }
    if !maps.check_all_products()? {
        return Err(Error::CertificateInvalid(format!(
            "g(f(x_1)...f(x_k)) != x_1...x_k for (q,m,n,d) = ({q},{m},{n},{d})"
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mult2_is_identity() {
        for (q, n) in [(2, 3), (3, 2), (4, 2)] {
            let t = mult_tensor(&MultSpec::standard(q, n, 2).unwrap()).unwrap();
            let f = t.field().clone();
            assert_eq!(t, Tensor::diagonal(n as usize, 2, &f).unwrap());
        }
    }

    #[test]
    fn mult_n1_is_unit() {
        let t = mult_tensor(&MultSpec::standard(5, 1, 4).unwrap()).unwrap();
        assert_eq!(t.dims(), &[1, 1, 1, 1]);
        assert_eq!(t.coeffs(), &[1]);
    }

    #[test]
    fn mult3_f4_entries() {
        // α² = α + 1 in F_4, so T[1,1,0] = T[1,1,1] = 1.
        let t = mult_tensor(&MultSpec::standard(2, 2, 3).unwrap()).unwrap();
        assert_eq!(t.coeffs(), &[1, 0, 0, 1, 0, 1, 1, 1]);
    }

    #[test]
    fn qmon_hypothesis() {
        assert!(matches!(
            qmon_maps(2, 3, 3, 3),
            Err(Error::HypothesisViolated(_))
        ));
        let m = qmon_maps(2, 2, 3, 3).unwrap();
        assert_eq!(m.g.compose(&m.f).unwrap(), LinearMap::identity(&m.base, 2));
        // f sends 1 ↦ 1 and α ↦ β.
        assert_eq!(m.f.column(0), vec![1, 0, 0]);
        assert_eq!(m.f.column(1), vec![0, 1, 0]);
        assert!(m.check_all_products().unwrap());
    }

    #[test]
    fn qmon_d2_is_left_inverse() {
        for n in 2..5 {
            let m = qmon_maps(3, 2, n, 2).unwrap();
            assert_eq!(m.g.compose(&m.f).unwrap(), LinearMap::identity(&m.base, 2));
        }
    }

    #[test]
    fn qmon_certificates() {
        assert!(verify_qmon(2, 2, 3, 3).is_ok());
        assert!(verify_qmon(3, 2, 4, 4).is_ok());
        // m = n with d = 3 is outside the hypothesis even though identity
        // maps would do.
        assert!(matches!(
            verify_qmon(2, 2, 2, 3),
            Err(Error::HypothesisViolated(_))
        ));
        let c = verify_qmon(2, 2, 2, 2).unwrap();
        assert_eq!(c.maps[0], LinearMap::identity(c.source.field(), 2));
        assert_eq!(c.maps[1], LinearMap::identity(c.source.field(), 2));
    }
}
