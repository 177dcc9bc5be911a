//! Exact finite-field towers, multiplication tensors, analytic rank, and
//! machine-checkable rank/subrank certificates.

pub mod error;
pub mod field;
pub mod poly;

pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub mod linalg;
pub mod tensor;

pub use linalg::LinearMap;
pub use tensor::Tensor;
pub mod analytic;
pub mod bounds;
pub mod cert;
pub mod mult;
pub mod proofcheck;
pub mod stability;
pub mod suite;

pub use cert::{RankDecomposition, RestrictionCertificate, TensorSpec};
pub use mult::MultSpec;
