//! Exact linear algebra over GF(p) and the rationals.
//!
//! Everything downstream (hom spaces, structure maps, coends, ends) is built
//! from [`Mat`]. Bases are canonical: kernels and cokernels are read off the
//! reduced row echelon form, so repeated computations give identical bytes.

mod mat;
mod scalar;

pub use mat::{cokernel, kernel, kernel_basis, kron, mat_mul, Cokernel, Kernel, Mat};
pub use scalar::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} is too large")]
    ModulusTooLarge(u64),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    DimensionMismatch { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("parse error: {0}")]
    Parse(String),
}
