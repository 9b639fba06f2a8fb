use thiserror::Error;

use crate::cuntz::CuntzMonomial;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mismatched algebras: O_{left} vs O_{right}")]
    MismatchedAlgebra { left: usize, right: usize },

    #[error("generator index {letter} is out of range for O_{n}")]
    BadLetter { n: usize, letter: usize },

    #[error("algebra index must be at least 1")]
    ZeroIndex,

    #[error("target level {target} is below annihilation length {found}")]
    BadLevel { target: usize, found: usize },

    #[error("O_{n} does not factor as O_{left} ⊗ O_{right}")]
    BadFactorization { n: usize, left: usize, right: usize },

    #[error("vector is not a unit vector (|z|² = {norm_sqr})")]
    NotUnitVector { norm_sqr: f64 },

    #[error("matrix is not unitary (defect {defect:e})")]
    NotUnitary { defect: f64 },

    #[error("states do not commute under ⋆, witness {witness}")]
    NotCommuting { witness: Box<CuntzMonomial> },

    #[error("Gram mismatch at ({x}, {y}), residual {residual:e}")]
    GramMismatch {
        x: Box<CuntzMonomial>,
        y: Box<CuntzMonomial>,
        residual: f64,
    },

    #[error("vector is outside the span basis (residual {residual:e})")]
    OutOfDomain { residual: f64 },

    #[error("R-matrix built at depth {built}, but depth {required} is required")]
    InsufficientDepth { required: usize, built: usize },

    #[error("cannot parse monomial {0:?}")]
    Parse(String),
}
