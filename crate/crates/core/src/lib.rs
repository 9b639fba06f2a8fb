//! Exact computational engine for the C*-bialgebra `(O_*, Δ_φ)` assembled from
//! the Cuntz algebras `O_1 = C, O_2, O_3, ...`.
//!
//! The crate works entirely on the algebraic part: finite linear combinations
//! of normal-form monomials `s_u s_v*`, finite sums of tensors of such
//! monomials, and finitely supported vectors of `ℓ²(N)` tensor powers. On top
//! of that it builds the local R-matrix `R(ω₁, ω₂)` determined by
//!
//! ```text
//! R(ω₁,ω₂) Λ_{ω₁,ω₂}(Δ(x)) = Λ_{ω₁,ω₂}(Δ^op(x))
//! ```
//!
//! on finite-depth span bases, and verifies unitarity, intertwining,
//! inversion symmetry and the Yang–Baxter equation.
//!
//! Module map:
//!
//! * [`cuntz`]: words, monomials, elements of `O_n` and `O_*`, canonical equality.
//! * [`bialgebra`]: the embeddings `φ_{n,m}`, `Δ`, `Δ^op`, tensor elements, coassociativity.
//! * [`states`]: Cuntz-state vectors `ρ_z`, the `⋆` and `⊠` products, commutation tests.
//! * [`gns`]: permutative GNS representations, GNS maps and span bases.
//! * [`rmatrix`]: construction and verification of `R(ω₁, ω₂)`.

pub mod bialgebra;
pub mod cuntz;
mod error;
pub mod gns;
pub mod linalg;
pub mod report;
pub mod rmatrix;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Coefficients and amplitudes with modulus below this are dropped.
pub const ZERO_TOL: f64 = 1e-13;

/// Residual bound for coefficient-level equality after canonicalization.
pub const EQ_TOL: f64 = 1e-12;

/// Default pass threshold for operator-level verifications.
pub const VERIFY_TOL: f64 = 1e-9;

/// Rank threshold used when orthonormalizing span bases from their Gram matrix.
pub const RANK_TOL: f64 = 1e-10;

pub mod prelude {
    pub use crate::bialgebra::{
        check_coassoc, delta, delta_op, f_l, f_r, phi, TensorElement, TensorElement2,
        TensorElement3,
    };
    pub use crate::cuntz::{AlgebraElement, CuntzMonomial, CuntzWord, DirectSumElement};
    pub use crate::gns::{span_basis, FockVector, GpRepresentation, SpanBasis, Tensor2Vector};
    pub use crate::rmatrix::{apply_r, build_r, radix_swap_r, RMatrixOperator};
    pub use crate::states::{boxtimes, commutes, gp_eval, star, GpState, UnitVector};
    pub use crate::{Error, Result, C64};
}
