//! Cuntz states `ρ_z` parametrized by unit vectors, and their products.
//!
//! For `z ∈ S(C^n)`,
//!
//! ```text
//! ρ_z(s_{j_1} ⋯ s_{j_a} s_{k_b}* ⋯ s_{k_1}*) = z̄_{j_1} ⋯ z̄_{j_a} z_{k_b} ⋯ z_{k_1}
//! ```
//!
//! with empty products equal to 1. The empty-word cases are forced by the
//! state property: `ρ_z(s_u) = Σ_k ρ_z(s_u s_k s_k*) = z̄_u Σ_k |z_k|²`.
//!
//! The `⋆` product `(ω ⊗ ψ) ∘ Δ` is kept lazily as [`StateFunctional::Star`];
//! on Cuntz states it agrees with `ρ_{z ⊠ y}`, which the tests check rather
//! than assume.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bialgebra::phi;
use crate::cuntz::{monomials_up_to, AlgebraElement, CuntzMonomial};
use crate::linalg::unitarity_defect;
use crate::{Error, Result, C64};

/// Norm tolerance for unit vectors.
pub const UNIT_TOL: f64 = 1e-12;

/// Unitarity tolerance for twisting matrices.
pub const UNITARY_TOL: f64 = 1e-10;

/// A unit vector of `C^n`. For `n = 1` the only admissible vector is `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVector {
    components: Vec<C64>,
}

impl UnitVector {
    pub fn new(components: Vec<C64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::ZeroIndex);
        }
        let norm_sqr: f64 = components.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector { norm_sqr });
        }
        if components.len() == 1 && (components[0] - C64::new(1.0, 0.0)).norm() > UNIT_TOL {
            // S(C^1) = {1}
            return Err(Error::NotUnitVector { norm_sqr });
        }
        Ok(Self { components })
    }

    /// Normalizes a nonzero vector.
    pub fn normalized(components: Vec<C64>) -> Result<Self> {
        let norm = components.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotUnitVector { norm_sqr: 0.0 });
        }
        Self::new(components.into_iter().map(|c| c / norm).collect())
    }

    /// The standard basis vector `e_k` of `C^n` (1-based).
    pub fn standard(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "basis index out of range");
        let mut components = vec![C64::new(0.0, 0.0); n];
        components[k - 1] = C64::new(1.0, 0.0);
        Self { components }
    }

    /// `(1/√n, ..., 1/√n)`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1);
        let c = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        Self {
            components: vec![c; n],
        }
    }

    /// Haar-distributed random unit vector (Gaussian then normalize).
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Self {
        if n == 1 {
            return Self::standard(1, 1);
        }
        loop {
            let v: Vec<C64> = (0..n)
                .map(|_| C64::new(gaussian(rng), gaussian(rng)))
                .collect();
            if let Ok(z) = Self::normalized(v) {
                return z;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[C64] {
        &self.components
    }

    /// `z_k`, 1-based.
    pub fn get(&self, k: usize) -> C64 {
        self.components[k - 1]
    }

    pub fn is_standard_first(&self) -> bool {
        self.components[0] == C64::new(1.0, 0.0)
            && self.components[1..]
                .iter()
                .all(|c| *c == C64::new(0.0, 0.0))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// `(z ⊠ y)_{m(i-1)+j} = z_i y_j`.
pub fn boxtimes(z: &UnitVector, y: &UnitVector) -> UnitVector {
    let components = z
        .components
        .iter()
        .flat_map(|zi| y.components.iter().map(move |yj| zi * yj))
        .collect();
    UnitVector { components }
}

/// `ρ_z(x)`.
pub fn gp_eval(z: &UnitVector, x: &AlgebraElement) -> Result<C64> {
    if z.n() != x.n() {
        return Err(Error::MismatchedAlgebra {
            left: z.n(),
            right: x.n(),
        });
    }
    Ok(x.terms().map(|(m, &c)| c * gp_eval_monomial(z, m)).sum())
}

pub fn gp_eval_monomial(z: &UnitVector, m: &CuntzMonomial) -> C64 {
    let create: C64 = m
        .creation()
        .letters()
        .iter()
        .map(|&j| z.get(j).conj())
        .product();
    let annihilate: C64 = m
        .annihilation()
        .letters()
        .iter()
        .map(|&k| z.get(k))
        .product();
    create * annihilate
}

/// The Cuntz state `ρ_z`.
#[derive(Clone, Debug, PartialEq)]
pub struct GpState {
    z: UnitVector,
}

impl GpState {
    pub fn new(z: UnitVector) -> Self {
        Self { z }
    }

    /// `ω_n`, the vector state of `e_1` in the permutative representation.
    pub fn standard(n: usize) -> Self {
        Self::new(UnitVector::standard(n, 1))
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(UnitVector::uniform(n))
    }

    pub fn n(&self) -> usize {
        self.z.n()
    }

    pub fn vector(&self) -> &UnitVector {
        &self.z
    }

    pub fn eval(&self, x: &AlgebraElement) -> Result<C64> {
        gp_eval(&self.z, x)
    }

    pub fn eval_monomial(&self, m: &CuntzMonomial) -> C64 {
        gp_eval_monomial(&self.z, m)
    }
}

/// A state of some `O_n`, either a Cuntz state or a lazy `⋆` product.
#[derive(Clone, Debug, PartialEq)]
pub enum StateFunctional {
    Gp(GpState),
    Star(Box<StateFunctional>, Box<StateFunctional>),
}

impl StateFunctional {
    pub fn n(&self) -> usize {
        match self {
            Self::Gp(s) => s.n(),
            Self::Star(l, r) => l.n() * r.n(),
        }
    }

    pub fn eval(&self, x: &AlgebraElement) -> Result<C64> {
        match self {
            Self::Gp(s) => s.eval(x),
            Self::Star(l, r) => {
                let t = phi(l.n(), r.n(), x)?;
                let mut acc = C64::new(0.0, 0.0);
                for ([a, b], &c) in t.terms() {
                    acc += c
                        * l.eval(&AlgebraElement::from(a.clone()))?
                        * r.eval(&AlgebraElement::from(b.clone()))?;
                }
                Ok(acc)
            }
        }
    }

    pub fn eval_monomial(&self, m: &CuntzMonomial) -> Result<C64> {
        self.eval(&AlgebraElement::from(m.clone()))
    }
}

impl From<GpState> for StateFunctional {
    fn from(s: GpState) -> Self {
        Self::Gp(s)
    }
}

/// `ω ⋆ ψ = (ω ⊗ ψ) ∘ φ_{n,m}`, a state of `O_{nm}`.
pub fn star(omega: StateFunctional, psi: StateFunctional) -> StateFunctional {
    StateFunctional::Star(Box::new(omega), Box::new(psi))
}

/// Outcome of [`commutes`].
#[derive(Clone, Debug, PartialEq)]
pub struct Commutation {
    pub commutes: bool,
    /// A monomial with `(ω ⋆ ψ)(x) ≠ (ψ ⋆ ω)(x)` when the states do not commute.
    pub witness: Option<CuntzMonomial>,
}

/// Longest monomial scanned when searching for a non-commutation witness.
const WITNESS_SEARCH_LEN: usize = 2;

/// Whether `ρ_z ⋆ ρ_y = ρ_y ⋆ ρ_z`, decided by `z ⊠ y = y ⊠ z`.
///
/// Distinct unit vectors give distinct Cuntz states, so the componentwise
/// test is exact. A witness is searched in length-lexicographic order.
pub fn commutes(omega: &GpState, psi: &GpState) -> Commutation {
    let zy = boxtimes(omega.vector(), psi.vector());
    let yz = boxtimes(psi.vector(), omega.vector());
    if zy.max_abs_diff(&yz) <= UNIT_TOL {
        return Commutation {
            commutes: true,
            witness: None,
        };
    }
    let left = star(omega.clone().into(), psi.clone().into());
    let right = star(psi.clone().into(), omega.clone().into());
    let witness = monomials_up_to(zy.n(), WITNESS_SEARCH_LEN)
        .into_iter()
        .find(|m| {
            let a = left.eval_monomial(m).expect("index matches");
            let b = right.eval_monomial(m).expect("index matches");
            (a - b).norm() > UNIT_TOL
        });
    Commutation {
        commutes: false,
        witness,
    }
}

/// `ρ_z ∘ α_U`, which is the Cuntz state of `U† z`.
pub fn twist_state(z: &UnitVector, u: &DMatrix<C64>) -> Result<GpState> {
    if u.nrows() != z.n() || u.ncols() != z.n() {
        return Err(Error::MismatchedAlgebra {
            left: z.n(),
            right: u.nrows(),
        });
    }
    let defect = unitarity_defect(u);
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { defect });
    }
    let w: Vec<C64> = (0..z.n())
        .map(|j| (0..z.n()).map(|i| u[(i, j)].conj() * z.components[i]).sum())
        .collect();
    Ok(GpState::new(UnitVector::normalized(w)?))
}

/// JSON description of a state: `{"n": 2, "z": [[re, im], ...]}`,
/// `{"uniform": n}` or `{"standard": n}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum StateDescriptor {
    Explicit { n: usize, z: Vec<[f64; 2]> },
    Uniform { uniform: usize },
    Standard { standard: usize },
}

impl StateDescriptor {
    pub fn to_state(&self) -> Result<GpState> {
        match self {
            Self::Explicit { n, z } => {
                if z.len() != *n {
                    return Err(Error::MismatchedAlgebra {
                        left: *n,
                        right: z.len(),
                    });
                }
                let components = z.iter().map(|&[re, im]| C64::new(re, im)).collect();
                Ok(GpState::new(UnitVector::new(components)?))
            }
            Self::Uniform { uniform } if *uniform >= 1 => Ok(GpState::uniform(*uniform)),
            Self::Standard { standard } if *standard >= 1 => Ok(GpState::standard(*standard)),
            _ => Err(Error::ZeroIndex),
        }
    }

    pub fn from_state(state: &GpState) -> Self {
        Self::Explicit {
            n: state.n(),
            z: state
                .vector()
                .components()
                .iter()
                .map(|c| [c.re, c.im])
                .collect(),
        }
    }
}
