//! GNS data for Cuntz states on finitely supported vectors of `ℓ²(N)`.
//!
//! The permutative representation of `O_n` acts on the orthonormal basis
//! `{e_k : k ≥ 1}` by `π_n(s_i) e_k = e_{n(k-1)+i}`; its vector state at `e_1`
//! is `ρ_{e_1}`. A general `ρ_z` is realized as `π_z = π_n ∘ α_U` for a unitary
//! `U` whose first row is `z̄`, with cyclic vector `Ω = e_1`. Everything stays
//! finitely supported, and inner products are exact sums.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::bialgebra::{delta_monomial, TensorElement2, TensorElement3};
use crate::cuntz::{creation_words, AlgebraElement, CuntzMonomial};
use crate::linalg::{pivoted_gram_schmidt, unitarity_defect};
use crate::states::{GpState, UnitVector, UNITARY_TOL};
use crate::{Error, Result, C64, RANK_TOL, ZERO_TOL};

/// Finitely supported vector with basis labels `K`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector<K: Ord> {
    entries: BTreeMap<K, C64>,
}

/// A vector of `ℓ²(N)`, basis indices starting at 1.
pub type FockVector = SparseVector<u64>;
/// A vector of `ℓ²(N) ⊗ ℓ²(N)`.
pub type Tensor2Vector = SparseVector<(u64, u64)>;
/// A vector of `ℓ²(N)^{⊗3}`.
pub type Tensor3Vector = SparseVector<(u64, u64, u64)>;

impl<K: Ord> Default for SparseVector<K> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseVector<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(key: K) -> Self {
        let mut out = Self::zero();
        out.entries.insert(key, C64::new(1.0, 0.0));
        out
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (K, C64)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in entries {
            out.add_at(k, c);
        }
        out.prune();
        out
    }

    pub fn add_at(&mut self, key: K, c: C64) {
        *self.entries.entry(key).or_default() += c;
    }

    pub fn prune(&mut self) {
        self.entries.retain(|_, c| c.norm() >= ZERO_TOL);
    }

    pub fn get(&self, key: &K) -> C64 {
        self.entries.get(key).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &C64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Accumulates `c · other` without pruning.
    pub fn axpy(&mut self, c: C64, other: &Self) {
        for (k, &a) in &other.entries {
            self.add_at(k.clone(), c * a);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(1.0, 0.0), other);
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(C64::new(-1.0, 0.0), other);
        out.prune();
        out
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero();
        out.axpy(c, self);
        out.prune();
        out
    }

    /// `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> C64 {
        if self.entries.len() <= other.entries.len() {
            self.entries
                .iter()
                .filter_map(|(k, a)| other.entries.get(k).map(|b| a.conj() * b))
                .sum()
        } else {
            other
                .entries
                .iter()
                .filter_map(|(k, b)| self.entries.get(k).map(|a| a.conj() * b))
                .sum()
        }
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self - other‖`, without pruning the difference.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut diff = self.clone();
        diff.axpy(C64::new(-1.0, 0.0), other);
        diff.norm()
    }

    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> SparseVector<L> {
        SparseVector::from_entries(self.entries.iter().map(|(k, &c)| (f(k), c)))
    }
}

impl Tensor2Vector {
    /// The flip `τ : H_1 ⊗ H_2 → H_2 ⊗ H_1`.
    pub fn swap(&self) -> Self {
        self.map_keys(|&(a, b)| (b, a))
    }
}

pub fn tensor(a: &FockVector, b: &FockVector) -> Tensor2Vector {
    let mut out = Tensor2Vector::zero();
    for (&j, &x) in a.iter() {
        for (&k, &y) in b.iter() {
            out.add_at((j, k), x * y);
        }
    }
    out.prune();
    out
}

pub fn tensor3(a: &FockVector, b: &FockVector, c: &FockVector) -> Tensor3Vector {
    let mut out = Tensor3Vector::zero();
    for (&i, &x) in a.iter() {
        for (&j, &y) in b.iter() {
            for (&k, &z) in c.iter() {
                out.add_at((i, j, k), x * y * z);
            }
        }
    }
    out.prune();
    out
}

/// The GNS representation of `ρ_z`, realized as `π_n ∘ α_U` on `ℓ²(N)`.
#[derive(Clone, Debug)]
pub struct GpRepresentation {
    state: GpState,
    /// `None` is the untwisted permutative representation (`z = e_1`).
    twist: Option<DMatrix<C64>>,
}

impl PartialEq for GpRepresentation {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state && self.twist == other.twist
    }
}

impl GpRepresentation {
    /// The permutative representation `π_n` with `Ω = e_1`.
    pub fn standard(n: usize) -> Self {
        Self {
            state: GpState::standard(n),
            twist: None,
        }
    }

    /// Realization with the deterministic unitary completion of `z̄`.
    pub fn for_state(state: &GpState) -> Self {
        if state.vector().is_standard_first() {
            return Self {
                state: state.clone(),
                twist: None,
            };
        }
        let u = complete_unitary(state.vector());
        Self {
            state: state.clone(),
            twist: Some(u),
        }
    }

    /// Realization `π_n ∘ α_U`; the represented state is `ρ_z` with `z` the
    /// conjugate of the first row of `U`.
    pub fn from_unitary(u: DMatrix<C64>) -> Result<Self> {
        if u.nrows() != u.ncols() || u.nrows() == 0 {
            return Err(Error::NotUnitary {
                defect: f64::INFINITY,
            });
        }
        let defect = unitarity_defect(&u);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        let n = u.nrows();
        let z: Vec<C64> = (0..n).map(|j| u[(0, j)].conj()).collect();
        let state = GpState::new(UnitVector::normalized(z)?);
        let twist = if u == DMatrix::identity(n, n) {
            None
        } else {
            Some(u)
        };
        Ok(Self { state, twist })
    }

    pub fn n(&self) -> usize {
        self.state.n()
    }

    pub fn state(&self) -> &GpState {
        &self.state
    }

    pub fn unitary(&self) -> DMatrix<C64> {
        self.twist
            .clone()
            .unwrap_or_else(|| DMatrix::identity(self.n(), self.n()))
    }

    pub fn is_permutative(&self) -> bool {
        self.twist.is_none()
    }

    /// `π(s_j) v` (or `π(s_j*) v` when `adjoint`).
    pub fn act_generator(&self, j: usize, adjoint: bool, v: &FockVector) -> FockVector {
        let n = self.n() as u64;
        if n == 1 {
            return v.clone();
        }
        let raw = |i: u64, v: &FockVector, out: &mut FockVector, coef: C64| {
            for (&k, &c) in v.iter() {
                if adjoint {
                    if k >= i && (k - i).is_multiple_of(n) {
                        out.add_at((k - i) / n + 1, coef * c);
                    }
                } else {
                    out.add_at(n * (k - 1) + i, coef * c);
                }
            }
        };
        let mut out = FockVector::zero();
        match &self.twist {
            None => raw(j as u64, v, &mut out, C64::new(1.0, 0.0)),
            Some(u) => {
                for i in 1..=self.n() {
                    let uij = u[(i - 1, j - 1)];
                    let coef = if adjoint { uij.conj() } else { uij };
                    if coef.norm() >= ZERO_TOL {
                        raw(i as u64, v, &mut out, coef);
                    }
                }
            }
        }
        out.prune();
        out
    }

    /// `π(s_u s_v*) v`.
    pub fn act(&self, m: &CuntzMonomial, v: &FockVector) -> Result<FockVector> {
        if m.n() != self.n() {
            return Err(Error::MismatchedAlgebra {
                left: self.n(),
                right: m.n(),
            });
        }
        let mut out = v.clone();
        // (s_{v_1} ⋯ s_{v_b})* applies s_{v_1}* first
        for &k in m.annihilation().letters() {
            out = self.act_generator(k, true, &out);
        }
        for &j in m.creation().letters().iter().rev() {
            out = self.act_generator(j, false, &out);
        }
        Ok(out)
    }

    pub fn act_element(&self, x: &AlgebraElement, v: &FockVector) -> Result<FockVector> {
        let mut out = FockVector::zero();
        for (m, &c) in x.terms() {
            out.axpy(c, &self.act(m, v)?);
        }
        out.prune();
        Ok(out)
    }

    /// The cyclic vector `Ω = e_1`.
    pub fn omega(&self) -> FockVector {
        FockVector::basis(1)
    }

    /// The GNS map `Λ(x) = π(x) Ω`.
    pub fn lambda(&self, x: &AlgebraElement) -> Result<FockVector> {
        self.act_element(x, &self.omega())
    }

    pub fn lambda_monomial(&self, m: &CuntzMonomial) -> Result<FockVector> {
        self.act(m, &self.omega())
    }
}

/// Rows of a unitary, first row `z̄`, completed by modified Gram–Schmidt over
/// the standard basis (candidates with residual norm below 1e-10 skipped).
pub fn complete_unitary(z: &UnitVector) -> DMatrix<C64> {
    let n = z.n();
    let mut rows: Vec<Vec<C64>> = vec![z.components().iter().map(|c| c.conj()).collect()];
    for k in 0..n {
        if rows.len() == n {
            break;
        }
        let mut cand = vec![C64::new(0.0, 0.0); n];
        cand[k] = C64::new(1.0, 0.0);
        for row in &rows {
            // cand -= ⟨row, cand⟩ row, with ⟨a, b⟩ = Σ conj(a_i) b_i
            let proj: C64 = row.iter().zip(&cand).map(|(r, c)| r.conj() * c).sum();
            for (c, r) in cand.iter_mut().zip(row) {
                *c -= proj * r;
            }
        }
        let norm = cand.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm <= RANK_TOL {
            continue;
        }
        rows.push(cand.into_iter().map(|c| c / norm).collect());
    }
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// `Λ_{ω_1} ⊗ Λ_{ω_2}` applied to the `(n_1, n_2)` block of `t`.
pub fn lambda2(
    rep1: &GpRepresentation,
    rep2: &GpRepresentation,
    t: &TensorElement2,
) -> Result<Tensor2Vector> {
    let mut out = Tensor2Vector::zero();
    if let Some(block) = t.block(&[rep1.n(), rep2.n()]) {
        for ([a, b], &c) in block {
            let va = rep1.lambda_monomial(a)?;
            let vb = rep2.lambda_monomial(b)?;
            out.axpy(c, &tensor(&va, &vb));
        }
    }
    out.prune();
    Ok(out)
}

/// `Λ_a ⊗ Λ_b ⊗ Λ_c` on the matching block of `t`.
pub fn lambda3(reps: [&GpRepresentation; 3], t: &TensorElement3) -> Result<Tensor3Vector> {
    let mut out = Tensor3Vector::zero();
    if let Some(block) = t.block(&[reps[0].n(), reps[1].n(), reps[2].n()]) {
        for ([a, b, c], &coef) in block {
            let va = reps[0].lambda_monomial(a)?;
            let vb = reps[1].lambda_monomial(b)?;
            let vc = reps[2].lambda_monomial(c)?;
            out.axpy(coef, &tensor3(&va, &vb, &vc));
        }
    }
    out.prune();
    Ok(out)
}

/// `(π_1 ⊗ π_2)(t) v` for the `(n_1, n_2)` block of `t`.
pub fn act2(
    rep1: &GpRepresentation,
    rep2: &GpRepresentation,
    t: &TensorElement2,
    v: &Tensor2Vector,
) -> Result<Tensor2Vector> {
    let mut out = Tensor2Vector::zero();
    let Some(block) = t.block(&[rep1.n(), rep2.n()]) else {
        return Ok(out);
    };
    for ([a, b], &c) in block {
        let mut left_cache: BTreeMap<u64, FockVector> = BTreeMap::new();
        let mut right_cache: BTreeMap<u64, FockVector> = BTreeMap::new();
        for (&(j, k), &amp) in v.iter() {
            if let Entry::Vacant(slot) = left_cache.entry(j) {
                slot.insert(rep1.act(a, &FockVector::basis(j))?);
            }
            if let Entry::Vacant(slot) = right_cache.entry(k) {
                slot.insert(rep2.act(b, &FockVector::basis(k))?);
            }
            out.axpy(c * amp, &tensor(&left_cache[&j], &right_cache[&k]));
        }
    }
    out.prune();
    Ok(out)
}

/// Finite-depth evidence for cyclicity of `Ω ⊗ Ω` under `(π_1 ⊗ π_2) ∘ Δ`:
/// the images `v_x = Λ_{ω_1,ω_2}(Δ(s_w))` of all creation words of
/// `O_{n_1 n_2}` with `|w| <= depth`, their Gram matrix and an orthonormal
/// basis of their span.
///
/// Annihilation parts are redundant because `π(s_j*) Ω = z_j Ω`.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    rep1: GpRepresentation,
    rep2: GpRepresentation,
    depth: usize,
    words: Vec<CuntzMonomial>,
    images: Vec<Tensor2Vector>,
    gram: DMatrix<C64>,
    pivots: Vec<usize>,
    /// `N × r`, coordinates of each image in the orthonormal basis.
    coords: DMatrix<C64>,
    /// `r × r`, `q_k = Σ_j coeffs[(j, k)] v_{pivots[j]}`.
    coeffs: DMatrix<C64>,
    basis: Vec<Tensor2Vector>,
    min_residual: f64,
}

pub fn gram_matrix(vectors: &[Tensor2Vector]) -> DMatrix<C64> {
    let n = vectors.len();
    let mut g = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let value = vectors[a].inner(&vectors[b]);
            g[(a, b)] = value;
            g[(b, a)] = value.conj();
        }
    }
    g
}

/// Builds the span basis of `(ω_1, ω_2)` at the given depth.
pub fn span_basis(
    rep1: &GpRepresentation,
    rep2: &GpRepresentation,
    depth: usize,
) -> Result<SpanBasis> {
    let words = creation_words(rep1.n() * rep2.n(), depth);
    let images = words
        .iter()
        .map(|w| lambda2(rep1, rep2, &delta_monomial(w)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpanBasis::from_images(rep1, rep2, depth, words, images))
}

impl SpanBasis {
    fn from_images(
        rep1: &GpRepresentation,
        rep2: &GpRepresentation,
        depth: usize,
        words: Vec<CuntzMonomial>,
        images: Vec<Tensor2Vector>,
    ) -> Self {
        let gram = gram_matrix(&images);
        let factor = pivoted_gram_schmidt(&gram, RANK_TOL);
        let basis = factor
            .pivots
            .iter()
            .enumerate()
            .map(|(k, _)| {
                let mut q = Tensor2Vector::zero();
                for (j, &p) in factor.pivots.iter().enumerate().take(k + 1) {
                    let c = factor.coeffs[(j, k)];
                    if c != C64::new(0.0, 0.0) {
                        q.axpy(c, &images[p]);
                    }
                }
                q.prune();
                q
            })
            .collect();
        let min_residual = factor
            .residual_sqr
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Self {
            rep1: rep1.clone(),
            rep2: rep2.clone(),
            depth,
            words,
            images,
            gram,
            pivots: factor.pivots,
            coords: factor.coords,
            coeffs: factor.coeffs,
            basis,
            min_residual,
        }
    }

    pub fn reps(&self) -> (&GpRepresentation, &GpRepresentation) {
        (&self.rep1, &self.rep2)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Generating words, in the order of [`Self::images`] and [`Self::gram`].
    pub fn words(&self) -> &[CuntzMonomial] {
        &self.words
    }

    pub fn images(&self) -> &[Tensor2Vector] {
        &self.images
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of the generating images in the orthonormal basis.
    pub fn image_coords(&self) -> &DMatrix<C64> {
        &self.coords
    }

    pub fn coeffs(&self) -> &DMatrix<C64> {
        &self.coeffs
    }

    /// The orthonormal basis vectors `q_k`.
    pub fn basis(&self) -> &[Tensor2Vector] {
        &self.basis
    }

    /// Smallest residual diagonal left by the factorization; PSD requires it
    /// to be non-negative up to rounding (it is clamped, so this reports 0
    /// for exactly dependent sets).
    pub fn min_residual(&self) -> f64 {
        self.min_residual
    }

    /// Orthonormal coordinates of `v` and the norm of its component outside
    /// the span.
    pub fn coordinates(&self, v: &Tensor2Vector) -> (Vec<C64>, f64) {
        let coords: Vec<C64> = self.basis.iter().map(|q| q.inner(v)).collect();
        let residual = v.distance(&self.reconstruct(&coords));
        (coords, residual)
    }

    pub fn reconstruct(&self, coords: &[C64]) -> Tensor2Vector {
        let mut out = Tensor2Vector::zero();
        for (q, &c) in self.basis.iter().zip(coords) {
            if c != C64::new(0.0, 0.0) {
                out.axpy(c, q);
            }
        }
        out.prune();
        out
    }
}
