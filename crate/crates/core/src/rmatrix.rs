//! The local R-matrix `R(ω₁, ω₂)`, defined by
//!
//! ```text
//! R Λ_{ω₁,ω₂}(Δ(x)) = Λ_{ω₁,ω₂}(Δ^op(x))
//! ```
//!
//! and materialized on finite-depth span bases, together with the checks of
//! unitarity, intertwining, inversion symmetry and the Yang–Baxter equation.
//!
//! When `ω₁ = ω₂ = ω` the defining relation forces `R(ω, ω) = τ`, the flip of
//! `H_ω ⊗ H_ω`, because `Λ_{ω,ω} ∘ flip = τ ∘ Λ_{ω,ω}`. It is the identity
//! only when `H_ω` is one-dimensional.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::bialgebra::{
    delta_monomial, delta_op_monomial, f_l, f_r, opposite_left, opposite_right, split_letter,
};
use crate::cuntz::{creation_words, words_of_length, CuntzMonomial, DirectSumElement};
use crate::gns::{
    act2, gram_matrix, lambda2, lambda3, span_basis, FockVector, GpRepresentation, SpanBasis,
    Tensor2Vector, Tensor3Vector,
};
use crate::linalg::{mul_sparse, unitarity_defect};
use crate::report::{Check, VerificationReport, Worst};
use crate::states::{commutes, GpState, UnitVector};
use crate::{Error, Result, C64, VERIFY_TOL};

type IndexPair = (u64, u64);

/// `R(ω₁, ω₂)` restricted to a finite-depth span.
#[derive(Clone, Debug)]
pub struct RMatrixOperator {
    rep1: GpRepresentation,
    rep2: GpRepresentation,
    depth: usize,
    labels: Vec<String>,
    /// Orthonormal basis of the domain (which is also the codomain).
    basis: Vec<Tensor2Vector>,
    /// Gram matrix of the generating vectors behind `labels`.
    gram: DMatrix<C64>,
    /// Matrix of `R` in the coordinates of `basis`.
    matrix: DMatrix<C64>,
    permutation: Option<BTreeMap<IndexPair, IndexPair>>,
    span: Option<SpanBasis>,
    unitarity_defect: f64,
    gram_residual: f64,
}

impl RMatrixOperator {
    pub fn reps(&self) -> (&GpRepresentation, &GpRepresentation) {
        (&self.rep1, &self.rep2)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Labels of the generating words of the domain basis, in basis order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn basis(&self) -> &[Tensor2Vector] {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<C64> {
        &self.gram
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `e_a ⊗ e_b ↦ e_{a'} ⊗ e_{b'}` when `R` permutes standard basis vectors.
    pub fn permutation(&self) -> Option<&BTreeMap<IndexPair, IndexPair>> {
        self.permutation.as_ref()
    }

    /// The span basis the operator was built from; `None` for closed forms.
    pub fn span(&self) -> Option<&SpanBasis> {
        self.span.as_ref()
    }

    /// `max |(R†R - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        self.unitarity_defect
    }

    /// `max |⟨v_x, v_y⟩ - ⟨w_x, w_y⟩|` over the generating words.
    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    /// Coordinates of `v` in the domain basis and the norm of the rest.
    pub fn coordinates(&self, v: &Tensor2Vector) -> (Vec<C64>, f64) {
        let coords: Vec<C64> = self.basis.iter().map(|q| q.inner(v)).collect();
        let residual = v.distance(&self.reconstruct(&coords));
        (coords, residual)
    }

    fn reconstruct(&self, coords: &[C64]) -> Tensor2Vector {
        let mut out = Tensor2Vector::zero();
        for (q, &c) in self.basis.iter().zip(coords) {
            if c != C64::new(0.0, 0.0) {
                out.axpy(c, q);
            }
        }
        out.prune();
        out
    }

    /// Applies the stored permutation, if any. Vectors with support outside
    /// the permuted box give `OutOfDomain`.
    pub fn apply_permutation(&self, v: &Tensor2Vector) -> Option<Result<Tensor2Vector>> {
        let perm = self.permutation.as_ref()?;
        let mut out = Tensor2Vector::zero();
        for (key, &c) in v.iter() {
            match perm.get(key) {
                Some(&target) => out.add_at(target, c),
                None => return Some(Err(Error::OutOfDomain { residual: c.norm() })),
            }
        }
        out.prune();
        Some(Ok(out))
    }
}

/// Projects `v` onto the domain, applies `R`, and rebuilds the vector.
pub fn apply_r(r: &RMatrixOperator, v: &Tensor2Vector) -> Result<Tensor2Vector> {
    let (coords, residual) = r.coordinates(v);
    if residual > VERIFY_TOL {
        return Err(Error::OutOfDomain { residual });
    }
    let mut image = vec![C64::new(0.0, 0.0); coords.len()];
    for (k, &c) in coords.iter().enumerate() {
        if c == C64::new(0.0, 0.0) {
            continue;
        }
        for (i, slot) in image.iter_mut().enumerate() {
            let rik = r.matrix[(i, k)];
            if rik != C64::new(0.0, 0.0) {
                *slot += rik * c;
            }
        }
    }
    Ok(r.reconstruct(&image))
}

/// Images `w_x = Λ(Δ^op(x))` of the generating words of `span`.
fn opposite_images(span: &SpanBasis) -> Result<Vec<Tensor2Vector>> {
    let (rep1, rep2) = span.reps();
    span.words()
        .iter()
        .map(|w| lambda2(rep1, rep2, &delta_op_monomial(w)))
        .collect()
}

/// Checks `⟨v_x, v_y⟩ = ⟨w_x, w_y⟩` for all generating words, which is
/// `(ω₁ ⋆ ω₂)(x* y) = (ω₂ ⋆ ω₁)(x* y)`. Returns the largest deviation, or
/// the first pair (row-major in word order) that exceeds `tol`.
pub fn check_gram_equality(span: &SpanBasis, tol: f64) -> Result<f64> {
    let w_images = opposite_images(span)?;
    gram_residual(span, &gram_matrix(&w_images), tol)
}

fn gram_residual(span: &SpanBasis, gram_w: &DMatrix<C64>, tol: f64) -> Result<f64> {
    let gram_v = span.gram();
    let mut worst = 0.0f64;
    for a in 0..gram_v.nrows() {
        for b in 0..gram_v.ncols() {
            let residual = (gram_v[(a, b)] - gram_w[(a, b)]).norm();
            if residual > tol {
                return Err(Error::GramMismatch {
                    x: Box::new(span.words()[a].clone()),
                    y: Box::new(span.words()[b].clone()),
                    residual,
                });
            }
            worst = worst.max(residual);
        }
    }
    Ok(worst)
}

/// Builds `R(ω₁, ω₂)` on the span of `Λ(Δ(s_w))`, `|w| <= depth`.
pub fn build_r(
    rep1: &GpRepresentation,
    rep2: &GpRepresentation,
    depth: usize,
) -> Result<RMatrixOperator> {
    let commutation = commutes(rep1.state(), rep2.state());
    if !commutation.commutes {
        let witness = commutation
            .witness
            .expect("non-commuting states differ on a generator");
        return Err(Error::NotCommuting {
            witness: Box::new(witness),
        });
    }
    let span = span_basis(rep1, rep2, depth)?;
    let w_images = opposite_images(&span)?;
    let gram_residual = gram_residual(&span, &gram_matrix(&w_images), VERIFY_TOL)?;

    // B[i, j] = ⟨q_i, w_{p_j}⟩, then R q_k = Σ_j coeffs[j, k] w_{p_j}.
    let r = span.rank();
    let mut b = DMatrix::zeros(r, r);
    for (j, &p) in span.pivots().iter().enumerate() {
        let (coords, residual) = span.coordinates(&w_images[p]);
        if residual > VERIFY_TOL {
            return Err(Error::OutOfDomain { residual });
        }
        for (i, c) in coords.into_iter().enumerate() {
            b[(i, j)] = c;
        }
    }
    let matrix = mul_sparse(&b, span.coeffs());
    let unitarity_defect = unitarity_defect(&matrix);

    let pivot_gram = DMatrix::from_fn(r, r, |i, j| {
        span.gram()[(span.pivots()[i], span.pivots()[j])]
    });
    let labels = span
        .pivots()
        .iter()
        .map(|&p| span.words()[p].to_string())
        .collect();
    let permutation = if rep1.is_permutative() && rep2.is_permutative() {
        extract_permutation(span.basis(), &matrix)
    } else {
        None
    };
    Ok(RMatrixOperator {
        rep1: rep1.clone(),
        rep2: rep2.clone(),
        depth,
        labels,
        basis: span.basis().to_vec(),
        gram: pivot_gram,
        matrix,
        permutation,
        span: Some(span),
        unitarity_defect,
        gram_residual,
    })
}

fn single_entry(v: &Tensor2Vector) -> Option<IndexPair> {
    let mut it = v.iter();
    match (it.next(), it.next()) {
        (Some((&key, &c)), None) if c == C64::new(1.0, 0.0) => Some(key),
        _ => None,
    }
}

fn extract_permutation(
    basis: &[Tensor2Vector],
    matrix: &DMatrix<C64>,
) -> Option<BTreeMap<IndexPair, IndexPair>> {
    let keys: Vec<IndexPair> = basis.iter().map(single_entry).collect::<Option<_>>()?;
    let mut perm = BTreeMap::new();
    for (k, &source) in keys.iter().enumerate() {
        let mut target = None;
        for (i, &key) in keys.iter().enumerate() {
            let entry = matrix[(i, k)];
            if entry == C64::new(0.0, 0.0) {
                continue;
            }
            if entry != C64::new(1.0, 0.0) || target.is_some() {
                return None;
            }
            target = Some(key);
        }
        perm.insert(source, target?);
    }
    Some(perm)
}

/// Index of `π_n(s_{i_1} ⋯ s_{i_ℓ}) e_1`, i.e. `1 + Σ_k (i_k - 1) n^{k-1}`.
fn radix_index(n: usize, digits: impl DoubleEndedIterator<Item = usize>) -> u64 {
    digits
        .rev()
        .fold(0u64, |acc, d| acc * n as u64 + (d as u64 - 1))
        + 1
}

/// Closed form of `R(ω_n, ω_m)` for the standard states at the given depth:
/// the digits of `a - 1` (base `n`) and `b - 1` (base `m`) are zipped into
/// letters `w_k = m(i_k - 1) + j_k` of `O_{nm}` and re-split as
/// `w_k = n(j'_k - 1) + i'_k`.
pub fn radix_swap_r(n: usize, m: usize, depth: usize) -> Result<RMatrixOperator> {
    if n == 0 || m == 0 {
        return Err(Error::ZeroIndex);
    }
    let mut entries: Vec<(IndexPair, IndexPair, String)> = Vec::new();
    for word in words_of_length(n * m, depth) {
        let ij: Vec<(usize, usize)> = word.iter().map(|&w| split_letter(w, m)).collect();
        let swapped: Vec<(usize, usize)> = word
            .iter()
            .map(|&w| {
                let (j, i) = split_letter(w, n);
                (i, j)
            })
            .collect();
        let source = (
            radix_index(n, ij.iter().map(|p| p.0)),
            radix_index(m, ij.iter().map(|p| p.1)),
        );
        let target = (
            radix_index(n, swapped.iter().map(|p| p.0)),
            radix_index(m, swapped.iter().map(|p| p.1)),
        );
        let label = CuntzMonomial::new(n * m, &word, &[])?.to_string();
        entries.push((source, target, label));
    }
    entries.sort();
    let index: BTreeMap<IndexPair, usize> =
        entries.iter().enumerate().map(|(k, e)| (e.0, k)).collect();
    let r = entries.len();
    let mut matrix = DMatrix::zeros(r, r);
    for (k, (_, target, _)) in entries.iter().enumerate() {
        matrix[(index[target], k)] = C64::new(1.0, 0.0);
    }
    let unitarity_defect = unitarity_defect(&matrix);
    Ok(RMatrixOperator {
        rep1: GpRepresentation::standard(n),
        rep2: GpRepresentation::standard(m),
        depth,
        basis: entries.iter().map(|e| Tensor2Vector::basis(e.0)).collect(),
        labels: entries.iter().map(|e| e.2.clone()).collect(),
        permutation: Some(entries.iter().map(|e| (e.0, e.1)).collect()),
        gram: DMatrix::identity(r, r),
        matrix,
        span: None,
        unitarity_defect,
        gram_residual: 0.0,
    })
}

/// Checks `R (π₁⊗π₂)(Δ(x)) v = (π₁⊗π₂)(Δ^op(x)) R v` for every test word
/// `x` and every orthonormal basis vector `v` of the depth-`depth` span.
///
/// `R` must be built at depth `depth + max |u|` over the creation parts of
/// the test words, so that `(π₁⊗π₂)(Δ(x)) v` stays in its domain.
pub fn verify_intertwining(
    r: &RMatrixOperator,
    words: &[CuntzMonomial],
    depth: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let required = depth + words.iter().map(|w| w.creation().len()).max().unwrap_or(0);
    if r.depth < required {
        return Err(Error::InsufficientDepth {
            required,
            built: r.depth,
        });
    }
    let (rep1, rep2) = r.reps();
    let vectors = span_basis(rep1, rep2, depth)?.basis().to_vec();
    let rotated = vectors
        .iter()
        .map(|v| apply_r(r, v))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport::new("intertwine");
    let mut overall = Worst::default();
    for x in words {
        let dx = delta_monomial(x);
        let dx_op = delta_op_monomial(x);
        let mut worst = Worst::default();
        for (k, (v, rv)) in vectors.iter().zip(&rotated).enumerate() {
            let lhs = apply_r(r, &act2(rep1, rep2, &dx, v)?)?;
            let rhs = act2(rep1, rep2, &dx_op, rv)?;
            worst.record(lhs.distance(&rhs), || format!("x={x}; v=q{k}"));
        }
        overall.record(worst.residual, || x.to_string());
        report.push(worst.into_check(&format!("intertwine[{x}]"), tol));
    }
    report.push(overall.into_check("intertwine", tol));
    report.push(Check::within("unitarity", r.unitarity_defect, tol));
    Ok(report)
}

/// Checks `R(ω₁,ω₂) τ R(ω₂,ω₁) τ = I` on the span at `depth`.
pub fn verify_symmetry(
    rep1: &GpRepresentation,
    rep2: &GpRepresentation,
    depth: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let r12 = build_r(rep1, rep2, depth)?;
    let r21 = build_r(rep2, rep1, depth)?;
    let mut worst = Worst::default();
    for (k, v) in r12.basis().iter().enumerate() {
        let back = apply_r(&r12, &apply_r(&r21, &v.swap())?.swap())?;
        worst.record(back.distance(v), || format!("q{k} ({})", r12.labels[k]));
    }
    let mut report = VerificationReport::new("symmetry");
    report.push(Check::within("unitarity R12", r12.unitarity_defect, tol));
    report.push(Check::within("unitarity R21", r21.unitarity_defect, tol));
    report.push(worst.into_check("symmetry", tol));
    Ok(report)
}

#[derive(Clone, Copy)]
enum Legs {
    L12,
    L13,
    L23,
}

/// Applies a pairwise `R` to two legs of a triple tensor, slicing along the
/// untouched leg.
fn apply_on_legs(r: &RMatrixOperator, legs: Legs, v: &Tensor3Vector) -> Result<Tensor3Vector> {
    let mut slices: BTreeMap<u64, Tensor2Vector> = BTreeMap::new();
    for (&(i, j, k), &c) in v.iter() {
        let (fixed, pair) = match legs {
            Legs::L12 => (k, (i, j)),
            Legs::L13 => (j, (i, k)),
            Legs::L23 => (i, (j, k)),
        };
        slices.entry(fixed).or_default().add_at(pair, c);
    }
    let mut out = Tensor3Vector::zero();
    for (fixed, slice) in slices {
        for (&(a, b), &c) in apply_r(r, &slice)?.iter() {
            let key = match legs {
                Legs::L12 => (a, b, fixed),
                Legs::L13 => (a, fixed, b),
                Legs::L23 => (fixed, a, b),
            };
            out.add_at(key, c);
        }
    }
    out.prune();
    Ok(out)
}

/// Checks `R₁₂R₁₃R₂₃ = R₂₃R₁₃R₁₂` on `Λ_{a,b,c}(F_R(x))` for all creation
/// words of `O_{n₁n₂n₃}` with `|x| <= depth`, and compares both sides with
/// `Λ((Δ^op⊗id)Δ^op(x))` and `Λ((id⊗Δ^op)Δ^op(x))`.
pub fn verify_ybe(
    reps: [&GpRepresentation; 3],
    depth: usize,
    tol: f64,
) -> Result<VerificationReport> {
    let [a, b, c] = reps;
    let r12 = build_r(a, b, depth)?;
    let r13 = build_r(a, c, depth)?;
    let r23 = build_r(b, c, depth)?;

    let mut orderings = Worst::default();
    let mut left_oracle = Worst::default();
    let mut right_oracle = Worst::default();
    let mut oracles = Worst::default();
    let mut coassoc = Worst::default();
    let words = creation_words(a.n() * b.n() * c.n(), depth);
    for x in &words {
        let xs = DirectSumElement::from(x.clone());
        let v = lambda3(reps, &f_r(&xs))?;
        let v_left = lambda3(reps, &f_l(&xs))?;
        let lhs = apply_on_legs(
            &r12,
            Legs::L12,
            &apply_on_legs(&r13, Legs::L13, &apply_on_legs(&r23, Legs::L23, &v)?)?,
        )?;
        let rhs = apply_on_legs(
            &r23,
            Legs::L23,
            &apply_on_legs(&r13, Legs::L13, &apply_on_legs(&r12, Legs::L12, &v)?)?,
        )?;
        let op_left = lambda3(reps, &opposite_left(&xs))?;
        let op_right = lambda3(reps, &opposite_right(&xs))?;
        let label = || x.to_string();
        coassoc.record(v.distance(&v_left), label);
        orderings.record(lhs.distance(&rhs), label);
        left_oracle.record(lhs.distance(&op_left), label);
        right_oracle.record(rhs.distance(&op_right), label);
        oracles.record(op_left.distance(&op_right), label);
    }
    let mut report = VerificationReport::new("ybe");
    report.push(coassoc.into_check("F_R = F_L", tol));
    report.push(orderings.into_check("R12 R13 R23 = R23 R13 R12", tol));
    report.push(left_oracle.into_check("R12 R13 R23 = (Δ^op⊗id)Δ^op", tol));
    report.push(right_oracle.into_check("R23 R13 R12 = (id⊗Δ^op)Δ^op", tol));
    report.push(oracles.into_check("(Δ^op⊗id)Δ^op = (id⊗Δ^op)Δ^op", tol));
    for (name, r) in [("R12", &r12), ("R13", &r13), ("R23", &r23)] {
        report.push(Check::within(
            format!("unitarity {name}"),
            r.unitarity_defect,
            tol,
        ));
    }
    Ok(report)
}

/// The non-commuting pair `ω₂ = ρ_{(1,0)}`, `ω̄₂ = ρ_{(0,1)} = ω₂ ∘ α_flip`.
///
/// If `R` existed it would fix `v = Ω ⊗ Ω = Λ(Δ(I)) = Λ(Δ^op(I))`. Since
/// `(π₂⊗π̄₂)(Δ(s_2))` also fixes `v`, intertwining would force
/// `(π₂⊗π̄₂)(Δ^op(s_2)) v = v`, but that vector is `e_2 ⊗ e_2 ⊥ v`.
pub fn counterexample_demo() -> VerificationReport {
    let pi = GpRepresentation::standard(2);
    let pi_bar = GpRepresentation::for_state(&GpState::new(UnitVector::standard(2, 2)));
    let v = Tensor2Vector::basis((1, 1));
    let s2 = CuntzMonomial::new(4, &[2], &[]).expect("valid monomial");
    let mut report = VerificationReport::new("counterexample");

    let flipped = pi_bar
        .act(
            &CuntzMonomial::new(2, &[1], &[]).expect("valid monomial"),
            &FockVector::basis(1),
        )
        .expect("matching algebra");
    report.push(Check::within(
        "pi_bar(s_1) e_1 = e_2",
        flipped.distance(&FockVector::basis(2)),
        0.0,
    ));

    let unit = CuntzMonomial::unit(4);
    let v_unit = lambda2(&pi, &pi_bar, &delta_monomial(&unit)).expect("matching blocks");
    let w_unit = lambda2(&pi, &pi_bar, &delta_op_monomial(&unit)).expect("matching blocks");
    report.push(Check::within(
        "Rv = v",
        v_unit.distance(&v).max(w_unit.distance(&v)),
        0.0,
    ));

    let fixed = act2(&pi, &pi_bar, &delta_monomial(&s2), &v).expect("matching blocks");
    report.push(Check::within("Δ(s_2) v = v", fixed.distance(&v), 0.0));

    let moved = act2(&pi, &pi_bar, &delta_op_monomial(&s2), &v).expect("matching blocks");
    report.push(Check::within(
        "inner-product-zero",
        v.inner(&moved).norm(),
        0.0,
    ));

    // the intertwining residual on v; a failure of the identity is the expected outcome
    let residual = fixed.distance(&moved);
    report.push(
        Check::new("intertwining-fails", residual > VERIFY_TOL, residual)
            .with_witness(format!("x={s2}; v=e_1⊗e_1")),
    );

    match build_r(&pi, &pi_bar, 1) {
        Err(Error::NotCommuting { witness }) => {
            report.push(Check::new("not-commuting", true, 0.0).with_witness(witness.to_string()))
        }
        other => report.push(
            Check::new("not-commuting", false, 0.0)
                .with_witness(format!("unexpected: {:?}", other.map(|r| r.rank()))),
        ),
    }

    let span = span_basis(&pi, &pi_bar, 1).expect("matching blocks");
    match check_gram_equality(&span, VERIFY_TOL) {
        Err(Error::GramMismatch { x, y, residual }) => report
            .push(Check::new("gram-mismatch", true, residual).with_witness(format!("({x}, {y})"))),
        _ => report.push(Check::new("gram-mismatch", false, 0.0)),
    }
    report
}
