//! The comultiplication `Δ_φ` of `O_*` and finite tensor arithmetic.
//!
//! `φ_{n,m} : O_{nm} → O_n ⊗ O_m` sends `s_{m(i-1)+j}` to `s_i ⊗ s_j`, and
//! `Δ_φ` on the `O_n` component is the sum of `φ_{a,b}` over ordered divisor
//! pairs `ab = n`. Tensor elements are kept in blocks keyed by the algebra
//! index of every leg, so a pair of representations of `O_a` and `O_b` can
//! project onto the single `(a, b)` block it sees.

use std::collections::BTreeMap;

use crate::cuntz::{AlgebraElement, CuntzMonomial, CuntzWord, DirectSumElement};
use crate::{Error, Result, C64, EQ_TOL, ZERO_TOL};

/// Monomial terms of one block, keyed by the per-leg monomials.
pub type Block<const K: usize> = BTreeMap<[CuntzMonomial; K], C64>;

/// A finite sum of `K`-fold tensors of Cuntz monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement<const K: usize> {
    blocks: BTreeMap<[usize; K], Block<K>>,
}

pub type TensorElement2 = TensorElement<2>;
pub type TensorElement3 = TensorElement<3>;

impl<const K: usize> Default for TensorElement<K> {
    fn default() -> Self {
        Self {
            blocks: BTreeMap::new(),
        }
    }
}

impl<const K: usize> TensorElement<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(legs: [CuntzMonomial; K], c: C64) -> Self {
        let mut out = Self::zero();
        out.add_term(legs, c);
        out.prune();
        out
    }

    /// Adds `c · legs` without pruning.
    pub fn add_term(&mut self, legs: [CuntzMonomial; K], c: C64) {
        let key = std::array::from_fn(|k| legs[k].n());
        *self.blocks.entry(key).or_default().entry(legs).or_default() += c;
    }

    fn prune(&mut self) {
        for block in self.blocks.values_mut() {
            block.retain(|_, c| c.norm() >= ZERO_TOL);
        }
        self.blocks.retain(|_, b| !b.is_empty());
    }

    pub fn block(&self, key: &[usize; K]) -> Option<&Block<K>> {
        self.blocks.get(key)
    }

    pub fn block_keys(&self) -> impl Iterator<Item = &[usize; K]> {
        self.blocks.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[CuntzMonomial; K], &C64)> {
        self.blocks.values().flat_map(|b| b.iter())
    }

    pub fn num_terms(&self) -> usize {
        self.blocks.values().map(|b| b.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (legs, &c) in other.terms() {
            out.add_term(legs.clone(), c);
        }
        out.prune();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero();
        for (legs, &a) in self.terms() {
            out.add_term(legs.clone(), a * c);
        }
        out.prune();
        out
    }

    /// Legwise product; blocks with different index tuples multiply to zero
    /// because distinct summands of `O_*` are orthogonal.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (key, left) in &self.blocks {
            let Some(right) = other.blocks.get(key) else {
                continue;
            };
            for (a, &ca) in left {
                for (b, &cb) in right {
                    if let Some(legs) = leg_product(a, b) {
                        out.add_term(legs, ca * cb);
                    }
                }
            }
        }
        out.prune();
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (legs, c) in self.terms() {
            out.add_term(std::array::from_fn(|k| legs[k].adjoint()), c.conj());
        }
        out
    }

    /// Per block and per tuple of leg degrees, expands every leg to the
    /// longest annihilation length present on that leg.
    pub fn canonical_form(&self) -> BTreeMap<[CuntzMonomial; K], C64> {
        let mut targets: BTreeMap<([usize; K], [i64; K]), [usize; K]> = BTreeMap::new();
        for (key, block) in &self.blocks {
            for legs in block.keys() {
                let degrees = std::array::from_fn(|k| legs[k].degree());
                let t = targets.entry((*key, degrees)).or_insert([0; K]);
                for k in 0..K {
                    t[k] = t[k].max(legs[k].annihilation().len());
                }
            }
        }
        let mut out = BTreeMap::new();
        for (key, block) in &self.blocks {
            for (legs, &c) in block {
                let degrees: [i64; K] = std::array::from_fn(|k| legs[k].degree());
                let level = targets[&(*key, degrees)];
                let expanded: Vec<Vec<CuntzMonomial>> = (0..K)
                    .map(|k| legs[k].level_expand(level[k]).expect("class maximum"))
                    .collect();
                for_each_choice(&expanded, |choice| {
                    *out.entry(choice).or_insert(C64::new(0.0, 0.0)) += c;
                });
            }
        }
        out
    }

    /// Equality in the algebraic tensor product, modulo the Cuntz relations
    /// on every leg.
    pub fn canonical_equal(&self, other: &Self) -> bool {
        self.sub(other)
            .canonical_form()
            .values()
            .all(|c| c.norm() <= EQ_TOL)
    }
}

fn leg_product<const K: usize>(
    a: &[CuntzMonomial; K],
    b: &[CuntzMonomial; K],
) -> Option<[CuntzMonomial; K]> {
    let mut legs = Vec::with_capacity(K);
    for k in 0..K {
        legs.push(a[k].product(&b[k]).expect("block keys match")?);
    }
    legs.try_into().ok()
}

fn for_each_choice<const K: usize>(
    options: &[Vec<CuntzMonomial>],
    mut f: impl FnMut([CuntzMonomial; K]),
) {
    let mut idx = [0usize; K];
    loop {
        f(std::array::from_fn(|k| options[k][idx[k]].clone()));
        let mut k = K;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < options[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

impl TensorElement<2> {
    /// The flip `a ⊗ b ↦ b ⊗ a`.
    pub fn flip(&self) -> Self {
        let mut out = Self::zero();
        for ([a, b], &c) in self.terms() {
            out.add_term([b.clone(), a.clone()], c);
        }
        out
    }

    /// Replaces leg `leg` (0 or 1) of every term by `map` applied to it.
    pub fn extend_leg(
        &self,
        leg: usize,
        map: impl Fn(&CuntzMonomial) -> TensorElement2,
    ) -> TensorElement3 {
        assert!(leg < 2, "leg index out of range");
        let mut out = TensorElement3::zero();
        for ([a, b], &c) in self.terms() {
            let target = if leg == 0 { a } else { b };
            for ([x, y], &d) in map(target).terms() {
                let legs = if leg == 0 {
                    [x.clone(), y.clone(), b.clone()]
                } else {
                    [a.clone(), x.clone(), y.clone()]
                };
                out.add_term(legs, c * d);
            }
        }
        out.prune();
        out
    }
}

/// `w = m(i-1) + j` with `1 <= i <= n`, `1 <= j <= m`.
pub fn split_letter(w: usize, m: usize) -> (usize, usize) {
    ((w - 1) / m + 1, (w - 1) % m + 1)
}

/// Ordered pairs `(a, b)` with `ab = n`, increasing in `a`.
pub fn divisor_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n)
        .filter(|a| n.is_multiple_of(*a))
        .map(|a| (a, n / a))
        .collect()
}

fn split_word(word: &CuntzWord, n: usize, m: usize) -> (CuntzWord, CuntzWord) {
    let (left, right): (Vec<usize>, Vec<usize>) =
        word.letters().iter().map(|&w| split_letter(w, m)).unzip();
    (
        CuntzWord::from_checked(n, left),
        CuntzWord::from_checked(m, right),
    )
}

/// `φ_{n,m}` on a single monomial of `O_{nm}`.
pub fn phi_monomial(n: usize, m: usize, x: &CuntzMonomial) -> Result<[CuntzMonomial; 2]> {
    if n == 0 || m == 0 || x.n() != n * m {
        return Err(Error::BadFactorization {
            n: x.n(),
            left: n,
            right: m,
        });
    }
    let (ul, ur) = split_word(x.creation(), n, m);
    let (vl, vr) = split_word(x.annihilation(), n, m);
    Ok([
        CuntzMonomial::from_words(ul, vl),
        CuntzMonomial::from_words(ur, vr),
    ])
}

/// The embedding `φ_{n,m} : O_{nm} → O_n ⊗ O_m`.
pub fn phi(n: usize, m: usize, x: &AlgebraElement) -> Result<TensorElement2> {
    let mut out = TensorElement2::zero();
    if n == 0 || m == 0 || x.n() != n * m {
        return Err(Error::BadFactorization {
            n: x.n(),
            left: n,
            right: m,
        });
    }
    for (mono, &c) in x.terms() {
        out.add_term(phi_monomial(n, m, mono)?, c);
    }
    out.prune();
    Ok(out)
}

/// `Δ_φ`, one `φ_{a,b}` block per ordered divisor pair of each component.
pub fn delta(x: &DirectSumElement) -> TensorElement2 {
    let mut out = TensorElement2::zero();
    for (&n, xn) in x.components() {
        for (a, b) in divisor_pairs(n) {
            for (mono, &c) in xn.terms() {
                out.add_term(phi_monomial(a, b, mono).expect("divisor pair"), c);
            }
        }
    }
    out.prune();
    out
}

pub fn delta_monomial(x: &CuntzMonomial) -> TensorElement2 {
    delta(&DirectSumElement::from(x.clone()))
}

/// `Δ^op = flip ∘ Δ`.
pub fn delta_op(x: &DirectSumElement) -> TensorElement2 {
    delta(x).flip()
}

pub fn delta_op_monomial(x: &CuntzMonomial) -> TensorElement2 {
    delta_monomial(x).flip()
}

/// `F_R = (id ⊗ Δ) ∘ Δ`.
pub fn f_r(x: &DirectSumElement) -> TensorElement3 {
    delta(x).extend_leg(1, delta_monomial)
}

/// `F_L = (Δ ⊗ id) ∘ Δ`.
pub fn f_l(x: &DirectSumElement) -> TensorElement3 {
    delta(x).extend_leg(0, delta_monomial)
}

/// `(Δ^op ⊗ id) ∘ Δ^op`.
pub fn opposite_left(x: &DirectSumElement) -> TensorElement3 {
    delta_op(x).extend_leg(0, delta_op_monomial)
}

/// `(id ⊗ Δ^op) ∘ Δ^op`.
pub fn opposite_right(x: &DirectSumElement) -> TensorElement3 {
    delta_op(x).extend_leg(1, delta_op_monomial)
}

/// `(Δ ⊗ id) ∘ Δ = (id ⊗ Δ) ∘ Δ` on `x`.
pub fn check_coassoc(x: &DirectSumElement) -> bool {
    f_r(x).canonical_equal(&f_l(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(n: usize, u: &[usize], v: &[usize]) -> CuntzMonomial {
        CuntzMonomial::new(n, u, v).unwrap()
    }

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    fn pure(a: CuntzMonomial, b: CuntzMonomial) -> TensorElement2 {
        TensorElement2::from_term([a, b], one())
    }

    #[test]
    fn phi_examples() {
        let x = AlgebraElement::from(mono(6, &[3], &[]));
        assert_eq!(
            phi(2, 3, &x).unwrap(),
            pure(mono(2, &[1], &[]), mono(3, &[3], &[]))
        );
        assert_eq!(
            phi(3, 2, &x).unwrap(),
            pure(mono(3, &[2], &[]), mono(2, &[1], &[]))
        );
        let x = AlgebraElement::from(mono(4, &[2], &[]));
        assert_eq!(
            phi(2, 2, &x).unwrap(),
            pure(mono(2, &[1], &[]), mono(2, &[2], &[]))
        );
    }

    #[test]
    fn phi_rejects_bad_factorization() {
        let x = AlgebraElement::unit(6);
        assert!(matches!(phi(2, 2, &x), Err(Error::BadFactorization { .. })));
        assert!(matches!(phi(0, 6, &x), Err(Error::BadFactorization { .. })));
    }

    #[test]
    fn phi_maps_annihilation_words_letterwise() {
        let x = AlgebraElement::from(mono(6, &[4], &[6, 1]));
        // 4 = 3·1 + 1, 6 = 3·1 + 3, 1 = 3·0 + 1
        let expected = pure(mono(2, &[2], &[2, 1]), mono(3, &[1], &[3, 1]));
        assert_eq!(phi(2, 3, &x).unwrap(), expected);
    }

    #[test]
    fn delta_examples() {
        let d = delta_monomial(&mono(4, &[1], &[]));
        let expected = pure(CuntzMonomial::unit(1), mono(4, &[1], &[]))
            .add(&pure(mono(2, &[1], &[]), mono(2, &[1], &[])))
            .add(&pure(mono(4, &[1], &[]), CuntzMonomial::unit(1)));
        assert_eq!(d, expected);
        let keys: Vec<_> = d.block_keys().copied().collect();
        assert_eq!(keys, vec![[1, 4], [2, 2], [4, 1]]);

        let d = delta_monomial(&mono(2, &[1], &[]));
        let expected = pure(CuntzMonomial::unit(1), mono(2, &[1], &[]))
            .add(&pure(mono(2, &[1], &[]), CuntzMonomial::unit(1)));
        assert_eq!(d, expected);

        let d = delta_monomial(&CuntzMonomial::unit(1));
        assert_eq!(d, pure(CuntzMonomial::unit(1), CuntzMonomial::unit(1)));
    }

    #[test]
    fn delta_op_examples() {
        let d = delta_op_monomial(&mono(6, &[3], &[]));
        let block = d.block(&[2, 3]).unwrap();
        assert_eq!(block.len(), 1);
        assert_eq!(
            block.keys().next().unwrap(),
            &[mono(2, &[1], &[]), mono(3, &[2], &[])]
        );

        let d = delta_op_monomial(&mono(4, &[2], &[]));
        let block = d.block(&[2, 2]).unwrap();
        assert_eq!(
            block.keys().next().unwrap(),
            &[mono(2, &[2], &[]), mono(2, &[1], &[])]
        );

        let u1 = CuntzMonomial::unit(1);
        assert_eq!(delta_op_monomial(&u1), pure(u1.clone(), u1));
    }

    #[test]
    fn tensor_arith_examples() {
        let a = mono(2, &[1], &[]);
        let b = mono(3, &[2], &[1]);
        assert_eq!(pure(a.clone(), b.clone()).flip(), pure(b, a));

        let x = pure(mono(2, &[1], &[]), mono(2, &[1], &[]));
        let y = pure(mono(2, &[], &[1]), mono(2, &[], &[1]));
        assert_eq!(x.mul(&y), pure(mono(2, &[1], &[1]), mono(2, &[1], &[1])));

        // mismatched blocks multiply to zero
        let z = pure(mono(3, &[], &[1]), mono(2, &[], &[1]));
        assert!(x.mul(&z).is_zero());
    }

    #[test]
    fn canonical_equal_uses_every_leg() {
        let unit = pure(CuntzMonomial::unit(2), CuntzMonomial::unit(3));
        let mut expanded = TensorElement2::zero();
        for i in 1..=2 {
            expanded.add_term([mono(2, &[i], &[i]), CuntzMonomial::unit(3)], one());
        }
        assert!(unit.canonical_equal(&expanded));
        let mut both = TensorElement2::zero();
        for i in 1..=2 {
            for j in 1..=3 {
                both.add_term([mono(2, &[i], &[i]), mono(3, &[j], &[j])], one());
            }
        }
        assert!(unit.canonical_equal(&both));
        let off = pure(mono(2, &[1], &[1]), CuntzMonomial::unit(3));
        assert!(!unit.canonical_equal(&off));
    }

    #[test]
    fn f_r_of_generator_of_o2() {
        let x = DirectSumElement::from(mono(2, &[1], &[]));
        let u = CuntzMonomial::unit(1);
        let s = mono(2, &[1], &[]);
        let mut expected = TensorElement3::zero();
        expected.add_term([u.clone(), u.clone(), s.clone()], one());
        expected.add_term([u.clone(), s.clone(), u.clone()], one());
        expected.add_term([s, u.clone(), u], one());
        assert_eq!(f_r(&x), expected);
        assert_eq!(f_l(&x), expected);
    }

    #[test]
    fn f_r_of_unit_of_o1() {
        let u = CuntzMonomial::unit(1);
        let x = DirectSumElement::from(u.clone());
        assert_eq!(
            f_r(&x),
            TensorElement3::from_term([u.clone(), u.clone(), u], one())
        );
    }

    #[test]
    fn coassoc_examples() {
        for w in 1..=6 {
            assert!(check_coassoc(&DirectSumElement::from(mono(6, &[w], &[]))));
        }
        assert!(check_coassoc(&DirectSumElement::from(
            AlgebraElement::unit(4)
        )));
    }

    #[test]
    fn delta_term_count_is_divisor_count() {
        for n in 1..=12 {
            let d = delta_monomial(&mono(n, &[], &[]));
            assert_eq!(d.num_terms(), divisor_pairs(n).len());
        }
        assert_eq!(divisor_pairs(12).len(), 6);
        assert_eq!(divisor_pairs(1), vec![(1, 1)]);
    }

    #[test]
    fn split_letter_inverts_radix() {
        for m in 1..5 {
            for i in 1..4 {
                for j in 1..=m {
                    assert_eq!(split_letter(m * (i - 1) + j, m), (i, j));
                }
            }
        }
    }
}
