//! Normal-form arithmetic in the algebraic part of the Cuntz algebras.
//!
//! Every element of the dense *-subalgebra of `O_n` generated by
//! `s_1, ..., s_n` is a finite combination of monomials `s_u s_v*`, where
//! `s_u = s_{u_1} ⋯ s_{u_a}` and `s_v* = (s_{v_1} ⋯ s_{v_b})*`. The relation
//! `s_i* s_j = δ_ij I` makes products of such monomials again monomials (or
//! zero). The relation `Σ_i s_i s_i* = I` makes the representation
//! non-unique; [`AlgebraElement::canonical_equal`] decides equality by
//! expanding every degree class to a common annihilation length, where the
//! monomials are linearly independent.
//!
//! Generator indices are 1-based. `O_1` is `C` with `s_1 = I`, so every word
//! of `O_1` collapses to the identity word.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;

use crate::{Error, Result, C64, EQ_TOL, ZERO_TOL};

/// A word `s_{l_1} ⋯ s_{l_k}` in the generators of `O_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CuntzWord {
    n: usize,
    letters: Vec<usize>,
}

impl CuntzWord {
    pub fn new(n: usize, letters: Vec<usize>) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroIndex);
        }
        if let Some(&letter) = letters.iter().find(|&&l| l == 0 || l > n) {
            return Err(Error::BadLetter { n, letter });
        }
        Ok(Self::from_checked(n, letters))
    }

    /// Skips validation; letters must already lie in `1..=n`.
    pub(crate) fn from_checked(n: usize, letters: Vec<usize>) -> Self {
        debug_assert!(n >= 1 && letters.iter().all(|&l| l >= 1 && l <= n));
        // s_1 = I in O_1
        let letters = if n == 1 { Vec::new() } else { letters };
        Self { n, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            letters: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self · other`.
    pub fn concat(&self, other: &[usize]) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(other);
        Self::from_checked(self.n, letters)
    }

    /// If `prefix` is a prefix of `self`, the remainder.
    fn strip_prefix(&self, prefix: &[usize]) -> Option<&[usize]> {
        self.letters.strip_prefix(prefix)
    }
}

/// All words of length `len` over `1..=n`, in lexicographic order.
pub fn words_of_length(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = if n == 1 {
        // O_1 has a single word of every length, which collapses to I.
        1
    } else {
        n.checked_pow(len as u32).expect("word count overflow")
    };
    (0..total).map(move |mut idx| {
        let mut word = vec![1; len];
        if n > 1 {
            for slot in word.iter_mut().rev() {
                *slot = idx % n + 1;
                idx /= n;
            }
        }
        word
    })
}

/// Creation words of `O_n` with length at most `max_len`, shortest first.
pub fn creation_words(n: usize, max_len: usize) -> Vec<CuntzMonomial> {
    let max_len = if n == 1 { 0 } else { max_len };
    (0..=max_len)
        .flat_map(|len| words_of_length(n, len))
        .map(|w| CuntzMonomial::from_words(CuntzWord::from_checked(n, w), CuntzWord::identity(n)))
        .collect()
}

/// Monomials `s_u s_v*` of `O_n` with `|u| + |v| <= max_len`, in
/// length-lexicographic order: total length first, then longer creation
/// parts first, then lexicographic on `u` and `v`.
pub fn monomials_up_to(n: usize, max_len: usize) -> Vec<CuntzMonomial> {
    let max_len = if n == 1 { 0 } else { max_len };
    let mut out = Vec::new();
    for total in 0..=max_len {
        for ulen in (0..=total).rev() {
            for u in words_of_length(n, ulen) {
                for v in words_of_length(n, total - ulen) {
                    out.push(CuntzMonomial::from_words(
                        CuntzWord::from_checked(n, u.clone()),
                        CuntzWord::from_checked(n, v),
                    ));
                }
            }
        }
    }
    out
}

/// A normal-form monomial `s_u s_v*` in `O_n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CuntzMonomial {
    u: CuntzWord,
    v: CuntzWord,
}

impl CuntzMonomial {
    pub fn new(n: usize, u: &[usize], v: &[usize]) -> Result<Self> {
        Ok(Self {
            u: CuntzWord::new(n, u.to_vec())?,
            v: CuntzWord::new(n, v.to_vec())?,
        })
    }

    /// Panics if the two words live in different algebras.
    pub fn from_words(u: CuntzWord, v: CuntzWord) -> Self {
        assert_eq!(u.n, v.n, "creation and annihilation words must share n");
        Self { u, v }
    }

    pub fn unit(n: usize) -> Self {
        Self::from_words(CuntzWord::identity(n), CuntzWord::identity(n))
    }

    /// The generator `s_i` of `O_n`.
    pub fn generator(n: usize, i: usize) -> Result<Self> {
        Self::new(n, &[i], &[])
    }

    pub fn n(&self) -> usize {
        self.u.n
    }

    pub fn creation(&self) -> &CuntzWord {
        &self.u
    }

    pub fn annihilation(&self) -> &CuntzWord {
        &self.v
    }

    /// `|u| - |v|`, the charge under the gauge action.
    pub fn degree(&self) -> i64 {
        self.u.len() as i64 - self.v.len() as i64
    }

    pub fn is_unit(&self) -> bool {
        self.u.is_empty() && self.v.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    /// Normal form of `self · other`, `None` when the product vanishes.
    pub fn product(&self, other: &Self) -> Result<Option<Self>> {
        if self.n() != other.n() {
            return Err(Error::MismatchedAlgebra {
                left: self.n(),
                right: other.n(),
            });
        }
        // s_v* s_u' contracts to s_w (v prefix of u'), s_w* (u' prefix of v) or 0.
        if let Some(rest) = other.u.strip_prefix(&self.v.letters) {
            return Ok(Some(Self {
                u: self.u.concat(rest),
                v: other.v.clone(),
            }));
        }
        if let Some(rest) = self.v.strip_prefix(&other.u.letters) {
            return Ok(Some(Self {
                u: self.u.clone(),
                v: other.v.concat(rest),
            }));
        }
        Ok(None)
    }

    /// `Σ_{|w| = target - |v|} s_{uw} s_{vw}*`, equal to `self` in `O_n`.
    pub fn level_expand(&self, target: usize) -> Result<Vec<Self>> {
        let found = self.v.len();
        if target < found {
            return Err(Error::BadLevel { target, found });
        }
        if self.n() == 1 || target == found {
            return Ok(vec![self.clone()]);
        }
        Ok(words_of_length(self.n(), target - found)
            .map(|w| Self {
                u: self.u.concat(&w),
                v: self.v.concat(&w),
            })
            .collect())
    }
}

fn join_letters(letters: &[usize]) -> String {
    letters
        .iter()
        .map(|l| l.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `n=<int>;u=<comma-list>;v=<comma-list>`
impl fmt::Display for CuntzMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={};u={};v={}",
            self.n(),
            join_letters(&self.u.letters),
            join_letters(&self.v.letters)
        )
    }
}

impl FromStr for CuntzMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(s.to_string());
        let mut parts = s.trim().split(';');
        let mut field = |key: &str| -> Result<&str> {
            parts
                .next()
                .and_then(|p| p.strip_prefix(key))
                .and_then(|p| p.strip_prefix('='))
                .ok_or_else(bad)
        };
        let n: usize = field("n")?.trim().parse().map_err(|_| bad())?;
        let parse_list = |list: &str| -> Result<Vec<usize>> {
            if list.trim().is_empty() {
                return Ok(Vec::new());
            }
            list.split(',')
                .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                .collect()
        };
        let u = parse_list(field("u")?)?;
        let v = parse_list(field("v")?)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::new(n, &u, &v)
    }
}

/// Uniformly random monomial with `|u|, |v| <= max_len`.
pub fn random_monomial<R: Rng + ?Sized>(rng: &mut R, n: usize, max_len: usize) -> CuntzMonomial {
    let word = |rng: &mut R| {
        let len = rng.gen_range(0..=max_len);
        let letters = (0..len).map(|_| rng.gen_range(1..=n)).collect();
        CuntzWord::from_checked(n, letters)
    };
    let u = word(rng);
    let v = word(rng);
    CuntzMonomial::from_words(u, v)
}

/// Random monomial whose total length `|u| + |v|` is at most `max_total`.
pub fn random_monomial_total<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    max_total: usize,
) -> CuntzMonomial {
    let total = rng.gen_range(0..=max_total);
    let ulen = rng.gen_range(0..=total);
    let u = (0..ulen).map(|_| rng.gen_range(1..=n)).collect();
    let v = (0..total - ulen).map(|_| rng.gen_range(1..=n)).collect();
    CuntzMonomial::from_words(CuntzWord::from_checked(n, u), CuntzWord::from_checked(n, v))
}

fn check_same(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::MismatchedAlgebra { left, right })
    }
}

/// A finite linear combination of monomials of one `O_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    n: usize,
    terms: BTreeMap<CuntzMonomial, C64>,
}

impl AlgebraElement {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(n: usize) -> Self {
        Self::from(CuntzMonomial::unit(n))
    }

    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (CuntzMonomial, C64)>,
    {
        let mut out = Self::zero(n);
        for (m, c) in terms {
            check_same(n, m.n())?;
            out.accumulate(m, c);
        }
        out.prune();
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CuntzMonomial, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &CuntzMonomial) -> C64 {
        self.terms.get(m).copied().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, m: CuntzMonomial, c: C64) {
        *self.terms.entry(m).or_default() += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= ZERO_TOL);
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.accumulate(m.clone(), c);
        }
        out.prune();
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &a)| (m.clone(), a * c))
                .collect(),
        };
        out.prune();
        out
    }

    /// Bilinear extension of [`CuntzMonomial::product`].
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        check_same(self.n, other.n)?;
        let mut out = Self::zero(self.n);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if let Some(m) = a.product(b)? {
                    out.accumulate(m, ca * cb);
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.adjoint(), c.conj()))
                .collect(),
        }
    }

    /// Rewrites every term to annihilation length exactly `target`.
    pub fn level_expand(&self, target: usize) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (m, &c) in &self.terms {
            for e in m.level_expand(target)? {
                out.accumulate(e, c);
            }
        }
        out.prune();
        Ok(out)
    }

    /// Canonical form: per degree class, all terms expanded to the longest
    /// annihilation length present in that class. Equal elements of `O_n`
    /// have identical canonical forms up to rounding.
    pub fn canonical_form(&self) -> BTreeMap<CuntzMonomial, C64> {
        let mut target: BTreeMap<i64, usize> = BTreeMap::new();
        for m in self.terms.keys() {
            let t = target.entry(m.degree()).or_default();
            *t = (*t).max(m.annihilation().len());
        }
        let mut out: BTreeMap<CuntzMonomial, C64> = BTreeMap::new();
        for (m, &c) in &self.terms {
            let level = target[&m.degree()];
            for e in m.level_expand(level).expect("level is a class maximum") {
                *out.entry(e).or_default() += c;
            }
        }
        out
    }

    /// Equality in `O_n`, modulo the Cuntz relations.
    pub fn canonical_equal(&self, other: &Self) -> Result<bool> {
        let diff = self.try_sub(other)?;
        Ok(diff.canonical_form().values().all(|c| c.norm() <= EQ_TOL))
    }

    /// The automorphism `α_U(s_j) = Σ_i U_ij s_i` for a unitary `U`.
    pub fn unitary_action(&self, u: &DMatrix<C64>) -> Result<Self> {
        check_same(self.n, u.nrows())?;
        let n = self.n;
        let mut out = Self::zero(n);
        for (m, &c) in &self.terms {
            let create = expand_letters(n, m.creation().letters(), |i, j| u[(i - 1, j - 1)]);
            let annihilate = expand_letters(n, m.annihilation().letters(), |i, j| {
                u[(i - 1, j - 1)].conj()
            });
            for (a, ca) in &create {
                for (b, cb) in &annihilate {
                    let mono = CuntzMonomial::from_words(
                        CuntzWord::from_checked(n, a.clone()),
                        CuntzWord::from_checked(n, b.clone()),
                    );
                    out.accumulate(mono, c * ca * cb);
                }
            }
        }
        out.prune();
        Ok(out)
    }
}

/// `Π_k (Σ_i f(i, w_k) s_i)` expanded into words with coefficients.
fn expand_letters(
    n: usize,
    word: &[usize],
    f: impl Fn(usize, usize) -> C64,
) -> Vec<(Vec<usize>, C64)> {
    let mut acc = vec![(Vec::new(), C64::new(1.0, 0.0))];
    for &letter in word {
        let mut next = Vec::with_capacity(acc.len() * n);
        for (w, c) in &acc {
            for i in 1..=n {
                let coef = f(i, letter);
                if coef.norm() < ZERO_TOL {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(i);
                next.push((w2, c * coef));
            }
        }
        acc = next;
    }
    acc
}

impl From<CuntzMonomial> for AlgebraElement {
    fn from(m: CuntzMonomial) -> Self {
        let n = m.n();
        let mut terms = BTreeMap::new();
        terms.insert(m, C64::new(1.0, 0.0));
        Self { n, terms }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})·[{m}]")?;
        }
        Ok(())
    }
}

/// A finitely supported element `(x_n)` of `O_* = ⊕_n O_n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DirectSumElement {
    components: BTreeMap<usize, AlgebraElement>,
}

impl DirectSumElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn component(&self, n: usize) -> Option<&AlgebraElement> {
        self.components.get(&n)
    }

    pub fn components(&self) -> impl Iterator<Item = (&usize, &AlgebraElement)> {
        self.components.iter()
    }

    /// Inserts (or adds to) the component of `x.n()`.
    pub fn with_component(mut self, x: AlgebraElement) -> Self {
        let n = x.n();
        let merged = match self.components.remove(&n) {
            Some(prev) => prev.try_add(&x).expect("same index"),
            None => x,
        };
        if !merged.is_zero() {
            self.components.insert(n, merged);
        }
        self
    }

    fn zip_with(
        &self,
        other: &Self,
        keep_unmatched: bool,
        f: impl Fn(&AlgebraElement, &AlgebraElement) -> AlgebraElement,
    ) -> Self {
        let mut components = BTreeMap::new();
        let keys: std::collections::BTreeSet<usize> = self
            .components
            .keys()
            .chain(other.components.keys())
            .copied()
            .collect();
        for n in keys {
            let value = match (self.components.get(&n), other.components.get(&n)) {
                (Some(a), Some(b)) => f(a, b),
                (Some(a), None) if keep_unmatched => f(a, &AlgebraElement::zero(n)),
                (None, Some(b)) if keep_unmatched => f(&AlgebraElement::zero(n), b),
                _ => continue,
            };
            if !value.is_zero() {
                components.insert(n, value);
            }
        }
        Self { components }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, true, |a, b| a.try_add(b).expect("keys match"))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, true, |a, b| a.try_sub(b).expect("keys match"))
    }

    /// Componentwise product; components present on one side only vanish.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, false, |a, b| a.try_mul(b).expect("keys match"))
    }

    pub fn scale(&self, c: C64) -> Self {
        let components = self
            .components
            .iter()
            .map(|(&n, x)| (n, x.scale(c)))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        Self { components }
    }

    pub fn adjoint(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|(&n, x)| (n, x.adjoint()))
            .collect();
        Self { components }
    }

    pub fn canonical_equal(&self, other: &Self) -> bool {
        self.sub(other)
            .components
            .values()
            .all(|x| x.canonical_form().values().all(|c| c.norm() <= EQ_TOL))
    }
}

impl From<AlgebraElement> for DirectSumElement {
    fn from(x: AlgebraElement) -> Self {
        Self::zero().with_component(x)
    }
}

impl From<CuntzMonomial> for DirectSumElement {
    fn from(m: CuntzMonomial) -> Self {
        Self::from(AlgebraElement::from(m))
    }
}

/// Normal form of `a · b` as an element (at most one term).
pub fn mono_product(a: &CuntzMonomial, b: &CuntzMonomial) -> Result<AlgebraElement> {
    Ok(match a.product(b)? {
        Some(m) => AlgebraElement::from(m),
        None => AlgebraElement::zero(a.n()),
    })
}
