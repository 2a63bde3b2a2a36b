//! Shuffle algebra over a totally ordered alphabet.
//!
//! Words compare lexicographically (a proper prefix is smaller). Lyndon words
//! freely generate the shuffle algebra over a field of characteristic zero;
//! [`to_lyndon_basis`] computes the polynomial in Lyndon words representing
//! an arbitrary word.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qseries::Rational;

/// A finite word; the derived order is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word<T>(pub Vec<T>);

impl<T> Word<T> {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[T] {
        &self.0
    }
}

impl<T> From<Vec<T>> for Word<T> {
    fn from(v: Vec<T>) -> Self {
        Word(v)
    }
}

impl<T: fmt::Display> fmt::Display for Word<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            l.fmt(f)?;
        }
        Ok(())
    }
}

/// Shuffle product with multiplicities.
pub fn shuffle<T: Ord + Clone>(u: &Word<T>, v: &Word<T>) -> BTreeMap<Word<T>, u64> {
    let (n, m) = (u.len(), v.len());
    // table[i][j] holds the shuffle of u[i..] and v[j..], filled from the back.
    let mut table: Vec<Vec<BTreeMap<Vec<T>, u64>>> = vec![vec![BTreeMap::new(); m + 1]; n + 1];
    for i in (0..=n).rev() {
        for j in (0..=m).rev() {
            let mut cell: BTreeMap<Vec<T>, u64> = BTreeMap::new();
            if i == n {
                cell.insert(v.0[j..].to_vec(), 1);
            } else if j == m {
                cell.insert(u.0[i..].to_vec(), 1);
            } else {
                for (head, src) in [(&u.0[i], &table[i + 1][j]), (&v.0[j], &table[i][j + 1])] {
                    for (tail, c) in src {
                        let mut w = Vec::with_capacity(tail.len() + 1);
                        w.push(head.clone());
                        w.extend_from_slice(tail);
                        *cell.entry(w).or_insert(0) += c;
                    }
                }
            }
            table[i][j] = cell;
        }
    }
    std::mem::take(&mut table[0][0])
        .into_iter()
        .map(|(w, c)| (Word(w), c))
        .collect()
}

/// Shuffle product of several words, as a linear combination.
pub fn shuffle_all<T: Ord + Clone>(words: &[Word<T>]) -> BTreeMap<Word<T>, u64> {
    let mut acc: BTreeMap<Word<T>, u64> = BTreeMap::from([(Word::empty(), 1)]);
    for w in words {
        let mut next = BTreeMap::new();
        for (a, ca) in &acc {
            for (b, cb) in shuffle(a, w) {
                *next.entry(b).or_insert(0) += ca * cb;
            }
        }
        acc = next;
    }
    acc
}

/// A word is Lyndon if it is nonempty and strictly smaller than each of its proper suffixes.
pub fn is_lyndon<T: Ord>(w: &Word<T>) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w.0[..] < w.0[i..])
}

/// All Lyndon words of length `1..=max_len` over `alphabet`, in lexicographic order.
///
/// `alphabet` must be strictly increasing. Enumeration follows Duval's algorithm.
pub fn lyndon_words<T: Ord + Clone>(alphabet: &[T], max_len: usize) -> Vec<Word<T>> {
    debug_assert!(alphabet.windows(2).all(|p| p[0] < p[1]));
    let k = alphabet.len();
    let mut out = Vec::new();
    if k == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(Word(w.iter().map(|&i| alphabet[i].clone()).collect()));
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(k - 1)) {
            w.pop();
        }
        match w.last_mut() {
            Some(last) => *last += 1,
            None => break,
        }
    }
    out
}

/// Lyndon words whose total letter weight is at most `max_weight`.
pub fn lyndon_words_weighted<T, F>(
    alphabet: &[T],
    max_len: usize,
    weight: F,
    max_weight: u32,
) -> Vec<Word<T>>
where
    T: Ord + Clone,
    F: Fn(&T) -> u32,
{
    let usable: Vec<T> = alphabet
        .iter()
        .filter(|l| weight(l) <= max_weight)
        .cloned()
        .collect();
    lyndon_words(&usable, max_len)
        .into_iter()
        .filter(|w| w.0.iter().map(&weight).sum::<u32>() <= max_weight)
        .collect()
}

/// Chen–Fox–Lyndon factorization into a nonincreasing sequence of Lyndon words (Duval).
pub fn lyndon_factorize<T: Ord + Clone>(w: &Word<T>) -> Result<Vec<Word<T>>> {
    if w.is_empty() {
        return Err(Error::Precondition(
            "the empty word has no Lyndon factorization".into(),
        ));
    }
    let s = &w.0;
    let n = s.len();
    let mut factors = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        let mut k = i;
        while j < n && s[k] <= s[j] {
            if s[k] < s[j] {
                k = i;
            } else {
                k += 1;
            }
            j += 1;
        }
        while i <= k {
            factors.push(Word(s[i..i + j - k].to_vec()));
            i += j - k;
        }
    }
    Ok(factors)
}

/// Coefficient rings usable in [`LyndonPoly`].
pub trait Coefficient:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(r: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
}

/// A commutative monomial in Lyndon words, stored as a nonincreasing list of factors.
pub type LyndonMonomial<T> = Vec<Word<T>>;

/// A polynomial in Lyndon words with coefficients in `C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LyndonPoly<T: Ord, C> {
    terms: BTreeMap<LyndonMonomial<T>, C>,
}

impl<T: Ord + Clone, C: Coefficient> LyndonPoly<T, C> {
    pub fn zero() -> Self {
        LyndonPoly {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Vec::new(), c)
    }

    /// `c · Π factors`; panics if a factor is not Lyndon.
    pub fn monomial(mut factors: LyndonMonomial<T>, c: C) -> Self {
        assert!(
            factors.iter().all(is_lyndon),
            "monomial factors must be Lyndon words"
        );
        factors.sort_by(|a, b| b.cmp(a));
        let mut p = Self::zero();
        p.add_term(factors, c);
        p
    }

    pub fn add_term(&mut self, key: LyndonMonomial<T>, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&key) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(key, s);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LyndonMonomial<T>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> LyndonPoly<T, D> {
        let mut out = LyndonPoly::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    /// Multiplies out each monomial with the shuffle product.
    pub fn shuffle_out(&self) -> BTreeMap<Word<T>, C> {
        let mut out: BTreeMap<Word<T>, C> = BTreeMap::new();
        for (factors, c) in &self.terms {
            for (w, n) in shuffle_all(factors) {
                let term = c.clone() * C::from_rational(&Rational::from_integer(BigInt::from(n)));
                let slot = out.entry(w.clone()).or_insert_with(C::zero);
                *slot = slot.clone() + term;
                if slot.is_zero() {
                    out.remove(&w);
                }
            }
        }
        out
    }
}

impl<T: Ord + Clone, C: Coefficient> Add for &LyndonPoly<T, C> {
    type Output = LyndonPoly<T, C>;
    fn add(self, rhs: &LyndonPoly<T, C>) -> LyndonPoly<T, C> {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }
}

impl<T: Ord + Clone, C: Coefficient> Sub for &LyndonPoly<T, C> {
    type Output = LyndonPoly<T, C>;
    fn sub(self, rhs: &LyndonPoly<T, C>) -> LyndonPoly<T, C> {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(k.clone(), -v.clone());
        }
        out
    }
}

impl<T: Ord + Clone, C: Coefficient> Mul for &LyndonPoly<T, C> {
    type Output = LyndonPoly<T, C>;
    fn mul(self, rhs: &LyndonPoly<T, C>) -> LyndonPoly<T, C> {
        let mut out = LyndonPoly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                let mut key: Vec<Word<T>> = ka.iter().chain(kb).cloned().collect();
                key.sort_by(|a, b| b.cmp(a));
                out.add_term(key, va.clone() * vb.clone());
            }
        }
        out
    }
}

/// Expresses `w` as a polynomial in Lyndon words under the shuffle product.
///
/// If `w = l1^{i1} … lk^{ik}` is the Lyndon factorization, the shuffle of those
/// factors equals `(Π i_j!)·w` plus words of the same length that are
/// lexicographically smaller than `w`. Eliminating the largest remaining word
/// first therefore terminates.
pub fn to_lyndon_basis<T: Ord + Clone>(w: &Word<T>) -> LyndonPoly<T, Rational> {
    let mut result = LyndonPoly::zero();
    if w.is_empty() {
        return LyndonPoly::constant(Rational::one());
    }
    let mut remainder: BTreeMap<Word<T>, Rational> = BTreeMap::from([(w.clone(), Rational::one())]);
    while let Some((u, c)) = remainder.pop_last() {
        let factors = lyndon_factorize(&u).expect("nonempty");
        let product = shuffle_all(&factors);
        let lead = Rational::from_integer(BigInt::from(product[&u]));
        let ratio = c / lead;
        for (v, n) in product {
            if v == u {
                continue;
            }
            debug_assert!(v < u && v.len() == u.len());
            let slot = remainder.entry(v.clone()).or_insert_with(Rational::zero);
            *slot -= &ratio * BigInt::from(n);
            if slot.is_zero() {
                remainder.remove(&v);
            }
        }
        result.add_term(
            {
                let mut f = factors;
                f.sort_by(|a, b| b.cmp(a));
                f
            },
            ratio,
        );
    }
    result
}

/// [`to_lyndon_basis`] extended linearly.
pub fn combination_to_lyndon_basis<T: Ord + Clone, C: Coefficient>(
    combo: &BTreeMap<Word<T>, C>,
) -> LyndonPoly<T, C> {
    let mut out = LyndonPoly::zero();
    for (w, c) in combo {
        let p = to_lyndon_basis(w).map_coeffs(|r| C::from_rational(r) * c.clone());
        out = &out + &p;
    }
    out
}
