//! Regularized iterated integrals of quasimodular forms.
//!
//! `I(f1,…,fn; τ)` is computed as the unique solution in `W[log q]` of
//! `D I(f1,…,fn) = −f1 · I(f2,…,fn)` with `I() = 1` and vanishing `q^0 L^0`
//! coefficient for `n ≥ 1`. This agrees with integrating from the cusp
//! `i∞`, where constant terms are integrated from 0 instead.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qseries::{LogQSeries, Rational};
use crate::quasimodular::{Expander, QMPoly};
use crate::shuffle_lyndon::{shuffle, Word};

/// `[f1|…|fn]`; the first letter is the outermost integrand.
pub type BarWord = Word<QMPoly>;

pub fn bar_word<I: IntoIterator<Item = QMPoly>>(letters: I) -> BarWord {
    Word(letters.into_iter().collect())
}

/// A finite `QM*`-linear combination of bar words.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BarCombo {
    terms: BTreeMap<BarWord, QMPoly>,
}

impl BarCombo {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The empty word with coefficient 1.
    pub fn unit() -> Self {
        Self::word(BarWord::empty())
    }

    pub fn word(w: BarWord) -> Self {
        Self::term(w, QMPoly::one())
    }

    pub fn term(w: BarWord, c: QMPoly) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
        out
    }

    /// A form viewed as a coefficient of the empty word.
    pub fn scalar(c: QMPoly) -> Self {
        Self::term(BarWord::empty(), c)
    }

    /// Adds `c·w`; words with a zero letter vanish by multilinearity.
    pub fn add_term(&mut self, w: BarWord, c: QMPoly) {
        if c.is_zero() || w.0.iter().any(Zero::is_zero) {
            return;
        }
        match self.terms.remove(&w) {
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(w, s);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BarWord, &QMPoly)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<BarWord, QMPoly> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_length(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn add(&self, other: &BarCombo) -> BarCombo {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &BarCombo) -> BarCombo {
        self.add(&other.scale(&-QMPoly::one()))
    }

    pub fn scale(&self, c: &QMPoly) -> BarCombo {
        let mut out = Self::zero();
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    /// Product in `QM* ⊗ (shuffle algebra)`.
    pub fn shuffle_mul(&self, other: &BarCombo) -> BarCombo {
        let mut out = Self::zero();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let coeff = cu * cv;
                for (w, n) in shuffle(u, v) {
                    out.add_term(w, coeff.scale(&Rational::from_integer(n.into())));
                }
            }
        }
        out
    }

    /// `D` applied to `Σ c·I(w)`, using `D I(f1,…,fn) = −f1·I(f2,…,fn)`.
    pub fn derive(&self) -> BarCombo {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.derive());
            if let Some((first, rest)) = w.0.split_first() {
                out.add_term(Word(rest.to_vec()), -&(c * first));
            }
        }
        out
    }

    /// True if every letter and coefficient lies in `M* = Q[E4, E6]`.
    pub fn is_modular(&self) -> bool {
        self.terms
            .iter()
            .all(|(w, c)| c.is_modular() && w.0.iter().all(QMPoly::is_modular))
    }
}

impl fmt::Display for BarCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let word = format_integral(w.0.iter().map(|l| l.to_string()));
            if w.is_empty() {
                write!(f, "({c})")?;
            } else if c.is_one() {
                f.write_str(&word)?;
            } else {
                write!(f, "({c})*{word}")?;
            }
        }
        Ok(())
    }
}

pub(crate) fn format_integral<I: Iterator<Item = String>>(letters: I) -> String {
    format!("I({})", letters.collect::<Vec<_>>().join(","))
}

/// Computes iterated integrals at a fixed truncation, memoizing suffixes.
///
/// Not shared between threads; create one engine per thread.
#[derive(Debug, Clone)]
pub struct IntegralEngine {
    expander: Expander,
    memo: HashMap<Vec<QMPoly>, LogQSeries>,
}

impl IntegralEngine {
    pub fn new(trunc: usize) -> Self {
        IntegralEngine {
            expander: Expander::new(trunc),
            memo: HashMap::new(),
        }
    }

    pub fn trunc(&self) -> usize {
        self.expander.trunc()
    }

    pub fn expand(&mut self, p: &QMPoly) -> LogQSeries {
        LogQSeries::from_qseries(self.expander.expand(p))
    }

    pub fn integral(&mut self, w: &BarWord) -> LogQSeries {
        self.integral_of(&w.0)
    }

    fn integral_of(&mut self, letters: &[QMPoly]) -> LogQSeries {
        if letters.is_empty() {
            return LogQSeries::one(self.trunc());
        }
        if let Some(s) = self.memo.get(letters) {
            return s.clone();
        }
        let tail = self.integral_of(&letters[1..]);
        let integrand = &self.expand(&letters[0]) * &tail;
        let value = (-&integrand).primitive();
        self.memo.insert(letters.to_vec(), value.clone());
        value
    }

    /// `Σ expand(c)·I(w)` over the combination.
    pub fn expand_combo(&mut self, c: &BarCombo) -> LogQSeries {
        let mut acc = LogQSeries::zero(self.trunc());
        for (w, coeff) in c.terms() {
            let term = &self.expand(coeff) * &self.integral(w);
            acc = &acc + &term;
        }
        acc
    }
}

/// `I(w)` modulo `q^{trunc+1}`.
pub fn iter_integral(w: &BarWord, trunc: usize) -> LogQSeries {
    IntegralEngine::new(trunc).integral(w)
}

pub fn expand_combo(c: &BarCombo, trunc: usize) -> LogQSeries {
    IntegralEngine::new(trunc).expand_combo(c)
}

/// `[w1] ⧢ [w2]` with unit coefficients.
pub fn shuffle_product_words(w1: &BarWord, w2: &BarWord) -> BarCombo {
    BarCombo::word(w1.clone()).shuffle_mul(&BarCombo::word(w2.clone()))
}

/// `R[f1|…|fn] = Σ_i (−1)^{n−i} [f1|…|fi] ⧢ [fn^∞|…|f_{i+1}^∞]`.
pub fn r_map(w: &BarWord) -> BarCombo {
    let n = w.len();
    let mut out = BarCombo::zero();
    for i in 0..=n {
        let head = Word(w.0[..i].to_vec());
        let tail_constants = Word(
            w.0[i..]
                .iter()
                .rev()
                .map(|f| QMPoly::constant(f.value_at_cusp()))
                .collect(),
        );
        let sign = if (n - i).is_multiple_of(2) { 1 } else { -1 };
        let term = shuffle_product_words(&head, &tail_constants)
            .scale(&QMPoly::constant(Rational::from_integer(sign.into())));
        out = out.add(&term);
    }
    out
}

fn concat(parts: &[&[QMPoly]]) -> BarWord {
    Word(parts.iter().flat_map(|p| p.iter().cloned()).collect())
}

/// `I(…, fi, D(g), f_{i+1}, …) = I(…, fi, g·f_{i+1}, …) − I(…, fi·g, f_{i+1}, …)`.
pub fn ibp_middle(prefix: &BarWord, g: &QMPoly, suffix: &BarWord) -> Result<BarCombo> {
    let (Some((last, front)), Some((next, rest))) = (prefix.0.split_last(), suffix.0.split_first())
    else {
        return Err(Error::Precondition(
            "ibp_middle needs a nonempty prefix and suffix".into(),
        ));
    };
    let moved_right = concat(&[&prefix.0, &[g * next], rest]);
    let moved_left = concat(&[front, &[last * g], &suffix.0]);
    let mut out = BarCombo::word(moved_right);
    out.add_term(moved_left, -QMPoly::one());
    Ok(out)
}

/// Result of eliminating a leading `D(g)`: `I(D(g), f2, …) = combo + boundary.0 · I(boundary.1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstLetterIbp {
    pub combo: BarCombo,
    pub boundary: (QMPoly, BarWord),
}

impl FirstLetterIbp {
    pub fn to_combo(&self) -> BarCombo {
        let mut out = self.combo.clone();
        out.add_term(self.boundary.1.clone(), self.boundary.0.clone());
        out
    }
}

/// `I(D(g), f2, …, fn) = I(g·f2, f3, …, fn) − g·I(f2, …, fn)`.
pub fn ibp_first(g: &QMPoly, rest: &BarWord) -> Result<FirstLetterIbp> {
    let Some((next, tail)) = rest.0.split_first() else {
        return Err(Error::Precondition(
            "ibp_first needs a nonempty remainder; use ibp_last for a single letter".into(),
        ));
    };
    Ok(FirstLetterIbp {
        combo: BarCombo::word(concat(&[&[g * next], tail])),
        boundary: (-g, rest.clone()),
    })
}

/// Result of eliminating a trailing `D(g)`: `I(front, D(g)) = scalar·I(front) − correction`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LastLetterIbp {
    pub scalar: Rational,
    pub front: BarWord,
    pub correction: BarCombo,
}

impl LastLetterIbp {
    pub fn to_combo(&self) -> BarCombo {
        let mut out = BarCombo::term(self.front.clone(), QMPoly::constant(self.scalar.clone()));
        out = out.sub(&self.correction);
        out
    }
}

/// `I(f1, …, f_{n−1}, D(g)) = g(i∞)·I(f1, …, f_{n−1}) − I(f1, …, f_{n−1}·g)`.
///
/// With an empty front this reads `I(D(g)) = g(i∞) − g`.
pub fn ibp_last(front: &BarWord, g: &QMPoly) -> LastLetterIbp {
    let correction = match front.0.split_last() {
        Some((last, init)) => BarCombo::word(concat(&[init, &[last * g]])),
        None => BarCombo::scalar(g.clone()),
    };
    LastLetterIbp {
        scalar: g.value_at_cusp(),
        front: front.clone(),
        correction,
    }
}
