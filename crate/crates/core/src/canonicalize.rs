//! Canonical forms of iterated integrals of quasimodular forms.
//!
//! Every letter is split as `c·E2 + m + D(h)` with `m` modular. The basis
//! parts become letters of the ordered alphabet `B`; each `D(h)` letter is
//! removed by integration by parts, which shortens the word. The result, a
//! combination of words over `B` with quasimodular coefficients, is then
//! rewritten as a polynomial in Lyndon words.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::iterint::{
    format_integral, ibp_first, ibp_last, ibp_middle, BarCombo, BarWord, IntegralEngine,
};
use crate::linalg;
use crate::qseries::{LogQSeries, Rational};
use crate::quasimodular::{basis_b, decompose, BasisB, BasisLetter, QMPoly};
use crate::shuffle_lyndon::{combination_to_lyndon_basis, is_lyndon, LyndonPoly, Word};

/// The basis letter a form equals exactly, if any.
pub fn as_basis_letter(p: &QMPoly) -> Option<BasisLetter> {
    let (m, c) = p.as_single_term()?;
    if c.is_one() {
        BasisLetter::new(m)
    } else {
        None
    }
}

/// `f = Σ r_j·b_j + D(h)` with `b_j ∈ B`.
fn split_letter(f: &QMPoly) -> (Vec<(BasisLetter, Rational)>, QMPoly) {
    let mut basis_part = Vec::new();
    let mut primitive = QMPoly::zero();
    for part in f.homogeneous_parts().into_values() {
        let d = decompose(&part).expect("homogeneous part");
        if !d.e2_coeff.is_zero() {
            basis_part.push((BasisLetter::e2(), d.e2_coeff));
        }
        for (m, c) in d.modular.terms() {
            basis_part.push((BasisLetter::new(*m).expect("modular monomial"), c.clone()));
        }
        primitive = &primitive + &d.primitive;
    }
    (basis_part, primitive)
}

/// Rewrites the combination so that every letter is an element of `B`.
///
/// Each step either replaces a non-basis letter by basis letters (same length,
/// one fewer non-basis letter) or removes a `D(h)` letter by integration by
/// parts (shorter words), so the rewriting terminates.
pub fn reduce_letters(c: &BarCombo) -> BarCombo {
    let mut done = BarCombo::zero();
    let mut pending: BTreeMap<BarWord, QMPoly> = c.clone().into_terms();
    while !pending.is_empty() {
        let mut next = BarCombo::zero();
        for (w, coeff) in std::mem::take(&mut pending) {
            let Some(i) = w.0.iter().position(|l| as_basis_letter(l).is_none()) else {
                done.add_term(w, coeff);
                continue;
            };
            let (basis_part, h) = split_letter(&w.0[i]);
            for (b, r) in basis_part {
                let mut letters = w.0.clone();
                letters[i] = b.to_poly();
                next.add_term(Word(letters), coeff.scale(&r));
            }
            if h.is_zero() {
                continue;
            }
            let n = w.len();
            let prefix = Word(w.0[..i].to_vec());
            let suffix = Word(w.0[i + 1..].to_vec());
            let expanded = if i + 1 == n {
                ibp_last(&prefix, &h).to_combo()
            } else if i == 0 {
                ibp_first(&h, &suffix).expect("nonempty suffix").to_combo()
            } else {
                ibp_middle(&prefix, &h, &suffix).expect("interior letter")
            };
            next = next.add(&expanded.scale(&coeff));
        }
        pending = next.into_terms();
    }
    done
}

/// An element of `QM*[Lyn(B*)]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub poly: LyndonPoly<BasisLetter, QMPoly>,
    pub modular_only: bool,
}

impl CanonicalForm {
    /// The basis `B` (or `B_M`) up to the largest letter weight used.
    pub fn basis(&self) -> BasisB {
        let max_weight = self
            .poly
            .terms()
            .flat_map(|(factors, _)| factors.iter().flat_map(|w| w.0.iter()))
            .map(BasisLetter::weight)
            .max()
            .unwrap_or(0);
        basis_b(max_weight, self.modular_only)
    }

    /// Multiplies out the Lyndon monomials into a combination of words over `B`.
    pub fn to_bar_combo(&self) -> BarCombo {
        let mut out = BarCombo::zero();
        for (w, c) in self.poly.shuffle_out() {
            out.add_term(Word(w.0.iter().map(BasisLetter::to_poly).collect()), c);
        }
        out
    }

    /// Evaluates the polynomial with each Lyndon word replaced by its integral.
    pub fn expand(&self, engine: &mut IntegralEngine) -> LogQSeries {
        let mut acc = LogQSeries::zero(engine.trunc());
        for (factors, c) in self.poly.terms() {
            let mut term = engine.expand(c);
            for f in factors {
                let word = Word(f.0.iter().map(BasisLetter::to_poly).collect());
                term = &term * &engine.integral(&word);
            }
            acc = &acc + &term;
        }
        acc
    }

    /// True if every key is a monomial in Lyndon words and modular mode is respected.
    pub fn is_valid(&self) -> bool {
        self.poly.terms().all(|(factors, c)| {
            factors.iter().all(is_lyndon)
                && (!self.modular_only
                    || (c.is_modular()
                        && factors.iter().flat_map(|w| w.0.iter()).all(|l| !l.is_e2())))
        })
    }
}

pub(crate) fn format_monomial(factors: &[Word<BasisLetter>]) -> String {
    // factors are stored nonincreasing; print ascending with powers grouped
    let mut groups: Vec<(&Word<BasisLetter>, usize)> = Vec::new();
    for f in factors.iter().rev() {
        match groups.last_mut() {
            Some((g, n)) if *g == f => *n += 1,
            _ => groups.push((f, 1)),
        }
    }
    groups
        .into_iter()
        .map(|(w, n)| {
            let base = format_integral(w.0.iter().map(|l| l.to_string()));
            if n == 1 {
                base
            } else {
                format!("{base}^{n}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (factors, c) in self.poly.terms() {
            let mono = format_monomial(factors);
            let (negative, body) = match c.as_single_term() {
                Some((m, r)) if m == crate::quasimodular::Monomial::ONE => {
                    let abs = r.abs();
                    let body = if mono.is_empty() {
                        abs.to_string()
                    } else if abs.is_one() {
                        mono
                    } else {
                        format!("{abs}*{mono}")
                    };
                    (r.is_negative(), body)
                }
                _ if mono.is_empty() => (false, format!("({c})")),
                _ => (false, format!("({c})*{mono}")),
            };
            if first {
                if negative {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if negative { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

fn first_non_modular(c: &BarCombo) -> Option<String> {
    for (w, coeff) in c.terms() {
        if !coeff.is_modular() {
            return Some(format!("coefficient {coeff}"));
        }
        if let Some(l) = w.0.iter().find(|l| !l.is_modular()) {
            return Some(format!("letter {l}"));
        }
    }
    None
}

/// Rewrites a combination of iterated integrals in the Lyndon basis over `B`
/// (or over `B_M = B \ {E2}` with `M*` coefficients when `modular_only`).
pub fn canonical_form(c: &BarCombo, modular_only: bool) -> Result<CanonicalForm> {
    if modular_only {
        if let Some(bad) = first_non_modular(c) {
            return Err(Error::NotModular(bad));
        }
    }
    let reduced = reduce_letters(c);
    let words: BTreeMap<Word<BasisLetter>, QMPoly> = reduced
        .terms()
        .map(|(w, coeff)| {
            let letters =
                w.0.iter()
                    .map(|l| as_basis_letter(l).expect("reduced letters lie in B"))
                    .collect();
            (Word(letters), coeff.clone())
        })
        .collect();
    let form = CanonicalForm {
        poly: combination_to_lyndon_basis(&words),
        modular_only,
    };
    debug_assert!(form.is_valid());
    Ok(form)
}

/// Exact rank over `Q` of the q/log-q coefficient vectors of `expand(m)·I(w)`
/// over all words `w` and multipliers `m`.
pub fn independence_rank(words: &[BarWord], multipliers: &[QMPoly], trunc: usize) -> Result<usize> {
    for w in words {
        if let Some(l) = w.0.iter().find(|l| as_basis_letter(l).is_none()) {
            return Err(Error::Precondition(format!(
                "letter {l} is not an element of B"
            )));
        }
    }
    let max_len = words.iter().map(Word::len).max().unwrap_or(0) as u32;
    let mut engine = IntegralEngine::new(trunc);
    let mut rows = Vec::with_capacity(words.len() * multipliers.len());
    for w in words {
        let integral = engine.integral(w);
        for m in multipliers {
            let series = &engine.expand(m) * &integral;
            let mut row = Vec::with_capacity((trunc + 1) * (max_len as usize + 1));
            for mq in 0..=trunc {
                for k in 0..=max_len {
                    row.push(series.coeff(mq, k));
                }
            }
            rows.push(row);
        }
    }
    Ok(linalg::rank(&rows))
}
