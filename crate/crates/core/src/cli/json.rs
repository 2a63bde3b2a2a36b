//! JSON encodings of series and canonical forms.

use serde::{Deserialize, Serialize};

use crate::canonicalize::{as_basis_letter, CanonicalForm};
use crate::error::{Error, Result};
use crate::qseries::{LogQSeries, Rational};
use crate::quasimodular::{BasisLetter, QMPoly};
use crate::shuffle_lyndon::{is_lyndon, LyndonPoly, Word};

use super::expr::parse_form;

#[derive(Debug, Serialize, Deserialize)]
struct SeriesJson {
    truncation: usize,
    terms: Vec<SeriesTerm>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SeriesTerm {
    q: usize,
    logq: u32,
    coeff: String,
}

fn bad(message: impl Into<String>) -> Error {
    Error::Usage(format!("invalid JSON: {}", message.into()))
}

pub fn series_to_json(s: &LogQSeries) -> String {
    let doc = SeriesJson {
        truncation: s.trunc(),
        terms: s
            .terms()
            .into_iter()
            .map(|(q, logq, c)| SeriesTerm {
                q,
                logq,
                coeff: c.to_string(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn series_from_json(text: &str) -> Result<LogQSeries> {
    let doc: SeriesJson = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mut terms = Vec::with_capacity(doc.terms.len());
    for t in doc.terms {
        if t.q > doc.truncation {
            return Err(bad(format!(
                "q^{} beyond truncation {}",
                t.q, doc.truncation
            )));
        }
        let c: Rational = t
            .coeff
            .parse()
            .map_err(|_| bad(format!("coefficient {:?}", t.coeff)))?;
        terms.push((t.q, t.logq, c));
    }
    Ok(LogQSeries::from_terms(doc.truncation, terms))
}

#[derive(Debug, Serialize, Deserialize)]
struct CanonicalJson {
    modular_only: bool,
    terms: Vec<CanonicalTerm>,
}

/// `coeff · Π I(word)`; each word is a list of basis letters.
#[derive(Debug, Serialize, Deserialize)]
struct CanonicalTerm {
    coeff: String,
    factors: Vec<Vec<String>>,
}

pub fn canonical_to_json(c: &CanonicalForm) -> String {
    let doc = CanonicalJson {
        modular_only: c.modular_only,
        terms: c
            .poly
            .terms()
            .map(|(factors, coeff)| CanonicalTerm {
                coeff: coeff.to_string(),
                factors: factors
                    .iter()
                    .map(|w| w.0.iter().map(|l| l.to_string()).collect())
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn canonical_from_json(text: &str) -> Result<CanonicalForm> {
    let doc: CanonicalJson = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let mut poly = LyndonPoly::<BasisLetter, QMPoly>::zero();
    for t in doc.terms {
        let coeff = parse_form(&t.coeff)?;
        let mut factors = Vec::with_capacity(t.factors.len());
        for w in t.factors {
            let letters = w
                .iter()
                .map(|l| {
                    parse_form(l)
                        .ok()
                        .and_then(|p| as_basis_letter(&p))
                        .ok_or_else(|| bad(format!("{l:?} is not a basis letter")))
                })
                .collect::<Result<Vec<_>>>()?;
            let word = Word(letters);
            if !is_lyndon(&word) {
                return Err(bad(format!("{word} is not a Lyndon word")));
            }
            factors.push(word);
        }
        poly = &poly + &LyndonPoly::monomial(factors, coeff);
    }
    Ok(CanonicalForm {
        poly,
        modular_only: doc.modular_only,
    })
}
