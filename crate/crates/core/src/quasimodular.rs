//! The graded ring of quasimodular forms `QM* = Q[E2, E4, E6]`.
//!
//! Forms are stored as sparse polynomials in the three Eisenstein series.
//! Ramanujan's derivation, the transformation coefficients `f_r` of the
//! slash action, and the splitting `QM* = Q·E2 ⊕ D(QM*) ⊕ M*` all act on
//! this representation exactly; [`expand`] maps a form to its q-expansion.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::qseries::{int, write_signed_terms, QSeries, Rational};

/// Exponents of `E2^e2 · E4^e4 · E6^e6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        e2: 0,
        e4: 0,
        e6: 0,
    };

    pub fn new(e2: u32, e4: u32, e6: u32) -> Self {
        Monomial { e2, e4, e6 }
    }

    pub fn weight(&self) -> u32 {
        2 * self.e2 + 4 * self.e4 + 6 * self.e6
    }

    fn mul(self, other: Monomial) -> Monomial {
        Monomial::new(self.e2 + other.e2, self.e4 + other.e4, self.e6 + other.e6)
    }

    /// All monomials of weight exactly `k`, in ascending exponent order.
    pub fn of_weight(k: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        if !k.is_multiple_of(2) {
            return out;
        }
        for e2 in 0..=k / 2 {
            for e4 in 0..=(k - 2 * e2) / 4 {
                let rest = k - 2 * e2 - 4 * e4;
                if rest.is_multiple_of(6) {
                    out.push(Monomial::new(e2, e4, rest / 6));
                }
            }
        }
        out.sort();
        out
    }

    /// Monomials of weight `k` in `E4, E6` only.
    pub fn modular_of_weight(k: u32) -> Vec<Monomial> {
        Monomial::of_weight(k)
            .into_iter()
            .filter(|m| m.e2 == 0)
            .collect()
    }

    fn display_key(&self) -> (u32, Reverse<u32>, Reverse<u32>, Reverse<u32>) {
        (
            self.weight(),
            Reverse(self.e2),
            Reverse(self.e4),
            Reverse(self.e6),
        )
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (name, e) in [("E2", self.e2), ("E4", self.e4), ("E6", self.e6)] {
            match e {
                0 => {}
                1 => parts.push(name.to_string()),
                _ => parts.push(format!("{name}^{e}")),
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

/// A quasimodular form with rational coefficients, as a polynomial in `E2, E4, E6`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QMPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl QMPoly {
    pub fn constant(c: Rational) -> Self {
        Self::from_monomial(Monomial::ONE, c)
    }

    pub fn from_monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        QMPoly { terms }
    }

    pub fn monomial(e2: u32, e4: u32, e6: u32) -> Self {
        Self::from_monomial(Monomial::new(e2, e4, e6), Rational::one())
    }

    pub fn e2() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn e4() -> Self {
        Self::monomial(0, 1, 0)
    }

    pub fn e6() -> Self {
        Self::monomial(0, 0, 1)
    }

    /// `Δ = (E4³ − E6²)/1728`.
    pub fn delta() -> Self {
        (&Self::monomial(0, 3, 0) - &Self::monomial(0, 0, 2))
            .scale(&Rational::new(BigInt::one(), BigInt::from(1728)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        QMPoly {
            terms: self.terms.iter().map(|(m, x)| (*m, x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// The distinct weights of the stored monomials.
    pub fn weights(&self) -> Vec<u32> {
        let mut w: Vec<u32> = self.terms.keys().map(Monomial::weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// The weight if the form is homogeneous; the zero form is homogeneous of every weight.
    pub fn homogeneous_weight(&self) -> Result<Option<u32>> {
        match self.weights().as_slice() {
            [] => Ok(None),
            [w] => Ok(Some(*w)),
            ws => Err(Error::NotHomogeneous(ws.to_vec())),
        }
    }

    pub fn homogeneous_parts(&self) -> BTreeMap<u32, QMPoly> {
        let mut out: BTreeMap<u32, QMPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight()).or_default().add_term(*m, c.clone());
        }
        out
    }

    /// Highest power of `E2` present (0 for the zero form).
    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|m| m.e2).max().unwrap_or(0)
    }

    pub fn is_modular(&self) -> bool {
        self.depth() == 0
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    /// The single monomial and coefficient if the form has exactly one term.
    pub fn as_single_term(&self) -> Option<(Monomial, &Rational)> {
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (Some((m, c)), None) => Some((*m, c)),
            _ => None,
        }
    }

    /// Value at the cusp `i∞`. Every Eisenstein series has constant term 1.
    pub fn value_at_cusp(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    /// `∂/∂E2`.
    pub fn partial_e2(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.e2 > 0 {
                out.add_term(Monomial::new(m.e2 - 1, m.e4, m.e6), c * BigInt::from(m.e2));
            }
        }
        out
    }

    fn partial_e4(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.e4 > 0 {
                out.add_term(Monomial::new(m.e2, m.e4 - 1, m.e6), c * BigInt::from(m.e4));
            }
        }
        out
    }

    fn partial_e6(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            if m.e6 > 0 {
                out.add_term(Monomial::new(m.e2, m.e4, m.e6 - 1), c * BigInt::from(m.e6));
            }
        }
        out
    }

    /// Ramanujan's derivation `D = q d/dq`:
    /// `D(E2) = (E2² − E4)/12`, `D(E4) = (E2·E4 − E6)/3`, `D(E6) = (E2·E6 − E4²)/2`.
    pub fn derive(&self) -> Self {
        let (d2, d4, d6) = generator_derivatives();
        &(&(&self.partial_e2() * &d2) + &(&self.partial_e4() * &d4)) + &(&self.partial_e6() * &d6)
    }

    pub fn derive_n(&self, order: u32) -> Self {
        (0..order).fold(self.clone(), |acc, _| acc.derive())
    }

    /// Substitutes forms for the generators: `self(E2 ↦ a, E4 ↦ b, E6 ↦ c)`.
    pub fn compose(&self, a: &QMPoly, b: &QMPoly, c: &QMPoly) -> QMPoly {
        let mut out = QMPoly::zero();
        for (m, coeff) in &self.terms {
            let t = &(&a.pow(m.e2) * &b.pow(m.e4)) * &c.pow(m.e6);
            out = &out + &t.scale(coeff);
        }
        out
    }
}

impl crate::shuffle_lyndon::Coefficient for QMPoly {
    fn from_rational(r: &Rational) -> Self {
        QMPoly::constant(r.clone())
    }
}

fn generator_derivatives() -> (QMPoly, QMPoly, QMPoly) {
    let r = |n, d| Rational::new(BigInt::from(n), BigInt::from(d));
    let e2 = QMPoly::e2();
    let e4 = QMPoly::e4();
    let e6 = QMPoly::e6();
    let d2 = (&(&e2 * &e2) - &e4).scale(&r(1, 12));
    let d4 = (&(&e2 * &e4) - &e6).scale(&r(1, 3));
    let d6 = (&(&e2 * &e6) - &(&e4 * &e4)).scale(&r(1, 2));
    (d2, d4, d6)
}

impl Zero for QMPoly {
    fn zero() -> Self {
        QMPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for QMPoly {
    fn one() -> Self {
        QMPoly::constant(Rational::one())
    }
}

impl Add for &QMPoly {
    type Output = QMPoly;
    fn add(self, rhs: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &QMPoly {
    type Output = QMPoly;
    fn sub(self, rhs: &QMPoly) -> QMPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl Neg for &QMPoly {
    type Output = QMPoly;
    fn neg(self) -> QMPoly {
        QMPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Mul for &QMPoly {
    type Output = QMPoly;
    fn mul(self, rhs: &QMPoly) -> QMPoly {
        let mut out = QMPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(*mb), ca * cb);
            }
        }
        out
    }
}

impl Add for QMPoly {
    type Output = QMPoly;
    fn add(self, rhs: QMPoly) -> QMPoly {
        &self + &rhs
    }
}

impl Sub for QMPoly {
    type Output = QMPoly;
    fn sub(self, rhs: QMPoly) -> QMPoly {
        &self - &rhs
    }
}

impl Mul for QMPoly {
    type Output = QMPoly;
    fn mul(self, rhs: QMPoly) -> QMPoly {
        &self * &rhs
    }
}

impl Neg for QMPoly {
    type Output = QMPoly;
    fn neg(self) -> QMPoly {
        -&self
    }
}

impl fmt::Display for QMPoly {
    /// Graded display: ascending weight, and within a weight descending powers of E2, E4, E6.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| m.display_key());
        write_signed_terms(
            f,
            terms.into_iter().map(|(m, c)| {
                let mono = if *m == Monomial::ONE {
                    String::new()
                } else {
                    m.to_string()
                };
                (c.clone(), mono)
            }),
        )
    }
}

/// Bernoulli number `B_n` with `B_1 = −1/2`.
pub fn bernoulli(n: usize) -> Rational {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::one());
    for m in 1..=n {
        let mut binom = BigInt::one(); // C(m+1, j)
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += bj * &binom;
            binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / BigInt::from(m + 1));
    }
    b.pop().unwrap()
}

/// `σ_e(n)` for `n = 0..=trunc` (with `σ_e(0) = 0`).
fn divisor_power_sums(e: u32, trunc: usize) -> Vec<BigInt> {
    let mut sigma = vec![BigInt::zero(); trunc + 1];
    for d in 1..=trunc {
        let p = BigInt::from(d).pow(e);
        for m in (d..=trunc).step_by(d) {
            sigma[m] += &p;
        }
    }
    sigma
}

/// Normalized Eisenstein series `E_w = 1 − (2w/B_w) Σ σ_{w−1}(n) q^n` modulo `q^{trunc+1}`.
pub fn eisenstein_qexp(weight: i64, trunc: usize) -> Result<QSeries> {
    if weight < 2 || weight.is_odd() {
        return Err(Error::InvalidWeight(weight));
    }
    let w = weight as usize;
    let factor = -Rational::from_integer(BigInt::from(2 * w)) / bernoulli(w);
    let sigma = divisor_power_sums(w as u32 - 1, trunc);
    let mut coeffs = Vec::with_capacity(trunc + 1);
    coeffs.push(Rational::one());
    coeffs.extend(sigma.into_iter().skip(1).map(|s| &factor * s));
    Ok(QSeries::from_coeffs(coeffs))
}

/// Evaluates forms as q-expansions at a fixed truncation, caching generator powers.
#[derive(Debug, Clone)]
pub struct Expander {
    trunc: usize,
    powers: [Vec<QSeries>; 3],
    monomials: HashMap<Monomial, QSeries>,
}

impl Expander {
    pub fn new(trunc: usize) -> Self {
        let gens = [2, 4, 6].map(|w| {
            let one = QSeries::constant(Rational::one(), trunc);
            vec![one, eisenstein_qexp(w, trunc).expect("valid weight")]
        });
        Expander {
            trunc,
            powers: gens,
            monomials: HashMap::new(),
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    fn power(&mut self, gen: usize, e: u32) -> QSeries {
        let pows = &mut self.powers[gen];
        while pows.len() <= e as usize {
            let next = &pows[pows.len() - 1] * &pows[1];
            pows.push(next);
        }
        pows[e as usize].clone()
    }

    pub fn monomial(&mut self, m: Monomial) -> QSeries {
        if let Some(s) = self.monomials.get(&m) {
            return s.clone();
        }
        let s = &(&self.power(0, m.e2) * &self.power(1, m.e4)) * &self.power(2, m.e6);
        self.monomials.insert(m, s.clone());
        s
    }

    pub fn expand(&mut self, p: &QMPoly) -> QSeries {
        let mut acc = QSeries::zero(self.trunc);
        for (m, c) in p.terms() {
            acc = &acc + &self.monomial(*m).scale(c);
        }
        acc
    }
}

/// q-expansion of `p` modulo `q^{trunc+1}`.
pub fn expand(p: &QMPoly, trunc: usize) -> QSeries {
    Expander::new(trunc).expand(p)
}

/// Coefficients `f_r` of `(f|_k γ)(τ) = Σ_r f_r(τ) X(γ)^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformExpansion {
    pub coeffs: Vec<QMPoly>,
}

/// Since `E2|γ = E2 + 12X` and `E4, E6` are invariant, `f_r = (12^r / r!) ∂^r f / ∂E2^r`.
pub fn transform_coeffs(p: &QMPoly) -> Result<TransformExpansion> {
    p.homogeneous_weight()?;
    let mut coeffs = vec![p.clone()];
    let mut deriv = p.clone();
    let mut factor = Rational::one();
    for r in 1..=p.depth() {
        deriv = deriv.partial_e2();
        factor = factor * int(12) / BigInt::from(r);
        coeffs.push(deriv.scale(&factor));
    }
    Ok(TransformExpansion { coeffs })
}

/// The unique splitting `p = c·E2 + m + D(h)` with `m` modular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub e2_coeff: Rational,
    pub modular: QMPoly,
    pub primitive: QMPoly,
}

/// Splits a homogeneous form along `QM* = Q·E2 ⊕ M* ⊕ D(QM*)`.
pub fn decompose(p: &QMPoly) -> Result<Decomposition> {
    let Some(k) = p.homogeneous_weight()? else {
        return Ok(Decomposition {
            e2_coeff: Rational::zero(),
            modular: QMPoly::zero(),
            primitive: QMPoly::zero(),
        });
    };
    let rows = Monomial::of_weight(k);
    let row_index: HashMap<Monomial, usize> =
        rows.iter().enumerate().map(|(i, m)| (*m, i)).collect();

    enum Unknown {
        E2,
        Modular(Monomial),
        Primitive(Monomial),
    }
    let mut unknowns = Vec::new();
    let mut columns: Vec<QMPoly> = Vec::new();
    if k == 2 {
        unknowns.push(Unknown::E2);
        columns.push(QMPoly::e2());
    }
    for m in Monomial::modular_of_weight(k) {
        unknowns.push(Unknown::Modular(m));
        columns.push(QMPoly::from_monomial(m, Rational::one()));
    }
    // D vanishes on constants, so primitives of weight 0 are excluded.
    if k >= 4 {
        for m in Monomial::of_weight(k - 2) {
            unknowns.push(Unknown::Primitive(m));
            columns.push(QMPoly::from_monomial(m, Rational::one()).derive());
        }
    }
    debug_assert_eq!(columns.len(), rows.len());
    let n = rows.len();
    let mut matrix = vec![vec![Rational::zero(); n]; n];
    for (j, col) in columns.iter().enumerate() {
        for (m, c) in col.terms() {
            matrix[row_index[m]][j] = c.clone();
        }
    }
    let rhs: Vec<Rational> = rows.iter().map(|m| p.coeff(m)).collect();
    let x = linalg::solve(&matrix, &rhs).expect("direct sum decomposition is unique");

    let mut out = Decomposition {
        e2_coeff: Rational::zero(),
        modular: QMPoly::zero(),
        primitive: QMPoly::zero(),
    };
    for (u, v) in unknowns.into_iter().zip(x) {
        match u {
            Unknown::E2 => out.e2_coeff = v,
            Unknown::Modular(m) => out.modular.add_term(m, v),
            Unknown::Primitive(m) => out.primitive.add_term(m, v),
        }
    }
    Ok(out)
}

/// One term `λ · D^order(g)` of a derivative decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeTerm {
    pub lambda: Rational,
    pub order: u32,
    pub form: QMPoly,
}

/// Writes a homogeneous `p` as `Σ λ · D^order(g)` with each `g` either `E2` or modular.
pub fn derivative_decomposition(p: &QMPoly) -> Result<Vec<DerivativeTerm>> {
    p.homogeneous_weight()?;
    let mut out = Vec::new();
    let mut current = p.clone();
    let mut order = 0;
    while !current.is_zero() {
        let d = decompose(&current)?;
        if !d.modular.is_zero() {
            out.push(DerivativeTerm {
                lambda: Rational::one(),
                order,
                form: d.modular,
            });
        }
        if !d.e2_coeff.is_zero() {
            out.push(DerivativeTerm {
                lambda: d.e2_coeff,
                order,
                form: QMPoly::e2(),
            });
        }
        current = d.primitive;
        order += 1;
    }
    Ok(out)
}

/// A letter of the ordered alphabet `B`: `1`, `E2`, or a monomial `E4^a E6^b`.
///
/// Letters compare by weight first, then by the exponent of `E4`, then of `E6`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisLetter(Monomial);

impl BasisLetter {
    pub fn new(m: Monomial) -> Option<Self> {
        let ok = m.e2 == 0 || (m.e2 == 1 && m.e4 == 0 && m.e6 == 0);
        ok.then_some(BasisLetter(m))
    }

    pub fn one() -> Self {
        BasisLetter(Monomial::ONE)
    }

    pub fn e2() -> Self {
        BasisLetter(Monomial::new(1, 0, 0))
    }

    pub fn modular(e4: u32, e6: u32) -> Self {
        BasisLetter(Monomial::new(0, e4, e6))
    }

    pub fn monomial(&self) -> Monomial {
        self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.weight()
    }

    pub fn is_e2(&self) -> bool {
        self.0.e2 == 1
    }

    pub fn to_poly(&self) -> QMPoly {
        QMPoly::from_monomial(self.0, Rational::one())
    }

    fn key(&self) -> (u32, u32, u32) {
        (self.weight(), self.0.e4, self.0.e6)
    }
}

impl Ord for BasisLetter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for BasisLetter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BasisLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The ordered basis `B` of `Q·E2 ⊕ M*` up to a weight bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisB {
    pub letters: Vec<BasisLetter>,
}

pub fn basis_b(max_weight: u32, modular_only: bool) -> BasisB {
    let mut letters = Vec::new();
    for k in (0..=max_weight).step_by(2) {
        if k == 2 {
            if !modular_only {
                letters.push(BasisLetter::e2());
            }
            continue;
        }
        letters.extend(Monomial::modular_of_weight(k).into_iter().map(BasisLetter));
    }
    letters.sort();
    BasisB { letters }
}
