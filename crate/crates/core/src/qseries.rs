//! Exact truncated q-expansions with an adjoined formal logarithm.
//!
//! A [`LogQSeries`] is an element of `W[L]`, where `W` is the ring of
//! q-expansions known modulo `q^{N+1}` and `L` stands for `log q = 2πiτ`.
//! The derivation `D = q d/dq` acts by `D(q^m L^k) = m q^m L^k + k q^m L^{k-1}`.
//!
//! Binary operations truncate to the smaller of the two operand precisions;
//! unknown coefficients are never invented.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A q-expansion `Σ_{m=0}^{N} c_m q^m` known modulo `q^{N+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSeries {
    coeffs: Vec<Rational>,
}

impl QSeries {
    pub fn zero(trunc: usize) -> Self {
        QSeries {
            coeffs: vec![Rational::zero(); trunc + 1],
        }
    }

    pub fn constant(c: Rational, trunc: usize) -> Self {
        let mut s = Self::zero(trunc);
        s.coeffs[0] = c;
        s
    }

    /// Builds a series from its coefficient list; `coeffs[m]` is the coefficient of `q^m`.
    ///
    /// Panics on an empty list.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(
            !coeffs.is_empty(),
            "a q-series needs at least the q^0 coefficient"
        );
        QSeries { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Rational {
        self.coeffs.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc(), "cannot extend a truncated series");
        QSeries {
            coeffs: self.coeffs[..=trunc].to_vec(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Splits `f` into its value at the cusp and the part vanishing there.
    pub fn split(&self) -> (Rational, QSeries) {
        let mut f0 = self.clone();
        let f_inf = std::mem::replace(&mut f0.coeffs[0], Rational::zero());
        (f_inf, f0)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let n = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: (0..=n).map(|m| &self.coeffs[m] + &rhs.coeffs[m]).collect(),
        }
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        let n = self.trunc().min(rhs.trunc());
        QSeries {
            coeffs: (0..=n).map(|m| &self.coeffs[m] - &rhs.coeffs[m]).collect(),
        }
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let n = self.trunc().min(rhs.trunc());
        let integral = |s: &QSeries| s.coeffs[..=n].iter().all(|c| c.is_integer());
        if integral(self) && integral(rhs) {
            return integer_product(&self.coeffs[..=n], &rhs.coeffs[..=n]);
        }
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs[..=n].iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        QSeries { coeffs: out }
    }
}

fn integer_product(a: &[Rational], b: &[Rational]) -> QSeries {
    let n = a.len() - 1;
    let a: Vec<&BigInt> = a.iter().map(|c| c.numer()).collect();
    let b: Vec<&BigInt> = b.iter().map(|c| c.numer()).collect();
    let mut out = vec![BigInt::zero(); n + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..=n - i].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += *x * *y;
            }
        }
    }
    QSeries {
        coeffs: out.into_iter().map(Rational::from_integer).collect(),
    }
}

/// A polynomial in `L = log q` with [`QSeries`] coefficients, all sharing one truncation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogQSeries {
    trunc: usize,
    parts: BTreeMap<u32, QSeries>,
}

impl LogQSeries {
    pub fn zero(trunc: usize) -> Self {
        LogQSeries {
            trunc,
            parts: BTreeMap::new(),
        }
    }

    pub fn one(trunc: usize) -> Self {
        Self::constant(Rational::one(), trunc)
    }

    pub fn constant(c: Rational, trunc: usize) -> Self {
        Self::from_qseries(QSeries::constant(c, trunc))
    }

    /// The formal variable `L`.
    pub fn log_q(trunc: usize) -> Self {
        Self::monomial(Rational::one(), 0, 1, trunc)
    }

    /// `c q^m L^k` at truncation `trunc` (zero if `m > trunc`).
    pub fn monomial(c: Rational, m: usize, k: u32, trunc: usize) -> Self {
        let mut out = Self::zero(trunc);
        if m <= trunc {
            let mut s = QSeries::zero(trunc);
            s.coeffs[m] = c;
            out.insert_part(k, s);
        }
        out
    }

    pub fn from_qseries(s: QSeries) -> Self {
        let trunc = s.trunc();
        let mut out = Self::zero(trunc);
        out.insert_part(0, s);
        out
    }

    /// Builds a series from `(q power, log power, coefficient)` triples; repeated keys add up.
    pub fn from_terms<I>(trunc: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (usize, u32, Rational)>,
    {
        let mut parts: BTreeMap<u32, QSeries> = BTreeMap::new();
        for (m, k, c) in terms {
            if m > trunc {
                continue;
            }
            let part = parts.entry(k).or_insert_with(|| QSeries::zero(trunc));
            part.coeffs[m] += c;
        }
        let mut out = Self::zero(trunc);
        for (k, s) in parts {
            out.insert_part(k, s);
        }
        out
    }

    fn insert_part(&mut self, k: u32, s: QSeries) {
        debug_assert_eq!(s.trunc(), self.trunc);
        if !s.is_zero() {
            self.parts.insert(k, s);
        }
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Coefficient of `L^k`, or `None` if it vanishes.
    pub fn part(&self, k: u32) -> Option<&QSeries> {
        self.parts.get(&k)
    }

    pub fn parts(&self) -> impl Iterator<Item = (u32, &QSeries)> {
        self.parts.iter().map(|(&k, s)| (k, s))
    }

    /// Coefficient of `q^m L^k`.
    pub fn coeff(&self, m: usize, k: u32) -> Rational {
        self.parts
            .get(&k)
            .map(|s| s.coeff(m))
            .unwrap_or_else(Rational::zero)
    }

    pub fn max_log_degree(&self) -> Option<u32> {
        self.parts.keys().next_back().copied()
    }

    /// Nonzero terms as `(q power, log power, coefficient)`, sorted by `(q, log)`.
    pub fn terms(&self) -> Vec<(usize, u32, Rational)> {
        let mut out = Vec::new();
        for m in 0..=self.trunc {
            for (&k, s) in &self.parts {
                let c = &s.coeffs[m];
                if !c.is_zero() {
                    out.push((m, k, c.clone()));
                }
            }
        }
        out
    }

    /// The `q^0` part, a polynomial in `L` only.
    pub fn q0_part(&self) -> LogQSeries {
        LogQSeries::from_terms(
            self.trunc,
            self.parts.iter().map(|(&k, s)| (0, k, s.coeffs[0].clone())),
        )
    }

    pub fn truncate(&self, trunc: usize) -> Self {
        assert!(trunc <= self.trunc, "cannot extend a truncated series");
        let mut out = Self::zero(trunc);
        for (&k, s) in &self.parts {
            out.insert_part(k, s.truncate(trunc));
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.trunc);
        if c.is_zero() {
            return out;
        }
        for (&k, s) in &self.parts {
            out.insert_part(k, s.scale(c));
        }
        out
    }

    fn combine(&self, rhs: &LogQSeries, sign: i32) -> LogQSeries {
        let n = self.trunc.min(rhs.trunc);
        let mut out = Self::zero(n);
        let keys: std::collections::BTreeSet<u32> =
            self.parts.keys().chain(rhs.parts.keys()).copied().collect();
        for k in keys {
            let a = self.parts.get(&k).map(|s| s.truncate(n));
            let b = rhs.parts.get(&k).map(|s| s.truncate(n));
            let s = match (a, b) {
                (Some(a), Some(b)) if sign > 0 => &a + &b,
                (Some(a), Some(b)) => &a - &b,
                (Some(a), None) => a,
                (None, Some(b)) if sign > 0 => b,
                (None, Some(b)) => -&b,
                (None, None) => unreachable!(),
            };
            out.insert_part(k, s);
        }
        out
    }

    /// Applies `D = q d/dq`, with `D(L) = 1`.
    pub fn d_op(&self) -> LogQSeries {
        let n = self.trunc;
        let mut out: BTreeMap<u32, QSeries> = BTreeMap::new();
        for (&k, s) in &self.parts {
            let target = out.entry(k).or_insert_with(|| QSeries::zero(n));
            for m in 1..=n {
                target.coeffs[m] += &s.coeffs[m] * BigInt::from(m);
            }
            if k > 0 {
                let lower = out.entry(k - 1).or_insert_with(|| QSeries::zero(n));
                let kk = BigInt::from(k);
                for m in 0..=n {
                    lower.coeffs[m] += &s.coeffs[m] * &kk;
                }
            }
        }
        let mut res = Self::zero(n);
        for (k, s) in out {
            res.insert_part(k, s);
        }
        res
    }

    /// The unique `g` with `D(g) = self` and vanishing `q^0 L^0` coefficient.
    pub fn primitive(&self) -> LogQSeries {
        let n = self.trunc;
        let top = match self.max_log_degree() {
            Some(k) => k,
            None => return Self::zero(n),
        };
        // a[k][m]: coefficient of q^m L^k in the result, for k = 0..=top+1.
        let mut a: Vec<Vec<Rational>> = vec![vec![Rational::zero(); n + 1]; top as usize + 2];
        for m in 0..=n {
            let c = |k: usize| self.coeff(m, k as u32);
            if m == 0 {
                for k in 0..=top as usize {
                    a[k + 1][0] = c(k) / BigInt::from(k + 1);
                }
            } else {
                let mm = BigInt::from(m);
                let mut next = Rational::zero();
                for k in (0..=top as usize).rev() {
                    let v = (c(k) - &next * BigInt::from(k + 1)) / &mm;
                    a[k][m] = v.clone();
                    next = v;
                }
            }
        }
        let mut out = Self::zero(n);
        for (k, coeffs) in a.into_iter().enumerate() {
            out.insert_part(k as u32, QSeries { coeffs });
        }
        out
    }

    /// Evaluates the truncated sum at `q = exp(2πiτ)`, `L = 2πiτ` in double precision.
    pub fn eval_numeric(&self, tau: Complex64) -> Result<Complex64> {
        if tau.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(tau.im));
        }
        let l = Complex64::new(0.0, 2.0 * PI) * tau;
        let q = l.exp();
        let mut total = Complex64::zero();
        for (&k, s) in &self.parts {
            // Horner in q
            let mut acc = Complex64::zero();
            for c in s.coeffs.iter().rev() {
                acc = acc * q + Complex64::new(rational_to_f64(c), 0.0);
            }
            total += acc * l.powu(k);
        }
        Ok(total)
    }
}

pub fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        if c.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl Add for &LogQSeries {
    type Output = LogQSeries;
    fn add(self, rhs: &LogQSeries) -> LogQSeries {
        self.combine(rhs, 1)
    }
}

impl Sub for &LogQSeries {
    type Output = LogQSeries;
    fn sub(self, rhs: &LogQSeries) -> LogQSeries {
        self.combine(rhs, -1)
    }
}

impl Neg for &LogQSeries {
    type Output = LogQSeries;
    fn neg(self) -> LogQSeries {
        self.scale(&-Rational::one())
    }
}

impl Mul for &LogQSeries {
    type Output = LogQSeries;
    fn mul(self, rhs: &LogQSeries) -> LogQSeries {
        let n = self.trunc.min(rhs.trunc);
        let mut acc: BTreeMap<u32, QSeries> = BTreeMap::new();
        for (&i, a) in &self.parts {
            let a = a.truncate(n);
            for (&j, b) in &rhs.parts {
                let prod = &a * &b.truncate(n);
                let slot = acc.entry(i + j).or_insert_with(|| QSeries::zero(n));
                *slot = &*slot + &prod;
            }
        }
        let mut out = LogQSeries::zero(n);
        for (k, s) in acc {
            out.insert_part(k, s);
        }
        out
    }
}

macro_rules! forward_owned {
    ($t:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(QSeries, Add add, Sub sub, Mul mul);
forward_owned!(LogQSeries, Add add, Sub sub, Mul mul);

/// Renders a coefficient times a monomial, e.g. `-3/2*q^2*L`.
pub(crate) fn write_signed_terms<W: fmt::Write>(
    out: &mut W,
    terms: impl IntoIterator<Item = (Rational, String)>,
) -> fmt::Result {
    let mut first = true;
    for (c, mono) in terms {
        let neg = c.is_negative();
        let abs = c.abs();
        if first {
            if neg {
                out.write_str("-")?;
            }
        } else {
            out.write_str(if neg { " - " } else { " + " })?;
        }
        first = false;
        if mono.is_empty() {
            write!(out, "{abs}")?;
        } else if abs.is_one() {
            out.write_str(&mono)?;
        } else {
            write!(out, "{abs}*{mono}")?;
        }
    }
    if first {
        out.write_str("0")?;
    }
    Ok(())
}

fn series_monomial(m: usize, k: u32) -> String {
    let mut parts = Vec::new();
    match m {
        0 => {}
        1 => parts.push("q".to_string()),
        _ => parts.push(format!("q^{m}")),
    }
    match k {
        0 => {}
        1 => parts.push("L".to_string()),
        _ => parts.push(format!("L^{k}")),
    }
    parts.join("*")
}

impl fmt::Display for LogQSeries {
    /// Terms in ascending `(q, L)` order; `L` denotes `log q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(
            f,
            self.terms()
                .into_iter()
                .map(|(m, k, c)| (c, series_monomial(m, k))),
        )
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        LogQSeries::from_qseries(self.clone()).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l(n: usize) -> LogQSeries {
        LogQSeries::log_q(n)
    }

    #[test]
    fn difference_of_squares() {
        let a = LogQSeries::from_qseries(QSeries::from_ints(&[1, 1, 0]));
        let b = LogQSeries::from_qseries(QSeries::from_ints(&[1, -1, 0]));
        let p = &a * &b;
        assert_eq!(p, LogQSeries::from_qseries(QSeries::from_ints(&[1, 0, -1])));
    }

    #[test]
    fn log_squared() {
        let p = &l(3) * &l(3);
        assert_eq!(p, LogQSeries::monomial(int(1), 0, 2, 3));
        assert_eq!(p.parts().map(|(k, _)| k).collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn mixed_product() {
        let a = -&l(1);
        let b = &(-&l(1)) - &LogQSeries::monomial(int(240), 1, 0, 1);
        let expected = LogQSeries::from_terms(1, [(0, 2, int(1)), (1, 1, int(240))]);
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn truncation_is_min_of_operands() {
        let a = LogQSeries::one(5);
        let b = LogQSeries::one(3);
        assert_eq!((&a + &b).trunc(), 3);
        assert_eq!((&a * &b).trunc(), 3);
    }

    #[test]
    fn split_examples() {
        let e2 = QSeries::from_ints(&[1, -24, -72]);
        let (inf, f0) = e2.split();
        assert_eq!(inf, int(1));
        assert_eq!(f0, QSeries::from_ints(&[0, -24, -72]));
        let (inf, f0) = QSeries::zero(2).split();
        assert!(inf.is_zero() && f0.is_zero());
        let (inf, f0) = QSeries::from_ints(&[0, 1]).split();
        assert!(inf.is_zero());
        assert_eq!(f0, QSeries::from_ints(&[0, 1]));
    }

    #[test]
    fn d_op_examples() {
        assert_eq!((-&l(2)).d_op(), LogQSeries::constant(int(-1), 2));
        let half_l2 = LogQSeries::monomial(rat(1, 2), 0, 2, 2);
        assert_eq!(half_l2.d_op(), l(2));
        let ql = LogQSeries::monomial(int(1), 1, 1, 2);
        let expected = LogQSeries::from_terms(2, [(1, 1, int(1)), (1, 0, int(1))]);
        assert_eq!(ql.d_op(), expected);
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(LogQSeries::constant(int(-1), 3).primitive(), -&l(3));
        let q240 = LogQSeries::monomial(int(240), 1, 0, 3);
        assert_eq!(q240.primitive(), q240);
        let g = LogQSeries::monomial(int(240), 1, 1, 3).primitive();
        let expected = LogQSeries::from_terms(3, [(1, 0, int(-240)), (1, 1, int(240))]);
        assert_eq!(g, expected);
    }

    #[test]
    fn eval_examples() {
        let tau = Complex64::new(0.0, 1.0);
        assert_eq!(
            LogQSeries::zero(4).eval_numeric(tau).unwrap(),
            Complex64::zero()
        );
        let v = l(4).eval_numeric(tau).unwrap();
        assert!((v - Complex64::new(-2.0 * PI, 0.0)).norm() < 1e-14);
        assert!(l(4).eval_numeric(Complex64::new(0.3, 0.0)).is_err());
        assert!(l(4).eval_numeric(Complex64::new(0.3, -1.0)).is_err());
    }

    #[test]
    fn display() {
        let s = LogQSeries::from_terms(2, [(0, 2, rat(1, 2)), (1, 0, int(240)), (2, 0, int(-540))]);
        assert_eq!(s.to_string(), "1/2*L^2 + 240*q - 540*q^2");
        assert_eq!((-&l(1)).to_string(), "-L");
        assert_eq!(LogQSeries::zero(3).to_string(), "0");
    }

    fn arb_series(n: usize) -> impl Strategy<Value = LogQSeries> {
        prop::collection::vec((0..=n, 0u32..3, -20i64..20, 1i64..5), 0..12).prop_map(move |ts| {
            LogQSeries::from_terms(n, ts.into_iter().map(|(m, k, a, b)| (m, k, rat(a, b))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn d_op_inverts_primitive(f in arb_series(12)) {
            prop_assert_eq!(f.primitive().d_op(), f);
        }

        #[test]
        fn primitive_inverts_d_op(g in arb_series(12)) {
            let g0 = &g - &LogQSeries::constant(g.coeff(0, 0), 12);
            prop_assert_eq!(g0.d_op().primitive(), g0);
        }

        #[test]
        fn product_commutative_associative(a in arb_series(15), b in arb_series(15), c in arb_series(15)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn d_op_is_a_derivation(a in arb_series(10), b in arb_series(10)) {
            let lhs = (&a * &b).d_op();
            let rhs = &(&a.d_op() * &b) + &(&a * &b.d_op());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
