//! Eichler–Shimura cocycles of modular forms and the braid-group cocycle of `E2`.
//!
//! All integrals use the cusp `i∞` as base point. A constant term `a0` of the
//! integrand is integrated as `∫_τ^{i∞} a0 z^m dz := −a0 τ^{m+1}/(m+1)`, which is
//! the same regularization used for iterated integrals of length one.
//! Everything here is double precision.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::iterint::{bar_word, iter_integral};
use crate::qseries::{rational_to_f64, LogQSeries};
use crate::quasimodular::{derivative_decomposition, expand, QMPoly};

/// Default number of q-expansion terms for numerical work.
pub const DEFAULT_TERMS: usize = 80;
/// Smallest imaginary part at which series are evaluated.
pub const MIN_IMAG: f64 = 0.2;

fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

/// Homogeneous polynomial of degree `d`; `coeffs[j]` multiplies `X^{d−j} Y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct XYPoly {
    pub coeffs: Vec<Complex64>,
}

impl XYPoly {
    pub fn zero(degree: usize) -> Self {
        XYPoly {
            coeffs: vec![Complex64::zero(); degree + 1],
        }
    }

    pub fn new(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "degree must be non-negative");
        XYPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn add(&self, other: &XYPoly) -> XYPoly {
        assert_eq!(self.degree(), other.degree());
        XYPoly::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &XYPoly) -> XYPoly {
        assert_eq!(self.degree(), other.degree());
        XYPoly::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: Complex64) -> XYPoly {
        XYPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl fmt::Display for XYPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.degree();
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({:.12e}{:+.12e}i)*X^{}*Y^{}", c.re, c.im, d - j, j)?;
        }
        Ok(())
    }
}

/// An element of `SL2(Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SL2Mat {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl SL2Mat {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::Precondition(format!(
                "matrix ({a},{b};{c},{d}) has determinant {} != 1",
                a * d - b * c
            )));
        }
        Ok(SL2Mat { a, b, c, d })
    }

    pub const IDENTITY: SL2Mat = SL2Mat {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    pub const S: SL2Mat = SL2Mat {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };
    pub const T: SL2Mat = SL2Mat {
        a: 1,
        b: 1,
        c: 0,
        d: 1,
    };

    pub fn mul(&self, o: &SL2Mat) -> SL2Mat {
        SL2Mat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> SL2Mat {
        SL2Mat {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Möbius action `τ ↦ (aτ + b)/(cτ + d)`.
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.automorphy(tau)
    }

    /// `cτ + d`.
    pub fn automorphy(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    /// `X(γ) = (1/2πi)·c/(cτ + d)`.
    pub fn x_gamma(&self, tau: Complex64) -> Complex64 {
        Complex64::new(self.c as f64, 0.0) / (two_pi_i() * self.automorphy(tau))
    }

    /// Product of a word in `S` and `T` (letters `S`, `T`, `T^-1`), left to right.
    pub fn from_st_word(word: &str) -> Result<SL2Mat> {
        let mut m = SL2Mat::IDENTITY;
        for tok in word
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let g = match tok {
                "S" => SL2Mat::S,
                "T" => SL2Mat::T,
                "S^-1" => SL2Mat::S.inverse(),
                "T^-1" => SL2Mat::T.inverse(),
                _ => return Err(Error::Usage(format!("unknown SL2(Z) generator {tok:?}"))),
            };
            m = m.mul(&g);
        }
        Ok(m)
    }
}

impl fmt::Display for SL2Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

/// `P(X, Y)|γ = P(aX + bY, cX + dY)`.
pub fn slash_poly(p: &XYPoly, g: &SL2Mat) -> XYPoly {
    let d = p.degree();
    // linear forms as [coefficient of X, coefficient of Y]
    let lin_a = [g.a as f64, g.b as f64];
    let lin_c = [g.c as f64, g.d as f64];
    let pow = |lin: [f64; 2], e: usize| {
        let mut out = vec![1.0];
        for _ in 0..e {
            let mut next = vec![0.0; out.len() + 1];
            for (i, v) in out.iter().enumerate() {
                next[i] += v * lin[0];
                next[i + 1] += v * lin[1];
            }
            out = next;
        }
        out
    };
    let mut out = vec![Complex64::zero(); d + 1];
    for (j, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let left = pow(lin_a, d - j);
        let right = pow(lin_c, j);
        for (s, l) in left.iter().enumerate() {
            for (t, r) in right.iter().enumerate() {
                out[s + t] += c * (l * r);
            }
        }
    }
    XYPoly::new(out)
}

/// A modular form prepared for Eichler integration.
#[derive(Debug, Clone)]
pub struct ModularForm {
    weight: u32,
    coeffs: Vec<f64>,
}

impl ModularForm {
    /// Requires a homogeneous modular form of even weight `k ≥ 4`.
    pub fn new(f: &QMPoly, terms: usize) -> Result<Self> {
        if !f.is_modular() {
            return Err(Error::NotModular(f.to_string()));
        }
        let weight = f.homogeneous_weight()?.unwrap_or(4);
        if weight < 4 {
            return Err(Error::UnsupportedWeight {
                what: "Eichler integral",
                weight,
            });
        }
        let coeffs = expand(f, terms)
            .coeffs()
            .iter()
            .map(rational_to_f64)
            .collect();
        Ok(ModularForm { weight, coeffs })
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// `∫_τ^{i∞} (2πi)^{k−1} f(z) (X − zY)^{k−2} dz`, regularized at the cusp.
    pub fn eichler_integral(&self, tau: Complex64) -> Result<XYPoly> {
        if tau.im <= 0.0 {
            return Err(Error::NotInUpperHalfPlane(tau.im));
        }
        let deg = self.weight as usize - 2;
        let q = (two_pi_i() * tau).exp();
        let tau_pows: Vec<Complex64> = (0..=deg + 1).map(|e| tau.powu(e as u32)).collect();
        // moments[j] = ∫_τ^{i∞} f(z) z^j dz
        let mut moments = vec![Complex64::zero(); deg + 1];
        for (j, m) in moments.iter_mut().enumerate() {
            *m = -tau_pows[j + 1] * (self.coeffs[0] / (j + 1) as f64);
        }
        let mut qn = Complex64::new(1.0, 0.0);
        for (n, &a) in self.coeffs.iter().enumerate().skip(1) {
            qn *= q;
            if a == 0.0 {
                continue;
            }
            let alpha = two_pi_i() * n as f64;
            let inv_alpha = alpha.inv();
            for (j, m) in moments.iter_mut().enumerate() {
                // antiderivative of e^{αz} z^j is e^{αz} Σ_s (−1)^s j!/(j−s)! z^{j−s} / α^{s+1}
                let mut sum = Complex64::zero();
                let mut falling = 1.0;
                let mut inv_pow = inv_alpha;
                for s in 0..=j {
                    let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                    sum += tau_pows[j - s] * inv_pow * (sign * falling);
                    falling *= (j - s) as f64;
                    inv_pow *= inv_alpha;
                }
                *m -= qn * sum * a;
            }
        }
        let prefactor = two_pi_i().powu(self.weight - 1);
        let mut binom = 1.0;
        let coeffs = (0..=deg)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                let c = prefactor * moments[j] * (binom * sign);
                binom = binom * (deg - j) as f64 / (j + 1) as f64;
                c
            })
            .collect();
        Ok(XYPoly::new(coeffs))
    }

    /// `r_f(γ) = E(τ) − E(γτ)|γ` with `E` the regularized Eichler integral.
    pub fn cocycle(&self, g: &SL2Mat, tau: Complex64) -> Result<XYPoly> {
        check_admissible(g, tau)?;
        let here = self.eichler_integral(tau)?;
        let there = self.eichler_integral(g.act(tau))?;
        Ok(here.sub(&slash_poly(&there, g)))
    }
}

fn check_admissible(g: &SL2Mat, tau: Complex64) -> Result<()> {
    let moved = g.act(tau);
    if tau.im < MIN_IMAG || moved.im < MIN_IMAG {
        return Err(Error::Precondition(format!(
            "imaginary parts of tau ({:.4}) and g.tau ({:.4}) must be at least {MIN_IMAG}",
            tau.im, moved.im
        )));
    }
    Ok(())
}

/// A base point at which both `τ` and `γτ` are well inside the upper half-plane.
///
/// For `c ≠ 0` this is `−d/c + i/|c|`, which maximizes `min(Im τ, Im γτ)`.
pub fn admissible_tau(g: &SL2Mat) -> Option<Complex64> {
    let tau = if g.c == 0 {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(-(g.d as f64) / g.c as f64, 1.0 / (g.c as f64).abs())
    };
    (tau.im >= MIN_IMAG && g.act(tau).im >= MIN_IMAG - 1e-12).then_some(tau)
}

pub fn eichler_integral(f: &QMPoly, tau: Complex64, terms: usize) -> Result<XYPoly> {
    ModularForm::new(f, terms)?.eichler_integral(tau)
}

pub fn cocycle_r(f: &QMPoly, g: &SL2Mat, tau: Complex64, terms: usize) -> Result<XYPoly> {
    ModularForm::new(f, terms)?.cocycle(g, tau)
}

/// Generators of the braid group `B3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum B3Gen {
    Sigma1,
    Sigma1Inv,
    Sigma2,
    Sigma2Inv,
}

impl B3Gen {
    /// `σ1 ↦ (1,1;0,1)`, `σ2 ↦ (1,0;−1,1)`.
    pub fn to_sl2(self) -> SL2Mat {
        let s1 = SL2Mat::T;
        let s2 = SL2Mat {
            a: 1,
            b: 0,
            c: -1,
            d: 1,
        };
        match self {
            B3Gen::Sigma1 => s1,
            B3Gen::Sigma1Inv => s1.inverse(),
            B3Gen::Sigma2 => s2,
            B3Gen::Sigma2Inv => s2.inverse(),
        }
    }
}

/// A word in `σ1^{±1}, σ2^{±1}`; braid relations are not applied.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct B3Word(pub Vec<B3Gen>);

impl B3Word {
    pub fn concat(&self, other: &B3Word) -> B3Word {
        B3Word(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl FromStr for B3Word {
    type Err = Error;

    /// Whitespace- or comma-separated tokens `s1`, `s2`, `s1^-1`, `s2^-1`.
    fn from_str(s: &str) -> Result<Self> {
        s.split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| match t.to_ascii_lowercase().as_str() {
                "s1" | "σ1" => Ok(B3Gen::Sigma1),
                "s2" | "σ2" => Ok(B3Gen::Sigma2),
                "s1^-1" | "σ1^-1" => Ok(B3Gen::Sigma1Inv),
                "s2^-1" | "σ2^-1" => Ok(B3Gen::Sigma2Inv),
                _ => Err(Error::Usage(format!("unknown braid generator {t:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(B3Word)
    }
}

impl fmt::Display for B3Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .0
            .iter()
            .map(|g| match g {
                B3Gen::Sigma1 => "s1",
                B3Gen::Sigma1Inv => "s1^-1",
                B3Gen::Sigma2 => "s2",
                B3Gen::Sigma2Inv => "s2^-1",
            })
            .collect();
        f.write_str(&names.join(" "))
    }
}

pub fn b3_to_sl2(w: &B3Word) -> SL2Mat {
    w.0.iter()
        .fold(SL2Mat::IDENTITY, |acc, g| acc.mul(&g.to_sl2()))
}

/// The branch of `log(cτ + d)` for the lift of `w`, built from principal
/// logarithms on generators via `ℓ_{uv}(τ) = ℓ_u(γ_v τ) + ℓ_v(τ)`.
pub fn log_automorphy(w: &B3Word, tau: Complex64) -> Complex64 {
    let mut total = Complex64::zero();
    let mut point = tau;
    for g in w.0.iter().rev() {
        let m = g.to_sl2();
        total += m.automorphy(point).ln();
        point = m.act(point);
    }
    total
}

/// Evaluates the `B3` cocycle of `E2` numerically.
#[derive(Debug, Clone)]
pub struct E2Cocycle {
    neg_log_delta: LogQSeries,
}

impl E2Cocycle {
    pub fn new(terms: usize) -> Self {
        E2Cocycle {
            neg_log_delta: iter_integral(&bar_word([QMPoly::e2()]), terms),
        }
    }

    /// `I(E2; γτ) − I(E2; τ) + 12·ℓ_w(τ)`; an integer multiple of `2πi`.
    pub fn value(&self, w: &B3Word, tau: Complex64) -> Result<Complex64> {
        let g = b3_to_sl2(w);
        check_admissible(&g, tau)?;
        let here = self.neg_log_delta.eval_numeric(tau)?;
        let there = self.neg_log_delta.eval_numeric(g.act(tau))?;
        Ok(there - here + log_automorphy(w, tau) * 12.0)
    }
}

pub fn e2_cocycle(w: &B3Word, tau: Complex64, terms: usize) -> Result<Complex64> {
    E2Cocycle::new(terms).value(w, tau)
}

/// One component `Σ λ_g · r_g` of the cocycle of a quasimodular form, grouped by degree.
///
/// Degree 0 holds the `E2` part (a scalar), higher degrees the modular parts.
pub fn cocycle_r_qm(f: &QMPoly, w: &B3Word, tau: Complex64, terms: usize) -> Result<Vec<XYPoly>> {
    let g = b3_to_sl2(w);
    let mut by_degree: BTreeMap<usize, XYPoly> = BTreeMap::new();
    for t in derivative_decomposition(f)? {
        let lambda = Complex64::new(rational_to_f64(&t.lambda), 0.0);
        let value = if t.form == QMPoly::e2() {
            XYPoly::new(vec![e2_cocycle(w, tau, terms)?])
        } else {
            cocycle_r(&t.form, &g, tau, terms)?
        };
        let value = value.scale(lambda);
        let deg = value.degree();
        let slot = by_degree.entry(deg).or_insert_with(|| XYPoly::zero(deg));
        *slot = slot.add(&value);
    }
    Ok(by_degree.into_values().collect())
}
