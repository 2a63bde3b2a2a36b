//! Expressions over `E2, E4, E6, Delta`, rationals, `D(…)` and `I(…)`.
//!
//! ```text
//! expr   := '-'? term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'E2' | 'E4' | 'E6' | 'Delta' | rational | 'D(' expr ')'
//!         | 'I(' expr (',' expr)* ')' | '(' expr ')'
//! rational := uint ('/' uint)?
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::iterint::{bar_word, BarCombo};
use crate::qseries::Rational;
use crate::quasimodular::QMPoly;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    E2,
    E4,
    E6,
    Delta,
    Num(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    D(Box<Expr>),
    I(Vec<Expr>),
}

impl Expr {
    fn contains_integral(&self) -> bool {
        match self {
            Expr::I(_) => true,
            Expr::E2 | Expr::E4 | Expr::E6 | Expr::Delta | Expr::Num(_) => false,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::D(a) => a.contains_integral(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.contains_integral() || b.contains_integral()
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::E2 => f.write_str("E2"),
            Expr::E4 => f.write_str("E4"),
            Expr::E6 => f.write_str("E6"),
            Expr::Delta => f.write_str("Delta"),
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a})*({b})"),
            Expr::Pow(a, e) => write!(f, "({a})^{e}"),
            Expr::D(a) => write!(f, "D({a})"),
            Expr::I(args) => {
                let parts: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "I({})", parts.join(","))
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            offset: self.pos,
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.error(format!("expected '{c}', found '{found}'")),
                None => self.error(format!("expected '{c}', found end of input")),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.term()?
        };
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return self.error("expected a non-negative integer exponent");
            }
            let e: u32 = digits.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: "exponent too large".into(),
            })?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_digit)
            .count();
        self.pos += len;
        &self.src[start..start + len]
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        let len = self.src[start..]
            .bytes()
            .take_while(u8::is_ascii_alphanumeric)
            .count();
        self.pos += len;
        &self.src[start..start + len]
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(c) = self.peek() else {
            return self.error("unexpected end of input");
        };
        if c == '(' {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        if c.is_ascii_digit() {
            let num: BigInt = self.digits().parse().expect("digits");
            if self.eat('/') {
                self.skip_ws();
                let den_pos = self.pos;
                let den = self.digits();
                if den.is_empty() {
                    return self.error("expected a denominator");
                }
                let den: BigInt = den.parse().expect("digits");
                if den.is_zero() {
                    return Err(Error::Syntax {
                        offset: den_pos,
                        message: "zero denominator".into(),
                    });
                }
                return Ok(Expr::Num(Rational::new(num, den)));
            }
            return Ok(Expr::Num(Rational::from_integer(num)));
        }
        let start = self.pos;
        match self.ident() {
            "E2" => Ok(Expr::E2),
            "E4" => Ok(Expr::E4),
            "E6" => Ok(Expr::E6),
            "Delta" => Ok(Expr::Delta),
            "D" => {
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Expr::D(Box::new(e)))
            }
            "I" => {
                self.expect('(')?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                Ok(Expr::I(args))
            }
            "" => self.error(format!("unexpected '{c}'")),
            other => Err(Error::Syntax {
                offset: start,
                message: format!("unknown identifier '{other}'"),
            }),
        }
    }
}

/// Parses and type-checks an expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    if let Some(c) = p.peek() {
        return p.error(format!("unexpected '{c}'"));
    }
    check(&e, "expr")?;
    Ok(e)
}

fn check(e: &Expr, path: &str) -> Result<()> {
    match e {
        Expr::I(args) => {
            for (i, a) in args.iter().enumerate() {
                let here = format!("{path}/I[{i}]");
                if a.contains_integral() {
                    return Err(Error::Typing {
                        path: here,
                        message: "iterated integral inside an I argument".into(),
                    });
                }
                check(a, &here)?;
            }
            Ok(())
        }
        Expr::Neg(a) => check(a, &format!("{path}/neg")),
        Expr::Pow(a, _) => check(a, &format!("{path}/^")),
        Expr::D(a) => check(a, &format!("{path}/D")),
        Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            let op = match e {
                Expr::Add(..) => "+",
                Expr::Sub(..) => "-",
                _ => "*",
            };
            check(a, &format!("{path}/{op}[0]"))?;
            check(b, &format!("{path}/{op}[1]"))
        }
        _ => Ok(()),
    }
}

/// A quasimodular form, or a combination of iterated integrals.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Form(QMPoly),
    Combo(BarCombo),
}

impl Value {
    pub fn into_combo(self) -> BarCombo {
        match self {
            Value::Form(p) => BarCombo::scalar(p),
            Value::Combo(c) => c,
        }
    }
}

pub fn eval(e: &Expr) -> Value {
    use Value::*;
    match e {
        Expr::E2 => Form(QMPoly::e2()),
        Expr::E4 => Form(QMPoly::e4()),
        Expr::E6 => Form(QMPoly::e6()),
        Expr::Delta => Form(QMPoly::delta()),
        Expr::Num(r) => Form(QMPoly::constant(r.clone())),
        Expr::Neg(a) => match eval(a) {
            Form(p) => Form(-p),
            Combo(c) => Combo(c.scale(&-QMPoly::one())),
        },
        Expr::Add(a, b) => match (eval(a), eval(b)) {
            (Form(x), Form(y)) => Form(x + y),
            (x, y) => Combo(x.into_combo().add(&y.into_combo())),
        },
        Expr::Sub(a, b) => match (eval(a), eval(b)) {
            (Form(x), Form(y)) => Form(x - y),
            (x, y) => Combo(x.into_combo().sub(&y.into_combo())),
        },
        Expr::Mul(a, b) => match (eval(a), eval(b)) {
            (Form(x), Form(y)) => Form(x * y),
            (Form(x), Combo(c)) | (Combo(c), Form(x)) => Combo(c.scale(&x)),
            (Combo(x), Combo(y)) => Combo(x.shuffle_mul(&y)),
        },
        Expr::Pow(a, n) => match eval(a) {
            Form(p) => Form(p.pow(*n)),
            Combo(c) => Combo((0..*n).fold(BarCombo::unit(), |acc, _| acc.shuffle_mul(&c))),
        },
        Expr::D(a) => match eval(a) {
            Form(p) => Form(p.derive()),
            Combo(c) => Combo(c.derive()),
        },
        Expr::I(args) => {
            let letters = args.iter().map(|a| match eval(a) {
                Form(p) => p,
                Combo(_) => unreachable!("rejected by parse"),
            });
            Combo(BarCombo::word(bar_word(letters)))
        }
    }
}

/// Parses and evaluates; fails if the result is not a quasimodular form.
pub fn parse_form(text: &str) -> Result<QMPoly> {
    match eval(&parse(text)?) {
        Value::Form(p) => Ok(p),
        Value::Combo(_) => Err(Error::Typing {
            path: "expr".into(),
            message: "expected a quasimodular form, found an iterated integral".into(),
        }),
    }
}

pub fn parse_value(text: &str) -> Result<Value> {
    Ok(eval(&parse(text)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::{int, rat};

    #[test]
    fn parse_examples() {
        let e = parse("E4^3 - E6^2").unwrap();
        assert_eq!(
            e,
            Expr::Sub(
                Box::new(Expr::Pow(Box::new(Expr::E4), 3)),
                Box::new(Expr::Pow(Box::new(Expr::E6), 2))
            )
        );
        let e = parse("I(E2, E4*E6)").unwrap();
        match eval(&e) {
            Value::Combo(c) => {
                let w = bar_word([QMPoly::e2(), &QMPoly::e4() * &QMPoly::e6()]);
                assert_eq!(c, BarCombo::word(w));
            }
            other => panic!("{other:?}"),
        }
        let err = parse("I(I(E2))").unwrap_err();
        assert!(
            matches!(err, Error::Typing { ref path, .. } if path == "expr/I[0]"),
            "{err}"
        );
    }

    #[test]
    fn forms() {
        assert_eq!(parse_form("Delta").unwrap(), QMPoly::delta());
        assert_eq!(
            parse_form("(E4^3 - E6^2)/1728").ok(),
            None,
            "division is not part of the grammar"
        );
        assert_eq!(
            parse_form("1/1728*E4^3 - 1/1728*E6^2").unwrap(),
            QMPoly::delta()
        );
        assert_eq!(
            parse_form("-E2 + 3").unwrap(),
            QMPoly::constant(int(3)) - QMPoly::e2()
        );
        assert_eq!(parse_form("D(E4)").unwrap(), QMPoly::e4().derive());
        assert_eq!(parse_form(" 2/4 ").unwrap(), QMPoly::constant(rat(1, 2)));
        assert_eq!(parse_form("E2^0").unwrap(), QMPoly::one());
    }

    #[test]
    fn display_of_forms_parses_back() {
        for p in [
            QMPoly::delta(),
            QMPoly::e2().pow(2).scale(&rat(1, 12)) - QMPoly::e4().scale(&rat(1, 12)),
            QMPoly::e2() * QMPoly::e4() * QMPoly::e6() + QMPoly::constant(rat(-7, 3)),
            QMPoly::zero(),
        ] {
            assert_eq!(parse_form(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn combos() {
        let Value::Combo(c) = parse_value("2*I(1)^2 - D(I(E4,1))").unwrap() else {
            panic!()
        };
        let i1 = BarCombo::word(bar_word([QMPoly::one()]));
        let expected = i1
            .shuffle_mul(&i1)
            .scale(&QMPoly::constant(int(2)))
            .sub(&BarCombo::word(bar_word([QMPoly::e4(), QMPoly::one()])).derive());
        assert_eq!(c, expected);
        assert!(parse_form("I(E4)").is_err());
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        for (text, offset) in [
            ("E4 +", 4),
            ("E4 $ E6", 3),
            ("E5", 0),
            ("(E4", 3),
            ("E4^x", 3),
            ("1/0", 2),
            ("I()", 2),
        ] {
            match parse(text) {
                Err(Error::Syntax { offset: o, .. }) => assert_eq!(o, offset, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
