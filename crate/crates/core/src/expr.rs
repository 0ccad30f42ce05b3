//! A small expression language for invariant symbols.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = ("+" | "-") unary | power ;
//! power   = atom [ "^" ["+" | "-"] integer ] ;
//! atom    = number | "r1" | "r2" | "r3" | "b" | "i"
//!         | "shell" "(" signed "," signed ")" | "(" expr ")" ;
//! ```
//!
//! `b` is `1 − r1² − r2² − r3² + r1²r3²` and `shell(lo, hi)` is the indicator
//! of `lo ≤ b < hi`. Whitespace is ignored.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::ToString;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::b_poly;
use crate::orbit::RadialTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    R1,
    R2,
    R3,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Complex64),
    Var(Var),
    Shell(f64, f64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        if p.pos == p.src.len() {
            return Err(p.error("empty expression"));
        }
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, r: RadialTriple) -> Complex64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::R1) => r.r1.into(),
            Expr::Var(Var::R2) => r.r2.into(),
            Expr::Var(Var::R3) => r.r3.into(),
            Expr::Var(Var::B) => b_poly(r).into(),
            Expr::Shell(lo, hi) => {
                let b = b_poly(r);
                if *lo <= b && b < *hi {
                    1.0.into()
                } else {
                    0.0.into()
                }
            }
            Expr::Neg(a) => -a.eval(r),
            Expr::Add(a, b) => a.eval(r) + b.eval(r),
            Expr::Sub(a, b) => a.eval(r) - b.eval(r),
            Expr::Mul(a, b) => a.eval(r) * b.eval(r),
            Expr::Div(a, b) => div(a.eval(r), b.eval(r)),
            Expr::Pow(a, k) => powi(a.eval(r), *k),
        }
    }

    /// Whether the expression is real-valued, i.e. never mentions `i`.
    pub fn is_real(&self) -> bool {
        match self {
            Expr::Const(c) => c.im == 0.0,
            Expr::Var(_) | Expr::Shell(..) => true,
            Expr::Neg(a) | Expr::Pow(a, _) => a.is_real(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => a.is_real() && b.is_real(),
        }
    }
}

/// Complex division that stays exact on real operands.
fn div(a: Complex64, b: Complex64) -> Complex64 {
    if a.im == 0.0 && b.im == 0.0 {
        Complex64::new(a.re / b.re, 0.0)
    } else {
        a / b
    }
}

/// Integer power by squaring, with `z⁰ = 1`.
fn powi(z: Complex64, k: i32) -> Complex64 {
    let mut base = z;
    let mut e = k.unsigned_abs();
    let mut acc = Complex64::new(1.0, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    if k < 0 {
        div(Complex64::new(1.0, 0.0), acc)
    } else {
        acc
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("exponent must be an integer"));
        }
        let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        let k: i32 = digits.parse().map_err(|_| Error::Parse {
            pos: start,
            msg: "exponent out of range".to_string(),
        })?;
        if self.peek() == Some(b'.') {
            return Err(self.error("exponent must be an integer"));
        }
        Ok(Expr::Pow(Box::new(base), if neg { -k } else { k }))
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?.into())),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        text.parse::<f64>().map_err(|_| Error::Parse {
            pos: start,
            msg: format!("invalid number '{text}'"),
        })
    }

    fn signed_number(&mut self) -> Result<f64> {
        let neg = self.eat(b'-');
        let x = self.number()?;
        Ok(if neg { -x } else { x })
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
        match name {
            "r1" => Ok(Expr::Var(Var::R1)),
            "r2" => Ok(Expr::Var(Var::R2)),
            "r3" => Ok(Expr::Var(Var::R3)),
            "b" => Ok(Expr::Var(Var::B)),
            "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
            "shell" => {
                self.expect(b'(')?;
                let lo = self.signed_number()?;
                self.expect(b',')?;
                let hi = self.signed_number()?;
                self.expect(b')')?;
                if !(lo < hi) {
                    return Err(Error::Parse {
                        pos: start,
                        msg: "shell bounds must satisfy lo < hi".to_string(),
                    });
                }
                Ok(Expr::Shell(lo, hi))
            }
            _ => Err(Error::Parse {
                pos: start,
                msg: format!("unknown identifier '{name}'"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, r: (f64, f64, f64)) -> Complex64 {
        Expr::parse(s).unwrap().eval(RadialTriple::new(r.0, r.1, r.2).unwrap())
    }

    #[test]
    fn precedence() {
        let r = (0.5, 0.25, 2.0);
        assert_eq!(ev("1 + 2 * 3", r), 7.0.into());
        assert_eq!(ev("-r1^2", r), (-0.25).into());
        assert_eq!(ev("(1 + r1)^2", r), 2.25.into());
        assert_eq!(ev("r3^-1", r), 0.5.into());
        assert_eq!(ev("r3 ^ +2", r), 4.0.into());
        assert_eq!(ev("8 / 2 / 2", r), 2.0.into());
        assert_eq!(ev("1 - 2 - 3", r), (-4.0).into());
        assert_eq!(ev("2 * i", r), Complex64::new(0.0, 2.0));
        assert_eq!(ev("1.5e1", r), 15.0.into());
    }

    #[test]
    fn builtins() {
        let r = (0.5, 0.1, 0.3);
        assert!((ev("b", r).re - 0.6725).abs() < 1e-15);
        assert_eq!(ev("shell(0.5, 0.7)", r), 1.0.into());
        assert_eq!(ev("shell(0, 0.5)", r), 0.0.into());
        assert_eq!(ev("shell(-1, 0.7)", r), 1.0.into());
    }

    #[test]
    fn errors() {
        for bad in [
            "",
            "r4",
            "1 +",
            "r1^0.5",
            "r1^",
            "(r1",
            "r1 r2",
            "shell(1, 0)",
            "2 $ 3",
            "r1^99999999999",
        ] {
            assert!(matches!(Expr::parse(bad), Err(Error::Parse { .. })), "{bad}");
        }
        match Expr::parse("r1 + q") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn realness() {
        assert!(Expr::parse("1/(1 + r1^2)").unwrap().is_real());
        assert!(!Expr::parse("r1 + i*r2").unwrap().is_real());
    }
}
