//! Expression grammar for polynomials.
//!
//! ```text
//! expr   := ["+"|"-"] term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := atom ["^" ["-"] int]
//! atom   := scalar | gen | symbol | int | "(" expr ")"
//! gen    := KIND "[" int "," int "]"      KIND ∈ T L Om OmL OmT Im ImL
//! scalar := q | p | x | lam | Nq | kq
//! symbol := XiX | DetT | TrOmL
//! ```
//!
//! Division and negative powers are only allowed for scalar operands.
//! Indices are 1-based.

use std::cell::OnceCell;

use num_bigint::BigInt;

use crate::error::{QdcError, Result};
use crate::ncalg::{Gen, Kind, Polynomial};
use crate::presentations::{defined_symbols, Context, DefinedSymbols};
use crate::rmatrix::Convention;
use crate::scalar::{Constants, Scalar};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v: BigInt =
                src[start..i].parse().map_err(|_| QdcError::Parse { pos: start, msg: "bad integer".into() })?;
            out.push((start, Tok::Int(v)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()[],".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(QdcError::Parse { pos: i, msg: format!("unexpected character '{c}'") });
        }
    }
    Ok(out)
}

/// Parser for one `N`; composite symbols are built on first use.
pub struct ExprParser {
    n: usize,
    convention: Convention,
    consts: Constants,
    symbols: OnceCell<Result<DefinedSymbols>>,
}

impl ExprParser {
    pub fn new(n: usize, convention: Convention) -> Result<Self> {
        Ok(ExprParser { n, convention, consts: Constants::new(n)?, symbols: OnceCell::new() })
    }

    pub fn with_symbols(n: usize, symbols: DefinedSymbols) -> Result<Self> {
        let cell = OnceCell::new();
        let _ = cell.set(Ok(symbols));
        Ok(ExprParser { n, convention: Convention::Standard, consts: Constants::new(n)?, symbols: cell })
    }

    fn symbols(&self) -> Result<&DefinedSymbols> {
        self.symbols
            .get_or_init(|| defined_symbols(&Context::new(self.n, self.convention)?))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn parse(&self, src: &str) -> Result<Polynomial> {
        let toks = lex(src)?;
        let mut st = State { toks: &toks, pos: 0, end: src.len(), p: self };
        let e = st.expr()?;
        if let Some((at, t)) = st.toks.get(st.pos) {
            return Err(QdcError::Parse { pos: *at, msg: format!("unexpected {}", describe(t)) });
        }
        Ok(e)
    }
}

/// Parse with default symbols for the given `N`.
pub fn parse_expr(src: &str, n: usize) -> Result<Polynomial> {
    ExprParser::new(n, Convention::Standard)?.parse(src)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("integer {v}"),
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Sym(c) => format!("'{c}'"),
    }
}

struct State<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    p: &'a ExprParser,
}

impl State<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(QdcError::Parse { pos: self.at(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let at = self.at();
                self.pos += 1;
                let d = self.factor()?;
                let s = as_scalar(&d).ok_or(QdcError::Parse { pos: at, msg: "division by a non-scalar".into() })?;
                let inv = s.checked_inv().map_err(|_| QdcError::Parse { pos: at, msg: "division by zero".into() })?;
                acc = acc.scale(&inv);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.at();
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Int(v)) => {
                let k: i64 = v.try_into().map_err(|_| QdcError::Parse { pos: at, msg: "exponent too large".into() })?;
                self.pos += 1;
                k
            }
            _ => return self.err("expected integer exponent"),
        };
        if neg {
            let s =
                as_scalar(&base).ok_or(QdcError::Parse { pos: at, msg: "negative power of a non-scalar".into() })?;
            let v = s.pow(-k).map_err(|_| QdcError::Parse { pos: at, msg: "negative power of zero".into() })?;
            return Ok(Polynomial::constant(self.p.n, v));
        }
        if let Some(s) = as_scalar(&base) {
            return Ok(Polynomial::constant(self.p.n, s.pow(k)?));
        }
        let mut out = Polynomial::one(self.p.n);
        for _ in 0..k {
            out = out.mul(&base);
        }
        Ok(out)
    }

    fn index(&mut self) -> Result<usize> {
        let at = self.at();
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                let n = self.p.n;
                match usize::try_from(&v) {
                    Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                    _ => Err(QdcError::IndexOutOfRange { index: i64::try_from(&v).unwrap_or(i64::MAX), n }),
                }
            }
            _ => Err(QdcError::Parse { pos: at, msg: "expected index".into() }),
        }
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.p.n;
        let c = &self.p.consts;
        let tok = match self.peek().cloned() {
            Some(t) => t,
            None => return self.err("unexpected end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::Int(v) => Ok(Polynomial::constant(n, Scalar::from_bigint(v))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym(ch) => {
                self.pos -= 1;
                self.err(format!("unexpected '{ch}'"))
            }
            Tok::Ident(name) => {
                if self.peek() == Some(&Tok::Sym('[')) {
                    let kind: Kind = name.parse().map_err(|_| QdcError::Parse {
                        pos: self.toks[self.pos - 1].0,
                        msg: format!("unknown generator kind '{name}'"),
                    })?;
                    self.pos += 1;
                    let i = self.index()?;
                    self.expect(',')?;
                    let j = self.index()?;
                    self.expect(']')?;
                    return Ok(Polynomial::gen(n, Gen::new(kind, i, j)));
                }
                let s = match name.as_str() {
                    "q" => c.q.clone(),
                    "p" => Scalar::p(),
                    "x" => Scalar::x(),
                    "lam" => c.lambda.clone(),
                    "Nq" => c.n_q.clone(),
                    "kq" => c.kappa.clone(),
                    "XiX" => return Ok(self.p.symbols()?.xi_x.clone()),
                    "DetT" => return Ok(self.p.symbols()?.det_t.clone()),
                    "TrOmL" => return Ok(self.p.symbols()?.tr_om_l.clone()),
                    _ => {
                        self.pos -= 1;
                        return self.err(format!("unknown symbol '{name}'"));
                    }
                };
                Ok(Polynomial::constant(n, s))
            }
        }
    }
}

fn as_scalar(p: &Polynomial) -> Option<Scalar> {
    if p.is_zero() {
        return Some(Scalar::zero());
    }
    match p.terms().next() {
        Some((w, c)) if p.len() == 1 && w.is_empty() => Some(c.clone()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_letter_word() {
        let p = parse_expr("T[1,2]*Om[2,1]", 2).unwrap();
        let w = Polynomial::gen(2, Gen::new(Kind::T, 0, 1)).mul(&Polynomial::gen(2, Gen::new(Kind::Om, 1, 0)));
        assert_eq!(p, w);
    }

    #[test]
    fn scalar_expression() {
        let p = parse_expr("q^2 - lam*x", 2).unwrap();
        let c = Constants::new(2).unwrap();
        let expect = &c.q_pow(2) - &(&c.lambda * &Scalar::x());
        assert_eq!(p, Polynomial::constant(2, expect));
    }

    #[test]
    fn index_range() {
        assert!(matches!(parse_expr("T[0,1]", 2), Err(QdcError::IndexOutOfRange { index: 0, n: 2 })));
        assert!(matches!(parse_expr("T[1,3]", 2), Err(QdcError::IndexOutOfRange { index: 3, n: 2 })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        assert!(matches!(parse_expr("T[1,2] * * T[1,1]", 2), Err(QdcError::Parse { pos: 9, .. })));
        assert!(matches!(parse_expr("T[1,2] $", 2), Err(QdcError::Parse { pos: 7, .. })));
        assert!(matches!(parse_expr("(p + 1", 2), Err(QdcError::Parse { pos: 6, .. })));
        assert!(matches!(parse_expr("Foo[1,1]", 2), Err(QdcError::Parse { .. })));
        assert!(matches!(parse_expr("T[1,1]/T[1,2]", 2), Err(QdcError::Parse { .. })));
    }

    #[test]
    fn printed_forms_parse_back() {
        for s in [
            "-(1/p^4)*OmT[1,1]",
            "T[1,1]*T[2,2] - ((p^4 - 1)/p^2)*T[1,2]*T[2,1] - 3",
            "((p^2 - 1)/p)",
            "-2*x",
            "0",
            "1",
        ] {
            let p = parse_expr(s, 2).unwrap();
            assert_eq!(p.to_expr_string(), s);
        }
    }

    #[test]
    fn powers() {
        let a = parse_expr("(T[1,1] + L[1,1])^2", 2).unwrap();
        let b = parse_expr("T[1,1]*T[1,1] + T[1,1]*L[1,1] + L[1,1]*T[1,1] + L[1,1]*L[1,1]", 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_expr("q^-1", 2).unwrap(), parse_expr("1/p^2", 2).unwrap());
        assert!(parse_expr("T[1,1]^-1", 2).is_err());
    }

    #[test]
    fn composite_symbols() {
        let n = 2;
        let s = defined_symbols(&Context::new(n, Convention::Standard).unwrap()).unwrap();
        assert_eq!(parse_expr("TrOmL", n).unwrap(), s.tr_om_l);
        assert_eq!(parse_expr("DetT", n).unwrap(), s.det_t);
        assert_eq!(parse_expr("XiX*XiX", n).unwrap(), s.xi_x.mul(&s.xi_x));
    }
}
