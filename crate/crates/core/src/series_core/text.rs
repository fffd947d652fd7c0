//! Canonical text form of truncated series.
//!
//! Printing emits a sum of `coef*x^i*y^j*z^k` terms in graded-lex order.
//! Coefficients are `a/b`, `c/di`, or, when both parts are nonzero, the
//! parenthesised `(a/b+c/di)`. Unit coefficients are omitted.
//!
//! Parsing accepts any polynomial expression over `+ - * / ^` and
//! parentheses, with rational literals lexed greedily (`3/4i` is the single
//! literal `(3/4)·i`), `i` for the imaginary unit, and the variables
//! `x, y, z` (only `x, y` for two variables). Division is only allowed by
//! nonzero constants. The canonical form parses back to the same series.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::gaussian::GaussianRational;
use super::series::TruncatedSeries;
use super::index::MultiIndex;

pub const VARIABLE_NAMES: [&str; 3] = ["x", "y", "z"];

const MAX_DEPTH: usize = 128;
const MAX_EXPONENT: u32 = 1024;
const MAX_COEFFICIENT_BITS: u64 = 1 << 16;

/// 1-based position in the source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl Position {
    pub const START: Position = Position { line: 1, column: 1 };
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(pos: Position, message: impl Into<String>) -> Self {
        Self { line: pos.line, column: pos.column, message: message.into() }
    }
}

// ---------------------------------------------------------------- printing

fn write_coefficient_magnitude(f: &mut fmt::Formatter<'_>, c: &GaussianRational, has_monomial: bool) -> fmt::Result {
    // c is real-positive, pure-imaginary with positive part, or grouped.
    if c.needs_grouping() {
        write!(f, "({c})")?;
    } else if c.is_one() && has_monomial {
        return Ok(());
    } else {
        write!(f, "{c}")?;
    }
    if has_monomial {
        f.write_str("*")?;
    }
    Ok(())
}

fn write_monomial<const N: usize>(f: &mut fmt::Formatter<'_>, idx: &MultiIndex<N>) -> fmt::Result {
    let mut first = true;
    for (var, &e) in idx.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(VARIABLE_NAMES[var])?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

pub(crate) fn write_series<const N: usize>(f: &mut fmt::Formatter<'_>, s: &TruncatedSeries<N>) -> fmt::Result {
    assert!(N <= VARIABLE_NAMES.len(), "text form supports at most three variables");
    if s.is_zero() {
        return f.write_str("0");
    }
    for (n, (idx, c)) in s.terms().enumerate() {
        let negative = if c.needs_grouping() {
            false
        } else if c.is_real() {
            c.re().is_negative()
        } else {
            c.im().is_negative()
        };
        match (n == 0, negative) {
            (true, true) => f.write_str("-")?,
            (true, false) => {}
            (false, true) => f.write_str(" - ")?,
            (false, false) => f.write_str(" + ")?,
        }
        let magnitude = if negative { -c } else { c.clone() };
        let has_monomial = idx.degree() > 0;
        write_coefficient_magnitude(f, &magnitude, has_monomial)?;
        write_monomial(f, idx)?;
    }
    Ok(())
}

// ----------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Literal(GaussianRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    pos: Position,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, origin: Position) -> Self {
        Self { chars: src.char_indices().peekable(), src, pos: origin }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn digits(&mut self) -> &'a str {
        let start = self.offset();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let end = self.offset();
        &self.src[start..end]
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, Position)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Some(c) if c.is_whitespace()) {
                self.bump();
            }
            let at = self.pos;
            let Some(c) = self.peek() else {
                out.push((Tok::End, at));
                return Ok(out);
            };
            let tok = match c {
                '0'..='9' => {
                    let num: BigInt = self.digits().parse().expect("ascii digits");
                    let mut value = BigRational::from_integer(num);
                    if self.peek() == Some('/') && matches!(self.peek_second(), Some(d) if d.is_ascii_digit()) {
                        self.bump();
                        let den: BigInt = self.digits().parse().expect("ascii digits");
                        if den.is_zero() {
                            return Err(ParseError::at(at, "zero denominator in literal"));
                        }
                        value /= BigRational::from_integer(den);
                    }
                    let imaginary = self.peek() == Some('i')
                        && !matches!(self.peek_second(), Some(d) if d.is_alphanumeric() || d == '_');
                    if imaginary {
                        self.bump();
                        Tok::Literal(GaussianRational::new(BigRational::zero(), value))
                    } else {
                        Tok::Literal(GaussianRational::from_real(value))
                    }
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = self.offset();
                    while matches!(self.peek(), Some(d) if d.is_alphanumeric() || d == '_') {
                        self.bump();
                    }
                    let end = self.offset();
                    Tok::Ident(self.src[start..end].to_string())
                }
                _ => {
                    self.bump();
                    match c {
                        '+' => Tok::Plus,
                        '-' => Tok::Minus,
                        '*' => Tok::Star,
                        '/' => Tok::Slash,
                        '^' => Tok::Caret,
                        '(' => Tok::LParen,
                        ')' => Tok::RParen,
                        other => return Err(ParseError::at(at, format!("unexpected character {other:?}"))),
                    }
                }
            };
            out.push((tok, at));
        }
    }
}

// ---------------------------------------------------------------- parsing

struct Parser<const N: usize> {
    toks: Vec<(Tok, Position)>,
    at: usize,
    order: u32,
    allow_vars: bool,
    depth: usize,
}

fn coefficient_bits<const N: usize>(s: &TruncatedSeries<N>) -> u64 {
    s.terms()
        .map(|(_, c)| c.re().numer().bits() + c.re().denom().bits() + c.im().numer().bits() + c.im().denom().bits())
        .max()
        .unwrap_or(0)
}

impl<const N: usize> Parser<N> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Position {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Position) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::at(self.pos(), "expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<TruncatedSeries<N>, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.advance();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<TruncatedSeries<N>, ParseError> {
        let mut acc = self.unary()?;
        self.check_size(&acc)?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    let at = self.advance().1;
                    let rhs = self.unary()?;
                    let c = rhs.constant_term();
                    if rhs.terms().any(|(i, _)| i.degree() > 0) {
                        return Err(ParseError::at(at, "division by a non-constant expression"));
                    }
                    let inv = c.inv().ok_or_else(|| ParseError::at(at, "division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
            self.check_size(&acc)?;
        }
        Ok(acc)
    }

    fn check_size(&self, s: &TruncatedSeries<N>) -> Result<(), ParseError> {
        if coefficient_bits(s) > MAX_COEFFICIENT_BITS {
            Err(ParseError::at(self.pos(), "coefficient too large"))
        } else {
            Ok(())
        }
    }

    fn unary(&mut self) -> Result<TruncatedSeries<N>, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.advance();
                self.enter()?;
                let v = -self.unary()?;
                self.depth -= 1;
                Ok(v)
            }
            Tok::Plus => {
                self.advance();
                self.enter()?;
                let v = self.unary()?;
                self.depth -= 1;
                Ok(v)
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<TruncatedSeries<N>, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.advance();
        let (tok, at) = self.advance();
        let e = match tok {
            Tok::Literal(c) => c
                .as_integer()
                .and_then(|n| u32::try_from(n).ok())
                .filter(|&e| e <= MAX_EXPONENT)
                .ok_or_else(|| ParseError::at(at, format!("exponent must be an integer in 0..={MAX_EXPONENT}")))?,
            _ => return Err(ParseError::at(at, "expected a non-negative integer exponent")),
        };
        if base.in_maximal_ideal() && e > self.order {
            return Ok(TruncatedSeries::zero(self.order));
        }
        if coefficient_bits(&base).saturating_mul(e as u64) > MAX_COEFFICIENT_BITS {
            return Err(ParseError::at(at, "coefficient too large"));
        }
        Ok(base.pow(e))
    }

    fn atom(&mut self) -> Result<TruncatedSeries<N>, ParseError> {
        let (tok, at) = self.advance();
        match tok {
            Tok::Literal(c) => Ok(TruncatedSeries::constant(c, self.order)),
            Tok::Ident(name) => {
                if name == "i" {
                    return Ok(TruncatedSeries::constant(GaussianRational::i(), self.order));
                }
                match VARIABLE_NAMES[..N].iter().position(|v| *v == name) {
                    Some(_) if !self.allow_vars => Err(ParseError::at(at, format!("expected a constant, found variable {name}"))),
                    Some(var) => Ok(TruncatedSeries::var(var, self.order)),
                    None => Err(ParseError::at(at, format!("unknown identifier {name:?}"))),
                }
            }
            Tok::LParen => {
                let inner = self.expr()?;
                let (close, at) = self.advance();
                if close != Tok::RParen {
                    return Err(ParseError::at(at, "expected ')'"));
                }
                Ok(inner)
            }
            Tok::End => Err(ParseError::at(at, "unexpected end of input")),
            other => Err(ParseError::at(at, format!("unexpected token {}", describe(&other)))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Literal(c) => format!("literal {c}"),
        Tok::Ident(s) => format!("identifier {s:?}"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Slash => "'/'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::End => "end of input".into(),
    }
}

fn parse_with<const N: usize>(src: &str, order: u32, origin: Position, allow_vars: bool) -> Result<TruncatedSeries<N>, ParseError> {
    assert!(N <= VARIABLE_NAMES.len(), "text form supports at most three variables");
    let toks = Lexer::new(src, origin).tokenize()?;
    let mut p = Parser::<N> { toks, at: 0, order, allow_vars, depth: 0 };
    let value = p.expr()?;
    match p.peek() {
        Tok::End => Ok(value),
        other => Err(ParseError::at(p.pos(), format!("unexpected token {}", describe(other)))),
    }
}

/// Parses a series expression truncated at `order`.
pub fn parse_series<const N: usize>(src: &str, order: u32) -> Result<TruncatedSeries<N>, ParseError> {
    parse_with(src, order, Position::START, true)
}

/// Like [`parse_series`], reporting positions relative to `origin`.
pub fn parse_series_at<const N: usize>(src: &str, order: u32, origin: Position) -> Result<TruncatedSeries<N>, ParseError> {
    parse_with(src, order, origin, true)
}

/// Parses a constant expression such as `-3/4+1/2i` or `(1+i)/2`.
pub fn parse_constant(src: &str) -> Result<GaussianRational, ParseError> {
    parse_constant_at(src, Position::START)
}

pub fn parse_constant_at(src: &str, origin: Position) -> Result<GaussianRational, ParseError> {
    Ok(parse_with::<3>(src, 0, origin, false)?.constant_term())
}
