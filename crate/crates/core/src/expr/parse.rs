//! Recursive-descent parser for the infix expression language.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' integer)?
//! atom   := integer | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Whitespace is insignificant and implicit multiplication is rejected.
//! Exponents are non-negative integer literals; write `1/x^2` for `x^-2`.

use num_bigint::BigInt;
use thiserror::Error;

use super::{Expr, FuncKind, Rational, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("exponent must be a non-negative integer literal")]
    NonIntegerExponent,
    #[error("exponent out of range")]
    ExponentTooLarge,
    #[error("decimal literals are not supported, write a fraction such as 5/2")]
    DecimalLiteral,
}

/// Parses user input. Only `x` and `y` are accepted as variables.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, false).parse_all()
}

/// Parses text that may also mention the internal variables `u` and `v`.
pub fn parse_internal(text: &str) -> Result<Expr, ParseError> {
    Parser::new(text, true).parse_all()
}

const MAX_EXPONENT: i64 = 1 << 20;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    internal_vars: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, internal_vars: bool) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
            internal_vars,
        }
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { kind, offset: self.pos }
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

    fn unexpected(&mut self) -> ParseError {
        match self.peek() {
            None => self.err(ParseErrorKind::UnexpectedEnd),
            Some(_) => {
                let c = std::str::from_utf8(&self.src[self.pos..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                self.err(ParseErrorKind::UnexpectedChar(c))
            }
        }
    }

    fn parse_all(mut self) -> Result<Expr, ParseError> {
        let e = self.expr()?;
        if self.peek().is_some() {
            return Err(self.unexpected());
        }
        Ok(e)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    terms.push(self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    terms.push(Expr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        // whether `acc` is a product built by this loop and may absorb more factors
        let mut open = false;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    match (&mut acc, open) {
                        (Expr::Mul(xs), true) => xs.push(rhs),
                        _ => {
                            acc = Expr::Mul(vec![acc, rhs]);
                            open = true;
                        }
                    }
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = Expr::Div(Box::new(acc), Box::new(rhs));
                    open = false;
                }
                Some(c) if c.is_ascii_alphanumeric() || c == b'(' => {
                    return Err(self.err(ParseErrorKind::Expected(
                        "an operator (implicit multiplication is not supported)",
                    )));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos
            || self
                .src
                .get(self.pos)
                .is_some_and(|c| *c == b'.' || c.is_ascii_alphabetic())
        {
            self.pos = start;
            return Err(self.err(ParseErrorKind::NonIntegerExponent));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let n: i64 = match digits.parse() {
            Ok(n) if n <= MAX_EXPONENT => n,
            _ => {
                self.pos = start;
                return Err(self.err(ParseErrorKind::ExponentTooLarge));
            }
        };
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.err(ParseErrorKind::UnexpectedEnd)),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err(ParseErrorKind::Expected("')'")));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos = start;
                    return Err(self.err(ParseErrorKind::DecimalLiteral));
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let n: BigInt = digits.parse().unwrap();
                Ok(Expr::Const(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(kind) = FuncKind::from_name(name) {
                    if self.peek() != Some(b'(') {
                        return Err(self.err(ParseErrorKind::Expected("'(' after function name")));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err(self.err(ParseErrorKind::Expected("')'")));
                    }
                    self.pos += 1;
                    return Ok(Expr::Func(kind, Box::new(arg)));
                }
                match Var::from_name(name) {
                    Some(v @ (Var::X | Var::Y)) => Ok(Expr::Var(v)),
                    Some(v) if self.internal_vars => Ok(Expr::Var(v)),
                    _ => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                        offset: start,
                    }),
                }
            }
            Some(_) => Err(self.unexpected()),
        }
    }
}
