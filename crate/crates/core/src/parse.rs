//! Recursive-descent parser for the polynomial expression grammar.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | var | var '^' posint | '(' expr ')' | '-' factor
//! rational := int ('/' posint)?
//! var      := 'x' posint
//! ```
//!
//! Whitespace is insignificant. `/` is only valid inside a rational
//! literal; division by expressions is rejected. A symbol table can
//! add named variables and rational-valued parameters on top of the
//! canonical `x1..xn` names.

use crate::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

fn err<T>(pos: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        pos,
        msg: msg.into(),
    })
}

/// Name resolution for parsing: variable names and rational parameters.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    pub nvars: usize,
    /// Declared variable names, name -> 0-based index. The canonical
    /// names `x1..xn` are always accepted in addition.
    pub vars: BTreeMap<String, usize>,
    /// Named rational parameters, substituted at parse time.
    pub params: BTreeMap<String, Rat>,
}

impl SymbolTable {
    pub fn canonical(nvars: usize) -> Self {
        SymbolTable {
            nvars,
            vars: BTreeMap::new(),
            params: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Semicolon,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((start, Tok::Eof));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b';' => Tok::Semicolon,
            b',' => Tok::Comma,
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                return Ok((start, Tok::Int(text.parse().unwrap())));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = self.pos;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                self.pos = end;
                return Ok((start, Tok::Ident(text.to_string())));
            }
            other => return err(start, format!("unexpected character '{}'", other as char)),
        };
        self.pos += 1;
        Ok((start, tok))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    look: (usize, Tok),
    symbols: &'a SymbolTable,
}

enum Factor {
    Const(Rat),
    Var(usize),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, symbols: &'a SymbolTable) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let look = lexer.next()?;
        Ok(Parser {
            lexer,
            look,
            symbols,
        })
    }

    fn advance(&mut self) -> Result<(usize, Tok), ParseError> {
        let cur = std::mem::replace(&mut self.look, (0, Tok::Eof));
        self.look = self.lexer.next()?;
        Ok(cur)
    }

    fn peek(&self) -> &Tok {
        &self.look.1
    }

    fn pos(&self) -> usize {
        self.look.0
    }

    fn expect_posint(&mut self, what: &str) -> Result<BigInt, ParseError> {
        let pos = self.pos();
        match self.advance()?.1 {
            Tok::Int(n) if n >= BigInt::one() => Ok(n),
            _ => err(pos, format!("expected positive integer {what}")),
        }
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance()?;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.advance()?;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance()?;
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    return err(self.pos(), "division by expressions is not allowed");
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        let nvars = self.symbols.nvars;
        let pos = self.pos();
        match self.advance()?.1 {
            Tok::Minus => Ok(self.factor()?.neg()),
            Tok::LParen => {
                let inner = self.expr()?;
                let pos = self.pos();
                match self.advance()?.1 {
                    Tok::RParen => Ok(inner),
                    _ => err(pos, "expected ')'"),
                }
            }
            Tok::Int(n) => {
                if matches!(self.peek(), Tok::Slash) {
                    self.advance()?;
                    let d = self.expect_posint("denominator")?;
                    Ok(Poly::constant(nvars, Rat::new(n, d)))
                } else {
                    Ok(Poly::constant(nvars, Rat::from_integer(n)))
                }
            }
            Tok::Ident(name) => {
                let base = match self.resolve(&name, pos)? {
                    Factor::Const(c) => return Ok(Poly::constant(nvars, c)),
                    Factor::Var(i) => Poly::var(nvars, i),
                };
                if matches!(self.peek(), Tok::Caret) {
                    self.advance()?;
                    let e = self.expect_posint("exponent")?;
                    let e: u32 = e.try_into().map_err(|_| ParseError {
                        pos,
                        msg: "exponent too large".into(),
                    })?;
                    Ok(base.pow(e))
                } else {
                    Ok(base)
                }
            }
            _ => err(pos, "expected a factor"),
        }
    }

    fn resolve(&self, name: &str, pos: usize) -> Result<Factor, ParseError> {
        if let Some(&i) = self.symbols.vars.get(name) {
            return Ok(Factor::Var(i));
        }
        if let Some(c) = self.symbols.params.get(name) {
            return Ok(Factor::Const(c.clone()));
        }
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty()
                && rest.bytes().all(|b| b.is_ascii_digit())
                && !rest.starts_with('0')
            {
                let i: usize = rest.parse().map_err(|_| ParseError {
                    pos,
                    msg: "variable index too large".into(),
                })?;
                if i >= 1 && i <= self.symbols.nvars {
                    return Ok(Factor::Var(i - 1));
                }
                return err(
                    pos,
                    format!(
                        "variable x{i} out of range (have {} variables)",
                        self.symbols.nvars
                    ),
                );
            }
        }
        err(pos, format!("unknown identifier '{name}'"))
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => err(self.pos(), "unexpected trailing input"),
        }
    }
}

/// Parse a polynomial over the canonical variables `x1..xn`.
pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly, ParseError> {
    parse_poly_with(src, &SymbolTable::canonical(nvars))
}

/// Parse with explicit variable names and parameter substitutions.
pub fn parse_poly_with(src: &str, symbols: &SymbolTable) -> Result<Poly, ParseError> {
    let mut parser = Parser::new(src, symbols)?;
    let p = parser.expr()?;
    parser.expect_eof()?;
    Ok(p)
}

/// Parse an extension-algebra element in the syntax `f ; a1, ..., ak`.
/// For fiber rank 0 the `;` and coordinate list may be omitted.
pub fn parse_element(
    src: &str,
    symbols: &SymbolTable,
    fiber_rank: usize,
) -> Result<(Poly, Vec<Poly>), ParseError> {
    let mut parser = Parser::new(src, symbols)?;
    let f = parser.expr()?;
    let mut coords = Vec::with_capacity(fiber_rank);
    match parser.peek() {
        Tok::Eof if fiber_rank == 0 => return Ok((f, coords)),
        Tok::Semicolon => {
            parser.advance()?;
        }
        _ => return err(parser.pos(), "expected ';' before fiber coordinates"),
    }
    for a in 0..fiber_rank {
        coords.push(parser.expr()?);
        if a + 1 < fiber_rank {
            let pos = parser.pos();
            match parser.advance()?.1 {
                Tok::Comma => {}
                _ => return err(pos, "expected ',' between fiber coordinates"),
            }
        }
    }
    parser.expect_eof()?;
    Ok((f, coords))
}
