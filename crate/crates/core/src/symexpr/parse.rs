//! Recursive-descent parser for the coordinate expression grammar:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' unary)?          (exponent must be constant)
//! primary := number | coord | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt
//! ```

use std::fmt;

use thiserror::Error;

use super::{Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownIdentifier(String),
    NonConstantExponent,
    InvalidNumber(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => f.write_str("empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token '{t}'"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier '{id}'"),
            ParseErrorKind::NonConstantExponent => f.write_str("exponent of '^' must be constant"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the source string.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(v) => write!(f, "{v}"),
            Token::Ident(s) => f.write_str(s),
            Token::Op(c) => write!(f, "{c}"),
            Token::LParen => f.write_str("("),
            Token::RParen => f.write_str(")"),
            Token::End => f.write_str("<end>"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // optional exponent: e[+-]digits
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::InvalidNumber(text.to_string()),
            })?;
            tokens.push((Token::Number(value), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            tokens.push((Token::Ident(src[start..i].to_string()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Token::Op(c),
            '(' => Token::LParen,
            ')' => Token::RParen,
            _ => {
                // report the full (possibly multi-byte) character
                let ch = src[start..].chars().next().unwrap_or(c);
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::UnexpectedChar(ch),
                });
            }
        };
        tokens.push((tok, start));
        i += 1;
    }
    tokens.push((Token::End, src.len()));
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    coords: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.offset(),
            kind,
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Token::End => self.error(ParseErrorKind::UnexpectedEnd),
            t => self.error(ParseErrorKind::UnexpectedToken(t.to_string())),
        }
    }

    fn expect(&mut self, tok: Token) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Token::Op('+') => {
                    self.advance();
                    lhs = lhs.add(&self.term()?);
                }
                Token::Op('-') => {
                    self.advance();
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Token::Op('*') => {
                    self.advance();
                    lhs = lhs.mul(&self.unary()?);
                }
                Token::Op('/') => {
                    self.advance();
                    lhs = lhs.div(&self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Token::Op('-') => {
                self.advance();
                Ok(self.unary()?.neg())
            }
            Token::Op('+') => {
                self.advance();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if *self.peek() != Token::Op('^') {
            return Ok(base);
        }
        self.advance();
        let exponent_at = self.offset();
        let exponent = self.unary()?;
        if exponent.max_coord().is_some() {
            return Err(ParseError {
                position: exponent_at,
                kind: ParseErrorKind::NonConstantExponent,
            });
        }
        let value = exponent.eval(&[]).map_err(|_| ParseError {
            position: exponent_at,
            kind: ParseErrorKind::NonConstantExponent,
        })?;
        Ok(base.pow(value))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.peek().clone() {
            Token::Number(v) => {
                self.advance();
                Ok(Expr::constant(v))
            }
            Token::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.advance();
                if let Some(op) = UnaryOp::from_function_name(&name) {
                    if *self.peek() != Token::LParen {
                        return Err(self.unexpected());
                    }
                    self.advance();
                    let arg = self.expr()?;
                    self.expect(Token::RParen)?;
                    return Ok(Expr::unary(op, arg));
                }
                match self.coords.iter().position(|c| *c == name) {
                    Some(i) => Ok(Expr::coord(i)),
                    None => Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnknownIdentifier(name),
                    }),
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses `src` into an expression over the given coordinate names.
pub fn parse_expr(src: &str, coords: &[String]) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0, coords };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.unexpected());
    }
    Ok(e)
}
