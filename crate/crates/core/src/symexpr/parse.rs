//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' factor)?
//! base   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | ln | sqrt
//! ```
//!
//! A minus sign directly in front of a bare numeric literal produces a
//! negative constant, so printed negative constants read back unchanged.

use std::fmt;

use thiserror::Error;

use super::expr::{BinaryOp, Expr, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownIdentifier(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`"),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the source text.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
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

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Number(v) => format!("{v}"),
            Token::Ident(s) => s.clone(),
            Token::Plus => "+".into(),
            Token::Minus => "-".into(),
            Token::Star => "*".into(),
            Token::Slash => "/".into(),
            Token::Caret => "^".into(),
            Token::LParen => "(".into(),
            Token::RParen => ")".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => tokens.push((Token::Plus, start)),
            b'-' => tokens.push((Token::Minus, start)),
            b'*' => tokens.push((Token::Star, start)),
            b'/' => tokens.push((Token::Slash, start)),
            b'^' => tokens.push((Token::Caret, start)),
            b'(' => tokens.push((Token::LParen, start)),
            b')' => tokens.push((Token::RParen, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let literal = &text[start..i];
                let value: f64 = literal.parse().map_err(|_| ParseError {
                    kind: ParseErrorKind::InvalidNumber(literal.to_string()),
                    offset: start,
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        kind: ParseErrorKind::InvalidNumber(literal.to_string()),
                        offset: start,
                    });
                }
                tokens.push((Token::Number(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                tokens.push((Token::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(ch),
                    offset: start,
                });
            }
        }
        i += 1;
    }
    tokens.push((Token::End, text.len()));
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Token {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx].0
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn unexpected(&self) -> ParseError {
        let kind = match self.peek() {
            Token::End => ParseErrorKind::UnexpectedEnd,
            t => ParseErrorKind::UnexpectedToken(t.describe()),
        };
        ParseError {
            kind,
            offset: self.offset(),
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
            let op = match self.peek() {
                Token::Plus => BinaryOp::Add,
                Token::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinaryOp::Mul,
                Token::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Token::Minus {
            self.advance();
            if let Token::Number(v) = *self.peek() {
                if *self.peek_at(1) != Token::Caret {
                    self.advance();
                    return Ok(Expr::constant(-v));
                }
            }
            let inner = self.factor()?;
            return Ok(Expr::unary(UnaryOp::Neg, inner));
        }
        let base = self.base()?;
        if *self.peek() == Token::Caret {
            self.advance();
            let exponent = self.factor()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
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
                if *self.peek() == Token::LParen {
                    if let Some(op) = UnaryOp::from_function_name(&name) {
                        self.advance();
                        let arg = self.expr()?;
                        self.expect(Token::RParen)?;
                        return Ok(Expr::unary(op, arg));
                    }
                }
                if self.vars.contains(&name) {
                    Ok(Expr::var(&name))
                } else {
                    Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name),
                        offset,
                    })
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses `text` with the given variable names in scope.
pub fn parse_expr(text: &str, vars: &[String]) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        vars,
    };
    let e = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.unexpected());
    }
    Ok(e)
}
