//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := base ("^" number)?
//! base   := number | ident | ident "(" expr ")" | "(" expr ")" | "-" base
//! ```
//!
//! Precedence is `^` > unary minus > `*` `/` > `+` `-`, so `-x^2`
//! parses as `-(x^2)`. Exponents are constant literals, optionally
//! signed (`(1+x^2)^-2`).

use super::{BinOp, ExprNode, UnaryFn};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown function or identifier `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
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

    /// Next token plus its starting byte offset; `None` at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[start];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                let mut end = start;
                while end < self.src.len()
                    && (self.src[end].is_ascii_digit() || self.src[end] == b'.')
                {
                    end += 1;
                }
                // exponent part like 1e-3 / 2.5E+4
                if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                    let mut probe = end + 1;
                    if probe < self.src.len() && (self.src[probe] == b'+' || self.src[probe] == b'-')
                    {
                        probe += 1;
                    }
                    if probe < self.src.len() && self.src[probe].is_ascii_digit() {
                        end = probe;
                        while end < self.src.len() && self.src[end].is_ascii_digit() {
                            end += 1;
                        }
                    }
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "a numeric literal".into(),
                })?;
                self.pos = end;
                return Ok(Some((Tok::Num(v), start)));
            }
            _ if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = start;
                while end < self.src.len()
                    && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.src[start..end]).unwrap();
                self.pos = end;
                return Ok(Some((Tok::Ident(text.to_owned()), start)));
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    expected: "a number, identifier, operator, or parenthesis".into(),
                })
            }
        };
        self.pos = start + 1;
        Ok(Some((tok, start)))
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    var: &'a str,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn err_here(&self, expected: &str) -> ParseError {
        let offset = self.peek().map(|(_, o)| *o).unwrap_or(self.len);
        ParseError::Syntax {
            offset,
            expected: expected.into(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some((t, _)) if *t == tok => {
                self.bump();
                Ok(())
            }
            _ => Err(self.err_here(expected)),
        }
    }

    fn expr(&mut self) -> Result<ExprNode, ParseError> {
        let mut node = self.term()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            node = ExprNode::binary(op, node, rhs);
        }
        Ok(node)
    }

    fn term(&mut self) -> Result<ExprNode, ParseError> {
        let mut node = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            let op = match tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            node = ExprNode::binary(op, node, rhs);
        }
        Ok(node)
    }

    fn factor(&mut self) -> Result<ExprNode, ParseError> {
        if let Some((Tok::Minus, _)) = self.peek() {
            // unary minus; binds looser than ^ so recurse into factor
            self.bump();
            let inner = self.factor()?;
            return Ok(ExprNode::unary(UnaryFn::Neg, inner));
        }
        let base = self.base()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            self.bump();
            let exponent = self.exponent()?;
            return Ok(ExprNode::pow(base, exponent));
        }
        Ok(base)
    }

    /// A constant literal, optionally signed: the only thing allowed
    /// after `^`.
    fn exponent(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        if let Some((Tok::Minus, _)) = self.peek() {
            self.bump();
            sign = -1.0;
        } else if let Some((Tok::Plus, _)) = self.peek() {
            self.bump();
        }
        match self.peek() {
            Some((Tok::Num(v), _)) => {
                let v = *v;
                self.bump();
                Ok(sign * v)
            }
            _ => Err(self.err_here("a constant exponent after `^`")),
        }
    }

    fn base(&mut self) -> Result<ExprNode, ParseError> {
        if self.peek().is_none() {
            return Err(self.err_here("a number, identifier, or `(`"));
        }
        match self.bump() {
            Some((Tok::Num(v), _)) => Ok(ExprNode::Const(v)),
            Some((Tok::LParen, _)) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "a closing `)`")?;
                Ok(inner)
            }
            Some((Tok::Minus, _)) => {
                let inner = self.base()?;
                Ok(ExprNode::unary(UnaryFn::Neg, inner))
            }
            Some((Tok::Ident(name), offset)) => {
                if let Some((Tok::LParen, _)) = self.peek() {
                    let f = UnaryFn::from_name(&name)
                        .ok_or(ParseError::UnknownFunction { name, offset })?;
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "a closing `)`")?;
                    Ok(ExprNode::unary(f, arg))
                } else if name == self.var {
                    Ok(ExprNode::Var)
                } else if name == "pi" {
                    Ok(ExprNode::Const(std::f64::consts::PI))
                } else if name == "e" {
                    Ok(ExprNode::Const(std::f64::consts::E))
                } else {
                    Err(ParseError::UnknownFunction { name, offset })
                }
            }
            _ => {
                self.idx = self.idx.saturating_sub(1);
                Err(self.err_here("a number, identifier, or `(`"))
            }
        }
    }
}

pub(super) fn parse(text: &str, var: &str) -> Result<ExprNode, ParseError> {
    let mut lexer = Lexer::new(text);
    let mut toks = Vec::new();
    while let Some(t) = lexer.next()? {
        toks.push(t);
    }
    if toks.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            expected: "a nonempty expression".into(),
        });
    }
    let mut parser = Parser {
        toks,
        idx: 0,
        var,
        len: text.len(),
    };
    let node = parser.expr()?;
    if parser.idx != parser.toks.len() {
        return Err(parser.err_here("end of input"));
    }
    Ok(node)
}
