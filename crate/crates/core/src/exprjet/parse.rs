//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" unary)?
//! primary := number | "pi" | func "(" expr ")" | ident | "(" expr ")"
//! func    := "exp" | "ln" | "sin" | "cos" | "tan" | "sinh" | "cosh" | "tanh" | "sqrt"
//! number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits] | "." digits [...]
//! ident   := (letter | "_") (letter | digit | "_")*
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^3^2` is `2^(3^2)`. Negation of a bare literal folds
//! into the literal. There is no implicit multiplication.

use super::expr::{BinOp, Constant, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
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
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(usize, Tok)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            lx.skip_ws();
            let start = lx.pos;
            let tok = lx.next_tok()?;
            let end = tok == Tok::End;
            out.push((start, tok));
            if end {
                return Ok(out);
            }
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn next_tok(&mut self) -> Result<Tok> {
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return Ok(Tok::End);
        };
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok(t);
        }
        if c.is_ascii_digit() || c == '.' {
            return self.number();
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let len = rest
                .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                .unwrap_or(rest.len());
            self.pos += len;
            return Ok(Tok::Ident(rest[..len].to_string()));
        }
        Err(Error::Syntax {
            offset: self.pos,
            expected: vec!["expression".into()],
            found: format!("character `{c}`"),
        })
    }

    fn number(&mut self) -> Result<Tok> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut mantissa = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            mantissa += digits(&mut i);
        }
        if mantissa == 0 {
            return Err(Error::Syntax {
                offset: start,
                expected: vec!["digit".into()],
                found: "`.`".into(),
            });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) == 0 {
                return Err(Error::Syntax {
                    offset: j,
                    expected: vec!["exponent digits".into()],
                    found: describe_at(self.src, j),
                });
            }
            i = j;
        }
        let text = &self.src[start..i];
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            expected: vec!["number".into()],
            found: format!("`{text}`"),
        })?;
        if !value.is_finite() {
            return Err(Error::Syntax {
                offset: start,
                expected: vec!["finite number".into()],
                found: format!("`{text}`"),
            });
        }
        self.pos = i;
        Ok(Tok::Num(value))
    }
}

fn describe_at(src: &str, offset: usize) -> String {
    match src[offset..].chars().next() {
        Some(c) => format!("character `{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

const OPERAND: &[&str] = &["number", "identifier", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn offset(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Lit(v) => Expr::Lit(-v),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Lit(v))
            }
            Tok::Ident(name) => {
                let name_offset = self.offset();
                self.bump();
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.fail(&["`(`"]);
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if *self.peek() != Tok::RParen {
                        return self.fail(&["`)`", "operator"]);
                    }
                    self.bump();
                    return Ok(Expr::call(func, arg));
                }
                if *self.peek() == Tok::LParen {
                    let expected: Vec<String> = Func::ALL
                        .iter()
                        .map(|f| format!("`{}`", f.name()))
                        .collect();
                    return Err(Error::Syntax {
                        offset: name_offset,
                        expected,
                        found: format!("unknown function `{name}`"),
                    });
                }
                if name == "pi" {
                    return Ok(Expr::Const(Constant::Pi));
                }
                Ok(Expr::Coord(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.fail(&["`)`", "operator"]);
                }
                self.bump();
                Ok(inner)
            }
            _ => self.fail(OPERAND),
        }
    }
}

/// Parses expression text into an [`Expr`].
pub fn parse(source: &str) -> Result<Expr> {
    let toks = Lexer::tokens(source)?;
    let mut p = Parser { toks, at: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}
