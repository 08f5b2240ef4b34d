//! Recursive-descent parser for the canonical infix expression syntax.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor (('*'|'/') factor)*
//! factor   := '-' factor | power
//! power    := atom ('^' exponent)?
//! atom     := INT | IDENT | ('exp'|'ln') '(' expr ')' | '(' expr ')'
//! exponent := INT | '-' INT | '(' '-'? INT ')'
//! ```
//!
//! Integer literals are arbitrary precision; rationals like `1/2` are plain
//! divisions that fold exactly. Exponents must be integer literals.

use super::{Expr, ExprError, Symbol};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn err(col: usize, reason: impl Into<String>) -> ExprError {
    ExprError::Parse {
        col,
        reason: reason.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let mut toks = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                toks.push((col, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((col, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((col, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((col, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((col, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((col, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((col, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                let n: BigInt = digits.parse().expect("digit run parses as integer");
                toks.push((col, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((col, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(err(col, format!("unexpected character `{other}`"))),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end_col: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(c, _)| *c)
            .unwrap_or(self.end_col)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        let col = self.col();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            _ => Err(err(col, format!("expected {what}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = acc + rhs;
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.parse_term()?;
                    acc = acc - rhs;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.parse_factor()?;
                    acc = acc * rhs;
                }
                Some(Tok::Slash) => {
                    let col = self.col();
                    self.bump();
                    let rhs = self.parse_factor()?;
                    acc = Expr::div(acc, rhs)
                        .map_err(|_| err(col, "division by zero"))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ExprError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.parse_factor()?;
            return Ok(-inner);
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Expr, ExprError> {
        let base = self.parse_atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            let col = self.col();
            self.bump();
            let n = self.parse_exponent()?;
            return Expr::power(base, n).map_err(|e| match e {
                ExprError::DivisionByZero => err(col, "zero raised to a negative power"),
                other => other,
            });
        }
        Ok(base)
    }

    fn parse_exponent(&mut self) -> Result<i32, ExprError> {
        let col = self.col();
        let (negate, parens) = match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let neg = matches!(self.peek(), Some(Tok::Minus));
                if neg {
                    self.bump();
                }
                (neg, true)
            }
            Some(Tok::Minus) => {
                self.bump();
                (true, false)
            }
            _ => (false, false),
        };
        let n = match self.bump() {
            Some(Tok::Int(n)) => n,
            _ => return Err(err(col, "exponent must be an integer literal")),
        };
        if parens {
            self.expect(Tok::RParen, "`)` after exponent")?;
        }
        let n: i32 = i32::try_from(&n).map_err(|_| ExprError::ExponentOverflow)?;
        Ok(if negate { -n } else { n })
    }

    fn parse_atom(&mut self) -> Result<Expr, ExprError> {
        let col = self.col();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(Expr::rational(BigRational::from_integer(n))),
            Some(Tok::Ident(name)) => {
                if (name == "exp" || name == "ln") && matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let arg = self.parse_expr()?;
                    self.expect(Tok::RParen, "`)` closing function argument")?;
                    Ok(if name == "exp" {
                        Expr::exp(arg)
                    } else {
                        Expr::ln(arg)
                    })
                } else {
                    let sym = Symbol::new(&name)
                        .map_err(|_| err(col, format!("invalid symbol `{name}`")))?;
                    Ok(Expr::symbol(&sym))
                }
            }
            Some(Tok::LParen) => {
                let inner = self.parse_expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(err(col, "expected a number, symbol, or `(`")),
        }
    }
}

pub(super) fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end_col: text.len() + 1,
    };
    if p.peek().is_none() {
        return Err(err(1, "empty expression"));
    }
    let e = p.parse_expr()?;
    if p.peek().is_some() {
        return Err(err(p.col(), "trailing input after expression"));
    }
    Ok(e)
}
