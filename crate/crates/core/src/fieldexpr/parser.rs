//! Pratt parser for the coefficient language.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?          exponent: constant integer
//! atom    := number | "pi" | "e" | coordinate
//!          | func "(" expr ")"          func in sin cos exp log sqrt abs
//!          | "diff" "(" expr ("," coordinate)+ ")"
//!          | "(" expr ")"
//! number  := digits ("." digits?)? (("e" | "E") ("+" | "-")? digits)?
//! ```
//!
//! Errors carry 0-based byte offsets into the source.

use super::ast::{Constant, Expr, Func, Node};
use super::chart::Chart;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let done = t.0 == Tok::End;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(c) = self.peek() else {
            return Ok((Tok::End, start));
        };
        let tok = match c {
            b'0'..=b'9' | b'.' => return self.number(),
            b'a'..=b'z' | b'A'..=b'Z' => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
                    self.pos += 1;
                }
                return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn number(&mut self) -> Result<(Tok, usize)> {
        let start = self.pos;
        let digits = |lx: &mut Self| {
            let s = lx.pos;
            while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                lx.pos += 1;
            }
            lx.pos - s
        };
        let mut n = digits(self);
        if self.peek() == Some(b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            return Err(Error::Syntax { offset: start, message: "malformed number".into() });
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let b = self.src.as_bytes();
            let mut k = self.pos + 1;
            if matches!(b.get(k), Some(b'+' | b'-')) {
                k += 1;
            }
            // "2e" without digits is left for the caller: `e` is a constant.
            if b.get(k).is_some_and(|c| c.is_ascii_digit()) {
                self.pos = k;
                digits(self);
            }
        }
        let text = &self.src[start..self.pos];
        let v: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !v.is_finite() {
            return Err(Error::Syntax { offset: start, message: "number out of range".into() });
        }
        Ok((Tok::Num(v), start))
    }
}

struct Parser<'c> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    chart: &'c Chart,
}

const UNARY_BP: u8 = 5;

fn infix_bp(op: char) -> Option<(u8, u8)> {
    Some(match op {
        '+' | '-' => (1, 2),
        '*' | '/' => (3, 4),
        '^' => (7, 6),
        _ => return None,
    })
}

impl<'c> Parser<'c> {
    fn at(&self) -> &(Tok, usize) {
        &self.toks[self.i.min(self.toks.len() - 1)]
    }

    fn peek(&self) -> &Tok {
        &self.at().0
    }

    fn offset(&self) -> usize {
        self.at().1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.at().clone();
        self.i += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let found = match self.peek() {
            Tok::End => "end of input".to_string(),
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        };
        Error::Syntax { offset: self.offset(), message: format!("expected {wanted}, found {found}") }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek() {
                Tok::Op(c) => *c,
                _ => break,
            };
            let Some((l, r)) = infix_bp(op) else { break };
            if l <= min_bp {
                break;
            }
            self.bump();
            if op == '^' {
                let at = self.offset();
                let rhs = self.expr(r)?;
                let n = const_integer(&rhs).ok_or_else(|| Error::Syntax {
                    offset: at,
                    message: "exponent must be a constant integer".into(),
                })?;
                lhs = Expr::raw(Node::Pow(lhs, n));
                continue;
            }
            let rhs = self.expr(r)?;
            lhs = Expr::raw(match op {
                '+' => Node::Add(lhs, rhs),
                '-' => Node::Sub(lhs, rhs),
                '*' => Node::Mul(lhs, rhs),
                _ => Node::Div(lhs, rhs),
            });
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::num(v)),
            Tok::Op('-') => Ok(Expr::raw(Node::Neg(self.expr(UNARY_BP)?))),
            Tok::LParen => {
                let e = self.expr(0)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, at),
            _ => {
                self.i -= 1;
                Err(self.unexpected("an operand"))
            }
        }
    }

    fn ident(&mut self, name: String, at: usize) -> Result<Expr> {
        if *self.peek() == Tok::LParen {
            if name == "diff" {
                return self.diff_call(at);
            }
            let Some(f) = Func::from_name(&name) else {
                return Err(Error::UnknownIdentifier { name, offset: at });
            };
            self.bump();
            let args = self.args()?;
            if args.len() != 1 {
                return Err(Error::Arity { name, expected: "1".into(), got: args.len(), offset: at });
            }
            return Ok(Expr::raw(Node::Call(f, args.into_iter().next().unwrap())));
        }
        match name.as_str() {
            "pi" => Ok(Expr::raw(Node::Const(Constant::Pi))),
            "e" => Ok(Expr::raw(Node::Const(Constant::E))),
            _ => match self.chart.index_of(&name) {
                Some(i) => Ok(Expr::var(i)),
                None if Func::from_name(&name).is_some() || name == "diff" => {
                    Err(Error::Syntax { offset: self.offset(), message: format!("expected `(` after `{name}`") })
                }
                None => Err(Error::UnknownIdentifier { name, offset: at }),
            },
        }
    }

    fn args(&mut self) -> Result<Vec<Expr>> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(self.expr(0)?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(out);
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }

    fn diff_call(&mut self, at: usize) -> Result<Expr> {
        self.bump();
        if *self.peek() == Tok::RParen {
            return Err(Error::Arity { name: "diff".into(), expected: "at least 2".into(), got: 0, offset: at });
        }
        let body = self.expr(0)?;
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                    let (t, p) = self.bump();
                    match t {
                        Tok::Ident(n) => match self.chart.index_of(&n) {
                            Some(i) => vars.push(i),
                            None => return Err(Error::UnknownIdentifier { name: n, offset: p }),
                        },
                        _ => {
                            self.i -= 1;
                            return Err(self.unexpected("a coordinate name"));
                        }
                    }
                }
                Tok::RParen => {
                    self.bump();
                    break;
                }
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
        if vars.is_empty() {
            return Err(Error::Arity { name: "diff".into(), expected: "at least 2".into(), got: 1, offset: at });
        }
        vars.sort_unstable();
        Ok(Expr::raw(Node::Diff(vars, body)))
    }
}

// Exponents are folded at parse time; only coordinate-free integer values pass.
fn const_integer(e: &Expr) -> Option<i32> {
    fn val(e: &Expr) -> Option<f64> {
        Some(match e.node() {
            Node::Num(v) => *v,
            Node::Const(c) => c.value(),
            Node::Neg(a) => -val(a)?,
            Node::Add(a, b) => val(a)? + val(b)?,
            Node::Sub(a, b) => val(a)? - val(b)?,
            Node::Mul(a, b) => val(a)? * val(b)?,
            Node::Div(a, b) => val(a)? / val(b)?,
            Node::Pow(a, n) => val(a)?.powi(*n),
            _ => return None,
        })
    }
    let v = val(e)?;
    if v.is_finite() && v.fract() == 0.0 && v.abs() <= i32::MAX as f64 {
        Some(v as i32)
    } else {
        None
    }
}

pub(crate) fn parse(src: &str, chart: &Chart) -> Result<Expr> {
    let toks = Lexer::tokens(src)?;
    if toks[0].0 == Tok::End {
        return Err(Error::Syntax { offset: 0, message: "empty expression".into() });
    }
    let mut p = Parser { toks, i: 0, chart };
    let e = p.expr(0)?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> std::sync::Arc<Chart> {
        Chart::new(&["x1", "x2", "xi1", "xi2"]).unwrap()
    }

    fn p(s: &str) -> Expr {
        parse(s, &chart()).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        let x1 = Expr::var(0);
        let x2 = Expr::var(1);
        let xi1 = Expr::var(2);
        let xi2 = Expr::var(3);
        assert_eq!(
            p("xi1*xi2 - x1*x2"),
            Expr::raw(Node::Sub(
                Expr::raw(Node::Mul(xi1, xi2)),
                Expr::raw(Node::Mul(x1.clone(), x2.clone()))
            ))
        );
        assert_eq!(p("-x1^2"), Expr::raw(Node::Neg(Expr::raw(Node::Pow(x1.clone(), 2)))));
        assert_eq!(
            p("x1 - x2 - x1"),
            Expr::raw(Node::Sub(Expr::raw(Node::Sub(x1.clone(), x2.clone())), x1.clone()))
        );
        // 2^3^2 = 2^9
        assert_eq!(p("2^3^2"), Expr::raw(Node::Pow(Expr::num(2.0), 9)));
        assert_eq!(p("x1^(-2)"), Expr::raw(Node::Pow(x1, -2)));
    }

    #[test]
    fn errors_carry_offsets() {
        let c = chart();
        let e = parse("x1 + y", &c).unwrap_err();
        assert_eq!(e, Error::UnknownIdentifier { name: "y".into(), offset: 5 });
        let e = parse("sin(x1, x2)", &c).unwrap_err();
        assert!(matches!(e, Error::Arity { offset: 0, got: 2, .. }));
        let e = parse("x1 +", &c).unwrap_err();
        assert_eq!(e.offset(), Some(4));
        let e = parse("x1^x2", &c).unwrap_err();
        assert_eq!(e.offset(), Some(3));
        let e = parse("x1 $ 2", &c).unwrap_err();
        assert_eq!(e.offset(), Some(3));
        assert!(parse("   ", &c).is_err());
        assert!(parse("(x1", &c).is_err());
        assert!(parse("x1 x2", &c).is_err());
    }

    #[test]
    fn numbers_and_constants() {
        assert_eq!(p("1.5e2").as_num(), Some(150.0));
        assert_eq!(p("2*e"), Expr::raw(Node::Mul(Expr::num(2.0), Expr::raw(Node::Const(Constant::E)))));
        assert!(parse("2e", &chart()).is_err());
        assert_eq!(p("diff(x1*x2, x2, x1)"), Expr::raw(Node::Diff(vec![0, 1], p("x1*x2"))));
    }
}
