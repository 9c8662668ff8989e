//! Tiny arithmetic expression evaluator for user-defined diagonal symbols.
//!
//! Grammar: `+ - * / ^` with usual precedence (`^` right-associative),
//! parentheses, unary minus, numeric literals, variables, and the
//! functions `sin cos tan exp ln sqrt abs min max`. Variables available
//! during evaluation: `l` (spin, or the signed/absolute frequency on the
//! torus), `j` (diagonal index), `nu` (Laplace eigenvalue) and `eig`
//! (the weight `<xi>`).

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    L,
    J,
    Nu,
    Eig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
    Min,
    Max,
}

/// Variable bindings for one diagonal entry.
#[derive(Clone, Copy, Debug)]
pub struct Bindings {
    pub l: f64,
    pub j: f64,
    pub nu: f64,
    pub eig: f64,
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, text };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::InvalidSpec(format!(
                "trailing input in expression {text:?} at token {}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, b: &Bindings) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Var(Var::L) => b.l,
            Expr::Var(Var::J) => b.j,
            Expr::Var(Var::Nu) => b.nu,
            Expr::Var(Var::Eig) => b.eig,
            Expr::Unary(UnaryOp::Neg, e) => -e.eval(b),
            Expr::Binary(op, x, y) => {
                let (x, y) = (x.eval(b), y.eval(b));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => x.powf(y),
                }
            }
            Expr::Call(f, args) => {
                let a: Vec<f64> = args.iter().map(|e| e.eval(b)).collect();
                match f {
                    Func::Sin => a[0].sin(),
                    Func::Cos => a[0].cos(),
                    Func::Tan => a[0].tan(),
                    Func::Exp => a[0].exp(),
                    Func::Ln => a[0].ln(),
                    Func::Sqrt => a[0].sqrt(),
                    Func::Abs => a[0].abs(),
                    Func::Min => a[0].min(a[1]),
                    Func::Max => a[0].max(a[1]),
                }
            }
        }
    }
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
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidSpec(format!("bad number {s:?}: {e}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            other => {
                return Err(Error::InvalidSpec(format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    text: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "expected {t:?} in expression {:?} at token {}",
                self.text, self.pos
            )))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = match self.peek() {
            Some(Tok::Plus) => Some(BinOp::Add),
            Some(Tok::Minus) => Some(BinOp::Sub),
            _ => None,
        } {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some(op) = match self.peek() {
            Some(Tok::Star) => Some(BinOp::Mul),
            Some(Tok::Slash) => Some(BinOp::Div),
            _ => None,
        } {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        // unary minus binds looser than '^', so -2^2 = -(2^2)
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let e = self.factor()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(e)));
        }
        let base = self.primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let exp = self.factor()?; // right-associative
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if self.peek() == Some(&Tok::LParen) {
                    self.pos += 1;
                    let mut args = vec![self.expr()?];
                    while self.peek() == Some(&Tok::Comma) {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    let (func, arity) = match name.as_str() {
                        "sin" => (Func::Sin, 1),
                        "cos" => (Func::Cos, 1),
                        "tan" => (Func::Tan, 1),
                        "exp" => (Func::Exp, 1),
                        "ln" => (Func::Ln, 1),
                        "sqrt" => (Func::Sqrt, 1),
                        "abs" => (Func::Abs, 1),
                        "min" => (Func::Min, 2),
                        "max" => (Func::Max, 2),
                        other => {
                            return Err(Error::InvalidSpec(format!("unknown function {other:?}")))
                        }
                    };
                    if args.len() != arity {
                        return Err(Error::InvalidSpec(format!(
                            "{name} takes {arity} argument(s), got {}",
                            args.len()
                        )));
                    }
                    Ok(Expr::Call(func, args))
                } else {
                    match name.as_str() {
                        "l" => Ok(Expr::Var(Var::L)),
                        "j" => Ok(Expr::Var(Var::J)),
                        "nu" => Ok(Expr::Var(Var::Nu)),
                        "eig" => Ok(Expr::Var(Var::Eig)),
                        "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                        other => Err(Error::InvalidSpec(format!("unknown variable {other:?}"))),
                    }
                }
            }
            other => Err(Error::InvalidSpec(format!(
                "unexpected token {other:?} in expression {:?}",
                self.text
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(text: &str, l: f64, j: f64) -> f64 {
        let nu = l * (l + 1.0);
        let b = Bindings { l, j, nu, eig: (1.0 + nu).sqrt() };
        Expr::parse(text).unwrap().eval(&b)
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval("1 + 2 * 3", 0.0, 0.0), 7.0);
        assert_eq!(eval("(1 + 2) * 3", 0.0, 0.0), 9.0);
        assert_eq!(eval("2 ^ 3 ^ 2", 0.0, 0.0), 512.0); // right-assoc
        assert_eq!(eval("-2 ^ 2", 0.0, 0.0), -4.0);
    }

    #[test]
    fn variables_and_functions() {
        assert_eq!(eval("l * (l + 1)", 3.0, 0.0), 12.0);
        assert_eq!(eval("nu", 2.0, 0.0), 6.0);
        assert_eq!(eval("abs(j) + 1", 1.0, -0.5), 1.5);
        assert!((eval("eig ^ 2 - 1", 1.0, 0.0) - 2.0).abs() < 1e-12);
        assert_eq!(eval("max(j, 0)", 0.0, -3.0), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("x").is_err());
        assert!(Expr::parse("min(1)").is_err());
        assert!(Expr::parse("1 2").is_err());
    }
}
