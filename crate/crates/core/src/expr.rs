//! Arithmetic expressions over `x`, `y` (densities) or `t` (boundary data).
//!
//! Precedence from tightest: `^` (right-associative), unary `-`/`+`, `*` `/`, `+` `-`.
//! Functions `abs exp log sqrt` take one parenthesised argument; `pi` and `e` are constants.

use crate::error::{Error, Result};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unary {
    Neg,
    Abs,
    Exp,
    Log,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Binary {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(Unary, Box<Expr>),
    Binary(Binary, Box<Expr>, Box<Expr>),
}

/// Which variables an expression may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarContext {
    /// `x` and `y`.
    Plane,
    /// `t` only.
    Line,
}

impl VarContext {
    fn allows(self, v: Var) -> bool {
        match self {
            VarContext::Plane => matches!(v, Var::X | Var::Y),
            VarContext::Line => v == Var::T,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ctx: VarContext,
}

const OPERAND: &[&str] = &["number", "variable", "function", "(", "-"];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn fail<T>(&self, at: usize, expected: &[&str]) -> Result<T> {
        Err(Error::Syntax { offset: at, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            let op = if c == b'+' { Binary::Add } else { Binary::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == b'*' { Binary::Mul } else { Binary::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Unary(Unary::Neg, Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Binary(Binary::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        let start = match self.peek() {
            None => return self.fail(self.pos, OPERAND),
            Some(_) => self.pos,
        };
        let c = self.src[start];
        if c == b'(' {
            self.pos += 1;
            let e = self.sum()?;
            if self.peek() != Some(b')') {
                return self.fail(self.pos, &[")", "operator"]);
            }
            self.pos += 1;
            return Ok(e);
        }
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            let func = match word {
                "abs" => Some(Unary::Abs),
                "exp" => Some(Unary::Exp),
                "log" | "ln" => Some(Unary::Log),
                "sqrt" => Some(Unary::Sqrt),
                _ => None,
            };
            if let Some(f) = func {
                if self.peek() != Some(b'(') {
                    return self.fail(self.pos, &["("]);
                }
                self.pos += 1;
                let arg = self.sum()?;
                if self.peek() != Some(b')') {
                    return self.fail(self.pos, &[")", "operator"]);
                }
                self.pos += 1;
                return Ok(Expr::Unary(f, Box::new(arg)));
            }
            let var = match word {
                "pi" => return Ok(Expr::Const(std::f64::consts::PI)),
                "e" => return Ok(Expr::Const(std::f64::consts::E)),
                "x" => Var::X,
                "y" => Var::Y,
                "t" => Var::T,
                _ => return self.fail(start, OPERAND),
            };
            if !self.ctx.allows(var) {
                let allowed: &[&str] = match self.ctx {
                    VarContext::Plane => &["x", "y"],
                    VarContext::Line => &["t"],
                };
                return self.fail(start, allowed);
            }
            return Ok(Expr::Var(var));
        }
        self.fail(start, OPERAND)
    }

    fn number(&mut self, start: usize) -> Result<Expr> {
        let s = self.src;
        let mut i = start;
        let digits = |i: &mut usize| {
            let b = *i;
            while *i < s.len() && s[*i].is_ascii_digit() {
                *i += 1;
            }
            *i > b
        };
        let mut any = digits(&mut i);
        if i < s.len() && s[i] == b'.' {
            i += 1;
            any |= digits(&mut i);
        }
        if !any {
            return self.fail(start, &["number"]);
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            let mut k = j;
            if digits(&mut k) {
                i = k;
            }
        }
        self.pos = i;
        let text = std::str::from_utf8(&s[start..i]).expect("ascii");
        text.parse::<f64>().map(Expr::Const).or_else(|_| self.fail(start, &["number"]))
    }
}

/// Parse `src` with the variables allowed by `ctx`.
///
/// ```
/// use carleson::expr::{parse_expression, VarContext};
/// let e = parse_expression("1/(y^2)", VarContext::Plane).unwrap();
/// assert_eq!(e.to_string(), "div(1, pow(y, 2))");
/// assert!(parse_expression("1/(", VarContext::Plane).is_err());
/// ```
pub fn parse_expression(src: &str, ctx: VarContext) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, ctx };
    if p.peek().is_none() {
        return p.fail(p.pos, OPERAND);
    }
    let e = p.sum()?;
    if p.peek().is_some() {
        return p.fail(p.pos, &["operator", "end of input"]);
    }
    Ok(e)
}

impl Expr {
    /// Evaluate at `(x, y, t)`; variables outside the context are simply unused.
    pub fn eval(&self, x: f64, y: f64, t: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Var(Var::T) => t,
            Expr::Unary(op, a) => {
                let a = a.eval(x, y, t);
                match op {
                    Unary::Neg => -a,
                    Unary::Abs => a.abs(),
                    Unary::Exp => a.exp(),
                    Unary::Log => a.ln(),
                    Unary::Sqrt => a.sqrt(),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, y, t), b.eval(x, y, t));
                match op {
                    Binary::Add => a + b,
                    Binary::Sub => a - b,
                    Binary::Mul => a * b,
                    Binary::Div => a / b,
                    Binary::Pow => a.powf(b),
                }
            }
        }
    }

    /// Evaluate and reject non-finite results.
    pub fn eval_checked(&self, x: f64, y: f64, t: f64) -> Result<f64> {
        let v = self.eval(x, y, t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("expression {self} is {v} at (x={x}, y={y}, t={t})")))
        }
    }

    /// Infix rendering that parses back to the same tree.
    pub fn to_infix(&self) -> String {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 { format!("({c:?})") } else { format!("{c:?}") }
            }
            Expr::Var(v) => var_name(*v).to_string(),
            Expr::Unary(Unary::Neg, a) => format!("(-{})", a.to_infix()),
            Expr::Unary(op, a) => format!("{}({})", unary_name(*op), a.to_infix()),
            Expr::Binary(op, a, b) => {
                let sym = match op {
                    Binary::Add => "+",
                    Binary::Sub => "-",
                    Binary::Mul => "*",
                    Binary::Div => "/",
                    Binary::Pow => "^",
                };
                format!("({}{}{})", a.to_infix(), sym, b.to_infix())
            }
        }
    }
}

fn var_name(v: Var) -> &'static str {
    match v {
        Var::X => "x",
        Var::Y => "y",
        Var::T => "t",
    }
}

fn unary_name(u: Unary) -> &'static str {
    match u {
        Unary::Neg => "neg",
        Unary::Abs => "abs",
        Unary::Exp => "exp",
        Unary::Log => "log",
        Unary::Sqrt => "sqrt",
    }
}

/// Prefix tree rendering, e.g. `div(1, pow(y, 2))`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => f.write_str(var_name(*v)),
            Expr::Unary(op, a) => write!(f, "{}({a})", unary_name(*op)),
            Expr::Binary(op, a, b) => {
                let name = match op {
                    Binary::Add => "add",
                    Binary::Sub => "sub",
                    Binary::Mul => "mul",
                    Binary::Div => "div",
                    Binary::Pow => "pow",
                };
                write!(f, "{name}({a}, {b})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Expr> {
        parse_expression(s, VarContext::Plane)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(parse("1/(y^2)").unwrap().to_string(), "div(1, pow(y, 2))");
        let e = parse("y^(-0.5)*exp(-x*x)").unwrap();
        assert!((e.eval(0.0, 4.0, 0.0) - 0.5).abs() < 1e-15);
        match parse("1/(") {
            Err(Error::Syntax { offset, expected }) => {
                assert_eq!(offset, 3);
                assert!(expected.contains(&"(".to_string()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn precedence() {
        assert_eq!(parse("-x^2").unwrap().to_string(), "neg(pow(x, 2))");
        assert_eq!(parse("2^3^2").unwrap().eval(0.0, 0.0, 0.0), 512.0);
        assert_eq!(parse("1-2-3").unwrap().eval(0.0, 0.0, 0.0), -4.0);
        assert_eq!(parse("8/4/2").unwrap().eval(0.0, 0.0, 0.0), 1.0);
        assert_eq!(parse("2*-3").unwrap().eval(0.0, 0.0, 0.0), -6.0);
        assert_eq!(parse("1+2*3^2").unwrap().eval(0.0, 0.0, 0.0), 19.0);
        assert_eq!(parse(" 1.5e2 + .5 ").unwrap().eval(0.0, 0.0, 0.0), 150.5);
    }

    #[test]
    fn errors_carry_offsets() {
        let off = |s: &str| match parse(s) {
            Err(Error::Syntax { offset, .. }) => offset,
            other => panic!("{other:?}"),
        };
        assert_eq!(off(""), 0);
        assert_eq!(off("x +"), 3);
        assert_eq!(off("(x"), 2);
        assert_eq!(off("x y"), 2);
        assert_eq!(off("foo(x)"), 0);
        assert_eq!(off("exp x"), 4);
        assert_eq!(parse_expression("x", VarContext::Line).unwrap_err(), Error::Syntax {
            offset: 0,
            expected: vec!["t".into()]
        });
    }

    #[test]
    fn non_finite_reported_at_evaluation() {
        let e = parse("1/y").unwrap();
        assert!(matches!(e.eval_checked(0.0, 0.0, 0.0), Err(Error::Domain(_))));
        assert_eq!(e.eval_checked(0.0, 2.0, 0.0).unwrap(), 0.5);
    }
}
