//! Scalar field expressions over `(t, x1, x2)`.
//!
//! Scenario files describe the superformula parameters as small algebraic
//! expressions such as `4+cos(x1/2)+t/2`. This module parses them into an
//! [`Expr`] tree and evaluates the tree together with its first partial
//! derivatives using forward-mode jet arithmetic.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' ['-'] number)?
//! base   := number | ident | '(' expr ')' | func '(' expr ')'
//! func   := sin | cos | exp | sqrt | abs
//! ident  := t | x1 | x2 | pi
//! ```

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at position {pos}")]
    UnknownIdent { name: String, pos: usize },
    #[error("expression is not differentiable here: {0}")]
    NonDifferentiable(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    T,
    X1,
    X2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Parsed expression tree. Exponents of `^` are always constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
}

/// Value and first partials of a scalar field at one `(t, x1, x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScalarJet {
    pub value: f64,
    pub d_t: f64,
    pub d_x1: f64,
    pub d_x2: f64,
}

impl ScalarJet {
    pub const fn constant(value: f64) -> Self {
        ScalarJet {
            value,
            d_t: 0.0,
            d_x1: 0.0,
            d_x2: 0.0,
        }
    }

    fn variable(var: Var, value: f64) -> Self {
        let mut j = ScalarJet::constant(value);
        match var {
            Var::T => j.d_t = 1.0,
            Var::X1 => j.d_x1 = 1.0,
            Var::X2 => j.d_x2 = 1.0,
        }
        j
    }

    /// Applies a scalar function with derivative `df` at this jet's value.
    fn chain(self, f: f64, df: f64) -> Self {
        ScalarJet {
            value: f,
            d_t: df * self.d_t,
            d_x1: df * self.d_x1,
            d_x2: df * self.d_x2,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.d_t.is_finite()
            && self.d_x1.is_finite()
            && self.d_x2.is_finite()
    }

    /// Gradient as `[d_x1, d_x2, d_t]`, the order used by the metric blocks.
    pub fn grad(&self) -> [f64; 3] {
        [self.d_x1, self.d_x2, self.d_t]
    }
}

impl Add for ScalarJet {
    type Output = ScalarJet;
    fn add(self, o: ScalarJet) -> ScalarJet {
        ScalarJet {
            value: self.value + o.value,
            d_t: self.d_t + o.d_t,
            d_x1: self.d_x1 + o.d_x1,
            d_x2: self.d_x2 + o.d_x2,
        }
    }
}

impl Sub for ScalarJet {
    type Output = ScalarJet;
    fn sub(self, o: ScalarJet) -> ScalarJet {
        self + (-o)
    }
}

impl Neg for ScalarJet {
    type Output = ScalarJet;
    fn neg(self) -> ScalarJet {
        ScalarJet {
            value: -self.value,
            d_t: -self.d_t,
            d_x1: -self.d_x1,
            d_x2: -self.d_x2,
        }
    }
}

impl Mul for ScalarJet {
    type Output = ScalarJet;
    fn mul(self, o: ScalarJet) -> ScalarJet {
        ScalarJet {
            value: self.value * o.value,
            d_t: self.d_t * o.value + self.value * o.d_t,
            d_x1: self.d_x1 * o.value + self.value * o.d_x1,
            d_x2: self.d_x2 * o.value + self.value * o.d_x2,
        }
    }
}

impl Div for ScalarJet {
    type Output = ScalarJet;
    fn div(self, o: ScalarJet) -> ScalarJet {
        let inv = 1.0 / o.value;
        let q = self.value * inv;
        ScalarJet {
            value: q,
            d_t: (self.d_t - q * o.d_t) * inv,
            d_x1: (self.d_x1 - q * o.d_x1) * inv,
            d_x2: (self.d_x2 - q * o.d_x2) * inv,
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, ExprError> {
        parse_expr(text)
    }

    /// Plain evaluation without derivatives.
    pub fn eval(&self, t: f64, x1: f64, x2: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::X1) => x1,
            Expr::Var(Var::X2) => x2,
            Expr::Neg(e) => -e.eval(t, x1, x2),
            Expr::Call(f, e) => {
                let x = e.eval(t, x1, x2);
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt(),
                    Func::Abs => x.abs(),
                }
            }
            Expr::Binary(op, l, r) => {
                let (a, b) = (l.eval(t, x1, x2), r.eval(t, x1, x2));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(base, n) => pow_value(base.eval(t, x1, x2), *n),
        }
    }

    pub fn eval_jet(&self, t: f64, x1: f64, x2: f64) -> Result<ScalarJet, ExprError> {
        eval_jet(self, t, x1, x2)
    }

    pub fn mentions(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(e) | Expr::Call(_, e) | Expr::Pow(e, _) => e.mentions(var),
            Expr::Binary(_, l, r) => l.mentions(var) || r.mentions(var),
        }
    }

    /// Replaces every occurrence of `var` with the constant `value`.
    pub fn substitute(&self, var: Var, value: f64) -> Expr {
        match self {
            Expr::Var(v) if *v == var => Expr::Const(value),
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(e) => Expr::Neg(Box::new(e.substitute(var, value))),
            Expr::Call(f, e) => Expr::Call(*f, Box::new(e.substitute(var, value))),
            Expr::Pow(e, n) => Expr::Pow(Box::new(e.substitute(var, value)), *n),
            Expr::Binary(op, l, r) => Expr::Binary(
                *op,
                Box::new(l.substitute(var, value)),
                Box::new(r.substitute(var, value)),
            ),
        }
    }
}

fn pow_value(x: f64, n: f64) -> f64 {
    if n == 2.0 {
        x * x
    } else if n.fract() == 0.0 && n.abs() < 64.0 {
        x.powi(n as i32)
    } else {
        x.powf(n)
    }
}

/// Evaluates `ast` and its exact first partials at `(t, x1, x2)`.
pub fn eval_jet(ast: &Expr, t: f64, x1: f64, x2: f64) -> Result<ScalarJet, ExprError> {
    let jet = match ast {
        Expr::Const(c) => ScalarJet::constant(*c),
        Expr::Var(v) => {
            let value = match v {
                Var::T => t,
                Var::X1 => x1,
                Var::X2 => x2,
            };
            ScalarJet::variable(*v, value)
        }
        Expr::Neg(e) => -eval_jet(e, t, x1, x2)?,
        Expr::Call(f, e) => {
            let u = eval_jet(e, t, x1, x2)?;
            let x = u.value;
            match f {
                Func::Sin => u.chain(x.sin(), x.cos()),
                Func::Cos => u.chain(x.cos(), -x.sin()),
                Func::Exp => {
                    let ex = x.exp();
                    u.chain(ex, ex)
                }
                Func::Sqrt => {
                    if x <= 0.0 {
                        return Err(ExprError::NonDifferentiable("sqrt of a non-positive value"));
                    }
                    let s = x.sqrt();
                    u.chain(s, 0.5 / s)
                }
                Func::Abs => {
                    if x == 0.0 {
                        return Err(ExprError::NonDifferentiable("abs at its kink"));
                    }
                    u.chain(x.abs(), x.signum())
                }
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval_jet(l, t, x1, x2)?;
            let b = eval_jet(r, t, x1, x2)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.value == 0.0 {
                        return Err(ExprError::NonDifferentiable("division by zero"));
                    }
                    a / b
                }
            }
        }
        Expr::Pow(base, n) => {
            let u = eval_jet(base, t, x1, x2)?;
            let n = *n;
            let x = u.value;
            if n == 0.0 {
                ScalarJet::constant(1.0)
            } else if n == 1.0 {
                u
            } else {
                let integral = n.fract() == 0.0;
                if x == 0.0 && n < 1.0 {
                    return Err(ExprError::NonDifferentiable(
                        "power with exponent < 1 at zero",
                    ));
                }
                if x < 0.0 && !integral {
                    return Err(ExprError::NonDifferentiable(
                        "fractional power of a negative value",
                    ));
                }
                u.chain(pow_value(x, n), n * pow_value(x, n - 1.0))
            }
        }
    };
    if !jet.is_finite() {
        return Err(ExprError::NonDifferentiable(
            "non-finite value or derivative",
        ));
    }
    Ok(jet)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // optional exponent part: 1e-3, 2.5E+4
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
            let s = &text[start..i];
            let v: f64 = s.parse().map_err(|_| ExprError::Syntax {
                pos: start,
                msg: format!("malformed number `{s}`"),
            })?;
            toks.push((Tok::Num(v), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(text[start..i].to_string()), start));
        } else {
            let tok = match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                _ => {
                    return Err(ExprError::Syntax {
                        pos: i,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            };
            toks.push((tok, i));
            i += c.len_utf8();
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let negative = if self.peek() == Some(&Tok::Op('-')) {
                self.pos += 1;
                true
            } else {
                false
            };
            match self.peek() {
                Some(Tok::Num(n)) => {
                    let n = if negative { -*n } else { *n };
                    self.pos += 1;
                    return Ok(Expr::Pow(Box::new(base), n));
                }
                _ => return self.err("exponent must be a numeric constant"),
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(f) = Func::from_name(&name) {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "t" => Ok(Expr::Var(Var::T)),
                    "x1" => Ok(Expr::Var(Var::X1)),
                    "x2" => Ok(Expr::Var(Var::X2)),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    _ => Err(ExprError::UnknownIdent { name, pos: at }),
                }
            }
            Some(_) => self.err("expected a number, variable, function or `(`"),
            None => self.err("unexpected end of expression"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ExprError::Syntax {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

/// Fully parenthesised output that parses back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c < 0.0 {
                    write!(f, "(-{:?})", -c)
                } else {
                    write!(f, "{c:?}")
                }
            }
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::X1) => f.write_str("x1"),
            Expr::Var(Var::X2) => f.write_str("x2"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Binary(op, l, r) => {
                let c = match op {
                    BinOp::Add => '+',
                    BinOp::Sub => '-',
                    BinOp::Mul => '*',
                    BinOp::Div => '/',
                };
                write!(f, "({l}{c}{r})")
            }
            Expr::Pow(e, n) => write!(f, "({e}^{n:?})"),
        }
    }
}
