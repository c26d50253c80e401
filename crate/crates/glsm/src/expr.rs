//! Expression ASTs for immersion components and metric entries, with
//! forward-mode automatic differentiation via dual numbers.
//!
//! Syntax: infix arithmetic, `^` integer powers, `sqrt/sin/cos/exp` calls,
//! chart variables `u1..u9`, ambient variables `x1..x9`.

use crate::error::{GlsmError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Const(f64),
    Var(usize),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, i32),
    Sqrt(Box<Ast>),
    Sin(Box<Ast>),
    Cos(Box<Ast>),
    Exp(Box<Ast>),
}

/// Scalar abstraction shared by plain evaluation and dual-number AD.
pub trait Scalar: Copy {
    fn from_f64(x: f64) -> Self;
    fn add(self, o: Self) -> Self;
    fn sub(self, o: Self) -> Self;
    fn mul(self, o: Self) -> Self;
    fn div(self, o: Self) -> Result<Self>;
    fn neg(self) -> Self;
    fn powi(self, k: i32) -> Result<Self>;
    fn sqrt(self) -> Result<Self>;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
    fn div(self, o: Self) -> Result<Self> {
        if o.abs() < 1e-300 {
            return Err(GlsmError::Eval("division by zero".into()));
        }
        Ok(self / o)
    }
    fn neg(self) -> Self {
        -self
    }
    fn powi(self, k: i32) -> Result<Self> {
        if k < 0 && self.abs() < 1e-300 {
            return Err(GlsmError::Eval("negative power of zero".into()));
        }
        Ok(f64::powi(self, k))
    }
    fn sqrt(self) -> Result<Self> {
        if self < 0.0 {
            return Err(GlsmError::Eval(format!("sqrt of negative value {self}")));
        }
        Ok(f64::sqrt(self))
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
}

/// First-order dual number carrying one directional derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub du: f64,
}

impl Dual {
    pub fn constant(re: f64) -> Self {
        Dual { re, du: 0.0 }
    }
    pub fn seeded(re: f64, du: f64) -> Self {
        Dual { re, du }
    }
}

impl Scalar for Dual {
    fn from_f64(x: f64) -> Self {
        Dual::constant(x)
    }
    fn add(self, o: Self) -> Self {
        Dual { re: self.re + o.re, du: self.du + o.du }
    }
    fn sub(self, o: Self) -> Self {
        Dual { re: self.re - o.re, du: self.du - o.du }
    }
    fn mul(self, o: Self) -> Self {
        Dual {
            re: self.re * o.re,
            du: self.du * o.re + self.re * o.du,
        }
    }
    fn div(self, o: Self) -> Result<Self> {
        if o.re.abs() < 1e-300 {
            return Err(GlsmError::Eval("division by zero".into()));
        }
        Ok(Dual {
            re: self.re / o.re,
            du: (self.du * o.re - self.re * o.du) / (o.re * o.re),
        })
    }
    fn neg(self) -> Self {
        Dual { re: -self.re, du: -self.du }
    }
    fn powi(self, k: i32) -> Result<Self> {
        if k == 0 {
            return Ok(Dual::constant(1.0));
        }
        if self.re.abs() < 1e-300 && k < 0 {
            return Err(GlsmError::Eval("negative power of zero".into()));
        }
        let re = self.re.powi(k);
        let du = k as f64 * self.re.powi(k - 1) * self.du;
        Ok(Dual { re, du })
    }
    fn sqrt(self) -> Result<Self> {
        if self.re < 0.0 {
            return Err(GlsmError::Eval(format!("sqrt of negative value {}", self.re)));
        }
        if self.re == 0.0 && self.du != 0.0 {
            return Err(GlsmError::Eval("sqrt not differentiable at zero".into()));
        }
        let r = self.re.sqrt();
        let du = if self.du == 0.0 { 0.0 } else { self.du / (2.0 * r) };
        Ok(Dual { re: r, du })
    }
    fn sin(self) -> Self {
        Dual { re: self.re.sin(), du: self.du * self.re.cos() }
    }
    fn cos(self) -> Self {
        Dual { re: self.re.cos(), du: -self.du * self.re.sin() }
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual { re: e, du: self.du * e }
    }
}

/// A parsed expression over a fixed set of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    ast: Ast,
    nvars: usize,
    source: String,
}

impl Expression {
    /// Parses `text` against the allowed variable names (position = index).
    pub fn parse(text: &str, vars: &[String]) -> Result<Self> {
        let mut p = Parser {
            bytes: text.as_bytes(),
            pos: 0,
            vars,
        };
        p.skip_ws();
        let ast = p.expr()?;
        p.skip_ws();
        if p.pos != p.bytes.len() {
            return Err(GlsmError::Parse {
                offset: p.pos,
                message: format!("unexpected trailing input in `{text}`"),
            });
        }
        Ok(Expression {
            ast,
            nvars: vars.len(),
            source: text.to_string(),
        })
    }

    pub fn constant(value: f64) -> Self {
        Expression {
            ast: Ast::Const(value),
            nvars: 0,
            source: format!("{value}"),
        }
    }

    /// A linear form c . u as an expression (used by emitted configs).
    pub fn linear(coeffs: &[f64]) -> Self {
        let mut ast = Ast::Const(0.0);
        let mut first = true;
        for (i, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let term = Ast::Mul(Box::new(Ast::Const(c)), Box::new(Ast::Var(i)));
            ast = if first { term } else { Ast::Add(Box::new(ast), Box::new(term)) };
            first = false;
        }
        let source = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0.0)
            .map(|(i, c)| format!("{c}*u{}", i + 1))
            .collect::<Vec<_>>()
            .join(" + ");
        Expression {
            ast,
            nvars: coeffs.len(),
            source: if source.is_empty() { "0".into() } else { source },
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval<S: Scalar>(&self, vals: &[S]) -> Result<S> {
        debug_assert!(vals.len() >= self.nvars);
        eval_ast(&self.ast, vals)
    }

    /// Value at `point`.
    pub fn value(&self, point: &[f64]) -> Result<f64> {
        self.eval(point)
    }

    /// Partial derivative w.r.t. variable `i` at `point`, by forward AD.
    pub fn partial(&self, point: &[f64], i: usize) -> Result<f64> {
        let duals: Vec<Dual> = point
            .iter()
            .enumerate()
            .map(|(j, &x)| Dual::seeded(x, if i == j { 1.0 } else { 0.0 }))
            .collect();
        Ok(self.eval(&duals)?.du)
    }

    /// Directional derivative along `dir` at `point`, by forward AD.
    pub fn directional(&self, point: &[f64], dir: &[f64]) -> Result<f64> {
        let duals: Vec<Dual> = point
            .iter()
            .zip(dir.iter())
            .map(|(&x, &d)| Dual::seeded(x, d))
            .collect();
        Ok(self.eval(&duals)?.du)
    }
}

fn eval_ast<S: Scalar>(ast: &Ast, vals: &[S]) -> Result<S> {
    Ok(match ast {
        Ast::Const(c) => S::from_f64(*c),
        Ast::Var(i) => vals[*i],
        Ast::Add(a, b) => eval_ast(a, vals)?.add(eval_ast(b, vals)?),
        Ast::Sub(a, b) => eval_ast(a, vals)?.sub(eval_ast(b, vals)?),
        Ast::Mul(a, b) => eval_ast(a, vals)?.mul(eval_ast(b, vals)?),
        Ast::Div(a, b) => eval_ast(a, vals)?.div(eval_ast(b, vals)?)?,
        Ast::Neg(a) => eval_ast(a, vals)?.neg(),
        Ast::Pow(a, k) => eval_ast(a, vals)?.powi(*k)?,
        Ast::Sqrt(a) => eval_ast(a, vals)?.sqrt()?,
        Ast::Sin(a) => eval_ast(a, vals)?.sin(),
        Ast::Cos(a) => eval_ast(a, vals)?.cos(),
        Ast::Exp(a) => eval_ast(a, vals)?.exp(),
    })
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Ast::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = Ast::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        self.skip_ws();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            return Ok(Ast::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i32> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self
            .peek()
            .map(|c| c.is_ascii_digit())
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse().map_err(|_| GlsmError::Parse {
            offset: start,
            message: "expected an integer exponent after `^`".into(),
        })
    }

    fn atom(&mut self) -> Result<Ast> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() != Some(b')') {
                    return Err(GlsmError::Parse {
                        offset: self.pos,
                        message: "expected `)`".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            _ => Err(GlsmError::Parse {
                offset: self.pos,
                message: "expected a number, variable, function call or `(`".into(),
            }),
        }
    }

    fn number(&mut self) -> Result<Ast> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_digit() || c == b'.')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        // scientific notation
        if self.peek() == Some(b'e') || self.peek() == Some(b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.peek() == Some(b'+') || self.peek() == Some(b'-') {
                self.pos += 1;
            }
            if self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                while self.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| GlsmError::Parse {
            offset: start,
            message: format!("invalid number `{text}`"),
        })?;
        Ok(Ast::Const(value))
    }

    fn ident(&mut self) -> Result<Ast> {
        let start = self.pos;
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == b'_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.pos += 1;
            let arg = self.expr()?;
            self.skip_ws();
            if self.peek() != Some(b')') {
                return Err(GlsmError::Parse {
                    offset: self.pos,
                    message: format!("unclosed call to `{name}`"),
                });
            }
            self.pos += 1;
            let b = Box::new(arg);
            return match name {
                "sqrt" => Ok(Ast::Sqrt(b)),
                "sin" => Ok(Ast::Sin(b)),
                "cos" => Ok(Ast::Cos(b)),
                "exp" => Ok(Ast::Exp(b)),
                _ => Err(GlsmError::Parse {
                    offset: start,
                    message: format!("unknown function `{name}`"),
                }),
            };
        }
        if name == "pi" {
            return Ok(Ast::Const(std::f64::consts::PI));
        }
        if let Some(i) = self.vars.iter().position(|v| v == name) {
            return Ok(Ast::Var(i));
        }
        Err(GlsmError::Parse {
            offset: start,
            message: format!("unknown variable `{name}`"),
        })
    }
}

/// Standard variable names u1..um for chart coordinates.
pub fn chart_vars(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("u{i}")).collect()
}

/// Standard variable names x1..xn for ambient coordinates.
pub fn ambient_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}
