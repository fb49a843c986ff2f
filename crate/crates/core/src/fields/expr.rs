//! Closed-form scalar fields of `(t, x)` parsed from text.
//!
//! Grammar: `+ - * / ^`, parentheses, unary minus, numbers, the variables
//! `t` and `x`, the constant `pi`, and `exp ln sqrt sin cos`. `^` is right
//! associative and binds tighter than unary minus (`-x^2 = -(x^2)`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn apply(self, j: Jet) -> Jet {
        match self {
            Func::Exp => j.exp(),
            Func::Ln => j.ln(),
            Func::Sqrt => j.sqrt(),
            Func::Sin => j.sin(),
            Func::Cos => j.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    T,
    X,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, t: f64, x: f64) -> Jet {
        match self {
            Node::Num(c) => Jet::constant(*c),
            Node::T => Jet::var_t(t),
            Node::X => Jet::var_x(x),
            Node::Neg(a) => -a.eval(t, x),
            Node::Add(a, b) => a.eval(t, x) + b.eval(t, x),
            Node::Sub(a, b) => a.eval(t, x) - b.eval(t, x),
            Node::Mul(a, b) => a.eval(t, x) * b.eval(t, x),
            Node::Div(a, b) => a.eval(t, x) / b.eval(t, x),
            Node::Pow(a, b) => {
                let base = a.eval(t, x);
                match b.constant_value() {
                    Some(n) if n.fract() == 0.0 && n.abs() <= 64.0 => {
                        let n = n as i32;
                        if n >= 0 {
                            base.powi(n)
                        } else {
                            base.powi(-n).recip()
                        }
                    }
                    Some(p) => base.powc(Complex64::new(p, 0.0)),
                    None => (base.ln() * b.eval(t, x)).exp(),
                }
            }
            Node::Call(f, a) => f.apply(a.eval(t, x)),
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            Node::Num(c) => Some(*c),
            Node::Neg(a) => a.constant_value().map(|v| -v),
            Node::Add(a, b) => Some(a.constant_value()? + b.constant_value()?),
            Node::Sub(a, b) => Some(a.constant_value()? - b.constant_value()?),
            Node::Mul(a, b) => Some(a.constant_value()? * b.constant_value()?),
            Node::Div(a, b) => Some(a.constant_value()? / b.constant_value()?),
            Node::Pow(a, b) => {
                let (a, b) = (a.constant_value()?, b.constant_value()?);
                Some(if b.fract() == 0.0 && b.abs() <= 64.0 { a.powi(b as i32) } else { a.powf(b) })
            }
            _ => None,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Expression(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            // right associative; exponent may carry its own sign
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < s.len() && (s[p] == b'+' || s[p] == b'-') {
                p += 1;
            }
            if p < s.len() && s[p].is_ascii_digit() {
                while p < s.len() && s[p].is_ascii_digit() {
                    p += 1;
                }
                self.pos = p;
            }
        }
        let text = std::str::from_utf8(&s[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Node::Num).map_err(|_| Error::Expression(format!("bad number '{text}'")))
    }

    fn ident(&mut self) -> Result<Node> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let func = match name {
            "t" => return Ok(Node::T),
            "x" => return Ok(Node::X),
            "pi" => return Ok(Node::Num(std::f64::consts::PI)),
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return Err(Error::Expression(format!("unknown identifier '{name}'"))),
        };
        if !self.eat(b'(') {
            return Err(self.err(&format!("expected '(' after {}", func.name())));
        }
        let arg = self.expr()?;
        if !self.eat(b')') {
            return Err(self.err("expected ')'"));
        }
        Ok(Node::Call(func, Box::new(arg)))
    }
}

/// A parsed expression in `t` and `x`, evaluated on [`Jet`]s for exact
/// partials. Serializes as its source text.
#[derive(Clone, Debug)]
pub struct Expr {
    source: String,
    root: Node,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let root = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err("trailing input"));
        }
        Ok(Self { source: src.trim().to_owned(), root })
    }

    pub fn constant(c: f64) -> Self {
        Self { source: format!("{c}"), root: Node::Num(c) }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value of the expression if it does not involve `t` or `x` (or
    /// functions).
    pub fn as_constant(&self) -> Option<f64> {
        self.root.constant_value()
    }

    pub fn jet(&self, t: f64, x: f64) -> Jet {
        self.root.eval(t, x)
    }

    pub fn value(&self, t: f64, x: f64) -> Complex64 {
        self.jet(t, x).v
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => Expr::parse(&s).map_err(serde::de::Error::custom),
            Raw::Number(c) => Ok(Expr::constant(c)),
        }
    }
}
