//! Integer formulas in the stage index `k` (and, for top-digit multipliers,
//! the running scale product `P`).
//!
//! Grammar: integers, `k`, `P`, `+ - * ^`, parentheses, unary minus and
//! implicit multiplication (`2k`, `(k+1)(k+2)`). Exponents are nonnegative
//! integer literals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::intpoly::IntPolynomial;

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("unexpected {found} at column {col}")]
    Unexpected { col: usize, found: String },
    #[error("formula ended early")]
    UnexpectedEnd,
    #[error("exponent at column {col} must be an integer literal in 0..={max}")]
    BadExponent { col: usize, max: u32 },
    #[error("formula uses P, which is only defined for top-digit multipliers")]
    PNotAllowed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Lit(BigInt),
    K,
    P,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Negation with literals folded, so `-3` is a literal.
    pub fn negated(e: Expr) -> Expr {
        match e {
            Expr::Lit(n) => Expr::Lit(-n),
            other => Expr::Neg(Box::new(other)),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Lit(n) if n.is_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn uses_p(&self) -> bool {
        match self {
            Expr::P => true,
            Expr::Lit(_) | Expr::K => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.uses_p() || b.uses_p(),
            Expr::Neg(a) | Expr::Pow(a, _) => a.uses_p(),
        }
    }

    fn eval(&self, k: &BigInt, p: Option<&BigInt>) -> Result<BigInt, FormulaError> {
        Ok(match self {
            Expr::Lit(n) => n.clone(),
            Expr::K => k.clone(),
            Expr::P => p.ok_or(FormulaError::PNotAllowed)?.clone(),
            Expr::Add(a, b) => a.eval(k, p)? + b.eval(k, p)?,
            Expr::Sub(a, b) => a.eval(k, p)? - b.eval(k, p)?,
            Expr::Mul(a, b) => a.eval(k, p)? * b.eval(k, p)?,
            Expr::Neg(a) => -a.eval(k, p)?,
            Expr::Pow(a, e) => num_traits::pow(a.eval(k, p)?, *e as usize),
        })
    }

    /// Coefficients in `P`: entry `i` is the polynomial in `k` multiplying `P^i`.
    fn bipoly(&self) -> Vec<IntPolynomial> {
        match self {
            Expr::Lit(n) => vec![IntPolynomial::constant(n.clone())],
            Expr::K => vec![IntPolynomial::from_i64(&[0, 1])],
            Expr::P => vec![IntPolynomial::zero(), IntPolynomial::one()],
            Expr::Add(a, b) => bi_add(&a.bipoly(), &b.bipoly()),
            Expr::Sub(a, b) => bi_add(&a.bipoly(), &bi_neg(&b.bipoly())),
            Expr::Mul(a, b) => bi_mul(&a.bipoly(), &b.bipoly()),
            Expr::Neg(a) => bi_neg(&a.bipoly()),
            Expr::Pow(a, e) => {
                let base = a.bipoly();
                (0..*e).fold(vec![IntPolynomial::one()], |acc, _| bi_mul(&acc, &base))
            }
        }
    }
}

fn bi_trim(mut v: Vec<IntPolynomial>) -> Vec<IntPolynomial> {
    while v.len() > 1 && v.last().is_some_and(IntPolynomial::is_zero) {
        v.pop();
    }
    v
}

fn bi_add(a: &[IntPolynomial], b: &[IntPolynomial]) -> Vec<IntPolynomial> {
    let n = a.len().max(b.len());
    let zero = IntPolynomial::zero();
    bi_trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
            .collect(),
    )
}

fn bi_neg(a: &[IntPolynomial]) -> Vec<IntPolynomial> {
    a.iter().map(|p| -p).collect()
}

fn bi_mul(a: &[IntPolynomial], b: &[IntPolynomial]) -> Vec<IntPolynomial> {
    let mut out = vec![IntPolynomial::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    bi_trim(out)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, min: u8| {
            if e.prec() < min {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        match self {
            Expr::Lit(n) => write!(f, "{n}"),
            Expr::K => write!(f, "k"),
            Expr::P => write!(f, "P"),
            Expr::Add(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " + ")?;
                wrap(f, b, 2)
            }
            Expr::Sub(a, b) => {
                wrap(f, a, 1)?;
                write!(f, " - ")?;
                wrap(f, b, 2)
            }
            Expr::Mul(a, b) => {
                wrap(f, a, 2)?;
                write!(f, "*")?;
                wrap(f, b, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                wrap(f, a, 3)
            }
            Expr::Pow(a, e) => {
                wrap(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    K,
    P,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => format!("number {n}"),
        Tok::K => "'k'".into(),
        Tok::P => "'P'".into(),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, FormulaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        let tok = match c {
            ' ' | '\t' => {
                i += 1;
                continue;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push((col, Tok::Num(s.parse().expect("digits"))));
                continue;
            }
            'k' => Tok::K,
            'P' => Tok::P,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(FormulaError::Unexpected {
                    col,
                    found: format!("character '{other}'"),
                })
            }
        };
        out.push((col, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn next(&mut self) -> Result<(usize, Tok), FormulaError> {
        let t = self.toks.get(self.pos).cloned().ok_or(FormulaError::UnexpectedEnd)?;
        self.pos += 1;
        Ok(t)
    }

    fn expr(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, FormulaError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Num(_) | Tok::K | Tok::P | Tok::LParen) => {
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, FormulaError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::negated(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, FormulaError> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let (col, tok) = self.next()?;
        let e = match tok {
            Tok::Num(n) => n.to_u32().filter(|&e| e <= MAX_EXPONENT),
            _ => None,
        }
        .ok_or(FormulaError::BadExponent { col, max: MAX_EXPONENT })?;
        if self.peek() == Some(&Tok::Caret) {
            let col = self.toks[self.pos].0;
            return Err(FormulaError::Unexpected {
                col,
                found: "chained '^'".into(),
            });
        }
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn primary(&mut self) -> Result<Expr, FormulaError> {
        let (col, tok) = self.next()?;
        match tok {
            Tok::Num(n) => Ok(Expr::Lit(n)),
            Tok::K => Ok(Expr::K),
            Tok::P => Ok(Expr::P),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.next()? {
                    (_, Tok::RParen) => Ok(inner),
                    (col, t) => Err(FormulaError::Unexpected {
                        col,
                        found: describe(&t),
                    }),
                }
            }
            t => Err(FormulaError::Unexpected {
                col,
                found: describe(&t),
            }),
        }
    }
}

/// A parsed formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Formula {
    expr: Expr,
}

impl Formula {
    pub fn parse(text: &str) -> Result<Self, FormulaError> {
        let toks = lex(text)?;
        let mut p = Parser { toks, pos: 0 };
        let expr = p.expr()?;
        if let Some((col, t)) = p.toks.get(p.pos) {
            return Err(FormulaError::Unexpected {
                col: *col,
                found: describe(t),
            });
        }
        Ok(Self { expr })
    }

    /// Parses and rejects any use of `P`.
    pub fn parse_in_k(text: &str) -> Result<Self, FormulaError> {
        let f = Self::parse(text)?;
        if f.uses_p() {
            return Err(FormulaError::PNotAllowed);
        }
        Ok(f)
    }

    pub fn from_expr(expr: Expr) -> Self {
        Self { expr }
    }

    pub fn constant(c: i64) -> Self {
        Self {
            expr: Expr::Lit(BigInt::from(c)),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn uses_p(&self) -> bool {
        self.expr.uses_p()
    }

    /// Value at `k` with the scale product `p` (required when the formula uses `P`).
    pub fn eval(&self, k: u64, p: Option<&BigInt>) -> Result<BigInt, FormulaError> {
        self.expr.eval(&BigInt::from(k), p)
    }

    /// The formula as a polynomial in `k`; `None` when it uses `P`.
    pub fn poly(&self) -> Option<IntPolynomial> {
        let b = self.expr.bipoly();
        (b.len() == 1).then(|| b.into_iter().next().expect("one entry"))
    }

    /// Polynomials in `k` multiplying `P^0, P^1, ...`.
    pub fn poly_in_p(&self) -> Vec<IntPolynomial> {
        self.expr.bipoly()
    }

    /// The formula is a constant; returns its value.
    pub fn as_constant(&self) -> Option<BigInt> {
        self.poly()
            .filter(|p| p.is_constant())
            .map(|p| p.coeffs().first().cloned().unwrap_or_else(BigInt::zero))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.fmt(f)
    }
}

impl FromStr for Formula {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}
