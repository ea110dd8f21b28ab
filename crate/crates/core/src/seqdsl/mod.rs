//! A one-line text format for single-index binomial sums, e.g.
//!
//! ```text
//! seq delta(n) = sum(k = 0 .. n) (-1)^k * 3^(n - 3*k) * binom(n, 3*k)
//!     * binom(n + k, n) * fact(3*k) / fact(k)^3
//! ```
//!
//! Evaluation is exact: every term is a rational, and the total must be an
//! integer.

mod parser;
mod print;

use std::fmt;
use std::path::Path;

use num_traits::{One, ToPrimitive, Zero};

use crate::exactarith::{binomial, factorial, Integer, Rational};

pub use parser::parse;
pub use print::expr_to_string;

/// Source position, 1-based.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum DslErrorKind {
    Lexical,
    Syntax,
    UnknownIdentifier,
    Evaluation,
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DslErrorKind::Lexical => "lexical error",
            DslErrorKind::Syntax => "syntax error",
            DslErrorKind::UnknownIdentifier => "unknown identifier",
            DslErrorKind::Evaluation => "evaluation error",
        })
    }
}

/// A diagnostic. Parse errors carry a position; evaluation errors do not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub kind: DslErrorKind,
    pub position: Option<Position>,
    pub message: String,
}

impl DslError {
    pub(crate) fn at(kind: DslErrorKind, position: Position, message: impl Into<String>) -> Self {
        Self { kind, position: Some(position), message: message.into() }
    }

    fn eval(message: impl Into<String>) -> Self {
        Self { kind: DslErrorKind::Evaluation, position: None, message: message.into() }
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some(pos) => write!(f, "{} at {pos}: {}", self.kind, self.message),
            None => write!(f, "{}: {}", self.kind, self.message),
        }
    }
}

impl std::error::Error for DslError {}

/// Expression tree. `N` is the sequence argument, `Index` the summation
/// variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(Integer),
    N,
    Index,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Binom(Box<Expr>, Box<Expr>),
    Fact(Box<Expr>),
}

/// `seq name(n) = sum(index = lower .. upper) body`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceDef {
    pub name: String,
    pub index: String,
    pub lower: Expr,
    pub upper: Expr,
    pub body: Expr,
}

fn as_integer(value: &Rational, what: &str) -> Result<Integer, DslError> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(DslError::eval(format!("{what} argument {value} is not an integer")))
    }
}

fn as_i64(value: &Integer, what: &str) -> Result<i64, DslError> {
    value
        .to_i64()
        .ok_or_else(|| DslError::eval(format!("{what} argument {value} is out of range")))
}

impl Expr {
    /// Exact value with `n` and the index bound.
    pub fn eval(&self, n: &Integer, k: &Integer) -> Result<Rational, DslError> {
        Ok(match self {
            Expr::Int(v) => Rational::from_integer(v.clone()),
            Expr::N => Rational::from_integer(n.clone()),
            Expr::Index => Rational::from_integer(k.clone()),
            Expr::Neg(e) => -e.eval(n, k)?,
            Expr::Add(a, b) => a.eval(n, k)? + b.eval(n, k)?,
            Expr::Sub(a, b) => a.eval(n, k)? - b.eval(n, k)?,
            Expr::Mul(a, b) => a.eval(n, k)? * b.eval(n, k)?,
            Expr::Div(a, b) => {
                let den = b.eval(n, k)?;
                if den.is_zero() {
                    return Err(DslError::eval("division by zero"));
                }
                a.eval(n, k)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(n, k)?;
                let exp = as_integer(&b.eval(n, k)?, "exponent")?;
                let e = as_i64(&exp, "exponent")?;
                let mag = u32::try_from(e.unsigned_abs())
                    .map_err(|_| DslError::eval(format!("exponent {e} is too large")))?;
                let raised = Rational::new(base.numer().pow(mag), base.denom().pow(mag));
                if e >= 0 {
                    raised
                } else if raised.is_zero() {
                    return Err(DslError::eval("division by zero"));
                } else {
                    raised.recip()
                }
            }
            Expr::Binom(a, b) => {
                let top = as_i64(&as_integer(&a.eval(n, k)?, "binom")?, "binom")?;
                let bottom = as_i64(&as_integer(&b.eval(n, k)?, "binom")?, "binom")?;
                if top < 0 {
                    return Err(DslError::eval(format!("binom with negative top {top}")));
                }
                let v = binomial(top, bottom).map_err(|e| DslError::eval(e.to_string()))?;
                Rational::from_integer(v)
            }
            Expr::Fact(a) => {
                let arg = as_i64(&as_integer(&a.eval(n, k)?, "fact")?, "fact")?;
                if arg < 0 {
                    return Err(DslError::eval(format!("negative factorial argument {arg}")));
                }
                Rational::from_integer(factorial(arg as u64))
            }
        })
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Expr::Int(_) | Expr::N | Expr::Index => 1,
            Expr::Neg(e) | Expr::Fact(e) => 1 + e.size(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b)
            | Expr::Binom(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl SequenceDef {
    /// `Σ_{k = lower(n)}^{upper(n)} body(n, k)`, which must be an integer.
    pub fn evaluate(&self, n: u64) -> Result<Integer, DslError> {
        let n_int = Integer::from(n);
        let zero = Integer::zero();
        let lower = as_integer(&self.lower.eval(&n_int, &zero)?, "lower bound")?;
        let upper = as_integer(&self.upper.eval(&n_int, &zero)?, "upper bound")?;
        let mut total = Rational::zero();
        let mut k = lower;
        while k <= upper {
            total += self.body.eval(&n_int, &k)?;
            k += Integer::one();
        }
        if !total.is_integer() {
            return Err(DslError::eval(format!("sum at n = {n} is {total}, not an integer")));
        }
        Ok(total.to_integer())
    }

    /// Canonical text; `parse(&d.roundtrip())` gives back `d`.
    pub fn roundtrip(&self) -> String {
        self.to_string()
    }

    pub fn from_file(path: &Path) -> Result<Self, crate::error::Error> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            crate::error::Error::Precondition(format!("cannot read {}: {e}", path.display()))
        })?;
        Ok(parse(&text)?)
    }
}

impl fmt::Display for SequenceDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_def(f, self)
    }
}

/// The shipped definition of A_δ.
pub const DELTA_SOURCE: &str = include_str!("../../../../sequences/delta.seq");
