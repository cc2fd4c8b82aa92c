//! Scalar expressions over state variables `x1..xn`.
//!
//! Expressions are immutable trees. They are built either by [`parse_expr`]
//! or through the simplifying constructors ([`Expr::add`], [`Expr::mul`], ...),
//! which apply only identity and annihilator rules plus constant folding.
//! Correctness of derived expressions is established by evaluation, never by
//! structural equality.

mod diff;
mod display;
mod parse;

use std::fmt;

use thiserror::Error;

pub use parse::{parse_expr, ParseError};

/// Elementary functions accepted by the grammar. `Sign`, with `sign(0) = 0`,
/// appears as the derivative of `abs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    /// Functions callable from expression text.
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sqrt" => Func::Sqrt,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

/// Expression tree node. `Var(i)` is the zero-based index of `x{i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Why an evaluation has no finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainKind {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive number")]
    LogNonPositive,
    #[error("square root of a negative number")]
    SqrtNegative,
    #[error("non-integer power of a negative number")]
    NegativeBase,
    #[error("zero raised to a negative power")]
    ZeroNegativePower,
    #[error("non-finite result")]
    NonFinite,
    #[error("variable x{index} is outside a point of dimension {dim}", index = .0 + 1, dim = .1)]
    VariableOutOfRange(usize, usize),
}

/// A domain error together with the point at which it occurred.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} at {point:?}")]
pub struct EvalError {
    pub kind: DomainKind,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("vector field needs at least one component")]
    Empty,
    #[error("component {component} references x{var} but the field has dimension {dim}")]
    VariableOutOfRange {
        component: usize,
        var: usize,
        dim: usize,
    },
    #[error("component {component}: {source}")]
    Parse {
        component: usize,
        #[source]
        source: ParseError,
    },
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    /// Variable `x{index}` using the one-based index of the text grammar.
    pub fn var(index: usize) -> Expr {
        assert!(index >= 1, "variables are numbered from x1");
        Expr::Var(index - 1)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            e => Expr::Neg(Box::new(e)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::Const(0.0);
        }
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            _ if b.is_one() => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        match (base.as_const(), exponent.as_const()) {
            (_, Some(1.0)) => base,
            (_, Some(0.0)) => Expr::Const(1.0),
            (Some(x), Some(y)) => {
                let v = x.powf(y);
                if v.is_finite() && (x > 0.0 || y.fract() == 0.0) {
                    Expr::Const(v)
                } else {
                    Expr::Pow(Box::new(base), Box::new(exponent))
                }
            }
            _ => Expr::Pow(Box::new(base), Box::new(exponent)),
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, Box::new(arg))
    }

    /// `x1² + ... + xn²`.
    pub fn squared_norm(dim: usize) -> Expr {
        (0..dim)
            .map(|i| Expr::pow(Expr::Var(i), Expr::Const(2.0)))
            .reduce(Expr::add)
            .unwrap_or(Expr::Const(0.0))
    }

    /// Largest one-based variable index referenced, or 0 for closed expressions.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.max_var(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.max_var().max(b.max_var()),
        }
    }

    /// True if no variable occurs in the expression.
    pub fn is_closed(&self) -> bool {
        self.max_var() == 0
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Call(_, a) => 1 + a.node_count(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Evaluates at `point`; coordinate `k` of the point is `x{k+1}`.
    pub fn eval(&self, point: &[f64]) -> Result<f64, EvalError> {
        self.eval_raw(point).map_err(|kind| EvalError {
            kind,
            point: point.to_vec(),
        })
    }

    fn eval_raw(&self, p: &[f64]) -> Result<f64, DomainKind> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => *p
                .get(*i)
                .ok_or(DomainKind::VariableOutOfRange(*i, p.len()))?,
            Expr::Neg(a) => -a.eval_raw(p)?,
            Expr::Add(a, b) => a.eval_raw(p)? + b.eval_raw(p)?,
            Expr::Sub(a, b) => a.eval_raw(p)? - b.eval_raw(p)?,
            Expr::Mul(a, b) => a.eval_raw(p)? * b.eval_raw(p)?,
            Expr::Div(a, b) => {
                let num = a.eval_raw(p)?;
                let den = b.eval_raw(p)?;
                if den == 0.0 {
                    return Err(DomainKind::DivisionByZero);
                }
                num / den
            }
            Expr::Pow(a, b) => power(a.eval_raw(p)?, b.eval_raw(p)?)?,
            Expr::Call(f, a) => {
                let x = a.eval_raw(p)?;
                match f {
                    Func::Sqrt if x < 0.0 => return Err(DomainKind::SqrtNegative),
                    Func::Sqrt => x.sqrt(),
                    Func::Exp => x.exp(),
                    Func::Ln if x <= 0.0 => return Err(DomainKind::LogNonPositive),
                    Func::Ln => x.ln(),
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Abs => x.abs(),
                    Func::Sign => sign(x),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(DomainKind::NonFinite)
        }
    }

    /// Exact partial derivative with respect to `x{var}` (one-based).
    pub fn diff(&self, var: usize) -> Expr {
        assert!(var >= 1, "variables are numbered from x1");
        diff::derivative(self, var - 1)
    }

    /// Gradient `[∂e/∂x1, ..., ∂e/∂xn]`.
    pub fn gradient(&self, dim: usize) -> Vec<Expr> {
        (1..=dim).map(|i| self.diff(i)).collect()
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, DomainKind> {
    if base == 0.0 && exponent < 0.0 {
        return Err(DomainKind::ZeroNegativePower);
    }
    if exponent.fract() == 0.0 && exponent.abs() <= i32::MAX as f64 {
        return Ok(base.powi(exponent as i32));
    }
    if base < 0.0 {
        return Err(DomainKind::NegativeBase);
    }
    Ok(base.powf(exponent))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display::write_expr(self, f)
    }
}

/// A vector field `f: R^n → R^n` given componentwise.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<Expr>,
}

impl VectorField {
    pub fn new(components: Vec<Expr>) -> Result<Self, FieldError> {
        if components.is_empty() {
            return Err(FieldError::Empty);
        }
        let dim = components.len();
        for (k, c) in components.iter().enumerate() {
            let var = c.max_var();
            if var > dim {
                return Err(FieldError::VariableOutOfRange {
                    component: k + 1,
                    var,
                    dim,
                });
            }
        }
        Ok(Self { components })
    }

    /// Parses one expression per component; the dimension is the count.
    pub fn parse<S: AsRef<str>>(texts: &[S]) -> Result<Self, FieldError> {
        let dim = texts.len();
        if dim == 0 {
            return Err(FieldError::Empty);
        }
        let components = texts
            .iter()
            .enumerate()
            .map(|(k, t)| {
                parse_expr(t.as_ref(), dim).map_err(|source| FieldError::Parse {
                    component: k + 1,
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(components)
    }

    /// Linear field `x ↦ A x` for a row-major square matrix.
    pub fn linear(a: &crate::linalg::Matrix) -> Self {
        assert!(a.is_square(), "linear field needs a square matrix");
        let n = a.rows();
        let components = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Expr::mul(Expr::Const(a[(i, j)]), Expr::Var(j)))
                    .reduce(Expr::add)
                    .unwrap_or(Expr::Const(0.0))
            })
            .collect();
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Expr {
        &self.components[i]
    }

    pub fn eval(&self, point: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.components.iter().map(|c| c.eval(point)).collect()
    }

    /// Evaluates into a caller-provided buffer.
    pub fn eval_into(&self, point: &[f64], out: &mut [f64]) -> Result<(), EvalError> {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.eval(point)?;
        }
        Ok(())
    }

    /// Componentwise sum, e.g. `f + g·u`.
    pub fn plus(&self, other: &VectorField) -> Result<VectorField, FieldError> {
        if self.dim() != other.dim() {
            return Err(FieldError::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| Expr::add(a.clone(), b.clone()))
            .collect();
        Ok(Self { components })
    }
}

/// Symbolic divergence `Σ_i ∂F_i/∂x_i`.
pub fn divergence(field: &VectorField) -> Expr {
    field
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| c.diff(i + 1))
        .reduce(Expr::add)
        .unwrap_or(Expr::Const(0.0))
}

/// Central-difference divergence estimate with step `h`, used as an
/// independent check of [`divergence`].
pub fn fd_divergence(field: &VectorField, point: &[f64], h: f64) -> Result<f64, EvalError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut probe = point.to_vec();
    let mut total = 0.0;
    for (i, c) in field.components.iter().enumerate() {
        let x = point[i];
        probe[i] = x + h;
        let up = c.eval(&probe)?;
        probe[i] = x - h;
        let down = c.eval(&probe)?;
        probe[i] = x;
        total += (up - down) / (2.0 * h);
    }
    Ok(total)
}
