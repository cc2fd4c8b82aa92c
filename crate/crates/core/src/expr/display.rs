use std::fmt;

use super::Expr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => SUM,
        Expr::Mul(..) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Const(c) if c.is_sign_negative() => UNARY,
        Expr::Pow(..) => POWER,
        Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => ATOM,
    }
}

fn leading_minus(e: &Expr) -> bool {
    matches!(e, Expr::Neg(_)) || matches!(e, Expr::Const(c) if c.is_sign_negative())
}

fn child(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        write_expr(e, f)
    }
}

/// Operand printed after an operator; a leading minus gets parentheses so
/// the output never shows `--` or `+ -`.
fn operand(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if leading_minus(e) {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    } else {
        child(e, min, f)
    }
}

/// Prints with the minimal parentheses the parser needs to rebuild an
/// evaluation-identical tree.
pub(super) fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Const(c) => {
            if c.is_sign_negative() {
                write!(f, "-{}", -c)
            } else {
                write!(f, "{c}")
            }
        }
        Expr::Var(i) => write!(f, "x{}", i + 1),
        Expr::Neg(a) => {
            write!(f, "-")?;
            operand(a, UNARY, f)
        }
        Expr::Add(a, b) => {
            child(a, SUM, f)?;
            write!(f, " + ")?;
            operand(b, SUM + 1, f)
        }
        Expr::Sub(a, b) => {
            child(a, SUM, f)?;
            write!(f, " - ")?;
            operand(b, SUM + 1, f)
        }
        Expr::Mul(a, b) => {
            child(a, PRODUCT, f)?;
            write!(f, "*")?;
            operand(b, PRODUCT + 1, f)
        }
        Expr::Div(a, b) => {
            child(a, PRODUCT, f)?;
            write!(f, "/")?;
            operand(b, PRODUCT + 1, f)
        }
        Expr::Pow(a, b) => {
            child(a, ATOM, f)?;
            write!(f, "^")?;
            child(b, UNARY, f)
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}
