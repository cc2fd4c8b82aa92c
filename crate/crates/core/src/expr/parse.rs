//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (("+"|"-") term)*
//! term  := unary (("*"|"/") unary)*
//! unary := "-" unary | power
//! power := base ("^" unary)?
//! base  := NUMBER | IDENT | FUNC "(" expr ")" | "(" expr ")"
//! ```
//!
//! Unary minus binds looser than `^`, so `-x1^2` is `-(x1^2)` and
//! `x1^-2` is `x1^(-2)`.

use thiserror::Error;

use super::{Expr, Func};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self {
            offset,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Var(usize),
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() {
            return self.number(start).map(|n| (Tok::Num(n), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            if let Some(f) = Func::from_name(word) {
                return Ok((Tok::Func(f), start));
            }
            return self.variable(word, start).map(|v| (Tok::Var(v), start));
        }
        Err(ParseError::new(
            start,
            format!("unexpected character {:?}", char::from(c)),
        ))
    }

    fn digits(&mut self) -> usize {
        let from = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - from
    }

    fn number(&mut self, start: usize) -> Result<f64, ParseError> {
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            if self.digits() == 0 {
                return Err(ParseError::new(self.pos, "expected digits after '.'"));
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                return Err(ParseError::new(self.pos, "expected exponent digits"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let value: f64 = text
            .parse()
            .map_err(|_| ParseError::new(start, format!("invalid number {text:?}")))?;
        if !value.is_finite() {
            return Err(ParseError::new(start, format!("number {text:?} overflows")));
        }
        Ok(value)
    }

    fn variable(&self, word: &str, start: usize) -> Result<usize, ParseError> {
        let digits = word
            .strip_prefix('x')
            .filter(|d| {
                !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0')
            })
            .ok_or_else(|| ParseError::new(start, format!("unknown identifier {word:?}")))?;
        let index: usize = digits
            .parse()
            .map_err(|_| ParseError::new(start, format!("variable index too large in {word:?}")))?;
        if index > self.dim {
            return Err(ParseError::new(
                start,
                format!("variable {word} out of range for dimension {}", self.dim),
            ));
        }
        Ok(index - 1)
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, at) = self.lexer.next()?;
        self.tok = tok;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == want {
            self.advance()
        } else {
            Err(ParseError::new(self.at, format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.advance()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.advance()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.advance()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Const(v))
            }
            Tok::Var(i) => {
                self.advance()?;
                Ok(Expr::Var(i))
            }
            Tok::Func(f) => {
                self.advance()?;
                self.expect(Tok::LParen, "'(' after function name")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::End => Err(ParseError::new(self.at, "unexpected end of input")),
            _ => Err(ParseError::new(
                self.at,
                "expected a number, variable, function or '('",
            )),
        }
    }
}

/// Parses `text` into an expression over `x1..x{dim}`.
///
/// The tree is kept exactly as written (no simplification) so printing and
/// reparsing is faithful.
pub fn parse_expr(text: &str, dim: usize) -> Result<Expr, ParseError> {
    if dim == 0 {
        return Err(ParseError::new(0, "dimension must be at least 1"));
    }
    let mut parser = Parser {
        lexer: Lexer {
            src: text.as_bytes(),
            pos: 0,
            dim,
        },
        tok: Tok::End,
        at: 0,
    };
    parser.advance()?;
    let e = parser.expr()?;
    if parser.tok != Tok::End {
        return Err(ParseError::new(parser.at, "unexpected trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        assert_eq!(parse_expr("x2", 2).unwrap(), Expr::Var(1));
    }

    #[test]
    fn example_field_component() {
        let e = parse_expr("-x1 - x1^2*x2 - x2^3 + 0*x1", 2).unwrap();
        assert_eq!(e.eval(&[1.0, 1.0]).unwrap(), -3.0);
    }

    #[test]
    fn unbalanced_parenthesis_offset() {
        let err = parse_expr("x1^(2", 2).unwrap_err();
        assert_eq!(err.offset, 5);
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse_expr("x1 + x3", 2).unwrap_err();
        assert_eq!(err.offset, 5);
        assert!(err.message.contains("out of range"));
    }

    #[test]
    fn bad_identifiers() {
        assert_eq!(parse_expr("x0", 2).unwrap_err().offset, 0);
        assert_eq!(parse_expr("1 + y", 2).unwrap_err().offset, 4);
        assert_eq!(parse_expr("x01", 2).unwrap_err().offset, 0);
        assert_eq!(parse_expr("tan(x1)", 2).unwrap_err().offset, 0);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(parse_expr("-x1^2", 1).unwrap().eval(&[3.0]).unwrap(), -9.0);
        assert_eq!(parse_expr("x1^-2", 1).unwrap().eval(&[2.0]).unwrap(), 0.25);
        assert_eq!(parse_expr("2*-x1", 1).unwrap().eval(&[2.0]).unwrap(), -4.0);
    }

    #[test]
    fn numbers() {
        let e = parse_expr("1.5e2 + 2E-1 + 3", 1).unwrap();
        assert_eq!(e.eval(&[0.0]).unwrap(), 153.2);
        assert!(parse_expr("1.", 1).is_err());
        assert!(parse_expr("1e", 1).is_err());
        assert!(parse_expr("1e999", 1).is_err());
    }

    #[test]
    fn functions_and_whitespace() {
        let e = parse_expr("  sqrt( x1 ) * exp(0) + ln(x2)\t- abs(-2)", 2).unwrap();
        assert!((e.eval(&[4.0, 1.0]).unwrap() - 0.0).abs() < 1e-15);
        assert_eq!(parse_expr("sqrt x1", 1).unwrap_err().offset, 5);
    }

    #[test]
    fn trailing_and_empty_input() {
        assert_eq!(parse_expr("x1 x1", 1).unwrap_err().offset, 3);
        assert_eq!(parse_expr("", 1).unwrap_err().offset, 0);
        assert_eq!(parse_expr("x1 +", 1).unwrap_err().offset, 4);
        assert!(parse_expr("x1", 0).is_err());
    }

    #[test]
    fn left_associative_subtraction_and_division() {
        assert_eq!(
            parse_expr("8 - 4 - 2", 1).unwrap().eval(&[0.0]).unwrap(),
            2.0
        );
        assert_eq!(
            parse_expr("8 / 4 / 2", 1).unwrap().eval(&[0.0]).unwrap(),
            1.0
        );
    }
}
