//! Text format for identities (`.fwid` files).
//!
//! ```text
//! identity "whipple-terminating" {
//!   source: "Whipple 3F2 summation, terminating case";
//!   params: b in C, c in C, n in N;
//!   lhs: F[-n, 1 + n, b | c, 1 + 2*b - c](1);
//!   rhs: poch(-1/2*n + 1/2*c, n) * ... ;
//! }
//! ```
//!
//! Parameters of `gamma`, `poch`, exponents and series entries must be affine
//! in the declared symbols. Fox-Wright entries are written `(offset; coeff)`
//! and may be grouped as `(x1, x2; coeff)`; parameter families are written
//! `{entry : i = lo .. hi}`. `λ` is read as `l`.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::catalog::{Constraint, Expr, Identity};
use crate::series::ParamExpr;

pub use parser::to_affine;

/// Byte range plus 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NotationError {
    #[error("parse error at {span}: {message}{}", fmt_expected(.expected))]
    Parse {
        span: SourceSpan,
        message: String,
        expected: Vec<String>,
    },
    #[error("semantic error at {span}: {message}")]
    Semantic { span: SourceSpan, message: String },
}

fn fmt_expected(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

impl NotationError {
    pub(crate) fn parse(span: SourceSpan, message: &str, expected: Vec<String>) -> Self {
        NotationError::Parse {
            span,
            message: message.to_string(),
            expected,
        }
    }

    pub(crate) fn semantic(span: SourceSpan, message: &str) -> Self {
        NotationError::Semantic {
            span,
            message: message.to_string(),
        }
    }

    pub fn span(&self) -> SourceSpan {
        match self {
            NotationError::Parse { span, .. } | NotationError::Semantic { span, .. } => *span,
        }
    }
}

pub fn parse_identity(text: &str) -> Result<Identity, NotationError> {
    parser::Parser::new(text, None)?.identity()
}

/// Parses an expression; any symbol name is accepted.
pub fn parse_expr(text: &str) -> Result<Expr, NotationError> {
    let mut p = parser::Parser::new(text, None)?;
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_affine(text: &str) -> Result<ParamExpr, NotationError> {
    let mut p = parser::Parser::new(text, None)?;
    let e = p.affine()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn print_identity(id: &Identity) -> String {
    printer::identity(id)
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    printer::expr(e, &mut s);
    s
}

pub fn print_constraint(c: &Constraint) -> String {
    printer::constraint(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{list_identities, Side};
    use crate::series::{Binding, Entry, SeriesKind};

    #[test]
    fn poch0_identity() {
        let id = parse_identity(r#"identity "poch0" { params: x in C; lhs: poch(x,0); rhs: 1; }"#).unwrap();
        let b = Binding::new().with_real("x", 0.7);
        let l = id.eval_side(Side::Lhs, &b).unwrap();
        let r = id.eval_side(Side::Rhs, &b).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn grouped_fox_wright_entries_expand() {
        let e = parse_expr("Psi[(1,3/2;1) | (1+n;-1)](-1)").unwrap();
        let Expr::Series(spec) = e else { panic!() };
        assert_eq!(spec.kind, SeriesKind::FoxWright);
        assert_eq!(spec.numerator.len(), 2);
        assert_eq!(spec.denominator.len(), 1);
        let Entry::Single(d) = &spec.denominator[0] else { panic!() };
        assert_eq!(d.coeff, "-1".parse().unwrap());
        assert_eq!(
            print_expr(&Expr::Series(spec)),
            "Psi[(1, 3/2; 1) | (1 + n; -1)](-1)"
        );
    }

    #[test]
    fn three_factor_product() {
        let e = parse_expr("(-1)^n * 4^(2*a-l) * poch(1+2*a-l, n)").unwrap();
        let Expr::Mul(left, right) = e else { panic!() };
        assert!(matches!(*right, Expr::Poch(..)));
        let Expr::Mul(a, b) = *left else { panic!() };
        assert!(matches!(*a, Expr::NegOnePow(_)));
        assert!(matches!(*b, Expr::Pow(..)));
    }

    #[test]
    fn sum_node() {
        let e = parse_expr("sum(i, 0, m, poch(-m, i) / poch(1, i))").unwrap();
        assert!(matches!(e, Expr::Sum { .. }));
    }

    #[test]
    fn malformed_poch_points_at_paren() {
        let err = parse_expr("poch(x,)").unwrap_err();
        let NotationError::Parse { span, expected, .. } = &err else { panic!("{err:?}") };
        assert_eq!(span.column, 8);
        assert_eq!(span.start, 7);
        assert!(!expected.is_empty());
    }

    #[test]
    fn semantic_errors() {
        let undeclared = parse_identity(r#"identity "x" { params: a in C; lhs: b; rhs: 1; }"#).unwrap_err();
        assert!(matches!(undeclared, NotationError::Semantic { .. }));
        assert_eq!(undeclared.span().column, 37);
        let nonaffine = parse_identity(r#"identity "x" { params: a in C; lhs: gamma(a*a); rhs: 1; }"#).unwrap_err();
        assert!(matches!(nonaffine, NotationError::Semantic { .. }));
    }

    #[test]
    fn lambda_alias_and_canonical_order() {
        let e = parse_affine("λ + 2*a - 1/2").unwrap();
        assert_eq!(e.to_string(), "-1/2 + 2*a + l");
        assert_eq!(parse_affine("6/4").unwrap().to_string(), "3/2");
    }

    #[test]
    fn signs_round_trip() {
        for src in [
            "-(2)",
            "(-2)",
            "-2^(a)",
            "(-2)^(a)",
            "a - -b",
            "-(-a)",
            "-(a * b)",
            "a / (b * c)",
            "(a - b) - (c + 1)",
            "-(-1)^(n)",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = print_expr(&e);
            assert_eq!(parse_expr(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn minus_one_power_is_the_sign_node() {
        let e = crate::catalog::pow(crate::catalog::int(-1), parse_affine("n").unwrap());
        assert!(matches!(e, Expr::NegOnePow(_)));
        assert_eq!(parse_expr(&print_expr(&e)).unwrap(), e);
    }

    #[test]
    fn registry_round_trips() {
        for id in list_identities() {
            let text = print_identity(id);
            let back = parse_identity(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", id.name));
            assert_eq!(&back, id, "{}", id.name);
            assert_eq!(print_identity(&back), text);
        }
    }
}
