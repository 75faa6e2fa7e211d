use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, Tok, Token};
use super::{NotationError, SourceSpan};
use crate::catalog::{Constraint, Domain, Expr, Identity, Pin};
use crate::series::{Entry, FWEntry, ParamExpr, Rational, SeriesSpec};

const RESERVED: &[&str] = &["F", "Psi", "gamma", "poch", "sum"];

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// `None` accepts any symbol name.
    declared: Option<BTreeSet<String>>,
    scopes: Vec<String>,
}

impl Parser {
    pub fn new(src: &str, declared: Option<BTreeSet<String>>) -> Result<Self, NotationError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            declared,
            scopes: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&str]) -> NotationError {
        NotationError::parse(
            self.span(),
            &format!("unexpected {}", self.peek().describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, NotationError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[&format!("`{}`", tok.symbol())]))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), NotationError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => Err(self.unexpected(&[&format!("`{kw}`")])),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), NotationError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let t = self.bump();
                Ok((s, t.span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn fresh_name(&mut self) -> Result<String, NotationError> {
        let (name, span) = self.ident()?;
        if RESERVED.contains(&name.as_str()) {
            return Err(NotationError::semantic(span, &format!("`{name}` is reserved")));
        }
        Ok(name)
    }

    pub fn expect_eof(&mut self) -> Result<(), NotationError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    fn check_symbol(&self, name: &str, span: SourceSpan) -> Result<(), NotationError> {
        let known = self.scopes.iter().any(|s| s == name)
            || self.declared.as_ref().is_none_or(|d| d.contains(name));
        if known {
            Ok(())
        } else {
            Err(NotationError::semantic(span, &format!("undeclared symbol `{name}`")))
        }
    }

    pub fn identity(&mut self) -> Result<Identity, NotationError> {
        self.expect_keyword("identity")?;
        let name = match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                s
            }
            _ => return Err(self.unexpected(&["string"])),
        };
        self.expect(Tok::LBrace)?;

        let mut provenance = String::new();
        if self.at_keyword("source") {
            self.bump();
            self.expect(Tok::Colon)?;
            provenance = match self.peek().clone() {
                Tok::Str(s) => {
                    self.bump();
                    s
                }
                _ => return Err(self.unexpected(&["string"])),
            };
            self.expect(Tok::Semi)?;
        }

        self.expect_keyword("params")?;
        self.expect(Tok::Colon)?;
        let mut symbols = BTreeMap::new();
        loop {
            let (sym, span) = self.ident()?;
            if RESERVED.contains(&sym.as_str()) {
                return Err(NotationError::semantic(span, &format!("`{sym}` is reserved")));
            }
            self.expect_keyword("in")?;
            let domain = match self.peek() {
                Tok::Ident(d) if d == "C" => Domain::Complex,
                Tok::Ident(d) if d == "N" => Domain::NonnegInt,
                _ => return Err(self.unexpected(&["`C`", "`N`"])),
            };
            self.bump();
            if symbols.insert(sym.clone(), domain).is_some() {
                return Err(NotationError::semantic(span, &format!("`{sym}` declared twice")));
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::Semi)?;
        self.declared = Some(symbols.keys().cloned().collect());

        let mut pins = Vec::new();
        if self.at_keyword("pin") {
            self.bump();
            self.expect(Tok::Colon)?;
            loop {
                let (sym, span) = self.ident()?;
                self.check_symbol(&sym, span)?;
                self.expect(Tok::Eq)?;
                let value = self.affine()?;
                pins.push(Pin { symbol: sym, value });
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
        }

        let mut constraints = Vec::new();
        if self.at_keyword("constraints") {
            self.bump();
            self.expect(Tok::Colon)?;
            loop {
                constraints.push(self.constraint()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Semi)?;
        }

        self.expect_keyword("lhs")?;
        self.expect(Tok::Colon)?;
        let lhs = self.expr()?;
        self.expect(Tok::Semi)?;
        self.expect_keyword("rhs")?;
        self.expect(Tok::Colon)?;
        let rhs = self.expr()?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::RBrace)?;
        self.expect_eof()?;
        Ok(Identity {
            name,
            provenance,
            symbols,
            pins,
            constraints,
            lhs,
            rhs,
        })
    }

    fn constraint(&mut self) -> Result<Constraint, NotationError> {
        if self.at_keyword("nonzero") && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let e = self.expr()?;
            self.expect(Tok::RParen)?;
            return Ok(Constraint::NonZero(e));
        }
        if self.at_keyword("re") && *self.peek_at(1) == Tok::LParen {
            self.bump();
            self.bump();
            let p = self.affine()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Gt)?;
            match self.peek() {
                Tok::Number(r) if *r == Rational::from_integer(0) => {
                    self.bump();
                }
                _ => return Err(self.unexpected(&["`0`"])),
            }
            return Ok(Constraint::RePositive(p));
        }
        let (sym, span) = match self.peek() {
            Tok::Ident(_) => self.ident()?,
            _ => return Err(self.unexpected(&["`nonzero`", "`re`", "identifier"])),
        };
        self.check_symbol(&sym, span)?;
        self.expect(Tok::Le)?;
        let bound = self.integer()?;
        Ok(Constraint::AtMost { symbol: sym, bound })
    }

    fn integer(&mut self) -> Result<i64, NotationError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Number(r) if r.is_integer() => {
                self.bump();
                Ok(if neg { -r.to_integer() } else { r.to_integer() })
            }
            _ => Err(self.unexpected(&["integer"])),
        }
    }

    pub fn expr(&mut self) -> Result<Expr, NotationError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, NotationError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, NotationError> {
        if *self.peek() == Tok::Minus {
            // a negative literal folds into a constant unless it is a power base
            if let Tok::Number(r) = *self.peek_at(1) {
                if *self.peek_at(2) != Tok::Caret {
                    self.bump();
                    self.bump();
                    return Ok(Expr::Const(-r));
                }
            }
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, NotationError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp_span = self.span();
        let exponent = self.atom()?;
        let exponent = to_affine(&exponent).ok_or_else(|| {
            NotationError::semantic(exp_span, "exponent must be an affine expression")
        })?;
        if base == Expr::Const(Rational::from_integer(-1)) {
            return Ok(Expr::NegOnePow(exponent));
        }
        Ok(Expr::Pow(Box::new(base), exponent))
    }

    pub fn affine(&mut self) -> Result<ParamExpr, NotationError> {
        let span = self.span();
        let e = self.expr()?;
        to_affine(&e).ok_or_else(|| NotationError::semantic(span, "expression is not affine in the symbols"))
    }

    fn atom(&mut self) -> Result<Expr, NotationError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(r) => {
                self.bump();
                Ok(Expr::Const(r))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "gamma" if *self.peek_at(1) == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let p = self.affine()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Gamma(p))
                }
                "poch" if *self.peek_at(1) == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let x = self.affine()?;
                    self.expect(Tok::Comma)?;
                    let n = self.affine()?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Poch(x, n))
                }
                "sum" if *self.peek_at(1) == Tok::LParen => {
                    self.bump();
                    self.bump();
                    let var = self.fresh_name()?;
                    self.expect(Tok::Comma)?;
                    match self.peek() {
                        Tok::Number(r) if *r == Rational::from_integer(0) => {
                            self.bump();
                        }
                        _ => return Err(self.unexpected(&["`0`"])),
                    }
                    self.expect(Tok::Comma)?;
                    let upper = self.affine()?;
                    self.expect(Tok::Comma)?;
                    self.scopes.push(var.clone());
                    let body = self.expr();
                    self.scopes.pop();
                    let body = body?;
                    self.expect(Tok::RParen)?;
                    Ok(Expr::Sum {
                        var,
                        upper,
                        body: Box::new(body),
                    })
                }
                "F" if *self.peek_at(1) == Tok::LBracket => self.series(false),
                "Psi" if *self.peek_at(1) == Tok::LBracket => self.series(true),
                _ if RESERVED.contains(&name.as_str()) => Err(NotationError::parse(
                    span,
                    &format!("`{name}` must be followed by its argument list"),
                    vec![if name == "F" || name == "Psi" { "`[`" } else { "`(`" }.into()],
                )),
                _ => {
                    self.bump();
                    self.check_symbol(&name, span)?;
                    Ok(Expr::Sym(name))
                }
            },
            _ => Err(self.unexpected(&["number", "identifier", "`(`", "`gamma`", "`poch`", "`sum`", "`F`", "`Psi`"])),
        }
    }

    fn series(&mut self, fox_wright: bool) -> Result<Expr, NotationError> {
        self.bump();
        self.expect(Tok::LBracket)?;
        let numerator = self.entry_list(fox_wright, Tok::Bar)?;
        self.expect(Tok::Bar)?;
        let denominator = self.entry_list(fox_wright, Tok::RBracket)?;
        self.expect(Tok::RBracket)?;
        self.expect(Tok::LParen)?;
        let argument = self.affine()?;
        self.expect(Tok::RParen)?;
        Ok(Expr::Series(if fox_wright {
            SeriesSpec::fox_wright(numerator, denominator, argument)
        } else {
            SeriesSpec::pfq(numerator, denominator, argument)
        }))
    }

    fn entry_list(&mut self, fox_wright: bool, end: Tok) -> Result<Vec<Entry>, NotationError> {
        let mut out = Vec::new();
        if *self.peek() == end {
            return Ok(out);
        }
        loop {
            if *self.peek() == Tok::LBrace {
                out.push(self.family(fox_wright)?);
            } else if fox_wright {
                out.extend(self.fw_group()?.into_iter().map(Entry::Single));
            } else {
                out.push(Entry::Single(FWEntry::plain(self.affine()?)));
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    /// `(x1, ..., xr; coeff)`
    fn fw_group(&mut self) -> Result<Vec<FWEntry>, NotationError> {
        self.expect(Tok::LParen)?;
        let mut offsets = vec![self.affine()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            offsets.push(self.affine()?);
        }
        if *self.peek() != Tok::Semi {
            return Err(self.unexpected(&["`,`", "`;`"]));
        }
        self.bump();
        let coeff = self.affine()?;
        self.expect(Tok::RParen)?;
        Ok(offsets.into_iter().map(|o| FWEntry::new(o, coeff.clone())).collect())
    }

    /// `{body : i = lo .. hi}`
    fn family(&mut self, fox_wright: bool) -> Result<Entry, NotationError> {
        self.expect(Tok::LBrace)?;
        // the body refers to the family variable, which is declared after it;
        // scan ahead for `: name =` to open the scope first
        let var = self.lookahead_family_var()?;
        self.scopes.push(var.clone());
        let entry = if fox_wright {
            self.expect(Tok::LParen)?;
            self.affine().and_then(|o| {
                self.expect(Tok::Semi)?;
                let c = self.affine()?;
                self.expect(Tok::RParen)?;
                Ok(FWEntry::new(o, c))
            })
        } else {
            self.affine().map(FWEntry::plain)
        };
        self.scopes.pop();
        let entry = entry?;
        self.expect(Tok::Colon)?;
        let _ = self.fresh_name()?;
        self.expect(Tok::Eq)?;
        let lower = self.affine()?;
        self.expect(Tok::DotDot)?;
        let upper = self.affine()?;
        self.expect(Tok::RBrace)?;
        Ok(Entry::Family {
            var,
            lower,
            upper,
            entry,
        })
    }

    fn lookahead_family_var(&self) -> Result<String, NotationError> {
        let mut depth = 0usize;
        let mut i = self.pos;
        while i + 2 < self.toks.len() {
            match &self.toks[i].tok {
                Tok::LParen | Tok::LBracket | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBracket => depth = depth.saturating_sub(1),
                Tok::RBrace | Tok::Eof => break,
                Tok::Colon if depth == 0 => {
                    if let (Tok::Ident(name), Tok::Eq) = (&self.toks[i + 1].tok, &self.toks[i + 2].tok) {
                        return Ok(name.clone());
                    }
                    break;
                }
                _ => {}
            }
            i += 1;
        }
        Err(NotationError::parse(
            self.span(),
            "family needs `: name = lower .. upper`",
            vec!["`:`".into()],
        ))
    }
}

/// Converts an arithmetic tree to an affine expression, if it is one.
pub fn to_affine(e: &Expr) -> Option<ParamExpr> {
    Some(match e {
        Expr::Const(r) => ParamExpr::constant(*r),
        Expr::Sym(s) => ParamExpr::symbol(s),
        Expr::Neg(x) => to_affine(x)?.neg(),
        Expr::Add(x, y) => to_affine(x)?.add(&to_affine(y)?),
        Expr::Sub(x, y) => to_affine(x)?.sub(&to_affine(y)?),
        Expr::Mul(x, y) => {
            let (x, y) = (to_affine(x)?, to_affine(y)?);
            match (x.as_constant(), y.as_constant()) {
                (Some(c), _) => y.scale(c),
                (_, Some(c)) => x.scale(c),
                _ => return None,
            }
        }
        Expr::Div(x, y) => {
            let c = to_affine(y)?.as_constant()?;
            if c == Rational::from_integer(0) {
                return None;
            }
            to_affine(x)?.scale(c.recip())
        }
        _ => return None,
    })
}
