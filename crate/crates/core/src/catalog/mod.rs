//! Closed-form expression trees and the identity registry.

mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_traits::Zero;
use thiserror::Error;

use crate::extended::{self, dd, Xv};
use crate::numerics::{distance_to_poles, pochhammer_log, NumericsError, SignedLogValue};
use crate::series::{
    self, eval_series_log, termination_index, BindingError, Binding, ParamExpr, Rational, SeriesError,
    SeriesKind, SeriesSpec, Value,
};

pub use registry::build_registry;

/// Number of identities in the registry.
pub const REGISTRY_SIZE: usize = 26;

/// Terms inspected when screening a nonterminating series for nearby poles.
const NONTERMINATING_SCREEN_TERMS: u64 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Binding(#[from] BindingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("division by zero")]
    DivisionByZero,
    #[error("zero raised to exponent {0}")]
    ZeroPower(String),
    #[error("exponent of (-1) must be an integer, got {0}")]
    NonIntegerSign(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Expression tree for both sides of an identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Rational),
    Sym(String),
    Gamma(ParamExpr),
    Poch(ParamExpr, ParamExpr),
    Pow(Box<Expr>, ParamExpr),
    NegOnePow(ParamExpr),
    /// `Σ_{var=0}^{upper} body`
    Sum {
        var: String,
        upper: ParamExpr,
        body: Box<Expr>,
    },
    Series(SeriesSpec),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

pub fn int(c: i64) -> Expr {
    Expr::Const(Rational::from_integer(c))
}

pub fn rat(p: i64, q: i64) -> Expr {
    Expr::Const(Rational::new(p, q))
}

pub fn sym(name: &str) -> Expr {
    Expr::Sym(name.to_string())
}

pub fn gamma_of(arg: ParamExpr) -> Expr {
    Expr::Gamma(arg)
}

pub fn poch(x: ParamExpr, n: ParamExpr) -> Expr {
    Expr::Poch(x, n)
}

/// `base^exponent`; a base of `-1` gives the integer-sign node, which is how
/// the notation reads `(-1)^(..)`.
pub fn pow(base: Expr, exponent: ParamExpr) -> Expr {
    if base == Expr::Const(Rational::from_integer(-1)) {
        return Expr::NegOnePow(exponent);
    }
    Expr::Pow(Box::new(base), exponent)
}

pub fn neg_one_pow(exponent: ParamExpr) -> Expr {
    Expr::NegOnePow(exponent)
}

pub fn sum(var: &str, upper: ParamExpr, body: Expr) -> Expr {
    Expr::Sum {
        var: var.to_string(),
        upper,
        body: Box::new(body),
    }
}

pub fn series(spec: SeriesSpec) -> Expr {
    Expr::Series(spec)
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::Div(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Tolerance used for nonterminating series tails inside expressions.
pub const SERIES_TOL: f64 = series::DEFAULT_TAIL_TOL;

impl Expr {
    pub fn eval(&self, b: &Binding) -> Result<SignedLogValue, EvalError> {
        Ok(match self {
            Expr::Const(r) => SignedLogValue::from_real(series::rational_to_f64(*r)),
            Expr::Sym(name) => SignedLogValue::from_complex(
                b.complex(name)
                    .ok_or_else(|| BindingError::Unbound(name.clone()))?,
            ),
            Expr::Gamma(p) => SignedLogValue::from_log(crate::numerics::log_gamma(p.eval(b)?)?),
            Expr::Poch(x, n) => pochhammer_log(x.eval(b)?, n.eval_index(b)?),
            Expr::Pow(base, e) => {
                let base = base.eval(b)?;
                let e = e.eval(b)?;
                if e == Complex64::zero() {
                    SignedLogValue::ONE
                } else {
                    base.powc(e).ok_or_else(|| EvalError::ZeroPower(e.to_string()))?
                }
            }
            Expr::NegOnePow(e) => {
                let r = e.eval_exact(b).filter(|r| r.is_integer()).ok_or_else(|| {
                    EvalError::NonIntegerSign(e.to_string())
                })?;
                if r.to_integer() % 2 == 0 {
                    SignedLogValue::ONE
                } else {
                    SignedLogValue::ONE.neg()
                }
            }
            Expr::Sum { var, upper, body } => {
                let hi = upper.eval_index(b)?;
                let mut inner = b.clone();
                let mut terms = Vec::with_capacity(hi as usize + 1);
                for i in 0..=hi {
                    inner.set_int(var, i as i64);
                    terms.push(body.eval(&inner)?);
                }
                crate::numerics::sum_scaled(&terms)
            }
            Expr::Series(spec) => eval_series_log(spec, b, SERIES_TOL)?,
            Expr::Neg(x) => x.eval(b)?.neg(),
            Expr::Add(x, y) => x.eval(b)?.add(y.eval(b)?),
            Expr::Sub(x, y) => x.eval(b)?.sub(y.eval(b)?),
            Expr::Mul(x, y) => x.eval(b)?.mul(y.eval(b)?),
            Expr::Div(x, y) => x
                .eval(b)?
                .checked_div(y.eval(b)?)
                .ok_or(EvalError::DivisionByZero)?,
        })
    }

    /// Double-double evaluation, so sums and differences of nearly equal
    /// series keep their low-order digits. Call only after [`Expr::eval`]
    /// has succeeded on the same binding; poles are not re-checked.
    pub(crate) fn eval_x(&self, b: &Binding) -> Result<Xv, EvalError> {
        Ok(match self {
            Expr::Const(r) => Xv::new(extended::real(1.0) * extended::div(dd(*r.numer() as f64), dd(*r.denom() as f64))),
            Expr::Sym(name) => Xv::new(extended::up(
                b.complex(name)
                    .ok_or_else(|| BindingError::Unbound(name.clone()))?,
            )),
            Expr::Gamma(p) => Xv::from_log(extended::ln_gamma(p.eval_dd(b)?)),
            Expr::Poch(x, n) => {
                let x = x.eval_dd(b)?;
                let mut acc = Xv::one();
                for j in 0..n.eval_index(b)? {
                    acc = acc.mul(Xv::new(x + extended::real(j as f64)));
                }
                acc
            }
            Expr::Pow(base, e) => {
                let e = e.eval_dd(b)?;
                if e == extended::real(0.0) {
                    Xv::one()
                } else {
                    let l = base.eval_x(b)?.ln().ok_or_else(|| EvalError::ZeroPower(extended::down(e).to_string()))?;
                    Xv::from_log(l * e)
                }
            }
            Expr::NegOnePow(_) => {
                if self.eval(b)?.to_complex().re < 0.0 {
                    Xv::one().neg()
                } else {
                    Xv::one()
                }
            }
            Expr::Sum { var, upper, body } => {
                let hi = upper.eval_index(b)?;
                let mut inner = b.clone();
                let mut acc = Xv::zero();
                for i in 0..=hi {
                    inner.set_int(var, i as i64);
                    acc = acc.add(body.eval_x(&inner)?);
                }
                acc
            }
            Expr::Series(spec) => series::eval_series_x(spec, b, SERIES_TOL)?,
            Expr::Neg(x) => x.eval_x(b)?.neg(),
            Expr::Add(x, y) => x.eval_x(b)?.add(y.eval_x(b)?),
            Expr::Sub(x, y) => x.eval_x(b)?.sub(y.eval_x(b)?),
            Expr::Mul(x, y) => x.eval_x(b)?.mul(y.eval_x(b)?),
            Expr::Div(x, y) => x.eval_x(b)?.div(y.eval_x(b)?).ok_or(EvalError::DivisionByZero)?,
        })
    }

    /// Symbols referenced by the expression, excluding sum and family indices.
    pub fn free_symbols(&self, out: &mut std::collections::BTreeSet<String>) {
        fn affine(p: &ParamExpr, bound: &[&str], out: &mut std::collections::BTreeSet<String>) {
            out.extend(p.symbols().filter(|s| !bound.contains(s)).map(str::to_string));
        }
        match self {
            Expr::Const(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Gamma(p) | Expr::NegOnePow(p) => affine(p, &[], out),
            Expr::Poch(x, n) => {
                affine(x, &[], out);
                affine(n, &[], out);
            }
            Expr::Pow(base, e) => {
                base.free_symbols(out);
                affine(e, &[], out);
            }
            Expr::Sum { var, upper, body } => {
                affine(upper, &[], out);
                let mut inner = std::collections::BTreeSet::new();
                body.free_symbols(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Expr::Series(spec) => {
                affine(&spec.argument, &[], out);
                for e in spec.numerator.iter().chain(&spec.denominator) {
                    match e {
                        series::Entry::Single(f) => {
                            affine(&f.offset, &[], out);
                            affine(&f.coeff, &[], out);
                        }
                        series::Entry::Family { var, lower, upper, entry } => {
                            affine(lower, &[], out);
                            affine(upper, &[], out);
                            affine(&entry.offset, &[var], out);
                            affine(&entry.coeff, &[var], out);
                        }
                    }
                }
            }
            Expr::Neg(x) => x.free_symbols(out),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.free_symbols(out);
                y.free_symbols(out);
            }
        }
    }

    /// Expressions built only from constants, symbols and + − × (no special
    /// functions); these are the factors screened for near-zero values.
    fn is_polynomial(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Sym(_) => true,
            Expr::Neg(x) => x.is_polynomial(),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) => x.is_polynomial() && y.is_polynomial(),
            _ => false,
        }
    }

    fn multiplicative_factors<'a>(&'a self, out: &mut Vec<&'a Expr>) {
        match self {
            Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.multiplicative_factors(out);
                y.multiplicative_factors(out);
            }
            Expr::Neg(x) => x.multiplicative_factors(out),
            other => out.push(other),
        }
    }

    /// Calls `visit` with every gamma/Pochhammer argument that is not fixed
    /// by integer structure, and with every polynomial denominator factor.
    pub fn screen(&self, b: &Binding, visit: &mut dyn FnMut(Screened) -> bool) -> Result<bool, EvalError> {
        match self {
            Expr::Const(_) | Expr::Sym(_) | Expr::NegOnePow(_) => Ok(true),
            Expr::Gamma(p) => {
                if p.eval_exact(b).is_some() {
                    return Ok(true);
                }
                Ok(visit(Screened::Argument(p.eval(b)?)))
            }
            Expr::Poch(x, n) => {
                if x.eval_exact(b).is_some() {
                    return Ok(true);
                }
                let x = x.eval(b)?;
                for j in 0..n.eval_index(b)? {
                    if !visit(Screened::Argument(x + j as f64)) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Expr::Pow(base, _) => base.screen(b, visit),
            Expr::Sum { var, upper, body } => {
                let mut inner = b.clone();
                for i in 0..=upper.eval_index(b)? {
                    inner.set_int(var, i as i64);
                    if !body.screen(&inner, visit)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Expr::Series(spec) => screen_series(spec, b, visit),
            Expr::Neg(x) => x.screen(b, visit),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) => {
                Ok(x.screen(b, visit)? && y.screen(b, visit)?)
            }
            Expr::Div(x, y) => {
                if !(x.screen(b, visit)? && y.screen(b, visit)?) {
                    return Ok(false);
                }
                let mut factors = Vec::new();
                y.multiplicative_factors(&mut factors);
                for f in factors.into_iter().filter(|f| f.is_polynomial()) {
                    if !visit(Screened::Denominator(f.eval(b)?.abs())) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

/// Item reported by [`Expr::screen`].
#[derive(Debug, Clone, Copy)]
pub enum Screened {
    /// A gamma or Pochhammer argument; should stay away from poles.
    Argument(Complex64),
    /// Magnitude of a polynomial factor in a denominator.
    Denominator(f64),
}

fn screen_series(spec: &SeriesSpec, b: &Binding, visit: &mut dyn FnMut(Screened) -> bool) -> Result<bool, EvalError> {
    let (num, den) = spec.expand(b)?;
    let k_max = termination_index(spec, b)?.unwrap_or(NONTERMINATING_SCREEN_TERMS);
    for e in num.iter().chain(den.iter()) {
        match spec.kind {
            SeriesKind::FoxWright => {
                for k in 0..=k_max {
                    let a = series::ArgValue::at(e, k, b)?;
                    if a.exact.is_none() && !visit(Screened::Argument(a.value)) {
                        return Ok(false);
                    }
                }
            }
            SeriesKind::Pfq => {
                let a = series::ArgValue::at(e, 0, b)?;
                if a.exact.is_some() {
                    continue;
                }
                for j in 0..k_max {
                    if !visit(Screened::Argument(a.value + j as f64)) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Complex,
    NonnegInt,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Constraint {
    NonZero(Expr),
    AtMost { symbol: String, bound: i64 },
    /// Real-part condition; recorded and checkable but not enforced.
    RePositive(ParamExpr),
}

impl Constraint {
    pub fn is_advisory(&self) -> bool {
        matches!(self, Constraint::RePositive(_))
    }

    /// `eps` is the smallest magnitude accepted by `NonZero`.
    pub fn holds(&self, b: &Binding, eps: f64) -> Result<bool, EvalError> {
        Ok(match self {
            Constraint::NonZero(e) => {
                let v = e.eval(b)?;
                !v.is_zero() && v.abs() > eps
            }
            Constraint::AtMost { symbol, bound } => match b.get(symbol) {
                Some(Value::Int(i)) => i <= *bound,
                Some(Value::Complex(_)) => false,
                None => return Err(BindingError::Unbound(symbol.clone()).into()),
            },
            Constraint::RePositive(p) => p.eval(b)?.re > 0.0,
        })
    }
}

/// A sampling directive: `symbol` is set to `value` instead of being drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct Pin {
    pub symbol: String,
    pub value: ParamExpr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lhs,
    Rhs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Identity {
    pub name: String,
    pub provenance: String,
    pub symbols: BTreeMap<String, Domain>,
    pub pins: Vec<Pin>,
    pub constraints: Vec<Constraint>,
    pub lhs: Expr,
    pub rhs: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckRecord {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub pass: bool,
}

/// `|l − r| / max(1, |l|, |r|)`, computed without overflow.
pub fn relative_error(l: SignedLogValue, r: SignedLogValue) -> f64 {
    let diff = l.sub(r);
    if diff.is_zero() {
        return 0.0;
    }
    let scale = 0f64.max(l.log_magnitude()).max(r.log_magnitude());
    (diff.log_magnitude() - scale).exp()
}

impl Identity {
    pub fn side(&self, side: Side) -> &Expr {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    pub fn integer_symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols
            .iter()
            .filter(|(_, d)| **d == Domain::NonnegInt)
            .map(|(k, _)| k.as_str())
    }

    pub fn is_pinned(&self, symbol: &str) -> bool {
        self.pins.iter().any(|p| p.symbol == symbol)
    }

    /// Fills unbound pinned symbols from their pins.
    pub fn complete_binding(&self, b: &Binding) -> Result<Binding, CatalogError> {
        let mut out = b.clone();
        for pin in &self.pins {
            if out.contains(&pin.symbol) {
                continue;
            }
            // integer-valued pins stay exact so termination is structural
            match pin.value.eval_exact(&out).filter(|r| r.is_integer()) {
                Some(r) => out.set_int(&pin.symbol, r.to_integer()),
                None => {
                    let v = pin.value.eval(&out).map_err(EvalError::from)?;
                    out.set_complex(&pin.symbol, v);
                }
            }
        }
        Ok(out)
    }

    /// Symbols occurring in either side or in a constraint; symbols used only
    /// by pins are excluded.
    pub fn used_symbols(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.lhs.free_symbols(&mut out);
        self.rhs.free_symbols(&mut out);
        for c in &self.constraints {
            match c {
                Constraint::NonZero(e) => e.free_symbols(&mut out),
                Constraint::AtMost { symbol, .. } => {
                    out.insert(symbol.clone());
                }
                Constraint::RePositive(p) => out.extend(p.symbols().map(str::to_string)),
            }
        }
        out
    }

    /// Domain and hard-constraint check; names the first failing predicate.
    pub fn validate(&self, b: &Binding) -> Result<(), CatalogError> {
        let used = self.used_symbols();
        for (name, domain) in &self.symbols {
            match (domain, b.get(name)) {
                (_, None) if !used.contains(name) => {}
                (_, None) => {
                    return Err(CatalogError::ConstraintViolation(format!("symbol `{name}` is unbound")))
                }
                (Domain::NonnegInt, Some(Value::Int(i))) if i >= 0 => {}
                (Domain::NonnegInt, Some(v)) => {
                    return Err(CatalogError::ConstraintViolation(format!(
                        "`{name}` must be a nonnegative integer, got {:?}",
                        v
                    )))
                }
                (Domain::Complex, Some(v)) => {
                    let z = v.as_complex();
                    if !(z.re.is_finite() && z.im.is_finite()) {
                        return Err(CatalogError::ConstraintViolation(format!("`{name}` is not finite")));
                    }
                }
            }
        }
        for c in self.constraints.iter().filter(|c| !c.is_advisory()) {
            if !c.holds(b, 0.0)? {
                return Err(CatalogError::ConstraintViolation(crate::notation::print_constraint(c)));
            }
        }
        Ok(())
    }

    pub fn eval_side_log(&self, side: Side, b: &Binding) -> Result<SignedLogValue, CatalogError> {
        let b = self.complete_binding(b)?;
        self.validate(&b)?;
        let e = self.side(side);
        let coarse = e.eval(&b)?;
        Ok(match e.eval_x(&b) {
            Ok(v) if v.log_parts().is_none_or(|(m, p)| m.is_finite() && p.is_finite()) => series::xv_to_log(v),
            _ => coarse,
        })
    }

    pub fn eval_side(&self, side: Side, b: &Binding) -> Result<Complex64, CatalogError> {
        Ok(self.eval_side_log(side, b)?.to_complex())
    }

    pub fn check(&self, b: &Binding, tol: f64) -> Result<CheckRecord, CatalogError> {
        let l = self.eval_side_log(Side::Lhs, b)?;
        let r = self.eval_side_log(Side::Rhs, b)?;
        let rel_err = relative_error(l, r);
        let (lc, rc) = (l.to_complex(), r.to_complex());
        Ok(CheckRecord {
            lhs: lc,
            rhs: rc,
            abs_err: (lc - rc).norm(),
            rel_err,
            pass: rel_err <= tol,
        })
    }

    /// `Ok(None)` when every screened quantity keeps `pole_distance` away
    /// from trouble; otherwise a description of the first offender.
    pub fn screen(&self, b: &Binding, pole_distance: f64) -> Result<Option<String>, CatalogError> {
        for c in self.constraints.iter().filter(|c| !c.is_advisory()) {
            if !c.holds(b, pole_distance)? {
                return Ok(Some(crate::notation::print_constraint(c)));
            }
        }
        let mut offender = None;
        let mut visit = |s: Screened| {
            let ok = match s {
                Screened::Argument(z) => distance_to_poles(z) >= pole_distance,
                Screened::Denominator(m) => m >= pole_distance,
            };
            if !ok {
                offender = Some(format!("{s:?}"));
            }
            ok
        };
        for side in [&self.lhs, &self.rhs] {
            if !side.screen(b, &mut visit)? {
                return Ok(offender);
            }
        }
        Ok(None)
    }

    /// Short `name in domain` summary used by listings.
    pub fn symbol_summary(&self) -> String {
        self.symbols
            .iter()
            .map(|(k, d)| {
                let d = match d {
                    Domain::Complex => "C",
                    Domain::NonnegInt => "N",
                };
                match self.pins.iter().find(|p| &p.symbol == k) {
                    Some(p) => format!("{k} = {}", p.value),
                    None => format!("{k} in {d}"),
                }
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::notation::print_identity(self))
    }
}

fn registry() -> &'static [Identity] {
    static REGISTRY: OnceLock<Vec<Identity>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let mut v = build_registry();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    })
}

/// All identities in alphabetical order.
pub fn list_identities() -> &'static [Identity] {
    registry()
}

pub fn lookup(name: &str) -> Result<&'static Identity, CatalogError> {
    registry()
        .iter()
        .find(|i| i.name == name)
        .ok_or_else(|| CatalogError::UnknownIdentity(name.to_string()))
}

pub fn eval_side(name: &str, side: Side, b: &Binding) -> Result<Complex64, CatalogError> {
    lookup(name)?.eval_side(side, b)
}

pub fn check(name: &str, b: &Binding, tol: f64) -> Result<CheckRecord, CatalogError> {
    lookup(name)?.check(b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma;

    fn gamma_value(z: f64) -> f64 {
        gamma(Complex64::new(z, 0.0)).unwrap().re
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn registry_is_sorted_and_complete() {
        let ids = list_identities();
        assert_eq!(ids.len(), REGISTRY_SIZE);
        assert!(ids.windows(2).all(|w| w[0].name < w[1].name));
        assert!(ids.iter().any(|i| i.name == "thm1"));
        assert!(ids.iter().any(|i| i.name == "whipple-terminating"));
    }

    #[test]
    fn thm1_rhs_at_n0() {
        let b = Binding::new().with_real("a", 0.3).with_real("l", 1.2).with_int("n", 0);
        let v = eval_side("thm1", Side::Rhs, &b).unwrap();
        let expected = 4f64.powf(-0.6) / (0.9 * 1.6);
        assert!(close(v, Complex64::new(expected, 0.0), 1e-13));
        // frozen from a 40-digit evaluation of the closed form
        assert!((expected - 0.302_274_501_144_487_5).abs() < 1e-15);
        // the k = 0 Fox-Wright term, computed from real gammas
        let g = gamma_value;
        let k0 = g(1.0) * g(1.5) * g(0.9) * g(1.4) * g(1.6) / (g(1.0) * g(2.0) * g(0.5) * g(1.3) * g(1.8) * g(2.8));
        assert!((k0 - expected).abs() < 1e-12);
        assert!(check("thm1", &b, 1e-9).unwrap().pass);
    }

    #[test]
    fn whipple_terminating_small_case() {
        let b = Binding::new().with_real("b", 2.0).with_real("c", 3.0).with_int("n", 1);
        let v = eval_side("whipple-terminating", Side::Lhs, &b).unwrap();
        assert!(close(v, Complex64::new(1.0 / 3.0, 0.0), 1e-14));
        assert!(check("whipple-terminating", &b, 1e-12).unwrap().pass);
    }

    #[test]
    fn dougall_rhs_matches_gamma_quotient() {
        let b = Binding::new()
            .with_real("a", 1.0)
            .with_real("b", 0.2)
            .with_real("c", 0.3)
            .with_real("d", 0.1);
        let v = eval_side("dougall", Side::Rhs, &b).unwrap();
        let g = gamma_value;
        let oracle = g(1.8) * g(1.7) * g(1.9) * g(1.4) / (g(2.0) * g(1.5) * g(1.7) * g(1.6));
        assert!(close(v, Complex64::new(oracle, 0.0), 1e-13));
    }

    #[test]
    fn thm2_at_m0_tracks_thm1() {
        let b1 = Binding::new().with_real("a", 0.3).with_real("l", 1.2).with_int("n", 4);
        let b2 = b1.clone().with_int("m", 0);
        let r1 = check("thm1", &b1, 1e-8).unwrap();
        let r2 = check("thm2", &b2, 1e-8).unwrap();
        assert_eq!(r1.pass, r2.pass);
        // at m = 0 the extra gamma pairs of Ω collapse to a factor 1/2
        assert!(close(r1.lhs, r2.lhs * 2.0, 1e-10));
    }

    #[test]
    fn constraint_violations_are_named() {
        let b = Binding::new().with_real("a", 0.3).with_real("l", 1.2).with_real("n", 0.5);
        assert!(matches!(
            eval_side("thm1", Side::Lhs, &b),
            Err(CatalogError::ConstraintViolation(_))
        ));
        let cor4 = Binding::new().with_real("a", 0.3).with_int("m", 9).with_int("n", 2);
        match eval_side("cor4", Side::Lhs, &cor4) {
            Err(CatalogError::ConstraintViolation(msg)) => assert!(msg.contains("m <= 4"), "{msg}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            eval_side("nosuch", Side::Lhs, &b),
            Err(CatalogError::UnknownIdentity(_))
        ));
    }

    #[test]
    fn relative_error_is_overflow_safe() {
        let big = SignedLogValue::new(2000.0, 0.0);
        let bigger = SignedLogValue::new(2000.0 + 1e-9, 0.0);
        let e = relative_error(big, bigger);
        assert!(e > 0.5e-9 && e < 2e-9);
        assert_eq!(relative_error(SignedLogValue::ZERO, SignedLogValue::ZERO), 0.0);
        let e = relative_error(SignedLogValue::from_real(1e-3), SignedLogValue::ZERO);
        assert!((e - 1e-3).abs() < 1e-15);
    }
}
