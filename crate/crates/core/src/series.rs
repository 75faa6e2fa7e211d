//! Generalized hypergeometric (pFq) and Fox-Wright (pΨq) series.
//!
//! Parameters are affine expressions ([`ParamExpr`]) over named symbols, so
//! one [`SeriesSpec`] describes a whole family of series; a [`Binding`]
//! supplies the symbol values at evaluation time.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extended::{self, dd, Cdd, Xv};
use crate::numerics::{
    self, ln_factorial, log_gamma, near_nonpositive_integer, reciprocal_gamma, sum_scaled,
    NumericsError, ScaledProduct, SignedLogValue, RECIP_GAMMA_ZERO_TOL,
};

pub type Rational = Ratio<i64>;

pub const DEFAULT_MAX_TERMS: usize = 10_000;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
/// Number of consecutive negligible terms required before a nonterminating
/// series is declared converged.
const TAIL_RUN: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BindingError {
    #[error("symbol `{0}` is not bound")]
    Unbound(String),
    #[error("`{expr}` must evaluate to a nonnegative integer")]
    NotAnIndex { expr: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error(transparent)]
    Binding(#[from] BindingError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("denominator parameter {param} vanishes at term {k}")]
    DenominatorZero { k: u64, param: String },
    #[error("numerator gamma argument {arg} hits a pole at term {k}")]
    NumeratorPole { k: u64, arg: String },
    #[error("numerator and denominator poles coincide at term {k}")]
    MixedPole { k: u64 },
    #[error("series is not summable here: {0}")]
    NotSummable(String),
    #[error("tail did not converge within {terms} terms")]
    TailNotConverged { terms: usize },
}

/// Value bound to a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Complex(#[serde(with = "crate::serde_complex")] Complex64),
}

impl Value {
    pub fn as_complex(&self) -> Complex64 {
        match *self {
            Value::Int(i) => Complex64::new(i as f64, 0.0),
            Value::Complex(z) => z,
        }
    }
}

/// Symbol values. Integer-flagged symbols hold exact integers.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Binding(BTreeMap<String, Value>);

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_complex(mut self, name: &str, z: Complex64) -> Self {
        self.set_complex(name, z);
        self
    }

    pub fn with_real(self, name: &str, x: f64) -> Self {
        self.with_complex(name, Complex64::new(x, 0.0))
    }

    pub fn with_int(mut self, name: &str, i: i64) -> Self {
        self.set_int(name, i);
        self
    }

    pub fn set_complex(&mut self, name: &str, z: Complex64) {
        self.0.insert(name.to_string(), Value::Complex(z));
    }

    pub fn set_int(&mut self, name: &str, i: i64) {
        self.0.insert(name.to_string(), Value::Int(i));
    }

    pub fn get(&self, name: &str) -> Option<Value> {
        self.0.get(name).copied()
    }

    pub fn complex(&self, name: &str) -> Option<Complex64> {
        self.get(name).map(|v| v.as_complex())
    }

    pub fn int(&self, name: &str) -> Option<i64> {
        match self.get(name) {
            Some(Value::Int(i)) => Some(i),
            _ => None,
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Value)> {
        self.0.iter()
    }

    pub fn remove(&mut self, name: &str) -> Option<Value> {
        self.0.remove(name)
    }
}

/// Affine expression `constant + Σ coeff·symbol` with rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is semantic
/// equality and the `Display` form is canonical.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamExpr {
    constant: Rational,
    terms: BTreeMap<String, Rational>,
}

impl Default for ParamExpr {
    fn default() -> Self {
        Self::zero()
    }
}

impl ParamExpr {
    pub fn zero() -> Self {
        ParamExpr {
            constant: Rational::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        ParamExpr {
            constant: c,
            terms: BTreeMap::new(),
        }
    }

    pub fn int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c))
    }

    pub fn symbol(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(name.to_string(), Rational::one());
        ParamExpr {
            constant: Rational::zero(),
            terms,
        }
    }

    pub fn constant_part(&self) -> Rational {
        self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn coefficient(&self, name: &str) -> Rational {
        self.terms.get(name).copied().unwrap_or_else(Rational::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then_some(self.constant)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().map(String::as_str)
    }

    pub fn add(&self, other: &ParamExpr) -> ParamExpr {
        let mut out = self.clone();
        out.constant += other.constant;
        for (name, c) in &other.terms {
            let entry = out.terms.entry(name.clone()).or_insert_with(Rational::zero);
            *entry += *c;
            if entry.is_zero() {
                out.terms.remove(name);
            }
        }
        out
    }

    pub fn sub(&self, other: &ParamExpr) -> ParamExpr {
        self.add(&other.scale(-Rational::one()))
    }

    pub fn scale(&self, factor: Rational) -> ParamExpr {
        if factor.is_zero() {
            return ParamExpr::zero();
        }
        ParamExpr {
            constant: self.constant * factor,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), *v * factor))
                .collect(),
        }
    }

    pub fn neg(&self) -> ParamExpr {
        self.scale(-Rational::one())
    }

    /// Replaces `name` by `value` everywhere.
    pub fn substitute(&self, name: &str, value: &ParamExpr) -> ParamExpr {
        match self.terms.get(name) {
            None => self.clone(),
            Some(&c) => {
                let mut rest = self.clone();
                rest.terms.remove(name);
                rest.add(&value.scale(c))
            }
        }
    }

    pub fn eval(&self, binding: &Binding) -> Result<Complex64, BindingError> {
        let mut acc = Complex64::new(rational_to_f64(self.constant), 0.0);
        for (name, c) in &self.terms {
            let v = binding
                .complex(name)
                .ok_or_else(|| BindingError::Unbound(name.clone()))?;
            acc += v * rational_to_f64(*c);
        }
        Ok(acc)
    }

    /// Double-double value; rational coefficients are not rounded to f64.
    pub(crate) fn eval_dd(&self, binding: &Binding) -> Result<Cdd, BindingError> {
        let q = |r: Rational| extended::real(1.0) * extended::div(dd(*r.numer() as f64), dd(*r.denom() as f64));
        let mut acc = q(self.constant);
        for (name, c) in &self.terms {
            let v = binding
                .complex(name)
                .ok_or_else(|| BindingError::Unbound(name.clone()))?;
            acc += extended::up(v) * q(*c);
        }
        Ok(acc)
    }

    /// Exact value when every symbol is bound to an integer.
    pub fn eval_exact(&self, binding: &Binding) -> Option<Rational> {
        let mut acc = self.constant;
        for (name, c) in &self.terms {
            acc += *c * Rational::from_integer(binding.int(name)?);
        }
        Some(acc)
    }

    /// Evaluates an index expression (e.g. `n`, `1 + n`, `m`) to a
    /// nonnegative integer.
    pub fn eval_index(&self, binding: &Binding) -> Result<u64, BindingError> {
        for name in self.terms.keys() {
            if !binding.contains(name) {
                return Err(BindingError::Unbound(name.clone()));
            }
        }
        let not_index = || BindingError::NotAnIndex {
            expr: self.to_string(),
        };
        let r = self.eval_exact(binding).ok_or_else(not_index)?;
        if !r.is_integer() || r.is_negative() {
            return Err(not_index());
        }
        r.to_integer().to_u64().ok_or_else(not_index)
    }
}

pub fn rational_to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn fmt_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        if !self.constant.is_zero() || self.terms.is_empty() {
            write!(f, "{}", fmt_rational(self.constant))?;
            first = false;
        }
        for (name, c) in &self.terms {
            let mag = c.abs();
            let body = if mag.is_one() {
                name.clone()
            } else {
                format!("{}*{}", fmt_rational(mag), name)
            };
            match (first, c.is_negative()) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for ParamExpr {
    type Err = crate::notation::NotationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::notation::parse_affine(s)
    }
}

/// One `(offset; coeff)` pair. For pFq series the coefficient is 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FWEntry {
    pub offset: ParamExpr,
    pub coeff: ParamExpr,
}

impl FWEntry {
    pub fn new(offset: ParamExpr, coeff: ParamExpr) -> Self {
        FWEntry { offset, coeff }
    }

    pub fn plain(offset: ParamExpr) -> Self {
        FWEntry {
            offset,
            coeff: ParamExpr::one(),
        }
    }

    fn substitute(&self, name: &str, value: &ParamExpr) -> FWEntry {
        FWEntry {
            offset: self.offset.substitute(name, value),
            coeff: self.coeff.substitute(name, value),
        }
    }
}

/// A parameter slot: a single entry or an indexed family
/// `{entry(var) : var = lower..upper}` (inclusive bounds).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Entry {
    Single(FWEntry),
    Family {
        var: String,
        lower: ParamExpr,
        upper: ParamExpr,
        entry: FWEntry,
    },
}

impl Entry {
    pub fn coeff(&self) -> &ParamExpr {
        match self {
            Entry::Single(e) => &e.coeff,
            Entry::Family { entry, .. } => &entry.coeff,
        }
    }

    fn expand_into(&self, binding: &Binding, out: &mut Vec<FWEntry>) -> Result<(), BindingError> {
        match self {
            Entry::Single(e) => out.push(e.clone()),
            Entry::Family {
                var,
                lower,
                upper,
                entry,
            } => {
                let lo = lower.eval_index(binding)?;
                let hi = upper.eval_index(binding)?;
                for i in lo..=hi {
                    out.push(entry.substitute(var, &ParamExpr::int(i as i64)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesKind {
    Pfq,
    FoxWright,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeriesSpec {
    pub kind: SeriesKind,
    pub numerator: Vec<Entry>,
    pub denominator: Vec<Entry>,
    pub argument: ParamExpr,
    pub max_terms: usize,
}

impl SeriesSpec {
    /// A pFq series; parameters are offsets with implicit coefficient 1.
    pub fn pfq(numerator: Vec<Entry>, denominator: Vec<Entry>, argument: ParamExpr) -> Self {
        SeriesSpec {
            kind: SeriesKind::Pfq,
            numerator,
            denominator,
            argument,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn fox_wright(numerator: Vec<Entry>, denominator: Vec<Entry>, argument: ParamExpr) -> Self {
        SeriesSpec {
            kind: SeriesKind::FoxWright,
            numerator,
            denominator,
            argument,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    /// Family-expanded entries in canonical (sorted) order.
    pub fn expand(&self, binding: &Binding) -> Result<(Vec<FWEntry>, Vec<FWEntry>), BindingError> {
        let mut num = Vec::new();
        for e in &self.numerator {
            e.expand_into(binding, &mut num)?;
        }
        let mut den = Vec::new();
        for e in &self.denominator {
            e.expand_into(binding, &mut den)?;
        }
        num.sort();
        den.sort();
        Ok((num, den))
    }
}

/// Value of `offset + coeff·k`, exact when only integer symbols occur.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ArgValue {
    pub value: Complex64,
    pub exact: Option<Rational>,
}

impl ArgValue {
    pub(crate) fn at(entry: &FWEntry, k: u64, binding: &Binding) -> Result<Self, BindingError> {
        let kk = Rational::from_integer(k as i64);
        let exact = match (entry.offset.eval_exact(binding), entry.coeff.eval_exact(binding)) {
            (Some(o), Some(c)) => Some(o + c * kk),
            _ => None,
        };
        let value = match exact {
            Some(r) => Complex64::new(rational_to_f64(r), 0.0),
            None => entry.offset.eval(binding)? + entry.coeff.eval(binding)? * k as f64,
        };
        Ok(ArgValue { value, exact })
    }

    /// `Some(j)` when the value is the nonpositive integer `-j`.
    pub(crate) fn nonpositive_integer(&self, tol: f64) -> Option<u64> {
        match self.exact {
            Some(r) => (r.is_integer() && !r.is_positive()).then(|| (-r.to_integer()) as u64),
            None => near_nonpositive_integer(self.value, tol).map(|j| (-j) as u64),
        }
    }
}

fn argument_power(z: Complex64, k: u64) -> SignedLogValue {
    if k == 0 {
        return SignedLogValue::ONE;
    }
    let zl = SignedLogValue::from_complex(z);
    if zl.is_zero() {
        return SignedLogValue::ZERO;
    }
    SignedLogValue::new(zl.log_magnitude() * k as f64, zl.phase() * k as f64)
}

fn foxwright_term(
    num: &[FWEntry],
    den: &[FWEntry],
    z: Complex64,
    k: u64,
    binding: &Binding,
) -> Result<SignedLogValue, SeriesError> {
    let mut den_pole = false;
    let mut log_sum = Complex64::new(0.0, 0.0);
    for e in den {
        let a = ArgValue::at(e, k, binding)?;
        if a.nonpositive_integer(RECIP_GAMMA_ZERO_TOL).is_some() {
            den_pole = true;
            continue;
        }
        let r = reciprocal_gamma(a.value)?;
        if r.is_zero() {
            den_pole = true;
        } else {
            log_sum += Complex64::new(r.log_magnitude(), r.phase());
        }
    }
    for e in num {
        let a = ArgValue::at(e, k, binding)?;
        let pole = a.nonpositive_integer(numerics::GAMMA_POLE_TOL).is_some();
        if pole {
            if den_pole {
                return Err(SeriesError::MixedPole { k });
            }
            return Err(SeriesError::NumeratorPole {
                k,
                arg: format!("{} + ({})*k", e.offset, e.coeff),
            });
        }
        if !den_pole {
            log_sum += log_gamma(a.value)?;
        }
    }
    if den_pole {
        return Ok(SignedLogValue::ZERO);
    }
    let mut term = SignedLogValue::from_log(log_sum);
    term = term.mul(argument_power(z, k));
    term = term.mul(SignedLogValue::new(-ln_factorial(k), 0.0));
    Ok(term)
}

/// First index `k` at which `(a)_k` vanishes, if `a` is a nonpositive integer.
fn pochhammer_zero_index(a: &ArgValue) -> Option<u64> {
    a.nonpositive_integer(RECIP_GAMMA_ZERO_TOL).map(|j| j + 1)
}

fn pfq_term(
    num: &[FWEntry],
    den: &[FWEntry],
    z: Complex64,
    k: u64,
    binding: &Binding,
) -> Result<SignedLogValue, SeriesError> {
    let num_args = num
        .iter()
        .map(|e| ArgValue::at(e, 0, binding))
        .collect::<Result<Vec<_>, _>>()?;
    let num_zero = num_args.iter().filter_map(pochhammer_zero_index).min();
    for (e, a) in den.iter().zip(den.iter().map(|e| ArgValue::at(e, 0, binding))) {
        let a = a?;
        if let Some(dz) = pochhammer_zero_index(&a) {
            if dz <= k && num_zero.is_none_or(|nz| nz > dz) {
                return Err(SeriesError::DenominatorZero {
                    k,
                    param: e.offset.to_string(),
                });
            }
        }
    }
    if num_zero.is_some_and(|nz| nz <= k) {
        return Ok(SignedLogValue::ZERO);
    }
    let mut p = ScaledProduct::new();
    for a in &num_args {
        for j in 0..k {
            p.mul(a.value + j as f64);
        }
    }
    for e in den {
        let b = ArgValue::at(e, 0, binding)?.value;
        for j in 0..k {
            p.div(b + j as f64);
        }
    }
    Ok(p
        .value()
        .mul(argument_power(z, k))
        .mul(SignedLogValue::new(-ln_factorial(k), 0.0)))
}

/// The exact `k`-th term of the series.
pub fn series_term(spec: &SeriesSpec, binding: &Binding, k: u64) -> Result<SignedLogValue, SeriesError> {
    let (num, den) = spec.expand(binding)?;
    let z = spec.argument.eval(binding)?;
    term_with(spec.kind, &num, &den, z, k, binding)
}

fn term_with(
    kind: SeriesKind,
    num: &[FWEntry],
    den: &[FWEntry],
    z: Complex64,
    k: u64,
    binding: &Binding,
) -> Result<SignedLogValue, SeriesError> {
    match kind {
        SeriesKind::Pfq => pfq_term(num, den, z, k, binding),
        SeriesKind::FoxWright => foxwright_term(num, den, z, k, binding),
    }
}

/// Smallest `K` such that every term beyond `K` is provably zero.
pub fn termination_index(spec: &SeriesSpec, binding: &Binding) -> Result<Option<u64>, SeriesError> {
    let (num, den) = spec.expand(binding)?;
    termination_with(spec.kind, &num, &den, binding)
}

fn near_integer(a: &ArgValue) -> Option<i64> {
    match a.exact {
        Some(r) => r.is_integer().then(|| r.to_integer()),
        None => {
            let r = a.value.re.round();
            ((a.value - Complex64::new(r, 0.0)).norm() <= RECIP_GAMMA_ZERO_TOL).then_some(r as i64)
        }
    }
}

fn termination_with(
    kind: SeriesKind,
    num: &[FWEntry],
    den: &[FWEntry],
    binding: &Binding,
) -> Result<Option<u64>, SeriesError> {
    match kind {
        SeriesKind::Pfq => {
            let mut best: Option<u64> = None;
            for e in num {
                let a = ArgValue::at(e, 0, binding)?;
                if let Some(j) = a.nonpositive_integer(RECIP_GAMMA_ZERO_TOL) {
                    best = Some(best.map_or(j, |b| b.min(j)));
                }
            }
            Ok(best)
        }
        SeriesKind::FoxWright => {
            let mut best: Option<u64> = None;
            for e in den {
                let coeff = ArgValue {
                    value: e.coeff.eval(binding)?,
                    exact: e.coeff.eval_exact(binding),
                };
                let offset = ArgValue {
                    value: e.offset.eval(binding)?,
                    exact: e.offset.eval_exact(binding),
                };
                let (Some(b), Some(beta)) = (near_integer(&coeff), near_integer(&offset)) else {
                    continue;
                };
                if b >= 0 {
                    continue;
                }
                // beta + b*k <= 0  <=>  k >= beta / |b|
                let step = -b;
                let first_zero = if beta <= 0 { 0 } else { (beta + step - 1) / step };
                let k = (first_zero - 1).max(0) as u64;
                best = Some(best.map_or(k, |x| x.min(k)));
            }
            Ok(best)
        }
    }
}

/// `1 + Σ Re(B_j) − Σ Re(A_i)` for a Fox-Wright series.
pub fn fw_condition(spec: &SeriesSpec, binding: &Binding) -> Result<f64, SeriesError> {
    let (num, den) = spec.expand(binding)?;
    let mut acc = 1.0;
    for e in &den {
        acc += e.coeff.eval(binding)?.re;
    }
    for e in &num {
        acc -= e.coeff.eval(binding)?.re;
    }
    Ok(acc)
}

/// Evaluates the series in log form (no overflow in the result).
pub fn eval_series_log(spec: &SeriesSpec, binding: &Binding, tol: f64) -> Result<SignedLogValue, SeriesError> {
    let (num, den) = spec.expand(binding)?;
    let z = spec.argument.eval(binding)?;
    if let Some(v) = terminating_x(spec, &num, &den, binding)? {
        return Ok(xv_to_log(v));
    }
    let summable = match spec.kind {
        SeriesKind::Pfq => z.norm() < 1.0,
        SeriesKind::FoxWright => fw_condition(spec, binding)? > 0.0 && z.norm() <= 1.0,
    };
    if !summable {
        return Err(SeriesError::NotSummable(format!(
            "nonterminating series at argument {z}"
        )));
    }
    let mut terms = Vec::new();
    let mut running = SignedLogValue::ZERO;
    let mut quiet = 0;
    for k in 0..spec.max_terms as u64 {
        let t = term_with(spec.kind, &num, &den, z, k, binding)?;
        terms.push(t);
        running = running.add(t);
        let negligible = t.is_zero()
            || (!running.is_zero() && t.log_magnitude() < tol.ln() + running.log_magnitude());
        if negligible {
            quiet += 1;
            if quiet >= TAIL_RUN {
                return Ok(sum_scaled(&terms));
            }
        } else {
            quiet = 0;
        }
    }
    Err(SeriesError::TailNotConverged {
        terms: spec.max_terms,
    })
}

fn terminating_x(
    spec: &SeriesSpec,
    num: &[FWEntry],
    den: &[FWEntry],
    binding: &Binding,
) -> Result<Option<Xv>, SeriesError> {
    let Some(k_max) = termination_with(spec.kind, num, den, binding)? else {
        return Ok(None);
    };
    if k_max as usize >= spec.max_terms {
        return Err(SeriesError::NotSummable(format!(
            "terminates at {k_max}, beyond max_terms {}",
            spec.max_terms
        )));
    }
    let z = spec.argument.eval(binding)?;
    let terms = (0..=k_max)
        .map(|k| term_with(spec.kind, num, den, z, k, binding))
        .collect::<Result<Vec<_>, _>>()?;
    terminating_sum(spec, num, den, &terms, binding).map(Some)
}

pub(crate) fn xv_to_log(v: Xv) -> SignedLogValue {
    match v.log_parts() {
        Some((m, p)) => SignedLogValue::new(m, p),
        None => SignedLogValue::ZERO,
    }
}

pub(crate) fn xv_from_log(v: SignedLogValue) -> Xv {
    if v.is_zero() {
        Xv::zero()
    } else {
        Xv::from_log(Cdd::new(dd(v.log_magnitude()), dd(v.phase())))
    }
}

/// Double-double value of the series: exact-arithmetic summation for
/// terminating series, the f64 result otherwise.
pub(crate) fn eval_series_x(spec: &SeriesSpec, binding: &Binding, tol: f64) -> Result<Xv, SeriesError> {
    let (num, den) = spec.expand(binding)?;
    if let Some(v) = terminating_x(spec, &num, &den, binding)? {
        return Ok(v);
    }
    eval_series_log(spec, binding, tol).map(xv_from_log)
}

/// Sums a terminating series in double-double arithmetic. `terms` are the
/// f64 terms, used only to tell which terms vanish.
fn terminating_sum(
    spec: &SeriesSpec,
    num: &[FWEntry],
    den: &[FWEntry],
    terms: &[SignedLogValue],
    binding: &Binding,
) -> Result<Xv, SeriesError> {
    let z = spec.argument.eval_dd(binding)?;
    let eval = |es: &[FWEntry]| -> Result<Vec<(Cdd, Cdd)>, BindingError> {
        es.iter()
            .map(|e| Ok((e.offset.eval_dd(binding)?, e.coeff.eval_dd(binding)?)))
            .collect()
    };
    let (num, den) = (eval(num)?, eval(den)?);
    let ln_z = (z != extended::real(0.0)).then(|| extended::cln(z));
    let mut logs: Vec<Cdd> = Vec::with_capacity(terms.len());
    // pFq: running product (a)_k.../(b)_k... z^k/k! kept as mantissa * 2^scale
    let mut product = extended::real(1.0);
    let mut scale: i64 = 0;
    for (k, t) in terms.iter().enumerate() {
        let kd = extended::real(k as f64);
        if spec.kind == SeriesKind::Pfq && k > 0 {
            let prev = extended::real((k - 1) as f64);
            for (a, _) in &num {
                product *= *a + prev;
            }
            let mut d = kd;
            for (b, _) in &den {
                d *= *b + prev;
            }
            product = extended::cdiv(product * z, d);
            let e = product.re.hi().abs().max(product.im.hi().abs());
            if e != 0.0 && e.is_finite() {
                let shift = e.log2().floor() as i32;
                product *= dd(2f64.powi(-shift));
                scale += shift as i64;
            }
        }
        if t.is_zero() {
            continue;
        }
        let log = match spec.kind {
            SeriesKind::Pfq => extended::cln(product) + Cdd::new(extended::ln2() * scale as f64, dd(0.0)),
            SeriesKind::FoxWright => {
                let mut acc = extended::real(0.0);
                for (a, c) in &num {
                    acc += extended::ln_gamma(*a + *c * kd);
                }
                for (b, c) in &den {
                    acc -= extended::ln_gamma(*b + *c * kd);
                }
                if k > 0 {
                    acc += ln_z.expect("zero argument gives zero terms") * kd;
                    acc -= extended::ln_gamma(kd + extended::real(1.0));
                }
                acc
            }
        };
        logs.push(log);
    }
    let Some(peak) = logs.iter().map(|l| l.re).reduce(|a, b| if b > a { b } else { a }) else {
        return Ok(Xv::zero());
    };
    let mut sum = extended::real(0.0);
    for l in &logs {
        sum += extended::cexp(*l - Cdd::new(peak, dd(0.0)));
    }
    Ok(Xv::from_log(Cdd::new(peak, dd(0.0))).mul(Xv::new(sum)))
}

pub fn eval_series(spec: &SeriesSpec, binding: &Binding, tol: f64) -> Result<Complex64, SeriesError> {
    let v = eval_series_log(spec, binding, tol)?.to_complex();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(SeriesError::Numerics(NumericsError::Overflow))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ParamExpr {
        s.parse().unwrap()
    }

    fn singles(xs: &[&str]) -> Vec<Entry> {
        xs.iter().map(|s| Entry::Single(FWEntry::plain(p(s)))).collect()
    }

    fn fw(xs: &[(&str, &str)]) -> Vec<Entry> {
        xs.iter()
            .map(|(o, c)| Entry::Single(FWEntry::new(p(o), p(c))))
            .collect()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn param_expr_algebra_and_display() {
        let e = p("1 + 2*a + n");
        assert_eq!(e.to_string(), "1 + 2*a + n");
        assert_eq!(p("n + 2*a + 1"), e);
        assert_eq!(p("(m - i)/2 + l - a").to_string(), "-a - 1/2*i + l + 1/2*m");
        assert_eq!(p("a - a").to_string(), "0");
        assert_eq!(e.substitute("n", &p("-3")).to_string(), "-2 + 2*a");
        let b = Binding::new().with_real("a", 0.25).with_int("n", 3);
        assert_eq!(e.eval(&b).unwrap(), Complex64::new(4.5, 0.0));
        assert_eq!(p("1 + n").eval_index(&b).unwrap(), 4);
        assert!(p("n - 5").eval_index(&b).is_err());
        assert!(p("a").eval_index(&b).is_err());
        assert!(matches!(p("q").eval(&b), Err(BindingError::Unbound(_))));
    }

    #[test]
    fn foxwright_term_examples() {
        // 1Ψ1[(1;1);(2;1)](1), k = 2: Γ(3)/Γ(4)/2! = 1/6
        let spec = SeriesSpec::fox_wright(fw(&[("1", "1")]), fw(&[("2", "1")]), p("1"));
        let t = series_term(&spec, &Binding::new(), 2).unwrap().to_complex();
        assert!(close(t, Complex64::new(1.0 / 6.0, 0.0), 1e-14));
        // (1+n; -1) with n = 3 vanishes at k = 5
        let spec = SeriesSpec::fox_wright(fw(&[("1", "1")]), fw(&[("1 + n", "-1")]), p("1"));
        let b = Binding::new().with_int("n", 3);
        assert!(series_term(&spec, &b, 5).unwrap().is_zero());
        assert!(!series_term(&spec, &b, 3).unwrap().is_zero());
    }

    #[test]
    fn pfq_term_examples() {
        let spec = SeriesSpec::pfq(singles(&["-1", "b"]), singles(&["c"]), p("1"));
        let b = Binding::new().with_real("b", 0.7).with_real("c", 1.3);
        assert!(series_term(&spec, &b, 2).unwrap().is_zero());
        // denominator zero before numerator termination is an error
        let bad = SeriesSpec::pfq(singles(&["-3", "b"]), singles(&["-1"]), p("1"));
        assert!(matches!(
            series_term(&bad, &b, 2),
            Err(SeriesError::DenominatorZero { .. })
        ));
        assert!(series_term(&bad, &b, 1).is_ok());
    }

    #[test]
    fn numerator_pole_is_an_error() {
        let spec = SeriesSpec::fox_wright(fw(&[("-2", "1")]), vec![], p("1/2"));
        assert!(matches!(
            series_term(&spec, &Binding::new(), 0),
            Err(SeriesError::NumeratorPole { .. })
        ));
        let mixed = SeriesSpec::fox_wright(fw(&[("-2", "1")]), fw(&[("-1", "1")]), p("1/2"));
        assert!(matches!(
            series_term(&mixed, &Binding::new(), 0),
            Err(SeriesError::MixedPole { .. })
        ));
    }

    #[test]
    fn termination_rules() {
        let whip = SeriesSpec::pfq(singles(&["-n", "1 + n", "b"]), singles(&["c", "1 + 2*b - c"]), p("1"));
        let b = Binding::new().with_int("n", 4).with_real("b", 0.3).with_real("c", 1.1);
        assert_eq!(termination_index(&whip, &b).unwrap(), Some(4));

        let spec = SeriesSpec::fox_wright(fw(&[("1", "1")]), fw(&[("1 + n", "-1")]), p("-1"));
        let b7 = Binding::new().with_int("n", 7);
        assert_eq!(termination_index(&spec, &b7).unwrap(), Some(7));
        for k in 8..=20 {
            assert!(series_term(&spec, &b7, k).unwrap().is_zero());
        }

        let plain = SeriesSpec::pfq(singles(&["1/2", "3/10"]), singles(&["11/10"]), p("1/2"));
        assert_eq!(termination_index(&plain, &Binding::new()).unwrap(), None);

        // coefficient -2, offset 5: zeros from k = 3 on
        let two = SeriesSpec::fox_wright(vec![], fw(&[("5", "-2")]), p("1"));
        assert_eq!(termination_index(&two, &Binding::new()).unwrap(), Some(2));
        assert!(series_term(&two, &Binding::new(), 3).unwrap().is_zero());
        assert!(!series_term(&two, &Binding::new(), 2).unwrap().is_zero());
    }

    #[test]
    fn fw_condition_values() {
        let spec = SeriesSpec::fox_wright(fw(&[("1", "1")]), fw(&[("2", "1")]), p("1"));
        assert_eq!(fw_condition(&spec, &Binding::new()).unwrap(), 1.0);
        let empty = SeriesSpec::fox_wright(vec![], vec![], p("1"));
        assert_eq!(fw_condition(&empty, &Binding::new()).unwrap(), 1.0);
    }

    #[test]
    fn eval_series_examples() {
        let f = SeriesSpec::pfq(singles(&["-1", "2"]), singles(&["3"]), p("1"));
        let v = eval_series(&f, &Binding::new(), 1e-12).unwrap();
        assert!(close(v, Complex64::new(1.0 / 3.0, 0.0), 1e-15));

        let f = SeriesSpec::pfq(singles(&["-1", "2", "2"]), singles(&["3", "2"]), p("1"));
        let v = eval_series(&f, &Binding::new(), 1e-12).unwrap();
        assert!(close(v, Complex64::new(1.0 / 3.0, 0.0), 1e-15));

        // Σ 1/((k+1) k!) = e - 1; oracle: 60-term partial sum in plain f64
        let oracle: f64 = (0..60u32)
            .map(|k| 1.0 / ((k as f64 + 1.0) * (1..=k).map(f64::from).product::<f64>()))
            .sum();
        let f = SeriesSpec::fox_wright(fw(&[("1", "1")]), fw(&[("2", "1")]), p("1"));
        let v = eval_series(&f, &Binding::new(), 1e-12).unwrap();
        assert!(close(v, Complex64::new(oracle, 0.0), 1e-12));
        assert!((v.re - 1.718_281_828_5).abs() < 1e-9);
    }

    #[test]
    fn not_summable_and_tail() {
        let f = SeriesSpec::pfq(singles(&["1/2", "3/10"]), singles(&["11/10"]), p("1"));
        assert!(matches!(
            eval_series(&f, &Binding::new(), 1e-12),
            Err(SeriesError::NotSummable(_))
        ));
        let mut slow = SeriesSpec::pfq(singles(&["1", "1"]), singles(&["2"]), p("99/100"));
        slow.max_terms = 50;
        assert!(matches!(
            eval_series(&slow, &Binding::new(), 1e-12),
            Err(SeriesError::TailNotConverged { .. })
        ));
        // 2F1(1,1;2;1/2) = 2 ln 2
        slow.max_terms = DEFAULT_MAX_TERMS;
        slow.argument = p("1/2");
        let v = eval_series(&slow, &Binding::new(), 1e-14).unwrap();
        assert!(close(v, Complex64::new(2.0 * 2f64.ln(), 0.0), 1e-13));
    }

    #[test]
    fn families_expand_inclusively() {
        let fam = Entry::Family {
            var: "i".into(),
            lower: p("1"),
            upper: p("m"),
            entry: FWEntry::plain(p("a + 2*i")),
        };
        let spec = SeriesSpec::pfq(vec![fam], vec![], p("0"));
        let b = Binding::new().with_int("m", 3).with_real("a", 0.5);
        let (num, _) = spec.expand(&b).unwrap();
        let offs: Vec<String> = num.iter().map(|e| e.offset.to_string()).collect();
        assert_eq!(offs, ["2 + a", "4 + a", "6 + a"]);
        let b0 = Binding::new().with_int("m", 0).with_real("a", 0.5);
        assert!(spec.expand(&b0).unwrap().0.is_empty());
    }
}
