//! Complex gamma-family kernels.
//!
//! Everything here works on [`Complex64`] and, where products of many gamma
//! values are involved, on [`SignedLogValue`] so that intermediate results
//! never overflow. The gamma function itself comes from a Lanczos
//! approximation (g = 7, nine coefficients) on `Re(z) >= 1/2` and the
//! reflection formula below that.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

/// Distance from a nonpositive integer below which `gamma`/`log_gamma` refuse
/// to evaluate.
pub const GAMMA_POLE_TOL: f64 = 1e-12;

/// Distance from a nonpositive integer below which `reciprocal_gamma` returns
/// an exact zero.
pub const RECIP_GAMMA_ZERO_TOL: f64 = 1e-9;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },
    #[error("numerator argument #{index} ({re} + {im}i) is a pole of gamma")]
    NumeratorPole { index: usize, re: f64, im: f64 },
    #[error("non-finite input {re} + {im}i")]
    NonFinite { re: f64, im: f64 },
    #[error("result overflows binary64")]
    Overflow,
}

fn check_finite(z: Complex64) -> Result<(), NumericsError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(NumericsError::NonFinite { re: z.re, im: z.im })
    }
}

/// Returns the nonpositive integer `-j` nearest to `z` if `z` lies within
/// `tol` of it.
pub fn near_nonpositive_integer(z: Complex64, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if r > 0.0 {
        return None;
    }
    if (z - Complex64::new(r, 0.0)).norm() <= tol {
        Some(r as i64)
    } else {
        None
    }
}

/// Distance from `z` to the set {0, -1, -2, ...}.
pub fn distance_to_poles(z: Complex64) -> f64 {
    let r = z.re.round().min(0.0);
    (z - Complex64::new(r, 0.0)).norm()
}

/// Reduces an angle to (-pi, pi].
pub fn normalize_phase(phase: f64) -> f64 {
    let mut p = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

/// A nonzero complex number stored as `exp(log_magnitude + i*phase)`, or the
/// distinguished exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    log_magnitude: f64,
    phase: f64,
}

// Arithmetic stays as named methods so that every call site reads as log-space
// arithmetic rather than ordinary operators.
#[allow(clippy::should_implement_trait)]
impl SignedLogValue {
    pub const ZERO: SignedLogValue = SignedLogValue {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: SignedLogValue = SignedLogValue {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        SignedLogValue {
            log_magnitude,
            phase: normalize_phase(phase),
        }
    }

    /// Interprets a complex logarithm `w` as the value `exp(w)`.
    pub fn from_log(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            Self::ZERO
        } else {
            Self::new(z.norm().ln(), z.arg())
        }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn is_finite(&self) -> bool {
        self.is_zero() || (self.log_magnitude.is_finite() && self.phase.is_finite())
    }

    /// Converts to an ordinary complex number; may overflow to infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_magnitude.exp(), self.phase)
    }

    /// The value divided by `exp(scale)`, as a complex number.
    pub fn to_complex_scaled(&self, scale: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_magnitude - scale).exp(), self.phase)
    }

    /// Magnitude as `f64`, possibly infinite.
    pub fn abs(&self) -> f64 {
        self.log_magnitude.exp()
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::ZERO;
        }
        Self::new(
            self.log_magnitude + other.log_magnitude,
            self.phase + other.phase,
        )
    }

    /// Division; `None` when dividing by the exact zero.
    pub fn checked_div(self, other: Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::ZERO);
        }
        Some(Self::new(
            self.log_magnitude - other.log_magnitude,
            self.phase - other.phase,
        ))
    }

    pub fn recip(self) -> Option<Self> {
        Self::ONE.checked_div(self)
    }

    pub fn neg(self) -> Self {
        if self.is_zero() {
            return self;
        }
        Self::new(self.log_magnitude, self.phase + PI)
    }

    /// Overflow-safe addition.
    pub fn add(self, other: Self) -> Self {
        sum_scaled(&[self, other])
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    /// `self^exponent` on the principal branch.
    pub fn powc(self, exponent: Complex64) -> Option<Self> {
        if self.is_zero() {
            if exponent.re > 0.0 {
                return Some(Self::ZERO);
            }
            if exponent == Complex64::new(0.0, 0.0) {
                return Some(Self::ONE);
            }
            return None;
        }
        let log = Complex64::new(self.log_magnitude, self.phase) * exponent;
        Some(Self::from_log(log))
    }
}

impl fmt::Display for SignedLogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "exp({} + {}i)", self.log_magnitude, self.phase)
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    re: f64,
    re_carry: f64,
    im: f64,
    im_carry: f64,
}

fn neumaier(sum: &mut f64, carry: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *carry += (*sum - t) + x;
    } else {
        *carry += (x - t) + *sum;
    }
    *sum = t;
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, &mut self.re_carry, z.re);
        neumaier(&mut self.im, &mut self.im_carry, z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_carry, self.im + self.im_carry)
    }
}

impl FromIterator<Complex64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Sums log-represented values: factors out the largest magnitude, adds the
/// rescaled terms with compensation, and rescales once at the end.
pub fn sum_scaled(terms: &[SignedLogValue]) -> SignedLogValue {
    let scale = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_magnitude)
        .fold(f64::NEG_INFINITY, f64::max);
    if scale == f64::NEG_INFINITY {
        return SignedLogValue::ZERO;
    }
    let acc: CompensatedSum = terms.iter().map(|t| t.to_complex_scaled(scale)).collect();
    let v = acc.value();
    if v.re == 0.0 && v.im == 0.0 {
        return SignedLogValue::ZERO;
    }
    SignedLogValue::new(scale + v.norm().ln(), v.arg())
}

/// `ln(sin(pi*z))` without overflow for large `|Im z|`, up to a multiple of
/// `2*pi*i`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let r = z.re.round();
    let w = Complex64::new(z.re - r, z.im) * PI;
    // sin(pi*z) = (-1)^r sin(pi*w)
    let sign = if (r as i64).rem_euclid(2) == 1 {
        Complex64::new(0.0, PI)
    } else {
        Complex64::new(0.0, 0.0)
    };
    let i = Complex64::i();
    let body = if w.im.abs() < 20.0 {
        w.sin().ln()
    } else if w.im > 0.0 {
        // sin w = e^{-iw} (1 - e^{2iw}) * i/2
        -i * w + ((Complex64::new(1.0, 0.0) - (i * w * 2.0).exp()) * (i * 0.5)).ln()
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) * (-i/2)
        i * w + ((Complex64::new(1.0, 0.0) - (-i * w * 2.0).exp()) * (-i * 0.5)).ln()
    };
    body + sign
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let zm1 = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += *c / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (zm1 + 0.5) * t.ln() - t + HALF_LN_TWO_PI + series.ln()
}

/// Principal logarithm of `Γ(z)` (imaginary part in (-π, π]).
pub fn log_gamma(z: Complex64) -> Result<Complex64, NumericsError> {
    check_finite(z)?;
    if near_nonpositive_integer(z, GAMMA_POLE_TOL).is_some() {
        return Err(NumericsError::Pole { re: z.re, im: z.im });
    }
    let raw = if z.re < 0.5 {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln_gamma(Complex64::new(1.0, 0.0) - z)
    } else {
        lanczos_ln_gamma(z)
    };
    Ok(Complex64::new(raw.re, normalize_phase(raw.im)))
}

pub fn gamma(z: Complex64) -> Result<Complex64, NumericsError> {
    let v = log_gamma(z)?.exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::Overflow)
    }
}

/// `1/Γ(z)` in log form; exact zero at (numerical) nonpositive integers.
pub fn reciprocal_gamma(z: Complex64) -> Result<SignedLogValue, NumericsError> {
    check_finite(z)?;
    if near_nonpositive_integer(z, RECIP_GAMMA_ZERO_TOL).is_some() {
        return Ok(SignedLogValue::ZERO);
    }
    Ok(SignedLogValue::from_log(-log_gamma(z)?))
}

/// Rising factorial `(x)_n = x(x+1)...(x+n-1)` by direct product.
pub fn pochhammer(x: Complex64, n: u64) -> Complex64 {
    let mut p = Complex64::new(1.0, 0.0);
    for j in 0..n {
        p *= x + j as f64;
    }
    p
}

/// Complex product with power-of-two rescaling so that long products neither
/// overflow nor lose relative accuracy.
#[derive(Debug, Clone, Copy)]
pub struct ScaledProduct {
    mantissa: Complex64,
    exp2: i64,
}

impl Default for ScaledProduct {
    fn default() -> Self {
        ScaledProduct {
            mantissa: Complex64::new(1.0, 0.0),
            exp2: 0,
        }
    }
}

impl ScaledProduct {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mul(&mut self, z: Complex64) {
        self.mantissa *= z;
        self.renormalize();
    }

    pub fn div(&mut self, z: Complex64) {
        self.mantissa /= z;
        self.renormalize();
    }

    fn renormalize(&mut self) {
        let m = self.mantissa.re.abs().max(self.mantissa.im.abs());
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = m.log2().floor() as i64;
        if e.abs() > 256 {
            self.mantissa *= 2f64.powi(-e as i32);
            self.exp2 += e;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    pub fn value(&self) -> SignedLogValue {
        if self.is_zero() {
            return SignedLogValue::ZERO;
        }
        SignedLogValue::new(
            self.mantissa.norm().ln() + self.exp2 as f64 * std::f64::consts::LN_2,
            self.mantissa.arg(),
        )
    }
}

/// `(x)_n` in log form; exact zero when a factor vanishes.
pub fn pochhammer_log(x: Complex64, n: u64) -> SignedLogValue {
    let mut p = ScaledProduct::new();
    for j in 0..n {
        let f = x + j as f64;
        if f.re == 0.0 && f.im == 0.0 {
            return SignedLogValue::ZERO;
        }
        p.mul(f);
    }
    p.value()
}

/// `Π Γ(numerators) / Π Γ(denominators)` accumulated in log space.
pub fn gamma_quotient(
    numerators: &[Complex64],
    denominators: &[Complex64],
) -> Result<SignedLogValue, NumericsError> {
    let mut log_sum = Complex64::new(0.0, 0.0);
    for (index, &z) in numerators.iter().enumerate() {
        check_finite(z)?;
        match log_gamma(z) {
            Ok(l) => log_sum += l,
            Err(NumericsError::Pole { re, im }) => {
                return Err(NumericsError::NumeratorPole { index, re, im })
            }
            Err(e) => return Err(e),
        }
    }
    let mut zero = false;
    for &z in denominators {
        let r = reciprocal_gamma(z)?;
        if r.is_zero() {
            zero = true;
        } else {
            log_sum += Complex64::new(r.log_magnitude(), r.phase());
        }
    }
    if zero {
        return Ok(SignedLogValue::ZERO);
    }
    Ok(SignedLogValue::from_log(log_sum))
}

/// Exact binomial coefficient as `f64`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

/// `ln(k!)` for a nonnegative integer.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k <= 170 {
        let mut p = ScaledProduct::new();
        for j in 2..=k {
            p.mul(Complex64::new(j as f64, 0.0));
        }
        return p.value().log_magnitude();
    }
    lanczos_ln_gamma(Complex64::new(k as f64 + 1.0, 0.0)).re
}
