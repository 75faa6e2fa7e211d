//! Double-double arithmetic (about 31 significant digits) for sums whose
//! terms cancel far beyond f64 resolution.
//!
//! `twofloat` supplies the `+ - *` kernels; its quotient and transcendental
//! functions fall short of double-double accuracy, so division is refined by
//! a Newton step and `exp`, `ln`, `sin_cos`, `atan2` and the log-gamma
//! function are implemented here.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

pub(crate) type Dd = TwoFloat;
pub(crate) type Cdd = Complex<TwoFloat>;

#[allow(clippy::approx_constant)]
const PI: (f64, f64) = (3.141592653589793, 1.2246467991473532e-16);
#[allow(clippy::approx_constant)]
const FRAC_PI_2: (f64, f64) = (1.5707963267948966, 6.123233995736766e-17);
#[allow(clippy::approx_constant)]
const LN_2: (f64, f64) = (0.6931471805599453, 2.3190468138462996e-17);
const LN_PI: (f64, f64) = (1.1447298858494002, 1.0265951162707826e-17);
const HALF_LN_2PI: (f64, f64) = (0.9189385332046728, -3.8782941580672414e-17);

/// Stirling shift threshold: at `Re z >= 30` fifteen correction terms reach
/// 1e-34.
const STIRLING_MIN: f64 = 30.0;
/// `B_2j` as (numerator, denominator), j = 1..=15.
const BERNOULLI: [(f64, f64); 15] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
];

fn pair(c: (f64, f64)) -> Dd {
    TwoFloat::new_add(c.0, c.1)
}

pub(crate) fn ln2() -> Dd {
    pair(LN_2)
}

pub(crate) fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub(crate) fn up(z: Complex64) -> Cdd {
    Cdd::new(dd(z.re), dd(z.im))
}

pub(crate) fn real(x: f64) -> Cdd {
    Cdd::new(dd(x), dd(0.0))
}

pub(crate) fn to_f64(x: Dd) -> f64 {
    x.hi() + x.lo()
}

pub(crate) fn down(z: Cdd) -> Complex64 {
    Complex64::new(to_f64(z.re), to_f64(z.im))
}

pub(crate) fn div(a: Dd, b: Dd) -> Dd {
    let q = a / b;
    q + (a - q * b) / b
}

pub(crate) fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let d = b.re * b.re + b.im * b.im;
    let n = a * b.conj();
    Cdd::new(div(n.re, d), div(n.im, d))
}

/// Multiplies by `2^k` exactly.
fn ldexp(x: Dd, k: i32) -> Dd {
    let half = k / 2;
    let (a, b) = (2f64.powi(half), 2f64.powi(k - half));
    x * a * b
}

pub(crate) fn exp(x: Dd) -> Dd {
    let h = x.hi();
    if h > 709.8 {
        return dd(f64::INFINITY);
    }
    if h < -745.2 {
        return dd(0.0);
    }
    let k = (h / LN_2.0).round();
    let r = ldexp(x - pair(LN_2) * k, -10);
    // e^r - 1 by Taylor, then (1+p)^2 - 1 = 2p + p^2 ten times.
    let mut term = r;
    let mut p = r;
    for j in 2..=12 {
        term = div(term * r, dd(j as f64));
        p += term;
    }
    for _ in 0..10 {
        p = p * 2.0 + p * p;
    }
    ldexp(p + 1.0, k as i32)
}

pub(crate) fn ln(x: Dd) -> Dd {
    let mut y = dd(x.hi().ln());
    if !y.hi().is_finite() {
        return y;
    }
    for _ in 0..2 {
        y = y + x * exp(-y) - 1.0;
    }
    y
}

pub(crate) fn sin_cos(x: Dd) -> (Dd, Dd) {
    let q = (x.hi() / FRAC_PI_2.0).round();
    let r = x - pair(FRAC_PI_2) * q;
    let r2 = r * r;
    let (mut s, mut c) = (r, dd(1.0));
    let (mut ts, mut tc) = (r, dd(1.0));
    for j in 1..=14 {
        let j = j as f64;
        ts = -div(ts * r2, dd((2.0 * j) * (2.0 * j + 1.0)));
        tc = -div(tc * r2, dd((2.0 * j - 1.0) * (2.0 * j)));
        s += ts;
        c += tc;
    }
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub(crate) fn atan2(y: Dd, x: Dd) -> Dd {
    let mut t = dd(y.hi().atan2(x.hi()));
    for _ in 0..2 {
        let (s, c) = sin_cos(t);
        t += div(y * c - x * s, x * c + y * s);
    }
    t
}

/// Principal logarithm.
pub(crate) fn cln(z: Cdd) -> Cdd {
    let m = z.re * z.re + z.im * z.im;
    Cdd::new(ln(m) * 0.5, atan2(z.im, z.re))
}

pub(crate) fn cexp(z: Cdd) -> Cdd {
    let m = exp(z.re);
    let (s, c) = sin_cos(z.im);
    Cdd::new(m * c, m * s)
}

/// `ln sin(πz)` up to a multiple of 2πi, without overflow for large `|Im z|`.
fn ln_sin_pi(z: Cdd) -> Cdd {
    let i = Cdd::new(dd(0.0), dd(1.0));
    let w = z * pair(PI);
    let two_i = Cdd::new(dd(0.0), dd(2.0));
    if w.im.hi() >= 0.0 {
        // sin w = e^{-iw} (e^{2iw} - 1) / (2i)
        -(i * w) + cln(cdiv(cexp(i * w * dd(2.0)) - real(1.0), two_i))
    } else {
        // sin w = e^{iw} (1 - e^{-2iw}) / (2i)
        i * w + cln(cdiv(real(1.0) - cexp(-(i * w * dd(2.0))), two_i))
    }
}

/// A logarithm of `Γ(z)`; only `exp` of the result is meaningful. `z` must
/// not be a pole.
pub(crate) fn ln_gamma(z: Cdd) -> Cdd {
    if z.re.hi() < 0.5 {
        let one_minus = real(1.0) - z;
        return Cdd::new(pair(LN_PI), dd(0.0)) - ln_sin_pi(z) - ln_gamma(one_minus);
    }
    let mut w = z;
    let mut shift = real(1.0);
    let mut shifted = false;
    while w.re.hi() < STIRLING_MIN {
        shift *= w;
        w.re += 1.0;
        shifted = true;
    }
    let inv = cdiv(real(1.0), w);
    let inv2 = inv * inv;
    let mut series = real(0.0);
    let mut pow = inv;
    for (j, (num, den)) in BERNOULLI.iter().enumerate() {
        let j = (j + 1) as f64;
        let c = div(dd(*num), dd(den * (2.0 * j) * (2.0 * j - 1.0)));
        series += pow * c;
        pow *= inv2;
    }
    let lw = cln(w);
    let mut out = (w - real(0.5)) * lw - w + Cdd::new(pair(HALF_LN_2PI), dd(0.0)) + series;
    if shifted {
        out -= cln(shift);
    }
    out
}

/// Double-double complex value with a separate binary exponent, so products
/// of many gamma factors neither overflow nor lose the low word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Xv {
    m: Cdd,
    e: i64,
}

impl Xv {
    pub(crate) fn zero() -> Self {
        Xv { m: real(0.0), e: 0 }
    }

    pub(crate) fn one() -> Self {
        Xv { m: real(1.0), e: 0 }
    }

    pub(crate) fn new(m: Cdd) -> Self {
        Xv { m, e: 0 }.normalized()
    }

    pub(crate) fn from_log(l: Cdd) -> Self {
        let k = (l.re.hi() / LN_2.0).floor();
        let m = cexp(l - Cdd::new(pair(LN_2) * k, dd(0.0)));
        Xv { m, e: k as i64 }.normalized()
    }

    fn normalized(self) -> Self {
        let big = self.m.re.hi().abs().max(self.m.im.hi().abs());
        if big == 0.0 || !big.is_finite() {
            return Xv { m: self.m, e: if big == 0.0 { 0 } else { self.e } };
        }
        let s = big.log2().floor() as i32;
        Xv {
            m: Cdd::new(ldexp(self.m.re, -s), ldexp(self.m.im, -s)),
            e: self.e + s as i64,
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.m.re.hi() == 0.0 && self.m.im.hi() == 0.0
    }

    pub(crate) fn mul(self, o: Xv) -> Xv {
        Xv { m: self.m * o.m, e: self.e + o.e }.normalized()
    }

    pub(crate) fn div(self, o: Xv) -> Option<Xv> {
        (!o.is_zero()).then(|| Xv { m: cdiv(self.m, o.m), e: self.e - o.e }.normalized())
    }

    pub(crate) fn neg(self) -> Xv {
        Xv { m: -self.m, e: self.e }
    }

    pub(crate) fn add(self, o: Xv) -> Xv {
        if self.is_zero() {
            return o;
        }
        if o.is_zero() {
            return self;
        }
        let (big, small) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = big.e - small.e;
        if d > 200 {
            return big;
        }
        let s = Cdd::new(ldexp(small.m.re, -(d as i32)), ldexp(small.m.im, -(d as i32)));
        Xv { m: big.m + s, e: big.e }.normalized()
    }

    pub(crate) fn sub(self, o: Xv) -> Xv {
        self.add(o.neg())
    }

    /// Principal logarithm; `None` at zero.
    pub(crate) fn ln(&self) -> Option<Cdd> {
        (!self.is_zero()).then(|| cln(self.m) + Cdd::new(pair(LN_2) * self.e as f64, dd(0.0)))
    }

    /// `(ln |v|, arg v)` rounded to f64.
    pub(crate) fn log_parts(&self) -> Option<(f64, f64)> {
        self.ln().map(|l| (to_f64(l.re), to_f64(l.im)))
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;

    fn p(hi: f64, lo: f64) -> Dd {
        TwoFloat::new_add(hi, lo)
    }

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        to_f64(a - b).abs() <= tol * to_f64(b).abs().max(1.0)
    }

    #[test]
    fn division_is_refined() {
        let q = div(dd(1.0), dd(3.0));
        assert!(to_f64(q * 3.0 - 1.0).abs() < 1e-32);
    }

    #[test]
    fn elementary_functions_reach_double_double() {
        // mpmath at 40 digits
        assert!(close(exp(dd(0.7)), p(2.01375270747047663e0, -2.00582435497647925e-16), 1e-30));
        assert!(close(exp(dd(123.456)), p(4.13294435277810607e53, 6.70292574976417973e36), 1e-30));
        assert!(close(ln(dd(0.7)), p(-3.56674943938732447e-1, 4.82556379937662015e-18), 1e-30));
        assert!(close(ln(dd(123.456)), p(4.81588481728326379e0, 1.22247235908693974e-16), 1e-30));
        let (s, c) = sin_cos(dd(0.7));
        assert!(close(s, p(6.44217687237691017e-1, 2.87405679273387551e-18), 1e-30));
        assert!(close(c, p(7.64842187284488495e-1, -4.01378043402223813e-17), 1e-30));
        let (s, _) = sin_cos(dd(123.456));
        assert!(close(s, p(-8.03937368572823940e-1, 2.28483897362952667e-17), 1e-29));
        assert!(close(atan2(dd(0.3), dd(-0.9)), p(2.81984209919315099e0, 7.75398532348412888e-17), 1e-30));
    }

    #[test]
    fn ln_gamma_matches_reference() {
        // (z, loggamma(z) as hi/lo pairs) from mpmath at 50 digits
        let cases = [
            ((0.3, 0.2), (0.8894083505732667, 9.324701476706293e-18), (-0.620261006882483, 4.825259841241776e-17)),
            ((-2.7, 1.3), (-3.4189099208755755, -2.826832707510287e-17), (-8.502127981427753, 6.334003041030392e-16)),
            ((12.5, -40.2), (-17.727312343988398, -1.7218845968901157e-15), (-125.37860992026066, 1.6139977481625722e-15)),
            ((-0.5, -0.01), (1.265065463940397, -3.8384406680326486e-17), (3.1412276157201284, 1.2626268184438314e-16)),
            ((45.1, 3.3), (125.57496547989601, 6.643963347877517e-15), (12.535596614561138, 6.184693882054165e-16)),
            ((0.001, 0.0), (6.907178885383853, 2.777556825107376e-16), (0.0, 0.0)),
        ];
        let two_pi = pair(PI) * 2.0;
        for ((x, y), re, im) in cases {
            let (re, im) = (p(re.0, re.1), p(im.0, im.1));
            let v = ln_gamma(up(Complex64::new(x, y)));
            assert!(close(v.re, re, 1e-29), "{x}+{y}i re {:?}", v.re);
            let turns = to_f64(div(v.im - im, two_pi)).round();
            assert!(close(v.im - two_pi * turns, im, 1e-29), "{x}+{y}i im {:?}", v.im);
        }
    }
}
