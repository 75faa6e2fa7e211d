//! 256-bit complex arithmetic for the inverse pair, whose sums can cancel by
//! more than twenty orders of magnitude.

use std::ops::{Add, Mul, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use num_complex::Complex64;

pub(crate) const PRECISION: usize = 256;

type F = FBig<HalfEven, 2>;

fn lift(x: f64) -> F {
    F::try_from(x).expect("finite input").with_precision(PRECISION).value()
}

fn lower(x: &F) -> f64 {
    x.to_f64().value()
}

#[derive(Debug, Clone)]
pub(crate) struct Wide {
    re: F,
    im: F,
}

impl Wide {
    pub(crate) fn real(x: f64) -> Self {
        Wide {
            re: lift(x),
            im: lift(0.0),
        }
    }

    pub(crate) fn from_c64(z: Complex64) -> Self {
        Wide {
            re: lift(z.re),
            im: lift(z.im),
        }
    }

    pub(crate) fn to_c64(&self) -> Complex64 {
        Complex64::new(lower(&self.re), lower(&self.im))
    }

    /// `self / d`; `d` must be nonzero.
    pub(crate) fn div(&self, d: &Wide) -> Wide {
        let m = &d.re * &d.re + &d.im * &d.im;
        Wide {
            re: (&self.re * &d.re + &self.im * &d.im) / &m,
            im: (&self.im * &d.re - &self.re * &d.im) / &m,
        }
    }

    pub(crate) fn scale(&self, s: f64) -> Wide {
        let s = lift(s);
        Wide {
            re: &self.re * &s,
            im: &self.im * &s,
        }
    }
}

impl Add for &Wide {
    type Output = Wide;
    fn add(self, o: &Wide) -> Wide {
        Wide {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl Sub for &Wide {
    type Output = Wide;
    fn sub(self, o: &Wide) -> Wide {
        Wide {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl Mul for &Wide {
    type Output = Wide;
    fn mul(self, o: &Wide) -> Wide {
        Wide {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_is_exact_to_working_precision() {
        let a = Wide::from_c64(Complex64::new(1.0, 2.0));
        let b = Wide::from_c64(Complex64::new(3.0, -0.5));
        let back = &a.div(&b) * &b;
        let err = &back - &a;
        // 2^-256 relative, far below anything representable after rounding.
        assert!(lower(&err.re).abs() < 1e-70 && lower(&err.im).abs() < 1e-70);
        assert_eq!(back.to_c64(), Complex64::new(1.0, 2.0));
    }

    #[test]
    fn cancellation_survives() {
        let big = Wide::real(1e30);
        let one = Wide::real(1.0);
        let v = &(&big + &one) - &big;
        assert_eq!(v.to_c64(), Complex64::new(1.0, 0.0));
    }
}
