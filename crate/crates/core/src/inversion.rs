//! Triangular inverse pair of Bressoud-Gasper type.
//!
//! With `w = (x - y)/z` the forward map is
//!
//! ```text
//! f(n) = sum_k (-1)^k C(n,k) (x+zk+k)/(x+zn)_{1+k} (y-zk+k)/(y-zn)_{1+k} (w+k)_n g(k)
//! ```
//!
//! and the backward map is
//!
//! ```text
//! g(n) = sum_k (-1)^k C(n,k) (x+zk)_n (y-zk)_n (w+2k)/(w+n)_{1+k} f(k).
//! ```
//!
//! Both sums cancel heavily. With |z| near 3 and n = 10 a roundtrip passes
//! through values near 1e21 that must cancel back to O(1), a loss of about 24
//! digits. The transforms therefore run in 256-bit complex arithmetic, and
//! [`roundtrip_error`] keeps the intermediate sequence at that precision.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;


/// Contexts whose smallest guarded factor is below this are rejected by
/// samplers.
pub const GUARD_MIN: f64 = 1e-4;
/// A guarded factor smaller than this makes a transform fail outright.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InversionError {
    #[error("degenerate context: factor {factor} has magnitude {magnitude:e} at n={n}, j={j}")]
    Degenerate {
        factor: &'static str,
        n: usize,
        j: usize,
        magnitude: f64,
    },
    #[error("z must be nonzero")]
    ZeroStep,
    #[error("sequence has {got} values, {needed} needed")]
    ShortSequence { needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionContext {
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

use crate::wide::Wide;

fn norm(v: &Wide) -> f64 {
    v.to_c64().norm()
}

fn poch(a: &Wide, m: usize) -> Wide {
    (0..m).fold(Wide::real(1.0), |acc, j| &acc * &(a + &Wide::real(j as f64)))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64).round()
}

impl InversionContext {
    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Result<Self, InversionError> {
        if z == Complex64::new(0.0, 0.0) {
            return Err(InversionError::ZeroStep);
        }
        Ok(InversionContext { x, y, z })
    }

    /// `(x - y)/z`.
    pub fn w(&self) -> Complex64 {
        (self.x - self.y) / self.z
    }

    fn wide(&self) -> (Wide, Wide, Wide, Wide) {
        let (x, y, z) = (Wide::from_c64(self.x), Wide::from_c64(self.y), Wide::from_c64(self.z));
        let w = (&x - &y).div(&z);
        (x, y, z, w)
    }

    /// Smallest magnitude among the factors of `(x+zn)_{1+k}`, `(y-zn)_{1+k}`
    /// and `(w+n)_{1+k}` for `0 <= k <= n <= n_max`, with its location.
    pub fn guard(&self, n_max: usize) -> (f64, &'static str, usize, usize) {
        let w = self.w();
        let mut best = (f64::INFINITY, "x+zn+j", 0, 0);
        for n in 0..=n_max {
            let nf = n as f64;
            let bases = [
                ("x+zn+j", self.x + self.z * nf),
                ("y-zn+j", self.y - self.z * nf),
                ("w+n+j", w + nf),
            ];
            for j in 0..=n {
                for (name, base) in bases {
                    let m = (base + j as f64).norm();
                    if m < best.0 {
                        best = (m, name, n, j);
                    }
                }
            }
        }
        best
    }

    /// Smallest guarded factor magnitude up to `n_max`.
    pub fn guard_margin(&self, n_max: usize) -> f64 {
        self.guard(n_max).0
    }

    pub fn is_well_posed(&self, n_max: usize) -> bool {
        self.guard_margin(n_max) >= GUARD_MIN
    }

    fn check(&self, n: usize) -> Result<(), InversionError> {
        let (magnitude, factor, n_at, j) = self.guard(n);
        if magnitude.is_nan() || magnitude < DEGENERATE_TOL {
            return Err(InversionError::Degenerate {
                factor,
                n: n_at,
                j,
                magnitude,
            });
        }
        Ok(())
    }
}

fn need(len: usize, n: usize) -> Result<(), InversionError> {
    if len < n + 1 {
        return Err(InversionError::ShortSequence { needed: n + 1, got: len });
    }
    Ok(())
}

fn forward2(g: &[Wide], ctx: &InversionContext, n: usize) -> Wide {
    let (x, y, z, w) = ctx.wide();
    let nf = Wide::real(n as f64);
    let zn = &z * &nf;
    let (xn, yn) = (&x + &zn, &y - &zn);
    let mut den = Wide::real(1.0);
    let mut acc = Wide::real(0.0);
    for (k, gk) in g.iter().enumerate().take(n + 1) {
        let kf = Wide::real(k as f64);
        den = &den * &(&(&xn + &kf) * &(&yn + &kf));
        let zk = &z * &kf;
        let num = &(&(&(&x + &zk) + &kf) * &(&(&y - &zk) + &kf)) * &poch(&(&w + &kf), n);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = &acc + &(&num.div(&den) * gk).scale(sign * binom(n, k));
    }
    acc
}

fn backward2(f: &[Wide], ctx: &InversionContext, n: usize) -> Wide {
    let (x, y, z, w) = ctx.wide();
    let wn = &w + &Wide::real(n as f64);
    let mut den = Wide::real(1.0);
    let mut acc = Wide::real(0.0);
    for (k, fk) in f.iter().enumerate().take(n + 1) {
        let kf = Wide::real(k as f64);
        den = &den * &(&wn + &kf);
        let zk = &z * &kf;
        let num = &(&poch(&(&x + &zk), n) * &poch(&(&y - &zk), n)) * &(&w + &Wide::real(2.0 * k as f64));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc = &acc + &(&num.div(&den) * fk).scale(sign * binom(n, k));
    }
    acc
}

/// `f(n)` from `g(0..=n)`.
pub fn forward_transform(g: &[Complex64], ctx: &InversionContext, n: usize) -> Result<Complex64, InversionError> {
    need(g.len(), n)?;
    ctx.check(n)?;
    let g: Vec<Wide> = g[..=n].iter().copied().map(Wide::from_c64).collect();
    Ok(forward2(&g, ctx, n).to_c64())
}

/// `g(n)` from `f(0..=n)`.
pub fn backward_transform(f: &[Complex64], ctx: &InversionContext, n: usize) -> Result<Complex64, InversionError> {
    need(f.len(), n)?;
    ctx.check(n)?;
    let f: Vec<Wide> = f[..=n].iter().copied().map(Wide::from_c64).collect();
    Ok(backward2(&f, ctx, n).to_c64())
}

pub fn forward_sequence(g: &[Complex64], ctx: &InversionContext, n_max: usize) -> Result<Vec<Complex64>, InversionError> {
    (0..=n_max).map(|n| forward_transform(g, ctx, n)).collect()
}

pub fn backward_sequence(f: &[Complex64], ctx: &InversionContext, n_max: usize) -> Result<Vec<Complex64>, InversionError> {
    (0..=n_max).map(|n| backward_transform(f, ctx, n)).collect()
}

/// Largest relative deviation `|s - r| / max(1, |s|, |r|)` after mapping
/// `seq` forward then back, and back then forward.
pub fn roundtrip_error(seq: &[Complex64], ctx: &InversionContext, n_max: usize) -> Result<f64, InversionError> {
    need(seq.len(), n_max)?;
    ctx.check(n_max)?;
    let s: Vec<Wide> = seq[..=n_max].iter().copied().map(Wide::from_c64).collect();
    let fwd: Vec<Wide> = (0..=n_max).map(|n| forward2(&s, ctx, n)).collect();
    let bwd: Vec<Wide> = (0..=n_max).map(|n| backward2(&s, ctx, n)).collect();
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        for back in [backward2(&fwd, ctx, n), forward2(&bwd, ctx, n)] {
            let (a, b) = (seq[n], back.to_c64());
            let err = norm(&(&s[n] - &back)) / 1f64.max(a.norm()).max(b.norm());
            worst = worst.max(if err.is_nan() { f64::INFINITY } else { err });
        }
    }
    Ok(worst)
}

/// Deterministic random context and sequence for trial `trial` under `seed`:
/// `x, y, z` and the sequence entries are uniform in `[-3,3] x [-1,1]`,
/// contexts with a guarded factor below [`GUARD_MIN`] are redrawn.
pub fn sample_case(seed: u64, trial: u64, n_max: usize) -> Option<(InversionContext, Vec<Complex64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let draw = |rng: &mut ChaCha8Rng| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0));
    for _ in 0..1000 {
        let (x, y, z) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
        if z.norm() < GUARD_MIN {
            continue;
        }
        let ctx = InversionContext { x, y, z };
        if ctx.is_well_posed(n_max) {
            let seq = (0..=n_max).map(|_| draw(&mut rng)).collect();
            return Some((ctx, seq));
        }
    }
    None
}

/// Random sequence for a fixed context.
pub fn sample_sequence(seed: u64, trial: u64, len: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..len)
        .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-1.0..1.0)))
        .collect()
}
