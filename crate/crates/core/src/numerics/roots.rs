//! Bracketing root finder for monotone functions.
//!
//! The bracket is grown geometrically from a seed inside an open domain
//! until the function changes sign, then refined with Brent's method
//! (inverse quadratic interpolation / secant steps guarded by bisection).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// Relative tolerance on the root location.
    pub tol: f64,
    pub max_iter: usize,
    /// Geometric factor applied when growing the bracket.
    pub bracket_growth: f64,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 200,
            bracket_growth: 2.0,
        }
    }
}

impl RootSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter < 10 || !(self.bracket_growth > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "root spec requires tol > 0, max_iter >= 10, growth > 1 (got {:?})",
                self
            )));
        }
        Ok(())
    }
}

/// Open search domain `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
}

impl Domain {
    pub const POSITIVE: Domain = Domain {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn up(&self, x: f64, growth: f64) -> f64 {
        if self.hi.is_finite() {
            self.hi - (self.hi - x) / growth
        } else if self.lo.is_finite() {
            self.lo + (x - self.lo) * growth
        } else {
            x + x.abs().max(1.0) * (growth - 1.0)
        }
    }

    fn down(&self, x: f64, growth: f64) -> f64 {
        if self.lo.is_finite() {
            self.lo + (x - self.lo) / growth
        } else if self.hi.is_finite() {
            self.hi - (self.hi - x) * growth
        } else {
            x - x.abs().max(1.0) * (growth - 1.0)
        }
    }
}

/// Finds the root of a monotone `f` inside `domain`, starting from `seed`.
pub fn solve_root<F>(f: F, seed: f64, domain: Domain, spec: &RootSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(seed > domain.lo && seed < domain.hi) {
        return Err(Error::InvalidParameter(format!(
            "seed {seed} outside ({}, {})",
            domain.lo, domain.hi
        )));
    }
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_nan() {
            Err(Error::NonFiniteFunction { x })
        } else {
            Ok(v)
        }
    };
    let (a, fa, b, fb) = expand_bracket(&eval, seed, domain, spec)?;
    brent(&eval, a, fa, b, fb, spec)
}

type Bracket = (f64, f64, f64, f64);

fn expand_bracket<E>(eval: &E, seed: f64, domain: Domain, spec: &RootSpec) -> Result<Bracket>
where
    E: Fn(f64) -> Result<f64>,
{
    let f0 = eval(seed)?;
    if f0 == 0.0 {
        return Ok((seed, f0, seed, f0));
    }
    let growth = spec.bracket_growth;
    let x1 = domain.up(seed, growth);
    let f1 = eval(x1)?;
    if f1 == 0.0 || f0.signum() != f1.signum() {
        return Ok((seed, f0, x1, f1));
    }
    // Monotone: heading toward the root shrinks |f|.
    let upward = f1.abs() < f0.abs();
    let (mut x, mut fx) = if upward { (x1, f1) } else { (seed, f0) };
    for _ in 0..spec.max_iter {
        let next = if upward {
            domain.up(x, growth)
        } else {
            domain.down(x, growth)
        };
        if next == x || !next.is_finite() {
            break;
        }
        let fnext = eval(next)?;
        if fnext == 0.0 || fnext.signum() != fx.signum() {
            return Ok((x, fx, next, fnext));
        }
        x = next;
        fx = fnext;
    }
    Err(Error::BracketNotFound {
        seed,
        iterations: spec.max_iter,
    })
}

fn brent<E>(eval: &E, a0: f64, fa0: f64, b0: f64, fb0: f64, spec: &RootSpec) -> Result<f64>
where
    E: Fn(f64) -> Result<f64>,
{
    if fa0 == 0.0 {
        return Ok(a0);
    }
    if fb0 == 0.0 {
        return Ok(b0);
    }
    let (mut a, mut fa, mut b, mut fb) = (a0, fa0, b0, fb0);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..spec.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.tol * b.abs();
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1.max(f64::MIN_POSITIVE).copysign(xm)
        };
        fb = eval(b)?;
    }
    Err(Error::MaxIterations(spec.max_iter))
}
