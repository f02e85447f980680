//! Double-exponential quadrature.
//!
//! Finite intervals use the tanh-sinh map `x = mid + half * tanh(π/2 sinh t)`,
//! half-lines use the exp-sinh map `x = lo + exp(π/2 sinh t)`. Both cluster
//! nodes double-exponentially at the finite endpoints, which absorbs the
//! algebraic endpoint singularities produced by deformations such as
//! `(1 - βP²)^{-k}`. Levels halve the step and reuse every previous node.
//!
//! Nodes are generated as offsets from the endpoints. Plain integrands skip a
//! node whose abscissa rounds onto an endpoint; [`integrate_with_edges`]
//! integrands receive the exact offsets instead and are always evaluated.

use std::f64::consts::FRAC_PI_2;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerances and level budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_levels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_levels: 12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t < 1.0;
        if !ok(self.rel_tol) || !ok(self.abs_tol) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerances must lie in (0, 1), got rel {} abs {}",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.max_levels < 3 {
            return Err(Error::InvalidParameter(format!(
                "max_levels must be at least 3, got {}",
                self.max_levels
            )));
        }
        Ok(())
    }
}

/// Integral value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T = f64> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

/// Values the quadrature engine can accumulate.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    const ZERO: Self;
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl Integrand for f64 {
    const ZERO: Self = 0.0;
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Integrand for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Largest |t| visited by either map; beyond it every weight has underflowed.
const T_MAX: f64 = 6.8;
/// Upper cut on exp-sinh abscissae.
const X_CEILING: f64 = 1e200;
const MIN_LEVELS: usize = 3;

/// Integrates a real function over `[lo, hi]`; either end may be infinite.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let (a, b) = (lo.min(hi), lo.max(hi));
    integrate_generic(&|x, _, _| interior(&f, x, a, b), lo, hi, spec)
}

/// Nodes that round onto an endpoint contribute nothing to plain integrands.
#[inline]
fn interior<T: Integrand, F: Fn(f64) -> T>(f: &F, x: f64, lo: f64, hi: f64) -> T {
    if x <= lo || x >= hi {
        T::ZERO
    } else {
        f(x)
    }
}

/// Like [`integrate`], but the integrand also receives the exact distances
/// `(x - lo, hi - x)` to the endpoints. Singular factors such as `(hi - x)^{-k}`
/// should be written in terms of these distances: near a finite endpoint `x`
/// itself carries no more than machine precision relative to the endpoint.
pub fn integrate_with_edges<T, F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64, f64, f64) -> T,
{
    integrate_generic(&f, lo, hi, spec)
}

/// Complex-valued counterpart of [`integrate`]; real and imaginary parts share nodes.
pub fn integrate_complex<F>(
    f: F,
    lo: f64,
    hi: f64,
    spec: &QuadratureSpec,
) -> Result<Estimate<Complex64>>
where
    F: Fn(f64) -> Complex64,
{
    let (a, b) = (lo.min(hi), lo.max(hi));
    integrate_generic(&|x, _, _| interior(&f, x, a, b), lo, hi, spec)
}

fn integrate_generic<T, F>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64, f64, f64) -> T,
{
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::InvalidParameter("NaN integration limit".into()));
    }
    if lo == hi {
        return Ok(Estimate {
            value: T::ZERO,
            error: 0.0,
            evaluations: 0,
        });
    }
    if lo > hi {
        let r = integrate_ordered(&|x, dl, dh| f(x, dh, dl), hi, lo, spec)?;
        return Ok(Estimate {
            value: r.value * -1.0,
            ..r
        });
    }
    integrate_ordered(f, lo, hi, spec)
}

fn integrate_ordered<T, F>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64, f64, f64) -> T,
{
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => tanh_sinh(f, lo, hi, spec),
        (true, false) => exp_sinh(f, lo, spec),
        (false, true) => exp_sinh(&|y: f64, dl, dh| f(-y, dh, dl), -hi, spec),
        (false, false) => {
            let left = exp_sinh(&|y: f64, dl, dh| f(-y, dh, dl), 0.0, spec)?;
            let right = exp_sinh(f, 0.0, spec)?;
            Ok(Estimate {
                value: left.value + right.value,
                error: left.error + right.error,
                evaluations: left.evaluations + right.evaluations,
            })
        }
    }
}

/// Running state of a level-refined trapezoid sum in t.
struct Refinement<T> {
    value: T,
    l1: f64,
    evaluations: usize,
}

fn converge<T, S>(spec: &QuadratureSpec, mut level_sum: S) -> Result<Estimate<T>>
where
    T: Integrand,
    S: FnMut(usize, &mut Refinement<T>) -> Result<()>,
{
    let mut acc = Refinement {
        value: T::ZERO,
        l1: 0.0,
        evaluations: 0,
    };
    let mut previous: Option<T> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..spec.max_levels {
        level_sum(level, &mut acc)?;
        if let Some(prev) = previous {
            let diff = (acc.value + prev * -1.0).magnitude();
            last_diff = diff;
            let noise = 64.0 * f64::EPSILON * acc.l1;
            let tol = spec
                .abs_tol
                .max(spec.rel_tol * acc.value.magnitude())
                .max(noise);
            if level + 1 >= MIN_LEVELS && diff <= tol {
                return Ok(Estimate {
                    value: acc.value,
                    error: diff.max(noise),
                    evaluations: acc.evaluations,
                });
            }
        }
        previous = Some(acc.value);
    }
    Err(Error::QuadratureNotConverged {
        levels: spec.max_levels,
        estimate: acc.value.magnitude(),
        error: last_diff,
    })
}

/// Step and the t-offsets visited at a given level: level 0 covers every
/// integer, later levels only the odd multiples of the new step.
fn level_nodes(level: usize) -> (f64, f64, usize) {
    if level == 0 {
        (1.0, 1.0, 1)
    } else {
        let h = 0.5f64.powi(level as i32);
        (h, h, 2)
    }
}

fn tanh_sinh<T, F>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64, f64, f64) -> T,
{
    let half = 0.5 * (hi - lo);
    let mid = lo + half;
    converge(spec, |level, acc| {
        let (h, first, stride) = level_nodes(level);
        let mut sum = T::ZERO;
        let mut l1 = 0.0;
        if level == 0 {
            let v = eval(f, mid, half, half)?;
            sum = sum + v * FRAC_PI_2;
            l1 += FRAC_PI_2 * v.magnitude();
            acc.evaluations += 1;
        }
        let mut j = 0usize;
        loop {
            let t = first + (j * stride) as f64 * h;
            j += 1;
            if t > T_MAX {
                break;
            }
            let u = FRAC_PI_2 * t.sinh();
            let eu = u.exp();
            // 1 - tanh(u) and the Jacobian, both without cancellation.
            let complement = 2.0 / (1.0 + eu * eu);
            let cosh_u = 0.5 * (eu + 1.0 / eu);
            let w = FRAC_PI_2 * t.cosh() / (cosh_u * cosh_u);
            if complement == 0.0 || w == 0.0 || !w.is_finite() {
                break;
            }
            let offset = half * complement;
            // Subnormal distances carry no weight but can overflow an
            // integrable endpoint singularity.
            if offset < f64::MIN_POSITIVE {
                break;
            }
            for (x, dl, dh) in [
                (hi - offset, hi - lo - offset, offset),
                (lo + offset, offset, hi - lo - offset),
            ] {
                let v = eval(f, x, dl, dh)?;
                sum = sum + v * w;
                l1 += w * v.magnitude();
                acc.evaluations += 1;
            }
        }
        let scale = h * half;
        acc.value = if level == 0 {
            sum * scale
        } else {
            acc.value * 0.5 + sum * scale
        };
        acc.l1 = if level == 0 {
            l1 * scale
        } else {
            0.5 * acc.l1 + l1 * scale
        };
        Ok(())
    })
}

fn exp_sinh<T, F>(f: &F, lo: f64, spec: &QuadratureSpec) -> Result<Estimate<T>>
where
    T: Integrand,
    F: Fn(f64, f64, f64) -> T,
{
    converge(spec, |level, acc| {
        let (h, first, stride) = level_nodes(level);
        let mut sum = T::ZERO;
        let mut l1 = 0.0;
        let mut visit = |t: f64, acc: &mut Refinement<T>| -> Result<bool> {
            let s = FRAC_PI_2 * t.sinh();
            let e = s.exp();
            let w = FRAC_PI_2 * t.cosh() * e;
            if e == 0.0 || w == 0.0 {
                return Ok(false);
            }
            let x = lo + e;
            if !x.is_finite() || x > X_CEILING || !w.is_finite() {
                return Ok(false);
            }
            let v = eval(f, x, e, f64::INFINITY)?;
            sum = sum + v * w;
            l1 += w * v.magnitude();
            acc.evaluations += 1;
            Ok(true)
        };
        if level == 0 {
            visit(0.0, acc)?;
        }
        for sign in [1.0, -1.0] {
            let mut j = 0usize;
            loop {
                let t = first + (j * stride) as f64 * h;
                j += 1;
                if t > T_MAX || !visit(sign * t, acc)? {
                    break;
                }
            }
        }
        acc.value = if level == 0 {
            sum * h
        } else {
            acc.value * 0.5 + sum * h
        };
        acc.l1 = if level == 0 {
            l1 * h
        } else {
            0.5 * acc.l1 + l1 * h
        };
        Ok(())
    })
}

#[inline]
fn eval<T: Integrand, F: Fn(f64, f64, f64) -> T>(f: &F, x: f64, dl: f64, dh: f64) -> Result<T> {
    let v = f(x, dl, dh);
    if v.finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteIntegrand { x })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn lorentzian_half_line() {
        let r = integrate(|p| 1.0 / (1.0 + p * p), 0.0, f64::INFINITY, &spec()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn arcsine_endpoint_singularity() {
        let r = integrate_with_edges(|_, _, d| 1.0 / (d * (2.0 - d)).sqrt(), 0.0, 1.0, &spec())
            .unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-12, "{r:?}");
        // Plain abscissae lose the last ulp-wide sliver next to the singularity.
        let loose = QuadratureSpec {
            rel_tol: 1e-8,
            ..spec()
        };
        let r = integrate(|p| 1.0 / (1.0 - p * p).sqrt(), 0.0, 1.0, &loose).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-7, "{r:?}");
    }

    #[test]
    fn edge_distances_follow_reflections() {
        // Singular at the left end of a reversed, then a left-infinite, interval.
        let r = integrate_with_edges(|_, _, d| d.powf(-0.5), 1.0, 0.0, &spec()).unwrap();
        assert!((r.value + 2.0).abs() < 1e-12, "{r:?}");
        let r = integrate_with_edges(
            |x, _, d| d.powf(-0.5) * (x - 1.0).exp(),
            f64::NEG_INFINITY,
            1.0,
            &spec(),
        )
        .unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn partial_fractions_product() {
        // 1/((1+P²)(P²+4)) = (1/3)(1/(1+P²) - 1/(P²+4)), integral (1/3)(π/2 - π/4).
        let r = integrate(
            |p| 1.0 / ((1.0 + p * p) * (p * p + 4.0)),
            0.0,
            f64::INFINITY,
            &spec(),
        )
        .unwrap();
        assert!((r.value - PI / 12.0).abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn reversed_and_empty_limits() {
        let f = |x: f64| x * x;
        let fwd = integrate(f, 0.0, 2.0, &spec()).unwrap().value;
        let rev = integrate(f, 2.0, 0.0, &spec()).unwrap().value;
        assert!((fwd + rev).abs() < 1e-14);
        assert_eq!(integrate(f, 1.0, 1.0, &spec()).unwrap().value, 0.0);
    }

    #[test]
    fn whole_line_and_left_half_line() {
        let r = integrate(
            |x| (-x * x).exp(),
            f64::NEG_INFINITY,
            f64::INFINITY,
            &spec(),
        )
        .unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13);
        let r = integrate(|x| x.exp(), f64::NEG_INFINITY, 0.0, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_oscillation() {
        let r =
            integrate_complex(|x| Complex64::new(0.0, -3.0 * x).exp(), -1.0, 1.0, &spec()).unwrap();
        let exact = 2.0 * (3.0f64).sin() / 3.0;
        assert!((r.value.re - exact).abs() < 1e-13);
        assert!(r.value.im.abs() < 1e-13);
    }

    #[test]
    fn non_finite_interior_value_is_an_error() {
        let err = integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0, &spec());
        assert!(matches!(
            err,
            Err(Error::NonFiniteIntegrand { .. }) | Err(Error::QuadratureNotConverged { .. })
        ));
        let err = integrate(|_| f64::NAN, 0.0, 1.0, &spec());
        assert!(matches!(err, Err(Error::NonFiniteIntegrand { .. })));
    }

    #[test]
    fn non_convergence_is_reported() {
        let tight = QuadratureSpec {
            max_levels: 3,
            ..spec()
        };
        let err = integrate(|x| (40.0 * x).sin().abs(), 0.0, 10.0, &tight);
        assert!(matches!(err, Err(Error::QuadratureNotConverged { .. })));
    }

    #[test]
    fn rejects_bad_spec() {
        let bad = QuadratureSpec {
            max_levels: 2,
            ..spec()
        };
        assert!(bad.validate().is_err());
        let bad = QuadratureSpec {
            rel_tol: 0.0,
            ..spec()
        };
        assert!(bad.validate().is_err());
    }
}
