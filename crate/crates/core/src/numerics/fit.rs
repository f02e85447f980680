//! Small least-squares helpers for scaling-law fits.

use crate::error::{Error, Result};

/// Straight line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

/// Ordinary least squares line through `(x, y)` pairs.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<Line> {
    let (a, b) = fit_two_basis(x, y, |_| 1.0, |t| t)?;
    Ok(Line {
        slope: b,
        intercept: a,
    })
}

/// Least squares for `y ≈ a·u(x) + b·v(x)`, solved through the 2×2 normal equations.
pub fn fit_two_basis<U, V>(x: &[f64], y: &[f64], u: U, v: V) -> Result<(f64, f64)>
where
    U: Fn(f64) -> f64,
    V: Fn(f64) -> f64,
{
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::FitConditioning(format!(
            "need at least two matched samples, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let (mut suu, mut suv, mut svv, mut suy, mut svy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let (ui, vi) = (u(xi), v(xi));
        suu += ui * ui;
        suv += ui * vi;
        svv += vi * vi;
        suy += ui * yi;
        svy += vi * yi;
    }
    let det = suu * svv - suv * suv;
    if !det.is_finite() || det.abs() <= 1e-12 * suu * svv {
        return Err(Error::FitConditioning(format!(
            "normal equations singular (det {det:e})"
        )));
    }
    let a = (suy * svv - svy * suv) / det;
    let b = (svy * suu - suy * suv) / det;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::FitConditioning("non-finite coefficients".into()));
    }
    Ok((a, b))
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_minimize<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    while (hi - lo).abs() > tol {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}
