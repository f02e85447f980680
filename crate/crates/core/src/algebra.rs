//! Deformed Heisenberg algebras `[X, P] = iħ f(P)`.
//!
//! A [`DeformationFamily`] fixes the deformation function `f` and its momentum
//! bound `a`. The pseudo-momentum `p = g⁻¹(P) = ∫₀^P dP'/f(P')` turns the
//! position operator into a plain derivative on `[-b, b]`, where
//! `b = g⁻¹(a)`; the minimal length is `l₀ = πħ/(2b)`, nonzero exactly when
//! `b` is finite.

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{integrate, solve_root, Domain, QuadratureSpec, RootSpec};

/// Physical constants: ħ, the particle mass and the Coulomb strength α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub alpha: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::natural()
    }
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("hbar", hbar), ("mass", mass), ("alpha", alpha)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { hbar, mass, alpha })
    }

    /// ħ = m = α = 1.
    pub fn natural() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            alpha: 1.0,
        }
    }

    /// Bound-state momentum `αm/(ħν)` of the undeformed problem at `ν = n + δ`.
    pub fn coulomb_momentum(&self, nu: f64) -> f64 {
        self.alpha * self.mass / (self.hbar * nu)
    }

    /// Undeformed level `-α²m/(2ħ²ν²)`.
    pub fn coulomb_energy(&self, nu: f64) -> f64 {
        -self.alpha * self.alpha * self.mass / (2.0 * self.hbar * self.hbar * nu * nu)
    }
}

/// User-supplied deformation function with its momentum bound.
#[derive(Clone)]
pub struct CustomDeformation {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bound: f64,
    finite_b: bool,
}

impl CustomDeformation {
    /// `f` must be positive and even on `(-bound, bound)`. Whether `∫₀^a dP/f`
    /// converges is declared by the caller, not detected.
    pub fn new<F>(label: impl Into<String>, bound: f64, finite_b: bool, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(bound > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "custom momentum bound must be positive, got {bound}"
            )));
        }
        Ok(Self {
            label: label.into(),
            f: Arc::new(f),
            bound,
            finite_b,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for CustomDeformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDeformation")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .field("finite_b", &self.finite_b)
            .finish()
    }
}

/// The deformation function `f(P)` of the commutator.
#[derive(Debug, Clone)]
pub enum DeformationFamily {
    /// `f = 1`.
    Undeformed,
    /// `(1 + βP²)^k`, `k > 1/2`, unbounded momentum.
    PolyPlus {
        beta: f64,
        k: f64,
    },
    /// `(1 - βP²)^k`, `k < 1`, `|P| < 1/√β`.
    PolyMinus {
        beta: f64,
        k: f64,
    },
    /// `exp(√β |P|)`.
    ExpSqrt {
        beta: f64,
    },
    /// `exp((βP²)^{1/3})`.
    ExpCbrt {
        beta: f64,
    },
    Custom(CustomDeformation),
}

impl fmt::Display for DeformationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Undeformed => write!(f, "none"),
            Self::PolyPlus { beta, k } => write!(f, "polyplus(beta={beta}, k={k})"),
            Self::PolyMinus { beta, k } => write!(f, "polyminus(beta={beta}, k={k})"),
            Self::ExpSqrt { beta } => write!(f, "expsqrt(beta={beta})"),
            Self::ExpCbrt { beta } => write!(f, "expcbrt(beta={beta})"),
            Self::Custom(c) => write!(f, "custom({})", c.label),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be positive and finite, got {beta}"
        )))
    }
}

impl DeformationFamily {
    /// Kempf's deformation `1 + βP²`.
    pub fn kempf(beta: f64) -> Result<Self> {
        Self::poly_plus(beta, 1.0)
    }

    pub fn poly_plus(beta: f64, k: f64) -> Result<Self> {
        let fam = Self::PolyPlus { beta, k };
        fam.validate()?;
        Ok(fam)
    }

    pub fn poly_minus(beta: f64, k: f64) -> Result<Self> {
        let fam = Self::PolyMinus { beta, k };
        fam.validate()?;
        Ok(fam)
    }

    pub fn exp_sqrt(beta: f64) -> Result<Self> {
        let fam = Self::ExpSqrt { beta };
        fam.validate()?;
        Ok(fam)
    }

    pub fn exp_cbrt(beta: f64) -> Result<Self> {
        let fam = Self::ExpCbrt { beta };
        fam.validate()?;
        Ok(fam)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Undeformed | Self::Custom(_) => Ok(()),
            Self::PolyPlus { beta, k } => {
                check_beta(beta)?;
                if k.is_finite() && k > 0.5 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "polyplus requires k > 1/2 for a minimal length, got {k}"
                    )))
                }
            }
            Self::PolyMinus { beta, k } => {
                check_beta(beta)?;
                if k.is_finite() && k < 1.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "polyminus requires k < 1 for a minimal length, got {k}"
                    )))
                }
            }
            Self::ExpSqrt { beta } | Self::ExpCbrt { beta } => check_beta(beta),
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            Self::PolyPlus { beta, .. }
            | Self::PolyMinus { beta, .. }
            | Self::ExpSqrt { beta }
            | Self::ExpCbrt { beta } => Some(beta),
            Self::Undeformed | Self::Custom(_) => None,
        }
    }

    /// Same family with a different β; families without β are rejected.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        let fam = match *self {
            Self::PolyPlus { k, .. } => Self::PolyPlus { beta, k },
            Self::PolyMinus { k, .. } => Self::PolyMinus { beta, k },
            Self::ExpSqrt { .. } => Self::ExpSqrt { beta },
            Self::ExpCbrt { .. } => Self::ExpCbrt { beta },
            Self::Undeformed | Self::Custom(_) => {
                return Err(Error::Unsupported(format!("{self} has no beta parameter")))
            }
        };
        fam.validate()?;
        Ok(fam)
    }

    /// Momentum bound `a` (infinite for unbounded families).
    pub fn momentum_bound(&self) -> f64 {
        match self {
            Self::PolyMinus { beta, .. } => 1.0 / beta.sqrt(),
            Self::Custom(c) => c.bound,
            _ => f64::INFINITY,
        }
    }

    /// `f(P)`, rejecting `|P| ≥ a` for bounded families.
    pub fn eval(&self, p: f64) -> Result<f64> {
        let a = self.momentum_bound();
        if a.is_finite() && !(p.abs() < a) {
            return Err(Error::Domain { value: p, bound: a });
        }
        Ok(match self {
            Self::Undeformed => 1.0,
            Self::PolyPlus { beta, k } => (1.0 + beta * p * p).powf(*k),
            Self::PolyMinus { beta, k } => (1.0 - beta * p * p).powf(*k),
            Self::ExpSqrt { beta } => (beta.sqrt() * p.abs()).exp(),
            Self::ExpCbrt { beta } => (beta * p * p).cbrt().exp(),
            Self::Custom(c) => (c.f)(p),
        })
    }

    /// `1/f(P)` without the domain check; used inside integrands.
    pub fn inv_f(&self, p: f64) -> f64 {
        match self {
            Self::Undeformed => 1.0,
            Self::PolyPlus { beta, k } => (1.0 + beta * p * p).powf(-k),
            Self::PolyMinus { beta, k } => (1.0 - beta * p * p).powf(-k),
            Self::ExpSqrt { beta } => (-beta.sqrt() * p.abs()).exp(),
            Self::ExpCbrt { beta } => (-(beta * p * p).cbrt()).exp(),
            Self::Custom(c) => 1.0 / (c.f)(p),
        }
    }

    /// `1/f(a - s)` for a bounded family, accurate as `s → 0`.
    pub fn inv_f_from_edge(&self, s: f64) -> f64 {
        match self {
            Self::PolyMinus { beta, k } => {
                let rs = beta.sqrt() * s;
                (rs * (2.0 - rs)).powf(-k)
            }
            _ => self.inv_f(self.momentum_bound() - s),
        }
    }

    /// `1/f(P)` for `|P| < a`, through the edge distance in the outer half of
    /// a finite domain where `1 - βP²` would cancel.
    pub fn inv_f_stable(&self, p: f64) -> f64 {
        let a = self.momentum_bound();
        let x = p.abs();
        if a.is_finite() && x > 0.5 * a {
            self.inv_f_from_edge(a - x)
        } else {
            self.inv_f(p)
        }
    }

    /// Whether `b = ∫₀^a dP/f` is finite, classified per family.
    pub fn has_finite_b(&self) -> bool {
        match self {
            Self::Undeformed => false,
            Self::PolyPlus { k, .. } => *k > 0.5,
            Self::PolyMinus { k, .. } => *k < 1.0,
            Self::ExpSqrt { .. } | Self::ExpCbrt { .. } => true,
            Self::Custom(c) => c.finite_b,
        }
    }

    /// Elementary closed forms of `b`, where one exists.
    pub fn closed_form_b(&self) -> Option<f64> {
        if !self.has_finite_b() {
            return Some(f64::INFINITY);
        }
        match *self {
            Self::PolyPlus { beta, k } if k == 1.0 => Some(FRAC_PI_2 / beta.sqrt()),
            Self::PolyPlus { beta, k } if k == 1.5 => Some(1.0 / beta.sqrt()),
            Self::PolyMinus { beta, k } if k == 0.5 => Some(FRAC_PI_2 / beta.sqrt()),
            Self::PolyMinus { beta, k } if k == 0.0 => Some(1.0 / beta.sqrt()),
            Self::PolyMinus { beta, k } if k == -1.0 => Some(2.0 / (3.0 * beta.sqrt())),
            Self::ExpSqrt { beta } => Some(1.0 / beta.sqrt()),
            _ => None,
        }
    }

    /// `b`, closed form when known, otherwise by quadrature. Infinite when divergent.
    pub fn compute_b(&self, quad: &QuadratureSpec) -> Result<f64> {
        if let Some(b) = self.closed_form_b() {
            return Ok(b);
        }
        self.numerical_b(quad)
    }

    /// Quadrature route for `b`, ignoring closed forms.
    pub fn numerical_b(&self, quad: &QuadratureSpec) -> Result<f64> {
        if !self.has_finite_b() {
            return Ok(f64::INFINITY);
        }
        let a = self.momentum_bound();
        if a.is_finite() {
            let m = 0.5 * a;
            let inner = integrate(|p| self.inv_f(p), 0.0, m, quad)?;
            let edge = integrate(|s| self.inv_f_from_edge(s), 0.0, a - m, quad)?;
            Ok(inner.value + edge.value)
        } else {
            Ok(integrate(|p| self.inv_f(p), 0.0, f64::INFINITY, quad)?.value)
        }
    }

    fn closed_form_g_inverse(&self, p: f64) -> Option<f64> {
        match *self {
            Self::Undeformed => Some(p),
            Self::PolyPlus { beta, k } if k == 1.0 => {
                let s = beta.sqrt();
                Some((s * p).atan() / s)
            }
            Self::PolyPlus { beta, k } if k == 1.5 => Some(p / (1.0 + beta * p * p).sqrt()),
            Self::PolyMinus { beta, k } if k == 0.5 => {
                let s = beta.sqrt();
                Some((s * p).asin() / s)
            }
            Self::PolyMinus { k, .. } if k == 0.0 => Some(p),
            Self::PolyMinus { beta, k } if k == -1.0 => Some(p - beta * p * p * p / 3.0),
            Self::ExpSqrt { beta } => {
                let s = beta.sqrt();
                Some(-(-s * p.abs()).exp_m1() / s * p.signum())
            }
            _ => None,
        }
    }

    fn closed_form_g(&self, p: f64) -> Option<f64> {
        match *self {
            Self::Undeformed => Some(p),
            Self::PolyPlus { beta, k } if k == 1.0 => {
                let s = beta.sqrt();
                Some((s * p).tan() / s)
            }
            Self::PolyPlus { beta, k } if k == 1.5 => Some(p / (1.0 - beta * p * p).sqrt()),
            Self::PolyMinus { beta, k } if k == 0.5 => {
                let s = beta.sqrt();
                Some((s * p).sin() / s)
            }
            Self::PolyMinus { k, .. } if k == 0.0 => Some(p),
            Self::ExpSqrt { beta } => {
                let s = beta.sqrt();
                Some(-(-s * p.abs()).ln_1p() / s * p.signum())
            }
            _ => None,
        }
    }
}

/// Physical constants, a deformation, and the derived bound `b` and minimal length.
#[derive(Debug, Clone)]
pub struct AlgebraContext {
    params: PhysicalParams,
    family: DeformationFamily,
    b: f64,
    l0: f64,
    quad: QuadratureSpec,
    root: RootSpec,
}

impl AlgebraContext {
    pub fn new(params: PhysicalParams, family: DeformationFamily) -> Result<Self> {
        Self::with_specs(
            params,
            family,
            QuadratureSpec::default(),
            RootSpec::default(),
        )
    }

    pub fn with_specs(
        params: PhysicalParams,
        family: DeformationFamily,
        quad: QuadratureSpec,
        root: RootSpec,
    ) -> Result<Self> {
        PhysicalParams::new(params.hbar, params.mass, params.alpha)?;
        family.validate()?;
        quad.validate()?;
        root.validate()?;
        let b = family.compute_b(&quad)?;
        let l0 = if b.is_finite() {
            std::f64::consts::PI * params.hbar / (2.0 * b)
        } else {
            0.0
        };
        Ok(Self {
            params,
            family,
            b,
            l0,
            quad,
            root,
        })
    }

    /// Same constants and tolerances, different deformation.
    pub fn with_family(&self, family: DeformationFamily) -> Result<Self> {
        Self::with_specs(self.params, family, self.quad, self.root)
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    pub fn family(&self) -> &DeformationFamily {
        &self.family
    }

    /// Pseudo-momentum bound `b` (may be infinite).
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Momentum bound `a`.
    pub fn a(&self) -> f64 {
        self.family.momentum_bound()
    }

    /// `l₀ = πħ/(2b)`, zero when `b` is infinite.
    pub fn minimal_length(&self) -> f64 {
        self.l0
    }

    pub fn quad(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn root(&self) -> &RootSpec {
        &self.root
    }

    /// `∫_lo^hi h(P)/f(P) dP` for `0 ≤ lo ≤ hi ≤ a`. An upper limit equal to a
    /// finite `a` is handled in the distance-from-edge variable.
    pub fn momentum_integral<H>(&self, lo: f64, hi: f64, h: H) -> Result<f64>
    where
        H: Fn(f64) -> f64,
    {
        let a = self.a();
        let fam = &self.family;
        if a.is_finite() && hi >= a {
            let m = lo + 0.5 * (a - lo);
            let inner = integrate(|p| h(p) * fam.inv_f_stable(p), lo, m, &self.quad)?;
            let edge = integrate(
                |s| h(a - s) * fam.inv_f_from_edge(s),
                0.0,
                a - m,
                &self.quad,
            )?;
            Ok(inner.value + edge.value)
        } else {
            Ok(integrate(|p| h(p) * fam.inv_f(p), lo, hi, &self.quad)?.value)
        }
    }

    /// `g⁻¹(P) = ∫₀^P dP'/f(P')`; odd and strictly increasing on `(-a, a)`.
    pub fn g_inverse(&self, p: f64) -> Result<f64> {
        let a = self.a();
        if !(p.abs() < a) {
            return Err(Error::Domain { value: p, bound: a });
        }
        if let Some(v) = self.family.closed_form_g_inverse(p) {
            return Ok(v);
        }
        let x = p.abs();
        let v = if a.is_finite() && x > 0.5 * a {
            self.b - self.edge_tail(a - x)?
        } else {
            integrate(|t| self.family.inv_f(t), 0.0, x, &self.quad)?.value
        };
        Ok(v.copysign(p))
    }

    /// `g(p)`, the momentum at pseudo-momentum `p ∈ (-b, b)`.
    pub fn g(&self, p: f64) -> Result<f64> {
        self.check_pseudo(p)?;
        if p == 0.0 {
            return Ok(0.0);
        }
        if let Some(v) = self.family.closed_form_g(p) {
            return Ok(v);
        }
        let a = self.a();
        if a.is_finite() && p.abs() > self.g_inverse(0.5 * a)? {
            return Ok((a - self.solve_edge_distance(p.abs())?).copysign(p));
        }
        let target = p.abs();
        let seed = if a.is_finite() {
            target.min(0.5 * a)
        } else {
            target
        };
        let failure = RefCell::new(None);
        let root = solve_root(
            |x| match self.g_inverse(x) {
                Ok(v) => v - target,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            seed,
            Domain::new(0.0, a),
            &self.root,
        );
        match (root, failure.into_inner()) {
            (Ok(v), _) => Ok(v.copysign(p)),
            (Err(_), Some(e)) | (Err(e), None) => Err(e),
        }
    }

    /// `a - |g(p)|` for `|p| ≤ b`, keeping full relative precision where
    /// `g(p)` itself rounds onto a finite `a`. Infinite for unbounded families.
    pub fn g_edge_distance(&self, p: f64) -> Result<f64> {
        let a = self.a();
        if !a.is_finite() {
            self.check_pseudo(p)?;
            return Ok(f64::INFINITY);
        }
        let x = p.abs();
        if x == self.b {
            return Ok(0.0);
        }
        self.check_pseudo(p)?;
        if x > self.g_inverse(0.5 * a)? {
            self.solve_edge_distance(x)
        } else {
            Ok(a - self.g(x)?)
        }
    }

    fn check_pseudo(&self, p: f64) -> Result<()> {
        if p.abs() < self.b {
            Ok(())
        } else {
            Err(Error::Domain {
                value: p,
                bound: self.b,
            })
        }
    }

    /// Solves `∫_{a-s}^a dP/f = b - x` for `s ∈ (0, a/2)`.
    fn solve_edge_distance(&self, x: f64) -> Result<f64> {
        let a = self.a();
        let gap = self.b - x;
        let failure = RefCell::new(None);
        let root = solve_root(
            |s| match self.edge_tail(s) {
                Ok(v) => v - gap,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.25 * a,
            Domain::new(0.0, a),
            &self.root,
        );
        match (root, failure.into_inner()) {
            (Ok(v), _) => Ok(v),
            (Err(_), Some(e)) | (Err(e), None) => Err(e),
        }
    }

    /// `∫_{a-s}^a dP/f = b - g⁻¹(a - s)` for a finite bound.
    fn edge_tail(&self, s: f64) -> Result<f64> {
        Ok(integrate(|t| self.family.inv_f_from_edge(t), 0.0, s, &self.quad)?.value)
    }

    /// `g` extended to the closed interval: `g(±b) = ±a`.
    pub fn g_closed(&self, p: f64) -> Result<f64> {
        if p.abs() == self.b {
            Ok(self.a().copysign(p))
        } else {
            self.g(p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn ctx(family: DeformationFamily) -> AlgebraContext {
        AlgebraContext::new(PhysicalParams::natural(), family).unwrap()
    }

    fn builtins() -> Vec<DeformationFamily> {
        vec![
            DeformationFamily::kempf(0.3).unwrap(),
            DeformationFamily::poly_plus(0.3, 1.5).unwrap(),
            DeformationFamily::poly_plus(0.3, 2.0).unwrap(),
            DeformationFamily::poly_plus(0.3, 0.75).unwrap(),
            DeformationFamily::poly_minus(0.3, 0.5).unwrap(),
            DeformationFamily::poly_minus(0.3, -1.0).unwrap(),
            DeformationFamily::poly_minus(0.3, 0.75).unwrap(),
            DeformationFamily::poly_minus(0.3, 0.0).unwrap(),
            DeformationFamily::exp_sqrt(0.3).unwrap(),
            DeformationFamily::exp_cbrt(0.3).unwrap(),
        ]
    }

    #[test]
    fn f_at_origin_and_substitution() {
        assert_eq!(
            DeformationFamily::kempf(1.0).unwrap().eval(0.0).unwrap(),
            1.0
        );
        let v = DeformationFamily::kempf(0.01).unwrap().eval(10.0).unwrap();
        assert!((v - 2.0).abs() < 1e-15);
        for fam in builtins() {
            assert_eq!(fam.eval(0.0).unwrap(), 1.0, "{fam}");
            let x = 0.7;
            assert_eq!(fam.eval(x).unwrap(), fam.eval(-x).unwrap());
        }
    }

    #[test]
    fn f_domain_error_at_bound() {
        let fam = DeformationFamily::poly_minus(1.0, 0.5).unwrap();
        assert!(matches!(fam.eval(1.0), Err(Error::Domain { .. })));
        assert!(fam.eval(0.999).is_ok());
    }

    #[test]
    fn family_constraints() {
        assert!(DeformationFamily::poly_plus(1.0, 0.5).is_err());
        assert!(DeformationFamily::poly_minus(1.0, 1.0).is_err());
        assert!(DeformationFamily::kempf(0.0).is_err());
        assert!(DeformationFamily::exp_cbrt(-1.0).is_err());
        assert!(DeformationFamily::Undeformed.with_beta(1.0).is_err());
    }

    #[test]
    fn b_values() {
        let q = QuadratureSpec::default();
        let b = DeformationFamily::kempf(1.0)
            .unwrap()
            .compute_b(&q)
            .unwrap();
        assert!((b - PI / 2.0).abs() < 1e-15);
        assert!(DeformationFamily::Undeformed
            .compute_b(&q)
            .unwrap()
            .is_infinite());
        let b = DeformationFamily::poly_minus(1.0, 0.5)
            .unwrap()
            .compute_b(&q)
            .unwrap();
        assert!((b - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn numerical_b_matches_closed_forms() {
        let q = QuadratureSpec::default();
        for fam in [
            DeformationFamily::kempf(0.37).unwrap(),
            DeformationFamily::poly_minus(0.37, 0.5).unwrap(),
            DeformationFamily::poly_minus(0.37, -1.0).unwrap(),
            DeformationFamily::poly_plus(0.37, 1.5).unwrap(),
            DeformationFamily::exp_sqrt(0.37).unwrap(),
        ] {
            let closed = fam.closed_form_b().unwrap();
            let num = fam.numerical_b(&q).unwrap();
            assert!(
                ((num - closed) / closed).abs() < 1e-10,
                "{fam}: {num} vs {closed}"
            );
        }
    }

    #[test]
    fn numerical_b_matches_beta_function_forms() {
        // ∫₀^∞ (1+βP²)^{-k} = √π Γ(k-1/2) / (2 Γ(k) √β); ∫₀^a (1-βP²)^{-k} = √π Γ(1-k) / (2 Γ(3/2-k) √β)
        use statrs::function::gamma::gamma;
        let q = QuadratureSpec::default();
        let beta: f64 = 0.2;
        for k in [0.6, 0.8, 2.0, 3.5] {
            let num = DeformationFamily::poly_plus(beta, k)
                .unwrap()
                .numerical_b(&q)
                .unwrap();
            let exact = PI.sqrt() * gamma(k - 0.5) / (2.0 * gamma(k) * beta.sqrt());
            assert!(((num - exact) / exact).abs() < 1e-10, "k={k}");
        }
        for k in [-2.5, 0.25, 0.75, 0.9] {
            let num = DeformationFamily::poly_minus(beta, k)
                .unwrap()
                .numerical_b(&q)
                .unwrap();
            let exact = PI.sqrt() * gamma(1.0 - k) / (2.0 * gamma(1.5 - k) * beta.sqrt());
            assert!(((num - exact) / exact).abs() < 1e-10, "k={k}");
        }
        // exp(-u^{2/3}) integrates to (3/2)Γ(3/2).
        let num = DeformationFamily::exp_cbrt(beta)
            .unwrap()
            .compute_b(&q)
            .unwrap();
        let exact = 1.5 * gamma(1.5) / beta.sqrt();
        assert!(((num - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn minimal_length_values() {
        let beta: f64 = 0.49;
        let c = ctx(DeformationFamily::kempf(beta).unwrap());
        assert!((c.minimal_length() - beta.sqrt()).abs() < 1e-15);
        assert_eq!(ctx(DeformationFamily::Undeformed).minimal_length(), 0.0);
        let c = ctx(DeformationFamily::poly_minus(0.25, 0.5).unwrap());
        assert!((c.minimal_length() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn minimal_length_dichotomy() {
        let mut all = builtins();
        all.push(DeformationFamily::Undeformed);
        all.push(DeformationFamily::Custom(
            CustomDeformation::new("flat", f64::INFINITY, false, |_| 1.0).unwrap(),
        ));
        for fam in all {
            let c = ctx(fam);
            assert_eq!(
                c.minimal_length() > 0.0,
                c.b().is_finite(),
                "{}",
                c.family()
            );
        }
    }

    #[test]
    fn g_inverse_values() {
        let c = ctx(DeformationFamily::kempf(1.0).unwrap());
        assert_eq!(c.g_inverse(0.0).unwrap(), 0.0);
        assert!((c.g_inverse(1.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let c = ctx(DeformationFamily::poly_minus(1.0, 0.5).unwrap());
        assert!((c.g_inverse(1.0 - 1e-15).unwrap() - PI / 2.0).abs() < 1e-7);
        assert!(c.g_inverse(1.0).is_err());
    }

    #[test]
    fn g_values() {
        let c = ctx(DeformationFamily::kempf(1.0).unwrap());
        assert_eq!(c.g(0.0).unwrap(), 0.0);
        assert!((c.g(FRAC_PI_4).unwrap() - 1.0).abs() < 1e-15);
        assert!(c.g(PI / 2.0).is_err());
        let c = ctx(DeformationFamily::poly_plus(1.0, 1.5).unwrap());
        assert!((c.g(0.6).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn numerical_g_inverse_matches_closed_form() {
        // PolyMinus k = -1 has a polynomial g⁻¹; compare with a Custom copy.
        let beta: f64 = 0.3;
        let custom = CustomDeformation::new("pm-1", 1.0 / beta.sqrt(), true, move |p| {
            1.0 / (1.0 - beta * p * p)
        })
        .unwrap();
        let c = ctx(DeformationFamily::Custom(custom));
        let exact = ctx(DeformationFamily::poly_minus(beta, -1.0).unwrap());
        assert!((c.b() - exact.b()).abs() < 1e-12);
        for p in [0.1, 0.9, 1.5, 1.8] {
            let (x, y) = (c.g_inverse(p).unwrap(), exact.g_inverse(p).unwrap());
            assert!((x - y).abs() < 1e-12, "{p}: {x} {y}");
        }
    }

    #[test]
    fn g_near_edges() {
        let c = ctx(DeformationFamily::poly_minus(1.0, -1.0).unwrap());
        let b = c.b();
        let p = c.g(b * (1.0 - 1e-9)).unwrap();
        assert!(p < 1.0 && p > 0.999);
        assert_eq!(c.g_closed(b).unwrap(), 1.0);
        assert_eq!(c.g_closed(-b).unwrap(), -1.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn round_trip_family() -> impl Strategy<Value = DeformationFamily> {
            prop_oneof![
                (0.01f64..2.0).prop_map(|b| DeformationFamily::kempf(b).unwrap()),
                (0.01f64..2.0, 0.55f64..3.0)
                    .prop_map(|(b, k)| DeformationFamily::poly_plus(b, k).unwrap()),
                (0.01f64..2.0, -2.0f64..0.95)
                    .prop_map(|(b, k)| DeformationFamily::poly_minus(b, k).unwrap()),
                (0.01f64..2.0).prop_map(|b| DeformationFamily::exp_sqrt(b).unwrap()),
                (0.01f64..2.0).prop_map(|b| DeformationFamily::exp_cbrt(b).unwrap()),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn g_round_trip(fam in round_trip_family(), u in -0.98f64..0.98) {
                let c = ctx(fam);
                let a = c.a();
                let p_mom = if a.is_finite() { u * a } else { u * 5.0 };
                let back = c.g(c.g_inverse(p_mom).unwrap()).unwrap();
                let tol = 10.0 * c.root().tol * p_mom.abs().max(1.0);
                prop_assert!((back - p_mom).abs() <= tol, "{} {} {}", c.family(), p_mom, back);
            }

            #[test]
            fn g_inverse_odd_and_increasing(fam in round_trip_family(), u in 0.01f64..0.9) {
                let c = ctx(fam);
                let a = c.a();
                let x = if a.is_finite() { u * a } else { u * 20.0 };
                prop_assert_eq!(c.g_inverse(-x).unwrap(), -c.g_inverse(x).unwrap());
                let grid: Vec<f64> = (0..20).map(|i| x * i as f64 / 19.0).collect();
                let vals: Vec<f64> = grid.iter().map(|&p| c.g_inverse(p).unwrap()).collect();
                prop_assert!(vals.windows(2).all(|w| w[1] > w[0]));
            }
        }
    }
}
