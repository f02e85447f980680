//! Bound-state spectrum of the attractive Coulomb problem.
//!
//! In momentum space the level condition reads `Φ(q) = π(n + δ)` with
//!
//! ```text
//! Φ(q) = (2mα/ħ) ∫₀^a dP / (f(P) (P² + q²)),     E = -q²/(2m).
//! ```
//!
//! `Φ` falls strictly from `+∞` (q → 0) to `0` (q → ∞), so every positive
//! target has exactly one root, found by bracketing from the undeformed
//! solution `q₀ = αm/(ħ(n + δ))`.

mod closed_form;
mod corrections;

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;

use crate::algebra::{AlgebraContext, DeformationFamily};
use crate::error::{Error, Result};
use crate::numerics::{solve_root, Domain};

pub use closed_form::{closed_form_energy, ClosedForm, LevelEquation};
pub use corrections::{
    correction_vs_numeric, dq2_dbeta, dq2_dbeta_finite_difference, leading_correction,
    nominal_exponent, CorrectionFit, ScalingModel,
};

/// Self-adjoint extension label `δ ∈ [0, 1)`, equivalently `A = cot(πδ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParam {
    delta: f64,
}

impl ExtensionParam {
    pub fn new(delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "extension parameter δ must lie in [0, 1), got {delta}"
            )));
        }
        Ok(Self { delta })
    }

    /// `δ = arccot(A)/π` with arccot valued in `[0, π)`; `A = ±∞` both give `δ = 0`.
    pub fn from_a(a: f64) -> Result<Self> {
        if a.is_nan() {
            return Err(Error::InvalidParameter("A is NaN".into()));
        }
        let delta = 1.0f64.atan2(a) / PI;
        Self::new(if delta >= 1.0 { 0.0 } else { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `A = cot(πδ)`; `+∞` at `δ = 0` and exactly zero at `δ = 1/2`.
    pub fn a(&self) -> f64 {
        if self.delta == 0.0 {
            f64::INFINITY
        } else {
            (PI * (0.5 - self.delta)).tan()
        }
    }

    /// The extension related by parity, `1 - δ (mod 1)`.
    pub fn parity(&self) -> Self {
        Self {
            delta: if self.delta == 0.0 {
                0.0
            } else {
                1.0 - self.delta
            },
        }
    }
}

impl fmt::Display for ExtensionParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "δ={}", self.delta)
    }
}

/// A solved bound state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyLevel {
    pub n: u32,
    pub delta: ExtensionParam,
    /// `q = √(-2mE)`.
    pub q: f64,
    pub energy: f64,
}

impl EnergyLevel {
    pub fn nu(&self) -> f64 {
        f64::from(self.n) + self.delta.delta()
    }
}

/// `Φ(q)` for the context's (attractive) coupling.
pub fn quantization_integral(ctx: &AlgebraContext, q: f64) -> Result<f64> {
    QuantizationCondition::new(ctx, ctx.params().alpha)?.phi(q)
}

/// The level condition `Φ_c(q) = πν` for a coupling `c` of either sign.
///
/// `Φ_c = -Φ_{-c}`, so a repulsive coupling paired with a negative `ν`
/// reproduces the attractive spectrum; the parity checks rely on this.
#[derive(Debug, Clone, Copy)]
pub struct QuantizationCondition<'a> {
    ctx: &'a AlgebraContext,
    coupling: f64,
}

impl<'a> QuantizationCondition<'a> {
    pub fn new(ctx: &'a AlgebraContext, coupling: f64) -> Result<Self> {
        if !(coupling.is_finite() && coupling != 0.0) {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite and nonzero, got {coupling}"
            )));
        }
        Ok(Self { ctx, coupling })
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `Φ_c(q) = (2mc/ħ) ∫₀^a dP/(f (P² + q²))`.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "q must be positive and finite, got {q}"
            )));
        }
        let q2 = q * q;
        let j = lorentz_split(self.ctx, q, |p| 1.0 / (p * p + q2))?;
        let pp = self.ctx.params();
        Ok(2.0 * pp.mass * self.coupling / pp.hbar * j)
    }

    /// The unique `q > 0` with `Φ_c(q) = πν`. `ν` must be nonzero and share
    /// the sign of the coupling.
    pub fn solve(&self, nu: f64) -> Result<f64> {
        if nu == 0.0 {
            return Err(Error::Precondition(
                "n + δ = 0 (n = 0 with δ = 0) has no bound state: Φ(q) > 0 for every finite q"
                    .into(),
            ));
        }
        if !nu.is_finite() || nu.signum() != self.coupling.signum() {
            return Err(Error::Precondition(format!(
                "target π·{nu} is unreachable for coupling {}",
                self.coupling
            )));
        }
        let ctx = self.ctx;
        if !ctx.b().is_finite() && !matches!(ctx.family(), DeformationFamily::Undeformed) {
            return Err(Error::Precondition(format!(
                "{} has no minimal length; only the undeformed limit is supported",
                ctx.family()
            )));
        }
        let pp = ctx.params();
        let seed = self.coupling.abs() * pp.mass / (pp.hbar * nu.abs());
        let target = PI * nu;
        let failure = std::cell::RefCell::new(None);
        let root = solve_root(
            |q| match self.phi(q) {
                Ok(v) => v - target,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            seed,
            Domain::POSITIVE,
            ctx.root(),
        );
        match (root, failure.into_inner()) {
            (Ok(q), _) => Ok(q),
            (Err(_), Some(e)) | (Err(e), None) => Err(e),
        }
    }
}

/// `∫₀^a h(P)/f(P) dP` split at the Lorentzian width `q`, where the
/// integrands of this module change scale.
pub(crate) fn lorentz_split<H>(ctx: &AlgebraContext, q: f64, h: H) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let a = ctx.a();
    let s = if a.is_finite() { q.min(0.5 * a) } else { q };
    Ok(ctx.momentum_integral(0.0, s, &h)? + ctx.momentum_integral(s, a, &h)?)
}

/// Solves level `n` of extension `ext`, with the context's tolerances.
pub fn solve_level(ctx: &AlgebraContext, n: u32, ext: ExtensionParam) -> Result<EnergyLevel> {
    let nu = f64::from(n) + ext.delta();
    let q = QuantizationCondition::new(ctx, ctx.params().alpha)?.solve(nu)?;
    Ok(EnergyLevel {
        n,
        delta: ext,
        q,
        energy: -q * q / (2.0 * ctx.params().mass),
    })
}

/// Independent solves for every `n` in the range, ordered by `n`.
pub fn solve_band(
    ctx: &AlgebraContext,
    levels: RangeInclusive<u32>,
    ext: ExtensionParam,
) -> Result<Vec<EnergyLevel>> {
    levels.map(|n| solve_level(ctx, n, ext)).collect()
}
