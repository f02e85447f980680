//! Small-β corrections to the Coulomb levels.
//!
//! [`leading_correction`] gives the analytic leading shift per family;
//! [`correction_vs_numeric`] measures the same shift from solved levels and
//! fits its scaling in β. [`dq2_dbeta`] is the exact β-derivative of `q²`
//! obtained by differentiating the level condition and integrating by parts.

use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use crate::algebra::{AlgebraContext, DeformationFamily, PhysicalParams};
use crate::error::{Error, Result};
use crate::numerics::fit::{fit_line, fit_two_basis, golden_minimize};
use crate::numerics::RootSpec;

use super::{lorentz_split, solve_level, ExtensionParam};

/// Analytic leading shift `ΔE_n` with `E_n ≈ -α²m/(2ħ²ν²) + ΔE_n`.
pub fn leading_correction(
    family: &DeformationFamily,
    params: &PhysicalParams,
    n: u32,
    ext: ExtensionParam,
) -> Result<f64> {
    let nu = f64::from(n) + ext.delta();
    if nu == 0.0 {
        return Err(Error::Precondition(
            "n + δ = 0 (n = 0 with δ = 0) has no bound state".into(),
        ));
    }
    let PhysicalParams { hbar, mass, alpha } = *params;
    // α³m²/(ħ³ν³)
    let cubic = (alpha * mass / (hbar * nu)).powi(3) / mass;
    match *family {
        DeformationFamily::PolyPlus { beta, k } => {
            let ratio = (ln_gamma(k + 0.5) - ln_gamma(k)).exp();
            Ok(2.0 * beta.sqrt() * ratio / PI.sqrt() * cubic)
        }
        DeformationFamily::PolyMinus { beta, k } => {
            let ratio = if k == 0.5 {
                // 1/Γ(0) = 0: the correction starts at order β.
                0.0
            } else if k < 0.5 {
                (ln_gamma(1.0 - k) - ln_gamma(0.5 - k)).exp()
            } else {
                gamma(1.0 - k) / gamma(0.5 - k)
            };
            Ok(2.0 * beta.sqrt() * ratio / PI.sqrt() * cubic)
        }
        DeformationFamily::ExpSqrt { beta } => {
            let x = alpha * mass * beta.sqrt() / hbar;
            Ok(2.0 / PI * cubic * beta.sqrt() * x.ln())
        }
        DeformationFamily::ExpCbrt { beta } => {
            let x = alpha * mass * beta.sqrt() / (hbar * nu);
            Ok(2.0 * alpha * alpha * mass / (hbar * hbar * nu * nu) * x.powf(2.0 / 3.0))
        }
        _ => Err(Error::Unsupported(format!(
            "no leading correction for {family}"
        ))),
    }
}

/// Power of β carried by the leading correction.
pub fn nominal_exponent(family: &DeformationFamily) -> Result<f64> {
    match *family {
        DeformationFamily::PolyMinus { k, .. } if k == 0.5 => Ok(1.0),
        DeformationFamily::PolyPlus { .. }
        | DeformationFamily::PolyMinus { .. }
        | DeformationFamily::ExpSqrt { .. } => Ok(0.5),
        DeformationFamily::ExpCbrt { .. } => Ok(1.0 / 3.0),
        _ => Err(Error::Unsupported(format!(
            "no correction scaling for {family}"
        ))),
    }
}

/// Scaling law fitted to the measured shifts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingModel {
    /// `ΔE ≈ c β^p`.
    Power,
    /// `ΔE ≈ β^p (c + d ln β)`.
    PowerLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionFit {
    pub model: ScalingModel,
    /// Fitted exponent `p`: the log-log slope for [`ScalingModel::Power`],
    /// the jointly fitted power for [`ScalingModel::PowerLog`].
    pub exponent: f64,
    /// Signed prefactor of `β^{p₀}` at the nominal exponent `p₀`, extrapolated
    /// to β → 0 (power law), or `c` of the joint fit (power-log law).
    pub coefficient: f64,
    /// `d` of the power-log law.
    pub log_coefficient: Option<f64>,
    pub betas: Vec<f64>,
    /// `E(β) - E(0)` per grid point.
    pub shifts: Vec<f64>,
}

/// Measures `ΔE(β) = E_n(β) - E_n(0)` on `betas` and fits its scaling.
///
/// The exponent is the free log-log slope. The coefficient is obtained with
/// the exponent pinned at its nominal value `p₀`, fitting
/// `ΔE/β^{p₀} = c + d β^{p₀}` so that the next order does not leak into `c`.
/// `ExpSqrt` shifts carry a logarithm and are fitted as `β^p (c + d ln β)`.
pub fn correction_vs_numeric(
    ctx: &AlgebraContext,
    n: u32,
    ext: ExtensionParam,
    betas: &[f64],
) -> Result<CorrectionFit> {
    let family = ctx.family();
    let p0 = nominal_exponent(family)?;
    if betas.len() < 3 || betas.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
        return Err(Error::FitConditioning(
            "need at least three positive β values".into(),
        ));
    }
    let (lo, hi) = betas
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), &b| (l.min(b), h.max(b)));
    if hi / lo < 100.0 {
        return Err(Error::FitConditioning(format!(
            "β grid spans {:.2} decades; at least 2 are required",
            (hi / lo).log10()
        )));
    }
    let nu = f64::from(n) + ext.delta();
    let e0 = ctx.params().coulomb_energy(nu);
    // The shifts are tiny differences of levels; solve them tightly.
    let root = RootSpec {
        tol: ctx.root().tol.min(1e-14),
        ..*ctx.root()
    };
    let mut shifts = Vec::with_capacity(betas.len());
    for &beta in betas {
        let c =
            AlgebraContext::with_specs(*ctx.params(), family.with_beta(beta)?, *ctx.quad(), root)?;
        shifts.push(solve_level(&c, n, ext)?.energy - e0);
    }
    if shifts.iter().any(|d| *d == 0.0 || !d.is_finite()) {
        return Err(Error::FitConditioning(
            "a level shift vanished at working precision".into(),
        ));
    }
    let logs: Vec<f64> = betas.iter().map(|b| b.ln()).collect();

    if matches!(family, DeformationFamily::ExpSqrt { .. }) {
        let (p, c, d) = fit_power_log(&logs, &shifts)?;
        return Ok(CorrectionFit {
            model: ScalingModel::PowerLog,
            exponent: p,
            coefficient: c,
            log_coefficient: Some(d),
            betas: betas.to_vec(),
            shifts,
        });
    }

    let mags: Vec<f64> = shifts.iter().map(|d| d.abs().ln()).collect();
    let slope = fit_line(&logs, &mags)?.slope;
    let scaled: Vec<f64> = betas
        .iter()
        .zip(&shifts)
        .map(|(b, d)| d / b.powf(p0))
        .collect();
    let (c, _) = fit_two_basis(betas, &scaled, |_| 1.0, |b| b.powf(p0))?;
    Ok(CorrectionFit {
        model: ScalingModel::Power,
        exponent: slope,
        coefficient: c,
        log_coefficient: None,
        betas: betas.to_vec(),
        shifts,
    })
}

/// Relative least squares for `y ≈ e^{p L}(c + d L)` over `L = ln β`;
/// `c, d` are eliminated for each trial `p`, which is then golden-searched.
fn fit_power_log(logs: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    let idx: Vec<f64> = (0..y.len()).map(|i| i as f64).collect();
    // Dividing by |y| makes every target ±1.
    let sign: Vec<f64> = y.iter().map(|v| v.signum()).collect();
    let solve = |p: f64| -> Result<(f64, f64, f64)> {
        let w = |i: usize| (p * logs[i]).exp() / y[i].abs();
        let (c, d) = fit_two_basis(
            &idx,
            &sign,
            |i| w(i as usize),
            |i| w(i as usize) * logs[i as usize],
        )?;
        let rss = (0..y.len())
            .map(|i| (w(i) * (c + d * logs[i]) - sign[i]).powi(2))
            .sum();
        Ok((c, d, rss))
    };
    let p = golden_minimize(
        |p| solve(p).map_or(f64::INFINITY, |(_, _, r)| r),
        0.1,
        1.0,
        1e-7,
    );
    let (c, d, _) = solve(p)?;
    Ok((p, c, d))
}

/// `∂q²/∂β` at momentum `q` from the integrated-by-parts derivative of the
/// level condition. Exact whenever `f` depends on `βP²` alone. For a bounded
/// family the substitution `P = x/√β` fixes the range of integration, so no
/// boundary term arises at `P = a` even where `f` vanishes there.
pub fn dq2_dbeta(ctx: &AlgebraContext, q: f64) -> Result<f64> {
    let beta = match ctx.family() {
        DeformationFamily::Undeformed => {
            return Err(Error::Precondition(
                "∂q²/∂β needs β > 0; the undeformed algebra has none".into(),
            ))
        }
        fam => fam
            .beta()
            .ok_or_else(|| Error::Unsupported(format!("{fam} has no deformation parameter β")))?,
    };
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "q must be positive, got {q}"
        )));
    }
    let q2 = q * q;
    // Written in 1/s so that far-tail nodes underflow to zero instead of inf/inf.
    let num = lorentz_split(ctx, q, |p| {
        let inv = 1.0 / (p * p + q2);
        inv - 2.0 * q2 * inv * inv
    })?;
    let den = lorentz_split(ctx, q, |p| {
        let inv = 1.0 / (p * p + q2);
        inv * inv
    })?;
    if !(den.abs() > f64::MIN_POSITIVE) {
        return Err(Error::Precondition(format!(
            "denominator integral underflowed ({den:e})"
        )));
    }
    Ok(num / (2.0 * beta * den))
}

/// Central difference `[q²(β+h) - q²(β-h)]/(2h)` with `h = rel_h·β`, for level `(n, δ)`.
pub fn dq2_dbeta_finite_difference(
    ctx: &AlgebraContext,
    n: u32,
    ext: ExtensionParam,
    rel_h: f64,
) -> Result<f64> {
    let beta = ctx.family().beta().ok_or_else(|| {
        Error::Precondition(format!("{} has no deformation parameter β", ctx.family()))
    })?;
    if !(rel_h > 0.0 && rel_h < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "relative step must lie in (0, 1), got {rel_h}"
        )));
    }
    let h = rel_h * beta;
    let root = RootSpec {
        tol: ctx.root().tol.min(1e-15),
        ..*ctx.root()
    };
    let q2 = |b: f64| -> Result<f64> {
        let c = AlgebraContext::with_specs(
            *ctx.params(),
            ctx.family().with_beta(b)?,
            *ctx.quad(),
            root,
        )?;
        let q = solve_level(&c, n, ext)?.q;
        Ok(q * q)
    };
    Ok((q2(beta + h)? - q2(beta - h)?) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::closed_form::{closed_form_energy, ClosedForm};

    fn natural() -> PhysicalParams {
        PhysicalParams::natural()
    }

    fn ext(d: f64) -> ExtensionParam {
        ExtensionParam::new(d).unwrap()
    }

    fn coef(family: DeformationFamily) -> f64 {
        // Prefactor of √β α³m²/(ħ³ν³) at ν = 1.
        leading_correction(&family, &natural(), 1, ext(0.0)).unwrap()
            / family.beta().unwrap().sqrt()
    }

    #[test]
    fn gamma_ratios_match_exact_expansions() {
        assert!((coef(DeformationFamily::kempf(0.01).unwrap()) - 1.0).abs() < 1e-14);
        let four_over_pi = 4.0 / PI;
        assert!(
            (coef(DeformationFamily::poly_plus(0.01, 1.5).unwrap()) - four_over_pi).abs() < 1e-14
        );
        assert!(
            (coef(DeformationFamily::poly_minus(0.01, -1.0).unwrap()) - four_over_pi).abs() < 1e-14
        );
        assert!((coef(DeformationFamily::poly_minus(0.01, 0.0).unwrap()) - 2.0 / PI).abs() < 1e-14);
        assert_eq!(coef(DeformationFamily::poly_minus(0.01, 0.5).unwrap()), 0.0);
    }

    #[test]
    fn family_two_sign_flips_at_one_half() {
        for k in [-3.0, -0.5, 0.0, 0.25, 0.49] {
            assert!(
                coef(DeformationFamily::poly_minus(0.01, k).unwrap()) > 0.0,
                "k={k}"
            );
        }
        for k in [0.51, 0.75, 0.95] {
            assert!(
                coef(DeformationFamily::poly_minus(0.01, k).unwrap()) < 0.0,
                "k={k}"
            );
        }
    }

    #[test]
    fn leading_correction_tracks_closed_form_kempf() {
        let beta: f64 = 1e-8;
        let fam = DeformationFamily::kempf(beta).unwrap();
        let e = match closed_form_energy(&fam, &natural(), 0, ext(0.5)).unwrap() {
            ClosedForm::Energy(e) => e,
            _ => unreachable!(),
        };
        let shift = e - natural().coulomb_energy(0.5);
        let lead = leading_correction(&fam, &natural(), 0, ext(0.5)).unwrap();
        // The next order is O(β); relative gap O(√β).
        assert!((shift - lead).abs() < 1e-3 * lead);
    }

    #[test]
    fn unsupported_families() {
        assert!(
            leading_correction(&DeformationFamily::Undeformed, &natural(), 1, ext(0.5)).is_err()
        );
        assert!(nominal_exponent(&DeformationFamily::Undeformed).is_err());
    }

    #[test]
    fn f1_needs_beta() {
        let ctx = AlgebraContext::new(natural(), DeformationFamily::Undeformed).unwrap();
        assert!(matches!(dq2_dbeta(&ctx, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn f1_matches_finite_differences_for_kempf() {
        let ctx = AlgebraContext::new(natural(), DeformationFamily::kempf(0.01).unwrap()).unwrap();
        let q = solve_level(&ctx, 0, ext(0.5)).unwrap().q;
        let exact = dq2_dbeta(&ctx, q).unwrap();
        let fd = dq2_dbeta_finite_difference(&ctx, 0, ext(0.5), 1e-5).unwrap();
        assert!((exact - fd).abs() < 1e-5 * fd.abs(), "{exact} vs {fd}");
    }

    #[test]
    fn fit_rejects_narrow_grids() {
        let ctx = AlgebraContext::new(natural(), DeformationFamily::kempf(0.01).unwrap()).unwrap();
        assert!(matches!(
            correction_vs_numeric(&ctx, 0, ext(0.5), &[1e-6, 2e-6, 5e-6]),
            Err(Error::FitConditioning(_))
        ));
    }

    #[test]
    fn power_log_fit_recovers_synthetic_law() {
        let logs: Vec<f64> = (0..9)
            .map(|i| (1e-8f64).ln() + i as f64 * 0.5 * 10f64.ln())
            .collect();
        let y: Vec<f64> = logs
            .iter()
            .map(|l| (0.5 * l).exp() * (0.3 - 0.1 * l))
            .collect();
        let (p, c, d) = fit_power_log(&logs, &y).unwrap();
        assert!((p - 0.5).abs() < 1e-5, "{p}");
        assert!((c - 0.3).abs() < 1e-4 && (d + 0.1).abs() < 1e-5, "{c} {d}");
    }
}
