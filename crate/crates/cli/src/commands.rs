//! The subcommands. Each builds a [`Table`]; printing is left to `main`.

use std::f64::consts::PI;

use mlcoulomb::eigenfunctions::{chebyshev_samples, BoundState};
use mlcoulomb::extensions::{orthonormality_defect, GridFunction, PositionExtension};
use mlcoulomb::spectrum::{
    closed_form_energy, correction_vs_numeric, dq2_dbeta, dq2_dbeta_finite_difference,
    leading_correction, nominal_exponent, quantization_integral, solve_level, ClosedForm,
    ScalingModel,
};
use mlcoulomb::{AlgebraContext, Error, ExtensionParam};
use num_complex::Complex64;

use crate::config::RunConfig;
use crate::table::{Cell, Table};
use crate::CliError;

/// β grid of the correction fits.
const FIT_BETAS: (f64, f64, usize) = (1e-8, 1e-4, 9);
/// Relative step of the finite-difference check on `∂q²/∂β`.
const FD_STEP: f64 = 1e-5;
/// Pseudo-momentum window, in units of `q`, when `b` is infinite.
const UNBOUNDED_WINDOW: f64 = 40.0;
/// Sample count of the integral-equation residual.
const RESIDUAL_SAMPLES: usize = 21;
const DEFAULT_SAMPLES: usize = 101;
const DEFAULT_TRUNCATION: usize = 200;

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

fn core(e: Error) -> CliError {
    CliError::from_core(e)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Table, CliError> {
    let ctx = cfg.context()?;
    let mut t = Table::new(&[
        "n",
        "delta",
        "q",
        "E",
        "closed_form_E",
        "rel_err",
        "residual",
        "equation_residual",
    ]);
    for n in cfg.levels.clone() {
        let lv = solve_level(&ctx, n, cfg.ext).map_err(core)?;
        let phi = quantization_integral(&ctx, lv.q).map_err(core)?;
        let residual = (phi - PI * cfg.ext.delta()).sin();
        let (closed, eq_residual) = match closed_form_energy(&cfg.family, &cfg.params, n, cfg.ext) {
            Ok(ClosedForm::Energy(e)) => (Some(e), None),
            Ok(ClosedForm::Equation(eq)) => {
                let q = eq.solve(&cfg.root).map_err(core)?;
                (
                    Some(-q * q / (2.0 * cfg.params.mass)),
                    Some(eq.residual(lv.q)),
                )
            }
            Err(Error::Unsupported(_)) => (None, None),
            Err(e) => return Err(core(e)),
        };
        let rel = closed.map(|e| (lv.energy - e) / e.abs());
        t.push(vec![
            n.into(),
            cfg.ext.delta().into(),
            lv.q.into(),
            lv.energy.into(),
            closed.into(),
            rel.into(),
            residual.into(),
            eq_residual.into(),
        ]);
    }
    Ok(t)
}

pub fn corrections(cfg: &RunConfig) -> Result<Table, CliError> {
    let ctx = cfg.context()?;
    let beta = cfg
        .family
        .beta()
        .ok_or_else(|| CliError::config(format!("{} has no deformation parameter", cfg.family)))?;
    let p0 = nominal_exponent(&cfg.family).map_err(core)?;
    let betas = logspace(FIT_BETAS.0, FIT_BETAS.1, FIT_BETAS.2);
    let mut t = Table::new(&[
        "n",
        "dE_formula",
        "dE_fit",
        "exponent_fit",
        "coefficient_fit",
        "model",
        "dq2_dbeta",
        "fd_check",
    ]);
    for n in cfg.levels.clone() {
        let formula = leading_correction(&cfg.family, &cfg.params, n, cfg.ext).map_err(core)?;
        let fit = correction_vs_numeric(&ctx, n, cfg.ext, &betas).map_err(core)?;
        let (fitted, model) = match fit.model {
            ScalingModel::Power => (fit.coefficient * beta.powf(p0), "power"),
            ScalingModel::PowerLog => (
                beta.powf(fit.exponent)
                    * (fit.coefficient + fit.log_coefficient.unwrap_or(0.0) * beta.ln()),
                "power-log",
            ),
        };
        let q = solve_level(&ctx, n, cfg.ext).map_err(core)?.q;
        let exact = dq2_dbeta(&ctx, q).map_err(core)?;
        let fd = dq2_dbeta_finite_difference(&ctx, n, cfg.ext, FD_STEP).map_err(core)?;
        t.push(vec![
            n.into(),
            formula.into(),
            fitted.into(),
            fit.exponent.into(),
            fit.coefficient.into(),
            model.into(),
            exact.into(),
            fd.into(),
        ]);
    }
    Ok(t)
}

pub fn eigenfunction(cfg: &RunConfig) -> Result<Table, CliError> {
    if cfg.levels.start() != cfg.levels.end() {
        return Err(CliError::config(
            "eigenfunction takes a single level, e.g. --levels 2",
        ));
    }
    let n = *cfg.levels.start();
    let count = cfg.samples.unwrap_or(DEFAULT_SAMPLES);
    if count < 2 {
        return Err(CliError::config("need at least two samples"));
    }
    let ctx = cfg.context()?;
    let level = solve_level(&ctx, n, cfg.ext).map_err(core)?;
    let state = BoundState::new(&ctx, level).map_err(core)?;
    let half = if ctx.b().is_finite() {
        ctx.b()
    } else {
        eprintln!(
            "note: b is infinite; sampling |p| ≤ {UNBOUNDED_WINDOW}q instead of the whole line"
        );
        UNBOUNDED_WINDOW * level.q
    };
    let mut t = Table::new(&["p", "abs_amplitude", "phase"]);
    for j in 0..count {
        let p = if j + 1 == count {
            half
        } else {
            -half + 2.0 * half * (j as f64 / (count - 1) as f64)
        };
        let amp = state.eval(p).map_err(core)?;
        t.push(vec![p.into(), amp.modulus.into(), amp.phase.into()]);
    }
    let norm = state.norm().map_err(core)?;
    let residual = state
        .integral_equation_residual(cfg.ext, &chebyshev_samples(half, RESIDUAL_SAMPLES))
        .map_err(core)?;
    t.summary = vec![
        ("n", n.into()),
        ("extension", cfg.ext_choice.to_string().into()),
        ("delta", cfg.ext.delta().into()),
        ("q", level.q.into()),
        ("E", level.energy.into()),
        ("norm", norm.into()),
        ("max_residual", residual.into()),
        (
            "residual_over_abs_E",
            (residual / level.energy.abs()).into(),
        ),
    ];
    Ok(t)
}

/// Outcome of one extensions check.
struct Check {
    name: &'static str,
    value: Option<f64>,
    threshold: f64,
    skipped: bool,
}

impl Check {
    fn passed(&self) -> bool {
        self.skipped || self.value.is_some_and(|v| v <= self.threshold)
    }
}

/// `e^{-iδπp/b}` times a bump vanishing with all derivatives at `±b`: a
/// smooth member of every domain.
fn bump_fn(op: &PositionExtension) -> impl Fn(f64) -> Complex64 {
    let (b, d) = (op.b(), op.ext().delta());
    move |p| {
        let x = p / b;
        if x.abs() >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar((1.0 - 1.0 / (1.0 - x * x)).exp(), -d * PI * p / b)
        }
    }
}

fn bump(op: &PositionExtension, intervals: usize) -> Result<GridFunction, Error> {
    GridFunction::from_fn(op.b(), intervals, bump_fn(op))
}

fn combination(op: &PositionExtension, intervals: usize) -> Result<GridFunction, Error> {
    let terms = [
        (-2, Complex64::new(0.5, 0.1)),
        (-1, Complex64::new(-1.0, 0.3)),
        (0, Complex64::new(0.2, -0.7)),
        (3, Complex64::new(0.0, 1.1)),
        (6, Complex64::new(0.4, 0.4)),
    ];
    let mut acc = GridFunction::from_fn(op.b(), intervals, |_| Complex64::new(0.0, 0.0))?;
    for (n, c) in terms {
        acc = acc.add(&op.eigenstate(n).sample(intervals)?.scale(c))?;
    }
    Ok(acc)
}

/// Runs the extension checks; the boolean is false when any check failed.
pub fn extensions_check(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let ctx = cfg.context()?;
    let op = PositionExtension::new(&ctx, cfg.ext).map_err(core)?;
    let truncation = cfg.truncation.unwrap_or(DEFAULT_TRUNCATION);
    let grid = (4 * truncation + 4).next_power_of_two();
    let mut checks = Vec::new();

    checks.push(Check {
        name: "orthonormality",
        value: Some(orthonormality_defect(&op, 10, &cfg.quad).map_err(core)?),
        threshold: 1e-12,
        skipped: false,
    });
    checks.push(Check {
        name: "parseval",
        value: Some(
            op.completeness_defect(&bump(&op, grid).map_err(core)?, truncation)
                .map_err(core)?,
        ),
        threshold: 1e-4,
        skipped: false,
    });
    checks.push(Check {
        name: "parity_mismatch",
        value: Some(op.parity_mismatch(50)),
        threshold: 1e-12,
        skipped: false,
    });

    if cfg.ext.delta() == 0.0 {
        eprintln!(
            "note: δ = 0 has the eigenvalue λ = 0, so 1/X_δ does not exist; inverse checks skipped"
        );
        for name in ["two_sided_inverse", "integral_vs_spectral"] {
            checks.push(Check {
                name,
                value: None,
                threshold: f64::NAN,
                skipped: true,
            });
        }
    } else {
        let f = combination(&op, 64).map_err(core)?;
        let left = op
            .apply_x(&op.apply_inverse_x(&f, &cfg.quad).map_err(core)?)
            .map_err(core)?;
        let right = op
            .apply_inverse_x(&op.apply_x(&f).map_err(core)?, &cfg.quad)
            .map_err(core)?;
        let err = left
            .max_distance(&f)
            .map_err(core)?
            .max(right.max_distance(&f).map_err(core)?);
        checks.push(Check {
            name: "two_sided_inverse",
            value: Some(err),
            threshold: 1e-8,
            skipped: false,
        });
        let smooth = bump(&op, grid).map_err(core)?;
        let spectral = op
            .apply_inverse_x_spectral(&smooth, truncation)
            .map_err(core)?;
        let integral = op
            .inverse_x_integral(bump_fn(&op), &smooth.points(), &cfg.quad)
            .and_then(|v| GridFunction::new(op.b(), v))
            .map_err(core)?;
        checks.push(Check {
            name: "integral_vs_spectral",
            value: Some(integral.max_distance(&spectral.value).map_err(core)?),
            threshold: spectral.tail + 1e-10,
            skipped: false,
        });
    }

    // At δ = 1/2, cot(πδ) = 0 and c must be exactly (i/2ħ)∫φ.
    let half =
        PositionExtension::new(&ctx, ExtensionParam::new(0.5).map_err(core)?).map_err(core)?;
    let f = bump(&half, 256).map_err(core)?;
    let c = half.c_functional(&f).map_err(core)?;
    let want = Complex64::new(0.0, 0.5 / ctx.params().hbar) * half.integral(&f).map_err(core)?;
    checks.push(Check {
        name: "c_half_imaginary",
        value: Some(if c == want {
            0.0
        } else {
            (c - want).norm().max(f64::MIN_POSITIVE)
        }),
        threshold: 0.0,
        skipped: false,
    });

    let mut t = Table::new(&["check", "value", "threshold", "status"]);
    let mut ok = true;
    for c in &checks {
        ok &= c.passed();
        let status = if c.skipped {
            "skipped"
        } else if c.passed() {
            "pass"
        } else {
            "fail"
        };
        t.push(vec![
            c.name.into(),
            c.value.into(),
            if c.skipped {
                Cell::Empty
            } else {
                c.threshold.into()
            },
            status.into(),
        ]);
    }
    t.summary = vec![
        ("delta", cfg.ext.delta().into()),
        ("minimal_length", op.minimal_length().into()),
        ("truncation", (truncation as i64).into()),
        ("grid_intervals", (grid as i64).into()),
    ];
    Ok((t, ok))
}

pub fn minimal_length(cfg: &RunConfig) -> Result<Table, CliError> {
    let ctx: AlgebraContext = cfg.context()?;
    let mut t = Table::new(&["family", "a", "b", "l0"]);
    t.push(vec![
        cfg.family.to_string().into(),
        ctx.a().into(),
        ctx.b().into(),
        ctx.minimal_length().into(),
    ]);
    Ok(t)
}
