//! Spectra known in closed form, used as oracles for the generic solver.

use std::f64::consts::PI;

use crate::algebra::{DeformationFamily, PhysicalParams};
use crate::error::{Error, Result};
use crate::numerics::{solve_root, Domain, RootSpec};

use super::ExtensionParam;

/// Either an explicit energy or a transcendental equation in `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Energy(f64),
    Equation(LevelEquation),
}

/// Which elementary level equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EquationKind {
    /// `(1 + βP²)^{3/2}`.
    PolyPlusThreeHalves,
    /// `(1 - βP²)^{-1}`.
    PolyMinusInverse,
}

/// `lhs(q) = rhs` with `lhs` strictly decreasing in `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEquation {
    kind: EquationKind,
    beta: f64,
    params: PhysicalParams,
    nu: f64,
}

impl LevelEquation {
    pub fn lhs(&self, q: f64) -> f64 {
        let s = self.beta.sqrt();
        match self.kind {
            EquationKind::PolyPlusThreeHalves => {
                // With r = 1/(βq²) - 1 the left side is
                // √β (1+r)/r · [(1+r) G(r) - 1], G(r) = arctan(√r)/√r,
                // continued through artanh for r < 0 and by series near r = 0.
                let r = 1.0 / (self.beta * q * q) - 1.0;
                s * (1.0 + r) * bracket_over_r(r)
            }
            EquationKind::PolyMinusInverse => {
                let x = s * q;
                (1.0 + self.beta * q * q) / q * (1.0 / x).atan() - s
            }
        }
    }

    /// `πħν/(2mα)`.
    pub fn rhs(&self) -> f64 {
        let p = &self.params;
        PI * p.hbar * self.nu / (2.0 * p.mass * p.alpha)
    }

    pub fn residual(&self, q: f64) -> f64 {
        self.lhs(q) - self.rhs()
    }

    /// Root of the equation, found independently of the quadrature route.
    pub fn solve(&self, spec: &RootSpec) -> Result<f64> {
        let seed = self.params.coulomb_momentum(self.nu);
        solve_root(|q| self.residual(q), seed, Domain::POSITIVE, spec)
    }
}

/// `[(1+r) G(r) - 1]/r` for `r > -1`.
fn bracket_over_r(r: f64) -> f64 {
    if r.abs() < 0.1 {
        // Σ_{j≥1} (-1)^{j+1} r^{j-1} · 2/(4j² - 1)
        let mut sum = 0.0;
        let mut pow = 1.0;
        for j in 1..=40 {
            let jf = f64::from(j);
            let term = pow * 2.0 / (4.0 * jf * jf - 1.0);
            sum += if j % 2 == 1 { term } else { -term };
            pow *= r;
        }
        return sum;
    }
    let g = if r > 0.0 {
        r.sqrt().atan() / r.sqrt()
    } else {
        (-r).sqrt().atanh() / (-r).sqrt()
    };
    ((1.0 + r) * g - 1.0) / r
}

/// Closed-form energy of level `(n, δ)` for the families that have one.
pub fn closed_form_energy(
    family: &DeformationFamily,
    params: &PhysicalParams,
    n: u32,
    ext: ExtensionParam,
) -> Result<ClosedForm> {
    let nu = f64::from(n) + ext.delta();
    if nu == 0.0 {
        return Err(Error::Precondition(
            "n + δ = 0 (n = 0 with δ = 0) has no bound state".into(),
        ));
    }
    let q0 = params.coulomb_momentum(nu);
    let m = params.mass;
    let equation = |kind, beta| {
        Ok(ClosedForm::Equation(LevelEquation {
            kind,
            beta,
            params: *params,
            nu,
        }))
    };
    match *family {
        DeformationFamily::Undeformed => Ok(ClosedForm::Energy(params.coulomb_energy(nu))),
        DeformationFamily::PolyPlus { beta, k } if k == 1.0 => {
            // √β q² + q = q₀
            let q = 2.0 * q0 / (1.0 + (1.0 + 4.0 * beta.sqrt() * q0).sqrt());
            Ok(ClosedForm::Energy(-q * q / (2.0 * m)))
        }
        DeformationFamily::PolyMinus { beta, k } if k == 0.5 => {
            // q²(1 + βq²) = q₀²
            let q2 = 2.0 * q0 * q0 / (1.0 + (1.0 + 4.0 * beta * q0 * q0).sqrt());
            Ok(ClosedForm::Energy(-q2 / (2.0 * m)))
        }
        DeformationFamily::PolyPlus { beta, k } if k == 1.5 => {
            equation(EquationKind::PolyPlusThreeHalves, beta)
        }
        DeformationFamily::PolyMinus { beta, k } if k == -1.0 => {
            equation(EquationKind::PolyMinusInverse, beta)
        }
        _ => Err(Error::Unsupported(format!(
            "no closed-form spectrum for {family}"
        ))),
    }
}
