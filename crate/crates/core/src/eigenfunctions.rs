//! Momentum-space bound states and the integral equation they solve.
//!
//! In pseudo-momentum the level with momentum `q` has the wavefunction
//!
//! ```text
//! φ(p) = C e^{-iϕ(p)} / (g(p)² + q²),    ϕ(p) = (2mα/ħ) ∫₀^p dp' / (g(p')² + q²)
//! ```
//!
//! on `[-b, b]`. The substitution `P = g(p)` turns every integral into one
//! over `(-a, a)` with weight `1/f(P)`, which avoids inverting `g` inside
//! quadratures. The direct pseudo-momentum route is kept for [`phase`] and
//! [`BoundState::norm`] so the two can be checked against each other.

use std::cell::RefCell;
use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::algebra::{AlgebraContext, PhysicalParams};
use crate::error::{Error, Result};
use crate::numerics::{integrate, integrate_with_edges, QuadratureSpec};
use crate::spectrum::{lorentz_split, quantization_integral, EnergyLevel, ExtensionParam};

/// Knot count of the per-state phase table.
const PHASE_KNOTS: usize = 48;
/// Pseudo-momenta closer than this fraction of `b` to the edge take the edge value of `g`.
const EDGE_FRACTION: f64 = 1e-9;

/// Complex amplitude kept in polar form, `modulus · e^{i·phase}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub modulus: f64,
    pub phase: f64,
}

impl Amplitude {
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }
}

/// Momentum-space kernel of the Coulomb term,
/// `U(p - p') = -(α/2ħ)(2iθ(p' - p) - i + A)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    a: f64,
    alpha: f64,
    hbar: f64,
}

impl Kernel {
    /// Kernel for extension `δ`, with `A = cot(πδ)`. `δ = 0` (`A = ∞`) has none.
    pub fn new(ext: ExtensionParam, params: &PhysicalParams) -> Result<Self> {
        if ext.delta() == 0.0 {
            return Err(Error::Precondition(
                "δ = 0 means A = cot(0) = ∞; the kernel needs a finite A".into(),
            ));
        }
        Self::from_a(ext.a(), params)
    }

    pub fn from_a(a: f64, params: &PhysicalParams) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "A must be finite, got {a}"
            )));
        }
        Ok(Self {
            a,
            alpha: params.alpha,
            hbar: params.hbar,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `U(p - p')`, with `θ(0) = 1/2`.
    pub fn eval(&self, p: f64, p_prime: f64) -> Complex64 {
        let theta = if p_prime > p {
            1.0
        } else if p_prime < p {
            0.0
        } else {
            0.5
        };
        Complex64::new(self.a, 2.0 * theta - 1.0) * (-self.alpha / (2.0 * self.hbar))
    }

    /// `∫ U(p - p') φ(p') dp'` from `∫_{-b}^{b} φ` and `∫_{-b}^{p} φ`.
    pub fn apply(&self, full: Complex64, partial: Complex64) -> Complex64 {
        (Complex64::new(self.a, 1.0) * full - Complex64::new(0.0, 2.0) * partial)
            * (-self.alpha / (2.0 * self.hbar))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "q must be positive and finite, got {q}"
        )))
    }
}

/// `∫₀^hi h(g(p)) dp` for `0 ≤ hi ≤ b`, integrating in pseudo-momentum.
/// `scale` is the momentum where `h` turns over.
fn pseudo_integral<H>(ctx: &AlgebraContext, hi: f64, scale: f64, h: H) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    let (a, b) = (ctx.a(), ctx.b());
    if hi == 0.0 {
        return Ok(0.0);
    }
    let edge_value = h(a);
    let failure = RefCell::new(None);
    let eval = |x: f64, to_b: f64| -> f64 {
        if to_b < EDGE_FRACTION * b {
            return edge_value;
        }
        match ctx.g(x) {
            Ok(p) => h(p),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let gap = if b.is_finite() { b - hi } else { f64::INFINITY };
    let split = ctx.g_inverse(if a.is_finite() {
        scale.min(0.5 * a)
    } else {
        scale
    })?;
    let run = || -> Result<f64> {
        if hi <= split {
            return Ok(
                integrate_with_edges(|x, _, dh| eval(x, gap + dh), 0.0, hi, ctx.quad())?.value,
            );
        }
        let inner = integrate_with_edges(|x, _, _| eval(x, f64::INFINITY), 0.0, split, ctx.quad())?;
        // The tail is judged against the whole integral: near an unbounded
        // momentum's edge it decays only logarithmically in b - p.
        let spec = QuadratureSpec {
            abs_tol: ctx
                .quad()
                .abs_tol
                .max(ctx.quad().rel_tol * inner.value.abs()),
            ..*ctx.quad()
        };
        let outer = integrate_with_edges(|x, _, dh| eval(x, gap + dh), split, hi, &spec)?;
        Ok(inner.value + outer.value)
    };
    let out = run();
    match (out, failure.into_inner()) {
        (Ok(v), _) => Ok(v),
        (Err(_), Some(e)) | (Err(e), None) => Err(e),
    }
}

/// `ϕ(p) = (2mα/ħ) ∫₀^p dp'/(g(p')² + q²)`, integrated in pseudo-momentum.
pub fn phase(ctx: &AlgebraContext, q: f64, p: f64) -> Result<f64> {
    check_q(q)?;
    let b = ctx.b();
    if !(p.abs() <= b) {
        return Err(Error::Domain { value: p, bound: b });
    }
    let pp = ctx.params();
    let kappa = 2.0 * pp.mass * pp.alpha / pp.hbar;
    let q2 = q * q;
    let v = pseudo_integral(ctx, p.abs(), q, |g| 1.0 / (g * g + q2))?;
    Ok((kappa * v).copysign(p))
}

/// `C = (∫_{-b}^{b} dp/(g² + q²)²)^{-1/2}`, evaluated as `2∫₀^a dP/(f (P² + q²)²)`.
pub fn normalization(ctx: &AlgebraContext, q: f64) -> Result<f64> {
    check_q(q)?;
    let q2 = q * q;
    let half = lorentz_split(ctx, q, |p| {
        let inv = 1.0 / (p * p + q2);
        inv * inv
    })?;
    Ok(1.0 / (2.0 * half).sqrt())
}

/// Chebyshev points `w cos(π(k + 1/2)/count)`, ascending, strictly inside `(-w, w)`.
pub fn chebyshev_samples(half_width: f64, count: usize) -> Vec<f64> {
    (0..count)
        .rev()
        .map(|k| half_width * (std::f64::consts::PI * (k as f64 + 0.5) / count as f64).cos())
        .collect()
}

/// A momentum, or its distance from the nearer bound when that is finite
/// and closer than `a/2`.
#[derive(Debug, Clone, Copy)]
enum Point {
    Bottom(f64),
    Mid(f64),
    Top(f64),
}

/// A normalized bound state with a cached phase table.
///
/// The table stores `ϕ` at momenta `P_j = q tan(θ_j)` on a uniform `θ` grid,
/// which spreads the Lorentzian `1/(P² + q²)` evenly. Intermediate values
/// integrate exactly from the nearest knot below, so the cache costs no accuracy;
/// the last interval integrates down from the edge value `ϕ(b)`.
#[derive(Debug, Clone)]
pub struct BoundState<'a> {
    ctx: &'a AlgebraContext,
    level: EnergyLevel,
    c: f64,
    kappa: f64,
    phase_b: f64,
    dtheta: f64,
    /// `(P_j, ϕ(P_j))`, starting at `(0, 0)`, all `P_j < a`.
    table: Vec<(f64, f64)>,
}

impl<'a> BoundState<'a> {
    /// State at `level.q`. The energy used throughout is `-q²/(2m)`, so a
    /// deliberately perturbed `q` yields a consistent, non-solving state.
    pub fn new(ctx: &'a AlgebraContext, level: EnergyLevel) -> Result<Self> {
        let q = level.q;
        check_q(q)?;
        let pp = ctx.params();
        let kappa = 2.0 * pp.mass * pp.alpha / pp.hbar;
        let c = normalization(ctx, q)?;
        let phase_b = quantization_integral(ctx, q)?;
        let a = ctx.a();
        let theta_max = if a.is_finite() {
            (a / q).atan()
        } else {
            FRAC_PI_2
        };
        let dtheta = theta_max / PHASE_KNOTS as f64;
        let fam = ctx.family();
        let q2 = q * q;
        let mut table = Vec::with_capacity(PHASE_KNOTS);
        table.push((0.0, 0.0));
        for j in 1..PHASE_KNOTS {
            let p = q * (j as f64 * dtheta).tan();
            let (p0, v0) = table[j - 1];
            let step = integrate(|x| fam.inv_f_stable(x) / (x * x + q2), p0, p, ctx.quad())?;
            table.push((p, v0 + kappa * step.value));
        }
        let level = EnergyLevel {
            energy: -q2 / (2.0 * pp.mass),
            ..level
        };
        Ok(Self {
            ctx,
            level,
            c,
            kappa,
            phase_b,
            dtheta,
            table,
        })
    }

    pub fn level(&self) -> &EnergyLevel {
        &self.level
    }

    pub fn normalization(&self) -> f64 {
        self.c
    }

    /// `ϕ(b)`, equal to the quantization integral at `q`.
    pub fn phase_at_edge(&self) -> f64 {
        self.phase_b
    }

    /// `ϕ` as a function of the momentum `P = g(p)`, `|P| ≤ a`.
    pub fn phase_at_momentum(&self, p: f64) -> Result<f64> {
        let a = self.ctx.a();
        let x = p.abs();
        if !(x <= a) {
            return Err(Error::Domain { value: p, bound: a });
        }
        if x == a {
            return Ok(self.phase_b.copysign(p));
        }
        let q = self.level.q;
        let q2 = q * q;
        let fam = self.ctx.family();
        let h = |t: f64| 1.0 / (t * t + q2);
        let j = ((x / q).atan() / self.dtheta) as usize;
        let v = if j + 1 < self.table.len() {
            let (pj, vj) = self.table[j];
            let step = integrate(|t| fam.inv_f_stable(t) * h(t), pj, x, self.ctx.quad())?;
            vj + self.kappa * step.value
        } else {
            self.phase_b - self.kappa * self.ctx.momentum_integral(x, a, h)?
        };
        Ok(v.copysign(p))
    }

    /// `ϕ(p)` at pseudo-momentum `|p| ≤ b`.
    pub fn phase_at(&self, p: f64) -> Result<f64> {
        let a = self.ctx.a();
        if a.is_finite() {
            let s = self.ctx.g_edge_distance(p)?;
            if s < 0.5 * a {
                return Ok(self.phase_from_edge(s)?.copysign(p));
            }
        }
        self.phase_at_momentum(self.ctx.g_closed(p)?)
    }

    /// `ϕ` at momentum `a - s` of a bounded family, integrated down from `ϕ(b)`.
    fn phase_from_edge(&self, s: f64) -> Result<f64> {
        let a = self.ctx.a();
        let q2 = self.level.q * self.level.q;
        let fam = self.ctx.family();
        let tail = integrate(
            |t| fam.inv_f_from_edge(t) / ((a - t) * (a - t) + q2),
            0.0,
            s,
            self.ctx.quad(),
        )?;
        Ok(self.phase_b - self.kappa * tail.value)
    }

    /// `φ(p) = C e^{-iϕ(p)}/(g(p)² + q²)` for `|p| ≤ b`.
    pub fn eval(&self, p: f64) -> Result<Amplitude> {
        let g = self.ctx.g_closed(p)?;
        let q = self.level.q;
        Ok(Amplitude {
            modulus: self.c / (g * g + q * q),
            phase: -self.phase_at(p)?,
        })
    }

    /// `∫_{-b}^{b} |φ|² dp`, integrated directly in pseudo-momentum.
    pub fn norm(&self) -> Result<f64> {
        let q2 = self.level.q * self.level.q;
        let half = pseudo_integral(self.ctx, self.ctx.b(), self.level.q, |g| {
            let inv = 1.0 / (g * g + q2);
            inv * inv
        })?;
        Ok(2.0 * self.c * self.c * half)
    }

    /// `∫_{-b}^{b} φ dp = (ħC/(mα)) sin ϕ(b)`.
    pub fn integral(&self) -> Complex64 {
        let pp = self.ctx.params();
        Complex64::new(
            pp.hbar * self.c / (pp.mass * pp.alpha) * self.phase_b.sin(),
            0.0,
        )
    }

    /// `∫_{-b}^{p} φ dp' = (iħC/(2mα))(e^{-iϕ(p)} - e^{iϕ(b)})`.
    pub fn partial_integral_closed(&self, p: f64) -> Result<Complex64> {
        let pp = self.ctx.params();
        let scale = Complex64::new(0.0, pp.hbar * self.c / (2.0 * pp.mass * pp.alpha));
        let phi = self.phase_at(p)?;
        Ok(scale * (Complex64::from_polar(1.0, -phi) - Complex64::from_polar(1.0, self.phase_b)))
    }

    /// `∫_{-b}^{b} φ dp` by quadrature.
    pub fn integral_by_quadrature(&self) -> Result<Complex64> {
        let a = self.ctx.a();
        if a.is_finite() {
            self.segment(Point::Bottom(0.0), Point::Top(0.0))
        } else {
            self.momentum_space_integral(-a, a)
        }
    }

    /// `∫_{-b}^{p} φ dp'` by quadrature.
    pub fn partial_integral(&self, p: f64) -> Result<Complex64> {
        let start = if self.ctx.a().is_finite() {
            Point::Bottom(0.0)
        } else {
            Point::Mid(-self.ctx.a())
        };
        self.segment(start, self.locate(p)?)
    }

    /// Position of `g(p)`, kept as an edge distance close to a finite bound.
    fn locate(&self, p: f64) -> Result<Point> {
        let a = self.ctx.a();
        if a.is_finite() {
            let s = self.ctx.g_edge_distance(p)?;
            if s < 0.5 * a {
                return Ok(if p > 0.0 {
                    Point::Top(s)
                } else {
                    Point::Bottom(s)
                });
            }
        }
        Ok(Point::Mid(self.ctx.g_closed(p)?))
    }

    /// `∫ φ` between two ordered positions.
    fn segment(&self, lo: Point, hi: Point) -> Result<Complex64> {
        let half = 0.5 * self.ctx.a();
        let mut total = Complex64::new(0.0, 0.0);
        if let Point::Bottom(t1) = lo {
            let t2 = if let Point::Bottom(t2) = hi { t2 } else { half };
            total += self.edge_integral(t1, t2)?.conj();
        }
        let mid_lo = match lo {
            Point::Bottom(_) => Some(-half),
            Point::Mid(x) => Some(x),
            Point::Top(_) => None,
        };
        let mid_hi = match hi {
            Point::Bottom(_) => None,
            Point::Mid(x) => Some(x),
            Point::Top(_) => Some(half),
        };
        if let (Some(l), Some(h)) = (mid_lo, mid_hi) {
            total += self.momentum_space_integral(l, h)?;
        }
        if let Point::Top(t2) = hi {
            let t1 = if let Point::Top(t1) = lo { t1 } else { half };
            total += self.edge_integral(t2, t1)?;
        }
        Ok(total)
    }

    /// Outer integrals evaluate a quadrature-computed phase at every node;
    /// an absolute floor tied to the natural size `C/q` keeps them from
    /// chasing that noise.
    fn outer_spec(&self) -> QuadratureSpec {
        let base = self.ctx.quad();
        QuadratureSpec {
            abs_tol: base
                .abs_tol
                .max(100.0 * base.rel_tol * self.c / self.level.q),
            ..*base
        }
    }

    /// `∫ φ` over momenta `a - t`, `t ∈ [lo, hi]`, in the edge distance.
    /// The mirror image near `-a` is the complex conjugate.
    fn edge_integral(&self, lo: f64, hi: f64) -> Result<Complex64> {
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = self.ctx.a();
        let q2 = self.level.q * self.level.q;
        let fam = self.ctx.family();
        let failure = RefCell::new(None);
        let integrand = |t: f64, _: f64, _: f64| -> Complex64 {
            match self.phase_from_edge(t) {
                Ok(phi) => {
                    let x = a - t;
                    Complex64::from_polar(self.c * fam.inv_f_from_edge(t) / (x * x + q2), -phi)
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    Complex64::new(f64::NAN, 0.0)
                }
            }
        };
        match integrate_with_edges(integrand, lo, hi, &self.outer_spec()) {
            Ok(est) => Ok(est.value),
            Err(e) => Err(failure.take().unwrap_or(e)),
        }
    }

    /// `∫ C e^{-iϕ(P)} / ((P² + q²) f(P)) dP` over `[lo, hi]`, away from any
    /// finite bound.
    fn momentum_space_integral(&self, lo: f64, hi: f64) -> Result<Complex64> {
        if lo >= hi {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = self.ctx.a();
        let q = self.level.q;
        let q2 = q * q;
        let s = if a.is_finite() { q.min(0.5 * a) } else { q };
        let mut cuts = vec![lo];
        cuts.extend([-s, 0.0, s].into_iter().filter(|c| *c > lo && *c < hi));
        cuts.push(hi);
        let fam = self.ctx.family();
        let spec = self.outer_spec();
        let failure = RefCell::new(None);
        let mut total = Complex64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            let integrand = |x: f64, _: f64, _: f64| -> Complex64 {
                match self.phase_at_momentum(x) {
                    Ok(phi) => {
                        Complex64::from_polar(self.c * fam.inv_f_stable(x) / (x * x + q2), -phi)
                    }
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        Complex64::new(f64::NAN, 0.0)
                    }
                }
            };
            match integrate_with_edges(integrand, w[0], w[1], &spec) {
                Ok(est) => total += est.value,
                Err(e) => return Err(failure.take().unwrap_or(e)),
            }
        }
        Ok(total)
    }

    /// Largest modulus of
    /// `g²φ/(2m) + ∫U(p - p')φ(p')dp' - Eφ` over `samples ⊂ [-b, b]`, with the
    /// kernel of extension `ext`. The full integral takes its closed form;
    /// the partial integrals are accumulated by quadrature between samples.
    pub fn integral_equation_residual(&self, ext: ExtensionParam, samples: &[f64]) -> Result<f64> {
        let pp = self.ctx.params();
        let kernel = Kernel::new(ext, pp)?;
        let b = self.ctx.b();
        if let Some(p) = samples.iter().find(|p| !(p.abs() <= b)) {
            return Err(Error::Domain {
                value: *p,
                bound: b,
            });
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let full = self.integral();
        let q2 = self.level.q * self.level.q;
        let energy = self.level.energy;
        let mut partial = Complex64::new(0.0, 0.0);
        let mut prev = self.locate(-b)?;
        let mut worst = 0.0f64;
        for &p in &sorted {
            let here = self.locate(p)?;
            partial += self.segment(prev, here)?;
            prev = here;
            let g = self.ctx.g_closed(p)?;
            let psi = self.eval(p)?;
            // g²φ, written so that g = ±∞ at an unbounded edge stays finite.
            let g2_share = if g.is_finite() {
                g * g / (g * g + q2)
            } else {
                1.0
            };
            let kinetic = Complex64::from_polar(self.c * g2_share / (2.0 * pp.mass), psi.phase);
            let r = kinetic + kernel.apply(full, partial) - psi.to_complex() * energy;
            worst = worst.max(r.norm());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DeformationFamily;
    use crate::spectrum::solve_level;
    use std::f64::consts::PI;

    fn ctx(family: DeformationFamily) -> AlgebraContext {
        AlgebraContext::new(PhysicalParams::natural(), family).unwrap()
    }

    fn ext(d: f64) -> ExtensionParam {
        ExtensionParam::new(d).unwrap()
    }

    #[test]
    fn undeformed_phase_is_arctan() {
        let c = ctx(DeformationFamily::Undeformed);
        for (q, p) in [(1.0f64, 0.5f64), (0.3, 2.0), (2.0, -7.0)] {
            let want = 2.0 / q * (p / q).atan();
            let got = phase(&c, q, p).unwrap();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(phase(&c, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn undeformed_normalization() {
        let c = ctx(DeformationFamily::Undeformed);
        let c1 = normalization(&c, 1.0).unwrap();
        assert!((c1 - (2.0 / PI).sqrt()).abs() < 1e-13);
        let lambda: f64 = 2.7;
        let cl = normalization(&c, lambda).unwrap();
        assert!((cl / c1 - lambda.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn phase_domain_checked() {
        let c = ctx(DeformationFamily::kempf(1.0).unwrap());
        assert!(phase(&c, 1.0, 2.0).is_err());
        assert!(phase(&c, 0.0, 0.5).is_err());
    }

    #[test]
    fn kernel_values() {
        let k = Kernel::new(ext(0.5), &PhysicalParams::natural()).unwrap();
        assert_eq!(k.a(), 0.0);
        assert_eq!(k.eval(0.0, 1.0), Complex64::new(0.0, -0.5));
        assert_eq!(k.eval(1.0, 0.0), Complex64::new(0.0, 0.5));
        assert_eq!(k.eval(1.0, 1.0), Complex64::new(0.0, 0.0));
        assert!(Kernel::new(ext(0.0), &PhysicalParams::natural()).is_err());
    }

    #[test]
    fn kernel_apply_matches_pointwise_quadrature() {
        // φ(p) = e^{ip} on [-1, 1]: ∫U(p - p')φ(p')dp' by splitting at p.
        let params = PhysicalParams::new(1.0, 1.0, 0.8).unwrap();
        let k = Kernel::new(ext(0.3), &params).unwrap();
        let phi = |x: f64| Complex64::from_polar(1.0, x);
        let spec = crate::numerics::QuadratureSpec::default();
        let p = 0.35;
        let direct = crate::numerics::integrate_complex(|x| k.eval(p, x) * phi(x), -1.0, p, &spec)
            .unwrap()
            .value
            + crate::numerics::integrate_complex(|x| k.eval(p, x) * phi(x), p, 1.0, &spec)
                .unwrap()
                .value;
        let full = crate::numerics::integrate_complex(phi, -1.0, 1.0, &spec)
            .unwrap()
            .value;
        let partial = crate::numerics::integrate_complex(phi, -1.0, p, &spec)
            .unwrap()
            .value;
        assert!((k.apply(full, partial) - direct).norm() < 1e-13);
    }

    #[test]
    fn chebyshev_points() {
        let s = chebyshev_samples(2.0, 21);
        assert_eq!(s.len(), 21);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s[10].abs() < 1e-15);
        assert!(s[0] > -2.0 && s[20] < 2.0);
    }

    #[test]
    fn kempf_state_is_normalized_and_solves_equation() {
        let c = ctx(DeformationFamily::kempf(0.3).unwrap());
        let lv = solve_level(&c, 1, ext(0.5)).unwrap();
        let st = BoundState::new(&c, lv).unwrap();
        assert!((st.norm().unwrap() - 1.0).abs() < 1e-10);
        let samples = chebyshev_samples(c.b(), 21);
        let r = st.integral_equation_residual(ext(0.5), &samples).unwrap();
        assert!(r < 1e-8 * lv.energy.abs(), "{r}");
    }

    #[test]
    fn table_phase_matches_pseudo_route() {
        let c = ctx(DeformationFamily::poly_minus(0.3, 0.75).unwrap());
        let lv = solve_level(&c, 0, ext(0.7)).unwrap();
        let st = BoundState::new(&c, lv).unwrap();
        for frac in [-0.999_999, -0.5, 0.01, 0.3, 0.9, 0.999_999_9, 1.0] {
            let p = frac * c.b();
            let a = st.phase_at(p).unwrap();
            let b = phase(&c, lv.q, p).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()), "p={p}: {a} vs {b}");
        }
        assert!((st.phase_at(c.b()).unwrap() - PI * 0.7).abs() < 1e-9);
    }

    #[test]
    fn partial_integrals_agree() {
        let c = ctx(DeformationFamily::exp_cbrt(0.2).unwrap());
        let lv = solve_level(&c, 2, ext(0.25)).unwrap();
        let st = BoundState::new(&c, lv).unwrap();
        for frac in [-0.9, -0.2, 0.0, 0.4, 0.95] {
            let p = frac * c.b();
            let quad = st.partial_integral(p).unwrap();
            let closed = st.partial_integral_closed(p).unwrap();
            assert!(
                (quad - closed).norm() < 1e-10 * st.normalization(),
                "{quad} vs {closed}"
            );
        }
        let full = st.integral_by_quadrature().unwrap();
        assert!((full - st.integral()).norm() < 1e-8 * st.integral().norm());
    }

    #[test]
    fn residual_rejects_delta_zero() {
        let c = ctx(DeformationFamily::kempf(0.3).unwrap());
        let lv = solve_level(&c, 1, ext(0.0)).unwrap();
        let st = BoundState::new(&c, lv).unwrap();
        assert!(st.integral_equation_residual(ext(0.0), &[0.0]).is_err());
    }
}
