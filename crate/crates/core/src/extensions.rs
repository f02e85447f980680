//! Self-adjoint extensions `X_δ` of the position operator `X = iħ d/dp` on
//! `[-b, b]`, their eigenbases and the two-sided inverse `1/X_δ`.
//!
//! Grid functions are sampled uniformly with both endpoints. Twisting a member
//! of the domain `ψ(-b) = e^{2iδπ}ψ(b)` by `e^{iδπp/b}` makes it periodic, so
//! eigenstate projections by the trapezoid rule are a discrete Fourier
//! transform and converge spectrally.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::AlgebraContext;
use crate::error::{Error, Result};
use crate::numerics::{integrate_complex, QuadratureSpec};
use crate::spectrum::ExtensionParam;

/// Default number of retained modes on each side of `n = 0` in truncated
/// spectral sums.
pub const DEFAULT_TRUNCATION: usize = 256;

/// Fewest grid intervals accepted.
pub const MIN_INTERVALS: usize = 16;

/// Mismatch allowed in `ψ(-b) = e^{2iδπ}ψ(b)`, relative to `max |ψ|`.
const BOUNDARY_TOL: f64 = 1e-9;

/// `λ_{n,δ} = 2(δ + n) l₀`.
pub fn position_eigenvalue(ctx: &AlgebraContext, n: i64, ext: ExtensionParam) -> Result<f64> {
    Ok(PositionExtension::new(ctx, ext)?.eigenvalue(n))
}

/// `⟨ψ_λ|ψ_λ'⟩ = sin(x)/x` with `x = (λ - λ')b/ħ`.
pub fn inner_product(lambda: f64, lambda2: f64, b: f64, hbar: f64) -> f64 {
    sinc_pi((lambda - lambda2) * b / (PI * hbar))
}

/// `sin(πx)/(πx)`, exactly zero at nonzero integers.
fn sinc_pi(x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    // Reduce to r ∈ [-1, 1] with sin(πx) = ±sin(πr).
    let k = x.round();
    let r = x - k;
    let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
    sign * (PI * r).sin() / (PI * x)
}

/// `1 - δ (mod 1)`: the extension carried into `X_δ` by parity.
pub fn parity_map(ext: ExtensionParam) -> ExtensionParam {
    ext.parity()
}

/// An eigenstate `ψ_λ(p) = e^{-iλp/ħ}/√(2b)` of `X_δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEigenstate {
    pub n: i64,
    pub delta: ExtensionParam,
    pub lambda: f64,
    pub b: f64,
    hbar: f64,
}

impl PositionEigenstate {
    pub fn eval(&self, p: f64) -> Complex64 {
        Complex64::from_polar(1.0 / (2.0 * self.b).sqrt(), -self.lambda * p / self.hbar)
    }

    pub fn sample(&self, intervals: usize) -> Result<GridFunction> {
        GridFunction::from_fn(self.b, intervals, |p| self.eval(p))
    }

    /// `⟨self|other⟩`; exact Kronecker delta within one extension.
    pub fn overlap(&self, other: &Self) -> f64 {
        if self.delta == other.delta && self.b == other.b && self.hbar == other.hbar {
            if self.n == other.n {
                1.0
            } else {
                0.0
            }
        } else {
            inner_product(self.lambda, other.lambda, self.b, self.hbar)
        }
    }
}

/// Uniform samples of a complex function at `p_j = -b + 2bj/N`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    b: f64,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(b: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid functions need a finite bound b > 0, got {b}"
            )));
        }
        if values.len() < MIN_INTERVALS + 1 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least {} samples, got {}",
                MIN_INTERVALS + 1,
                values.len()
            )));
        }
        if let Some(v) = values
            .iter()
            .find(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::InvalidParameter(format!("non-finite sample {v}")));
        }
        Ok(Self { b, values })
    }

    pub fn from_fn(b: f64, intervals: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = (0..=intervals)
            .map(|j| f(grid_point(b, intervals, j)))
            .collect();
        Self::new(b, values)
    }

    /// `e^{-iδπp/b} u(p)`, which lies in the domain of `X_δ` whenever
    /// `u(-b) = u(b)`.
    pub fn twisted(
        b: f64,
        intervals: usize,
        ext: ExtensionParam,
        u: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let d = ext.delta();
        Self::from_fn(b, intervals, |p| {
            u(p) * Complex64::from_polar(1.0, -d * PI * p / b)
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn point(&self, j: usize) -> f64 {
        grid_point(self.b, self.intervals(), j)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..=self.intervals()).map(|j| self.point(j)).collect()
    }

    fn same_grid(&self, other: &Self) -> Result<()> {
        if self.b != other.b || self.values.len() != other.values.len() {
            return Err(Error::InvalidParameter(
                "grid functions live on different grids".into(),
            ));
        }
        Ok(())
    }

    /// `⟨self|other⟩` by the trapezoid rule.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.same_grid(other)?;
        let n = self.intervals();
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, (u, v)) in self.values.iter().zip(&other.values).enumerate() {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            sum += u.conj() * v * w;
        }
        Ok(sum * (2.0 * self.b / n as f64))
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).map(|z| z.re).unwrap_or(f64::NAN)
    }

    pub fn max_distance(&self, other: &Self) -> Result<f64> {
        self.same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(Iφ)(p) = φ(-p)`.
    pub fn parity(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { b: self.b, values }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            b: self.b,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            b: self.b,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(u, v)| u + v)
                .collect(),
        })
    }

    /// `|ψ(-b) - e^{2iδπ}ψ(b)|`.
    pub fn boundary_mismatch(&self, ext: ExtensionParam) -> f64 {
        let first = self.values[0];
        let last = self.values[self.intervals()];
        (first - Complex64::from_polar(1.0, 2.0 * PI * ext.delta()) * last).norm()
    }
}

fn grid_point(b: f64, intervals: usize, j: usize) -> f64 {
    if j == intervals {
        b
    } else {
        -b + 2.0 * b * (j as f64 / intervals as f64)
    }
}

/// Projections `⟨ψ_n|φ⟩` for the `N` consecutive indices resolved by an
/// `N`-interval grid, `n ∈ [-N/2, N/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    pub first: i64,
    pub values: Vec<Complex64>,
}

impl Coefficients {
    pub fn get(&self, n: i64) -> Option<Complex64> {
        usize::try_from(n - self.first)
            .ok()
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.values.len() as i64).map(move |i| self.first + i)
    }
}

/// A truncated spectral sum together with the size of what it left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncated {
    pub value: GridFunction,
    /// `Σ |c_n/λ_n| / √(2b)` over resolved modes beyond the truncation: a
    /// pointwise bound on the omitted part.
    pub tail: f64,
}

/// `X_δ` on `[-b, b]` for a context with a minimal length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionExtension {
    ext: ExtensionParam,
    b: f64,
    hbar: f64,
    l0: f64,
}

impl PositionExtension {
    pub fn new(ctx: &AlgebraContext, ext: ExtensionParam) -> Result<Self> {
        let l0 = ctx.minimal_length();
        if !(l0 > 0.0) {
            return Err(Error::Precondition(format!(
                "{} has no minimal length, so X has no discrete eigenbasis",
                ctx.family()
            )));
        }
        Ok(Self {
            ext,
            b: ctx.b(),
            hbar: ctx.params().hbar,
            l0,
        })
    }

    pub fn ext(&self) -> ExtensionParam {
        self.ext
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn minimal_length(&self) -> f64 {
        self.l0
    }

    pub fn eigenvalue(&self, n: i64) -> f64 {
        2.0 * (self.ext.delta() + n as f64) * self.l0
    }

    pub fn eigenstate(&self, n: i64) -> PositionEigenstate {
        PositionEigenstate {
            n,
            delta: self.ext,
            lambda: self.eigenvalue(n),
            b: self.b,
            hbar: self.hbar,
        }
    }

    /// The extension `X_{1-δ}` related to this one by parity.
    pub fn parity_partner(&self) -> Self {
        Self {
            ext: parity_map(self.ext),
            ..*self
        }
    }

    fn check_grid(&self, f: &GridFunction) -> Result<()> {
        if f.b() != self.b {
            return Err(Error::InvalidParameter(format!(
                "grid bound {} differs from b = {}",
                f.b(),
                self.b
            )));
        }
        Ok(())
    }

    fn check_boundary(&self, f: &GridFunction) -> Result<()> {
        let mismatch = f.boundary_mismatch(self.ext);
        if mismatch > BOUNDARY_TOL * f.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::BoundaryCondition { mismatch });
        }
        Ok(())
    }

    fn require_invertible(&self) -> Result<()> {
        if self.ext.delta() == 0.0 {
            return Err(Error::Precondition(
                "1/X_δ is undefined at δ = 0: λ_{0,0} = 0 and cot(πδ) diverges".into(),
            ));
        }
        Ok(())
    }

    /// `⟨ψ_n|φ⟩` for every mode the grid resolves. Exact for combinations of
    /// those modes, spectrally accurate for smooth members of the domain.
    pub fn coefficients(&self, f: &GridFunction) -> Result<Coefficients> {
        self.check_grid(f)?;
        let n = f.intervals();
        let roots = roots_of_unity(n);
        let d = self.ext.delta();
        // u_j = e^{iδπp_j/b} φ_j, half weights at the ends.
        let twisted: Vec<Complex64> = f
            .values()
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                v * Complex64::from_polar(w, d * PI * f.point(j) / self.b)
            })
            .collect();
        let first = -((n / 2) as i64);
        let norm = 2.0 * self.b / n as f64 / (2.0 * self.b).sqrt();
        let values = (0..n as i64)
            .map(|i| {
                let m = first + i;
                // e^{imπp_j/b} = (-1)^m e^{2πimj/N}
                let mut sum = Complex64::new(0.0, 0.0);
                for (j, u) in twisted.iter().enumerate() {
                    sum += u * roots[(m * j as i64).rem_euclid(n as i64) as usize];
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sum * (sign * norm)
            })
            .collect();
        Ok(Coefficients { first, values })
    }

    /// `Σ w(n) c_n ψ_n` on the grid of `like`.
    fn synthesize(
        &self,
        like: &GridFunction,
        coeffs: &Coefficients,
        weight: impl Fn(i64) -> Option<f64>,
    ) -> GridFunction {
        let n = like.intervals();
        let roots = roots_of_unity(n);
        let d = self.ext.delta();
        let norm = 1.0 / (2.0 * self.b).sqrt();
        let values = (0..=n)
            .map(|j| {
                let mut sum = Complex64::new(0.0, 0.0);
                for (m, c) in coeffs.indices().zip(&coeffs.values) {
                    if let Some(w) = weight(m) {
                        let sign = if m % 2 == 0 { w } else { -w };
                        let k = (-m * j as i64).rem_euclid(n as i64) as usize;
                        sum += c * roots[k] * sign;
                    }
                }
                sum * Complex64::from_polar(norm, -d * PI * like.point(j) / self.b)
            })
            .collect();
        GridFunction { b: self.b, values }
    }

    /// `X_δφ = Σ λ_n ⟨ψ_n|φ⟩ ψ_n`, i.e. `iħφ'` for `φ` in the domain.
    pub fn apply_x(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check_grid(f)?;
        self.check_boundary(f)?;
        let coeffs = self.coefficients(f)?;
        Ok(self.synthesize(f, &coeffs, |m| Some(self.eigenvalue(m))))
    }

    /// `Σ_{|n| ≤ n_trunc} λ_n⁻¹ ⟨ψ_n|φ⟩ ψ_n`. The grid must resolve every
    /// retained mode.
    pub fn apply_inverse_x_spectral(&self, f: &GridFunction, n_trunc: usize) -> Result<Truncated> {
        self.require_invertible()?;
        let coeffs = self.coefficients(f)?;
        let k = n_trunc as i64;
        if coeffs.first > -k || coeffs.first + coeffs.values.len() as i64 - 1 < k {
            return Err(Error::InvalidParameter(format!(
                "a {}-interval grid resolves |n| < {}, truncation asks for {n_trunc}",
                f.intervals(),
                f.intervals() / 2
            )));
        }
        let tail = coeffs
            .indices()
            .zip(&coeffs.values)
            .filter(|(m, _)| m.abs() > k)
            .map(|(m, c)| c.norm() / self.eigenvalue(m).abs())
            .sum::<f64>()
            / (2.0 * self.b).sqrt();
        let value = self.synthesize(f, &coeffs, |m| {
            (m.abs() <= k).then(|| 1.0 / self.eigenvalue(m))
        });
        Ok(Truncated { value, tail })
    }

    /// `1/X_δ φ(p) = -(i/ħ)∫_{-b}^p φ + c_δ[φ]` at ascending `points`, with
    /// both integrals by quadrature of `φ` itself.
    pub fn inverse_x_integral<F>(
        &self,
        f: F,
        points: &[f64],
        quad: &QuadratureSpec,
    ) -> Result<Vec<Complex64>>
    where
        F: Fn(f64) -> Complex64,
    {
        self.require_invertible()?;
        if let Some(p) = points.iter().find(|p| !(p.abs() <= self.b)) {
            return Err(Error::Domain {
                value: *p,
                bound: self.b,
            });
        }
        if points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("points must be ascending".into()));
        }
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = Complex64::new(0.0, 0.0);
        let mut prev = -self.b;
        for &p in points {
            if p > prev {
                acc += integrate_complex(&f, prev, p, quad)?.value;
            }
            cumulative.push(acc);
            prev = p;
        }
        let full = if prev < self.b {
            acc + integrate_complex(&f, prev, self.b, quad)?.value
        } else {
            acc
        };
        let c = self.c_from_integral(full);
        let minus_i_over_hbar = Complex64::new(0.0, -1.0 / self.hbar);
        Ok(cumulative
            .into_iter()
            .map(|s| minus_i_over_hbar * s + c)
            .collect())
    }

    /// The integral form applied to the grid function's band-limited
    /// interpolant, cell by cell.
    pub fn apply_inverse_x(&self, f: &GridFunction, quad: &QuadratureSpec) -> Result<GridFunction> {
        self.require_invertible()?;
        let coeffs = self.coefficients(f)?;
        let interpolant = |p: f64| self.interpolate(&coeffs, p);
        let values = self.inverse_x_integral(interpolant, &f.points(), quad)?;
        GridFunction::new(self.b, values)
    }

    /// `Σ c_n ψ_n(p)` by Horner's rule in `e^{-iπp/b}`.
    fn interpolate(&self, coeffs: &Coefficients, p: f64) -> Complex64 {
        let z = Complex64::from_polar(1.0, -PI * p / self.b);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in coeffs.values.iter().rev() {
            acc = acc * z + c;
        }
        let lead = (self.ext.delta() + coeffs.first as f64) * PI * p / self.b;
        acc * Complex64::from_polar(1.0 / (2.0 * self.b).sqrt(), -lead)
    }

    /// `∫_{-b}^{b} φ` from the eigenstate expansion.
    pub fn integral(&self, f: &GridFunction) -> Result<Complex64> {
        let coeffs = self.coefficients(f)?;
        Ok(coeffs
            .indices()
            .zip(&coeffs.values)
            .map(|(m, c)| c * self.eigenstate_integral(m))
            .sum())
    }

    /// `c_δ[φ] = ((i + cot πδ)/(2ħ)) ∫_{-b}^{b} φ`.
    pub fn c_functional(&self, f: &GridFunction) -> Result<Complex64> {
        self.require_invertible()?;
        Ok(self.c_from_integral(self.integral(f)?))
    }

    fn c_from_integral(&self, full: Complex64) -> Complex64 {
        Complex64::new(self.ext.a(), 1.0) * full / (2.0 * self.hbar)
    }

    /// `∫_{-b}^{b} ψ_n = 2ħ sin(λ_n b/ħ)/(λ_n √(2b))`, with
    /// `sin(π(δ + n)) = (-1)ⁿ sin(πδ)`.
    fn eigenstate_integral(&self, n: i64) -> f64 {
        let lambda = self.eigenvalue(n);
        if lambda == 0.0 {
            return (2.0 * self.b).sqrt();
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        2.0 * self.hbar * sign * (PI * self.ext.delta()).sin() / (lambda * (2.0 * self.b).sqrt())
    }

    /// `|‖φ‖² - Σ_{|n| ≤ n_trunc} |⟨ψ_n|φ⟩|²|`.
    pub fn completeness_defect(&self, f: &GridFunction, n_trunc: usize) -> Result<f64> {
        let coeffs = self.coefficients(f)?;
        let k = n_trunc as i64;
        if coeffs.first > -k || coeffs.first + coeffs.values.len() as i64 - 1 < k {
            return Err(Error::InvalidParameter(format!(
                "a {}-interval grid resolves |n| < {}, truncation asks for {n_trunc}",
                f.intervals(),
                f.intervals() / 2
            )));
        }
        let kept: f64 = coeffs
            .indices()
            .zip(&coeffs.values)
            .filter(|(m, _)| m.abs() <= k)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        Ok((f.norm_sq() - kept).abs())
    }

    /// Largest distance from `-λ_{n,δ}` to the nearest eigenvalue of
    /// `X_{1-δ}`, over `|n| ≤ count`, relative to `l₀`.
    pub fn parity_mismatch(&self, count: i64) -> f64 {
        let partner = self.parity_partner();
        let d = partner.ext.delta();
        (-count..=count)
            .map(|n| {
                let target = -self.eigenvalue(n);
                let m = (target / (2.0 * self.l0) - d).round() as i64;
                (partner.eigenvalue(m) - target).abs() / self.l0
            })
            .fold(0.0, f64::max)
    }
}

/// `e^{2πik/N}` for `k = 0..N`.
fn roots_of_unity(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k as f64) / n as f64))
        .collect()
}

/// Worst orthonormality defect over `|m|, |n| ≤ count`, with each overlap
/// integrated by quadrature.
pub fn orthonormality_defect(
    op: &PositionExtension,
    count: i64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for m in -count..=count {
        let psi_m = op.eigenstate(m);
        for n in m..=count {
            let psi_n = op.eigenstate(n);
            let by_quad =
                integrate_complex(|p| psi_m.eval(p).conj() * psi_n.eval(p), -op.b, op.b, quad)?
                    .value;
            let want = if m == n { 1.0 } else { 0.0 };
            worst = worst.max((by_quad - want).norm());
        }
    }
    Ok(worst)
}
