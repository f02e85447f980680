use std::f64::consts::PI;

use mlcoulomb::extensions::{
    inner_product, orthonormality_defect, parity_map, GridFunction, PositionExtension,
};
use mlcoulomb::numerics::integrate_complex;
use mlcoulomb::{
    AlgebraContext, DeformationFamily, ExtensionParam, PhysicalParams, QuadratureSpec,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn kempf(beta: f64) -> AlgebraContext {
    AlgebraContext::new(
        PhysicalParams::natural(),
        DeformationFamily::kempf(beta).unwrap(),
    )
    .unwrap()
}

fn op(d: f64) -> PositionExtension {
    PositionExtension::new(&kempf(1.0), ExtensionParam::new(d).unwrap()).unwrap()
}

fn bump(b: f64) -> impl Fn(f64) -> Complex64 {
    move |p| {
        let x = p / b;
        if x.abs() >= 1.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new((1.0 - 1.0 / (1.0 - x * x)).exp(), 0.0)
        }
    }
}

fn combination(
    op: &PositionExtension,
    terms: &[(i64, Complex64)],
    intervals: usize,
) -> GridFunction {
    let mut acc = GridFunction::from_fn(op.b(), intervals, |_| Complex64::new(0.0, 0.0)).unwrap();
    for (n, c) in terms {
        acc = acc
            .add(&op.eigenstate(*n).sample(intervals).unwrap().scale(*c))
            .unwrap();
    }
    acc
}

#[test]
fn eigenbasis_is_orthonormal() {
    for d in [0.5, 0.13] {
        let o = op(d);
        for m in -10..=10 {
            for n in -10..=10 {
                let want = if m == n { 1.0 } else { 0.0 };
                assert_eq!(o.eigenstate(m).overlap(&o.eigenstate(n)), want);
                let sinc = inner_product(o.eigenvalue(m), o.eigenvalue(n), o.b(), 1.0);
                assert!((sinc - want).abs() <= 1e-15, "{m} {n}: {sinc}");
            }
        }
        let defect = orthonormality_defect(&o, 10, &QuadratureSpec::default()).unwrap();
        assert!(defect <= 1e-12, "{defect:e}");
    }
}

#[test]
fn sinc_matches_quadrature_off_the_lattice() {
    let o = op(0.5);
    let b = o.b();
    for (l1, l2) in [(0.3, -0.45), (2.0, 0.1), (o.minimal_length(), 0.0)] {
        let direct = integrate_complex(
            |p| Complex64::from_polar(1.0, (l1 - l2) * p) / (2.0 * b),
            -b,
            b,
            &QuadratureSpec::default(),
        )
        .unwrap()
        .value;
        assert!((direct.re - inner_product(l1, l2, b, 1.0)).abs() < 1e-13);
        assert!(direct.im.abs() < 1e-13);
    }
}

#[test]
fn inverse_of_eigenstates() {
    let quad = QuadratureSpec::default();
    for d in [0.5, 0.2, 0.85] {
        let o = op(d);
        for n in [-3, -1, 0, 2, 7] {
            let psi = o.eigenstate(n).sample(64).unwrap();
            let inv = o.apply_inverse_x(&psi, &quad).unwrap();
            let want = psi.scale(Complex64::new(1.0 / o.eigenvalue(n), 0.0));
            let err = inv.max_distance(&want).unwrap();
            assert!(err <= 1e-10, "δ={d} n={n}: {err:e}");
        }
    }
}

#[test]
fn inverse_is_two_sided() {
    let quad = QuadratureSpec::default();
    let terms = [
        (-2, Complex64::new(0.5, 0.1)),
        (-1, Complex64::new(-1.0, 0.3)),
        (0, Complex64::new(0.2, -0.7)),
        (3, Complex64::new(0.0, 1.1)),
        (6, Complex64::new(0.4, 0.4)),
    ];
    for d in [0.5, 0.3] {
        let o = op(d);
        let f = combination(&o, &terms, 64);
        let left = o.apply_x(&o.apply_inverse_x(&f, &quad).unwrap()).unwrap();
        let right = o.apply_inverse_x(&o.apply_x(&f).unwrap(), &quad).unwrap();
        assert!(left.max_distance(&f).unwrap() <= 1e-8);
        assert!(right.max_distance(&f).unwrap() <= 1e-8);
    }
}

#[test]
fn integral_and_spectral_forms_agree_to_truncation() {
    let quad = QuadratureSpec::default();
    for d in [0.5, 0.35] {
        let o = op(d);
        let ext = o.ext();
        let b = o.b();
        let periodic = move |p: f64| Complex64::new((PI * p / b).cos().exp(), 0.0);
        let twist = move |p: f64| Complex64::from_polar(1.0, -ext.delta() * PI * p / b);
        for u in [
            Box::new(bump(b)) as Box<dyn Fn(f64) -> Complex64>,
            Box::new(periodic),
        ] {
            let f = GridFunction::twisted(b, 1024, ext, &u).unwrap();
            let integral = o
                .inverse_x_integral(|p| u(p) * twist(p), &f.points(), &quad)
                .unwrap();
            let integral = GridFunction::new(b, integral).unwrap();
            let mut previous = f64::INFINITY;
            for n_trunc in [16, 64, 256] {
                let spectral = o.apply_inverse_x_spectral(&f, n_trunc).unwrap();
                let gap = integral.max_distance(&spectral.value).unwrap();
                assert!(
                    gap <= spectral.tail + 1e-10,
                    "δ={d} N={n_trunc}: {gap:e} vs {:e}",
                    spectral.tail
                );
                assert!(gap <= previous.max(1e-12));
                previous = gap;
            }
        }
    }
}

#[test]
fn grid_inverse_matches_integral_form_on_smooth_functions() {
    let quad = QuadratureSpec::default();
    let o = op(0.4);
    let b = o.b();
    let u = |p: f64| Complex64::new((PI * p / b).cos().exp(), 0.5 * (2.0 * PI * p / b).sin());
    let f = GridFunction::twisted(b, 128, o.ext(), u).unwrap();
    let on_grid = o.apply_inverse_x(&f, &quad).unwrap();
    let twist = |p: f64| Complex64::from_polar(1.0, -0.4 * PI * p / b);
    let direct = o
        .inverse_x_integral(|p| u(p) * twist(p), &f.points(), &quad)
        .unwrap();
    let direct = GridFunction::new(b, direct).unwrap();
    assert!(on_grid.max_distance(&direct).unwrap() < 1e-9);
}

#[test]
fn completeness() {
    let o = op(0.5);
    let psi = o.eigenstate(0).sample(1024).unwrap();
    assert!(o.completeness_defect(&psi, 0).unwrap() < 1e-13);
    let f = GridFunction::twisted(o.b(), 1024, o.ext(), bump(o.b())).unwrap();
    let d200 = o.completeness_defect(&f, 200).unwrap();
    assert!(d200 <= 1e-4, "{d200:e}");
    // A kink in the derivative at ±b leaves an algebraic tail, so the
    // defect keeps falling well past the rounding floor.
    let b = o.b();
    let kinked = GridFunction::twisted(b, 4096, o.ext(), |p| {
        Complex64::new(1.0 - (p / b).powi(2), 0.0)
    })
    .unwrap();
    let mut last = f64::INFINITY;
    for n in [1, 10, 100, 400, 1000] {
        let d = o.completeness_defect(&kinked, n).unwrap();
        assert!(d < last, "N={n}: {d:e}");
        last = d;
    }
    assert!(o.completeness_defect(&kinked, 200).unwrap() <= 1e-4);
    assert!(o.completeness_defect(&f, 600).is_err());
}

#[test]
fn c_functional_at_half_is_imaginary_times_integral() {
    let o = op(0.5);
    let f = GridFunction::twisted(o.b(), 256, o.ext(), bump(o.b())).unwrap();
    let c = o.c_functional(&f).unwrap();
    let u = bump(o.b());
    let b = o.b();
    let full = integrate_complex(
        |p| u(p) * Complex64::from_polar(1.0, -0.5 * PI * p / b),
        -b,
        b,
        &QuadratureSpec::default(),
    )
    .unwrap()
    .value;
    let want = Complex64::new(0.0, 0.5) * full;
    assert!((c - want).norm() < 1e-12);
}

#[test]
fn parity_relations() {
    for (d, mapped) in [(0.5, 0.5), (0.3, 0.7), (0.0, 0.0)] {
        let e = ExtensionParam::new(d).unwrap();
        assert!((parity_map(e).delta() - mapped).abs() < 1e-15);
        assert!(op(d).parity_mismatch(50) < 1e-12);
    }
    // I X_{1-δ} + X_δ I = 0 on the domain of X_{1-δ}.
    let o = op(0.3);
    let partner = o.parity_partner();
    let f = combination(
        &partner,
        &[
            (0, Complex64::new(1.0, 0.0)),
            (-2, Complex64::new(0.0, 0.5)),
        ],
        64,
    );
    let lhs = partner.apply_x(&f).unwrap().parity();
    let rhs = o.apply_x(&f.parity()).unwrap();
    assert!(lhs.add(&rhs).unwrap().max_abs() < 1e-12);
}

#[test]
fn undeformed_has_no_eigenbasis() {
    let c = AlgebraContext::new(PhysicalParams::natural(), DeformationFamily::Undeformed).unwrap();
    assert!(PositionExtension::new(&c, ExtensionParam::new(0.5).unwrap()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inverse_is_symmetric(
        d in 0.05f64..0.95,
        a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
        c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 6),
    ) {
        let o = op(d);
        let quad = QuadratureSpec::default();
        let mk = |v: &[(f64, f64)]| {
            let terms: Vec<_> = v
                .iter()
                .enumerate()
                .map(|(i, (re, im))| (i as i64 - 3, Complex64::new(*re, *im)))
                .collect();
            combination(&o, &terms, 64)
        };
        let (psi, phi) = (mk(&a), mk(&c));
        let lhs = psi.inner(&o.apply_inverse_x(&phi, &quad).unwrap()).unwrap();
        let rhs = o.apply_inverse_x(&psi, &quad).unwrap().inner(&phi).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10, "{} vs {}", lhs, rhs);
    }
}
