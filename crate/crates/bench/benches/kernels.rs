use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mlcoulomb::eigenfunctions::{chebyshev_samples, BoundState};
use mlcoulomb::extensions::{GridFunction, PositionExtension};
use mlcoulomb::numerics::{integrate, integrate_with_edges};
use mlcoulomb::spectrum::{quantization_integral, solve_level};
use mlcoulomb::{
    AlgebraContext, DeformationFamily, ExtensionParam, PhysicalParams, QuadratureSpec,
};
use num_complex::Complex64;

fn ctx(family: DeformationFamily) -> AlgebraContext {
    AlgebraContext::new(PhysicalParams::natural(), family).unwrap()
}

fn quadrature(c: &mut Criterion) {
    let spec = QuadratureSpec::default();
    c.bench_function("integrate/endpoint_singularity", |b| {
        // 1 - x² = (x + 1)(1 - x), written with exact edge distances.
        b.iter(|| {
            integrate_with_edges(
                |_, dl, dh| (dl * dh).powf(-0.75),
                -1.0,
                1.0,
                black_box(&spec),
            )
            .unwrap()
        })
    });
    c.bench_function("integrate/half_line", |b| {
        b.iter(|| {
            integrate(
                |x| 1.0 / (1.0 + x * x),
                0.0,
                f64::INFINITY,
                black_box(&spec),
            )
            .unwrap()
        })
    });
}

fn spectrum(c: &mut Criterion) {
    let ext = ExtensionParam::new(0.5).unwrap();
    let mut group = c.benchmark_group("solve_level");
    for (name, family) in [
        ("kempf", DeformationFamily::kempf(0.01).unwrap()),
        (
            "polyminus_0.75",
            DeformationFamily::poly_minus(0.01, 0.75).unwrap(),
        ),
        ("expsqrt", DeformationFamily::exp_sqrt(0.01).unwrap()),
    ] {
        let c = ctx(family);
        group.bench_function(name, |b| {
            b.iter(|| solve_level(&c, black_box(2), ext).unwrap())
        });
    }
    group.finish();
    let k = ctx(DeformationFamily::poly_plus(0.01, 1.5).unwrap());
    c.bench_function("quantization_integral/polyplus_1.5", |b| {
        b.iter(|| quantization_integral(&k, black_box(0.7)).unwrap())
    });
}

fn eigenfunctions(c: &mut Criterion) {
    let k = ctx(DeformationFamily::kempf(0.1).unwrap());
    let ext = ExtensionParam::new(0.5).unwrap();
    let level = solve_level(&k, 1, ext).unwrap();
    c.bench_function("bound_state/new", |b| {
        b.iter(|| BoundState::new(&k, black_box(level)).unwrap())
    });
    let state = BoundState::new(&k, level).unwrap();
    let samples = chebyshev_samples(k.b(), 21);
    c.bench_function("bound_state/residual_21", |b| {
        b.iter(|| {
            state
                .integral_equation_residual(ext, black_box(&samples))
                .unwrap()
        })
    });
}

fn extensions(c: &mut Criterion) {
    let k = ctx(DeformationFamily::kempf(1.0).unwrap());
    let op = PositionExtension::new(&k, ExtensionParam::new(0.3).unwrap()).unwrap();
    let quad = QuadratureSpec::default();
    let f = (-3..=3).fold(
        GridFunction::from_fn(op.b(), 64, |_| Complex64::new(0.0, 0.0)).unwrap(),
        |acc, n| acc.add(&op.eigenstate(n).sample(64).unwrap()).unwrap(),
    );
    c.bench_function("apply_inverse_x/integral_64", |b| {
        b.iter(|| op.apply_inverse_x(black_box(&f), &quad).unwrap())
    });
    let fine = GridFunction::twisted(op.b(), 1024, op.ext(), |p| {
        Complex64::new((p / op.b()).cos().exp(), 0.0)
    })
    .unwrap();
    c.bench_function("apply_inverse_x/spectral_1024_200", |b| {
        b.iter(|| op.apply_inverse_x_spectral(black_box(&fine), 200).unwrap())
    });
}

criterion_group!(benches, quadrature, spectrum, eigenfunctions, extensions);
criterion_main!(benches);
