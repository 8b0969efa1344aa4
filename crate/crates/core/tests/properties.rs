use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;

use aomega::functions::{ComplexFn, HolomorphicFunction};
use aomega::kernels::{decay_profile, KernelEvaluator, KernelMode, KernelOptions};
use aomega::moments::{
    disc_moments, disc_moments_with, laplace_symbol, plane_moments, plane_moments_with,
    MomentMethod,
};
use aomega::norms::{area_norm, hardy_norm, QuadratureSpec};
use aomega::operators::OperatorContext;
use aomega::weights::{
    make_linear_weight, make_named_weight, make_power_weight, squash, Geometry, NamedTag,
    SquashKind,
};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.8, 0.0f64..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn upper_point() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, 0.5f64..3.0).prop_map(|(x, y)| Complex64::new(x, y))
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn disc_moments_positive_and_consistent(alpha in 0.2f64..3.0, squashed in any::<bool>()) {
        let mut w = make_power_weight(Geometry::Disc, alpha).unwrap();
        if squashed {
            w = squash(&w, SquashKind::SquareArg).unwrap();
        }
        // the quadrature route cross-checks the two moment formulas internally
        let quad = disc_moments_with(&w, 64, MomentMethod::Quadrature).unwrap();
        let closed = disc_moments(&w, 64).unwrap();
        for (q, c) in quad.values.iter().zip(&closed.values) {
            prop_assert!(*q > 0.0);
            prop_assert!((q - c).abs() <= 1e-9 * c, "{q} vs {c}");
        }
    }

    #[test]
    fn plane_exp_decay_quadrature_matches_closed_form(
        gamma in 0.5f64..2.0,
        rho in 1.0f64..2.5,
        mu in 0.5f64..2.0,
    ) {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpDecay { gamma, rho, mu }).unwrap();
        let quad = plane_moments_with(&w, 20, MomentMethod::Quadrature).unwrap();
        let closed = plane_moments(&w, 20).unwrap();
        for (q, c) in quad.values.iter().zip(&closed.values) {
            prop_assert!(*q > 0.0);
            prop_assert!((q - c).abs() <= 1e-9 * c, "{q} vs {c}");
        }
    }

    #[test]
    fn laplace_symbol_positive_and_nonincreasing(
        alpha in 0.0f64..2.0,
        slope in 0.2f64..3.0,
        cap in 0.5f64..4.0,
        linear in any::<bool>(),
    ) {
        let w = if linear {
            make_linear_weight(slope, Some(cap)).unwrap()
        } else {
            make_power_weight(Geometry::HalfPlane, alpha).unwrap()
        };
        let sym = laplace_symbol(&w).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..24 {
            let v = sym.eval(0.05 * 1.4f64.powi(k)).unwrap();
            prop_assert!(v > 0.0);
            prop_assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn eval_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), d1 in 0usize..12, d2 in 0usize..12, z in disc_point()) {
        let f = HolomorphicFunction::random_polynomial(s1, d1);
        let g = HolomorphicFunction::random_polynomial(s2, d2);
        let sum = f.add(&g).unwrap().eval(z).unwrap();
        let parts = f.eval(z).unwrap() + g.eval(z).unwrap();
        prop_assert!((sum - parts).norm() <= 1e-12 * parts.norm().max(1.0));
    }

    #[test]
    fn rational_sum_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), z in upper_point()) {
        let f = HolomorphicFunction::random_rational(s1);
        let g = HolomorphicFunction::random_rational(s2);
        let sum = f.add(&g).unwrap().eval(z).unwrap();
        let parts = f.eval(z).unwrap() + g.eval(z).unwrap();
        prop_assert!((sum - parts).norm() <= 1e-12 * parts.norm().max(1.0));
    }

    #[test]
    fn rational_majorant_bounds_vertical_lines(seed in any::<u64>(), x in -20.0f64..20.0, y in 0.0f64..6.0) {
        let f = HolomorphicFunction::random_rational(seed);
        let bound = f.vertical_majorant(y).unwrap();
        let v = f.eval(Complex64::new(x, y)).unwrap().norm();
        prop_assert!(v <= bound * (1.0 + 1e-12), "{v} > {bound}");
    }

    #[test]
    fn round_trip_is_identity(seed in any::<u64>(), degree in 0usize..16, alpha in 0.5f64..3.0, plane in any::<bool>()) {
        let w = if plane {
            make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap()
        } else {
            make_power_weight(Geometry::Disc, alpha).unwrap()
        };
        let ctx = OperatorContext::new(&w, 1e-12).unwrap();
        let f = HolomorphicFunction::random_polynomial(seed, degree);
        let image = ctx.apply_l(&f).unwrap();
        let back = ctx.invert_l(image.taylor().unwrap()).unwrap();
        for (a, b) in f.coefficients().unwrap().iter().zip(back.coefficients().unwrap()) {
            prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn disc_rotation_covariance(seed in any::<u64>(), degree in 1usize..10, theta in 0.0f64..2.0 * PI, z in disc_point()) {
        let w = make_power_weight(Geometry::Disc, 1.5).unwrap();
        let ctx = OperatorContext::new(&w, 1e-12).unwrap();
        let f = HolomorphicFunction::random_polynomial(seed, degree);
        let rotated = f.rotate(theta).unwrap();
        let lhs = ctx.apply_l_quadrature(&rotated, z).unwrap();
        let rhs = ctx.apply_l(&f).unwrap().eval(z * Complex64::from_polar(1.0, theta)).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn half_plane_translation_covariance(seed in any::<u64>(), a in -2.0f64..2.0, z in upper_point(), power in any::<bool>()) {
        let w = if power {
            make_power_weight(Geometry::HalfPlane, 0.0).unwrap()
        } else {
            make_linear_weight(0.7, Some(1.5)).unwrap()
        };
        let ctx = OperatorContext::new(&w, 1e-10).unwrap();
        let f = HolomorphicFunction::random_rational(seed);
        let shifted = f.translate(a).unwrap();
        let lhs = ctx.apply_l(&shifted).unwrap().eval(z).unwrap();
        let rhs = ctx.apply_l(&f).unwrap().eval(z + a).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-8 * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn apply_routes_agree_on_degree_sixteen(seed in any::<u64>(), alpha in 0.5f64..3.0) {
        // apply_l fails with a consistency error when the two routes disagree by more than 1e-8
        let ctx = OperatorContext::new(&make_power_weight(Geometry::Disc, alpha).unwrap(), 1e-12).unwrap();
        prop_assert!(ctx.apply_l(&HolomorphicFunction::random_polynomial(seed, 16)).is_ok());
    }

    #[test]
    fn disc_kernel_series_matches_closed_form(alpha in 0.3f64..3.0, z in disc_point()) {
        let w = make_power_weight(Geometry::Disc, alpha).unwrap();
        let series = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        let closed = KernelEvaluator::new(&w, KernelMode::ClosedForm, KernelOptions::default()).unwrap();
        let (a, b) = (series.eval(z).unwrap(), closed.eval(z).unwrap());
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn plane_kernel_series_matches_closed_form(r in 0.0f64..8.0, t in 0.0f64..2.0 * PI) {
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        let series = KernelEvaluator::new(&w, KernelMode::Series, KernelOptions::default()).unwrap();
        let z = Complex64::from_polar(r, t);
        let (a, b) = (series.eval(z).unwrap(), z.exp());
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0), "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn half_plane_kernel_quadrature_matches_closed_form(alpha in 0.0f64..2.0, z in upper_point()) {
        let w = make_power_weight(Geometry::HalfPlane, alpha).unwrap();
        let quad = KernelEvaluator::new(&w, KernelMode::Quadrature, KernelOptions { tol: 1e-10, ..KernelOptions::default() }).unwrap();
        let closed = KernelEvaluator::new(&w, KernelMode::ClosedForm, KernelOptions::default()).unwrap();
        let (a, b) = (quad.eval(z).unwrap(), closed.eval(z).unwrap());
        prop_assert!((a - b).norm() <= 1e-8 * b.norm().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn norms_are_homogeneous(seed in any::<u64>(), degree in 0usize..8, re in -3.0f64..3.0, im in -3.0f64..3.0, p in 1.0f64..4.0) {
        let c = Complex64::new(re, im);
        let f = HolomorphicFunction::random_polynomial(seed, degree);
        let cf = HolomorphicFunction::polynomial(f.coefficients().unwrap().iter().map(|a| a * c).collect());
        let w = make_power_weight(Geometry::Disc, 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let a = area_norm(&w, p, &f, &spec).unwrap().value;
        let ac = area_norm(&w, p, &cf, &spec).unwrap().value;
        prop_assert!((ac - c.norm() * a).abs() <= 1e-10 * (c.norm() * a).max(1e-300));
        let h = hardy_norm(Geometry::Disc, p, &f, &spec).unwrap().value;
        let hc = hardy_norm(Geometry::Disc, p, &cf, &spec).unwrap().value;
        prop_assert!((hc - c.norm() * h).abs() <= 1e-10 * (c.norm() * h).max(1e-300));
    }

    #[test]
    fn norms_satisfy_triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), p in 1.0f64..4.0) {
        let f = HolomorphicFunction::random_polynomial(s1, 6);
        let g = HolomorphicFunction::random_polynomial(s2, 6);
        let fg = f.add(&g).unwrap();
        let w = make_power_weight(Geometry::Disc, 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let n = |h: &HolomorphicFunction| area_norm(&w, p, h, &spec).unwrap().value;
        prop_assert!(n(&fg) <= (n(&f) + n(&g)) * (1.0 + 1e-10));
        let hn = |h: &HolomorphicFunction| hardy_norm(Geometry::Disc, p, h, &spec).unwrap().value;
        prop_assert!(hn(&fg) <= (hn(&f) + hn(&g)) * (1.0 + 1e-10));
    }

    #[test]
    fn half_plane_triangle_inequality(s1 in any::<u64>(), s2 in any::<u64>(), p in 1.0f64..3.0) {
        let f = HolomorphicFunction::random_rational(s1);
        let g = HolomorphicFunction::random_rational(s2);
        let fg = f.add(&g).unwrap();
        let w = make_linear_weight(1.0, Some(1.0)).unwrap();
        let spec = QuadratureSpec::default();
        let n = |h: &HolomorphicFunction| area_norm(&w, p, h, &spec).unwrap().value;
        prop_assert!(n(&fg) <= (n(&f) + n(&g)) * (1.0 + 1e-9));
    }

    #[test]
    fn parseval_and_monotone_means(seed in any::<u64>(), degree in 0usize..12) {
        let f = HolomorphicFunction::random_polynomial(seed, degree);
        let h = hardy_norm(Geometry::Disc, 2.0, &f, &QuadratureSpec::default()).unwrap();
        let sum: f64 = f.coefficients().unwrap().iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((h.value * h.value - sum).abs() <= 1e-10 * sum);
        prop_assert_eq!(h.monotone, Some(true));
    }

    #[test]
    fn plane_area_norm_grows_with_p(seed in any::<u64>(), degree in 0usize..6, p1 in 1.0f64..3.0, dp in 0.1f64..2.0) {
        // e^{-t} has total variation 1, so the measure is a probability measure
        let w = make_named_weight(Geometry::Plane, NamedTag::ExpSimple).unwrap();
        let f = HolomorphicFunction::random_polynomial(seed, degree);
        let spec = QuadratureSpec::default();
        let a = area_norm(&w, p1, &f, &spec).unwrap().value;
        let b = area_norm(&w, p1 + dp, &f, &spec).unwrap().value;
        prop_assert!(a <= b * (1.0 + 1e-9), "{a} > {b}");
    }
}

#[test]
fn half_plane_kernel_decay_probes() {
    let moduli: Vec<f64> = (0..16).map(|k| 10f64.powf(k as f64 * 3.0 / 15.0)).collect();
    for alpha in [0.0, 1.0, 1.5] {
        let w = make_power_weight(Geometry::HalfPlane, alpha).unwrap();
        let k = KernelEvaluator::auto(&w, KernelOptions::default()).unwrap();
        let first = decay_profile(&k, 0.5, &moduli, 1.0).unwrap();
        assert!(first.iter().all(|v| v.is_finite()));
        assert!(first.last().unwrap() <= &first[0]);
        // one non-integer β in (α - 1, α)
        let beta = alpha - 0.5;
        let second = decay_profile(&k, 0.5, &moduli, 2.0 + beta).unwrap();
        let max = second.iter().copied().fold(0.0, f64::max);
        assert!(max.is_finite() && second.last().unwrap() <= &max);
    }
}

#[test]
fn pointwise_image_accepts_closures() {
    let w = make_power_weight(Geometry::HalfPlane, 0.5).unwrap();
    let ctx = OperatorContext::new(&w, 1e-10).unwrap();
    let f: Arc<dyn ComplexFn> =
        Arc::new(|z: Complex64| Ok((z + Complex64::new(0.0, 1.0)).powi(-2)));
    let image = ctx.apply_l_half_plane(f).unwrap();
    let rational = HolomorphicFunction::rational(vec![aomega::functions::RationalTerm::new(
        Complex64::new(1.0, 0.0),
        1.0,
        2,
    )
    .unwrap()]);
    let z = Complex64::new(0.4, 0.9);
    let a = image.eval(z).unwrap();
    let b = ctx.apply_l(&rational).unwrap().eval(z).unwrap();
    assert!((a - b).norm() < 1e-10 * b.norm().max(1.0));
}
