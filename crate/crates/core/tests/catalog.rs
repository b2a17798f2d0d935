mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use barron_core::catalog::{barron_norm, fourier_lebesgue_norm, FreqSettings};
use barron_core::{Error, TargetFunction};
use num_complex::Complex64;
use proptest::prelude::*;

use common::{catalog, line_integral, spatial_l2};

#[test]
fn plancherel_for_every_catalog_entry() {
    let st = FreqSettings::default();
    for f in catalog() {
        let fl = fourier_lebesgue_norm(&f, 2.0, 0.0, &st).unwrap();
        let l2 = spatial_l2(&f);
        assert_relative_eq!(fl, l2, max_relative = 1e-6);
    }
}

#[test]
fn inverse_transform_of_closed_form_recovers_the_function() {
    // f(x) = (2π)^{-1/2} ∫ f̂(ξ) e^{ixξ} dξ, with f̂ taken from the closed form.
    for f in catalog().into_iter().filter(|f| f.dim() == 1) {
        for x in [0.0, 0.3, -1.1, 2.5] {
            let re = common::simpson(
                |k| {
                    let v = f.eval_f_hat(&[k]).unwrap();
                    v.re * (k * x).cos() - v.im * (k * x).sin()
                },
                -200.0,
                200.0,
                400_000,
            );
            let direct = re / (2.0 * PI).sqrt();
            let closed = f.eval_f(&[x]).unwrap();
            assert!((direct - closed).abs() < 1e-8, "{f} at {x}: {direct} vs {closed}");
        }
    }
}

#[test]
fn transform_at_zero_is_the_mean() {
    for f in catalog().into_iter().filter(|f| f.dim() == 1) {
        let mean = line_integral(|x| f.eval_f(&[x]).unwrap(), 1.0, 200_000) / (2.0 * PI).sqrt();
        let closed = f.eval_f_hat(&[0.0]).unwrap();
        assert!((Complex64::new(mean, 0.0) - closed).norm() < 1e-8, "{f}: {mean} vs {closed}");
    }
}

#[test]
fn gaussian_barron_and_fourier_lebesgue_values() {
    let g = TargetFunction::standard_gaussian(1);
    let st = FreqSettings::default();
    let brute = common::simpson(|k| (-0.5 * k * k).exp(), -40.0, 40.0, 20_000);
    assert_relative_eq!(barron_norm(&g, 0.0, &st).unwrap(), brute, max_relative = 1e-10);
    assert_relative_eq!(barron_norm(&g, 0.0, &st).unwrap(), (2.0 * PI).sqrt(), max_relative = 1e-10);
    assert_relative_eq!(fourier_lebesgue_norm(&g, 2.0, 0.0, &st).unwrap(), PI.powf(0.25), max_relative = 1e-10);
    // ∫ (1+|ξ|)^2 e^{-ξ²/2} dξ = √(2π)·2 + 4 by hand.
    let s2 = 2.0 * (2.0 * PI).sqrt() + 4.0;
    assert_relative_eq!(barron_norm(&g, 2.0, &st).unwrap(), s2, max_relative = 1e-10);
}

#[test]
fn negative_order_and_divergent_order_are_rejected() {
    let st = FreqSettings::default();
    let g = TargetFunction::standard_gaussian(1);
    assert!(matches!(barron_norm(&g, -1.0, &st), Err(Error::Parameter(_))));
    let sp = TargetFunction::spectrum(1, 1.0, 1.0).unwrap();
    assert!(barron_norm(&sp, 4.0, &st).is_ok());
    assert!(matches!(barron_norm(&sp, 5.0, &st), Err(Error::Diverging(_))));
}

#[test]
fn barron_norm_is_monotone_in_the_order() {
    let st = FreqSettings::default();
    for f in catalog() {
        let mut last = 0.0;
        for s in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let v = barron_norm(&f, s, &st).unwrap();
            assert!(v >= last, "{f}: order {s}");
            last = v;
        }
    }
}

#[test]
fn partials_match_finite_differences() {
    let h = 1e-4;
    for f in catalog() {
        let d = f.dim();
        let pts: Vec<Vec<f64>> = (0..25).map(|i| (0..d).map(|j| ((i * 7 + j * 3) % 11) as f64 * 0.37 - 1.8).collect()).collect();
        for x in &pts {
            for axis in 0..d {
                let mut alpha = vec![0u32; d];
                alpha[axis] = 1;
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[axis] += h;
                xm[axis] -= h;
                let fd = (f.eval_f(&xp).unwrap() - f.eval_f(&xm).unwrap()) / (2.0 * h);
                let exact = f.eval_partial(&alpha, x).unwrap();
                assert!((fd - exact).abs() < 1e-6, "{f} at {x:?} axis {axis}: {fd} vs {exact}");
                // second derivative from first derivatives
                let mut beta = alpha.clone();
                beta[axis] = 2;
                let fd2 = (f.eval_partial(&alpha, &xp).unwrap() - f.eval_partial(&alpha, &xm).unwrap()) / (2.0 * h);
                let exact2 = f.eval_partial(&beta, x).unwrap();
                assert!((fd2 - exact2).abs() < 1e-6, "{f} at {x:?}: {fd2} vs {exact2}");
            }
        }
    }
}

#[test]
fn unsupported_order_is_reported() {
    let sp = TargetFunction::spectrum(1, 1.0, 1.0).unwrap();
    assert!(matches!(sp.eval_partial(&[9], &[0.0]), Err(Error::UnsupportedOrder { .. })));
    let g = TargetFunction::standard_gaussian(2);
    assert!(matches!(g.eval_f(&[0.0]), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn identifiers_round_trip() {
    for f in catalog() {
        let back: TargetFunction = f.id().parse().unwrap();
        assert_eq!(back, f);
    }
    assert!("gauss:d=1:scale=-1".parse::<TargetFunction>().is_err());
    assert!("sinc:d=1".parse::<TargetFunction>().is_err());
}

proptest! {
    #[test]
    fn spectrum_modulus_is_even(i in 0usize..10, a in -5.0f64..5.0, b in -5.0f64..5.0) {
        let f = &catalog()[i];
        let xi: Vec<f64> = if f.dim() == 1 { vec![a] } else { vec![a, b] };
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        let l = f.eval_f_hat(&xi).unwrap().norm();
        let r = f.eval_f_hat(&neg).unwrap().norm();
        prop_assert!((l - r).abs() <= 1e-14 * l.max(1e-300));
    }

    #[test]
    fn norms_are_homogeneous(i in 0usize..10, c in -4.0f64..4.0) {
        prop_assume!(c.abs() > 1e-3);
        let st = FreqSettings::default();
        let f = &catalog()[i];
        let b1 = barron_norm(f, 1.0, &st).unwrap();
        let bc = barron_norm(&f.scaled(c), 1.0, &st).unwrap();
        prop_assert!((bc - c.abs() * b1).abs() <= 1e-12 * bc);
    }

    #[test]
    fn gaussian_identifiers_round_trip(d in 1usize..4, scale in 0.1f64..5.0, amp in -3.0f64..3.0) {
        let f = TargetFunction::gaussian(d, scale, vec![0.25; d], amp).unwrap();
        prop_assert_eq!(f.id().parse::<TargetFunction>().unwrap(), f);
    }
}
