//! Independent quadrature oracles shared by the integration tests. Nothing here calls the
//! crate's own integration routines.

#![allow(dead_code)]

use barron_core::catalog::GaussianComponent;
use barron_core::TargetFunction;

/// Composite Simpson rule with `n` (even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n };
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// ∫_ℝ g(x) dx through x = c·tan θ, which turns algebraic tails into smooth endpoints.
pub fn line_integral<F: Fn(f64) -> f64>(g: F, c: f64, n: usize) -> f64 {
    let h = std::f64::consts::FRAC_PI_2;
    simpson(
        |t: f64| {
            let ct = t.cos();
            if ct.abs() < 1e-300 {
                0.0
            } else {
                g(c * t.tan()) * c / (ct * ct)
            }
        },
        -h,
        h,
        n,
    )
}

/// ∫_{ℝ²} g through the tan map on both axes.
pub fn plane_integral<F: Fn(f64, f64) -> f64>(g: F, c: f64, n: usize) -> f64 {
    line_integral(|x| line_integral(|y| g(x, y), c, n), c, n)
}

/// Every catalog kind in d = 1 and d = 2 with a few nontrivial parameters.
pub fn catalog() -> Vec<TargetFunction> {
    vec![
        TargetFunction::standard_gaussian(1),
        TargetFunction::gaussian(1, 0.7, vec![0.4], 1.3).unwrap(),
        TargetFunction::mixture(
            1,
            vec![
                GaussianComponent { coef: 1.0, center: vec![-0.5], scale: 0.8 },
                GaussianComponent { coef: -0.6, center: vec![0.7], scale: 0.5 },
            ],
            1.0,
        )
        .unwrap(),
        TargetFunction::cauchy(1, 1.2, 0.9).unwrap(),
        TargetFunction::spectrum(1, 0.8, 1.1).unwrap(),
        TargetFunction::standard_gaussian(2),
        TargetFunction::gaussian(2, 0.9, vec![0.3, -0.2], 1.0).unwrap(),
        TargetFunction::mixture(
            2,
            vec![
                GaussianComponent { coef: 1.0, center: vec![0.0, 0.5], scale: 1.0 },
                GaussianComponent { coef: 0.5, center: vec![0.6, -0.4], scale: 0.6 },
            ],
            1.0,
        )
        .unwrap(),
        TargetFunction::cauchy(2, 1.0, 1.0).unwrap(),
        TargetFunction::spectrum(2, 1.0, 1.0).unwrap(),
    ]
}

/// ‖f‖_{L²(ℝ^d)} by brute-force quadrature of f itself.
pub fn spatial_l2(f: &TargetFunction) -> f64 {
    match f.dim() {
        1 => line_integral(|x| f.eval_f(&[x]).unwrap().powi(2), 1.0, 40_000).sqrt(),
        2 => plane_integral(|x, y| f.eval_f(&[x, y]).unwrap().powi(2), 1.0, 1_200).sqrt(),
        d => panic!("no oracle for d = {d}"),
    }
}
