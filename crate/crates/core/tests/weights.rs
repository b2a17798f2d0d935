mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use barron_core::weights::{
    ball_integral, check_ap, lower_bound_check, muckenhoupt_statistic, power_weight_centered_statistic,
    sobolev_weight_from_upsilon, ApVerdict, Ball, BallFamily, WeightSpec,
};
use proptest::prelude::*;

fn sphere(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!(),
    }
}

/// (1/|B_R|) (∫_{B_R} |x|^α)^{1/p} (∫_{B_R} |x|^{α(1-p')})^{1/p'} by hand.
fn centred_by_hand(alpha: f64, p: f64, d: usize, r: f64) -> f64 {
    let df = d as f64;
    let pc = p / (p - 1.0);
    let beta = alpha * (1.0 - pc);
    let s = sphere(d);
    let direct = s * r.powf(alpha + df) / (alpha + df);
    let dual = s * r.powf(beta + df) / (beta + df);
    direct.powf(1.0 / p) * dual.powf(1.0 / pc) / (s / df * r.powf(df))
}

#[test]
fn centred_power_statistic_matches_closed_form() {
    for d in 1..=3 {
        for (alpha, p) in [(0.5, 2.0), (-0.3, 2.0), (1.0, 3.0), (0.25, 1.5)] {
            let hand = centred_by_hand(alpha, p, d, 1.0);
            assert_relative_eq!(power_weight_centered_statistic(alpha, p, d), hand, max_relative = 1e-12);
            for r in [1e-2, 1.0, 37.0] {
                let ball = Ball { center: vec![0.0; d], radius: r };
                let s = muckenhoupt_statistic(&WeightSpec::power(alpha), p, &ball).unwrap();
                assert_relative_eq!(s, hand, max_relative = 1e-8);
            }
        }
    }
}

#[test]
fn off_centre_ball_integral_matches_polar_quadrature() {
    // ∫ over the disc of radius ρ about c of |x|^{1/2}, in polar coordinates about c.
    let (c, rho) = (0.8, 0.5);
    let w = WeightSpec::power(0.5);
    let oracle = common::simpson(
        |t| {
            common::simpson(
                |s| {
                    let (x, y) = (c + s * t.cos(), s * t.sin());
                    (x * x + y * y).sqrt().sqrt() * s
                },
                0.0,
                rho,
                400,
            )
        },
        0.0,
        2.0 * PI,
        400,
    );
    let got = ball_integral(&w, &Ball { center: vec![c, 0.0], radius: rho }).unwrap();
    assert_relative_eq!(got, oracle, max_relative = 1e-8);
}

#[test]
fn constant_weight_has_statistic_one() {
    for d in 1..=3 {
        let rep = check_ap(&WeightSpec::Constant, 2.0, &BallFamily::standard(d)).unwrap();
        assert_relative_eq!(rep.supremum, 1.0, max_relative = 1e-10);
        assert_eq!(rep.verdict, ApVerdict::Bounded);
    }
}

#[test]
fn powers_inside_and_outside_the_class() {
    // |x|^α ∈ A_p(ℝ^d) exactly for -d < α < d(p-1).
    let fam = BallFamily::standard(1);
    assert_eq!(check_ap(&WeightSpec::power(0.5), 2.0, &fam).unwrap().verdict, ApVerdict::Bounded);
    assert_eq!(check_ap(&WeightSpec::power(-0.5), 2.0, &fam).unwrap().verdict, ApVerdict::Bounded);
    assert_eq!(check_ap(&WeightSpec::power(1.5), 2.0, &fam).unwrap().verdict, ApVerdict::Diverging);
    assert_eq!(check_ap(&WeightSpec::power(-1.0), 2.0, &fam).unwrap().verdict, ApVerdict::Diverging);
    let fam2 = BallFamily::standard(2);
    assert_eq!(check_ap(&WeightSpec::power(1.5), 2.0, &fam2).unwrap().verdict, ApVerdict::Bounded);
    assert_eq!(check_ap(&WeightSpec::power(2.5), 2.0, &fam2).unwrap().verdict, ApVerdict::Diverging);
}

#[test]
fn statistic_needs_p_above_one() {
    let b = Ball { center: vec![0.0], radius: 1.0 };
    assert!(muckenhoupt_statistic(&WeightSpec::Constant, 1.0, &b).is_err());
}

#[test]
fn lower_bound_examples() {
    let samples: Vec<Vec<f64>> = (0..200).map(|k| vec![10f64.powf(-4.0 + k as f64 * 0.04)]).collect();
    let (gamma, p) = (0.25, 2.0);
    let pc = 2.0;
    assert!(lower_bound_check(&WeightSpec::Constant, gamma, p, &samples).unwrap().holds);
    assert!(lower_bound_check(&WeightSpec::power(gamma * pc), gamma, p, &samples).unwrap().holds);
    let rep = lower_bound_check(&WeightSpec::power(gamma * pc + 0.3), gamma, p, &samples).unwrap();
    assert!(!rep.holds);
    assert!(rep.worst_ratio < 1.0);
    assert!(lower_bound_check(&WeightSpec::Constant, gamma, p, &[vec![0.0]]).is_err());
}

#[test]
fn weight_strings_round_trip() {
    for s in ["const", "pow:0.5", "pow:-0.25"] {
        let w: WeightSpec = s.parse().unwrap();
        assert_eq!(w.to_string().parse::<WeightSpec>().unwrap(), w);
    }
    assert!("pow:x".parse::<WeightSpec>().is_err());
}

proptest! {
    #[test]
    fn statistic_is_at_least_one(alpha in -0.9f64..0.9, p in 1.2f64..4.0, c in 0.0f64..3.0, r in 0.01f64..10.0) {
        // Hölder gives |B| ≤ (∫υ)^{1/p} (∫υ^{1-p'})^{1/p'} on every ball.
        prop_assume!(alpha < p - 1.0 && alpha * (1.0 - p / (p - 1.0)) > -1.0);
        let b = Ball { center: vec![c], radius: r };
        let s = muckenhoupt_statistic(&WeightSpec::power(alpha), p, &b).unwrap();
        prop_assert!(s >= 1.0 - 1e-9, "statistic {}", s);
    }

    #[test]
    fn derived_weight_inverts(alpha in 0.0f64..1.5, p in 1.1f64..5.0, r in 1e-3f64..1e3) {
        // ω = υ^{-1/p'} so ω^{-p'} recovers υ.
        let ups = WeightSpec::power(alpha);
        let pc = p / (p - 1.0);
        let om = sobolev_weight_from_upsilon(&ups, p).unwrap();
        let back = om.clone().raised(-pc).radial_eval(r);
        prop_assert!((back - ups.radial_eval(r)).abs() <= 1e-10 * back.max(1.0));
        prop_assert!((om.exponent_at_zero() + alpha / pc).abs() < 1e-12);
    }
}
