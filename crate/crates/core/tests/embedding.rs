mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use barron_core::embedding::{
    embedding_constant_scan, gaussian_family, general_barron_tau0_interval, optimized_tau1, ratio_csv,
    spatial_power_norm, toft_young_violations, unbounded_holder_exponent, validate_params, verify_embedding,
    CaseKind, EmbeddingCase, VerifySettings, RATIO_CSV_HEADER,
};
use barron_core::norms::DomainSpec;
use barron_core::weights::WeightSpec;
use barron_core::{Error, TargetFunction};
use proptest::prelude::*;
use statrs::function::gamma::gamma;

fn unit_box(d: usize) -> DomainSpec {
    DomainSpec::Box(vec![(-1.0, 1.0); d])
}

fn names(case: &EmbeddingCase) -> Vec<String> {
    validate_params(case).into_iter().map(|v| v.name).collect()
}

/// ∫_ℝ |x|^a e^{-c x²} dx = Γ((a+1)/2) c^{-(a+1)/2}.
fn gauss_moment(a: f64, c: f64) -> f64 {
    gamma((a + 1.0) / 2.0) * c.powf(-(a + 1.0) / 2.0)
}

#[test]
fn case_names_round_trip() {
    for k in CaseKind::ALL {
        assert_eq!(k.name().parse::<CaseKind>().unwrap(), k);
    }
    assert!("thm".parse::<CaseKind>().is_err());
}

#[test]
fn barron_sobolev_ratio_matches_direct_quadrature() {
    let case = EmbeddingCase::barron_sobolev(unit_box(1), 0);
    for sigma in [0.3, 1.0, 2.5] {
        let f = TargetFunction::gaussian(1, sigma, vec![0.0], 1.0).unwrap();
        let rec = verify_embedding(&case, &f, &VerifySettings::default()).unwrap();
        let lhs = common::simpson(|x| f.eval_f(&[x]).unwrap().powi(2), -1.0, 1.0, 4000).sqrt();
        let barron = common::simpson(|k| f.eval_f_hat(&[k]).unwrap().norm(), -60.0 / sigma, 60.0 / sigma, 40_000);
        assert_relative_eq!(rec.lhs, lhs, max_relative = 1e-10);
        assert_relative_eq!(rec.rhs, 2f64.sqrt() * barron, max_relative = 1e-10);
        // ‖f‖_{L²(U)} ≤ |U|^{1/2} ‖f‖_∞ ≤ |U|^{1/2} (2π)^{-1/2} ‖f̂‖_{L¹}.
        assert!(rec.ratio <= (2.0 * PI).sqrt().recip());
    }
}

#[test]
fn plancherel_case_has_ratio_one() {
    let case = EmbeddingCase::hausdorff_young_i(1, 2.0, 2.0, WeightSpec::Constant);
    for f in [TargetFunction::standard_gaussian(1), TargetFunction::cauchy(1, 1.0, 1.0).unwrap()] {
        let rec = verify_embedding(&case, &f, &VerifySettings::default()).unwrap();
        assert_relative_eq!(rec.ratio, 1.0, max_relative = 1e-6);
    }
    let case = EmbeddingCase::hausdorff_young_ii(2, 2.0, 2.0, WeightSpec::Constant);
    let rec = verify_embedding(&case, &TargetFunction::standard_gaussian(2), &VerifySettings::default()).unwrap();
    assert_relative_eq!(rec.ratio, 1.0, max_relative = 1e-6);
}

#[test]
fn weighted_hausdorff_young_sides_match_gamma_integrals() {
    // Type II with d = 1, p = 4, q = 2, υ = |x|^{0.2} on the standard Gaussian (f̂ = e^{-ξ²/2}).
    let (p, q, alpha) = (4.0, 2.0, 0.2);
    let pc = p / (p - 1.0);
    let case = EmbeddingCase::hausdorff_young_ii(1, p, q, WeightSpec::power(alpha));
    let delta = 1.0 / pc - 1.0 / q;
    let rec = verify_embedding(&case, &TargetFunction::standard_gaussian(1), &VerifySettings::default()).unwrap();
    let lhs = gauss_moment(-alpha / pc * p, p / 2.0).powf(1.0 / p);
    let rhs = gauss_moment((delta + alpha / pc) * q, q / 2.0).powf(1.0 / q);
    assert_relative_eq!(rec.lhs, lhs, max_relative = 1e-8);
    assert_relative_eq!(rec.rhs, rhs, max_relative = 1e-8);
}

#[test]
fn spatial_power_norm_in_the_plane() {
    // ∫_{ℝ²} |x|^{βp} e^{-p|x|²/2} = π Γ(βp/2 + 1) (p/2)^{-(βp/2+1)}.
    let f = TargetFunction::standard_gaussian(2);
    for (beta, p) in [(0.5, 2.0), (-0.5, 3.0), (0.0, 1.0)] {
        let a = beta * p / 2.0 + 1.0;
        let exact = (PI * gamma(a) * (p / 2.0).powf(-a)).powf(1.0 / p);
        assert_relative_eq!(spatial_power_norm(&f, beta, p, 8).unwrap(), exact, max_relative = 1e-8);
    }
    assert!(matches!(spatial_power_norm(&f, -1.0, 2.0, 8), Err(Error::NonIntegrable(_))));
    assert!(spatial_power_norm(&TargetFunction::standard_gaussian(3), 0.0, 2.0, 8).is_err());
}

#[test]
fn unbounded_case_decay_factor() {
    // d = 1: ‖⟨·⟩^{-u}‖_{L^r} = (2/(ur - 1))^{1/r}.
    let (p, q, u) = (3.0, 1.2, 2.0);
    let case = EmbeddingCase::unbounded(1, 1, p, q, u);
    let r = unbounded_holder_exponent(p, q);
    assert_relative_eq!(1.0 / p, 1.0 / r + 1.0 - 1.0 / q, max_relative = 1e-14);
    let rec = verify_embedding(&case, &TargetFunction::standard_gaussian(1), &VerifySettings::default()).unwrap();
    assert_relative_eq!(rec.rhs_factors[0].1, (2.0 / (u * r - 1.0)).powf(1.0 / r), max_relative = 1e-12);
    assert_eq!(unbounded_holder_exponent(3.0, 1.0), 3.0);
    assert!(unbounded_holder_exponent(3.0, 1.5).is_infinite());
}

#[test]
fn optimized_exponent() {
    assert!(optimized_tau1(2.0).is_infinite());
    assert_relative_eq!(optimized_tau1(4.0), 4.0, max_relative = 1e-15);
    assert_relative_eq!(optimized_tau1(6.0), 3.0, max_relative = 1e-15);
}

#[test]
fn tau0_interval_by_regime() {
    // p = 4, p' = 4/3.
    let (lo, hi) = general_barron_tau0_interval(4.0, 1.5);
    assert_relative_eq!(lo, 3.0, max_relative = 1e-14);
    assert_relative_eq!(hi, 4.0, max_relative = 1e-14);
    let (lo, hi) = general_barron_tau0_interval(4.0, 3.0);
    assert_relative_eq!(lo, 1.5, max_relative = 1e-14);
    assert_relative_eq!(hi, 4.0, max_relative = 1e-14);
    let (lo, hi) = general_barron_tau0_interval(4.0, 8.0);
    assert_relative_eq!(lo, 4.0 / 3.0, max_relative = 1e-14);
    assert_relative_eq!(hi, 8.0 / 3.0, max_relative = 1e-14);
}

#[test]
fn toft_young_conditions() {
    // Young's inequality: 1/τ₀ + 1/τ₁ + 1/τ₂ = 2 with zero weights is admissible.
    assert!(toft_young_violations(1.0, [2.0, 2.0, 1.0], [0.0; 3]).is_empty());
    let v = toft_young_violations(1.0, [2.0, 2.0, 2.0], [0.0; 3]);
    assert!(v.iter().any(|x| x.name == "toft_sum"));
    let v = toft_young_violations(1.0, [4.0, 4.0, 4.0], [0.0; 3]);
    assert!(v.iter().any(|x| x.name == "toft_r_range"));
    let v = toft_young_violations(1.0, [2.0, 2.0, 1.0], [-1.0, 0.5, 0.5]);
    assert!(v.iter().any(|x| x.name == "toft_pair_01") && v.iter().any(|x| x.name == "toft_pair_02"));
    // R = 1/2, d = 1: t = (0, 1/2, 0) meets the sum with equality while t₁ = dR.
    let v = toft_young_violations(1.0, [2.0, 2.0, 2.0], [0.0, 0.5, 0.0]);
    assert_eq!(v.iter().map(|x| x.name.as_str()).collect::<Vec<_>>(), ["toft_sum_strict"]);
    assert!(toft_young_violations(1.0, [2.0, 2.0, 2.0], [0.0, 0.6, 0.0]).is_empty());
}

#[test]
fn validation_examples() {
    assert!(names(&EmbeddingCase::barron_sobolev(unit_box(2), 1)).is_empty());
    assert!(names(&EmbeddingCase::barron_sobolev(DomainSpec::FullSpace(1), 0)).contains(&"domain_bounded".into()));
    let ob = EmbeddingCase::optimized_barron(unit_box(1), 0, 4.0, 0.5, WeightSpec::Constant);
    assert!(names(&ob).contains(&"gamma_strict".into()));
    let ob = EmbeddingCase::optimized_barron(unit_box(1), 0, 4.0, 0.75, WeightSpec::power(0.5));
    assert!(names(&ob).contains(&"upsilon_muckenhoupt".into()));
    let ob = EmbeddingCase::optimized_barron(unit_box(1), 0, 4.0, 0.75, WeightSpec::power(0.25));
    assert!(names(&ob).is_empty());
    let ob = EmbeddingCase::optimized_barron(unit_box(1), 0, 2.0, 0.75, WeightSpec::power(-0.25));
    assert!(names(&ob).contains(&"upsilon_monotone".into()));
    let un = EmbeddingCase::unbounded(1, 0, 2.0, 3.0, 2.0);
    assert!(names(&un).contains(&"hausdorff_young_order".into()));
    let un = EmbeddingCase::unbounded(2, 0, 4.0, 1.0, 0.4);
    assert!(names(&un).contains(&"decay_integrability".into()));
}

#[test]
fn infeasible_cases_are_contract_errors() {
    let case = EmbeddingCase::optimized_barron(unit_box(1), 0, 2.0, 0.25, WeightSpec::Constant);
    let f = TargetFunction::standard_gaussian(1);
    assert!(matches!(verify_embedding(&case, &f, &VerifySettings::default()), Err(Error::Contract(_))));
    assert!(matches!(embedding_constant_scan(&case, &[f], &VerifySettings::default()), Err(Error::Contract(_))));
}

#[test]
fn scan_is_stable_under_refinement() {
    let case = EmbeddingCase::optimized_barron(unit_box(1), 1, 2.0, 0.75, WeightSpec::Constant);
    let fam = gaussian_family(1, 0.25, 4.0, 6).unwrap();
    let coarse = embedding_constant_scan(&case, &fam, &VerifySettings::default()).unwrap();
    let fine = embedding_constant_scan(&case, &fam, &VerifySettings::default().refined()).unwrap();
    assert!(coarse.max_ratio.is_finite() && coarse.max_ratio > 0.0);
    assert_relative_eq!(coarse.max_ratio, fine.max_ratio, max_relative = 1e-6);
    assert_eq!(coarse.records.len(), 6);
    let csv = ratio_csv(&coarse.records);
    assert!(csv.starts_with(RATIO_CSV_HEADER));
    assert_eq!(csv.lines().count(), 7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hausdorff_young_ratio_is_dilation_invariant(s1 in 0.3f64..3.0, s2 in 0.3f64..3.0, alpha in 0.0f64..0.3) {
        // Both sides scale like λ^{-d/p' - α/p'} under f(x) ↦ f(λx).
        let case = EmbeddingCase::hausdorff_young_ii(1, 4.0, 2.0, WeightSpec::power(alpha));
        let st = VerifySettings::default();
        let a = verify_embedding(&case, &TargetFunction::gaussian(1, s1, vec![0.0], 1.0).unwrap(), &st).unwrap();
        let b = verify_embedding(&case, &TargetFunction::gaussian(1, s2, vec![0.0], 1.0).unwrap(), &st).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-6 * a.ratio);
    }

    #[test]
    fn ratio_ignores_amplitude(c in 0.01f64..100.0, sigma in 0.3f64..3.0) {
        let case = EmbeddingCase::unbounded(1, 1, 2.0, 1.5, 3.0);
        let st = VerifySettings::default();
        let f = TargetFunction::gaussian(1, sigma, vec![0.2], 1.0).unwrap();
        let a = verify_embedding(&case, &f, &st).unwrap();
        let b = verify_embedding(&case, &f.scaled(c), &st).unwrap();
        prop_assert!((a.ratio - b.ratio).abs() <= 1e-10 * a.ratio);
    }
}
