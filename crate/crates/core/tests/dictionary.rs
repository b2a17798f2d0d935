mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use barron_core::dictionary::{
    activation_fourier, atom_eval, eval_activation, network_eval, neuron_sobolev_bound_for, select_tau,
    weighted_sup_constants, ActivationKind, ActivationSpec, Atom, NeuronBoundConfig, ShallowNetwork,
};
use barron_core::{Error, SmoothFunction};
use proptest::prelude::*;

fn activations() -> Vec<ActivationSpec> {
    vec![
        ActivationSpec::gaussian(),
        ActivationSpec::new(ActivationKind::Sech, None).unwrap(),
        ActivationSpec::new(ActivationKind::Rational, None).unwrap(),
        ActivationSpec::new(ActivationKind::Bump { band: 2.0 }, None).unwrap(),
    ]
}

#[test]
fn activation_derivatives_match_finite_differences() {
    let h = 1e-5;
    for rho in activations() {
        for k in 0..8 {
            for t in [-3.7, -1.0, -0.2, 0.0, 0.4, 1.3, 2.9, 6.0] {
                let fd = (eval_activation(&rho, k, t + h).unwrap() - eval_activation(&rho, k, t - h).unwrap()) / (2.0 * h);
                let exact = eval_activation(&rho, k + 1, t).unwrap();
                let scale = exact.abs().max(1.0);
                assert!((fd - exact).abs() < 1e-5 * scale, "{rho} k={} t={t}: {fd} vs {exact}", k + 1);
            }
        }
        assert!(matches!(eval_activation(&rho, 9, 0.0), Err(Error::UnsupportedOrder { .. })));
    }
}

#[test]
fn fourier_transform_by_quadrature() {
    // Forward transform for the fast-decaying activations.
    for rho in &activations()[..2] {
        for tau in [0.0, 0.5, 1.0, 2.3] {
            let v = common::simpson(|t| eval_activation(rho, 0, t).unwrap() * (tau * t).cos(), -60.0, 60.0, 60_000);
            assert_relative_eq!(activation_fourier(rho, tau).re, v / (2.0 * PI).sqrt(), epsilon = 1e-10);
        }
    }
    // Inverse transform for the two with algebraic tails, whose transforms decay fast or have compact support.
    for rho in &activations()[2..] {
        for t in [0.0, 0.7, -2.0, 5.5] {
            let v = common::simpson(|k| activation_fourier(rho, k).re * (k * t).cos(), -60.0, 60.0, 240_000);
            assert_relative_eq!(eval_activation(rho, 0, t).unwrap(), v / (2.0 * PI).sqrt(), epsilon = 1e-9);
        }
    }
}

#[test]
fn fourier_transform_at_zero() {
    assert_relative_eq!(activation_fourier(&ActivationSpec::gaussian(), 0.0).re, 1.0, max_relative = 1e-15);
    let bump = ActivationSpec::new(ActivationKind::Bump { band: 1.5 }, None).unwrap();
    assert_relative_eq!(activation_fourier(&bump, 0.0).re, 1.0, max_relative = 1e-15);
}

#[test]
fn tau_selection() {
    let g = ActivationSpec::gaussian();
    assert_eq!(select_tau(&g, &[-2.0, -1.0, 1.0, 2.0]).unwrap(), 1.0);
    assert_eq!(select_tau(&g, &[3.0, -0.5]).unwrap(), -0.5);
    let bump = ActivationSpec::new(ActivationKind::Bump { band: 2.0 }, None).unwrap();
    assert!(matches!(select_tau(&bump, &[3.0, 5.0]), Err(Error::NoValidTau(_))));
    assert!(matches!(select_tau(&g, &[]), Err(Error::Contract(_))));
    assert!(matches!(select_tau(&g, &[0.0]), Err(Error::Contract(_))));
}

#[test]
fn weighted_sup_of_gaussian() {
    // max_t (1+t)² e^{-t²/2} sits where 2/(1+t) = t, i.e. t = 1.
    let k = weighted_sup_constants(&ActivationSpec::gaussian(), 2.0, 0).unwrap();
    assert_relative_eq!(k[0], 4.0 * (-0.5f64).exp(), max_relative = 2e-6);
    assert!(k[0] >= 4.0 * (-0.5f64).exp());
}

#[test]
fn weighted_sup_dominates_random_points() {
    for rho in activations() {
        let v = rho.max_decay().min(3.0);
        let k = weighted_sup_constants(&rho, v, 4).unwrap();
        for (j, &kj) in k.iter().enumerate().take(5) {
            for i in 0..2000 {
                let t = -50.0 + i as f64 * 0.0517;
                let val = (1.0 + t.abs()).powf(v) * eval_activation(&rho, j, t).unwrap().abs();
                assert!(val <= kj, "{rho} order {j} at {t}: {val} > {kj}");
            }
        }
    }
}

/// ‖ρ(ξx/τ + b)‖_{W^{ℓ,p}(⟨x⟩^{-u}; ℝ)} by tan-substitution quadrature.
fn neuron_norm_1d(rho: &ActivationSpec, xi: f64, b: f64, tau: f64, ell: usize, p: f64, u: f64) -> f64 {
    let mut sum = 0.0;
    for k in 0..=ell {
        let chain = (xi / tau).abs().powi(k as i32);
        sum += common::line_integral(
            |x| (chain * eval_activation(rho, k, xi * x / tau + b).unwrap().abs() / (1.0 + x.abs()).powf(u)).powf(p),
            1.0,
            40_000,
        );
    }
    sum.powf(1.0 / p)
}

#[test]
fn neuron_bound_dominates_quadrature() {
    let rho = ActivationSpec::gaussian();
    for (xi, b, tau) in [(1.0, 0.0, 1.0), (3.0, 5.0, 1.0), (0.2, -4.0, 1.0), (2.0, 10.0, 0.5), (0.0, 2.0, 1.0)] {
        for ell in 0..=2 {
            let cfg = NeuronBoundConfig { dim: 1, ell, p: 2.0, u: 4.0, v: 2.0, r: 2.0, tau };
            let bound = neuron_sobolev_bound_for(&rho, &[xi], b, &cfg).unwrap();
            let norm = neuron_norm_1d(&rho, xi, b, tau, ell, 2.0, 4.0);
            assert!(norm <= bound, "ξ={xi} b={b} τ={tau} ℓ={ell}: {norm} > {bound}");
        }
    }
}

#[test]
fn neuron_bound_rejects_bad_parameters() {
    let rho = ActivationSpec::gaussian();
    let cfg = NeuronBoundConfig { dim: 1, ell: 0, p: 2.0, u: 2.2, v: 2.0, r: 2.0, tau: 1.0 };
    assert!(neuron_sobolev_bound_for(&rho, &[1.0], 0.0, &cfg).is_err());
    let cfg = NeuronBoundConfig { p: 1.5, u: 6.0, ..cfg };
    assert!(neuron_sobolev_bound_for(&rho, &[1.0], 0.0, &cfg).is_err());
}

fn atom(xi: Vec<f64>, b: f64, coefficient: f64) -> Atom {
    Atom { xi, b, tau: 1.0, prefactor: 1.5, coefficient }
}

#[test]
fn network_is_the_weighted_sum_of_atoms() {
    let rho = ActivationSpec::new(ActivationKind::Sech, None).unwrap();
    let atoms = vec![atom(vec![1.0, -0.5], 0.3, 0.4), atom(vec![0.2, 2.0], -1.0, -0.6)];
    let net = ShallowNetwork::new(2, 1.0, rho, 1.0, atoms.clone()).unwrap();
    for alpha in [[0u32, 0], [1, 0], [1, 2]] {
        let x = [0.3, -0.8];
        let direct: f64 = atoms.iter().map(|a| a.coefficient * atom_eval(a, &rho, &x, &alpha).unwrap()).sum();
        assert_relative_eq!(network_eval(&net, &x, &alpha).unwrap(), direct, max_relative = 1e-14);
        assert_relative_eq!(net.partial(&alpha, &x).unwrap(), direct, max_relative = 1e-14);
    }
}

#[test]
fn budget_is_enforced() {
    let rho = ActivationSpec::gaussian();
    let over = vec![atom(vec![1.0], 0.0, 0.7), atom(vec![2.0], 0.0, -0.7)];
    assert!(matches!(ShallowNetwork::new(1, 1.0, rho, 1.0, over), Err(Error::Contract(_))));
    let mut net = ShallowNetwork::new(1, 1.0, rho, 1.0, vec![atom(vec![1.0], 0.0, 0.7)]).unwrap();
    assert!(net.push(atom(vec![1.0], 1.0, 0.5)).is_err());
    assert_eq!(net.width(), 1);
    net.push(atom(vec![1.0], 1.0, 0.3)).unwrap();
    assert_eq!(net.width(), 2);
}

#[test]
fn malformed_network_text_is_rejected() {
    assert!(ShallowNetwork::from_text("d 1\nN 2\nM 1\ntau 1\nactivation gaussian\n1 0 1 0.5\n").is_err());
    assert!(ShallowNetwork::from_text("d 1\nN 1\nM 1\n").is_err());
}

proptest! {
    #[test]
    fn network_text_round_trips(
        d in 1usize..4,
        raw in prop::collection::vec((prop::collection::vec(-10.0f64..10.0, 3), -20.0f64..20.0, 0.01f64..5.0, -1.0f64..1.0), 0..12),
        tau in prop_oneof![0.5f64..3.0, -3.0f64..-0.5],
    ) {
        let n = raw.len().max(1) as f64;
        let atoms: Vec<Atom> = raw
            .into_iter()
            .map(|(xi, b, pre, c)| Atom { xi: xi[..d].to_vec(), b, tau, prefactor: pre, coefficient: c / n })
            .collect();
        let rho = ActivationSpec::new(ActivationKind::Sech, Some(3.0)).unwrap();
        let net = ShallowNetwork::new(d, tau, rho, 1.0, atoms).unwrap();
        let back = ShallowNetwork::from_text(&net.to_text()).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn neuron_bound_dominates_random_neurons(xi in -4.0f64..4.0, b in -15.0f64..15.0, ell in 0usize..3) {
        let rho = ActivationSpec::new(ActivationKind::Sech, None).unwrap();
        let cfg = NeuronBoundConfig { dim: 1, ell, p: 2.0, u: 4.5, v: 3.0, r: 2.5, tau: 1.0 };
        let bound = neuron_sobolev_bound_for(&rho, &[xi], b, &cfg).unwrap();
        let norm = neuron_norm_1d(&rho, xi, b, 1.0, ell, 2.0, 4.5);
        prop_assert!(norm <= bound, "{} > {}", norm, bound);
    }
}
