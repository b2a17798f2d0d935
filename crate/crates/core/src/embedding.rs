//! Empirical checks of Sobolev embeddings for Barron and Fourier-Lebesgue spaces and of
//! the weighted Hausdorff-Young inequalities.
//!
//! Every case bounds a weighted Sobolev norm of f by a product of factors (a norm of χ̂_U or
//! a power of |U|, times a frequency-side norm of f). The verifier evaluates both sides with
//! the crate's quadratures and reports their ratio; a uniform constant shows up as a finite
//! maximum ratio over a family of targets that is stable under refinement.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    fourier_lebesgue_estimate, spectral_integral, weighted_fourier_lebesgue, FreqSettings,
    SpectralIntegrand, TargetFunction,
};
use crate::error::{Error, Result};
use crate::norms::{build_quadrature, char_fn_fl_norm, weighted_sobolev_estimate, DomainSpec};
use crate::numerics::{
    bracket_decay_integral, conjugate, geometric_breaks, graded_breaks, pairwise_sum, panel_rule, sphere_area,
    uniform_breaks,
};
use crate::weights::{
    check_ap, lower_bound_check, sobolev_weight_from_upsilon, ApVerdict, BallFamily, WeightSpec,
};

/// Relative slack for the closed boundaries of the feasibility conditions.
const BOUNDARY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseKind {
    /// ‖f‖_{W^{ℓ,p}(ω;U)} ≤ C ‖χ_U‖_{ℱL^{τ₁}_{t₁}} ‖f‖_{ℱL^{τ₂}_{t₂+ℓ}} with τ₀ = q'.
    General,
    /// ‖f‖_{H^ℓ(U)} ≤ C |U|^{1/2} ‖f‖_{ℬ^ℓ}.
    BarronSobolev,
    /// The general embedding with τ₂ = 1 and a user-chosen τ₀.
    GeneralBarron,
    /// τ₀ = p, τ₁ = 2(p/2)', t₁ = t₂ = -t₀ = γ: ‖f‖_{W^{ℓ,p}(ω;U)} ≤ C ‖χ_U‖_{ℱL^{τ₁}_γ} ‖f‖_{ℬ^{γ+ℓ}}.
    OptimizedBarron,
    /// p = 2: ‖f‖_{H^ℓ(ω;U)} ≤ C ‖χ_U‖_{ℱL^{τ'}_γ} ‖f‖_{ℱL^τ_{γ+ℓ}}.
    ConjugateFourierLebesgue,
    /// p ≤ 2 route through Hölder: ‖f‖_{W^{ℓ,p}(ϑ;U)} ≤ C |U|^{1/p-1/r} ‖f‖_{ℱL^q(ω⟨·⟩^ℓ)}.
    LowDegree,
    /// ‖f‖_{W^{ℓ,p}(⟨·⟩^{-u};ℝ^d)} ≤ C ‖⟨·⟩^{-u}‖_{L^r} ‖f‖_{ℱL^q_ℓ}.
    UnboundedDomain,
    /// ‖f‖_{ℱL^q(ϑ)} ≤ C ‖f‖_{L^p(ω)} with ω = υ^{1/p}.
    HausdorffYoungI,
    /// ‖f‖_{ℱL^p(ω)} ≤ C ‖f‖_{L^q(ϑ)} with ω = υ^{-1/p'}.
    HausdorffYoungII,
}

impl CaseKind {
    pub const ALL: [CaseKind; 9] = [
        CaseKind::General,
        CaseKind::BarronSobolev,
        CaseKind::GeneralBarron,
        CaseKind::OptimizedBarron,
        CaseKind::ConjugateFourierLebesgue,
        CaseKind::LowDegree,
        CaseKind::UnboundedDomain,
        CaseKind::HausdorffYoungI,
        CaseKind::HausdorffYoungII,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CaseKind::General => "general",
            CaseKind::BarronSobolev => "barron-sobolev",
            CaseKind::GeneralBarron => "general-barron",
            CaseKind::OptimizedBarron => "optimized-barron",
            CaseKind::ConjugateFourierLebesgue => "conjugate-fl",
            CaseKind::LowDegree => "low-degree",
            CaseKind::UnboundedDomain => "unbounded",
            CaseKind::HausdorffYoungI => "hausdorff-young-1",
            CaseKind::HausdorffYoungII => "hausdorff-young-2",
        }
    }

    fn uses_bounded_domain(&self) -> bool {
        !matches!(self, CaseKind::UnboundedDomain | CaseKind::HausdorffYoungI | CaseKind::HausdorffYoungII)
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<&str> = CaseKind::ALL.iter().map(|k| k.name()).collect();
                Error::Parse(format!("unknown embedding case '{s}' (expected one of {})", names.join(", ")))
            })
    }
}

/// One embedding inequality with all of its parameters. Fields that a kind does not use are
/// ignored; the constructors fill them consistently.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCase {
    pub kind: CaseKind,
    pub dim: usize,
    pub ell: usize,
    /// Sobolev (or Lebesgue) exponent of the left-hand side.
    pub p: f64,
    /// Second exponent: Hausdorff-Young q, Fourier-Lebesgue exponent τ, or the low-degree q.
    pub q: f64,
    pub gamma: f64,
    /// User-chosen integrability exponents (τ₀, τ₁, τ₂); some kinds derive them instead.
    pub tau: [f64; 3],
    /// User-chosen weight degrees (t₀, t₁, t₂); t₀ is always derived.
    pub t: [f64; 3],
    /// Hölder exponent r of the low-degree case.
    pub r: f64,
    /// Decay u of the weight ⟨x⟩^{-u} on ℝ^d.
    pub u: f64,
    pub domain: DomainSpec,
    pub upsilon: WeightSpec,
}

impl EmbeddingCase {
    fn base(kind: CaseKind, domain: DomainSpec, ell: usize) -> Self {
        EmbeddingCase {
            kind,
            dim: domain.dim(),
            ell,
            p: 2.0,
            q: 2.0,
            gamma: 0.0,
            tau: [2.0, 2.0, 1.0],
            t: [0.0; 3],
            r: 2.0,
            u: 0.0,
            domain,
            upsilon: WeightSpec::Constant,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn general(
        domain: DomainSpec,
        ell: usize,
        p: f64,
        q: f64,
        gamma: f64,
        upsilon: WeightSpec,
        tau12: (f64, f64),
        t12: (f64, f64),
    ) -> Self {
        EmbeddingCase {
            p,
            q,
            gamma,
            upsilon,
            tau: [conjugate(q), tau12.0, tau12.1],
            t: [0.0, t12.0, t12.1],
            ..Self::base(CaseKind::General, domain, ell)
        }
    }

    pub fn barron_sobolev(domain: DomainSpec, ell: usize) -> Self {
        Self::base(CaseKind::BarronSobolev, domain, ell)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn general_barron(
        domain: DomainSpec,
        ell: usize,
        p: f64,
        gamma: f64,
        upsilon: WeightSpec,
        tau01: (f64, f64),
        t12: (f64, f64),
    ) -> Self {
        EmbeddingCase {
            p,
            q: conjugate(tau01.0),
            gamma,
            upsilon,
            tau: [tau01.0, tau01.1, 1.0],
            t: [0.0, t12.0, t12.1],
            ..Self::base(CaseKind::GeneralBarron, domain, ell)
        }
    }

    pub fn optimized_barron(domain: DomainSpec, ell: usize, p: f64, gamma: f64, upsilon: WeightSpec) -> Self {
        let tau1 = optimized_tau1(p);
        EmbeddingCase {
            p,
            q: conjugate(p),
            gamma,
            upsilon,
            tau: [p, tau1, 1.0],
            t: [-gamma, gamma, gamma],
            ..Self::base(CaseKind::OptimizedBarron, domain, ell)
        }
    }

    /// `tau` is the Fourier-Lebesgue exponent of f; χ_U is measured in ℱL^{τ'}.
    pub fn conjugate_fl(domain: DomainSpec, ell: usize, gamma: f64, tau: f64, upsilon: WeightSpec) -> Self {
        EmbeddingCase {
            q: tau,
            gamma,
            upsilon,
            tau: [2.0, conjugate(tau), tau],
            t: [-gamma, gamma, gamma],
            ..Self::base(CaseKind::ConjugateFourierLebesgue, domain, ell)
        }
    }

    pub fn low_degree(domain: DomainSpec, ell: usize, p: f64, q: f64, r: f64, upsilon: WeightSpec) -> Self {
        EmbeddingCase { p, q, r, upsilon, ..Self::base(CaseKind::LowDegree, domain, ell) }
    }

    /// r is derived from 1/p = 1/r + 1/q' (r = p when q = 1).
    pub fn unbounded(dim: usize, ell: usize, p: f64, q: f64, u: f64) -> Self {
        EmbeddingCase {
            p,
            q,
            u,
            r: unbounded_holder_exponent(p, q),
            ..Self::base(CaseKind::UnboundedDomain, DomainSpec::FullSpace(dim), ell)
        }
    }

    pub fn hausdorff_young_i(dim: usize, p: f64, q: f64, upsilon: WeightSpec) -> Self {
        EmbeddingCase { p, q, upsilon, ..Self::base(CaseKind::HausdorffYoungI, DomainSpec::FullSpace(dim), 0) }
    }

    pub fn hausdorff_young_ii(dim: usize, p: f64, q: f64, upsilon: WeightSpec) -> Self {
        EmbeddingCase { p, q, upsilon, ..Self::base(CaseKind::HausdorffYoungII, DomainSpec::FullSpace(dim), 0) }
    }

    /// δ = d(1/p' - 1/q).
    pub fn delta(&self) -> f64 {
        self.dim as f64 * (1.0 / conjugate(self.p) - 1.0 / self.q)
    }

    /// The effective (τ, t) of the convolution step, for the kinds that have one.
    pub fn toft_parameters(&self) -> Option<([f64; 3], [f64; 3])> {
        let g = self.gamma;
        match self.kind {
            CaseKind::General | CaseKind::GeneralBarron => {
                let t0 = -g - self.delta();
                Some((self.tau, [t0, self.t[1], self.t[2]]))
            }
            CaseKind::BarronSobolev => Some(([2.0, 2.0, 1.0], [0.0; 3])),
            CaseKind::OptimizedBarron | CaseKind::ConjugateFourierLebesgue => Some((self.tau, [-g, g, g])),
            _ => None,
        }
    }

    /// The weight applied on the left-hand side.
    pub fn lhs_weight(&self) -> Result<WeightSpec> {
        match self.kind {
            CaseKind::BarronSobolev => Ok(WeightSpec::Constant),
            CaseKind::General
            | CaseKind::GeneralBarron
            | CaseKind::OptimizedBarron
            | CaseKind::ConjugateFourierLebesgue => sobolev_weight_from_upsilon(&self.upsilon, self.p),
            CaseKind::LowDegree => {
                let delta = self.dim as f64 * (1.0 / conjugate(self.q) - 1.0 / self.r);
                Ok(self.upsilon.clone().raised(1.0 / self.q).reflected(delta))
            }
            CaseKind::UnboundedDomain => Ok(WeightSpec::BracketDecay(self.u)),
            CaseKind::HausdorffYoungI | CaseKind::HausdorffYoungII => {
                Err(Error::Contract("Hausdorff-Young cases have no Sobolev side".into()))
            }
        }
    }
}

impl fmt::Display for EmbeddingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:d={}:ell={}:p={}:q={}:gamma={}:tau={},{},{}:t={},{}:r={}:u={}:domain={}:upsilon={}",
            self.kind,
            self.dim,
            self.ell,
            self.p,
            self.q,
            self.gamma,
            self.tau[0],
            self.tau[1],
            self.tau[2],
            self.t[1],
            self.t[2],
            self.r,
            self.u,
            self.domain,
            self.upsilon
        )
    }
}

/// τ₁ = 2(p/2)' = 2p/(p-2), infinite at p = 2.
pub fn optimized_tau1(p: f64) -> f64 {
    2.0 * conjugate(p / 2.0)
}

/// r with 1/p = 1/r + 1/q' (r = p when q = 1; r = ∞ when q = p').
pub fn unbounded_holder_exponent(p: f64, q: f64) -> f64 {
    if q == 1.0 {
        return p;
    }
    let inv = 1.0 / p - 1.0 / conjugate(q);
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

/// A named failed condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn require(&mut self, ok: bool, name: &str, detail: impl FnOnce() -> String) {
        if !ok {
            self.out.push(Violation { name: name.to_string(), detail: detail() });
        }
    }
}

fn le(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a <= b;
    }
    a <= b + BOUNDARY_EPS * a.abs().max(b.abs()).max(1.0)
}

fn approx_eq(a: f64, b: f64) -> bool {
    le(a, b) && le(b, a)
}

/// Every violated condition of the case; an empty list means the parameters are feasible.
pub fn validate_params(case: &EmbeddingCase) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    let d = case.dim as f64;
    let (p, q) = (case.p, case.q);
    let pc = conjugate(p);

    c.require(case.dim >= 1 && case.domain.dim() == case.dim, "domain_dim", || {
        format!("domain {} does not match d = {}", case.domain, case.dim)
    });
    if case.kind.uses_bounded_domain() {
        c.require(case.domain.is_bounded(), "domain_bounded", || format!("{} is not bounded", case.domain));
    }

    match case.kind {
        CaseKind::General => {
            c.require(p > 1.0 && pc > 1.0 && le(pc, q) && le(q, p), "hausdorff_young_order", || {
                format!("need 1 < p' ≤ q ≤ p, got p' = {pc}, q = {q}, p = {p}")
            });
            c.require(p.is_finite(), "p_range", || "p must be finite".into());
            c.require(le(-case.delta(), case.gamma), "gamma_lower", || {
                format!("need γ ≥ -δ = {}, got {}", -case.delta(), case.gamma)
            });
            check_upsilon(&mut c, case, pc, true);
        }
        CaseKind::BarronSobolev => {
            c.require(case.upsilon == WeightSpec::Constant, "weight_constant", || {
                format!("the unweighted embedding needs υ ≡ 1, got {}", case.upsilon)
            });
        }
        CaseKind::GeneralBarron => {
            let (tau0, tau1) = (case.tau[0], case.tau[1]);
            c.require(le(2.0, p) && p.is_finite(), "p_range", || format!("need p ∈ [2, ∞), got {p}"));
            c.require(le(pc, tau1), "tau1_range", || format!("need τ₁ ∈ [p', ∞] = [{pc}, ∞], got {tau1}"));
            if le(pc, tau1) {
                let (lo, hi) = general_barron_tau0_interval(p, tau1);
                c.require(le(lo, tau0) && le(tau0, hi), "tau0_interval", || {
                    format!("need τ₀ ∈ [{lo}, {hi}] for τ₁ = {tau1}, got {tau0}")
                });
            }
            c.require(le(-case.delta(), case.gamma), "gamma_lower", || {
                format!("need γ ≥ {}, got {}", -case.delta(), case.gamma)
            });
            check_upsilon(&mut c, case, pc, true);
        }
        CaseKind::OptimizedBarron => {
            c.require(case.gamma > d / 2.0, "gamma_strict", || {
                format!("need γ > d/2 = {}, got {}", d / 2.0, case.gamma)
            });
            c.require(le(2.0, p) && p.is_finite(), "p_range", || format!("need p ∈ [2, ∞), got {p}"));
            check_upsilon(&mut c, case, pc, true);
        }
        CaseKind::ConjugateFourierLebesgue => {
            c.require(case.gamma > d / 2.0, "gamma_strict", || {
                format!("need γ > d/2 = {}, got {}", d / 2.0, case.gamma)
            });
            c.require(p == 2.0, "p_range", || format!("this case has p = 2, got {p}"));
            c.require(q >= 1.0, "tau_range", || format!("need τ ∈ [1, ∞], got {q}"));
            check_upsilon(&mut c, case, 2.0, true);
        }
        CaseKind::LowDegree => {
            let r = case.r;
            let qc = conjugate(q);
            c.require(p > 1.0 && p.is_finite() && q.is_finite() && r.is_finite(), "exponent_range", || {
                format!("need p, q, r ∈ (1, ∞), got p = {p}, q = {q}, r = {r}")
            });
            c.require(q > 1.0 && le(q, r) && le(r, qc), "hausdorff_young_order", || {
                format!("need 1 < q ≤ r ≤ q', got q = {q}, r = {r}, q' = {qc}")
            });
            c.require(le(p, r), "exponent_order", || format!("need p ≤ r, got p = {p}, r = {r}"));
            check_upsilon(&mut c, case, q, false);
        }
        CaseKind::UnboundedDomain => {
            let r = case.r;
            c.require(case.u >= 0.0 && case.u.is_finite(), "u_range", || format!("need u ≥ 0, got {}", case.u));
            c.require(le(2.0, p) && p.is_finite(), "p_range", || format!("need p ∈ [2, ∞), got {p}"));
            c.require(q >= 1.0 && le(q, pc.min(2.0)), "hausdorff_young_order", || {
                format!("need 1 ≤ q ≤ min(2, p') = {}, got {q}", pc.min(2.0))
            });
            c.require(r.is_infinite() || case.u * r > d, "decay_integrability", || {
                format!("need u·r > d, got u·r = {}", case.u * r)
            });
        }
        CaseKind::HausdorffYoungI => {
            c.require(p > 1.0 && le(p, q) && le(q, pc) && q.is_finite(), "hausdorff_young_order", || {
                format!("need 1 < p ≤ q ≤ p' with q finite, got p = {p}, q = {q}, p' = {pc}")
            });
            check_upsilon(&mut c, case, p, false);
        }
        CaseKind::HausdorffYoungII => {
            c.require(pc > 1.0 && le(pc, q) && le(q, p) && p.is_finite(), "hausdorff_young_order", || {
                format!("need 1 < p' ≤ q ≤ p with p finite, got p' = {pc}, q = {q}, p = {p}")
            });
            check_upsilon(&mut c, case, pc, false);
        }
    }

    if let Some((tau, t)) = case.toft_parameters() {
        check_toft_young(&mut c, d, tau, t);
    }
    c.out
}

/// τ₀ interval of the general Barron embedding as a function of τ₁ ≥ p'.
pub fn general_barron_tau0_interval(p: f64, tau1: f64) -> (f64, f64) {
    let pc = conjugate(p);
    let t1c = conjugate(tau1);
    if tau1 <= 2.0 {
        (t1c, p)
    } else if tau1 <= p {
        (t1c, p.min(optimized_tau1(tau1)))
    } else {
        (pc, p.min(optimized_tau1(tau1)))
    }
}

/// 0 ≤ R(τ) ≤ 1/2, t_j + t_k ≥ 0, and t₀ + t₁ + t₂ ≥ dR(τ), strictly when R(τ) > 0 and some
/// t_j equals dR(τ).
pub fn toft_young_violations(d: f64, tau: [f64; 3], t: [f64; 3]) -> Vec<Violation> {
    let mut c = Checker { out: Vec::new() };
    check_toft_young(&mut c, d, tau, t);
    c.out
}

fn check_toft_young(c: &mut Checker, d: f64, tau: [f64; 3], t: [f64; 3]) {
    c.require(tau.iter().all(|&x| x >= 1.0), "tau_range", || format!("need every τ_j ∈ [1, ∞], got {tau:?}"));
    let r = 2.0 - tau.iter().map(|x| 1.0 / x).sum::<f64>();
    c.require(le(0.0, r) && le(r, 0.5), "toft_r_range", || format!("need 0 ≤ R(τ) ≤ 1/2, got {r}"));
    for (j, k, name) in [(0, 1, "toft_pair_01"), (0, 2, "toft_pair_02"), (1, 2, "toft_pair_12")] {
        c.require(le(0.0, t[j] + t[k]), name, || format!("need t{j} + t{k} ≥ 0, got {}", t[j] + t[k]));
    }
    let slack = t[0] + t[1] + t[2] - d * r;
    c.require(le(0.0, slack), "toft_sum", || format!("need t₀ + t₁ + t₂ ≥ dR(τ), slack {slack}"));
    if le(0.0, slack) && r > BOUNDARY_EPS && t.iter().any(|&tj| approx_eq(tj, d * r)) {
        c.require(!approx_eq(slack, 0.0), "toft_sum_strict", || {
            format!("R(τ) = {r} > 0 and some t_j = dR(τ), so t₀ + t₁ + t₂ > dR(τ) must be strict")
        });
    }
}

/// υ radial non-decreasing, υ ∈ A_class, and (for the Sobolev-side kinds) υ ≥ ⟨1/|x|⟩^{-γp'}.
fn check_upsilon(c: &mut Checker, case: &EmbeddingCase, class: f64, lower_bound: bool) {
    let ups = &case.upsilon;
    let d = case.dim as f64;
    c.require(ups.is_radial_nondecreasing(), "upsilon_monotone", || format!("{ups} is not radially non-decreasing"));
    if !(class > 1.0 && class.is_finite()) {
        return;
    }
    let in_class = match ups.as_power() {
        Some(a) => a > -d && a < d * (class - 1.0),
        None => match check_ap(ups, class, &BallFamily::standard(case.dim)) {
            Ok(rep) => rep.verdict == ApVerdict::Bounded,
            Err(_) => false,
        },
    };
    c.require(in_class, "upsilon_muckenhoupt", || format!("{ups} is not in A_{class}"));
    if lower_bound {
        let ok = match ups.as_power() {
            Some(a) => a <= case.gamma * conjugate(case.p) * (1.0 + BOUNDARY_EPS) && a >= 0.0,
            None => {
                let samples: Vec<Vec<f64>> = (-60..=60)
                    .map(|k| {
                        let mut x = vec![0.0; case.dim];
                        x[0] = 10f64.powf(k as f64 / 10.0);
                        x
                    })
                    .collect();
                lower_bound_check(ups, case.gamma, case.p, &samples).map(|r| r.holds).unwrap_or(false)
            }
        };
        c.require(ok, "upsilon_lower_bound", || {
            format!("{ups} falls below ⟨1/|x|⟩^(-γp') with γ = {}", case.gamma)
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySettings {
    /// Gauss-Legendre nodes per spatial panel.
    pub resolution: usize,
    pub freq: FreqSettings,
}

impl Default for VerifySettings {
    fn default() -> Self {
        VerifySettings { resolution: 8, freq: FreqSettings::default() }
    }
}

impl VerifySettings {
    pub fn refined(&self) -> Self {
        VerifySettings { resolution: 2 * self.resolution, freq: self.freq.refined() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub case: String,
    pub function: String,
    pub lhs: f64,
    /// Named factors whose product is the right-hand side.
    pub rhs_factors: Vec<(String, f64)>,
    pub rhs: f64,
    pub ratio: f64,
    /// Quadrature tail bounds of the left side followed by those of each factor.
    pub uncertainties: Vec<f64>,
}

impl RatioRecord {
    fn new(case: &EmbeddingCase, f: &TargetFunction, lhs: f64, factors: Vec<(String, f64, f64)>, lhs_unc: f64) -> Self {
        let rhs: f64 = factors.iter().map(|x| x.1).product();
        let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
        let mut uncertainties = vec![lhs_unc];
        uncertainties.extend(factors.iter().map(|x| x.2));
        RatioRecord {
            case: case.kind.to_string(),
            function: f.id(),
            lhs,
            rhs_factors: factors.into_iter().map(|(n, v, _)| (n, v)).collect(),
            rhs,
            ratio,
            uncertainties,
        }
    }

    /// The largest uncertainty entry.
    pub fn uncertainty(&self) -> f64 {
        self.uncertainties.iter().copied().fold(0.0, f64::max)
    }

    fn check(self) -> Result<Self> {
        let all = [self.lhs, self.rhs, self.ratio].into_iter().chain(self.uncertainties.iter().copied());
        for v in all {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Evaluation(format!("ratio record for {} has entry {v}", self.function)));
            }
        }
        Ok(self)
    }
}

fn contract_violations(case: &EmbeddingCase) -> Result<()> {
    let v = validate_params(case);
    if v.is_empty() {
        Ok(())
    } else {
        let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        Err(Error::Contract(format!("{} parameters infeasible: {}", case.kind, list.join("; "))))
    }
}

fn named<T>(factor: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Diverging(m) => Error::Diverging(format!("{factor}: {m}")),
        other => other,
    })
}

fn fl_factor(f: &TargetFunction, q: f64, s: f64, settings: &FreqSettings, label: String) -> Result<(String, f64, f64)> {
    let est = named(&label, fourier_lebesgue_estimate(f, q, s, settings))?;
    Ok((label, est.value, est.quadrature.tail_bound))
}

fn barron_factor(f: &TargetFunction, s: f64, settings: &FreqSettings) -> Result<(String, f64, f64)> {
    let label = format!("barron(f,{s})");
    let est = named(&label, spectral_integral(f, SpectralIntegrand::barron(s), settings))?;
    Ok((label, est.value, est.quadrature.tail_bound))
}

fn chi_factor(dom: &DomainSpec, q: f64, gamma: f64) -> Result<(String, f64, f64)> {
    let label = format!("chi_U(FL^{q}_{gamma})");
    let est = named(&label, char_fn_fl_norm(dom, q, gamma))?;
    Ok((label, est.value, est.quadrature.tail_bound))
}

/// Measures both sides of the inequality for one target.
pub fn verify_embedding(case: &EmbeddingCase, f: &TargetFunction, settings: &VerifySettings) -> Result<RatioRecord> {
    contract_violations(case)?;
    crate::error::check_dim(case.dim, f.dim())?;
    if matches!(case.kind, CaseKind::HausdorffYoungI | CaseKind::HausdorffYoungII) {
        return hausdorff_young_check(f, case, settings);
    }
    let w = case.lhs_weight()?;
    let grid = build_quadrature(&case.domain, &w, case.p, settings.resolution)?;
    let lhs = named("left-hand side", weighted_sobolev_estimate(f, case.ell, case.p, &w, &grid))?;
    let ell = case.ell as f64;
    let fs = &settings.freq;
    let factors = match case.kind {
        CaseKind::General => {
            vec![
                chi_factor(&case.domain, case.tau[1], case.t[1])?,
                fl_factor(f, case.tau[2], case.t[2] + ell, fs, format!("f(FL^{}_{})", case.tau[2], case.t[2] + ell))?,
            ]
        }
        CaseKind::BarronSobolev => {
            let vol = case.domain.volume();
            vec![("|U|^(1/2)".to_string(), vol.sqrt(), 0.0), barron_factor(f, ell, fs)?]
        }
        CaseKind::GeneralBarron => {
            vec![chi_factor(&case.domain, case.tau[1], case.t[1])?, barron_factor(f, case.t[2] + ell, fs)?]
        }
        CaseKind::OptimizedBarron => {
            vec![chi_factor(&case.domain, case.tau[1], case.gamma)?, barron_factor(f, case.gamma + ell, fs)?]
        }
        CaseKind::ConjugateFourierLebesgue => {
            vec![
                chi_factor(&case.domain, conjugate(case.q), case.gamma)?,
                fl_factor(f, case.q, case.gamma + ell, fs, format!("f(FL^{}_{})", case.q, case.gamma + ell))?,
            ]
        }
        CaseKind::LowDegree => {
            let alpha = case
                .upsilon
                .as_power()
                .or(if case.upsilon == WeightSpec::Constant { Some(0.0) } else { None })
                .ok_or_else(|| Error::Parameter("the low-degree case supports power weights υ = |x|^α".into()))?;
            let vol = case.domain.volume();
            let label = format!("f(FL^{}(|xi|^{}<xi>^{}))", case.q, -alpha / case.q, ell);
            let est = named(&label, weighted_fourier_lebesgue(f, case.q, -alpha / case.q, ell, fs))?;
            vec![
                (format!("|U|^(1/{}-1/{})", case.p, case.r), vol.powf(1.0 / case.p - 1.0 / case.r), 0.0),
                (label, est.value, est.quadrature.tail_bound),
            ]
        }
        CaseKind::UnboundedDomain => {
            let decay = if case.r.is_infinite() {
                1.0
            } else {
                bracket_decay_integral(case.dim, case.u * case.r).powf(1.0 / case.r)
            };
            vec![
                (format!("<x>^(-{})(L^{})", case.u, case.r), decay, 0.0),
                fl_factor(f, case.q, ell, fs, format!("f(FL^{}_{})", case.q, ell))?,
            ]
        }
        CaseKind::HausdorffYoungI | CaseKind::HausdorffYoungII => unreachable!(),
    };
    RatioRecord::new(case, f, lhs.value, factors, lhs.tail_bound).check()
}

/// Weighted Hausdorff-Young ratio for power weights υ = |x|^α: Type I reports
/// ‖f‖_{ℱL^q(ϑ)} / ‖f‖_{L^p(ω)}, Type II reports ‖f‖_{ℱL^p(ω)} / ‖f‖_{L^q(ϑ)}, with
/// ϑ(x) = |x|^{d(1/p'-1/q)} ω(1/|x|).
pub fn hausdorff_young_check(f: &TargetFunction, case: &EmbeddingCase, settings: &VerifySettings) -> Result<RatioRecord> {
    if !matches!(case.kind, CaseKind::HausdorffYoungI | CaseKind::HausdorffYoungII) {
        return Err(Error::Contract(format!("{} is not a Hausdorff-Young case", case.kind)));
    }
    contract_violations(case)?;
    crate::error::check_dim(case.dim, f.dim())?;
    let alpha = match (&case.upsilon, case.upsilon.as_power()) {
        (_, Some(a)) => a,
        (WeightSpec::Constant, None) => 0.0,
        _ => return Err(Error::Parameter("Hausdorff-Young checks support power weights υ = |x|^α".into())),
    };
    let (p, q) = (case.p, case.q);
    let pc = conjugate(p);
    let delta = case.delta();
    let fs = &settings.freq;
    let (lhs_label, lhs_q, lhs_a, rhs_label, rhs_p, rhs_beta) = match case.kind {
        CaseKind::HausdorffYoungI => ("f(FL^q(theta))", q, delta - alpha / p, "f(L^p(omega))", p, alpha / p),
        _ => ("f(FL^p(omega))", p, -alpha / pc, "f(L^q(theta))", q, delta + alpha / pc),
    };
    let lhs = named(lhs_label, weighted_fourier_lebesgue(f, lhs_q, lhs_a, 0.0, fs))?;
    let rhs = named(rhs_label, spatial_power_norm(f, rhs_beta, rhs_p, settings.resolution))?;
    RatioRecord::new(
        case,
        f,
        lhs.value,
        vec![(rhs_label.to_string(), rhs, 0.0)],
        lhs.quadrature.tail_bound,
    )
    .check()
}

/// (∫_{ℝ^d} |x|^{βp} |f(x)|^p dx)^{1/p} for d ≤ 2, on radial panels graded toward the origin
/// and stretched geometrically far out.
pub fn spatial_power_norm(f: &TargetFunction, beta: f64, p: f64, resolution: usize) -> Result<f64> {
    let d = f.dim();
    if d > 2 {
        return Err(Error::Parameter(format!("spatial power norms are implemented for d ≤ 2, got d = {d}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("p must lie in [1, ∞), got {p}")));
    }
    let e = beta * p + d as f64;
    if e <= 0.0 {
        return Err(Error::NonIntegrable(format!("|x|^{} is not locally integrable in d = {d}", beta * p)));
    }
    let ext = f.spatial_extent();
    let h0 = ext / 8.0;
    let mut breaks = graded_breaks(h0, 40);
    breaks.extend(uniform_breaks(h0, 3.0 * ext, ext / 40.0).into_iter().skip(1));
    breaks.extend(geometric_breaks(3.0 * ext, 1e4 * ext, 1.25).into_iter().skip(1));
    let (rs, ws) = panel_rule(&breaks, resolution.max(2));
    let origin = vec![0.0; d];
    let f0 = f.eval_f(&origin)?.abs().powf(p);
    let mut terms = Vec::with_capacity(rs.len() + 1);
    terms.push(sphere_area(d) * f0 * breaks[0].powf(e) / e);
    if d == 1 {
        for (r, w) in rs.iter().zip(&ws) {
            let v = f.eval_f(&[*r])?.abs().powf(p) + f.eval_f(&[-*r])?.abs().powf(p);
            terms.push(w * r.powf(e - 1.0) * v);
        }
    } else {
        let m = (4.0 * std::f64::consts::TAU * ext * f.frequency_scale()).ceil().max(64.0) as usize;
        let dt = std::f64::consts::TAU / m as f64;
        for (r, w) in rs.iter().zip(&ws) {
            let mut ring = Vec::with_capacity(m);
            for j in 0..m {
                let th = j as f64 * dt;
                ring.push(f.eval_f(&[r * th.cos(), r * th.sin()])?.abs().powf(p));
            }
            terms.push(w * r.powf(e - 1.0) * pairwise_sum(&ring) * dt);
        }
    }
    Ok(pairwise_sum(&terms).powf(1.0 / p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub max_ratio: f64,
    pub records: Vec<RatioRecord>,
}

/// Ratios for every member of the family (in family order) and their maximum.
pub fn embedding_constant_scan(
    case: &EmbeddingCase,
    family: &[TargetFunction],
    settings: &VerifySettings,
) -> Result<ScanResult> {
    if family.is_empty() {
        return Err(Error::Contract("embedding scan needs a nonempty family".into()));
    }
    contract_violations(case)?;
    let records: Vec<RatioRecord> = family
        .par_iter()
        .map(|f| verify_embedding(case, f, settings))
        .collect::<Result<Vec<_>>>()?;
    let max_ratio = records.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(ScanResult { max_ratio, records })
}

/// Centred Gaussians of scales geometrically spaced over [lo, hi].
pub fn gaussian_family(dim: usize, lo: f64, hi: f64, members: usize) -> Result<Vec<TargetFunction>> {
    if members == 0 || !(lo > 0.0 && hi >= lo) {
        return Err(Error::Parameter(format!("bad family: {members} members on [{lo}, {hi}]")));
    }
    (0..members)
        .map(|i| {
            let t = if members == 1 { 0.0 } else { i as f64 / (members - 1) as f64 };
            let scale = lo * (hi / lo).powf(t);
            TargetFunction::gaussian(dim, scale, vec![0.0; dim], 1.0)
        })
        .collect()
}

pub const RATIO_CSV_HEADER: &str = "case,function,lhs,rhs,ratio,uncertainty";

pub fn ratio_csv(records: &[RatioRecord]) -> String {
    let mut out = String::from(RATIO_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},\"{}\",{:.16e},{:.16e},{:.16e},{:.6e}\n",
            r.case,
            r.function,
            r.lhs,
            r.rhs,
            r.ratio,
            r.uncertainty()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box() -> DomainSpec {
        DomainSpec::Box(vec![(-1.0, 1.0)])
    }

    #[test]
    fn optimized_canonical_passes() {
        for p in [2.0, 3.0, 4.0] {
            let c = EmbeddingCase::optimized_barron(unit_box(), 0, p, 0.6, WeightSpec::Constant);
            assert!(validate_params(&c).is_empty(), "{p}: {:?}", validate_params(&c));
        }
    }

    #[test]
    fn half_dimension_is_rejected_strictly() {
        let c = EmbeddingCase::optimized_barron(unit_box(), 0, 2.0, 0.5, WeightSpec::Constant);
        let names: Vec<String> = validate_params(&c).into_iter().map(|v| v.name).collect();
        assert!(names.contains(&"toft_sum_strict".to_string()), "{names:?}");
        assert!(names.contains(&"gamma_strict".to_string()));
    }

    #[test]
    fn unbounded_exponent() {
        assert_eq!(unbounded_holder_exponent(2.0, 1.0), 2.0);
        assert!(unbounded_holder_exponent(2.0, 2.0).is_infinite());
        assert!((unbounded_holder_exponent(4.0, 1.2) - 1.0 / (0.25 - 1.0 / 6.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_function_ratio() {
        let c = EmbeddingCase::barron_sobolev(unit_box(), 0);
        let f = TargetFunction::standard_gaussian(1).scaled(0.0);
        let r = verify_embedding(&c, &f, &VerifySettings::default()).unwrap();
        assert_eq!(r.ratio, 0.0);
    }
}
