//! The integral representation f(x) = C ∫∫ ρ(⟨ξ,x⟩/τ + b) f̂(ξ) e^{-iτb} db dξ with
//! C = ((2π)^{(d+1)/2} ρ̂(τ))^{-1}, its damped variants on bounded domains and on ℝ^d,
//! and Monte Carlo sampling of networks from the normalized measure.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::catalog::{radial_breaks, spectral_integral, FreqSettings, SpectralIntegrand, TargetFunction};
use crate::dictionary::{
    activation_fourier, weighted_sup_constants, ActivationSpec, Atom, NeuronBoundConfig, ShallowNetwork,
    RHO_HAT_FLOOR,
};
use crate::error::{check_dim, Error, Result};
use crate::norms::{build_quadrature, weight_lp_norm, DomainSpec};
use crate::numerics::{binomial, bracket, bracket_decay_integral, multi_indices, norm2, order, panel_rule, sphere_area};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Bounded domain U with damping φ̃(ξ,b) = (1 + (|b| - R_U|ξ|/|τ|)₊)^s.
    Bounded,
    /// All of ℝ^d with damping ϑ(ξ,b) = ⟨b⟩^r ⟨ξ⟩^{-r}.
    Unbounded,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "bounded" => Ok(Variant::Bounded),
            "unbounded" => Ok(Variant::Unbounded),
            _ => Err(Error::Parse(format!("unknown variant '{s}'"))),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Bounded => "bounded",
            Variant::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaureyConfig {
    pub variant: Variant,
    pub target: TargetFunction,
    pub activation: ActivationSpec,
    pub tau: f64,
    /// Weight order γ ≥ 0 (bounded variant).
    pub gamma: f64,
    pub ell: usize,
    /// Damping exponent s > 1 (bounded variant).
    pub s: f64,
    /// Damping exponent r ∈ (1, v] (unbounded variant).
    pub r: f64,
    pub domain: DomainSpec,
    pub freq: FreqSettings,
}

impl MaureyConfig {
    pub fn bounded(target: TargetFunction, domain: DomainSpec, gamma: f64, ell: usize, s: f64) -> Self {
        MaureyConfig {
            variant: Variant::Bounded,
            target,
            activation: ActivationSpec::gaussian(),
            tau: 1.0,
            gamma,
            ell,
            s,
            r: 2.0,
            domain,
            freq: FreqSettings::default(),
        }
    }

    pub fn unbounded(target: TargetFunction, ell: usize, r: f64) -> Self {
        let d = target.dim();
        MaureyConfig {
            variant: Variant::Unbounded,
            target,
            activation: ActivationSpec::gaussian(),
            tau: 1.0,
            gamma: 0.0,
            ell,
            s: 2.0,
            r,
            domain: DomainSpec::FullSpace(d),
            freq: FreqSettings::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    /// R_U (infinite for the unbounded variant).
    pub fn r_u(&self) -> f64 {
        self.domain.r_u()
    }

    /// The activation decay v: s for the bounded variant, r for the unbounded one,
    /// unless set explicitly on the activation.
    pub fn activation_decay(&self) -> f64 {
        match self.variant {
            Variant::Bounded => self.activation.decay_or(self.s),
            Variant::Unbounded => self.activation.decay_or(self.r),
        }
    }

    /// C = ((2π)^{(d+1)/2} ρ̂(τ))^{-1}.
    pub fn representation_constant(&self) -> Complex64 {
        let d = self.dim() as f64;
        let rho_hat = activation_fourier(&self.activation, self.tau);
        Complex64::new(1.0, 0.0) / ((2.0 * PI).powf((d + 1.0) / 2.0) * rho_hat)
    }

    /// Power of ⟨ξ⟩ in the density of |μ_f|.
    fn bracket_power(&self) -> f64 {
        match self.variant {
            Variant::Bounded => self.gamma + self.ell as f64,
            Variant::Unbounded => self.ell as f64 + self.r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim(), self.domain.dim())?;
        if self.tau == 0.0 || !self.tau.is_finite() {
            return Err(Error::Parameter("τ must be finite and nonzero".into()));
        }
        if activation_fourier(&self.activation, self.tau).norm() < RHO_HAT_FLOOR {
            return Err(Error::NoValidTau(format!("ρ̂({}) vanishes for activation {}", self.tau, self.activation)));
        }
        if self.ell > self.activation.max_order() || self.ell > self.target.max_order_supported() {
            return Err(Error::UnsupportedOrder {
                order: self.ell,
                max: self.activation.max_order().min(self.target.max_order_supported()),
            });
        }
        self.activation.check_decay(self.activation_decay())?;
        let needed = match self.variant {
            Variant::Bounded => {
                if !(self.s > 1.0) || !self.s.is_finite() {
                    return Err(Error::Parameter(format!("s must exceed 1, got {}", self.s)));
                }
                if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
                    return Err(Error::Parameter(format!("γ must be nonnegative, got {}", self.gamma)));
                }
                if !self.domain.is_bounded() {
                    return Err(Error::Parameter("the bounded variant needs a box or ball domain".into()));
                }
                self.gamma + self.ell as f64 + 1.0
            }
            Variant::Unbounded => {
                let v = self.activation_decay();
                if !(self.r > 1.0 && self.r <= v) {
                    return Err(Error::Parameter(format!("r must lie in (1, v] = (1, {v}], got {}", self.r)));
                }
                self.ell as f64 + self.r
            }
        };
        let limit = self.target.order_limit(1.0);
        if needed >= limit {
            return Err(Error::Diverging(format!(
                "{} is not in the Barron space of order {needed} (orders below {limit} only)",
                self.target
            )));
        }
        Ok(())
    }
}

/// |C| ⟨ξ⟩^{γ+ℓ} |f̂(ξ)| / φ̃(ξ,b), the density of |μ_f| for the bounded variant.
pub fn density_bounded(xi: &[f64], b: f64, cfg: &MaureyConfig) -> Result<f64> {
    if cfg.variant != Variant::Bounded {
        return Err(Error::Contract("density_bounded needs the bounded variant".into()));
    }
    let k = norm2(xi);
    let fh = cfg.target.eval_f_hat(xi)?.norm();
    let phi = damping_bounded(k, b, cfg);
    Ok(cfg.representation_constant().norm() * bracket(k).powf(cfg.bracket_power()) * fh / phi)
}

/// |C| ⟨ξ⟩^{ℓ+r} ⟨b⟩^{-r} |f̂(ξ)|, the density of |μ_f| for the unbounded variant.
pub fn density_unbounded(xi: &[f64], b: f64, cfg: &MaureyConfig) -> Result<f64> {
    if cfg.variant != Variant::Unbounded {
        return Err(Error::Contract("density_unbounded needs the unbounded variant".into()));
    }
    let k = norm2(xi);
    let fh = cfg.target.eval_f_hat(xi)?.norm();
    Ok(cfg.representation_constant().norm() * bracket(k).powf(cfg.bracket_power()) * bracket(b).powf(-cfg.r) * fh)
}

/// φ̃(ξ,b) = (1 + (|b| - R_U|ξ|/|τ|)₊)^s.
fn damping_bounded(k: f64, b: f64, cfg: &MaureyConfig) -> f64 {
    let a = cfg.r_u() * k / cfg.tau.abs();
    (1.0 + (b.abs() - a).max(0.0)).powf(cfg.s)
}

/// ∫ db / φ̃(ξ,b) = 2(a + 1/(s-1)) with a = R_U|ξ|/|τ|.
pub fn b_marginal_bounded(k: f64, cfg: &MaureyConfig) -> f64 {
    2.0 * (cfg.r_u() * k / cfg.tau.abs() + 1.0 / (cfg.s - 1.0))
}

/// arg(C f̂(ξ) e^{-iτb}) in (-π, π]; 0 where f̂ vanishes.
pub fn phase(xi: &[f64], b: f64, cfg: &MaureyConfig) -> Result<f64> {
    let z = cfg.representation_constant() * cfg.target.eval_f_hat(xi)? * Complex64::from_polar(1.0, -cfg.tau * b);
    Ok(normalize_phase(z))
}

fn normalize_phase(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let t = z.arg();
    if t <= -PI {
        PI
    } else {
        t
    }
}

/// Total variation M = ‖μ_f‖ and the contribution of the frequency tail bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mass {
    pub value: f64,
    pub uncertainty: f64,
    /// Truncation radius of the frequency quadrature.
    pub truncation: f64,
}

/// M = ∫∫ density, from the closed-form b-marginal times a frequency integral.
pub fn total_mass(cfg: &MaureyConfig) -> Result<Mass> {
    cfg.validate()?;
    let c = cfg.representation_constant().norm();
    let pw = cfg.bracket_power();
    match cfg.variant {
        Variant::Unbounded => {
            let est = spectral_integral(&cfg.target, SpectralIntegrand::barron(pw), &cfg.freq)?;
            let factor = c * 2.0 / (cfg.r - 1.0);
            Ok(Mass {
                value: factor * est.value,
                uncertainty: factor * est.quadrature.tail_bound,
                truncation: est.quadrature.truncation,
            })
        }
        Variant::Bounded => {
            let lin = spectral_integral(&cfg.target, SpectralIntegrand { a: 1.0, s: pw, q: 1.0 }, &cfg.freq)?;
            let con = spectral_integral(&cfg.target, SpectralIntegrand::barron(pw), &cfg.freq)?;
            let f1 = c * 2.0 * cfg.r_u() / cfg.tau.abs();
            let f0 = c * 2.0 / (cfg.s - 1.0);
            Ok(Mass {
                value: f1 * lin.value + f0 * con.value,
                uncertainty: f1 * lin.quadrature.tail_bound + f0 * con.quadrature.tail_bound,
                truncation: lin.quadrature.truncation.max(con.quadrature.truncation),
            })
        }
    }
}

/// One draw (ξ, b) with its phase θ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledAtom {
    pub xi: Vec<f64>,
    pub b: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledRepresentation {
    pub atoms: Vec<SampledAtom>,
    pub mass: f64,
    pub mass_uncertainty: f64,
    pub seed: u64,
}

/// Size of the tabulated radial inverse CDF.
const TABLE_SIZE: usize = 10_000;
/// Rejection sampling fails below this acceptance rate.
const MIN_ACCEPTANCE: f64 = 1e-3;
const MIN_ATTEMPTS: u64 = 1000;

/// Monotone table of the radial CDF, inverted by linear interpolation.
#[derive(Debug, Clone)]
struct RadialTable {
    knots: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialTable {
    fn build<F: Fn(f64) -> f64>(breaks: &[f64], density: F) -> Result<Self> {
        let panels = breaks.len().saturating_sub(1).max(1);
        let per_panel = TABLE_SIZE.div_ceil(panels).max(1);
        let mut knots = vec![breaks[0]];
        let mut cdf = vec![0.0];
        let mut acc = 0.0;
        for pair in breaks.windows(2) {
            let h = (pair[1] - pair[0]) / per_panel as f64;
            for j in 0..per_panel {
                let a = pair[0] + j as f64 * h;
                let b = if j + 1 == per_panel { pair[1] } else { a + h };
                let (xs, ws) = panel_rule(&[a, b], 4);
                acc += xs.iter().zip(&ws).map(|(x, w)| w * density(*x)).sum::<f64>();
                knots.push(b);
                cdf.push(acc);
            }
        }
        if !(acc > 0.0) || !acc.is_finite() {
            return Err(Error::Diverging("the frequency marginal has no finite positive mass".into()));
        }
        cdf.iter_mut().for_each(|c| *c /= acc);
        Ok(RadialTable { knots, cdf })
    }

    fn invert(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (k0, k1) = (self.knots[i - 1], self.knots[i]);
        if c1 > c0 {
            k0 + (k1 - k0) * (u - c0) / (c1 - c0)
        } else {
            k0
        }
    }
}

/// A prepared sampler: the mass, the radial table and the constants for one configuration.
#[derive(Debug, Clone)]
pub struct MaureySampler {
    cfg: MaureyConfig,
    mass: Mass,
    constant: Complex64,
    table: RadialTable,
    radial: bool,
}

impl MaureySampler {
    pub fn new(cfg: &MaureyConfig) -> Result<Self> {
        let mass = total_mass(cfg)?;
        let f = &cfg.target;
        let d = cfg.dim();
        let pw = cfg.bracket_power();
        let r_u = cfg.r_u();
        let tau = cfg.tau.abs();
        let s = cfg.s;
        let variant = cfg.variant;
        let weight = move |k: f64| {
            let base = bracket(k).powf(pw);
            match variant {
                Variant::Bounded => base * 2.0 * (r_u * k / tau + 1.0 / (s - 1.0)),
                Variant::Unbounded => base,
            }
        };
        let radial = f.has_radial_spectrum();
        let area = sphere_area(d);
        let breaks = radial_breaks(f, mass.truncation, false);
        let table = if radial {
            RadialTable::build(&breaks, |k| area * k.powi(d as i32 - 1) * weight(k) * f.radial_abs_f_hat(k))?
        } else {
            RadialTable::build(&breaks, |k| area * k.powi(d as i32 - 1) * weight(k) * f.spectral_envelope(k))?
        };
        Ok(MaureySampler { cfg: cfg.clone(), mass, constant: cfg.representation_constant(), table, radial })
    }

    pub fn config(&self) -> &MaureyConfig {
        &self.cfg
    }

    pub fn mass(&self) -> Mass {
        self.mass
    }

    fn draw_direction(&self, rng: &mut ChaCha20Rng) -> Vec<f64> {
        let d = self.cfg.dim();
        if d == 1 {
            return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
        }
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let n = norm2(&v);
            if n > 1e-12 {
                return v.into_iter().map(|x| x / n).collect();
            }
        }
    }

    fn draw_xi(&self, rng: &mut ChaCha20Rng, attempts: &mut u64, accepted: &mut u64) -> Result<Vec<f64>> {
        loop {
            let k = self.table.invert(rng.random::<f64>());
            let dir = self.draw_direction(rng);
            let xi: Vec<f64> = dir.iter().map(|u| k * u).collect();
            if self.radial {
                return Ok(xi);
            }
            *attempts += 1;
            let env = self.cfg.target.spectral_envelope(k);
            let ratio = if env > 0.0 { self.cfg.target.eval_f_hat(&xi)?.norm() / env } else { 0.0 };
            if rng.random::<f64>() < ratio {
                *accepted += 1;
                return Ok(xi);
            }
            if *attempts >= MIN_ATTEMPTS && (*accepted as f64) < MIN_ACCEPTANCE * *attempts as f64 {
                return Err(Error::Envelope { rate: *accepted as f64 / *attempts as f64 });
            }
        }
    }

    fn draw_b(&self, k: f64, rng: &mut ChaCha20Rng) -> f64 {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        match self.cfg.variant {
            Variant::Unbounded => {
                // P(|b| > t) = (1 + t)^{-(r-1)}.
                let u: f64 = rng.random();
                sign * ((1.0 - u).powf(-1.0 / (self.cfg.r - 1.0)) - 1.0)
            }
            Variant::Bounded => {
                let a = self.cfg.r_u() * k / self.cfg.tau.abs();
                let tail = 1.0 / (self.cfg.s - 1.0);
                let u: f64 = rng.random();
                if u * (a + tail) < a {
                    sign * rng.random::<f64>() * a
                } else {
                    let v: f64 = rng.random();
                    sign * (a + (1.0 - v).powf(-1.0 / (self.cfg.s - 1.0)) - 1.0)
                }
            }
        }
    }

    /// N i.i.d. draws from |μ_f|/M. The RNG is ChaCha20 seeded with `seed`; draws are taken in
    /// order from one stream, so the sample of size N is a prefix of every larger sample with
    /// the same seed.
    pub fn sample(&self, n: usize, seed: u64) -> Result<SampledRepresentation> {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut atoms = Vec::with_capacity(n);
        let (mut attempts, mut accepted) = (0u64, 0u64);
        for _ in 0..n {
            let xi = self.draw_xi(&mut rng, &mut attempts, &mut accepted)?;
            let b = self.draw_b(norm2(&xi), &mut rng);
            let z = self.constant * self.cfg.target.eval_f_hat(&xi)? * Complex64::from_polar(1.0, -self.cfg.tau * b);
            atoms.push(SampledAtom { xi, b, theta: normalize_phase(z) });
        }
        Ok(SampledRepresentation { atoms, mass: self.mass.value, mass_uncertainty: self.mass.uncertainty, seed })
    }

    /// The network (M/N) Σ cos θ_i g_i with the variant's atom prefactors.
    pub fn assemble(&self, rep: &SampledRepresentation) -> Result<ShallowNetwork> {
        assemble_network(rep, &self.cfg)
    }
}

pub fn sample_atoms(cfg: &MaureyConfig, n: usize, seed: u64) -> Result<SampledRepresentation> {
    MaureySampler::new(cfg)?.sample(n, seed)
}

/// Prefactor φ̃(ξ,b)/⟨ξ⟩^{γ+ℓ} (bounded) or ϑ(ξ,b)/⟨ξ⟩^ℓ = ⟨b⟩^r ⟨ξ⟩^{-r-ℓ} (unbounded).
pub fn atom_prefactor(xi: &[f64], b: f64, cfg: &MaureyConfig) -> f64 {
    let k = norm2(xi);
    match cfg.variant {
        Variant::Bounded => damping_bounded(k, b, cfg) / bracket(k).powf(cfg.gamma + cfg.ell as f64),
        Variant::Unbounded => bracket(b).powf(cfg.r) * bracket(k).powf(-cfg.r - cfg.ell as f64),
    }
}

pub fn assemble_network(rep: &SampledRepresentation, cfg: &MaureyConfig) -> Result<ShallowNetwork> {
    let n = rep.atoms.len();
    let d = cfg.dim();
    let mut atoms = Vec::with_capacity(n);
    for a in &rep.atoms {
        check_dim(d, a.xi.len())?;
        atoms.push(Atom {
            xi: a.xi.clone(),
            b: a.b,
            tau: cfg.tau,
            prefactor: atom_prefactor(&a.xi, a.b, cfg),
            coefficient: rep.mass / n as f64 * a.theta.cos(),
        });
    }
    ShallowNetwork::new(d, cfg.tau, cfg.activation, rep.mass, atoms)
}

/// Grid resolution used for ‖ω‖_{L^p(U)} in the bounded dictionary bound.
const WEIGHT_NORM_RESOLUTION: usize = 16;

/// An explicit K_𝔻 with ‖g‖ ≤ K_𝔻 for every atom g of the dictionary.
///
/// Bounded variant: K_𝔻 = C_ρ Σ_{k≤ℓ} #{|α| = k} |τ|^{-k} ‖ω‖_{L^p(U)}, where
/// C_ρ = max_{k≤ℓ} sup ⟨t⟩^s |ρ^{(k)}(t)|.
/// Unbounded variant (ω = ⟨x⟩^{-u}): K_𝔻 = min(1,|τ|)^{-r} D E (Σ_{|α|≤ℓ} (|τ|^{-|α|} K_{|α|})^p)^{1/p},
/// with the constants of [`crate::dictionary::neuron_sobolev_bound`], and at least the ξ = 0 value.
pub fn dictionary_bound(cfg: &MaureyConfig, w: &WeightSpec, p: f64) -> Result<f64> {
    cfg.validate()?;
    let d = cfg.dim();
    let tau = cfg.tau.abs();
    let v = cfg.activation_decay();
    let k = weighted_sup_constants(&cfg.activation, v, cfg.ell)?;
    match cfg.variant {
        Variant::Bounded => {
            let grid = build_quadrature(&cfg.domain, w, p, WEIGHT_NORM_RESOLUTION)
                .map_err(|e| Error::Parameter(format!("‖ω‖_(L^p(U)) is not finite: {e}")))?;
            let omega = weight_lp_norm(w, p, &grid)?;
            if !omega.is_finite() {
                return Err(Error::Parameter("‖ω‖_(L^p(U)) diverges".into()));
            }
            let c_rho = k.iter().copied().fold(0.0, f64::max);
            let sum: f64 = (0..=cfg.ell).map(|j| binomial(j + d - 1, d - 1) * tau.powi(-(j as i32))).sum();
            Ok(c_rho * sum * omega)
        }
        Variant::Unbounded => {
            let u = match w {
                WeightSpec::BracketDecay(u) => *u,
                _ => return Err(Error::Parameter(format!("the unbounded variant measures with decay:u, got {w}"))),
            };
            let nb = NeuronBoundConfig { dim: d, ell: cfg.ell, p, u, v, r: cfg.r, tau: cfg.tau };
            let e = nb.e_constant();
            if !e.is_finite() || (u - cfg.r) * p <= d as f64 {
                return Err(Error::Parameter(format!("need (u - r)p > d, got ({u} - {})·{p}", cfg.r)));
            }
            let sum: f64 = multi_indices(d, cfg.ell)
                .iter()
                .map(|a| {
                    let j = order(a);
                    (tau.powi(-(j as i32)) * k[j]).powf(p)
                })
                .sum();
            let general = tau.min(1.0).powf(-cfg.r) * nb.d_constant() * e * sum.powf(1.0 / p);
            let at_zero = k[0] * bracket_decay_integral(d, u * p).powf(1.0 / p);
            Ok(general.max(at_zero))
        }
    }
}
